#include "dmscope/histogram.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace dmscope {

BinningConfig::BinningConfig(double lo_dB, double hi_dB, double width_dB)
    : lo_dB_(lo_dB), hi_dB_(hi_dB), width_dB_(width_dB) {
    if (!(lo_dB < hi_dB)) throw std::invalid_argument("binning: lo_dB must be < hi_dB");
    if (!(width_dB > 0.0)) throw std::invalid_argument("binning: width_dB must be positive");
    const double bins = (hi_dB - lo_dB) / width_dB;
    const double rounded = std::round(bins);
    if (rounded < 1.0 || std::abs(bins - rounded) > 1e-9 * rounded) {
        throw std::invalid_argument("binning: (hi - lo)/width is not a positive integer");
    }
    bin_count_ = static_cast<std::size_t>(rounded);
}

BinningConfig BinningConfig::default_psnr() { return BinningConfig(10.0, 45.0, 0.5); }

std::size_t BinningConfig::bin_index(double value_dB) const {
    if (value_dB < lo_dB_) return 0;
    if (value_dB >= hi_dB_) return bin_count_ - 1;
    const auto idx = static_cast<std::size_t>(std::floor((value_dB - lo_dB_) / width_dB_));
    return idx >= bin_count_ ? bin_count_ - 1 : idx;
}

PerformanceHistogram::PerformanceHistogram(BinningConfig binning)
    : binning_(binning), counts_(binning.bin_count(), 0), total_(0) {}

PerformanceHistogram::PerformanceHistogram(BinningConfig binning, std::vector<std::uint64_t> counts)
    : binning_(binning), counts_(std::move(counts)), total_(0) {
    if (counts_.size() != binning_.bin_count()) {
        throw std::invalid_argument("histogram: counts length does not match bin count");
    }
    for (std::uint64_t c : counts_) total_ += c;
}

void PerformanceHistogram::add(double score_dB) {
    ++counts_[binning_.bin_index(score_dB)];
    ++total_;
}

PerformanceHistogram build_histogram(std::span<const double> scores, const BinningConfig& binning) {
    if (scores.empty()) throw std::invalid_argument("build_histogram: empty score sequence");
    PerformanceHistogram h(binning);
    for (double s : scores) h.add(s);
    return h;
}

PerformanceHistogram merge(const PerformanceHistogram& a, const PerformanceHistogram& b) {
    if (!(a.binning() == b.binning())) {
        throw std::invalid_argument("merge: histogram binning configs differ");
    }
    std::vector<std::uint64_t> counts(a.counts().begin(), a.counts().end());
    for (std::size_t i = 0; i < counts.size(); ++i) counts[i] += b.counts()[i];
    return PerformanceHistogram(a.binning(), std::move(counts));
}

std::vector<double> normalize_histogram(const PerformanceHistogram& h) {
    if (h.total() == 0) throw std::invalid_argument("normalize_histogram: empty histogram");
    std::vector<double> mass(h.counts().size());
    const double total = static_cast<double>(h.total());
    for (std::size_t i = 0; i < mass.size(); ++i) {
        mass[i] = static_cast<double>(h.counts()[i]) / total;
    }
    return mass;
}

SummaryStats summary_stats(const PerformanceHistogram& h) {
    const auto mass = normalize_histogram(h);
    double mean = 0.0;
    for (std::size_t i = 0; i < mass.size(); ++i) mean += mass[i] * h.binning().bin_center(i);
    double var = 0.0;
    for (std::size_t i = 0; i < mass.size(); ++i) {
        const double d = h.binning().bin_center(i) - mean;
        var += mass[i] * d * d;
    }
    return SummaryStats{mean, std::sqrt(var)};
}

}  // namespace dmscope
