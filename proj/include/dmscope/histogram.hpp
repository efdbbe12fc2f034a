#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace dmscope {

/// Common bin grid for source and target PSNR distributions.
/// (hi_dB - lo_dB) / width_dB must be a positive integer.
class BinningConfig {
  public:
    BinningConfig(double lo_dB, double hi_dB, double width_dB);

    /// 10..45 dB at 0.5 dB width (70 bins).
    static BinningConfig default_psnr();

    double lo_dB() const { return lo_dB_; }
    double hi_dB() const { return hi_dB_; }
    double width_dB() const { return width_dB_; }
    std::size_t bin_count() const { return bin_count_; }

    /// floor((v - lo)/width), clamped into the edge bins for out-of-support v.
    std::size_t bin_index(double value_dB) const;

    double bin_lo(std::size_t bin) const { return lo_dB_ + width_dB_ * static_cast<double>(bin); }
    double bin_hi(std::size_t bin) const { return lo_dB_ + width_dB_ * static_cast<double>(bin + 1); }
    double bin_center(std::size_t bin) const {
        return lo_dB_ + width_dB_ * (static_cast<double>(bin) + 0.5);
    }

    bool operator==(const BinningConfig& other) const = default;

  private:
    double lo_dB_;
    double hi_dB_;
    double width_dB_;
    std::size_t bin_count_;
};

/// Binned distribution of per-image PSNR scores. Value-like and mergeable;
/// clamping at the support edges means no score is ever dropped.
class PerformanceHistogram {
  public:
    explicit PerformanceHistogram(BinningConfig binning);
    PerformanceHistogram(BinningConfig binning, std::vector<std::uint64_t> counts);

    const BinningConfig& binning() const { return binning_; }
    std::span<const std::uint64_t> counts() const { return counts_; }
    std::uint64_t total() const { return total_; }

    void add(double score_dB);

  private:
    BinningConfig binning_;
    std::vector<std::uint64_t> counts_;
    std::uint64_t total_;
};

/// Bins a non-empty score sequence. Throws std::invalid_argument when empty.
PerformanceHistogram build_histogram(std::span<const double> scores, const BinningConfig& binning);

/// Bin-wise count sum; requires identical binning.
/// merge(build(S1), build(S2)) == build(S1 ++ S2).
PerformanceHistogram merge(const PerformanceHistogram& a, const PerformanceHistogram& b);

/// Bin masses counts/total, summing to 1. Throws on an empty histogram.
std::vector<double> normalize_histogram(const PerformanceHistogram& h);

struct SummaryStats {
    double mean_dB;
    double stddev_dB;  // population
};

/// Mean and population standard deviation of bin centers weighted by mass.
SummaryStats summary_stats(const PerformanceHistogram& h);

}  // namespace dmscope
