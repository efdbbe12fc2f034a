#include "dmscope/observer.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>

#include "dmscope/transport.hpp"

namespace dmscope {

namespace {

std::int64_t now_or_fixed(const ObserverConfig& cfg) {
    if (cfg.fixed_clock) return *cfg.fixed_clock;
    return std::chrono::duration_cast<std::chrono::seconds>(
               std::chrono::system_clock::now().time_since_epoch())
        .count();
}

struct MeanStd {
    double mean;
    double stddev;  // population
};

MeanStd mean_std(std::span<const double> values) {
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= static_cast<double>(values.size());
    double var = 0.0;
    for (double v : values) var += (v - mean) * (v - mean);
    var /= static_cast<double>(values.size());
    return {mean, std::sqrt(var)};
}

}  // namespace

std::string_view to_string(Verdict v) {
    switch (v) {
        case Verdict::kInScope: return "in_scope";
        case Verdict::kOutOfDomain: return "out_of_domain";
        case Verdict::kUncalibrated: return "uncalibrated";
    }
    return "uncalibrated";
}

Verdict verdict_from_string(std::string_view s) {
    if (s == "in_scope") return Verdict::kInScope;
    if (s == "out_of_domain") return Verdict::kOutOfDomain;
    if (s == "uncalibrated") return Verdict::kUncalibrated;
    throw std::invalid_argument("unknown verdict '" + std::string(s) + "'");
}

DomainReference build_reference(std::span<const Image> images, const Reconstructor& r,
                                const BinningConfig& binning, std::string created_from,
                                const ObserverConfig& cfg) {
    if (images.empty()) throw std::invalid_argument("build_reference: empty corpus");
    const auto scores = score_corpus(r, images, cfg.psnr);
    return DomainReference{build_histogram(scores, binning), r, std::move(created_from),
                           std::nullopt};
}

DomainReference calibrate(DomainReference ref, std::span<const Image> validation_images,
                          const ObserverConfig& cfg) {
    if (validation_images.empty()) throw std::invalid_argument("calibrate: empty corpus");
    const auto scores = score_corpus(ref.reconstructor, validation_images, cfg.psnr);
    const auto validation_hist = build_histogram(scores, ref.histogram.binning());
    const double dm = dm_metric(ref.histogram, validation_hist).dm_dB;
    ref.calibration = Calibration{dm, 2.0 * dm};
    return ref;
}

DmReport evaluate_batch(const DomainReference& ref, std::span<const Image> images,
                        const ObserverConfig& cfg) {
    if (images.empty()) throw std::invalid_argument("evaluate_batch: empty corpus");
    const auto scores = score_corpus(ref.reconstructor, images, cfg.psnr);
    const auto target = build_histogram(scores, ref.histogram.binning());

    DmReport report;
    report.dm_dB = dm_metric(ref.histogram, target).dm_dB;
    const auto stats = mean_std(scores);
    report.mean_psnr_dB = stats.mean;
    report.stddev_psnr_dB = stats.stddev;
    report.sample_count = images.size();
    report.reference_id = ref.created_from;
    report.timestamp_unix = now_or_fixed(cfg);

    if (ref.calibration) {
        report.threshold_dB = ref.calibration->threshold_dB;
        if (images.size() < cfg.min_batch_for_verdict) {
            report.verdict = Verdict::kUncalibrated;  // batch too small for a scope statement
        } else if (report.dm_dB <= ref.calibration->threshold_dB) {
            report.verdict = Verdict::kInScope;
        } else {
            report.verdict = Verdict::kOutOfDomain;
        }
    } else {
        report.verdict = Verdict::kUncalibrated;
    }
    return report;
}

std::vector<DmReport> sliding_window_observe(const DomainReference& ref,
                                             std::span<const Image> stream, std::size_t window,
                                             std::size_t stride, const ObserverConfig& cfg) {
    if (window < 10) throw std::invalid_argument("sliding_window: window must be >= 10");
    if (stride < 1) throw std::invalid_argument("sliding_window: stride must be >= 1");
    if (stream.size() < window) {
        throw std::invalid_argument("sliding_window: stream shorter than window");
    }
    std::vector<DmReport> reports;
    std::size_t index = 0;
    for (std::size_t pos = 0; pos + window <= stream.size(); pos += stride, ++index) {
        DmReport report = evaluate_batch(ref, stream.subspan(pos, window), cfg);
        report.window_index = index;
        reports.push_back(std::move(report));
    }
    return reports;
}

}  // namespace dmscope
