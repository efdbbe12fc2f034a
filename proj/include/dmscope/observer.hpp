#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "dmscope/histogram.hpp"
#include "dmscope/metrics.hpp"
#include "dmscope/reconstruction.hpp"

namespace dmscope {

enum class Verdict { kInScope, kOutOfDomain, kUncalibrated };

std::string_view to_string(Verdict v);
Verdict verdict_from_string(std::string_view s);

struct Calibration {
    double validation_dm_dB = 0.0;
    double threshold_dB = 0.0;  // always 2 * validation_dm_dB
};

/// Persisted source-domain profile: the training-corpus PSNR histogram, the
/// reconstructor that produced it, and (once calibrated) the functional-scope
/// threshold. Immutable once calibrated; safe to share across evaluations.
struct DomainReference {
    PerformanceHistogram histogram;
    Reconstructor reconstructor;
    std::string created_from;  // corpus descriptor; doubles as reference id
    std::optional<Calibration> calibration;

    bool calibrated() const { return calibration.has_value(); }
};

struct ObserverConfig {
    /// Minimum batch size before an in_scope/out_of_domain verdict is issued;
    /// smaller batches report uncalibrated (DM is still computed). Single
    /// images are too unreliable to call a domain shift on.
    std::size_t min_batch_for_verdict = 30;
    PsnrConfig psnr;
    /// Pins report timestamps for reproducible runs.
    std::optional<std::int64_t> fixed_clock;
};

struct DmReport {
    double dm_dB = 0.0;
    double mean_psnr_dB = 0.0;
    double stddev_psnr_dB = 0.0;  // population, over the batch's raw scores
    std::size_t sample_count = 0;
    Verdict verdict = Verdict::kUncalibrated;
    std::optional<double> threshold_dB;
    std::string reference_id;
    std::int64_t timestamp_unix = 0;
    std::optional<std::size_t> window_index;
};

/// Scores every image and builds the source histogram; uncalibrated.
DomainReference build_reference(std::span<const Image> images, const Reconstructor& r,
                                const BinningConfig& binning, std::string created_from = {},
                                const ObserverConfig& cfg = {});

/// Computes the in-domain validation DM against the reference histogram and
/// sets threshold_dB = 2 * validation_dm_dB. Recalibration is allowed and
/// idempotent for the same validation corpus.
DomainReference calibrate(DomainReference ref, std::span<const Image> validation_images,
                          const ObserverConfig& cfg = {});

/// Scores a target batch, builds its histogram, computes DM against the
/// reference, and applies the verdict rule (dm <= threshold counts as
/// in_scope). Uncalibrated references and batches below the minimum size
/// yield verdict uncalibrated with DM still reported.
DmReport evaluate_batch(const DomainReference& ref, std::span<const Image> images,
                        const ObserverConfig& cfg = {});

/// One DmReport per complete window position over the stream; each report
/// equals evaluate_batch on that window. window >= 10, stride >= 1, and the
/// stream must be at least one window long.
std::vector<DmReport> sliding_window_observe(const DomainReference& ref,
                                             std::span<const Image> stream, std::size_t window,
                                             std::size_t stride, const ObserverConfig& cfg = {});

}  // namespace dmscope
