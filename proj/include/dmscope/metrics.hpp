#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "dmscope/image.hpp"

namespace dmscope {

struct PsnrConfig {
    double peak = 255.0;   // x'_max
    double cap_dB = 99.0;  // finite value returned when MSE == 0
};

/// Peak signal-to-noise ratio in dB between an image and its reconstruction:
/// 10*log10(peak^2 / MSE) with MSE taken over denormalized [0,255] values.
/// Symmetric in its two arguments; returns cfg.cap_dB when MSE == 0.
/// Throws std::invalid_argument on dimension mismatch.
double psnr(const Image& original, const Image& reconstruction, const PsnrConfig& cfg = {});

/// Per-class TP/FP/FN pixel counters for segmentation evaluation,
/// summed over all accumulated images. Mergeable (associative, commutative)
/// so per-image counts can be computed in parallel and combined.
class ConfusionAccumulator {
  public:
    explicit ConfusionAccumulator(int class_count);

    /// Adds one image's pixel-wise confusion counts. Ignore pixels in gt
    /// contribute nothing; pred must contain no ignore markers.
    void accumulate(const LabelMap& gt, const LabelMap& pred);

    void merge(const ConfusionAccumulator& other);

    int class_count() const { return class_count_; }
    // 1-based class index, matching LabelMap IDs.
    std::uint64_t tp(int s) const { return tp_[s - 1]; }
    std::uint64_t fp(int s) const { return fp_[s - 1]; }
    std::uint64_t fn(int s) const { return fn_[s - 1]; }

  private:
    int class_count_;
    std::vector<std::uint64_t> tp_, fp_, fn_;
};

/// Mean intersection-over-union: mean over classes of TP/(TP+FP+FN).
/// Classes with TP+FP+FN == 0 are excluded from the mean; throws
/// std::domain_error if every class is empty.
double miou(const ConfusionAccumulator& acc);

/// Per-class IoU; nullopt for classes absent from both gt and pred.
std::vector<std::optional<double>> per_class_iou(const ConfusionAccumulator& acc);

/// Absolute segmentation degradation: reference_miou - target_miou
/// (negative if the target outperforms the reference).
double delta_miou(double reference_miou, double target_miou);

}  // namespace dmscope
