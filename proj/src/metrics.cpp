#include "dmscope/metrics.hpp"

#include <cmath>
#include <span>
#include <stdexcept>
#include <string>

namespace dmscope {

namespace {

double denorm(double v) { return (v + 1.0) * 255.0 / 2.0; }

// Pairwise summation of squared denormalized differences; keeps megapixel
// accumulations from washing out small integer-exact squared sums.
double squared_diff_sum(std::span<const double> a, std::span<const double> b) {
    constexpr std::size_t kBlock = 64;
    const std::size_t n = a.size();
    if (n <= kBlock) {
        double sum = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double d = denorm(a[i]) - denorm(b[i]);
            sum += d * d;
        }
        return sum;
    }
    const std::size_t half = n / 2;
    return squared_diff_sum(a.first(half), b.first(half)) +
           squared_diff_sum(a.subspan(half), b.subspan(half));
}

}  // namespace

double psnr(const Image& original, const Image& reconstruction, const PsnrConfig& cfg) {
    if (!original.same_shape(reconstruction)) {
        throw std::invalid_argument("psnr: image dimensions differ");
    }
    if (cfg.peak <= 0.0) throw std::invalid_argument("psnr: peak must be positive");

    const double sum = squared_diff_sum(original.data(), reconstruction.data());
    if (sum == 0.0) return cfg.cap_dB;
    const double mse = sum / static_cast<double>(original.value_count());
    return 10.0 * std::log10(cfg.peak * cfg.peak / mse);
}

ConfusionAccumulator::ConfusionAccumulator(int class_count)
    : class_count_(class_count),
      tp_(static_cast<std::size_t>(class_count), 0),
      fp_(static_cast<std::size_t>(class_count), 0),
      fn_(static_cast<std::size_t>(class_count), 0) {
    if (class_count < 1) throw std::invalid_argument("class count must be at least 1");
}

void ConfusionAccumulator::accumulate(const LabelMap& gt, const LabelMap& pred) {
    if (!gt.same_shape(pred)) {
        throw std::invalid_argument("confusion: gt and pred dimensions differ");
    }
    auto g = gt.data();
    auto p = pred.data();
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (g[i] == LabelMap::kIgnore) continue;
        if (p[i] == LabelMap::kIgnore) {
            throw std::invalid_argument("confusion: prediction contains ignore markers");
        }
        if (g[i] > class_count_ || p[i] > class_count_) {
            throw std::invalid_argument("confusion: label exceeds accumulator class count");
        }
        if (g[i] == p[i]) {
            ++tp_[g[i] - 1];
        } else {
            ++fp_[p[i] - 1];
            ++fn_[g[i] - 1];
        }
    }
}

void ConfusionAccumulator::merge(const ConfusionAccumulator& other) {
    if (other.class_count_ != class_count_) {
        throw std::invalid_argument("confusion: class counts differ");
    }
    for (std::size_t s = 0; s < tp_.size(); ++s) {
        tp_[s] += other.tp_[s];
        fp_[s] += other.fp_[s];
        fn_[s] += other.fn_[s];
    }
}

std::vector<std::optional<double>> per_class_iou(const ConfusionAccumulator& acc) {
    std::vector<std::optional<double>> iou(static_cast<std::size_t>(acc.class_count()));
    for (int s = 1; s <= acc.class_count(); ++s) {
        const std::uint64_t denom = acc.tp(s) + acc.fp(s) + acc.fn(s);
        if (denom > 0) {
            iou[s - 1] = static_cast<double>(acc.tp(s)) / static_cast<double>(denom);
        }
    }
    return iou;
}

double miou(const ConfusionAccumulator& acc) {
    double sum = 0.0;
    int present = 0;
    for (const auto& iou : per_class_iou(acc)) {
        if (iou) {
            sum += *iou;
            ++present;
        }
    }
    if (present == 0) throw std::domain_error("miou: all classes empty");
    return sum / present;
}

double delta_miou(double reference_miou, double target_miou) {
    return reference_miou - target_miou;
}

}  // namespace dmscope
