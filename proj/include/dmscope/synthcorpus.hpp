#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dmscope/image.hpp"

namespace dmscope {

enum class CorpusKind { kGradient, kChecker, kNoise, kBlotch };

CorpusKind parse_corpus_kind(std::string_view name);
std::string_view to_string(CorpusKind kind);

/// Global transform emulating a domain shift, applied to every generated
/// image in declared order: brightness, then blur, then noise.
struct ShiftSpec {
    double brightness_offset = 0.0;  // in [-1, 1], normalized units
    int blur_factor = 1;             // 1 = none; otherwise {2, 4, 8}
    double noise_amplitude = 0.0;    // uniform [-a, a] in normalized units

    bool is_identity() const {
        return brightness_offset == 0.0 && blur_factor == 1 && noise_amplitude == 0.0;
    }
};

struct CorpusSpec {
    CorpusKind kind = CorpusKind::kGradient;
    int count = 1;
    int height = 64;
    int width = 64;
    std::uint64_t seed = 0;
    ShiftSpec shift;

    std::string describe() const;
};

/// Labels are populated only for kinds that define regions (checker, blotch).
struct SyntheticCorpus {
    std::vector<Image> images;
    std::vector<LabelMap> labels;
};

/// Deterministic under (spec, seed); all randomness is counter-based integer
/// hashing keyed by (seed, image index, pixel, channel).
SyntheticCorpus generate_corpus(const CorpusSpec& spec);

/// Deterministically flips ~flip_fraction of non-ignore pixels to a different
/// class. flip_fraction = 0 is the identity; the flip set grows monotonically
/// with the fraction (nested), so mIoU degrades monotonically.
LabelMap perturb_labels(const LabelMap& gt, double flip_fraction, std::uint64_t seed);

/// Writes images as PPM (img_NNNNNN.ppm) and, when given a label directory,
/// labels as PGM (lbl_NNNNNN.pgm). Directories are created if missing.
void write_corpus(const SyntheticCorpus& corpus, const std::filesystem::path& image_dir,
                  const std::optional<std::filesystem::path>& label_dir = std::nullopt);

}  // namespace dmscope
