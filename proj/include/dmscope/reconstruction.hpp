#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dmscope/image.hpp"
#include "dmscope/metrics.hpp"

namespace dmscope {

enum class ReconKind { kIdentity, kQuantize, kBlurResample, kPseudoNoise };

/// Deterministic image-in/image-out transform whose reconstruction quality is
/// domain-sensitive. Stands in for a trained autoencoder: the downstream
/// pipeline only needs a per-image quality score whose distribution shifts
/// with the input domain. Immutable and safe to share.
class Reconstructor {
  public:
    static Reconstructor identity();
    /// Snaps each denormalized value to the nearest of `levels` uniformly
    /// spaced levels spanning [0,255]. levels >= 2; levels == 256 is the
    /// identity on images originating from 8-bit files.
    static Reconstructor quantize(int levels);
    /// Box-averages factor x factor blocks and replicates each average over
    /// the block; edge blocks truncate (average only existing pixels).
    /// factor in {2, 4, 8}.
    static Reconstructor blur_resample(int factor);
    /// Adds a seeded, position-hashed perturbation uniform in [-a, a]
    /// (normalized units), then clamps. amplitude in (0, 2].
    static Reconstructor pseudo_noise(double amplitude, std::uint64_t seed);

    /// Parses "identity", "quantize:K", "blur:F", "noise:A[:SEED]".
    static Reconstructor parse(std::string_view spec);
    std::string describe() const;

    ReconKind kind() const { return kind_; }
    int levels() const { return levels_; }
    int factor() const { return factor_; }
    double amplitude() const { return amplitude_; }
    std::uint64_t seed() const { return seed_; }

    /// Deterministic, shape-preserving, output clamped to [-1,1].
    Image reconstruct(const Image& img) const;

  private:
    Reconstructor() = default;

    ReconKind kind_ = ReconKind::kIdentity;
    int levels_ = 0;
    int factor_ = 0;
    double amplitude_ = 0.0;
    std::uint64_t seed_ = 0;
};

/// Box-average blocks of `factor` and replicate; shared by the blur
/// reconstructor and the synthetic-corpus blur shift.
Image block_mean_resample(const Image& img, int factor);

/// PSNR of every image against its reconstruction, in input order.
std::vector<double> score_corpus(const Reconstructor& r, std::span<const Image> images,
                                 const PsnrConfig& cfg = {});

}  // namespace dmscope
