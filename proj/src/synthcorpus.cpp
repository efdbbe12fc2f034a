#include "dmscope/synthcorpus.hpp"

#include <algorithm>
#include <cstdio>
#include <stdexcept>

#include "dmscope/detail/hash.hpp"
#include "dmscope/imageio.hpp"
#include "dmscope/reconstruction.hpp"

namespace dmscope {

namespace {

using detail::hash_u64;
using detail::uniform01;
using detail::uniform_pm1;

// salt constants keep the independent random streams from colliding
constexpr std::uint64_t kSaltGradient = 0x67726164ull;
constexpr std::uint64_t kSaltNoise = 0x6e6f6973ull;
constexpr std::uint64_t kSaltChecker = 0x63686b72ull;
constexpr std::uint64_t kSaltBlotch = 0x626c6f74ull;
constexpr std::uint64_t kSaltShiftNoise = 0x73686966ull;
constexpr std::uint64_t kSaltFlip = 0x666c6970ull;

constexpr int kCheckerClasses = 4;
constexpr int kBlotchRegions = 5;

double clamp_pm1(double v) { return v < -1.0 ? -1.0 : (v > 1.0 ? 1.0 : v); }

double to_norm(double v255) {
    if (v255 < 0.0) v255 = 0.0;
    if (v255 > 255.0) v255 = 255.0;
    return 2.0 * v255 / 255.0 - 1.0;
}

// Smooth linear ramp; orientation from small integer weights so no libm
// transcendentals enter the deterministic path.
Image make_gradient(const CorpusSpec& spec, int index) {
    const std::uint64_t h_base = hash_u64(spec.seed, kSaltGradient, index, 0);
    const std::uint64_t h_amp = hash_u64(spec.seed, kSaltGradient, index, 1);
    const std::uint64_t h_wx = hash_u64(spec.seed, kSaltGradient, index, 2);
    const std::uint64_t h_wy = hash_u64(spec.seed, kSaltGradient, index, 3);

    // Mid-range base and modest contrast keep every value well inside
    // [0,255] even under a strong additive-noise shift, so the clamp never
    // engages and shift severity degrades PSNR without rail artifacts.
    const double base = 90.0 + 75.0 * uniform01(h_base);
    const double amplitude = 4.0 + 20.0 * uniform01(h_amp);
    const double wx = 1.0 + static_cast<double>(h_wx % 4);
    const double wy = 1.0 + static_cast<double>(h_wy % 4);
    const double span = wx * (spec.width - 1) + wy * (spec.height - 1);

    double channel_offset[kImageChannels];
    for (int c = 0; c < kImageChannels; ++c) {
        channel_offset[c] =
            (uniform01(hash_u64(spec.seed, kSaltGradient, index, 4 + c)) - 0.5) * 8.0;
    }

    std::vector<double> data(static_cast<std::size_t>(spec.height) * spec.width * kImageChannels);
    std::size_t i = 0;
    for (int y = 0; y < spec.height; ++y) {
        for (int x = 0; x < spec.width; ++x) {
            const double t = (wx * x + wy * y) / span;  // 0..1 across the image
            for (int c = 0; c < kImageChannels; ++c) {
                data[i++] = to_norm(base + channel_offset[c] + amplitude * (t - 0.5));
            }
        }
    }
    return Image(spec.height, spec.width, std::move(data));
}

// IID full-range texture: the quantization-hostile extreme.
Image make_noise(const CorpusSpec& spec, int index) {
    std::vector<double> data(static_cast<std::size_t>(spec.height) * spec.width * kImageChannels);
    const std::size_t pixels = static_cast<std::size_t>(spec.height) * spec.width;
    std::size_t i = 0;
    for (std::size_t p = 0; p < pixels; ++p) {
        for (int c = 0; c < kImageChannels; ++c) {
            data[i++] = uniform_pm1(hash_u64(spec.seed, kSaltNoise, index, p, c));
        }
    }
    return Image(spec.height, spec.width, std::move(data));
}

// Flat tiles, one class per tile; tile size hash-chosen from {4, 8, 16}.
std::pair<Image, LabelMap> make_checker(const CorpusSpec& spec, int index) {
    constexpr int kTileSizes[3] = {4, 8, 16};
    const int tile = kTileSizes[hash_u64(spec.seed, kSaltChecker, index, 0) % 3];
    constexpr double kBase[kCheckerClasses] = {40.0, 100.0, 160.0, 220.0};
    constexpr double kChannelOffset[kImageChannels] = {0.0, 12.0, -12.0};

    std::vector<double> data(static_cast<std::size_t>(spec.height) * spec.width * kImageChannels);
    std::vector<std::uint8_t> labels(static_cast<std::size_t>(spec.height) * spec.width);
    std::size_t i = 0, pi = 0;
    for (int y = 0; y < spec.height; ++y) {
        for (int x = 0; x < spec.width; ++x) {
            const int ty = y / tile;
            const int tx = x / tile;
            const int cls =
                1 + static_cast<int>(hash_u64(spec.seed, kSaltChecker, index, 1 + ty, tx) %
                                     kCheckerClasses);
            labels[pi++] = static_cast<std::uint8_t>(cls);
            for (int c = 0; c < kImageChannels; ++c) {
                data[i++] = to_norm(kBase[cls - 1] + kChannelOffset[c]);
            }
        }
    }
    return {Image(spec.height, spec.width, std::move(data)),
            LabelMap(spec.height, spec.width, kCheckerClasses, std::move(labels))};
}

// Voronoi regions; a pixel's class is its generating region ID.
std::pair<Image, LabelMap> make_blotch(const CorpusSpec& spec, int index) {
    long sx[kBlotchRegions], sy[kBlotchRegions];
    double color[kBlotchRegions][kImageChannels];
    for (int r = 0; r < kBlotchRegions; ++r) {
        sx[r] = static_cast<long>(hash_u64(spec.seed, kSaltBlotch, index, r, 0) %
                                  static_cast<std::uint64_t>(spec.width));
        sy[r] = static_cast<long>(hash_u64(spec.seed, kSaltBlotch, index, r, 1) %
                                  static_cast<std::uint64_t>(spec.height));
        for (int c = 0; c < kImageChannels; ++c) {
            color[r][c] =
                30.0 + 195.0 * uniform01(hash_u64(spec.seed, kSaltBlotch, index, r, 2 + c));
        }
    }

    std::vector<double> data(static_cast<std::size_t>(spec.height) * spec.width * kImageChannels);
    std::vector<std::uint8_t> labels(static_cast<std::size_t>(spec.height) * spec.width);
    std::size_t i = 0, pi = 0;
    for (int y = 0; y < spec.height; ++y) {
        for (int x = 0; x < spec.width; ++x) {
            int best = 0;
            long best_d2 = -1;
            for (int r = 0; r < kBlotchRegions; ++r) {
                const long dx = x - sx[r];
                const long dy = y - sy[r];
                const long d2 = dx * dx + dy * dy;
                if (best_d2 < 0 || d2 < best_d2) {  // ties keep the lowest region ID
                    best_d2 = d2;
                    best = r;
                }
            }
            labels[pi++] = static_cast<std::uint8_t>(best + 1);
            for (int c = 0; c < kImageChannels; ++c) data[i++] = to_norm(color[best][c]);
        }
    }
    return {Image(spec.height, spec.width, std::move(data)),
            LabelMap(spec.height, spec.width, kBlotchRegions, std::move(labels))};
}

Image apply_shift(Image img, const ShiftSpec& shift, std::uint64_t seed, int index) {
    if (shift.is_identity()) return img;

    std::vector<double> data(img.data().begin(), img.data().end());
    if (shift.brightness_offset != 0.0) {
        for (double& v : data) v = clamp_pm1(v + shift.brightness_offset);
    }
    Image shifted(img.height(), img.width(), std::move(data));
    if (shift.blur_factor != 1) {
        shifted = block_mean_resample(shifted, shift.blur_factor);
    }
    if (shift.noise_amplitude != 0.0) {
        std::vector<double> noisy(shifted.data().begin(), shifted.data().end());
        const std::size_t ch = kImageChannels;
        for (std::size_t i = 0; i < noisy.size(); ++i) {
            // Smooth (Irwin-Hall of order 4) noise supported on [-a, a].
            // Uniform noise beats against the quantizer period and makes
            // PSNR non-monotonic in the amplitude; the bell shape does not.
            double sum = 0.0;
            for (std::uint64_t k = 0; k < 4; ++k) {
                sum += uniform01(hash_u64(seed, kSaltShiftNoise, index, i / ch, i % ch, k));
            }
            noisy[i] = clamp_pm1(noisy[i] + shift.noise_amplitude * ((sum - 2.0) / 2.0));
        }
        shifted = Image(shifted.height(), shifted.width(), std::move(noisy));
    }
    return shifted;
}

void validate(const CorpusSpec& spec) {
    if (spec.count < 1) throw std::invalid_argument("corpus: count must be >= 1");
    if (spec.height < 8 || spec.width < 8) {
        throw std::invalid_argument("corpus: dimensions must be at least 8x8");
    }
    if (spec.shift.brightness_offset < -1.0 || spec.shift.brightness_offset > 1.0) {
        throw std::invalid_argument("corpus: brightness offset outside [-1, 1]");
    }
    const int f = spec.shift.blur_factor;
    if (f != 1 && f != 2 && f != 4 && f != 8) {
        throw std::invalid_argument("corpus: blur factor must be one of {1, 2, 4, 8}");
    }
    if (spec.shift.noise_amplitude < 0.0 || spec.shift.noise_amplitude > 2.0) {
        throw std::invalid_argument("corpus: noise amplitude outside [0, 2]");
    }
}

}  // namespace

CorpusKind parse_corpus_kind(std::string_view name) {
    if (name == "gradient") return CorpusKind::kGradient;
    if (name == "checker") return CorpusKind::kChecker;
    if (name == "noise") return CorpusKind::kNoise;
    if (name == "blotch") return CorpusKind::kBlotch;
    throw std::invalid_argument("unknown corpus kind '" + std::string(name) + "'");
}

std::string_view to_string(CorpusKind kind) {
    switch (kind) {
        case CorpusKind::kGradient: return "gradient";
        case CorpusKind::kChecker: return "checker";
        case CorpusKind::kNoise: return "noise";
        case CorpusKind::kBlotch: return "blotch";
    }
    return "gradient";
}

std::string CorpusSpec::describe() const {
    std::string s = std::string(to_string(kind)) + ":n=" + std::to_string(count) + ":" +
                    std::to_string(height) + "x" + std::to_string(width) +
                    ":seed=" + std::to_string(seed);
    if (!shift.is_identity()) {
        char buf[96];
        std::snprintf(buf, sizeof(buf), ":shift=b%g,f%d,n%g", shift.brightness_offset,
                      shift.blur_factor, shift.noise_amplitude);
        s += buf;
    }
    return s;
}

SyntheticCorpus generate_corpus(const CorpusSpec& spec) {
    validate(spec);
    SyntheticCorpus corpus;
    corpus.images.reserve(static_cast<std::size_t>(spec.count));
    for (int i = 0; i < spec.count; ++i) {
        switch (spec.kind) {
            case CorpusKind::kGradient:
                corpus.images.push_back(make_gradient(spec, i));
                break;
            case CorpusKind::kNoise:
                corpus.images.push_back(make_noise(spec, i));
                break;
            case CorpusKind::kChecker: {
                auto [img, lbl] = make_checker(spec, i);
                corpus.images.push_back(std::move(img));
                corpus.labels.push_back(std::move(lbl));
                break;
            }
            case CorpusKind::kBlotch: {
                auto [img, lbl] = make_blotch(spec, i);
                corpus.images.push_back(std::move(img));
                corpus.labels.push_back(std::move(lbl));
                break;
            }
        }
        corpus.images.back() = apply_shift(std::move(corpus.images.back()), spec.shift,
                                           spec.seed, i);
    }
    return corpus;
}

LabelMap perturb_labels(const LabelMap& gt, double flip_fraction, std::uint64_t seed) {
    if (flip_fraction < 0.0 || flip_fraction > 1.0) {
        throw std::invalid_argument("perturb_labels: fraction outside [0, 1]");
    }
    const int s_count = gt.class_count();
    std::vector<std::uint8_t> data(gt.data().begin(), gt.data().end());
    if (flip_fraction > 0.0 && s_count > 1) {
        for (std::size_t p = 0; p < data.size(); ++p) {
            if (data[p] == LabelMap::kIgnore) continue;
            // flip sets are nested across fractions: pixel p flips whenever
            // its hash falls below the fraction, and the flip target does
            // not depend on the fraction
            if (uniform01(hash_u64(seed, kSaltFlip, p, 0)) < flip_fraction) {
                const auto step =
                    1 + static_cast<int>(hash_u64(seed, kSaltFlip, p, 1) %
                                         static_cast<std::uint64_t>(s_count - 1));
                data[p] = static_cast<std::uint8_t>(1 + (data[p] - 1 + step) % s_count);
            }
        }
    }
    return LabelMap(gt.height(), gt.width(), s_count, std::move(data));
}

void write_corpus(const SyntheticCorpus& corpus, const std::filesystem::path& image_dir,
                  const std::optional<std::filesystem::path>& label_dir) {
    std::filesystem::create_directories(image_dir);
    char name[32];
    for (std::size_t i = 0; i < corpus.images.size(); ++i) {
        std::snprintf(name, sizeof(name), "img_%06zu.ppm", i);
        save_ppm(denormalize(corpus.images[i]), image_dir / name);
    }
    if (label_dir && !corpus.labels.empty()) {
        std::filesystem::create_directories(*label_dir);
        for (std::size_t i = 0; i < corpus.labels.size(); ++i) {
            std::snprintf(name, sizeof(name), "lbl_%06zu.pgm", i);
            save_pgm(corpus.labels[i], *label_dir / name);
        }
    }
}

}  // namespace dmscope
