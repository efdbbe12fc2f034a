#include "dmscope/reconstruction.hpp"

#include <charconv>
#include <cmath>
#include <stdexcept>

#include "dmscope/detail/hash.hpp"

namespace dmscope {

namespace {

constexpr std::uint64_t kNoiseSalt = 0x7265636f6e6e6full;  // reconstructor noise stream

double clamp_pm1(double v) { return v < -1.0 ? -1.0 : (v > 1.0 ? 1.0 : v); }

long parse_int(std::string_view text, std::string_view what) {
    long value = 0;
    const auto* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec != std::errc{} || ptr != end) {
        throw std::invalid_argument("reconstructor: bad " + std::string(what) + " '" +
                                    std::string(text) + "'");
    }
    return value;
}

double parse_double(std::string_view text, std::string_view what) {
    try {
        std::size_t used = 0;
        const std::string s(text);
        const double value = std::stod(s, &used);
        if (used != s.size()) throw std::invalid_argument("");
        return value;
    } catch (const std::exception&) {
        throw std::invalid_argument("reconstructor: bad " + std::string(what) + " '" +
                                    std::string(text) + "'");
    }
}

}  // namespace

Reconstructor Reconstructor::identity() {
    Reconstructor r;
    r.kind_ = ReconKind::kIdentity;
    return r;
}

Reconstructor Reconstructor::quantize(int levels) {
    if (levels < 2) throw std::invalid_argument("quantize: levels must be >= 2");
    Reconstructor r;
    r.kind_ = ReconKind::kQuantize;
    r.levels_ = levels;
    return r;
}

Reconstructor Reconstructor::blur_resample(int factor) {
    if (factor != 2 && factor != 4 && factor != 8) {
        throw std::invalid_argument("blur_resample: factor must be one of {2, 4, 8}");
    }
    Reconstructor r;
    r.kind_ = ReconKind::kBlurResample;
    r.factor_ = factor;
    return r;
}

Reconstructor Reconstructor::pseudo_noise(double amplitude, std::uint64_t seed) {
    if (!(amplitude > 0.0 && amplitude <= 2.0)) {
        throw std::invalid_argument("pseudo_noise: amplitude must be in (0, 2]");
    }
    Reconstructor r;
    r.kind_ = ReconKind::kPseudoNoise;
    r.amplitude_ = amplitude;
    r.seed_ = seed;
    return r;
}

Reconstructor Reconstructor::parse(std::string_view spec) {
    std::vector<std::string_view> parts;
    while (!spec.empty()) {
        const auto colon = spec.find(':');
        parts.push_back(spec.substr(0, colon));
        if (colon == std::string_view::npos) break;
        spec.remove_prefix(colon + 1);
    }
    if (parts.empty()) throw std::invalid_argument("reconstructor: empty spec");

    const std::string_view kind = parts[0];
    if (kind == "identity") {
        if (parts.size() != 1) throw std::invalid_argument("identity takes no parameters");
        return identity();
    }
    if (kind == "quantize") {
        if (parts.size() != 2) throw std::invalid_argument("expected quantize:K");
        return quantize(static_cast<int>(parse_int(parts[1], "level count")));
    }
    if (kind == "blur") {
        if (parts.size() != 2) throw std::invalid_argument("expected blur:F");
        return blur_resample(static_cast<int>(parse_int(parts[1], "blur factor")));
    }
    if (kind == "noise") {
        if (parts.size() != 2 && parts.size() != 3) {
            throw std::invalid_argument("expected noise:A[:SEED]");
        }
        const double amplitude = parse_double(parts[1], "noise amplitude");
        const std::uint64_t seed =
            parts.size() == 3 ? static_cast<std::uint64_t>(parse_int(parts[2], "seed")) : 0;
        return pseudo_noise(amplitude, seed);
    }
    throw std::invalid_argument("reconstructor: unknown kind '" + std::string(kind) + "'");
}

std::string Reconstructor::describe() const {
    switch (kind_) {
        case ReconKind::kIdentity:
            return "identity";
        case ReconKind::kQuantize:
            return "quantize:" + std::to_string(levels_);
        case ReconKind::kBlurResample:
            return "blur:" + std::to_string(factor_);
        case ReconKind::kPseudoNoise: {
            char buf[32];
            auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), amplitude_);
            (void)ec;  // 32 bytes always suffice for a shortest-round-trip double
            return "noise:" + std::string(buf, ptr) + ":" + std::to_string(seed_);
        }
    }
    return "identity";
}

Image block_mean_resample(const Image& img, int factor) {
    const int h = img.height();
    const int w = img.width();
    std::vector<double> out(img.value_count());
    for (int by = 0; by < h; by += factor) {
        const int bh = std::min(factor, h - by);
        for (int bx = 0; bx < w; bx += factor) {
            const int bw = std::min(factor, w - bx);  // edge blocks truncate
            for (int c = 0; c < kImageChannels; ++c) {
                double sum = 0.0;
                for (int y = by; y < by + bh; ++y) {
                    for (int x = bx; x < bx + bw; ++x) sum += img.at(y, x, c);
                }
                const double mean = sum / (bh * bw);
                for (int y = by; y < by + bh; ++y) {
                    for (int x = bx; x < bx + bw; ++x) {
                        out[(static_cast<std::size_t>(y) * w + x) * kImageChannels + c] = mean;
                    }
                }
            }
        }
    }
    return Image(h, w, std::move(out));
}

Image Reconstructor::reconstruct(const Image& img) const {
    switch (kind_) {
        case ReconKind::kIdentity:
            return img;

        case ReconKind::kQuantize: {
            // snap denormalized values to the nearest of `levels_` uniform
            // levels over [0,255]; with 256 levels this is the identity on
            // 8-bit-file data
            const double steps = static_cast<double>(levels_ - 1);
            std::vector<double> out(img.value_count());
            auto src = img.data();
            for (std::size_t i = 0; i < out.size(); ++i) {
                const double denorm = (src[i] + 1.0) * 255.0 / 2.0;
                const double level = std::round(denorm * steps / 255.0);
                out[i] = clamp_pm1(2.0 * (level * 255.0 / steps) / 255.0 - 1.0);
            }
            return Image(img.height(), img.width(), std::move(out));
        }

        case ReconKind::kBlurResample:
            return block_mean_resample(img, factor_);

        case ReconKind::kPseudoNoise: {
            std::vector<double> out(img.value_count());
            auto src = img.data();
            const std::size_t ch = kImageChannels;
            for (std::size_t i = 0; i < out.size(); ++i) {
                const std::uint64_t h =
                    detail::hash_u64(seed_, kNoiseSalt, i / ch, i % ch);
                out[i] = clamp_pm1(src[i] + amplitude_ * detail::uniform_pm1(h));
            }
            return Image(img.height(), img.width(), std::move(out));
        }
    }
    throw std::logic_error("reconstruct: unhandled kind");
}

std::vector<double> score_corpus(const Reconstructor& r, std::span<const Image> images,
                                 const PsnrConfig& cfg) {
    if (images.empty()) throw std::invalid_argument("score_corpus: empty corpus");
    std::vector<double> scores(images.size());
    for (std::size_t i = 0; i < images.size(); ++i) {
        scores[i] = psnr(images[i], r.reconstruct(images[i]), cfg);
    }
    return scores;
}

}  // namespace dmscope
