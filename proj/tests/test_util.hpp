#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "dmscope/detail/hash.hpp"
#include "dmscope/image.hpp"

namespace testutil {

// Seeded image with every value on the 8-bit grid (as if loaded from a file).
inline dmscope::RawImage random_raw(int h, int w, std::uint64_t seed) {
    std::vector<std::uint8_t> data(static_cast<std::size_t>(h) * w * dmscope::kImageChannels);
    for (std::size_t i = 0; i < data.size(); ++i) {
        data[i] = static_cast<std::uint8_t>(dmscope::detail::hash_u64(seed, 0xabcdull, i) % 256);
    }
    return dmscope::RawImage(h, w, std::move(data));
}

inline dmscope::Image random_image(int h, int w, std::uint64_t seed) {
    return dmscope::normalize(random_raw(h, w, seed));
}

// Random normalized mass vector; about one third of the bins stay empty.
inline std::vector<double> random_mass(std::size_t bins, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> mass(0.0, 1.0);
    std::vector<double> p(bins, 0.0);
    double total = 0.0;
    while (total == 0.0) {
        for (auto& v : p) {
            v = (rng() % 3 == 0) ? 0.0 : mass(rng);
            total += v;
        }
    }
    for (auto& v : p) v /= total;
    return p;
}

// Unique scratch directory under the system temp dir, removed on destruction.
class TempDir {
  public:
    explicit TempDir(const std::string& tag) {
        path_ = std::filesystem::temp_directory_path() /
                ("dmscope_test_" + tag + "_" + std::to_string(counter_++));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    const std::filesystem::path& path() const { return path_; }

  private:
    static inline int counter_ = 0;
    std::filesystem::path path_;
};

}  // namespace testutil
