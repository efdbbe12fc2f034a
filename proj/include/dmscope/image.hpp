#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace dmscope {

inline constexpr int kImageChannels = 3;

/// Normalized image: interleaved H x W x 3 values in [-1, 1].
/// Immutable after construction; safe to share across threads.
class Image {
  public:
    Image(int height, int width, std::vector<double> data);

    static Image filled(int height, int width, double value);

    int height() const { return height_; }
    int width() const { return width_; }
    int channels() const { return kImageChannels; }
    std::size_t pixel_count() const { return static_cast<std::size_t>(height_) * width_; }
    std::size_t value_count() const { return data_.size(); }

    double at(int y, int x, int c) const {
        return data_[(static_cast<std::size_t>(y) * width_ + x) * kImageChannels + c];
    }
    std::span<const double> data() const { return data_; }

    bool same_shape(const Image& other) const {
        return height_ == other.height_ && width_ == other.width_;
    }

  private:
    int height_;
    int width_;
    std::vector<double> data_;
};

/// 8-bit raster image as read from disk: interleaved H x W x 3 values in [0, 255].
class RawImage {
  public:
    RawImage(int height, int width, std::vector<std::uint8_t> data);

    static RawImage filled(int height, int width, std::uint8_t value);

    int height() const { return height_; }
    int width() const { return width_; }
    int channels() const { return kImageChannels; }
    std::size_t value_count() const { return data_.size(); }

    std::uint8_t at(int y, int x, int c) const {
        return data_[(static_cast<std::size_t>(y) * width_ + x) * kImageChannels + c];
    }
    std::span<const std::uint8_t> data() const { return data_; }

  private:
    int height_;
    int width_;
    std::vector<std::uint8_t> data_;
};

/// Per-pixel class IDs in {1, ..., S} with 255 as the ignore marker
/// (matching the 8-bit label-file encoding).
class LabelMap {
  public:
    static constexpr std::uint8_t kIgnore = 255;
    static constexpr int kMaxClassCount = 254;

    LabelMap(int height, int width, int class_count, std::vector<std::uint8_t> data);

    int height() const { return height_; }
    int width() const { return width_; }
    int class_count() const { return class_count_; }
    std::size_t pixel_count() const { return data_.size(); }

    std::uint8_t at(int y, int x) const {
        return data_[static_cast<std::size_t>(y) * width_ + x];
    }
    std::span<const std::uint8_t> data() const { return data_; }

    bool same_shape(const LabelMap& other) const {
        return height_ == other.height_ && width_ == other.width_;
    }

  private:
    int height_;
    int width_;
    int class_count_;
    std::vector<std::uint8_t> data_;
};

/// Maps [0,255] intensities to [-1,1] via v -> 2v/255 - 1 (0 -> -1, 255 -> +1 exactly).
Image normalize(const RawImage& raw);

/// Maps [-1,1] back to integer [0,255] via round((v+1)*255/2), clamped.
/// Inverse of normalize on all 256 integer levels.
RawImage denormalize(const Image& img);

}  // namespace dmscope
