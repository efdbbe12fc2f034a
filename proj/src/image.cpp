#include "dmscope/image.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace dmscope {

namespace {

void check_dims(int height, int width) {
    if (height < 1 || width < 1) {
        throw std::invalid_argument("image dimensions must be at least 1x1, got " +
                                    std::to_string(height) + "x" + std::to_string(width));
    }
}

std::size_t expected_values(int height, int width, int channels) {
    return static_cast<std::size_t>(height) * static_cast<std::size_t>(width) *
           static_cast<std::size_t>(channels);
}

}  // namespace

Image::Image(int height, int width, std::vector<double> data)
    : height_(height), width_(width), data_(std::move(data)) {
    check_dims(height, width);
    if (data_.size() != expected_values(height, width, kImageChannels)) {
        throw std::invalid_argument("image data length " + std::to_string(data_.size()) +
                                    " does not equal H*W*C");
    }
    for (double v : data_) {
        if (!(v >= -1.0 && v <= 1.0)) {
            throw std::invalid_argument("image value " + std::to_string(v) +
                                        " outside [-1, 1]");
        }
    }
}

Image Image::filled(int height, int width, double value) {
    check_dims(height, width);
    return Image(height, width,
                 std::vector<double>(expected_values(height, width, kImageChannels), value));
}

RawImage::RawImage(int height, int width, std::vector<std::uint8_t> data)
    : height_(height), width_(width), data_(std::move(data)) {
    check_dims(height, width);
    if (data_.size() != expected_values(height, width, kImageChannels)) {
        throw std::invalid_argument("raw image data length " + std::to_string(data_.size()) +
                                    " does not equal H*W*C");
    }
}

RawImage RawImage::filled(int height, int width, std::uint8_t value) {
    check_dims(height, width);
    return RawImage(height, width,
                    std::vector<std::uint8_t>(expected_values(height, width, kImageChannels), value));
}

LabelMap::LabelMap(int height, int width, int class_count, std::vector<std::uint8_t> data)
    : height_(height), width_(width), class_count_(class_count), data_(std::move(data)) {
    check_dims(height, width);
    if (class_count < 1 || class_count > kMaxClassCount) {
        throw std::invalid_argument("class count " + std::to_string(class_count) +
                                    " outside [1, " + std::to_string(kMaxClassCount) + "]");
    }
    if (data_.size() != static_cast<std::size_t>(height) * width) {
        throw std::invalid_argument("label data length does not equal H*W");
    }
    for (std::uint8_t v : data_) {
        if (v != kIgnore && (v < 1 || v > class_count)) {
            throw std::invalid_argument("label value " + std::to_string(v) +
                                        " outside {1.." + std::to_string(class_count) +
                                        "} and not the ignore marker");
        }
    }
}

Image normalize(const RawImage& raw) {
    std::vector<double> out(raw.value_count());
    auto src = raw.data();
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = 2.0 * static_cast<double>(src[i]) / 255.0 - 1.0;
    }
    return Image(raw.height(), raw.width(), std::move(out));
}

RawImage denormalize(const Image& img) {
    std::vector<std::uint8_t> out(img.value_count());
    auto src = img.data();
    for (std::size_t i = 0; i < out.size(); ++i) {
        double v = std::round((src[i] + 1.0) * 255.0 / 2.0);
        if (v < 0.0) v = 0.0;
        if (v > 255.0) v = 255.0;
        out[i] = static_cast<std::uint8_t>(v);
    }
    return RawImage(img.height(), img.width(), std::move(out));
}

}  // namespace dmscope
