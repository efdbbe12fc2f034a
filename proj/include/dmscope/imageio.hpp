#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "dmscope/image.hpp"

namespace dmscope {

/// Loads an 8-bit PNG or binary PPM(P6)/PGM(P5) raster. Grayscale inputs are
/// replicated to 3 channels. Throws std::runtime_error on unreadable files,
/// unsupported formats, corrupt headers/payloads, or channel counts other
/// than 1 or 3.
RawImage load_image(const std::filesystem::path& path);

/// Loads a single-channel raster (PGM or 8-bit gray PNG) as a label map.
/// Pixel values encode class IDs 1..class_count; 255 is the ignore marker.
/// Any other value is an error.
LabelMap load_labelmap(const std::filesystem::path& path, int class_count);

void save_ppm(const RawImage& img, const std::filesystem::path& path);
void save_pgm(const LabelMap& labels, const std::filesystem::path& path);

/// Result of loading a corpus directory: files are visited in lexicographic
/// order, unreadable files are collected per-file instead of aborting the load.
struct CorpusLoadReport {
    std::vector<Image> images;
    std::vector<std::string> loaded_files;
    std::vector<std::pair<std::string, std::string>> failures;  // (file, reason)
};

/// Loads every *.ppm/*.pgm/*.png file in a directory (sorted by name),
/// normalized to [-1,1]. Throws only if the directory itself is unusable.
CorpusLoadReport load_image_dir(const std::filesystem::path& dir);

/// Loads every label raster in a directory (sorted by name). Strict: any
/// per-file failure throws, since label corpora must pair up exactly.
std::vector<LabelMap> load_labelmap_dir(const std::filesystem::path& dir, int class_count);

}  // namespace dmscope
