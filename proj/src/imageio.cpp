#include "dmscope/imageio.hpp"

#include <png.h>

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace dmscope {

namespace {

struct Raster {
    int height = 0;
    int width = 0;
    int channels = 0;  // 1 or 3
    std::vector<std::uint8_t> data;
};

[[noreturn]] void fail(const std::filesystem::path& path, const std::string& what) {
    throw std::runtime_error(path.string() + ": " + what);
}

// ---- binary PPM (P6) / PGM (P5) ----

int read_pnm_int(std::istream& in, const std::filesystem::path& path) {
    // skips whitespace and '#' comment lines between header tokens
    int c = in.peek();
    while (c != EOF && (std::isspace(c) || c == '#')) {
        if (c == '#') {
            std::string line;
            std::getline(in, line);
        } else {
            in.get();
        }
        c = in.peek();
    }
    int value = -1;
    if (!(in >> value) || value < 0) fail(path, "corrupt PNM header");
    return value;
}

Raster load_pnm(const std::filesystem::path& path, std::ifstream& in) {
    char magic[2] = {0, 0};
    in.read(magic, 2);
    if (!in || magic[0] != 'P' || (magic[1] != '5' && magic[1] != '6')) {
        fail(path, "unsupported PNM variant (only binary P5/P6)");
    }
    Raster r;
    r.channels = magic[1] == '6' ? 3 : 1;
    r.width = read_pnm_int(in, path);
    r.height = read_pnm_int(in, path);
    const int maxval = read_pnm_int(in, path);
    if (r.width < 1 || r.height < 1) fail(path, "corrupt PNM header: bad dimensions");
    if (maxval != 255) fail(path, "only 8-bit PNM rasters supported (maxval 255)");
    in.get();  // single whitespace byte after maxval

    const std::size_t n =
        static_cast<std::size_t>(r.height) * r.width * static_cast<std::size_t>(r.channels);
    r.data.resize(n);
    in.read(reinterpret_cast<char*>(r.data.data()), static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(in.gcount()) != n) fail(path, "truncated PNM payload");
    return r;
}

// ---- PNG via libpng ----

struct PngReader {
    png_structp png = nullptr;
    png_infop info = nullptr;
    std::FILE* file = nullptr;

    ~PngReader() {
        if (png) png_destroy_read_struct(&png, info ? &info : nullptr, nullptr);
        if (file) std::fclose(file);
    }
};

Raster load_png(const std::filesystem::path& path) {
    PngReader rd;
    rd.file = std::fopen(path.c_str(), "rb");
    if (!rd.file) fail(path, "unreadable file");

    rd.png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!rd.png) fail(path, "libpng init failed");
    rd.info = png_create_info_struct(rd.png);
    if (!rd.info) fail(path, "libpng init failed");

    if (setjmp(png_jmpbuf(rd.png))) fail(path, "corrupt PNG");

    png_init_io(rd.png, rd.file);
    png_read_info(rd.png, rd.info);

    const png_uint_32 width = png_get_image_width(rd.png, rd.info);
    const png_uint_32 height = png_get_image_height(rd.png, rd.info);
    const int bit_depth = png_get_bit_depth(rd.png, rd.info);
    const int color_type = png_get_color_type(rd.png, rd.info);

    if (bit_depth != 8) fail(path, "only 8-bit PNGs supported");
    if (color_type != PNG_COLOR_TYPE_GRAY && color_type != PNG_COLOR_TYPE_RGB) {
        fail(path, "PNG channel count other than 1 or 3 (palette/alpha unsupported)");
    }
    if (width < 1 || height < 1) fail(path, "corrupt PNG header");

    png_read_update_info(rd.png, rd.info);

    Raster r;
    r.width = static_cast<int>(width);
    r.height = static_cast<int>(height);
    r.channels = color_type == PNG_COLOR_TYPE_RGB ? 3 : 1;
    const std::size_t row_bytes = png_get_rowbytes(rd.png, rd.info);
    r.data.resize(row_bytes * height);

    std::vector<png_bytep> rows(height);
    for (png_uint_32 y = 0; y < height; ++y) rows[y] = r.data.data() + y * row_bytes;
    png_read_image(rd.png, rows.data());
    png_read_end(rd.png, nullptr);
    return r;
}

Raster load_raster(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(path, "unreadable file");
    char magic[2] = {0, 0};
    in.read(magic, 2);
    if (!in) fail(path, "unreadable or empty file");
    in.seekg(0);
    if (magic[0] == 'P' && (magic[1] == '5' || magic[1] == '6')) return load_pnm(path, in);
    if (static_cast<unsigned char>(magic[0]) == 0x89 && magic[1] == 'P') {
        in.close();
        return load_png(path);
    }
    fail(path, "unsupported raster format (PNG, binary PPM/PGM only)");
}

bool raster_extension(const std::filesystem::path& p) {
    auto ext = p.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    return ext == ".ppm" || ext == ".pgm" || ext == ".png";
}

std::vector<std::filesystem::path> list_raster_files(const std::filesystem::path& dir) {
    if (!std::filesystem::is_directory(dir)) {
        throw std::runtime_error(dir.string() + ": not a directory");
    }
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        if (entry.is_regular_file() && raster_extension(entry.path())) {
            files.push_back(entry.path());
        }
    }
    std::sort(files.begin(), files.end());
    return files;
}

}  // namespace

RawImage load_image(const std::filesystem::path& path) {
    Raster r = load_raster(path);
    if (r.channels == 3) return RawImage(r.height, r.width, std::move(r.data));
    // grayscale: replicate to 3 channels
    std::vector<std::uint8_t> rgb(r.data.size() * 3);
    for (std::size_t i = 0; i < r.data.size(); ++i) {
        rgb[3 * i] = rgb[3 * i + 1] = rgb[3 * i + 2] = r.data[i];
    }
    return RawImage(r.height, r.width, std::move(rgb));
}

LabelMap load_labelmap(const std::filesystem::path& path, int class_count) {
    Raster r = load_raster(path);
    if (r.channels != 1) fail(path, "label maps must be single-channel");
    try {
        return LabelMap(r.height, r.width, class_count, std::move(r.data));
    } catch (const std::invalid_argument& e) {
        fail(path, e.what());
    }
}

void save_ppm(const RawImage& img, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(path, "cannot open for writing");
    out << "P6\n" << img.width() << " " << img.height() << "\n255\n";
    out.write(reinterpret_cast<const char*>(img.data().data()),
              static_cast<std::streamsize>(img.value_count()));
    if (!out) fail(path, "write failed");
}

void save_pgm(const LabelMap& labels, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(path, "cannot open for writing");
    out << "P5\n" << labels.width() << " " << labels.height() << "\n255\n";
    out.write(reinterpret_cast<const char*>(labels.data().data()),
              static_cast<std::streamsize>(labels.pixel_count()));
    if (!out) fail(path, "write failed");
}

CorpusLoadReport load_image_dir(const std::filesystem::path& dir) {
    CorpusLoadReport report;
    for (const auto& file : list_raster_files(dir)) {
        try {
            report.images.push_back(normalize(load_image(file)));
            report.loaded_files.push_back(file.filename().string());
        } catch (const std::exception& e) {
            report.failures.emplace_back(file.filename().string(), e.what());
        }
    }
    return report;
}

std::vector<LabelMap> load_labelmap_dir(const std::filesystem::path& dir, int class_count) {
    std::vector<LabelMap> maps;
    for (const auto& file : list_raster_files(dir)) {
        maps.push_back(load_labelmap(file, class_count));
    }
    return maps;
}

}  // namespace dmscope
