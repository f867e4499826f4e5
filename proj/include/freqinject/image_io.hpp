#pragma once

// Lossless raster I/O: PNG (8/16-bit, RGB or gray) through libpng, plus
// binary PPM/PGM. Samples map to [0,1] by division by the format maximum.

#include <png.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <csetjmp>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>
#include <vector>

#include "freqinject/error.hpp"
#include "freqinject/image.hpp"

namespace freqinject {

namespace io_detail {

inline std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path.string() + "'");
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline void write_file(const std::filesystem::path& path, const std::vector<std::uint8_t>& bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write '" + path.string() + "'");
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("short write to '" + path.string() + "'");
}

inline std::string lower_extension(const std::filesystem::path& path) {
    std::string ext = path.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char ch) { return std::tolower(ch); });
    return ext;
}

/// Decoded raster before normalization: interleaved samples.
struct RawRaster {
    std::size_t width = 0;
    std::size_t height = 0;
    std::size_t channels = 0;  // 1 or 3
    std::uint32_t max_value = 255;
    std::vector<std::uint16_t> samples;
};

inline RgbImage to_rgb(const RawRaster& raw) {
    if (raw.width == 0 || raw.height == 0) throw FormatError("zero-dimension image");
    RgbImage img(raw.width, raw.height);
    const double scale = 1.0 / static_cast<double>(raw.max_value);
    for (std::size_t i = 0; i < raw.width * raw.height; ++i) {
        for (std::size_t c = 0; c < 3; ++c) {
            const std::size_t src = raw.channels == 1 ? i : i * 3 + c;
            img.plane(c)[i] = std::min(1.0, raw.samples[src] * scale);
        }
    }
    return img;
}

inline std::uint16_t quantize(double v, std::uint32_t max_value) {
    const double clamped = std::clamp(v, 0.0, 1.0);
    return static_cast<std::uint16_t>(std::lround(clamped * max_value));
}

// ---- PNM ------------------------------------------------------------------

inline RawRaster decode_pnm(const std::vector<std::uint8_t>& bytes) {
    std::size_t pos = 2;
    const bool color = bytes[1] == '6';
    auto next_token = [&]() -> std::uint32_t {
        while (pos < bytes.size()) {
            if (bytes[pos] == '#') {
                while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
            } else if (std::isspace(bytes[pos])) {
                ++pos;
            } else {
                break;
            }
        }
        if (pos >= bytes.size() || !std::isdigit(bytes[pos])) throw FormatError("corrupt PNM header");
        std::uint64_t value = 0;
        while (pos < bytes.size() && std::isdigit(bytes[pos])) {
            value = value * 10 + (bytes[pos] - '0');
            if (value > 0xFFFFFFFFu) throw FormatError("PNM header value out of range");
            ++pos;
        }
        return static_cast<std::uint32_t>(value);
    };

    RawRaster raw;
    raw.width = next_token();
    raw.height = next_token();
    raw.max_value = next_token();
    raw.channels = color ? 3 : 1;
    if (raw.width == 0 || raw.height == 0) throw FormatError("zero-dimension image");
    if (raw.max_value == 0 || raw.max_value > 65535) throw FormatError("unsupported PNM maxval");
    if (pos >= bytes.size() || !std::isspace(bytes[pos])) throw FormatError("corrupt PNM header");
    ++pos;

    const std::size_t bytes_per_sample = raw.max_value < 256 ? 1 : 2;
    const std::size_t count = raw.width * raw.height * raw.channels;
    if (bytes.size() - pos < count * bytes_per_sample) throw FormatError("truncated PNM data");
    raw.samples.resize(count);
    for (std::size_t i = 0; i < count; ++i) {
        if (bytes_per_sample == 1) {
            raw.samples[i] = bytes[pos + i];
        } else {
            raw.samples[i] = static_cast<std::uint16_t>((bytes[pos + 2 * i] << 8) | bytes[pos + 2 * i + 1]);
        }
    }
    return raw;
}

inline std::vector<std::uint8_t> encode_pnm(const RawRaster& raw) {
    const std::string header = std::string(raw.channels == 3 ? "P6" : "P5") + "\n" + std::to_string(raw.width) + " " +
                               std::to_string(raw.height) + "\n" + std::to_string(raw.max_value) + "\n";
    std::vector<std::uint8_t> out(header.begin(), header.end());
    const bool wide = raw.max_value > 255;
    out.reserve(out.size() + raw.samples.size() * (wide ? 2 : 1));
    for (std::uint16_t s : raw.samples) {
        if (wide) out.push_back(static_cast<std::uint8_t>(s >> 8));
        out.push_back(static_cast<std::uint8_t>(s & 0xFF));
    }
    return out;
}

// ---- PNG ------------------------------------------------------------------

struct PngReadSource {
    const std::vector<std::uint8_t>* bytes;
    std::size_t pos;
};

inline void png_read_callback(png_structp png, png_bytep out, png_size_t length) {
    auto* src = static_cast<PngReadSource*>(png_get_io_ptr(png));
    if (src->bytes->size() - src->pos < length) png_error(png, "truncated PNG data");
    std::memcpy(out, src->bytes->data() + src->pos, length);
    src->pos += length;
}

inline void png_error_callback(png_structp png, png_const_charp) { png_longjmp(png, 1); }
inline void png_warning_callback(png_structp, png_const_charp) {}

inline RawRaster decode_png(const std::vector<std::uint8_t>& bytes) {
    RawRaster raw;
    std::vector<png_bytep> rows;
    std::vector<std::uint8_t> buffer;
    PngReadSource source{&bytes, 0};

    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, png_error_callback, png_warning_callback);
    if (png == nullptr) throw Error("libpng initialization failed");
    png_infop info = png_create_info_struct(png);
    if (info == nullptr) {
        png_destroy_read_struct(&png, nullptr, nullptr);
        throw Error("libpng initialization failed");
    }
    bool failed = false;
    if (setjmp(png_jmpbuf(png))) {
        failed = true;
    } else {
        png_set_read_fn(png, &source, png_read_callback);
        png_read_info(png, info);
        const png_byte color_type = png_get_color_type(png, info);
        const png_byte depth = png_get_bit_depth(png, info);
        if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
        if (color_type == PNG_COLOR_TYPE_GRAY && depth < 8) png_set_expand_gray_1_2_4_to_8(png);
        if (color_type & PNG_COLOR_MASK_ALPHA) png_set_strip_alpha(png);
        png_read_update_info(png, info);

        raw.width = png_get_image_width(png, info);
        raw.height = png_get_image_height(png, info);
        raw.channels = png_get_channels(png, info);
        const png_byte out_depth = png_get_bit_depth(png, info);
        raw.max_value = out_depth == 16 ? 65535u : 255u;
        const std::size_t stride = png_get_rowbytes(png, info);
        buffer.resize(stride * raw.height);
        rows.resize(raw.height);
        for (std::size_t y = 0; y < raw.height; ++y) rows[y] = buffer.data() + y * stride;
        png_read_image(png, rows.data());
        png_read_end(png, nullptr);
    }
    png_destroy_read_struct(&png, &info, nullptr);
    if (failed) throw FormatError("corrupt or truncated PNG");
    if (raw.channels != 1 && raw.channels != 3) throw FormatError("unsupported PNG channel layout");
    if (raw.width == 0 || raw.height == 0) throw FormatError("zero-dimension image");

    const bool wide = raw.max_value == 65535u;
    const std::size_t count = raw.width * raw.height * raw.channels;
    raw.samples.resize(count);
    for (std::size_t i = 0; i < count; ++i) {
        raw.samples[i] = wide ? static_cast<std::uint16_t>((buffer[2 * i] << 8) | buffer[2 * i + 1]) : buffer[i];
    }
    return raw;
}

inline void png_write_callback(png_structp png, png_bytep data, png_size_t length) {
    auto* out = static_cast<std::vector<std::uint8_t>*>(png_get_io_ptr(png));
    out->insert(out->end(), data, data + length);
}

inline void png_flush_callback(png_structp) {}

inline std::vector<std::uint8_t> encode_png(const RawRaster& raw) {
    const bool wide = raw.max_value > 255;
    const std::size_t stride = raw.width * raw.channels * (wide ? 2 : 1);
    std::vector<std::uint8_t> buffer(stride * raw.height);
    for (std::size_t i = 0; i < raw.samples.size(); ++i) {
        if (wide) {
            buffer[2 * i] = static_cast<std::uint8_t>(raw.samples[i] >> 8);
            buffer[2 * i + 1] = static_cast<std::uint8_t>(raw.samples[i] & 0xFF);
        } else {
            buffer[i] = static_cast<std::uint8_t>(raw.samples[i]);
        }
    }
    std::vector<png_bytep> rows(raw.height);
    for (std::size_t y = 0; y < raw.height; ++y) rows[y] = buffer.data() + y * stride;
    std::vector<std::uint8_t> encoded;

    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, png_error_callback, png_warning_callback);
    if (png == nullptr) throw Error("libpng initialization failed");
    png_infop info = png_create_info_struct(png);
    if (info == nullptr) {
        png_destroy_write_struct(&png, nullptr);
        throw Error("libpng initialization failed");
    }
    bool failed = false;
    if (setjmp(png_jmpbuf(png))) {
        failed = true;
    } else {
        png_set_write_fn(png, &encoded, png_write_callback, png_flush_callback);
        png_set_IHDR(png, info, static_cast<png_uint_32>(raw.width), static_cast<png_uint_32>(raw.height),
                     wide ? 16 : 8, raw.channels == 3 ? PNG_COLOR_TYPE_RGB : PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE,
                     PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
        png_write_info(png, info);
        png_write_image(png, rows.data());
        png_write_end(png, nullptr);
    }
    png_destroy_write_struct(&png, &info);
    if (failed) throw Error("PNG encoding failed");
    return encoded;
}

inline bool is_png(const std::vector<std::uint8_t>& bytes) {
    return bytes.size() >= 8 && png_sig_cmp(bytes.data(), 0, 8) == 0;
}

inline bool is_pnm(const std::vector<std::uint8_t>& bytes) {
    return bytes.size() >= 2 && bytes[0] == 'P' && (bytes[1] == '5' || bytes[1] == '6');
}

inline void save_raw(const RawRaster& raw, const std::filesystem::path& path) {
    const std::string ext = lower_extension(path);
    if (ext == ".png") {
        write_file(path, encode_png(raw));
    } else if (ext == ".ppm" || ext == ".pgm" || ext == ".pnm") {
        if (ext == ".ppm" && raw.channels != 3) throw FormatError("PPM output needs an RGB image");
        if (ext == ".pgm" && raw.channels != 1) throw FormatError("PGM output needs a gray image");
        write_file(path, encode_pnm(raw));
    } else {
        throw FormatError("unsupported output extension '" + ext + "'");
    }
}

inline std::uint32_t max_for_depth(int bit_depth) {
    if (bit_depth != 8 && bit_depth != 16) throw InvalidArgument("bit depth must be 8 or 16");
    return bit_depth == 8 ? 255u : 65535u;
}

}  // namespace io_detail

/// File extensions recognised when scanning directories.
inline bool has_image_extension(const std::filesystem::path& path) {
    const std::string ext = io_detail::lower_extension(path);
    return ext == ".png" || ext == ".ppm" || ext == ".pgm" || ext == ".pnm";
}

/// Regular files with a supported extension, sorted by file name.
inline std::vector<std::filesystem::path> list_images(const std::filesystem::path& dir) {
    std::error_code ec;
    if (!std::filesystem::is_directory(dir, ec)) throw IoError("not a directory: '" + dir.string() + "'");
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        if (entry.is_regular_file() && has_image_extension(entry.path())) files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    return files;
}

inline RgbImage load_image(const std::filesystem::path& path) {
    const auto bytes = io_detail::read_file(path);
    if (io_detail::is_png(bytes)) return io_detail::to_rgb(io_detail::decode_png(bytes));
    if (io_detail::is_pnm(bytes)) return io_detail::to_rgb(io_detail::decode_pnm(bytes));
    throw FormatError("unsupported or corrupt image format: '" + path.string() + "'");
}

/// Writes an RGB file; the format follows the extension (.png, .ppm).
inline void save_image(const RgbImage& img, const std::filesystem::path& path, int bit_depth = 8) {
    io_detail::RawRaster raw;
    raw.width = img.width();
    raw.height = img.height();
    raw.channels = 3;
    raw.max_value = io_detail::max_for_depth(bit_depth);
    raw.samples.resize(raw.width * raw.height * 3);
    for (std::size_t i = 0; i < raw.width * raw.height; ++i) {
        for (std::size_t c = 0; c < 3; ++c) raw.samples[i * 3 + c] = io_detail::quantize(img.plane(c)[i], raw.max_value);
    }
    io_detail::save_raw(raw, path);
}

/// Writes a single-channel file (.png, .pgm); values are clamped to [0,1].
inline void save_gray_image(const GrayImage& img, const std::filesystem::path& path, int bit_depth = 8) {
    io_detail::RawRaster raw;
    raw.width = img.width();
    raw.height = img.height();
    raw.channels = 1;
    raw.max_value = io_detail::max_for_depth(bit_depth);
    raw.samples.resize(img.size());
    for (std::size_t i = 0; i < img.size(); ++i) raw.samples[i] = io_detail::quantize(img[i], raw.max_value);
    io_detail::save_raw(raw, path);
}

}  // namespace freqinject
