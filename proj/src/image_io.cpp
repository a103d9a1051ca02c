#include "uwsim/image_io.hpp"

#include <png.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <csetjmp>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <vector>

namespace uwsim {

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& reason) {
    throw std::runtime_error(path + ": " + reason);
}

struct PngReader {
    FILE* fp = nullptr;
    png_structp png = nullptr;
    png_infop info = nullptr;
    ~PngReader() {
        if (png) png_destroy_read_struct(&png, info ? &info : nullptr, nullptr);
        if (fp) std::fclose(fp);
    }
};

struct PngWriter {
    FILE* fp = nullptr;
    png_structp png = nullptr;
    png_infop info = nullptr;
    ~PngWriter() {
        if (png) png_destroy_write_struct(&png, info ? &info : nullptr);
        if (fp) std::fclose(fp);
    }
};

// Decoded PNG with samples widened to uint16 regardless of source depth.
struct DecodedPng {
    int height = 0;
    int width = 0;
    int channels = 0;
    int bit_depth = 0;
    std::vector<std::uint16_t> samples; // interleaved, row-major
};

DecodedPng decode_png(const std::string& path) {
    PngReader r;
    r.fp = std::fopen(path.c_str(), "rb");
    if (!r.fp) fail(path, "cannot open file");

    unsigned char sig[8];
    if (std::fread(sig, 1, 8, r.fp) != 8 || png_sig_cmp(sig, 0, 8) != 0) {
        fail(path, "not a PNG file");
    }
    r.png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!r.png) fail(path, "png_create_read_struct failed");
    r.info = png_create_info_struct(r.png);
    if (!r.info) fail(path, "png_create_info_struct failed");
    if (setjmp(png_jmpbuf(r.png))) fail(path, "PNG decode failure");

    png_init_io(r.png, r.fp);
    png_set_sig_bytes(r.png, 8);
    png_read_info(r.png, r.info);

    DecodedPng out;
    out.width = static_cast<int>(png_get_image_width(r.png, r.info));
    out.height = static_cast<int>(png_get_image_height(r.png, r.info));
    out.bit_depth = png_get_bit_depth(r.png, r.info);
    const int color_type = png_get_color_type(r.png, r.info);

    switch (color_type) {
    case PNG_COLOR_TYPE_RGB: out.channels = 3; break;
    case PNG_COLOR_TYPE_GRAY: out.channels = 1; break;
    case PNG_COLOR_TYPE_RGB_ALPHA: fail(path, "unsupported channel count: RGBA (need RGB or grayscale)");
    case PNG_COLOR_TYPE_GRAY_ALPHA: fail(path, "unsupported channel count: gray+alpha");
    case PNG_COLOR_TYPE_PALETTE: fail(path, "unsupported color type: palette");
    default: fail(path, "unsupported color type " + std::to_string(color_type));
    }
    if (out.bit_depth != 8 && out.bit_depth != 16) {
        fail(path, "unsupported bit depth " + std::to_string(out.bit_depth) + " (need 8 or 16)");
    }

    const int passes = png_set_interlace_handling(r.png);
    png_read_update_info(r.png, r.info);

    const std::size_t rowbytes = png_get_rowbytes(r.png, r.info);
    std::vector<unsigned char> raster(rowbytes * out.height);
    std::vector<png_bytep> rows(out.height);
    for (int y = 0; y < out.height; ++y) rows[y] = raster.data() + rowbytes * y;
    for (int p = 0; p < passes; ++p) png_read_rows(r.png, rows.data(), nullptr, out.height);
    png_read_end(r.png, nullptr);

    const std::size_t n = static_cast<std::size_t>(out.height) * out.width * out.channels;
    out.samples.resize(n);
    if (out.bit_depth == 8) {
        for (std::size_t i = 0; i < n; ++i) out.samples[i] = raster[i];
    } else {
        // PNG stores 16-bit samples big-endian
        for (std::size_t i = 0; i < n; ++i) {
            out.samples[i] = static_cast<std::uint16_t>((raster[2 * i] << 8) | raster[2 * i + 1]);
        }
    }
    return out;
}

void encode_png(const std::string& path, int height, int width, int channels,
                int bit_depth, const std::vector<std::uint16_t>& samples) {
    PngWriter w;
    w.fp = std::fopen(path.c_str(), "wb");
    if (!w.fp) fail(path, "cannot open file for writing");
    w.png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!w.png) fail(path, "png_create_write_struct failed");
    w.info = png_create_info_struct(w.png);
    if (!w.info) fail(path, "png_create_info_struct failed");
    if (setjmp(png_jmpbuf(w.png))) fail(path, "PNG encode failure");

    png_init_io(w.png, w.fp);
    png_set_compression_level(w.png, 6);
    const int color_type = channels == 3 ? PNG_COLOR_TYPE_RGB : PNG_COLOR_TYPE_GRAY;
    png_set_IHDR(w.png, w.info, width, height, bit_depth, color_type,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(w.png, w.info);

    const std::size_t ncols = static_cast<std::size_t>(width) * channels;
    const std::size_t rowbytes = ncols * (bit_depth / 8);
    std::vector<unsigned char> raster(rowbytes * height);
    for (int y = 0; y < height; ++y) {
        unsigned char* row = raster.data() + rowbytes * y;
        const std::uint16_t* src = samples.data() + ncols * y;
        if (bit_depth == 8) {
            for (std::size_t i = 0; i < ncols; ++i) row[i] = static_cast<unsigned char>(src[i]);
        } else {
            for (std::size_t i = 0; i < ncols; ++i) {
                row[2 * i] = static_cast<unsigned char>(src[i] >> 8);
                row[2 * i + 1] = static_cast<unsigned char>(src[i] & 0xFF);
            }
        }
    }
    std::vector<png_bytep> rows(height);
    for (int y = 0; y < height; ++y) rows[y] = raster.data() + rowbytes * y;
    png_write_image(w.png, rows.data());
    png_write_end(w.png, nullptr);
}

std::uint16_t quantize(float v, int maxval) {
    const float c = std::clamp(v, 0.0f, 1.0f);
    return static_cast<std::uint16_t>(std::lround(static_cast<double>(c) * maxval));
}

void write_u32_le(std::ostream& os, std::uint32_t v) {
    unsigned char b[4] = {static_cast<unsigned char>(v & 0xFF),
                          static_cast<unsigned char>((v >> 8) & 0xFF),
                          static_cast<unsigned char>((v >> 16) & 0xFF),
                          static_cast<unsigned char>((v >> 24) & 0xFF)};
    os.write(reinterpret_cast<const char*>(b), 4);
}

std::uint32_t read_u32_le(std::istream& is, const std::string& path) {
    unsigned char b[4];
    if (!is.read(reinterpret_cast<char*>(b), 4)) fail(path, "truncated header");
    return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
           (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

void write_f32_samples(std::ostream& os, const float* data, std::size_t n) {
    static_assert(sizeof(float) == 4);
    // x86/aarch64 little-endian fast path; byte-swapping fallback elsewhere
    if constexpr (std::endian::native == std::endian::little) {
        os.write(reinterpret_cast<const char*>(data), static_cast<std::streamsize>(n * 4));
    } else {
        for (std::size_t i = 0; i < n; ++i) {
            std::uint32_t u;
            std::memcpy(&u, &data[i], 4);
            write_u32_le(os, u);
        }
    }
}

std::vector<float> read_f32_samples(std::istream& is, std::size_t n, const std::string& path) {
    std::vector<float> out(n);
    if constexpr (std::endian::native == std::endian::little) {
        if (!is.read(reinterpret_cast<char*>(out.data()), static_cast<std::streamsize>(n * 4))) {
            fail(path, "truncated sample data");
        }
    } else {
        for (std::size_t i = 0; i < n; ++i) {
            const std::uint32_t u = read_u32_le(is, path);
            std::memcpy(&out[i], &u, 4);
        }
    }
    return out;
}

struct F32Header {
    std::uint32_t width = 0;
    std::uint32_t height = 0;
    int channels = 0;
};

F32Header read_f32_header(std::ifstream& is, const std::string& path) {
    F32Header h;
    h.width = read_u32_le(is, path);
    h.height = read_u32_le(is, path);
    if (h.width == 0 || h.height == 0) fail(path, "zero dimension in header");
    const auto fsize = std::filesystem::file_size(path);
    const std::uint64_t plane = static_cast<std::uint64_t>(h.width) * h.height * 4;
    if (fsize == 8 + plane) h.channels = 1;
    else if (fsize == 8 + 3 * plane) h.channels = 3;
    else fail(path, "file size does not match 1 or 3 planes of the declared dimensions");
    return h;
}

} // namespace

ImagePlane load_rgb(const std::string& path) {
    if (!std::filesystem::exists(path)) fail(path, "file does not exist");
    DecodedPng png = decode_png(path);
    if (png.channels != 3) fail(path, "expected a 3-channel RGB image");
    const float maxval = png.bit_depth == 8 ? 255.0f : 65535.0f;
    ImagePlane img(png.height, png.width);
    std::size_t i = 0;
    for (int y = 0; y < png.height; ++y) {
        for (int x = 0; x < png.width; ++x) {
            for (int c = 0; c < 3; ++c) {
                img.at(x, y, c) = static_cast<float>(png.samples[i++]) / maxval;
            }
        }
    }
    return img;
}

void save_rgb16(const ImagePlane& img, const std::string& path) {
    if (img.empty()) throw std::invalid_argument("save_rgb16: empty image");
    std::vector<std::uint16_t> samples(img.pixel_count() * 3);
    std::size_t i = 0;
    for (int y = 0; y < img.height(); ++y) {
        for (int x = 0; x < img.width(); ++x) {
            for (int c = 0; c < 3; ++c) samples[i++] = quantize(img.at(x, y, c), 65535);
        }
    }
    encode_png(path, img.height(), img.width(), 3, 16, samples);
}

void save_rgb8(const ImagePlane& img, const std::string& path) {
    if (img.empty()) throw std::invalid_argument("save_rgb8: empty image");
    std::vector<std::uint16_t> samples(img.pixel_count() * 3);
    std::size_t i = 0;
    for (int y = 0; y < img.height(); ++y) {
        for (int x = 0; x < img.width(); ++x) {
            for (int c = 0; c < 3; ++c) samples[i++] = quantize(img.at(x, y, c), 255);
        }
    }
    encode_png(path, img.height(), img.width(), 3, 8, samples);
}

DepthMap load_depth(const std::string& path, double scale, double z_min, double z_max) {
    if (scale <= 0.0) throw std::invalid_argument("load_depth: scale must be > 0");
    if (!(z_min > 0.0) || !(z_min < z_max)) {
        throw std::invalid_argument("load_depth: need 0 < z_min < z_max");
    }
    if (!std::filesystem::exists(path)) fail(path, "file does not exist");

    DepthMap depth;
    if (std::filesystem::path(path).extension() == ".f32") {
        depth = load_f32_plane(path);
        for (double& v : depth.data()) v *= scale;
    } else {
        DecodedPng png = decode_png(path);
        if (png.channels != 1) fail(path, "expected a single-channel depth image");
        if (png.bit_depth != 16) fail(path, "depth PNG must be 16-bit");
        depth = DepthMap(png.height, png.width);
        for (std::size_t i = 0; i < depth.pixel_count(); ++i) {
            depth.data()[i] = static_cast<double>(png.samples[i]) * scale;
        }
    }
    for (double& v : depth.data()) v = std::clamp(v, z_min, z_max);
    return depth;
}

void save_depth_png16(const DepthMap& depth, const std::string& path, double scale) {
    if (scale <= 0.0) throw std::invalid_argument("save_depth_png16: scale must be > 0");
    if (depth.empty()) throw std::invalid_argument("save_depth_png16: empty depth map");
    std::vector<std::uint16_t> samples(depth.pixel_count());
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const double raw = std::clamp(std::round(depth.data()[i] / scale), 0.0, 65535.0);
        samples[i] = static_cast<std::uint16_t>(raw);
    }
    encode_png(path, depth.height(), depth.width(), 1, 16, samples);
}

void save_f32(const DepthMap& depth, const std::string& path) {
    if (depth.empty()) throw std::invalid_argument("save_f32: empty depth map");
    std::ofstream os(path, std::ios::binary);
    if (!os) fail(path, "cannot open file for writing");
    write_u32_le(os, static_cast<std::uint32_t>(depth.width()));
    write_u32_le(os, static_cast<std::uint32_t>(depth.height()));
    std::vector<float> row(depth.pixel_count());
    for (std::size_t i = 0; i < row.size(); ++i) row[i] = static_cast<float>(depth.data()[i]);
    write_f32_samples(os, row.data(), row.size());
    if (!os) fail(path, "write failure");
}

void save_f32(const ImagePlane& img, const std::string& path) {
    if (img.empty()) throw std::invalid_argument("save_f32: empty image");
    std::ofstream os(path, std::ios::binary);
    if (!os) fail(path, "cannot open file for writing");
    write_u32_le(os, static_cast<std::uint32_t>(img.width()));
    write_u32_le(os, static_cast<std::uint32_t>(img.height()));
    write_f32_samples(os, img.data().data(), img.data().size());
    if (!os) fail(path, "write failure");
}

DepthMap load_f32_plane(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) fail(path, "cannot open file");
    const F32Header h = read_f32_header(is, path);
    if (h.channels != 1) fail(path, "expected a single plane, file holds 3");
    DepthMap depth(static_cast<int>(h.height), static_cast<int>(h.width));
    const std::vector<float> raw = read_f32_samples(is, depth.pixel_count(), path);
    for (std::size_t i = 0; i < raw.size(); ++i) depth.data()[i] = raw[i];
    return depth;
}

ImagePlane load_f32_image(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) fail(path, "cannot open file");
    const F32Header h = read_f32_header(is, path);
    if (h.channels != 3) fail(path, "expected 3 planes, file holds 1");
    ImagePlane img(static_cast<int>(h.height), static_cast<int>(h.width));
    img.data() = read_f32_samples(is, img.data().size(), path);
    return img;
}

bool f32_is_image(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) fail(path, "cannot open file");
    return read_f32_header(is, path).channels == 3;
}

ImagePlane srgb_to_linear(const ImagePlane& img) {
    ImagePlane out(img.height(), img.width());
    for (std::size_t i = 0; i < img.data().size(); ++i) {
        const double s = img.data()[i];
        const double lin = s <= 0.04045 ? s / 12.92 : std::pow((s + 0.055) / 1.055, 2.4);
        out.data()[i] = static_cast<float>(lin);
    }
    return out;
}

} // namespace uwsim
