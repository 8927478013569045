#include "vpocc/errors.hpp"
#include "vpocc/image.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <memory>
#include <vector>

namespace vpocc {

namespace {

struct FileCloser {
    void operator()(std::FILE* f) const {
        if (f) {
            std::fclose(f);
        }
    }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

struct PngReader {
    png_structp png = nullptr;
    png_infop info = nullptr;
    ~PngReader() { png_destroy_read_struct(&png, &info, nullptr); }
};

struct PngWriter {
    png_structp png = nullptr;
    png_infop info = nullptr;
    ~PngWriter() { png_destroy_write_struct(&png, &info); }
};

void read_rows(png_structp png, std::vector<std::uint8_t>& bytes, std::size_t row_bytes,
               int height) {
    std::vector<png_bytep> rows(static_cast<std::size_t>(height));
    for (int y = 0; y < height; ++y) {
        rows[static_cast<std::size_t>(y)] = bytes.data() + static_cast<std::size_t>(y) * row_bytes;
    }
    png_read_image(png, rows.data());
    png_read_end(png, nullptr);
}

} // namespace

ImageBuffer load_png_rgb8(const std::string& path);
void save_png_rgb8(const ImageBuffer& img, const std::string& path);

ImageBuffer load_png_rgb8(const std::string& path) {
    FilePtr fp(std::fopen(path.c_str(), "rb"));
    if (!fp) {
        throw IoError("cannot open PNG: " + path);
    }
    PngReader r;
    r.png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!r.png || !(r.info = png_create_info_struct(r.png))) {
        throw IoError("libpng init failed");
    }
    if (setjmp(png_jmpbuf(r.png))) {
        throw IoError("PNG decode failed: " + path);
    }
    png_init_io(r.png, fp.get());
    png_read_info(r.png, r.info);

    const int width = static_cast<int>(png_get_image_width(r.png, r.info));
    const int height = static_cast<int>(png_get_image_height(r.png, r.info));
    const png_byte color = png_get_color_type(r.png, r.info);
    const png_byte depth = png_get_bit_depth(r.png, r.info);

    if (color == PNG_COLOR_TYPE_PALETTE) {
        png_set_palette_to_rgb(r.png);
    }
    if (depth == 16) {
        png_set_strip_16(r.png);
    }
    if (color == PNG_COLOR_TYPE_GRAY && depth < 8) {
        png_set_expand_gray_1_2_4_to_8(r.png);
    }
    if (color & PNG_COLOR_MASK_ALPHA) {
        png_set_strip_alpha(r.png);
    }
    if (png_get_valid(r.png, r.info, PNG_INFO_tRNS)) {
        png_set_tRNS_to_alpha(r.png);
        png_set_strip_alpha(r.png);
    }
    png_read_update_info(r.png, r.info);

    const int channels = static_cast<int>(png_get_channels(r.png, r.info));
    if (channels != 1 && channels != 3) {
        throw IoError("unsupported PNG channel count in " + path);
    }
    const std::size_t row_bytes = png_get_rowbytes(r.png, r.info);
    std::vector<std::uint8_t> bytes(row_bytes * static_cast<std::size_t>(height));
    read_rows(r.png, bytes, row_bytes, height);

    ImageBuffer img = ImageBuffer::zeros(width, height, channels);
    for (int y = 0; y < height; ++y) {
        const std::uint8_t* row = bytes.data() + static_cast<std::size_t>(y) * row_bytes;
        for (std::size_t i = 0; i < static_cast<std::size_t>(width) * channels; ++i) {
            img.data[static_cast<std::size_t>(y) * width * channels + i] =
                static_cast<float>(row[i]) / 255.0f;
        }
    }
    return img;
}

void save_png_rgb8(const ImageBuffer& img, const std::string& path) {
    if (img.channels != 1 && img.channels != 3) {
        throw IoError("PNG output supports 1 or 3 channels");
    }
    FilePtr fp(std::fopen(path.c_str(), "wb"));
    if (!fp) {
        throw IoError("cannot open for writing: " + path);
    }
    PngWriter w;
    w.png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!w.png || !(w.info = png_create_info_struct(w.png))) {
        throw IoError("libpng init failed");
    }
    if (setjmp(png_jmpbuf(w.png))) {
        throw IoError("PNG encode failed: " + path);
    }
    png_init_io(w.png, fp.get());
    png_set_IHDR(w.png, w.info, static_cast<png_uint_32>(img.width),
                 static_cast<png_uint_32>(img.height), 8,
                 img.channels == 3 ? PNG_COLOR_TYPE_RGB : PNG_COLOR_TYPE_GRAY,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(w.png, w.info);

    const std::size_t row_bytes = static_cast<std::size_t>(img.width) * img.channels;
    std::vector<std::uint8_t> row(row_bytes);
    for (int y = 0; y < img.height; ++y) {
        for (std::size_t i = 0; i < row_bytes; ++i) {
            const double v =
                std::floor(static_cast<double>(img.data[static_cast<std::size_t>(y) * row_bytes + i]) * 255.0 + 0.5);
            row[i] = static_cast<std::uint8_t>(std::clamp(v, 0.0, 255.0));
        }
        png_write_row(w.png, row.data());
    }
    png_write_end(w.png, nullptr);
}

DepthMap load_depth_png(const std::string& path) {
    FilePtr fp(std::fopen(path.c_str(), "rb"));
    if (!fp) {
        throw IoError("cannot open depth PNG: " + path);
    }
    PngReader r;
    r.png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!r.png || !(r.info = png_create_info_struct(r.png))) {
        throw IoError("libpng init failed");
    }
    if (setjmp(png_jmpbuf(r.png))) {
        throw IoError("PNG decode failed: " + path);
    }
    png_init_io(r.png, fp.get());
    png_read_info(r.png, r.info);

    const int width = static_cast<int>(png_get_image_width(r.png, r.info));
    const int height = static_cast<int>(png_get_image_height(r.png, r.info));
    if (png_get_color_type(r.png, r.info) != PNG_COLOR_TYPE_GRAY ||
        png_get_bit_depth(r.png, r.info) != 16) {
        throw IoError("depth PNG must be 16-bit grayscale: " + path);
    }
    png_set_swap(r.png); // PNG stores big-endian samples
    png_read_update_info(r.png, r.info);

    const std::size_t row_bytes = png_get_rowbytes(r.png, r.info);
    std::vector<std::uint8_t> bytes(row_bytes * static_cast<std::size_t>(height));
    read_rows(r.png, bytes, row_bytes, height);

    DepthMap depth = DepthMap::zeros(width, height);
    const auto* raw = reinterpret_cast<const std::uint16_t*>(bytes.data());
    for (std::size_t i = 0; i < depth.meters.size(); ++i) {
        const double meters = static_cast<double>(raw[i]) / 256.0;
        depth.meters[i] = (raw[i] == 0 || meters >= 200.0) ? 0.0f : static_cast<float>(meters);
    }
    return depth;
}

void save_depth_png(const DepthMap& depth, const std::string& path) {
    FilePtr fp(std::fopen(path.c_str(), "wb"));
    if (!fp) {
        throw IoError("cannot open for writing: " + path);
    }
    PngWriter w;
    w.png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!w.png || !(w.info = png_create_info_struct(w.png))) {
        throw IoError("libpng init failed");
    }
    if (setjmp(png_jmpbuf(w.png))) {
        throw IoError("PNG encode failed: " + path);
    }
    png_init_io(w.png, fp.get());
    png_set_IHDR(w.png, w.info, static_cast<png_uint_32>(depth.width),
                 static_cast<png_uint_32>(depth.height), 16, PNG_COLOR_TYPE_GRAY,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(w.png, w.info);
    png_set_swap(w.png);

    std::vector<std::uint16_t> row(static_cast<std::size_t>(depth.width));
    for (int y = 0; y < depth.height; ++y) {
        for (int x = 0; x < depth.width; ++x) {
            const float m = depth.at(x, y);
            if (m <= 0.0f) {
                row[static_cast<std::size_t>(x)] = 0;
            } else {
                const double raw = std::floor(static_cast<double>(m) * 256.0 + 0.5);
                row[static_cast<std::size_t>(x)] =
                    static_cast<std::uint16_t>(std::clamp(raw, 1.0, 65535.0));
            }
        }
        png_write_row(w.png, reinterpret_cast<png_bytep>(row.data()));
    }
    png_write_end(w.png, nullptr);
}

} // namespace vpocc
