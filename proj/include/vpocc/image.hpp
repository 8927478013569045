#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace vpocc {

/// Interleaved row-major raster with samples in [0, 1].
/// data[(y * width + x) * channels + c].
struct ImageBuffer {
    int width = 0;
    int height = 0;
    int channels = 1;
    std::vector<float> data;

    static ImageBuffer zeros(int width, int height, int channels);

    float at(int x, int y, int c) const {
        return data[(static_cast<std::size_t>(y) * width + x) * channels + c];
    }
    float& at(int x, int y, int c) {
        return data[(static_cast<std::size_t>(y) * width + x) * channels + c];
    }
    std::size_t size() const { return data.size(); }
};

/// Row-major metric depth map; 0 marks an invalid sample. Valid entries are
/// positive and below 200 m (KITTI depth convention).
struct DepthMap {
    int width = 0;
    int height = 0;
    std::vector<float> meters;

    static DepthMap zeros(int width, int height);

    float at(int x, int y) const { return meters[static_cast<std::size_t>(y) * width + x]; }
    float& at(int x, int y) { return meters[static_cast<std::size_t>(y) * width + x]; }
    bool valid(int x, int y) const { return at(x, y) > 0.0f; }
    std::int64_t valid_count() const;
};

/// Loads an 8-bit PNG, PPM (P6) or PGM (P5) image; the format is sniffed
/// from the file header. Samples are mapped to [0,1] by dividing by 255.
ImageBuffer load_image(const std::string& path);

/// Saves as PNG, PPM or PGM depending on the file extension
/// (.png/.ppm/.pgm). Samples are mapped to bytes with round-half-up.
void save_image(const ImageBuffer& img, const std::string& path);

/// Loads a 16-bit grayscale PNG depth map: meters = raw / 256, raw 0 is
/// invalid. Values at or above 200 m are treated as invalid.
DepthMap load_depth_png(const std::string& path);

/// Writes a 16-bit grayscale PNG with raw = round(meters * 256); invalid
/// samples are written as 0.
void save_depth_png(const DepthMap& depth, const std::string& path);

} // namespace vpocc
