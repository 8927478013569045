#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace vpocc {

/// Dense voxel feature volume, x-major:
/// data[(((x * ny) + y) * nz + z) * channels + c].
struct FeatureVolume {
    int nx = 0;
    int ny = 0;
    int nz = 0;
    int channels = 0;
    std::vector<float> data;

    static FeatureVolume zeros(int nx, int ny, int nz, int channels);

    std::size_t index(int x, int y, int z, int c) const {
        return ((static_cast<std::size_t>(x) * ny + y) * nz + z) * channels + c;
    }
    float at(int x, int y, int z, int c) const { return data[index(x, y, z, c)]; }
    float& at(int x, int y, int z, int c) { return data[index(x, y, z, c)]; }
    std::int64_t voxel_count() const {
        return static_cast<std::int64_t>(nx) * ny * nz;
    }
    bool same_dims(const FeatureVolume& o) const {
        return nx == o.nx && ny == o.ny && nz == o.nz && channels == o.channels;
    }
};

/// Binary volume file: 4 little-endian u32 (nx, ny, nz, channels) followed
/// by f32 samples in x-major order.
void save_feature_volume(const FeatureVolume& vol, const std::string& path);
FeatureVolume load_feature_volume(const std::string& path);

} // namespace vpocc
