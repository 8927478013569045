#include "vpocc/volume.hpp"

#include "vpocc/errors.hpp"

#include <cstring>
#include <fstream>

namespace vpocc {

namespace {

void write_u32(std::ofstream& out, std::uint32_t v) {
    unsigned char b[4] = {static_cast<unsigned char>(v & 0xff),
                          static_cast<unsigned char>((v >> 8) & 0xff),
                          static_cast<unsigned char>((v >> 16) & 0xff),
                          static_cast<unsigned char>((v >> 24) & 0xff)};
    out.write(reinterpret_cast<const char*>(b), 4);
}

std::uint32_t read_u32(std::ifstream& in, const std::string& path) {
    unsigned char b[4];
    in.read(reinterpret_cast<char*>(b), 4);
    if (!in) {
        throw IoError("truncated volume file: " + path);
    }
    return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
           (static_cast<std::uint32_t>(b[2]) << 16) |
           (static_cast<std::uint32_t>(b[3]) << 24);
}

} // namespace

FeatureVolume FeatureVolume::zeros(int nx, int ny, int nz, int channels) {
    FeatureVolume v;
    v.nx = nx;
    v.ny = ny;
    v.nz = nz;
    v.channels = channels;
    v.data.assign(static_cast<std::size_t>(nx) * ny * nz * channels, 0.0f);
    return v;
}

void save_feature_volume(const FeatureVolume& vol, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot open for writing: " + path);
    }
    write_u32(out, static_cast<std::uint32_t>(vol.nx));
    write_u32(out, static_cast<std::uint32_t>(vol.ny));
    write_u32(out, static_cast<std::uint32_t>(vol.nz));
    write_u32(out, static_cast<std::uint32_t>(vol.channels));
    static_assert(sizeof(float) == 4);
    out.write(reinterpret_cast<const char*>(vol.data.data()),
              static_cast<std::streamsize>(vol.data.size() * sizeof(float)));
    if (!out) {
        throw IoError("short write: " + path);
    }
}

FeatureVolume load_feature_volume(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open volume file: " + path);
    }
    const std::uint32_t nx = read_u32(in, path);
    const std::uint32_t ny = read_u32(in, path);
    const std::uint32_t nz = read_u32(in, path);
    const std::uint32_t channels = read_u32(in, path);
    if (nx == 0 || ny == 0 || nz == 0 || channels == 0 ||
        static_cast<std::uint64_t>(nx) * ny * nz * channels > (1ull << 31)) {
        throw IoError("implausible volume header in " + path);
    }
    FeatureVolume vol = FeatureVolume::zeros(static_cast<int>(nx), static_cast<int>(ny),
                                             static_cast<int>(nz), static_cast<int>(channels));
    in.read(reinterpret_cast<char*>(vol.data.data()),
            static_cast<std::streamsize>(vol.data.size() * sizeof(float)));
    if (static_cast<std::size_t>(in.gcount()) != vol.data.size() * sizeof(float)) {
        throw IoError("truncated volume data in " + path);
    }
    return vol;
}

} // namespace vpocc
