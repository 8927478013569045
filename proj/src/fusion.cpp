#include "vpocc/fusion.hpp"

#include "vpocc/errors.hpp"
#include "vpocc/parallel.hpp"
#include "vpocc/prng.hpp"

#include <algorithm>
#include <cstring>
#include <fstream>

namespace vpocc {

namespace {

void fill_kernel(ConvKernel3d& k, int out_c, int in_c, int size, SplitMix64& rng) {
    k.out_channels = out_c;
    k.in_channels = in_c;
    k.size = size;
    k.w.resize(static_cast<std::size_t>(out_c) * in_c * size * size * size);
    for (auto& v : k.w) {
        v = static_cast<float>(rng.uniform_symmetric(0.1));
    }
}

void fill_taps(std::vector<float>& taps, int channels, SplitMix64& rng) {
    taps.resize(static_cast<std::size_t>(channels) * channels * 3);
    for (auto& v : taps) {
        v = static_cast<float>(rng.uniform_symmetric(0.1));
    }
}

FeatureVolume concat_channels(const FeatureVolume& a, const FeatureVolume& b) {
    if (a.nx != b.nx || a.ny != b.ny || a.nz != b.nz) {
        throw DimensionMismatch("concat: volume dims differ");
    }
    FeatureVolume out = FeatureVolume::zeros(a.nx, a.ny, a.nz, a.channels + b.channels);
    const std::int64_t voxels = a.voxel_count();
    for (std::int64_t v = 0; v < voxels; ++v) {
        const std::size_t src_a = static_cast<std::size_t>(v) * a.channels;
        const std::size_t src_b = static_cast<std::size_t>(v) * b.channels;
        const std::size_t dst = static_cast<std::size_t>(v) * out.channels;
        std::memcpy(&out.data[dst], &a.data[src_a], sizeof(float) * static_cast<std::size_t>(a.channels));
        std::memcpy(&out.data[dst + a.channels], &b.data[src_b],
                    sizeof(float) * static_cast<std::size_t>(b.channels));
    }
    return out;
}

FeatureVolume scale_by_mask(const FeatureVolume& vol, const FeatureVolume& mask) {
    if (mask.channels != 1 || mask.nx != vol.nx || mask.ny != vol.ny || mask.nz != vol.nz) {
        throw DimensionMismatch("mask dims differ from volume");
    }
    FeatureVolume out = vol;
    const std::int64_t voxels = vol.voxel_count();
    for (std::int64_t v = 0; v < voxels; ++v) {
        const float m = mask.data[static_cast<std::size_t>(v)];
        for (int c = 0; c < vol.channels; ++c) {
            out.data[static_cast<std::size_t>(v) * vol.channels + c] *= m;
        }
    }
    return out;
}

FeatureVolume relu(FeatureVolume vol) {
    for (auto& v : vol.data) {
        v = std::max(v, 0.0f);
    }
    return vol;
}

FeatureVolume add(const FeatureVolume& a, const FeatureVolume& b) {
    if (!a.same_dims(b)) {
        throw DimensionMismatch("add: volume dims differ");
    }
    FeatureVolume out = a;
    for (std::size_t i = 0; i < out.data.size(); ++i) {
        out.data[i] += b.data[i];
    }
    return out;
}

// Average pooling by 2 per axis with ceil division; edge windows are
// averaged over the samples that exist.
FeatureVolume avgpool2(const FeatureVolume& vol) {
    const int nx = (vol.nx + 1) / 2;
    const int ny = (vol.ny + 1) / 2;
    const int nz = (vol.nz + 1) / 2;
    FeatureVolume out = FeatureVolume::zeros(nx, ny, nz, vol.channels);
    for (int x = 0; x < nx; ++x) {
        for (int y = 0; y < ny; ++y) {
            for (int z = 0; z < nz; ++z) {
                const int x1 = std::min(2 * x + 2, vol.nx);
                const int y1 = std::min(2 * y + 2, vol.ny);
                const int z1 = std::min(2 * z + 2, vol.nz);
                const int count = (x1 - 2 * x) * (y1 - 2 * y) * (z1 - 2 * z);
                for (int c = 0; c < vol.channels; ++c) {
                    double acc = 0.0;
                    for (int xi = 2 * x; xi < x1; ++xi) {
                        for (int yi = 2 * y; yi < y1; ++yi) {
                            for (int zi = 2 * z; zi < z1; ++zi) {
                                acc += vol.at(xi, yi, zi, c);
                            }
                        }
                    }
                    out.at(x, y, z, c) = static_cast<float>(acc / count);
                }
            }
        }
    }
    return out;
}

FeatureVolume upsample_nn(const FeatureVolume& vol, int nx, int ny, int nz) {
    FeatureVolume out = FeatureVolume::zeros(nx, ny, nz, vol.channels);
    for (int x = 0; x < nx; ++x) {
        for (int y = 0; y < ny; ++y) {
            for (int z = 0; z < nz; ++z) {
                for (int c = 0; c < vol.channels; ++c) {
                    out.at(x, y, z, c) = vol.at(std::min(x / 2, vol.nx - 1),
                                                std::min(y / 2, vol.ny - 1),
                                                std::min(z / 2, vol.nz - 1), c);
                }
            }
        }
    }
    return out;
}

} // namespace

FusionWeights FusionWeights::seeded(int channels, int num_classes, std::uint64_t seed) {
    if (channels <= 0 || num_classes <= 0) {
        throw DomainError("fusion weights need positive channels and classes");
    }
    FusionWeights w;
    w.channels = channels;
    w.num_classes = num_classes;
    w.seed = seed;
    SplitMix64 rng(seed);
    fill_kernel(w.concat_conv, channels, 2 * channels, 3, rng);
    w.aniso.channels = channels;
    fill_taps(w.aniso.kx, channels, rng);
    fill_taps(w.aniso.ky, channels, rng);
    fill_taps(w.aniso.kz, channels, rng);
    fill_kernel(w.mask_head, 2, channels, 1, rng);
    fill_kernel(w.aggregate_conv, channels, 2 * channels, 3, rng);
    fill_kernel(w.refine_enc0, channels, channels, 3, rng);
    fill_kernel(w.refine_enc1, channels, channels, 3, rng);
    fill_kernel(w.refine_dec, channels, channels, 3, rng);
    fill_kernel(w.head_conv, num_classes, channels, 1, rng);
    return w;
}

FeatureVolume conv3d(const FeatureVolume& vol, const ConvKernel3d& kernel, int threads) {
    if (kernel.in_channels != vol.channels) {
        throw DimensionMismatch("conv3d: kernel input channels differ from volume");
    }
    if (kernel.size != 1 && kernel.size != 3) {
        throw DimensionMismatch("conv3d: kernel size must be 1 or 3");
    }
    FeatureVolume out = FeatureVolume::zeros(vol.nx, vol.ny, vol.nz, kernel.out_channels);
    const int half = kernel.size / 2;
    parallel_for(0, vol.nx, threads, [&](std::int64_t x0, std::int64_t x1) {
        for (std::int64_t x = x0; x < x1; ++x) {
            for (int y = 0; y < vol.ny; ++y) {
                for (int z = 0; z < vol.nz; ++z) {
                    for (int oc = 0; oc < kernel.out_channels; ++oc) {
                        double acc = 0.0;
                        for (int kx = 0; kx < kernel.size; ++kx) {
                            const int sx = static_cast<int>(x) + kx - half;
                            if (sx < 0 || sx >= vol.nx) {
                                continue;
                            }
                            for (int ky = 0; ky < kernel.size; ++ky) {
                                const int sy = y + ky - half;
                                if (sy < 0 || sy >= vol.ny) {
                                    continue;
                                }
                                for (int kz = 0; kz < kernel.size; ++kz) {
                                    const int sz = z + kz - half;
                                    if (sz < 0 || sz >= vol.nz) {
                                        continue;
                                    }
                                    for (int ic = 0; ic < vol.channels; ++ic) {
                                        acc += static_cast<double>(vol.at(sx, sy, sz, ic)) *
                                               kernel.at(oc, ic, kx, ky, kz);
                                    }
                                }
                            }
                        }
                        out.at(static_cast<int>(x), y, z, oc) = static_cast<float>(acc);
                    }
                }
            }
        }
    });
    return out;
}

FeatureVolume anisotropic_conv(const FeatureVolume& vol, const AnisotropicKernel& kernel,
                               int threads) {
    if (kernel.channels != vol.channels) {
        throw DimensionMismatch("anisotropic_conv: channel width differs from volume");
    }
    enum Axis { X = 0, Y = 1, Z = 2 };
    auto pass = [&](const FeatureVolume& in, const std::vector<float>& taps, Axis axis) {
        FeatureVolume out = FeatureVolume::zeros(in.nx, in.ny, in.nz, in.channels);
        const int extent[3] = {in.nx, in.ny, in.nz};
        parallel_for(0, in.nx, threads, [&](std::int64_t x0, std::int64_t x1) {
            for (std::int64_t x = x0; x < x1; ++x) {
                for (int y = 0; y < in.ny; ++y) {
                    for (int z = 0; z < in.nz; ++z) {
                        for (int oc = 0; oc < in.channels; ++oc) {
                            double acc = 0.0;
                            for (int t = 0; t < 3; ++t) {
                                int sx = static_cast<int>(x), sy = y, sz = z;
                                int& moving = axis == X ? sx : (axis == Y ? sy : sz);
                                moving += t - 1;
                                if (moving < 0 || moving >= extent[axis]) {
                                    continue;
                                }
                                for (int ic = 0; ic < in.channels; ++ic) {
                                    acc += static_cast<double>(in.at(sx, sy, sz, ic)) *
                                           kernel.tap(taps, oc, ic, t);
                                }
                            }
                            out.at(static_cast<int>(x), y, z, oc) = static_cast<float>(acc);
                        }
                    }
                }
            }
        });
        return out;
    };
    FeatureVolume out = pass(vol, kernel.kx, X);
    out = pass(out, kernel.ky, Y);
    out = pass(out, kernel.kz, Z);
    return out;
}

std::pair<FeatureVolume, FeatureVolume> attention_masks(const FeatureVolume& f_o,
                                                        const FeatureVolume& f_z,
                                                        const FusionWeights& w,
                                                        int threads) {
    if (!f_o.same_dims(f_z) || f_o.channels != w.channels) {
        throw DimensionMismatch("attention_masks: volume dims differ from weights");
    }
    const FeatureVolume cat = concat_channels(f_o, f_z);
    const FeatureVolume local = conv3d(cat, w.concat_conv, threads);
    const FeatureVolume mixed = anisotropic_conv(local, w.aniso, threads);
    const FeatureVolume heads = relu(conv3d(mixed, w.mask_head, threads));

    FeatureVolume m_o = FeatureVolume::zeros(f_o.nx, f_o.ny, f_o.nz, 1);
    FeatureVolume m_z = FeatureVolume::zeros(f_o.nx, f_o.ny, f_o.nz, 1);
    const std::int64_t voxels = f_o.voxel_count();
    for (std::int64_t v = 0; v < voxels; ++v) {
        m_o.data[static_cast<std::size_t>(v)] = heads.data[static_cast<std::size_t>(v) * 2];
        m_z.data[static_cast<std::size_t>(v)] = heads.data[static_cast<std::size_t>(v) * 2 + 1];
    }
    return {std::move(m_o), std::move(m_z)};
}

FeatureVolume bfvf(const FeatureVolume& f_o, const FeatureVolume& f_z,
                   const FusionWeights& w, int threads) {
    const auto [m_o, m_z] = attention_masks(f_o, f_z, w, threads);
    const FeatureVolume weighted =
        concat_channels(scale_by_mask(f_o, m_o), scale_by_mask(f_z, m_z));
    const FeatureVolume fused = conv3d(weighted, w.aggregate_conv, threads);

    // Two-level encoder-decoder with an additive skip.
    const FeatureVolume e0 = relu(conv3d(fused, w.refine_enc0, threads));
    const FeatureVolume e1 = relu(conv3d(avgpool2(e0), w.refine_enc1, threads));
    const FeatureVolume up = upsample_nn(e1, e0.nx, e0.ny, e0.nz);
    return conv3d(add(e0, up), w.refine_dec, threads);
}

SemanticGrid upsample_head(const FeatureVolume& vol, const FusionWeights& w, int threads) {
    if (vol.nx != 128 || vol.ny != 128 || vol.nz != 8) {
        throw DimensionMismatch("upsample_head: input must be 128x128x8");
    }
    if (vol.channels != w.channels) {
        throw DimensionMismatch("upsample_head: channel width differs from weights");
    }
    SemanticGrid grid;
    grid.nx = 256;
    grid.ny = 256;
    grid.nz = 32;
    grid.classes.assign(static_cast<std::size_t>(grid.nx) * grid.ny * grid.nz, 0);

    const ConvKernel3d& head = w.head_conv;
    parallel_for(0, grid.nx, threads, [&](std::int64_t x0, std::int64_t x1) {
        std::vector<double> logits(static_cast<std::size_t>(head.out_channels));
        for (std::int64_t x = x0; x < x1; ++x) {
            for (int y = 0; y < grid.ny; ++y) {
                for (int z = 0; z < grid.nz; ++z) {
                    const int sx = static_cast<int>(x) / 2;
                    const int sy = y / 2;
                    const int sz = z / 4;
                    for (int oc = 0; oc < head.out_channels; ++oc) {
                        double acc = 0.0;
                        for (int ic = 0; ic < vol.channels; ++ic) {
                            acc += static_cast<double>(vol.at(sx, sy, sz, ic)) *
                                   head.at(oc, ic, 0, 0, 0);
                        }
                        logits[static_cast<std::size_t>(oc)] = acc;
                    }
                    int best = 0;
                    for (int oc = 1; oc < head.out_channels; ++oc) {
                        if (logits[static_cast<std::size_t>(oc)] >
                            logits[static_cast<std::size_t>(best)]) {
                            best = oc; // strict '>' keeps ties on the smaller id
                        }
                    }
                    grid.classes[(static_cast<std::size_t>(x) * grid.ny + y) * grid.nz + z] =
                        static_cast<std::uint8_t>(best);
                }
            }
        }
    });
    return grid;
}

void save_semantic_grid(const SemanticGrid& grid, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot open for writing: " + path);
    }
    const char magic[4] = {'V', 'P', 'O', 'C'};
    out.write(magic, 4);
    auto write_u32 = [&out](std::uint32_t v) {
        unsigned char b[4] = {static_cast<unsigned char>(v & 0xff),
                              static_cast<unsigned char>((v >> 8) & 0xff),
                              static_cast<unsigned char>((v >> 16) & 0xff),
                              static_cast<unsigned char>((v >> 24) & 0xff)};
        out.write(reinterpret_cast<const char*>(b), 4);
    };
    write_u32(static_cast<std::uint32_t>(grid.nx));
    write_u32(static_cast<std::uint32_t>(grid.ny));
    write_u32(static_cast<std::uint32_t>(grid.nz));
    out.write(reinterpret_cast<const char*>(grid.classes.data()),
              static_cast<std::streamsize>(grid.classes.size()));
    if (!out) {
        throw IoError("short write: " + path);
    }
}

SemanticGrid load_semantic_grid(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open grid file: " + path);
    }
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, "VPOC", 4) != 0) {
        throw IoError("bad magic in " + path);
    }
    auto read_u32 = [&in, &path]() {
        unsigned char b[4];
        in.read(reinterpret_cast<char*>(b), 4);
        if (!in) {
            throw IoError("truncated grid file: " + path);
        }
        return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
               (static_cast<std::uint32_t>(b[2]) << 16) |
               (static_cast<std::uint32_t>(b[3]) << 24);
    };
    SemanticGrid grid;
    grid.nx = static_cast<int>(read_u32());
    grid.ny = static_cast<int>(read_u32());
    grid.nz = static_cast<int>(read_u32());
    if (grid.nx <= 0 || grid.ny <= 0 || grid.nz <= 0 ||
        static_cast<std::int64_t>(grid.nx) * grid.ny * grid.nz > (1ll << 31)) {
        throw IoError("implausible grid header in " + path);
    }
    grid.classes.resize(static_cast<std::size_t>(grid.nx) * grid.ny * grid.nz);
    in.read(reinterpret_cast<char*>(grid.classes.data()),
            static_cast<std::streamsize>(grid.classes.size()));
    if (static_cast<std::size_t>(in.gcount()) != grid.classes.size()) {
        throw IoError("truncated grid data in " + path);
    }
    return grid;
}

} // namespace vpocc
