#pragma once

#include "vpocc/volume.hpp"

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace vpocc {

/// Cubic 3D cross-correlation kernel, size 1 or 3 per axis.
/// w[(((oc * in_channels + ic) * size + kx) * size + ky) * size + kz].
struct ConvKernel3d {
    int out_channels = 0;
    int in_channels = 0;
    int size = 3;
    std::vector<float> w;

    float at(int oc, int ic, int kx, int ky, int kz) const {
        return w[(((static_cast<std::size_t>(oc) * in_channels + ic) * size + kx) * size +
                  ky) *
                     size +
                 kz];
    }
};

/// Three length-3 1D kernels applied along x, then y, then z; each maps C
/// channels to C channels. Tap order per kernel: (oc, ic, {-1, 0, +1}).
struct AnisotropicKernel {
    int channels = 0;
    std::vector<float> kx, ky, kz;

    float tap(const std::vector<float>& k, int oc, int ic, int t) const {
        return k[(static_cast<std::size_t>(oc) * channels + ic) * 3 + t];
    }
};

/// Seeded fusion parameters, entries uniform in [-0.1, 0.1) from one
/// SplitMix64(seed) stream in declaration order (see README).
struct FusionWeights {
    int channels = 0;
    int num_classes = 20;
    std::uint64_t seed = 0;
    ConvKernel3d concat_conv;     // 3x3x3, 2C -> C
    AnisotropicKernel aniso;      // C -> C
    ConvKernel3d mask_head;       // 1x1x1, C -> 2
    ConvKernel3d aggregate_conv;  // 3x3x3, 2C -> C
    ConvKernel3d refine_enc0;     // 3x3x3, C -> C
    ConvKernel3d refine_enc1;     // 3x3x3, C -> C
    ConvKernel3d refine_dec;      // 3x3x3, C -> C
    ConvKernel3d head_conv;       // 1x1x1, C -> num_classes

    static FusionWeights seeded(int channels, int num_classes, std::uint64_t seed);
};

/// Semantic class grid at scene resolution; class 0 = empty. Stored x-major.
struct SemanticGrid {
    int nx = 0;
    int ny = 0;
    int nz = 0;
    std::vector<std::uint8_t> classes;

    std::uint8_t at(int x, int y, int z) const {
        return classes[(static_cast<std::size_t>(x) * ny + y) * nz + z];
    }
};

/// Zero-padded same-size cross-correlation.
FeatureVolume conv3d(const FeatureVolume& vol, const ConvKernel3d& kernel,
                     int threads = 1);

/// Sequential 1D convolutions of length 3 along x, then y, then z.
FeatureVolume anisotropic_conv(const FeatureVolume& vol, const AnisotropicKernel& kernel,
                               int threads = 1);

/// Mask branch: concat -> 3x3x3 conv -> anisotropic conv -> 1x1x1 head ->
/// ReLU. Returns single-channel nonnegative masks (original, zoom).
std::pair<FeatureVolume, FeatureVolume> attention_masks(const FeatureVolume& f_o,
                                                        const FeatureVolume& f_z,
                                                        const FusionWeights& w,
                                                        int threads = 1);

/// Balanced fusion: mask-weighted volumes concatenated, aggregated by a
/// 3x3x3 conv, then refined by a two-level encoder-decoder with an additive
/// skip. Dims and channel width are preserved.
FeatureVolume bfvf(const FeatureVolume& f_o, const FeatureVolume& f_z,
                   const FusionWeights& w, int threads = 1);

/// Nearest-neighbor upsample x2 in X/Y and x4 in Z (128x128x8 ->
/// 256x256x32), 1x1x1 conv to class logits, argmax per voxel with ties
/// broken toward the smaller class id.
SemanticGrid upsample_head(const FeatureVolume& vol, const FusionWeights& w,
                           int threads = 1);

/// Grid file: 16-byte header (magic "VPOC", 3 little-endian u32 dims)
/// followed by nx*ny*nz u8 class ids in x-major order.
void save_semantic_grid(const SemanticGrid& grid, const std::string& path);
SemanticGrid load_semantic_grid(const std::string& path);

} // namespace vpocc
