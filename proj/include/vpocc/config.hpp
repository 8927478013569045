#pragma once

#include "vpocc/lifting.hpp"
#include "vpocc/vpsampler.hpp"

#include <array>
#include <cstdint>
#include <string>

namespace vpocc {

/// Pipeline defaults: zoom level 0.2, offset bound 30, per-level scale
/// factors {1, 1.5, 2}, squared-distance offset, seed 42, 32 channels,
/// 128x128x8 grid of 0.4x0.4x0.8 m voxels, 20 classes.
struct RunConfig {
    double alpha = 0.2;
    double beta = 30.0;
    std::array<double, 3> scale_factors{1.0, 1.5, 2.0};
    double offset_exponent = 2.0;
    std::uint64_t seed = 42;
    int channels = 32;
    VoxelGridSpec grid;
    int num_classes = 20;
    int threads = 1;

    SamplerConfig sampler() const {
        SamplerConfig s;
        s.beta = beta;
        s.exponent = offset_exponent;
        s.scale_factors = scale_factors;
        return s;
    }
};

/// Reads plain `key=value` lines over `base`; '#' starts a comment. Unknown
/// keys or unparsable values raise IoError. Recognized keys: alpha, beta,
/// scale_factors (3 comma-separated), offset_exponent, seed, channels,
/// num_classes, threads, grid_dims (3), voxel_size (3), grid_origin (3).
RunConfig load_config_file(const std::string& path, RunConfig base = {});

} // namespace vpocc
