#pragma once

#include "vpocc/geometry.hpp"
#include "vpocc/image.hpp"
#include "vpocc/volume.hpp"
#include "vpocc/vpsampler.hpp"

#include <Eigen/Dense>

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace vpocc {

/// Axis-aligned voxel grid in world meters. Voxel (i,j,k) covers
/// [origin + idx*size, origin + (idx+1)*size) per axis (half-open).
struct VoxelGridSpec {
    int nx = 128;
    int ny = 128;
    int nz = 8;
    Eigen::Vector3d origin{0.0, -25.6, -2.0};
    Eigen::Vector3d voxel_size{0.4, 0.4, 0.8};

    std::int64_t count() const { return static_cast<std::int64_t>(nx) * ny * nz; }
    std::int64_t linear_index(int i, int j, int k) const {
        return (static_cast<std::int64_t>(i) * ny + j) * nz + k;
    }
    Eigen::Vector3d center(int i, int j, int k) const {
        return origin + Eigen::Vector3d((i + 0.5) * voxel_size.x(),
                                        (j + 0.5) * voxel_size.y(),
                                        (k + 0.5) * voxel_size.z());
    }
    void validate() const;
};

/// Seeded source for initial voxel query features: channel values uniform in
/// [-0.1, 0.1) drawn from SplitMix64(mix_seed(seed, voxel_linear_index)).
struct QueryInit {
    int channels = 32;
    std::uint64_t seed = 42;
};

/// Depth-proposed voxel queries. `occupied` holds sorted linear voxel
/// indices; `queries` stores one row of `channels` features per occupied
/// voxel in the same order.
struct VoxelQueryGrid {
    VoxelGridSpec spec;
    int channels = 0;
    std::vector<std::uint8_t> occupancy;
    std::vector<std::int64_t> occupied;
    std::vector<double> queries;

    bool empty_proposal() const { return occupied.empty(); }
    Eigen::VectorXd query(std::size_t row) const;
};

/// One pyramid level: row-major (y * width + x) * channels + c.
struct FeatureLevel {
    int width = 0;
    int height = 0;
    int channels = 0;
    std::vector<float> data;

    float at(int x, int y, int c) const {
        return data[(static_cast<std::size_t>(y) * width + x) * channels + c];
    }
};

/// Three levels at strides {4, 8, 16}; equal channel width across levels.
struct FeaturePyramid {
    std::array<FeatureLevel, 3> levels;

    int channels() const { return levels[0].channels; }
    void validate() const;
};

/// Seeded cross-attention parameters. Entries uniform in [-0.1, 0.1) from a
/// single SplitMix64(seed) stream filled in order: query_to_logits
/// (row-major), value_proj[0..2], offset_proj (row-major; columns 2i, 2i+1
/// hold the x/y offset logits of point i).
struct AttentionWeights {
    int channels = 0;
    int n_points = 0;
    std::uint64_t seed = 0;
    Eigen::MatrixXd query_to_logits;            // C x N
    std::array<Eigen::MatrixXd, 3> value_proj;  // C x C each
    Eigen::MatrixXd offset_proj;                // C x 2N

    static AttentionWeights seeded(int channels, int n_points, std::uint64_t seed);
};

/// Attention result for one query: aggregated features plus the softmax
/// weights and sampled locations that produced them.
struct AttentionOutput {
    Eigen::VectorXd features;     // C
    Eigen::VectorXd weights;      // N, sums to 1
    std::vector<Point2> points;   // N, level coordinates
    std::vector<int> levels;      // N
};

enum class LiftMode { vpca, dca };

/// Back-projects every valid depth pixel and marks a voxel occupied iff at
/// least one point falls inside its half-open bounds. Occupied voxels get
/// seeded initial query features. Zero occupancy is a signal
/// (empty_proposal()), not an error.
VoxelQueryGrid propose_voxel_queries(const DepthMap& depth, const CameraModel& cam,
                                     const VoxelGridSpec& spec, const QueryInit& init);

/// Projects the center of voxel (i,j,k) through the camera. Centers with
/// camera-frame z <= 0 come back flagged behind_camera.
Projection project_voxel_center(const VoxelGridSpec& spec, int i, int j, int k,
                                const CameraModel& cam);

/// Bilinear blend of the four neighbors per channel; p is clamped into
/// [0, w-1] x [0, h-1] first.
Eigen::VectorXd bilinear_sample(const FeatureLevel& level, const Point2& p);

/// Vanishing-point-guided cross-attention: softmax attention over the 27
/// geometric sample points (9 per level) of the original-image pyramid.
AttentionOutput vpca(const Eigen::VectorXd& query, const Point2& r_full,
                     const Point2& vp_full, const FeaturePyramid& pyramid,
                     const AttentionWeights& w, const SamplerConfig& config = {});

/// Deformable cross-attention: per-level learned offsets
/// tanh(query . offset_proj) * max_offset around the reference point,
/// softmax attention over all sampled points of the zoom-image pyramid.
AttentionOutput dca(const Eigen::VectorXd& query, const Point2& r_full,
                    const FeaturePyramid& pyramid, const AttentionWeights& w,
                    int n_points_per_level = 9, double max_offset = 4.0);

/// Lifts 2D pyramid features into a voxel feature volume: occupied in-view
/// voxels hold attention outputs, everything else stays zero.
FeatureVolume lift_volume(const VoxelQueryGrid& queries, const FeaturePyramid& pyramid,
                          const Point2& vp_full, const CameraModel& cam, int image_width,
                          int image_height, LiftMode mode, const AttentionWeights& w,
                          const SamplerConfig& config = {}, int threads = 1);

/// Pyramid file: for each of the 3 levels, header (h, w, C) as 3
/// little-endian u32 followed by f32 samples row-major.
void save_feature_pyramid(const FeaturePyramid& pyramid, const std::string& path);
FeaturePyramid load_feature_pyramid(const std::string& path);

} // namespace vpocc
