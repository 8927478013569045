#include "vpocc/lifting.hpp"

#include "vpocc/errors.hpp"
#include "vpocc/parallel.hpp"
#include "vpocc/prng.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

namespace vpocc {

void VoxelGridSpec::validate() const {
    if (nx <= 0 || ny <= 0 || nz <= 0) {
        throw DomainError("voxel grid dims must be positive");
    }
    if (!(voxel_size.minCoeff() > 0.0)) {
        throw DomainError("voxel size must be positive");
    }
}

void FeaturePyramid::validate() const {
    for (const auto& level : levels) {
        if (level.width <= 0 || level.height <= 0 ||
            level.channels != levels[0].channels) {
            throw DimensionMismatch("feature pyramid levels are inconsistent");
        }
        if (level.data.size() !=
            static_cast<std::size_t>(level.width) * level.height * level.channels) {
            throw DimensionMismatch("feature level data size mismatch");
        }
    }
}

Eigen::VectorXd VoxelQueryGrid::query(std::size_t row) const {
    Eigen::VectorXd q(channels);
    for (int c = 0; c < channels; ++c) {
        q(c) = queries[row * static_cast<std::size_t>(channels) + static_cast<std::size_t>(c)];
    }
    return q;
}

AttentionWeights AttentionWeights::seeded(int channels, int n_points, std::uint64_t seed) {
    AttentionWeights w;
    w.channels = channels;
    w.n_points = n_points;
    w.seed = seed;
    SplitMix64 rng(seed);
    auto fill = [&rng](Eigen::MatrixXd& m, int rows, int cols) {
        m.resize(rows, cols);
        for (int r = 0; r < rows; ++r) {
            for (int c = 0; c < cols; ++c) {
                m(r, c) = rng.uniform_symmetric(0.1);
            }
        }
    };
    fill(w.query_to_logits, channels, n_points);
    for (auto& proj : w.value_proj) {
        fill(proj, channels, channels);
    }
    fill(w.offset_proj, channels, 2 * n_points);
    return w;
}

VoxelQueryGrid propose_voxel_queries(const DepthMap& depth, const CameraModel& cam,
                                     const VoxelGridSpec& spec, const QueryInit& init) {
    cam.validate();
    spec.validate();
    if (init.channels <= 0) {
        throw DomainError("query channel width must be positive");
    }

    VoxelQueryGrid grid;
    grid.spec = spec;
    grid.channels = init.channels;
    grid.occupancy.assign(static_cast<std::size_t>(spec.count()), 0);

    for (int y = 0; y < depth.height; ++y) {
        for (int x = 0; x < depth.width; ++x) {
            if (!depth.valid(x, y)) {
                continue;
            }
            const Eigen::Vector3d p = back_project(
                cam, Point2{static_cast<double>(x), static_cast<double>(y)}, depth.at(x, y));
            const Eigen::Vector3d rel = p - spec.origin;
            const int i = static_cast<int>(std::floor(rel.x() / spec.voxel_size.x()));
            const int j = static_cast<int>(std::floor(rel.y() / spec.voxel_size.y()));
            const int k = static_cast<int>(std::floor(rel.z() / spec.voxel_size.z()));
            if (i < 0 || i >= spec.nx || j < 0 || j >= spec.ny || k < 0 || k >= spec.nz) {
                continue;
            }
            grid.occupancy[static_cast<std::size_t>(spec.linear_index(i, j, k))] = 1;
        }
    }

    for (std::int64_t idx = 0; idx < spec.count(); ++idx) {
        if (grid.occupancy[static_cast<std::size_t>(idx)]) {
            grid.occupied.push_back(idx);
        }
    }

    grid.queries.resize(grid.occupied.size() * static_cast<std::size_t>(init.channels));
    for (std::size_t row = 0; row < grid.occupied.size(); ++row) {
        SplitMix64 rng(mix_seed(init.seed,
                                static_cast<std::uint64_t>(grid.occupied[row])));
        for (int c = 0; c < init.channels; ++c) {
            grid.queries[row * static_cast<std::size_t>(init.channels) +
                         static_cast<std::size_t>(c)] = rng.uniform_symmetric(0.1);
        }
    }
    return grid;
}

Projection project_voxel_center(const VoxelGridSpec& spec, int i, int j, int k,
                                const CameraModel& cam) {
    if (i < 0 || i >= spec.nx || j < 0 || j >= spec.ny || k < 0 || k >= spec.nz) {
        throw DomainError("project_voxel_center: index outside grid");
    }
    return project_point(cam, spec.center(i, j, k));
}

Eigen::VectorXd bilinear_sample(const FeatureLevel& level, const Point2& p) {
    const double x = std::clamp(p.x, 0.0, static_cast<double>(level.width - 1));
    const double y = std::clamp(p.y, 0.0, static_cast<double>(level.height - 1));
    const int x0 = static_cast<int>(std::floor(x));
    const int y0 = static_cast<int>(std::floor(y));
    const int x1 = std::min(x0 + 1, level.width - 1);
    const int y1 = std::min(y0 + 1, level.height - 1);
    const double fx = x - x0;
    const double fy = y - y0;

    Eigen::VectorXd out(level.channels);
    for (int c = 0; c < level.channels; ++c) {
        const double v00 = level.at(x0, y0, c);
        const double v10 = level.at(x1, y0, c);
        const double v01 = level.at(x0, y1, c);
        const double v11 = level.at(x1, y1, c);
        out(c) = (1.0 - fx) * (1.0 - fy) * v00 + fx * (1.0 - fy) * v10 +
                 (1.0 - fx) * fy * v01 + fx * fy * v11;
    }
    return out;
}

namespace {

Eigen::VectorXd softmax(const Eigen::VectorXd& logits) {
    const double peak = logits.maxCoeff();
    Eigen::VectorXd e = (logits.array() - peak).exp();
    return e / e.sum();
}

AttentionOutput aggregate(const Eigen::VectorXd& query, const FeaturePyramid& pyramid,
                          const AttentionWeights& w, const std::vector<Point2>& points,
                          const std::vector<int>& levels) {
    const int n = static_cast<int>(points.size());
    if (w.query_to_logits.cols() != n) {
        throw DimensionMismatch("attention weights sized for a different point count");
    }
    AttentionOutput out;
    out.points = points;
    out.levels = levels;
    out.weights = softmax(w.query_to_logits.transpose() * query);
    out.features = Eigen::VectorXd::Zero(w.channels);
    for (int i = 0; i < n; ++i) {
        const auto& level = pyramid.levels[static_cast<std::size_t>(levels[static_cast<std::size_t>(i)])];
        const Eigen::VectorXd f = bilinear_sample(level, points[static_cast<std::size_t>(i)]);
        out.features.noalias() +=
            out.weights(i) *
            (w.value_proj[static_cast<std::size_t>(levels[static_cast<std::size_t>(i)])] * f);
    }
    return out;
}

void check_attention_inputs(const Eigen::VectorXd& query, const FeaturePyramid& pyramid,
                            const AttentionWeights& w) {
    pyramid.validate();
    if (query.size() != w.channels || pyramid.channels() != w.channels) {
        throw DimensionMismatch("query / pyramid / weights channel widths differ");
    }
}

} // namespace

AttentionOutput vpca(const Eigen::VectorXd& query, const Point2& r_full,
                     const Point2& vp_full, const FeaturePyramid& pyramid,
                     const AttentionWeights& w, const SamplerConfig& config) {
    check_attention_inputs(query, pyramid, w);
    std::array<LevelDims, 3> dims;
    for (std::size_t l = 0; l < 3; ++l) {
        dims[l] = {pyramid.levels[l].width, pyramid.levels[l].height};
    }
    const auto sets = multi_scale_samples(vp_full, r_full, dims, config);

    std::vector<Point2> points;
    std::vector<int> levels;
    points.reserve(27);
    levels.reserve(27);
    for (const auto& set : sets) {
        for (const auto& p : set.points) {
            points.push_back(p);
            levels.push_back(set.level);
        }
    }
    return aggregate(query, pyramid, w, points, levels);
}

AttentionOutput dca(const Eigen::VectorXd& query, const Point2& r_full,
                    const FeaturePyramid& pyramid, const AttentionWeights& w,
                    int n_points_per_level, double max_offset) {
    check_attention_inputs(query, pyramid, w);
    const int n = 3 * n_points_per_level;
    if (w.offset_proj.cols() != 2 * n) {
        throw DimensionMismatch("offset projection sized for a different point count");
    }

    const Eigen::VectorXd offset_logits = w.offset_proj.transpose() * query;
    std::vector<Point2> points;
    std::vector<int> levels;
    points.reserve(static_cast<std::size_t>(n));
    levels.reserve(static_cast<std::size_t>(n));
    for (int level = 0; level < 3; ++level) {
        const auto& grid = pyramid.levels[static_cast<std::size_t>(level)];
        const double inv_stride =
            1.0 / SamplerConfig::strides[static_cast<std::size_t>(level)];
        const Point2 r = r_full * inv_stride;
        for (int j = 0; j < n_points_per_level; ++j) {
            const int i = level * n_points_per_level + j;
            const double dx = std::tanh(offset_logits(2 * i)) * max_offset;
            const double dy = std::tanh(offset_logits(2 * i + 1)) * max_offset;
            Point2 p{r.x + dx, r.y + dy};
            p.x = std::clamp(p.x, 0.0, static_cast<double>(grid.width - 1));
            p.y = std::clamp(p.y, 0.0, static_cast<double>(grid.height - 1));
            points.push_back(p);
            levels.push_back(level);
        }
    }
    return aggregate(query, pyramid, w, points, levels);
}

FeatureVolume lift_volume(const VoxelQueryGrid& queries, const FeaturePyramid& pyramid,
                          const Point2& vp_full, const CameraModel& cam, int image_width,
                          int image_height, LiftMode mode, const AttentionWeights& w,
                          const SamplerConfig& config, int threads) {
    pyramid.validate();
    if (queries.channels != w.channels || pyramid.channels() != w.channels) {
        throw DimensionMismatch("lift_volume: channel widths differ");
    }
    const VoxelGridSpec& spec = queries.spec;
    FeatureVolume volume = FeatureVolume::zeros(spec.nx, spec.ny, spec.nz, w.channels);

    parallel_for(
        0, static_cast<std::int64_t>(queries.occupied.size()), threads,
        [&](std::int64_t lo, std::int64_t hi) {
            for (std::int64_t row = lo; row < hi; ++row) {
                const std::int64_t linear = queries.occupied[static_cast<std::size_t>(row)];
                const int i = static_cast<int>(linear / (static_cast<std::int64_t>(spec.ny) * spec.nz));
                const int j = static_cast<int>((linear / spec.nz) % spec.ny);
                const int k = static_cast<int>(linear % spec.nz);

                const Projection proj = project_voxel_center(spec, i, j, k, cam);
                if (proj.behind_camera || proj.pixel.x < 0.0 || proj.pixel.y < 0.0 ||
                    proj.pixel.x >= image_width || proj.pixel.y >= image_height) {
                    continue;
                }
                const Eigen::VectorXd q = queries.query(static_cast<std::size_t>(row));
                const AttentionOutput out =
                    mode == LiftMode::vpca
                        ? vpca(q, proj.pixel, vp_full, pyramid, w, config)
                        : dca(q, proj.pixel, pyramid, w);
                for (int c = 0; c < w.channels; ++c) {
                    volume.at(i, j, k, c) = static_cast<float>(out.features(c));
                }
            }
        });
    return volume;
}

namespace {

void write_u32le(std::ofstream& out, std::uint32_t v) {
    unsigned char b[4] = {static_cast<unsigned char>(v & 0xff),
                          static_cast<unsigned char>((v >> 8) & 0xff),
                          static_cast<unsigned char>((v >> 16) & 0xff),
                          static_cast<unsigned char>((v >> 24) & 0xff)};
    out.write(reinterpret_cast<const char*>(b), 4);
}

std::uint32_t read_u32le(std::ifstream& in, const std::string& path) {
    unsigned char b[4];
    in.read(reinterpret_cast<char*>(b), 4);
    if (!in) {
        throw IoError("truncated pyramid file: " + path);
    }
    return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
           (static_cast<std::uint32_t>(b[2]) << 16) |
           (static_cast<std::uint32_t>(b[3]) << 24);
}

} // namespace

void save_feature_pyramid(const FeaturePyramid& pyramid, const std::string& path) {
    pyramid.validate();
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot open for writing: " + path);
    }
    for (const auto& level : pyramid.levels) {
        write_u32le(out, static_cast<std::uint32_t>(level.height));
        write_u32le(out, static_cast<std::uint32_t>(level.width));
        write_u32le(out, static_cast<std::uint32_t>(level.channels));
        out.write(reinterpret_cast<const char*>(level.data.data()),
                  static_cast<std::streamsize>(level.data.size() * sizeof(float)));
    }
    if (!out) {
        throw IoError("short write: " + path);
    }
}

FeaturePyramid load_feature_pyramid(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open pyramid file: " + path);
    }
    FeaturePyramid pyramid;
    for (auto& level : pyramid.levels) {
        level.height = static_cast<int>(read_u32le(in, path));
        level.width = static_cast<int>(read_u32le(in, path));
        level.channels = static_cast<int>(read_u32le(in, path));
        if (level.width <= 0 || level.height <= 0 || level.channels <= 0 ||
            static_cast<std::int64_t>(level.width) * level.height * level.channels >
                (1ll << 31)) {
            throw IoError("implausible pyramid header in " + path);
        }
        level.data.resize(static_cast<std::size_t>(level.width) * level.height *
                          level.channels);
        in.read(reinterpret_cast<char*>(level.data.data()),
                static_cast<std::streamsize>(level.data.size() * sizeof(float)));
        if (static_cast<std::size_t>(in.gcount()) != level.data.size() * sizeof(float)) {
            throw IoError("truncated pyramid data in " + path);
        }
    }
    pyramid.validate();
    return pyramid;
}

} // namespace vpocc
