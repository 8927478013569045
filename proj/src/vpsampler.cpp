#include "vpocc/vpsampler.hpp"

#include "vpocc/errors.hpp"

#include <algorithm>
#include <cmath>

namespace vpocc {

std::array<LevelDims, 3> pyramid_dims_for_image(int width, int height) {
    std::array<LevelDims, 3> dims{};
    for (std::size_t l = 0; l < 3; ++l) {
        const int s = SamplerConfig::strides[l];
        dims[l] = {(width + s - 1) / s, (height + s - 1) / s};
    }
    return dims;
}

double sampling_offset(const Point2& vp, const Point2& r, double c, double beta,
                       double exponent) {
    if (!(c > 0.0) || !(beta > 0.0)) {
        throw DomainError("sampling_offset: c and beta must be positive");
    }
    const double dist = distance(vp, r);
    return std::clamp(c * std::pow(dist, exponent), 0.0, beta);
}

std::array<Point2, 4> initial_grid(const Point2& r, double d) {
    if (d < 0.0) {
        throw DomainError("initial_grid: offset must be nonnegative");
    }
    return {Point2{r.x - d, r.y}, Point2{r.x + d, r.y}, Point2{r.x, r.y - d},
            Point2{r.x, r.y + d}};
}

std::array<Point2, 4> rotate_grid(const std::array<Point2, 4>& grid, const Point2& r,
                                  const Point2& vp) {
    if (distance(vp, r) < 1e-9) {
        throw CoincidentVpRef("rotate_grid: vanishing point coincides with reference");
    }
    const double theta = std::atan2(vp.y - r.y, vp.x - r.x);
    const double ct = std::cos(theta);
    const double st = std::sin(theta);
    std::array<Point2, 4> out{};
    for (std::size_t i = 0; i < 4; ++i) {
        const double dx = grid[i].x - r.x;
        const double dy = grid[i].y - r.y;
        out[i] = {r.x + ct * dx - st * dy, r.y + st * dx + ct * dy};
    }
    return out;
}

std::array<Point2, 4> intersection_grid(const std::array<Point2, 4>& rotated,
                                        const Point2& vp) {
    const Point2& o_l = rotated[0];
    const Point2& o_r = rotated[1];
    const Point2& o_t = rotated[2];
    const Point2& o_b = rotated[3];

    const HomogeneousLine l_t = line_through(vp, o_t);
    const HomogeneousLine l_b = line_through(vp, o_b);
    const Point2 dir = o_t - o_b;
    const HomogeneousLine l_l = line_with_direction(o_l, dir.x, dir.y);
    const HomogeneousLine l_r = line_with_direction(o_r, dir.x, dir.y);

    return {intersect_lines(l_l, l_t), intersect_lines(l_r, l_t),
            intersect_lines(l_l, l_b), intersect_lines(l_r, l_b)};
}

SampleSet sample_points(const Point2& vp, const Point2& r, int level,
                        const SamplerConfig& config) {
    if (level < 0 || level > 2) {
        throw DomainError("sample_points: level must be 0, 1 or 2");
    }
    SampleSet set;
    set.reference = r;
    set.level = level;
    set.scale_c = config.scale_factors[static_cast<std::size_t>(level)];
    set.offset_d = sampling_offset(vp, r, set.scale_c, config.beta, config.exponent);

    // A query at (or numerically at) the vanishing point collapses the whole
    // grid onto it; an offset below construction precision does the same.
    if (distance(vp, r) < 1e-9 || set.offset_d < 1e-9) {
        set.points.fill(r);
        return set;
    }

    const auto rotated = rotate_grid(initial_grid(r, set.offset_d), r, vp);
    const auto corners = intersection_grid(rotated, vp);
    set.points = {rotated[0], rotated[1], rotated[2], rotated[3],
                  corners[0], corners[1], corners[2], corners[3], r};
    return set;
}

std::array<SampleSet, 3> multi_scale_samples(const Point2& vp_full, const Point2& r_full,
                                             const std::array<LevelDims, 3>& dims,
                                             const SamplerConfig& config) {
    std::array<SampleSet, 3> sets;
    for (int level = 0; level < 3; ++level) {
        const double inv_stride = 1.0 / SamplerConfig::strides[static_cast<std::size_t>(level)];
        const Point2 vp = vp_full * inv_stride;
        const Point2 r = r_full * inv_stride;
        SampleSet set = sample_points(vp, r, level, config);
        const LevelDims& d = dims[static_cast<std::size_t>(level)];
        for (auto& p : set.points) {
            p.x = std::clamp(p.x, 0.0, static_cast<double>(d.width - 1));
            p.y = std::clamp(p.y, 0.0, static_cast<double>(d.height - 1));
        }
        set.reference = set.points[8];
        sets[static_cast<std::size_t>(level)] = set;
    }
    return sets;
}

} // namespace vpocc
