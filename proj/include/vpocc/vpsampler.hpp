#pragma once

#include "vpocc/geometry.hpp"

#include <array>

namespace vpocc {

/// Offset bound, distance exponent and per-level scale factors for the
/// vanishing-point-guided sampling grid. Pyramid strides are fixed to
/// {4, 8, 16}.
struct SamplerConfig {
    double beta = 30.0;
    double exponent = 2.0;
    std::array<double, 3> scale_factors{1.0, 1.5, 2.0};

    static constexpr std::array<int, 3> strides{4, 8, 16};
};

/// Nine sampling points for one reference point at one pyramid level, in
/// feature-map coordinates. Point order: rotated cross (left, right, top,
/// bottom), trapezoid corners (tl, tr, bl, br), reference.
struct SampleSet {
    Point2 reference;
    int level = 0;
    double scale_c = 1.0;
    double offset_d = 0.0;
    std::array<Point2, 9> points{};
};

struct LevelDims {
    int width = 0;
    int height = 0;
};

/// Feature-map dims at strides {4,8,16} using ceil division of the full
/// image dims.
std::array<LevelDims, 3> pyramid_dims_for_image(int width, int height);

/// Sampling offset d = clamp(c * |v - r|^exponent, 0, beta).
double sampling_offset(const Point2& vp, const Point2& r, double c, double beta,
                       double exponent = 2.0);

/// Axis-aligned cross around r: {left, right, top, bottom} at distance d.
std::array<Point2, 4> initial_grid(const Point2& r, double d);

/// Rotates the cross about r by theta = atan2(v_y - r_y, v_x - r_x) so the
/// right arm points toward the vanishing point. Throws CoincidentVpRef when
/// |v - r| < 1e-9.
std::array<Point2, 4> rotate_grid(const std::array<Point2, 4>& grid, const Point2& r,
                                  const Point2& vp);

/// Trapezoid corners toward the vanishing point: intersections of the two
/// rays (v, o_t), (v, o_b) with the two lines through o_l / o_r parallel to
/// o_t - o_b. Input order {left, right, top, bottom}; output {tl, tr, bl, br}.
std::array<Point2, 4> intersection_grid(const std::array<Point2, 4>& rotated,
                                        const Point2& vp);

/// Full nine-point set for one level; vp and r are in that level's
/// feature-map coordinates. A reference at the vanishing point collapses all
/// nine points onto r.
SampleSet sample_points(const Point2& vp, const Point2& r, int level,
                        const SamplerConfig& config = {});

/// Nine points per level at strides {4,8,16}; vp/r given in full-image
/// pixels are rescaled by 1/stride, and every point is clamped into
/// [0, w-1] x [0, h-1] of its level.
std::array<SampleSet, 3> multi_scale_samples(const Point2& vp_full, const Point2& r_full,
                                             const std::array<LevelDims, 3>& dims,
                                             const SamplerConfig& config = {});

} // namespace vpocc
