#pragma once

#include "vpocc/geometry.hpp"
#include "vpocc/image.hpp"

#include <utility>

namespace vpocc {

/// Source trapezoids, target rectangles and the two zoom homographies for a
/// vanishing point. src_left/src_right share the vertical edge (s_top,
/// s_bottom); dst_left/dst_right share (t_top, t_bottom) at x = width/2.
struct ZoomGeometry {
    Point2 vp;
    double alpha = 0.0;
    double width = 0.0;
    double height = 0.0;
    Point2 s_top, s_bottom;
    Point2 t_top, t_bottom;
    Quad src_left, src_right;
    Quad dst_left, dst_right;
    Homography h_left, h_right;
};

/// Endpoints of the vertical segment of length alpha*image_height centered
/// at the vanishing point. Requires 0 < alpha < 1.
std::pair<Point2, Point2> shared_vertical_line(const Point2& vp, double image_height,
                                               double alpha);

/// Left and right source trapezoids spanning the image rectangle. Throws
/// VpOutOfBounds when the shared segment exits [0,W]x[0,H].
std::pair<Quad, Quad> source_trapezoids(const Point2& vp, double width, double height,
                                        double alpha);

/// Left and right target rectangles of width W/2 sharing the stretched
/// centered segment (t_top, t_bottom).
std::pair<Quad, Quad> target_rectangles(const Point2& vp, double width, double height,
                                        double alpha);

/// Builds the full geometry including both homographies (vertex residuals
/// below 1e-6 px).
ZoomGeometry build_zoom_geometry(const Point2& vp, double width, double height,
                                 double alpha);

/// Inverse warp: each output pixel center q samples img at h^-1(q) with
/// bilinear interpolation; source coordinates outside [0,W-1]x[0,H-1]
/// yield 0.
ImageBuffer warp_image(const ImageBuffer& img, const Homography& h, int out_width,
                       int out_height, int threads = 1);

/// Composites the zoom image: columns x < W/2 from the left warp, the rest
/// from the right warp (hard seam). Output dims equal input dims.
ImageBuffer synthesize_zoom(const ImageBuffer& img, const ZoomGeometry& geom,
                            int threads = 1);

} // namespace vpocc
