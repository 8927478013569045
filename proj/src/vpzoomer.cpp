#include "vpocc/vpzoomer.hpp"

#include "vpocc/errors.hpp"
#include "vpocc/parallel.hpp"

#include <cmath>

namespace vpocc {

namespace {

void check_alpha(double alpha) {
    if (!(alpha > 0.0) || !(alpha < 1.0)) {
        throw DomainError("alpha must lie in (0, 1)");
    }
}

// Bilinear sample with zero outside [0, W-1] x [0, H-1].
double sample_bilinear(const ImageBuffer& img, double x, double y, int c) {
    if (x < 0.0 || y < 0.0 || x > img.width - 1.0 || y > img.height - 1.0) {
        return 0.0;
    }
    const int x0 = static_cast<int>(std::floor(x));
    const int y0 = static_cast<int>(std::floor(y));
    const double fx = x - x0;
    const double fy = y - y0;
    double acc = (1.0 - fx) * (1.0 - fy) * img.at(x0, y0, c);
    if (fx > 0.0) {
        acc += fx * (1.0 - fy) * img.at(x0 + 1, y0, c);
    }
    if (fy > 0.0) {
        acc += (1.0 - fx) * fy * img.at(x0, y0 + 1, c);
    }
    if (fx > 0.0 && fy > 0.0) {
        acc += fx * fy * img.at(x0 + 1, y0 + 1, c);
    }
    return acc;
}

} // namespace

std::pair<Point2, Point2> shared_vertical_line(const Point2& vp, double image_height,
                                               double alpha) {
    check_alpha(alpha);
    const double half = alpha * image_height / 2.0;
    return {Point2{vp.x, vp.y - half}, Point2{vp.x, vp.y + half}};
}

std::pair<Quad, Quad> source_trapezoids(const Point2& vp, double width, double height,
                                        double alpha) {
    const auto [s_top, s_bottom] = shared_vertical_line(vp, height, alpha);
    if (s_top.x < 0.0 || s_top.x > width || s_top.y < 0.0 || s_bottom.y > height) {
        throw VpOutOfBounds("shared segment exits the image");
    }
    Quad left{{Point2{0.0, 0.0}, s_top, s_bottom, Point2{0.0, height}}};
    Quad right{{s_top, Point2{width, 0.0}, Point2{width, height}, s_bottom}};
    return {left, right};
}

std::pair<Quad, Quad> target_rectangles(const Point2& vp, double width, double height,
                                        double alpha) {
    const auto [s_top, s_bottom] = shared_vertical_line(vp, height, alpha);
    const Point2 t_top{width / 2.0, s_top.y / 2.0};
    const Point2 t_bottom{width / 2.0, (height + s_bottom.y) / 2.0};
    Quad left{{Point2{0.0, t_top.y}, t_top, t_bottom, Point2{0.0, t_bottom.y}}};
    Quad right{{t_top, Point2{width, t_top.y}, Point2{width, t_bottom.y}, t_bottom}};
    return {left, right};
}

ZoomGeometry build_zoom_geometry(const Point2& vp, double width, double height,
                                 double alpha) {
    ZoomGeometry g;
    g.vp = vp;
    g.alpha = alpha;
    g.width = width;
    g.height = height;
    std::tie(g.s_top, g.s_bottom) = shared_vertical_line(vp, height, alpha);
    std::tie(g.src_left, g.src_right) = source_trapezoids(vp, width, height, alpha);
    std::tie(g.dst_left, g.dst_right) = target_rectangles(vp, width, height, alpha);
    g.t_top = g.dst_left.v[1];
    g.t_bottom = g.dst_left.v[2];
    g.h_left = homography_from_quads(g.src_left, g.dst_left);
    g.h_right = homography_from_quads(g.src_right, g.dst_right);
    return g;
}

ImageBuffer warp_image(const ImageBuffer& img, const Homography& h, int out_width,
                       int out_height, int threads) {
    if (img.size() == 0) {
        throw DimensionMismatch("warp_image: empty input");
    }
    const Homography inv = invert_homography(h);
    const Eigen::Matrix3d m = inv.matrix();
    ImageBuffer out = ImageBuffer::zeros(out_width, out_height, img.channels);
    parallel_for(0, out_height, threads, [&](std::int64_t y0, std::int64_t y1) {
        for (std::int64_t y = y0; y < y1; ++y) {
            for (int x = 0; x < out_width; ++x) {
                const double w = m(2, 0) * x + m(2, 1) * y + m(2, 2);
                if (std::abs(w) < 1e-12) {
                    continue;
                }
                const double sx = (m(0, 0) * x + m(0, 1) * y + m(0, 2)) / w;
                const double sy = (m(1, 0) * x + m(1, 1) * y + m(1, 2)) / w;
                for (int c = 0; c < img.channels; ++c) {
                    out.at(x, static_cast<int>(y), c) =
                        static_cast<float>(sample_bilinear(img, sx, sy, c));
                }
            }
        }
    });
    return out;
}

ImageBuffer synthesize_zoom(const ImageBuffer& img, const ZoomGeometry& geom,
                            int threads) {
    if (img.width != static_cast<int>(geom.width) ||
        img.height != static_cast<int>(geom.height)) {
        throw DimensionMismatch("synthesize_zoom: image does not match geometry dims");
    }
    const Eigen::Matrix3d inv_l = invert_homography(geom.h_left).matrix();
    const Eigen::Matrix3d inv_r = invert_homography(geom.h_right).matrix();
    const double seam = geom.width / 2.0;
    ImageBuffer out = ImageBuffer::zeros(img.width, img.height, img.channels);
    parallel_for(0, img.height, threads, [&](std::int64_t y0, std::int64_t y1) {
        for (std::int64_t y = y0; y < y1; ++y) {
            for (int x = 0; x < img.width; ++x) {
                const Eigen::Matrix3d& m = (x < seam) ? inv_l : inv_r;
                const double w = m(2, 0) * x + m(2, 1) * y + m(2, 2);
                if (std::abs(w) < 1e-12) {
                    continue;
                }
                const double sx = (m(0, 0) * x + m(0, 1) * y + m(0, 2)) / w;
                const double sy = (m(1, 0) * x + m(1, 1) * y + m(1, 2)) / w;
                for (int c = 0; c < img.channels; ++c) {
                    out.at(x, static_cast<int>(y), c) =
                        static_cast<float>(sample_bilinear(img, sx, sy, c));
                }
            }
        }
    });
    return out;
}

} // namespace vpocc
