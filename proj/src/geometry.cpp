#include "vpocc/geometry.hpp"

#include "vpocc/errors.hpp"

#include <Eigen/SVD>

#include <cmath>
#include <fstream>
#include <sstream>

namespace vpocc {

namespace {

constexpr double kCoincidentTol = 1e-12;
constexpr double kParallelTol = 1e-12;
constexpr double kInfinityTol = 1e-12;
constexpr double kRankRatioTol = 1e-10;
constexpr double kConditionLimit = 1e12;

bool finite(const Point2& p) { return std::isfinite(p.x) && std::isfinite(p.y); }

// Hartley normalization: centroid to origin, mean distance sqrt(2).
Eigen::Matrix3d normalizing_transform(const std::array<Point2, 4>& pts) {
    double cx = 0.0, cy = 0.0;
    for (const auto& p : pts) {
        cx += p.x;
        cy += p.y;
    }
    cx /= 4.0;
    cy /= 4.0;
    double mean_dist = 0.0;
    for (const auto& p : pts) {
        mean_dist += std::hypot(p.x - cx, p.y - cy);
    }
    mean_dist /= 4.0;
    const double scale = mean_dist > 1e-14 ? std::sqrt(2.0) / mean_dist : 1.0;
    Eigen::Matrix3d t = Eigen::Matrix3d::Identity();
    t(0, 0) = scale;
    t(1, 1) = scale;
    t(0, 2) = -scale * cx;
    t(1, 2) = -scale * cy;
    return t;
}

} // namespace

double Quad::area() const {
    double s = 0.0;
    for (int i = 0; i < 4; ++i) {
        const Point2& a = v[i];
        const Point2& b = v[(i + 1) % 4];
        s += a.x * b.y - b.x * a.y;
    }
    return 0.5 * s;
}

bool is_degenerate(const Quad& q) {
    for (const auto& p : q.v) {
        if (!finite(p)) {
            return true;
        }
    }
    for (int i = 0; i < 4; ++i) {
        const Point2 a = q.v[i];
        const Point2 b = q.v[(i + 1) % 4];
        const Point2 c = q.v[(i + 2) % 4];
        const Point2 ab = b - a;
        const Point2 bc = c - b;
        const double cross = ab.x * bc.y - ab.y * bc.x;
        const double scale = ab.norm() * bc.norm();
        if (scale < 1e-24 || std::abs(cross) <= 1e-12 * scale) {
            return true;
        }
    }
    return false;
}

Eigen::Matrix3d Homography::normalized(const Eigen::Matrix3d& m) {
    if (std::abs(m(2, 2)) > 1e-9) {
        return m / m(2, 2);
    }
    return m / m.norm();
}

void CameraModel::validate() const {
    if (!(fx > 0.0) || !(fy > 0.0)) {
        throw DomainError("camera focal lengths must be positive");
    }
    const Eigen::Matrix3d rtr = rotation.transpose() * rotation;
    if ((rtr - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff() > 1e-6) {
        throw DomainError("camera rotation is not orthonormal");
    }
}

HomogeneousLine line_through(const Point2& p, const Point2& q) {
    if (distance(p, q) < kCoincidentTol) {
        throw CoincidentPoints("line_through: points coincide");
    }
    // (p,1) x (q,1)
    return {p.y - q.y, q.x - p.x, p.x * q.y - p.y * q.x};
}

HomogeneousLine line_with_direction(const Point2& p, double dx, double dy) {
    if (std::hypot(dx, dy) < kCoincidentTol) {
        throw CoincidentPoints("line_with_direction: zero direction");
    }
    return {-dy, dx, dy * p.x - dx * p.y};
}

Point2 intersect_lines(const HomogeneousLine& l1, const HomogeneousLine& l2) {
    const double x = l1.b * l2.c - l1.c * l2.b;
    const double y = l1.c * l2.a - l1.a * l2.c;
    const double w = l1.a * l2.b - l1.b * l2.a;
    const double scale = l1.magnitude() * l2.magnitude();
    if (std::abs(w) < kParallelTol * scale) {
        throw ParallelLines("intersect_lines: lines are parallel");
    }
    return {x / w, y / w};
}

Homography homography_from_quads(const Quad& src, const Quad& dst) {
    if (is_degenerate(src) || is_degenerate(dst)) {
        throw DegenerateQuad("homography_from_quads: degenerate quad");
    }

    const Eigen::Matrix3d t_src = normalizing_transform(src.v);
    const Eigen::Matrix3d t_dst = normalizing_transform(dst.v);

    Eigen::Matrix<double, 8, 9> a;
    for (int i = 0; i < 4; ++i) {
        const Eigen::Vector3d s = t_src * Eigen::Vector3d(src.v[i].x, src.v[i].y, 1.0);
        const Eigen::Vector3d d = t_dst * Eigen::Vector3d(dst.v[i].x, dst.v[i].y, 1.0);
        const double x = s.x() / s.z(), y = s.y() / s.z();
        const double xp = d.x() / d.z(), yp = d.y() / d.z();
        a.row(2 * i) << -x, -y, -1.0, 0.0, 0.0, 0.0, x * xp, y * xp, xp;
        a.row(2 * i + 1) << 0.0, 0.0, 0.0, -x, -y, -1.0, x * yp, y * yp, yp;
    }

    Eigen::JacobiSVD<Eigen::Matrix<double, 8, 9>> svd(a, Eigen::ComputeFullV);
    const auto& sigma = svd.singularValues();
    if (sigma(7) < kRankRatioTol * sigma(0)) {
        throw DegenerateQuad("homography_from_quads: rank-deficient correspondence");
    }

    const Eigen::Matrix<double, 9, 1> h = svd.matrixV().col(8);
    Eigen::Matrix3d hn;
    hn << h(0), h(1), h(2), h(3), h(4), h(5), h(6), h(7), h(8);
    return Homography(t_dst.inverse() * hn * t_src);
}

Point2 apply_homography(const Homography& h, const Point2& p) {
    const Eigen::Vector3d q = h.matrix() * Eigen::Vector3d(p.x, p.y, 1.0);
    if (std::abs(q.z()) < kInfinityTol) {
        throw PointAtInfinity("apply_homography: mapped point at infinity");
    }
    return {q.x() / q.z(), q.y() / q.z()};
}

Homography invert_homography(const Homography& h) {
    const Eigen::Vector3d sigma = h.matrix().jacobiSvd().singularValues();
    if (sigma(2) <= 0.0 || sigma(0) / sigma(2) > kConditionLimit) {
        throw NearSingular("invert_homography: condition number too large");
    }
    return Homography(h.matrix().inverse());
}

double magnification(const Homography& h, const Point2& p) {
    const Eigen::Matrix3d& m = h.matrix();
    const double w = m(2, 0) * p.x + m(2, 1) * p.y + m(2, 2);
    const double xn = m(0, 0) * p.x + m(0, 1) * p.y + m(0, 2);
    const double yn = m(1, 0) * p.x + m(1, 1) * p.y + m(1, 2);
    const double j00 = m(0, 0) * w - m(2, 0) * xn;
    const double j01 = m(0, 1) * w - m(2, 1) * xn;
    const double j10 = m(1, 0) * w - m(2, 0) * yn;
    const double j11 = m(1, 1) * w - m(2, 1) * yn;
    return std::abs(j00 * j11 - j01 * j10) / (w * w * w * w);
}

Eigen::Vector3d back_project(const CameraModel& cam, const Point2& pixel, double depth_m) {
    if (!(depth_m > 0.0)) {
        throw NonPositiveDepth("back_project: depth must be positive");
    }
    const Eigen::Vector3d p_cam((pixel.x - cam.cx) * depth_m / cam.fx,
                                (pixel.y - cam.cy) * depth_m / cam.fy, depth_m);
    return cam.rotation.transpose() * (p_cam - cam.translation);
}

Projection project_point(const CameraModel& cam, const Eigen::Vector3d& world) {
    const Eigen::Vector3d p = cam.rotation * world + cam.translation;
    if (p.z() <= 0.0) {
        return {Point2{0.0, 0.0}, true};
    }
    return {Point2{cam.fx * p.x() / p.z() + cam.cx, cam.fy * p.y() / p.z() + cam.cy}, false};
}

CameraModel load_kitti_intrinsics(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open calibration file: " + path);
    }
    std::string line;
    while (std::getline(in, line)) {
        std::istringstream ls(line);
        std::string tag;
        ls >> tag;
        if (tag != "P2:") {
            continue;
        }
        std::array<double, 12> p{};
        for (double& value : p) {
            if (!(ls >> value)) {
                throw IoError("malformed P2 line in " + path);
            }
        }
        CameraModel cam;
        cam.fx = p[0];
        cam.fy = p[5];
        cam.cx = p[2];
        cam.cy = p[6];
        return cam;
    }
    throw IoError("no P2 line in " + path);
}

} // namespace vpocc
