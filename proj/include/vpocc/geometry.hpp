#pragma once

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <string>

namespace vpocc {

/// 2D point in continuous pixel coordinates (+x right, +y down).
struct Point2 {
    double x = 0.0;
    double y = 0.0;

    Point2 operator+(const Point2& o) const { return {x + o.x, y + o.y}; }
    Point2 operator-(const Point2& o) const { return {x - o.x, y - o.y}; }
    Point2 operator*(double s) const { return {x * s, y * s}; }
    double norm() const { return std::hypot(x, y); }
};

inline double distance(const Point2& a, const Point2& b) { return (a - b).norm(); }

/// Homogeneous line ax + by + c = 0. Comparisons are scale-invariant.
struct HomogeneousLine {
    double a = 0.0;
    double b = 0.0;
    double c = 0.0;

    double eval(const Point2& p) const { return a * p.x + b * p.y + c; }
    double magnitude() const { return std::max({std::abs(a), std::abs(b), std::abs(c)}); }
};

/// Planar quadrilateral, vertices ordered (top-left, top-right,
/// bottom-right, bottom-left).
struct Quad {
    std::array<Point2, 4> v{};

    /// Signed shoelace area (positive for the vertex order above with +y down).
    double area() const;
};

/// True if any three consecutive vertices are collinear or any are non-finite.
bool is_degenerate(const Quad& q);

/// Invertible 3x3 projective map. Stored normalized: bottom-right entry 1
/// when it is nonzero (|h33| > 1e-9), otherwise unit Frobenius norm.
class Homography {
public:
    Homography() : m_(Eigen::Matrix3d::Identity()) {}
    explicit Homography(const Eigen::Matrix3d& m) : m_(normalized(m)) {}

    const Eigen::Matrix3d& matrix() const { return m_; }
    double operator()(int r, int c) const { return m_(r, c); }

    static Eigen::Matrix3d normalized(const Eigen::Matrix3d& m);

private:
    Eigen::Matrix3d m_;
};

/// Pinhole camera. `rotation`/`translation` map world to camera:
/// p_cam = R * p_world + t.
struct CameraModel {
    double fx = 1.0;
    double fy = 1.0;
    double cx = 0.0;
    double cy = 0.0;
    Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
    Eigen::Vector3d translation = Eigen::Vector3d::Zero();

    /// Throws DomainError if fx/fy are not positive or the rotation is not
    /// orthonormal within 1e-6.
    void validate() const;
};

/// Result of projecting a 3D world point through a camera. When
/// `behind_camera` is set the pixel is meaningless.
struct Projection {
    Point2 pixel;
    bool behind_camera = false;
};

/// Line through two distinct points (homogeneous cross product).
/// Throws CoincidentPoints when the points are closer than 1e-12.
HomogeneousLine line_through(const Point2& p, const Point2& q);

/// Line through p with direction (dx, dy).
HomogeneousLine line_with_direction(const Point2& p, double dx, double dy);

/// Intersection of two lines. Throws ParallelLines when the homogeneous
/// meet has a vanishing third coordinate relative to the line magnitudes.
Point2 intersect_lines(const HomogeneousLine& l1, const HomogeneousLine& l2);

/// Estimates the homography mapping src vertices onto dst vertices with a
/// normalized DLT solved by SVD. Throws DegenerateQuad when either quad is
/// degenerate or the 8x9 system is rank-deficient beyond one null direction
/// (singular-value ratio below 1e-10).
Homography homography_from_quads(const Quad& src, const Quad& dst);

/// Projective application (x', y', w') = M (x, y, 1), returns (x'/w', y'/w').
/// Throws PointAtInfinity when |w'| < 1e-12.
Point2 apply_homography(const Homography& h, const Point2& p);

/// Matrix inverse, renormalized. Throws NearSingular when the condition
/// number exceeds 1e12.
Homography invert_homography(const Homography& h);

/// |det J| of the projective map at p; the local area magnification factor.
double magnification(const Homography& h, const Point2& p);

/// Back-projects a pixel at the given depth to a world point:
/// camera point ((u-cx)d/fx, (v-cy)d/fy, d), then world = R^T (p - t).
/// Throws NonPositiveDepth when depth <= 0.
Eigen::Vector3d back_project(const CameraModel& cam, const Point2& pixel, double depth_m);

/// Projects a world point to pixel coordinates. Points with camera-frame
/// z <= 0 are flagged behind_camera rather than raising an error.
Projection project_point(const CameraModel& cam, const Eigen::Vector3d& world);

/// Parses a KITTI calibration file: the line starting with "P2:" carries 12
/// whitespace-separated reals (row-major 3x4). Intrinsics are taken as
/// fx = P[0,0], fy = P[1,1], cx = P[0,2], cy = P[1,2]; extrinsics identity.
/// Throws IoError on missing file or malformed line.
CameraModel load_kitti_intrinsics(const std::string& path);

} // namespace vpocc
