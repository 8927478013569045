#pragma once

#include "vpocc/geometry.hpp"
#include "vpocc/image.hpp"

#include <Eigen/Dense>

#include <array>
#include <vector>

namespace vpocc {

/// Synthetic road scene: a camera at `camera_height` above a checkered
/// ground plane looking along +z, with flat-colored boxes resting on the
/// ground. Rendered by per-pixel ray casting, so image and depth agree
/// exactly and the vanishing point of the road direction is analytic.
struct RoadSceneSpec {
    int width = 1226;
    int height = 370;
    double fx = 707.0;
    double fy = 707.0;
    double camera_height = 1.6;
    double max_depth = 80.0;

    struct Box {
        Eigen::Vector3d center;           // world meters (x right, y down, z forward)
        Eigen::Vector3d size;             // full extents
        std::array<float, 3> color{};     // flat RGB in [0,1]
    };
    std::vector<Box> boxes;

    /// Two equal 2 m cubes on the ground at 10 m and 40 m.
    static RoadSceneSpec with_default_boxes();
};

struct RoadScene {
    ImageBuffer image;   // RGB
    DepthMap depth;      // z-depth in meters; sky is invalid
    Point2 vp;           // image of the +z road direction = (cx, cy)
    CameraModel camera;
};

RoadScene generate_road_scene(const RoadSceneSpec& spec = RoadSceneSpec::with_default_boxes());

} // namespace vpocc
