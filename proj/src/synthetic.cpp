#include "vpocc/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace vpocc {

namespace {

// Slab test: nearest positive ray parameter hitting the box, or +inf.
double ray_box_hit(const Eigen::Vector3d& dir, const Eigen::Vector3d& lo,
                   const Eigen::Vector3d& hi) {
    double t_near = 0.0;
    double t_far = std::numeric_limits<double>::infinity();
    for (int a = 0; a < 3; ++a) {
        if (std::abs(dir(a)) < 1e-12) {
            if (0.0 < lo(a) || 0.0 > hi(a)) {
                return std::numeric_limits<double>::infinity();
            }
            continue;
        }
        double t0 = lo(a) / dir(a);
        double t1 = hi(a) / dir(a);
        if (t0 > t1) {
            std::swap(t0, t1);
        }
        t_near = std::max(t_near, t0);
        t_far = std::min(t_far, t1);
        if (t_near > t_far) {
            return std::numeric_limits<double>::infinity();
        }
    }
    return t_near > 0.0 ? t_near : std::numeric_limits<double>::infinity();
}

} // namespace

RoadSceneSpec RoadSceneSpec::with_default_boxes() {
    RoadSceneSpec spec;
    spec.boxes = {
        {{-3.0, 0.6, 10.0}, {2.0, 2.0, 2.0}, {0.85f, 0.25f, 0.25f}},
        {{3.0, 0.6, 40.0}, {2.0, 2.0, 2.0}, {0.25f, 0.35f, 0.85f}},
    };
    return spec;
}

RoadScene generate_road_scene(const RoadSceneSpec& spec) {
    RoadScene scene;
    scene.camera.fx = spec.fx;
    scene.camera.fy = spec.fy;
    scene.camera.cx = spec.width / 2.0;
    scene.camera.cy = spec.height / 2.0;
    scene.vp = {scene.camera.cx, scene.camera.cy};

    scene.image = ImageBuffer::zeros(spec.width, spec.height, 3);
    scene.depth = DepthMap::zeros(spec.width, spec.height);

    for (int v = 0; v < spec.height; ++v) {
        for (int u = 0; u < spec.width; ++u) {
            const Eigen::Vector3d dir((u - scene.camera.cx) / spec.fx,
                                      (v - scene.camera.cy) / spec.fy, 1.0);

            double best_t = std::numeric_limits<double>::infinity();
            int hit_box = -1;
            // Ground plane y = camera_height (y points down).
            if (dir.y() > 1e-9) {
                const double t = spec.camera_height / dir.y();
                if (t * dir.z() <= spec.max_depth) {
                    best_t = t;
                }
            }
            for (std::size_t b = 0; b < spec.boxes.size(); ++b) {
                const auto& box = spec.boxes[b];
                const double t = ray_box_hit(dir, box.center - box.size / 2.0,
                                             box.center + box.size / 2.0);
                if (t < best_t) {
                    best_t = t;
                    hit_box = static_cast<int>(b);
                }
            }

            float r = 0.55f, g = 0.65f, bl = 0.75f; // sky
            if (std::isfinite(best_t)) {
                const Eigen::Vector3d hit = best_t * dir;
                scene.depth.at(u, v) = static_cast<float>(hit.z());
                if (hit_box >= 0) {
                    const auto& c = spec.boxes[static_cast<std::size_t>(hit_box)].color;
                    r = c[0];
                    g = c[1];
                    bl = c[2];
                } else {
                    // 1 m checker texture; a darker asphalt band marks the road.
                    const bool checker =
                        (static_cast<long long>(std::floor(hit.x())) +
                         static_cast<long long>(std::floor(hit.z()))) % 2 == 0;
                    if (std::abs(hit.x()) < 4.0) {
                        const float base = checker ? 0.30f : 0.36f;
                        r = g = bl = base;
                    } else {
                        r = checker ? 0.25f : 0.32f;
                        g = checker ? 0.55f : 0.62f;
                        bl = checker ? 0.25f : 0.30f;
                    }
                }
            }
            scene.image.at(u, v, 0) = r;
            scene.image.at(u, v, 1) = g;
            scene.image.at(u, v, 2) = bl;
        }
    }
    return scene;
}

} // namespace vpocc
