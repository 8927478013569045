#pragma once

#include "vpocc/image.hpp"
#include "vpocc/vpzoomer.hpp"

#include <cstdint>
#include <ostream>
#include <vector>

namespace vpocc {

/// Half-open depth interval (lo, hi] in meters.
struct DepthBand {
    double lo = 0.0;
    double hi = 0.0;
};

/// The depth-wise evaluation split: (0,17], (17,34], (34,51.2].
std::vector<DepthBand> default_bands();

struct DensityReport {
    struct Row {
        DepthBand band;
        std::int64_t count_original = 0;
        std::int64_t count_zoom = 0;
        double ratio = 1.0;
    };
    std::vector<Row> rows;
};

/// Valid-pixel count per band. Bands must be sorted and disjoint.
std::vector<std::int64_t> band_counts(const DepthMap& depth,
                                      const std::vector<DepthBand>& bands);

/// Depth map warped through the zoom geometry with nearest-neighbor
/// sampling (no depth blending); out-of-source samples are invalid.
DepthMap warp_depth_nearest(const DepthMap& depth, const ZoomGeometry& geom);

/// Per-band counts over the nearest-neighbor-warped depth map.
std::vector<std::int64_t> zoom_band_counts(const DepthMap& depth, const ZoomGeometry& geom,
                                           const std::vector<DepthBand>& bands);

/// Ratios zoom/original per band; 0/0 reports 1, n/0 reports +inf.
DensityReport rebalancing_report(const DepthMap& depth, const ZoomGeometry& geom,
                                 const std::vector<DepthBand>& bands);

/// CSV with header `band_lo,band_hi,count_orig,count_zoom,ratio`; reals use
/// 4 decimal places.
void write_density_csv(const DensityReport& report, std::ostream& out);

} // namespace vpocc
