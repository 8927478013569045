#include "vpocc/density.hpp"

#include "vpocc/errors.hpp"

#include <cmath>
#include <iomanip>
#include <limits>

namespace vpocc {

std::vector<DepthBand> default_bands() {
    return {{0.0, 17.0}, {17.0, 34.0}, {34.0, 51.2}};
}

namespace {

void check_bands(const std::vector<DepthBand>& bands) {
    double prev_hi = -std::numeric_limits<double>::infinity();
    for (const auto& b : bands) {
        if (!(b.lo < b.hi) || b.lo < prev_hi) {
            throw DomainError("bands must be sorted and disjoint");
        }
        prev_hi = b.hi;
    }
}

std::vector<std::int64_t> counts_over(const DepthMap& depth,
                                      const std::vector<DepthBand>& bands) {
    std::vector<std::int64_t> counts(bands.size(), 0);
    for (int y = 0; y < depth.height; ++y) {
        for (int x = 0; x < depth.width; ++x) {
            if (!depth.valid(x, y)) {
                continue;
            }
            const double d = depth.at(x, y);
            for (std::size_t b = 0; b < bands.size(); ++b) {
                if (d > bands[b].lo && d <= bands[b].hi) {
                    ++counts[b];
                    break;
                }
            }
        }
    }
    return counts;
}

} // namespace

std::vector<std::int64_t> band_counts(const DepthMap& depth,
                                      const std::vector<DepthBand>& bands) {
    check_bands(bands);
    return counts_over(depth, bands);
}

DepthMap warp_depth_nearest(const DepthMap& depth, const ZoomGeometry& geom) {
    if (depth.width != static_cast<int>(geom.width) ||
        depth.height != static_cast<int>(geom.height)) {
        throw DimensionMismatch("warp_depth_nearest: depth does not match geometry dims");
    }
    const Eigen::Matrix3d inv_l = invert_homography(geom.h_left).matrix();
    const Eigen::Matrix3d inv_r = invert_homography(geom.h_right).matrix();
    const double seam = geom.width / 2.0;

    DepthMap out = DepthMap::zeros(depth.width, depth.height);
    for (int y = 0; y < depth.height; ++y) {
        for (int x = 0; x < depth.width; ++x) {
            const Eigen::Matrix3d& m = (x < seam) ? inv_l : inv_r;
            const double w = m(2, 0) * x + m(2, 1) * y + m(2, 2);
            if (std::abs(w) < 1e-12) {
                continue;
            }
            const double sx = (m(0, 0) * x + m(0, 1) * y + m(0, 2)) / w;
            const double sy = (m(1, 0) * x + m(1, 1) * y + m(1, 2)) / w;
            const int ix = static_cast<int>(std::lround(sx));
            const int iy = static_cast<int>(std::lround(sy));
            if (ix < 0 || iy < 0 || ix >= depth.width || iy >= depth.height) {
                continue;
            }
            out.at(x, y) = depth.at(ix, iy);
        }
    }
    return out;
}

std::vector<std::int64_t> zoom_band_counts(const DepthMap& depth, const ZoomGeometry& geom,
                                           const std::vector<DepthBand>& bands) {
    check_bands(bands);
    return counts_over(warp_depth_nearest(depth, geom), bands);
}

DensityReport rebalancing_report(const DepthMap& depth, const ZoomGeometry& geom,
                                 const std::vector<DepthBand>& bands) {
    const auto orig = band_counts(depth, bands);
    const auto zoom = zoom_band_counts(depth, geom, bands);

    DensityReport report;
    report.rows.reserve(bands.size());
    for (std::size_t b = 0; b < bands.size(); ++b) {
        DensityReport::Row row;
        row.band = bands[b];
        row.count_original = orig[b];
        row.count_zoom = zoom[b];
        if (orig[b] > 0) {
            row.ratio = static_cast<double>(zoom[b]) / static_cast<double>(orig[b]);
        } else {
            row.ratio = zoom[b] > 0 ? std::numeric_limits<double>::infinity() : 1.0;
        }
        report.rows.push_back(row);
    }
    return report;
}

void write_density_csv(const DensityReport& report, std::ostream& out) {
    out << "band_lo,band_hi,count_orig,count_zoom,ratio\n";
    out << std::fixed << std::setprecision(4);
    for (const auto& row : report.rows) {
        out << row.band.lo << ',' << row.band.hi << ',' << row.count_original << ','
            << row.count_zoom << ',';
        if (std::isinf(row.ratio)) {
            out << "inf";
        } else {
            out << row.ratio;
        }
        out << '\n';
    }
}

} // namespace vpocc
