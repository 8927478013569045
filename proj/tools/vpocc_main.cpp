#include "vpocc/config.hpp"
#include "vpocc/density.hpp"
#include "vpocc/errors.hpp"
#include "vpocc/fusion.hpp"
#include "vpocc/geometry.hpp"
#include "vpocc/lifting.hpp"
#include "vpocc/synthetic.hpp"
#include "vpocc/vpsampler.hpp"
#include "vpocc/vpzoomer.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

namespace {

constexpr int kExitOk = 0;
constexpr int kExitIo = 2;
constexpr int kExitDomain = 3;

vpocc::Point2 parse_point(const std::string& text, const char* what) {
    const auto comma = text.find(',');
    if (comma == std::string::npos) {
        throw vpocc::IoError(std::string(what) + " expects x,y");
    }
    try {
        return {std::stod(text.substr(0, comma)), std::stod(text.substr(comma + 1))};
    } catch (const std::exception&) {
        throw vpocc::IoError(std::string("cannot parse ") + what + ": " + text);
    }
}

vpocc::Point2 load_vp_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw vpocc::IoError("cannot open VP file: " + path);
    }
    double x = 0.0, y = 0.0;
    if (!(in >> x >> y)) {
        throw vpocc::IoError("VP file must hold a single `x y` line: " + path);
    }
    return {x, y};
}

void save_vp_file(const vpocc::Point2& vp, const std::string& path) {
    std::ofstream out(path);
    if (!out) {
        throw vpocc::IoError("cannot open for writing: " + path);
    }
    out << vp.x << " " << vp.y << "\n";
}

struct CommonFlags {
    std::string config_path;
    vpocc::RunConfig cfg;

    // Flags that override config-file values when explicitly given.
    double alpha = 0.2;
    double beta = 30.0;
    std::uint64_t seed = 42;
    int channels = 32;
    int num_classes = 20;
    int threads = 1;

    CLI::Option* alpha_opt = nullptr;
    CLI::Option* beta_opt = nullptr;
    CLI::Option* seed_opt = nullptr;
    CLI::Option* channels_opt = nullptr;
    CLI::Option* classes_opt = nullptr;
    CLI::Option* threads_opt = nullptr;

    void attach(CLI::App* app) {
        app->add_option("--config", config_path, "key=value config file");
        alpha_opt = app->add_option("--alpha", alpha, "zoom-in level in (0,1)");
        beta_opt = app->add_option("--beta", beta, "sampling offset bound");
        seed_opt = app->add_option("--seed", seed, "seed for generated weights");
        channels_opt = app->add_option("--channels", channels, "feature channel width");
        classes_opt = app->add_option("--num-classes", num_classes, "segmentation classes");
        threads_opt = app->add_option("--threads", threads, "worker threads");
    }

    /// Resolution order: defaults, then config file, then explicit flags.
    void resolve() {
        if (!config_path.empty()) {
            cfg = vpocc::load_config_file(config_path, cfg);
        }
        if (alpha_opt && alpha_opt->count() > 0) {
            cfg.alpha = alpha;
        }
        if (beta_opt && beta_opt->count() > 0) {
            cfg.beta = beta;
        }
        if (seed_opt && seed_opt->count() > 0) {
            cfg.seed = seed;
        }
        if (channels_opt && channels_opt->count() > 0) {
            cfg.channels = channels;
        }
        if (classes_opt && classes_opt->count() > 0) {
            cfg.num_classes = num_classes;
        }
        if (threads_opt && threads_opt->count() > 0) {
            cfg.threads = threads;
        }
        if (cfg.threads < 1) {
            throw vpocc::DomainError("threads must be >= 1");
        }
    }
};

int run_zoom(const std::string& image_path, const std::string& vp_text,
             const std::string& out_path, CommonFlags& common) {
    common.resolve();
    const vpocc::ImageBuffer image = vpocc::load_image(image_path);
    vpocc::Point2 vp = parse_point(vp_text, "--vp");

    // The library is strict about the segment leaving the image; the tool
    // clamps v_y so the segment fits and warns instead.
    const double half = common.cfg.alpha * image.height / 2.0;
    const double clamped = std::clamp(vp.y, half, image.height - half);
    if (clamped != vp.y) {
        std::cerr << "warning: clamping v_y from " << vp.y << " to " << clamped
                  << " so the shared segment fits\n";
        vp.y = clamped;
    }

    const vpocc::ZoomGeometry geom = vpocc::build_zoom_geometry(
        vp, image.width, image.height, common.cfg.alpha);
    const vpocc::ImageBuffer zoomed =
        vpocc::synthesize_zoom(image, geom, common.cfg.threads);
    vpocc::save_image(zoomed, out_path);
    return kExitOk;
}

int run_sample(const std::string& vp_text, const std::string& ref_text,
               const std::string& dims_text, const std::string& overlay_src,
               const std::string& overlay_out, CommonFlags& common) {
    common.resolve();
    const vpocc::Point2 vp = parse_point(vp_text, "--vp");
    const vpocc::Point2 ref = parse_point(ref_text, "--ref");
    const vpocc::Point2 dims = parse_point(dims_text, "--image-dims");
    const int width = static_cast<int>(dims.x);
    const int height = static_cast<int>(dims.y);
    if (width <= 0 || height <= 0) {
        throw vpocc::DomainError("--image-dims must be positive");
    }
    if (ref.x < 0 || ref.y < 0 || ref.x >= width || ref.y >= height) {
        throw vpocc::DomainError("--ref lies outside the image");
    }

    const auto sets = vpocc::multi_scale_samples(
        vp, ref, vpocc::pyramid_dims_for_image(width, height), common.cfg.sampler());

    char line[96];
    for (const auto& set : sets) {
        for (const auto& p : set.points) {
            std::snprintf(line, sizeof(line), "%d %.6f %.6f\n", set.level, p.x, p.y);
            std::cout << line;
        }
    }

    if (!overlay_src.empty()) {
        vpocc::ImageBuffer img = vpocc::load_image(overlay_src);
        const std::array<std::array<float, 3>, 3> level_colors{
            {{1.0f, 0.2f, 0.2f}, {0.2f, 1.0f, 0.2f}, {0.2f, 0.4f, 1.0f}}};
        for (const auto& set : sets) {
            const int stride = vpocc::SamplerConfig::strides[static_cast<std::size_t>(set.level)];
            for (const auto& p : set.points) {
                const int cx = static_cast<int>(std::lround(p.x * stride));
                const int cy = static_cast<int>(std::lround(p.y * stride));
                for (int dy = -2; dy <= 2; ++dy) {
                    for (int dx = -2; dx <= 2; ++dx) {
                        if (dx != 0 && dy != 0) {
                            continue; // crosses, not blobs
                        }
                        const int x = cx + dx, y = cy + dy;
                        if (x < 0 || y < 0 || x >= img.width || y >= img.height) {
                            continue;
                        }
                        for (int c = 0; c < img.channels; ++c) {
                            img.at(x, y, c) =
                                level_colors[static_cast<std::size_t>(set.level)]
                                            [static_cast<std::size_t>(c % 3)];
                        }
                    }
                }
            }
        }
        vpocc::save_image(img, overlay_out.empty() ? overlay_src + ".overlay.png"
                                                   : overlay_out);
    }
    return kExitOk;
}

int run_lift(const std::string& depth_path, const std::string& calib_path,
             const std::string& feat_o_path, const std::string& feat_z_path,
             const std::string& vp_text, const std::string& vp_file,
             const std::string& out_prefix, CommonFlags& common) {
    common.resolve();
    const vpocc::DepthMap depth = vpocc::load_depth_png(depth_path);
    const vpocc::CameraModel cam = vpocc::load_kitti_intrinsics(calib_path);
    const vpocc::FeaturePyramid pyr_o = vpocc::load_feature_pyramid(feat_o_path);
    const vpocc::FeaturePyramid pyr_z = vpocc::load_feature_pyramid(feat_z_path);
    const vpocc::Point2 vp =
        vp_file.empty() ? parse_point(vp_text, "--vp") : load_vp_file(vp_file);

    const auto expected = vpocc::pyramid_dims_for_image(depth.width, depth.height);
    for (std::size_t l = 0; l < 3; ++l) {
        for (const auto* pyr : {&pyr_o, &pyr_z}) {
            if (pyr->levels[l].width != expected[l].width ||
                pyr->levels[l].height != expected[l].height) {
                throw vpocc::DimensionMismatch(
                    "pyramid level dims do not match ceil(image/stride)");
            }
        }
    }
    if (pyr_o.channels() != pyr_z.channels()) {
        throw vpocc::DimensionMismatch("pyramids have different channel widths");
    }
    const int channels = pyr_o.channels();

    const vpocc::VoxelQueryGrid queries = vpocc::propose_voxel_queries(
        depth, cam, common.cfg.grid, vpocc::QueryInit{channels, common.cfg.seed});
    if (queries.empty_proposal()) {
        std::cerr << "warning: empty proposal (no valid depth in grid); writing zero volumes\n";
    }

    const vpocc::AttentionWeights weights =
        vpocc::AttentionWeights::seeded(channels, 27, common.cfg.seed);
    const vpocc::FeatureVolume vol_o = vpocc::lift_volume(
        queries, pyr_o, vp, cam, depth.width, depth.height, vpocc::LiftMode::vpca,
        weights, common.cfg.sampler(), common.cfg.threads);
    const vpocc::FeatureVolume vol_z = vpocc::lift_volume(
        queries, pyr_z, vp, cam, depth.width, depth.height, vpocc::LiftMode::dca,
        weights, common.cfg.sampler(), common.cfg.threads);

    vpocc::save_feature_volume(vol_o, out_prefix + "_o.bin");
    vpocc::save_feature_volume(vol_z, out_prefix + "_z.bin");
    return kExitOk;
}

int run_fuse(const std::string& vol_o_path, const std::string& vol_z_path,
             const std::string& out_path, CommonFlags& common) {
    common.resolve();
    const vpocc::FeatureVolume vol_o = vpocc::load_feature_volume(vol_o_path);
    const vpocc::FeatureVolume vol_z = vpocc::load_feature_volume(vol_z_path);
    if (!vol_o.same_dims(vol_z)) {
        throw vpocc::DimensionMismatch("input volumes have different dims");
    }
    const vpocc::FusionWeights weights = vpocc::FusionWeights::seeded(
        vol_o.channels, common.cfg.num_classes, common.cfg.seed);
    const vpocc::FeatureVolume fused =
        vpocc::bfvf(vol_o, vol_z, weights, common.cfg.threads);
    const vpocc::SemanticGrid grid =
        vpocc::upsample_head(fused, weights, common.cfg.threads);
    vpocc::save_semantic_grid(grid, out_path);
    return kExitOk;
}

int run_density(const std::string& depth_path, const std::string& vp_text,
                const std::string& out_csv, bool no_zoom, CommonFlags& common) {
    common.resolve();
    const vpocc::DepthMap depth = vpocc::load_depth_png(depth_path);
    const auto bands = vpocc::default_bands();

    vpocc::DensityReport report;
    if (no_zoom) {
        const auto counts = vpocc::band_counts(depth, bands);
        for (std::size_t b = 0; b < bands.size(); ++b) {
            report.rows.push_back({bands[b], counts[b], counts[b], 1.0});
        }
    } else {
        const vpocc::Point2 vp = parse_point(vp_text, "--vp");
        const vpocc::ZoomGeometry geom = vpocc::build_zoom_geometry(
            vp, depth.width, depth.height, common.cfg.alpha);
        report = vpocc::rebalancing_report(depth, geom, bands);
    }

    if (out_csv.empty()) {
        vpocc::write_density_csv(report, std::cout);
    } else {
        std::ofstream out(out_csv);
        if (!out) {
            throw vpocc::IoError("cannot open for writing: " + out_csv);
        }
        vpocc::write_density_csv(report, out);
    }
    return kExitOk;
}

int run_synth(const std::string& scene, const std::string& out_image,
              const std::string& out_depth, const std::string& out_vp) {
    if (scene != "road") {
        throw vpocc::DomainError("unknown scene: " + scene);
    }
    const vpocc::RoadScene road = vpocc::generate_road_scene();
    if (!out_image.empty()) {
        vpocc::save_image(road.image, out_image);
    }
    if (!out_depth.empty()) {
        vpocc::save_depth_png(road.depth, out_depth);
    }
    if (!out_vp.empty()) {
        save_vp_file(road.vp, out_vp);
    }
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"vanishing-point-guided zoom, sampling, lifting and fusion pipeline"};
    app.require_subcommand(1);

    // zoom
    auto* zoom = app.add_subcommand("zoom", "synthesize the zoom-in image");
    std::string zoom_image, zoom_vp, zoom_out;
    CommonFlags zoom_common;
    zoom->add_option("--image", zoom_image, "input image (png/ppm/pgm)")->required();
    zoom->add_option("--vp", zoom_vp, "vanishing point x,y")->required();
    zoom->add_option("--out", zoom_out, "output image path")->required();
    zoom_common.attach(zoom);

    // sample
    auto* sample = app.add_subcommand("sample", "emit the 27-point sampling table");
    std::string sample_vp, sample_ref, sample_dims, sample_overlay, sample_overlay_out;
    CommonFlags sample_common;
    sample->add_option("--vp", sample_vp, "vanishing point x,y (full-image px)")->required();
    sample->add_option("--ref", sample_ref, "reference point x,y (full-image px)")->required();
    sample->add_option("--image-dims", sample_dims, "image dims w,h")->required();
    sample->add_option("--overlay", sample_overlay, "image to draw the points on");
    sample->add_option("--overlay-out", sample_overlay_out, "overlay output path");
    sample_common.attach(sample);

    // lift
    auto* lift = app.add_subcommand("lift", "build voxel queries and lift feature volumes");
    std::string lift_depth, lift_calib, lift_fo, lift_fz, lift_vp, lift_vp_file, lift_out;
    CommonFlags lift_common;
    lift->add_option("--depth", lift_depth, "16-bit depth png")->required();
    lift->add_option("--calib", lift_calib, "KITTI calibration file")->required();
    lift->add_option("--features-o", lift_fo, "original-image feature pyramid")->required();
    lift->add_option("--features-z", lift_fz, "zoom-image feature pyramid")->required();
    lift->add_option("--vp", lift_vp, "vanishing point x,y");
    lift->add_option("--vp-file", lift_vp_file, "file with a single `x y` line");
    lift->add_option("--out-volume", lift_out, "output path prefix (_o.bin/_z.bin)")->required();
    lift_common.attach(lift);

    // fuse
    auto* fuse = app.add_subcommand("fuse", "fuse two volumes into a semantic grid");
    std::string fuse_o, fuse_z, fuse_out;
    CommonFlags fuse_common;
    fuse->add_option("--vol-o", fuse_o, "original-branch volume")->required();
    fuse->add_option("--vol-z", fuse_z, "zoom-branch volume")->required();
    fuse->add_option("--out-grid", fuse_out, "output semantic grid (VPOC format)")->required();
    fuse_common.attach(fuse);

    // density
    auto* density = app.add_subcommand("density", "per-band depth density report");
    std::string density_depth, density_vp, density_csv;
    bool density_no_zoom = false;
    CommonFlags density_common;
    density->add_option("--depth", density_depth, "16-bit depth png")->required();
    density->add_option("--vp", density_vp, "vanishing point x,y");
    density->add_option("--out-csv", density_csv, "output CSV (stdout if omitted)");
    density->add_flag("--no-zoom", density_no_zoom, "report unit ratios without warping");
    density_common.attach(density);

    // synth
    auto* synth = app.add_subcommand("synth", "generate a synthetic test scene");
    std::string synth_scene = "road", synth_image, synth_depth, synth_vp;
    synth->add_option("--scene", synth_scene, "scene kind (road)");
    synth->add_option("--out-image", synth_image, "output image path");
    synth->add_option("--out-depth", synth_depth, "output 16-bit depth png");
    synth->add_option("--out-vp", synth_vp, "output VP file");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            return app.exit(e); // --help
        }
        std::cerr << e.what() << "\n";
        return kExitIo;
    }

    try {
        if (zoom->parsed()) {
            return run_zoom(zoom_image, zoom_vp, zoom_out, zoom_common);
        }
        if (sample->parsed()) {
            return run_sample(sample_vp, sample_ref, sample_dims, sample_overlay,
                              sample_overlay_out, sample_common);
        }
        if (lift->parsed()) {
            if (lift_vp.empty() && lift_vp_file.empty()) {
                std::cerr << "error: lift needs --vp or --vp-file\n";
                return kExitIo;
            }
            return run_lift(lift_depth, lift_calib, lift_fo, lift_fz, lift_vp,
                            lift_vp_file, lift_out, lift_common);
        }
        if (fuse->parsed()) {
            return run_fuse(fuse_o, fuse_z, fuse_out, fuse_common);
        }
        if (density->parsed()) {
            if (!density_no_zoom && density_vp.empty()) {
                std::cerr << "error: density needs --vp unless --no-zoom is given\n";
                return kExitIo;
            }
            return run_density(density_depth, density_vp, density_csv, density_no_zoom,
                               density_common);
        }
        if (synth->parsed()) {
            return run_synth(synth_scene, synth_image, synth_depth, synth_vp);
        }
    } catch (const vpocc::IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    } catch (const vpocc::DomainError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitDomain;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitDomain;
    }
    return kExitOk;
}
