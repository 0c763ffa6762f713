#pragma once

#include <cstdint>
#include <string>

#include "dsmr/raster.hpp"
#include "dsmr/rng.hpp"

namespace dsmr {

// Procedural scene generation: a clean prism-world ground truth, a degraded
// stereo-matching-like version of it, a shaded intensity surrogate, and the
// building footprint mask.

struct SceneConfig {
    int size_px = 512;
    double pixel_size_m = 0.5;
    int n_buildings = 20;
    double min_footprint_m = 8.0;
    double max_footprint_m = 40.0;
    double min_height_m = 4.0;
    double max_height_m = 25.0;
    double flat_fraction = 0.6;   // roof type mix; fractions must sum to 1
    double gabled_fraction = 0.4;
    double l_shape_fraction = 0.3; // chance a flat-roof building becomes an L
    double terrain_amplitude_m = 3.0;
    uint64_t seed = 1;

    void validate() const;
};

struct DegradeConfig {
    double blur_sigma_px = 1.2;
    double noise_sigma_m = 0.6;
    double outlier_fraction = 0.004;
    double outlier_min_m = 3.0;
    double outlier_max_m = 12.0;
    int vegetation_count = 30;
    double veg_min_height_m = 3.0;
    double veg_max_height_m = 9.0;
    double veg_min_radius_m = 2.0;
    double veg_max_radius_m = 6.0;
    uint64_t seed = 2;

    void validate() const;
};

// Aligned rasters for one scene.
struct SceneTriple {
    RasterGrid pan;       // intensities in [0,255]
    RasterGrid dsm_photo; // degraded heights, meters
    RasterGrid dsm_gt;    // clean heights, meters
    MaskGrid mask;        // building footprints
};

// Deterministic in (cfg.seed, deg.seed).
SceneTriple generate_scene(const SceneConfig& cfg, const DegradeConfig& deg);

// blur + noise + outlier spikes + vegetation blobs near height discontinuities.
// All magnitudes zero -> bit-identical copy of gt.
RasterGrid degrade_dsm(const RasterGrid& gt, const DegradeConfig& deg);

// Shaded rendering of the ground truth with per-building albedo, darkened
// footprint outlines and mild sensor noise; intensities in [0,255].
RasterGrid render_pan(const RasterGrid& gt, const MaskGrid& mask, const SunVector& sun,
                      Rng& rng);

// Scene directory layout used by the CLI and trainer.
struct ScenePaths {
    std::string pan, dsm_photo, dsm_gt, mask, meta;
};
ScenePaths scene_paths(const std::string& dir);
SceneTriple load_scene(const std::string& dir);
void save_scene(const SceneTriple& scene, const std::string& dir);

} // namespace dsmr
