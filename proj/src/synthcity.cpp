#include "dsmr/synthcity.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <filesystem>

namespace dsmr {

void SceneConfig::validate() const {
    if (size_px < 8) throw ConfigError("scene: size must be >= 8 px");
    if (pixel_size_m <= 0.0) throw ConfigError("scene: pixel size must be positive");
    if (n_buildings < 0) throw ConfigError("scene: negative building count");
    if (min_footprint_m <= 0.0 || max_footprint_m < min_footprint_m)
        throw ConfigError("scene: bad footprint range");
    if (min_height_m <= 0.0 || max_height_m < min_height_m)
        throw ConfigError("scene: bad height range");
    if (flat_fraction < 0.0 || gabled_fraction < 0.0 ||
        std::abs(flat_fraction + gabled_fraction - 1.0) > 1e-9)
        throw ConfigError("scene: roof fractions must sum to 1");
    if (l_shape_fraction < 0.0 || l_shape_fraction > 1.0)
        throw ConfigError("scene: l_shape_fraction outside [0,1]");
    if (terrain_amplitude_m < 0.0) throw ConfigError("scene: negative terrain amplitude");
    if (n_buildings > 0) {
        const double max_fp_px = max_footprint_m / pixel_size_m;
        if (size_px < 4.0 * max_fp_px)
            throw ConfigError("scene: size must be at least 4x the max footprint");
    }
}

void DegradeConfig::validate() const {
    if (blur_sigma_px < 0.0 || noise_sigma_m < 0.0)
        throw ConfigError("degrade: sigmas must be >= 0");
    if (outlier_fraction < 0.0 || outlier_fraction > 1.0)
        throw ConfigError("degrade: outlier fraction outside [0,1]");
    if (outlier_fraction > 0.0 && (outlier_min_m < 0.0 || outlier_max_m < outlier_min_m))
        throw ConfigError("degrade: bad outlier magnitude range");
    if (vegetation_count < 0) throw ConfigError("degrade: negative vegetation count");
    if (vegetation_count > 0 &&
        (veg_min_height_m <= 0.0 || veg_max_height_m < veg_min_height_m ||
         veg_min_radius_m <= 0.0 || veg_max_radius_m < veg_min_radius_m))
        throw ConfigError("degrade: bad vegetation ranges");
}

namespace {

GeoTransform scene_transform(const SceneConfig& cfg) {
    GeoTransform t;
    t.origin_x = 0.0;
    t.origin_y = 0.0;
    t.pixel_size_x = cfg.pixel_size_m;
    t.pixel_size_y = -cfg.pixel_size_m;
    return t;
}

// Sum of Gaussian bumps, affinely rescaled to [0, amplitude].
std::vector<double> make_terrain(const SceneConfig& cfg, Rng& rng) {
    const int n = cfg.size_px;
    std::vector<double> field(static_cast<size_t>(n) * n, 0.0);
    const int bumps = 14;
    for (int b = 0; b < bumps; ++b) {
        const double cx = rng.uniform(0.0, n);
        const double cy = rng.uniform(0.0, n);
        const double sigma = rng.uniform(n / 16.0, n / 5.0);
        const double amp = rng.uniform(-1.0, 1.0);
        const double inv = 1.0 / (2.0 * sigma * sigma);
        for (int r = 0; r < n; ++r)
            for (int c = 0; c < n; ++c) {
                const double d2 = (c - cx) * (c - cx) + (r - cy) * (r - cy);
                field[static_cast<size_t>(r) * n + c] += amp * std::exp(-d2 * inv);
            }
    }
    const auto [mn_it, mx_it] = std::minmax_element(field.begin(), field.end());
    const double lo = *mn_it;
    const double span = *mx_it - lo;
    const double scale = (span > 0.0) ? cfg.terrain_amplitude_m / span : 0.0;
    for (double& v : field) v = (v - lo) * scale;
    return field;
}

struct Rect {
    int col0, row0, w, h; // pixels
    bool overlaps(const Rect& o, int gap) const {
        return col0 < o.col0 + o.w + gap && o.col0 < col0 + w + gap &&
               row0 < o.row0 + o.h + gap && o.row0 < row0 + h + gap;
    }
};

struct Building {
    std::vector<Rect> parts; // one rect, or two for an L
    bool gabled = false;
    double eave_m = 0.0;   // height above base at the roof edge (gabled)
    double ridge_m = 0.0;  // height above base at the ridge (= flat height)
    bool ridge_along_cols = false;
};

double terrain_min_under(const std::vector<double>& terrain, int n, const Rect& r) {
    double mn = std::numeric_limits<double>::max();
    for (int row = r.row0; row < r.row0 + r.h; ++row)
        for (int col = r.col0; col < r.col0 + r.w; ++col)
            mn = std::min(mn, terrain[static_cast<size_t>(row) * n + col]);
    return mn;
}

} // namespace

SceneTriple generate_scene(const SceneConfig& cfg, const DegradeConfig& deg) {
    cfg.validate();
    deg.validate();
    const int n = cfg.size_px;
    const GeoTransform t = scene_transform(cfg);

    Rng rng(cfg.seed);
    const std::vector<double> terrain = make_terrain(cfg, rng);

    // Place buildings without overlap; bounded retries per building.
    std::vector<Building> buildings;
    std::vector<Rect> placed;
    const int margin = 2;
    for (int b = 0; b < cfg.n_buildings; ++b) {
        bool ok = false;
        for (int attempt = 0; attempt < 200 && !ok; ++attempt) {
            const int w = std::max(3, static_cast<int>(std::lround(
                              rng.uniform(cfg.min_footprint_m, cfg.max_footprint_m) /
                              cfg.pixel_size_m)));
            const int h = std::max(3, static_cast<int>(std::lround(
                              rng.uniform(cfg.min_footprint_m, cfg.max_footprint_m) /
                              cfg.pixel_size_m)));
            if (w + 2 * margin >= n || h + 2 * margin >= n) continue;
            Rect r;
            r.w = w;
            r.h = h;
            r.col0 = static_cast<int>(rng.uniform_int(margin, n - w - margin));
            r.row0 = static_cast<int>(rng.uniform_int(margin, n - h - margin));

            Building bld;
            bld.parts.push_back(r);
            bld.gabled = rng.uniform() >= cfg.flat_fraction;
            const double height = rng.uniform(cfg.min_height_m, cfg.max_height_m);
            bld.ridge_m = height;
            bld.eave_m = bld.gabled ? 0.7 * height : height;
            bld.ridge_along_cols = r.w >= r.h;

            if (!bld.gabled && rng.uniform() < cfg.l_shape_fraction) {
                // Second rect sharing the top-left corner makes the union an L.
                Rect r2;
                r2.w = std::max(3, w / 2);
                r2.h = std::min(n - margin - r.row0, h + h / 2);
                r2.col0 = r.col0;
                r2.row0 = r.row0;
                bld.parts.push_back(r2);
            }

            bool collides = false;
            for (const Rect& part : bld.parts)
                for (const Rect& other : placed)
                    if (part.overlaps(other, 2)) collides = true;
            for (const Rect& part : bld.parts)
                if (part.col0 + part.w + margin > n || part.row0 + part.h + margin > n)
                    collides = true;
            if (collides) continue;

            for (const Rect& part : bld.parts) placed.push_back(part);
            buildings.push_back(std::move(bld));
            ok = true;
        }
        if (!ok)
            throw ConfigError("scene: could not place building " + std::to_string(b) +
                              " without overlap");
    }

    SceneTriple scene;
    scene.dsm_gt = RasterGrid(n, n, t);
    scene.mask = MaskGrid(n, n, t);
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c)
            scene.dsm_gt.at(r, c) = static_cast<float>(terrain[static_cast<size_t>(r) * n + c]);

    for (const Building& bld : buildings) {
        double base = std::numeric_limits<double>::max();
        for (const Rect& part : bld.parts)
            base = std::min(base, terrain_min_under(terrain, n, part));
        for (const Rect& part : bld.parts) {
            for (int row = part.row0; row < part.row0 + part.h; ++row) {
                for (int col = part.col0; col < part.col0 + part.w; ++col) {
                    double z;
                    if (!bld.gabled) {
                        z = base + bld.ridge_m;
                    } else {
                        // Linear faces from both long eaves up to the ridge line.
                        const Rect& r0 = bld.parts[0];
                        double d, half;
                        if (bld.ridge_along_cols) {
                            const double center = r0.row0 + (r0.h - 1) / 2.0;
                            d = std::abs(row - center);
                            half = std::max(1.0, (r0.h - 1) / 2.0);
                        } else {
                            const double center = r0.col0 + (r0.w - 1) / 2.0;
                            d = std::abs(col - center);
                            half = std::max(1.0, (r0.w - 1) / 2.0);
                        }
                        z = base + bld.ridge_m - (bld.ridge_m - bld.eave_m) * (d / half);
                    }
                    const double ground = terrain[static_cast<size_t>(row) * n + col];
                    scene.dsm_gt.at(row, col) = static_cast<float>(std::max(ground, z));
                    scene.mask.at(row, col) = 1;
                }
            }
        }
    }

    scene.dsm_photo = degrade_dsm(scene.dsm_gt, deg);
    Rng pan_rng = Rng::derive(cfg.seed, 0x50414eull); // independent stream for the render
    scene.pan = render_pan(scene.dsm_gt, scene.mask, SunVector{}, pan_rng);
    return scene;
}

namespace {

std::vector<float> gaussian_blur(const RasterGrid& g, double sigma) {
    const int radius = static_cast<int>(std::ceil(3.0 * sigma));
    std::vector<double> taps(static_cast<size_t>(2 * radius + 1));
    double sum = 0.0;
    for (int i = -radius; i <= radius; ++i) {
        taps[static_cast<size_t>(i + radius)] = std::exp(-0.5 * (i * i) / (sigma * sigma));
        sum += taps[static_cast<size_t>(i + radius)];
    }
    for (double& tp : taps) tp /= sum;

    const int wpx = g.width, hpx = g.height;
    std::vector<double> tmp(g.values.size());
    // horizontal pass, clamped borders
    for (int r = 0; r < hpx; ++r)
        for (int c = 0; c < wpx; ++c) {
            double acc = 0.0;
            for (int i = -radius; i <= radius; ++i) {
                const int cc = std::clamp(c + i, 0, wpx - 1);
                acc += taps[static_cast<size_t>(i + radius)] * g.at(r, cc);
            }
            tmp[static_cast<size_t>(r) * wpx + c] = acc;
        }
    std::vector<float> out(g.values.size());
    for (int r = 0; r < hpx; ++r)
        for (int c = 0; c < wpx; ++c) {
            double acc = 0.0;
            for (int i = -radius; i <= radius; ++i) {
                const int rr = std::clamp(r + i, 0, hpx - 1);
                acc += taps[static_cast<size_t>(i + radius)] * tmp[static_cast<size_t>(rr) * wpx + c];
            }
            out[static_cast<size_t>(r) * wpx + c] = static_cast<float>(acc);
        }
    return out;
}

// Magnitude of the local height gradient, used to seek building walls.
double edge_strength(const RasterGrid& g, int r, int c) {
    const int cl = std::max(0, c - 1), cr = std::min(g.width - 1, c + 1);
    const int ru = std::max(0, r - 1), rd = std::min(g.height - 1, r + 1);
    const double gx = (g.at(r, cr) - g.at(r, cl));
    const double gy = (g.at(rd, c) - g.at(ru, c));
    return std::hypot(gx, gy);
}

} // namespace

RasterGrid degrade_dsm(const RasterGrid& gt, const DegradeConfig& deg) {
    gt.validate();
    deg.validate();
    Rng rng(deg.seed);

    RasterGrid out = gt;
    if (deg.blur_sigma_px > 0.0) out.values = gaussian_blur(gt, deg.blur_sigma_px);

    if (deg.noise_sigma_m > 0.0) {
        for (float& v : out.values)
            v += static_cast<float>(rng.normal(0.0, deg.noise_sigma_m));
    }

    if (deg.outlier_fraction > 0.0) {
        for (float& v : out.values) {
            if (rng.uniform() < deg.outlier_fraction) {
                const double mag = rng.uniform(deg.outlier_min_m, deg.outlier_max_m);
                const double sign = rng.uniform() < 0.5 ? -1.0 : 1.0;
                v += static_cast<float>(sign * mag);
            }
        }
    }

    for (int blob = 0; blob < deg.vegetation_count; ++blob) {
        // Prefer spots next to height discontinuities (building walls).
        int cr = 0, cc = 0;
        bool found = false;
        for (int attempt = 0; attempt < 50 && !found; ++attempt) {
            cr = static_cast<int>(rng.uniform_int(0, gt.height - 1));
            cc = static_cast<int>(rng.uniform_int(0, gt.width - 1));
            if (edge_strength(gt, cr, cc) > 1.0) found = true;
        }
        const double radius_px =
            rng.uniform(deg.veg_min_radius_m, deg.veg_max_radius_m) / gt.transform.pixel_size_x;
        const double height = rng.uniform(deg.veg_min_height_m, deg.veg_max_height_m);
        const int rad = std::max(1, static_cast<int>(std::ceil(radius_px)));
        for (int r = std::max(0, cr - rad); r <= std::min(gt.height - 1, cr + rad); ++r)
            for (int c = std::max(0, cc - rad); c <= std::min(gt.width - 1, cc + rad); ++c) {
                const double d2 = (r - cr) * (r - cr) + (c - cc) * (c - cc);
                const double q = 1.0 - d2 / (radius_px * radius_px);
                if (q > 0.0) out.at(r, c) += static_cast<float>(height * std::sqrt(q));
            }
    }
    return out;
}

RasterGrid render_pan(const RasterGrid& gt, const MaskGrid& mask, const SunVector& sun,
                      Rng& rng) {
    gt.validate();
    require_aligned(gt, mask, "render_pan");
    const int wpx = gt.width, hpx = gt.height;

    const std::vector<double> shade = hillshade_field(gt, sun);

    // Per-building albedo via connected component labels, row-major discovery
    // order so labels are deterministic.
    std::vector<int> labels(mask.values.size(), 0);
    std::vector<double> roof_albedo{0.0}; // index 0 unused
    for (int r = 0; r < hpx; ++r)
        for (int c = 0; c < wpx; ++c) {
            const size_t idx = static_cast<size_t>(r) * wpx + c;
            if (mask.values[idx] == 0 || labels[idx] != 0) continue;
            const int label = static_cast<int>(roof_albedo.size());
            roof_albedo.push_back(rng.uniform(0.6, 1.4));
            std::deque<std::pair<int, int>> queue{{r, c}};
            labels[idx] = label;
            while (!queue.empty()) {
                auto [qr, qc] = queue.front();
                queue.pop_front();
                const int dr[4] = {-1, 1, 0, 0};
                const int dc[4] = {0, 0, -1, 1};
                for (int k = 0; k < 4; ++k) {
                    const int nr = qr + dr[k], nc = qc + dc[k];
                    if (nr < 0 || nr >= hpx || nc < 0 || nc >= wpx) continue;
                    const size_t nidx = static_cast<size_t>(nr) * wpx + nc;
                    if (mask.values[nidx] == 0 || labels[nidx] != 0) continue;
                    labels[nidx] = label;
                    queue.emplace_back(nr, nc);
                }
            }
        }

    // Slowly varying ground albedo.
    std::vector<double> ground(mask.values.size(), 1.0);
    const int gb = 6;
    for (int b = 0; b < gb; ++b) {
        const double cx = rng.uniform(0.0, wpx);
        const double cy = rng.uniform(0.0, hpx);
        const double sigma = rng.uniform(wpx / 8.0, wpx / 3.0);
        const double amp = rng.uniform(-0.15, 0.15);
        const double inv = 1.0 / (2.0 * sigma * sigma);
        for (int r = 0; r < hpx; ++r)
            for (int c = 0; c < wpx; ++c) {
                const double d2 = (c - cx) * (c - cx) + (r - cy) * (r - cy);
                ground[static_cast<size_t>(r) * wpx + c] += amp * std::exp(-d2 * inv);
            }
    }

    RasterGrid pan(wpx, hpx, gt.transform);
    for (int r = 0; r < hpx; ++r)
        for (int c = 0; c < wpx; ++c) {
            const size_t idx = static_cast<size_t>(r) * wpx + c;
            const double albedo = labels[idx] ? roof_albedo[static_cast<size_t>(labels[idx])]
                                              : ground[idx];
            double v = std::max(0.0, shade[idx]) * albedo;

            // Dark outline where footprint meets ground, the boundary evidence
            // the spectral channel is supposed to carry.
            bool boundary = false;
            for (int dr = -1; dr <= 1 && !boundary; ++dr)
                for (int dc = -1; dc <= 1 && !boundary; ++dc) {
                    const int nr = r + dr, nc = c + dc;
                    if (nr < 0 || nr >= hpx || nc < 0 || nc >= wpx) continue;
                    if (mask.values[static_cast<size_t>(nr) * wpx + nc] != mask.values[idx])
                        boundary = true;
                }
            if (boundary) v *= 0.35;

            double dn = v * 200.0 + rng.normal(0.0, 2.0);
            pan.at(r, c) = static_cast<float>(std::clamp(dn, 0.0, 255.0));
        }
    return pan;
}

ScenePaths scene_paths(const std::string& dir) {
    const std::filesystem::path p(dir);
    return {(p / "pan.rfg").string(), (p / "dsm_photo.rfg").string(),
            (p / "dsm_gt.rfg").string(), (p / "mask.rfm").string(),
            (p / "scene_meta.txt").string()};
}

SceneTriple load_scene(const std::string& dir) {
    const ScenePaths paths = scene_paths(dir);
    SceneTriple s;
    s.pan = read_rfg(paths.pan);
    s.dsm_photo = read_rfg(paths.dsm_photo);
    s.dsm_gt = read_rfg(paths.dsm_gt);
    s.mask = read_rfm(paths.mask);
    require_aligned(s.pan, s.dsm_photo, "scene");
    require_aligned(s.pan, s.dsm_gt, "scene");
    require_aligned(s.pan, s.mask, "scene");
    return s;
}

void save_scene(const SceneTriple& scene, const std::string& dir) {
    std::filesystem::create_directories(dir);
    const ScenePaths paths = scene_paths(dir);
    write_rfg(scene.pan, paths.pan);
    write_rfg(scene.dsm_photo, paths.dsm_photo);
    write_rfg(scene.dsm_gt, paths.dsm_gt);
    write_rfm(scene.mask, paths.mask);
}

} // namespace dsmr
