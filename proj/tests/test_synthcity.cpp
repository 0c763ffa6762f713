#include <cstring>

#include "doctest.h"
#include "dsmr/synthcity.hpp"
#include "test_util.hpp"

using namespace dsmr;

namespace {

SceneConfig small_scene(uint64_t seed) {
    SceneConfig cfg;
    cfg.size_px = 128;
    cfg.pixel_size_m = 0.5;
    cfg.n_buildings = 4;
    cfg.min_footprint_m = 6.0;
    cfg.max_footprint_m = 14.0;
    cfg.seed = seed;
    return cfg;
}

DegradeConfig no_degrade(uint64_t seed = 9) {
    DegradeConfig d;
    d.blur_sigma_px = 0.0;
    d.noise_sigma_m = 0.0;
    d.outlier_fraction = 0.0;
    d.vegetation_count = 0;
    d.seed = seed;
    return d;
}

} // namespace

TEST_SUITE_BEGIN("synthcity");

TEST_CASE("empty scene is constant terrain with an all-zero mask") {
    SceneConfig cfg = small_scene(5);
    cfg.n_buildings = 0;
    cfg.terrain_amplitude_m = 0.0;
    const SceneTriple s = generate_scene(cfg, no_degrade());
    for (float v : s.dsm_gt.values) CHECK(v == 0.0f);
    for (uint8_t m : s.mask.values) CHECK(m == 0);
    for (size_t i = 0; i < s.dsm_photo.values.size(); ++i)
        CHECK(s.dsm_photo.values[i] == s.dsm_gt.values[i]);
}

TEST_CASE("same seeds produce a bit-identical scene") {
    const SceneConfig cfg = small_scene(77);
    DegradeConfig deg;
    deg.seed = 13;
    const SceneTriple a = generate_scene(cfg, deg);
    const SceneTriple b = generate_scene(cfg, deg);
    CHECK(a.dsm_gt.values == b.dsm_gt.values);
    CHECK(a.dsm_photo.values == b.dsm_photo.values);
    CHECK(a.pan.values == b.pan.values);
    CHECK(a.mask.values == b.mask.values);
}

TEST_CASE("single flat prism on flat terrain spans exactly its height") {
    SceneConfig cfg = small_scene(3);
    cfg.n_buildings = 1;
    cfg.terrain_amplitude_m = 0.0;
    cfg.flat_fraction = 1.0;
    cfg.gabled_fraction = 0.0;
    cfg.l_shape_fraction = 0.0;
    cfg.min_height_m = cfg.max_height_m = 10.0;
    const SceneTriple s = generate_scene(cfg, no_degrade());
    float mn = 1e9f, mx = -1e9f;
    for (float v : s.dsm_gt.values) {
        mn = std::min(mn, v);
        mx = std::max(mx, v);
    }
    CHECK(mn == 0.0f);
    CHECK(mx == 10.0f);
    int mask_px = 0;
    for (uint8_t m : s.mask.values) mask_px += m;
    CHECK(mask_px > 0);
}

TEST_CASE("terrain outside the mask is untouched by buildings") {
    SceneConfig cfg = small_scene(21);
    cfg.n_buildings = 5;
    const DegradeConfig deg = no_degrade();

    SceneConfig empty = cfg;
    empty.n_buildings = 0;
    const SceneTriple with = generate_scene(cfg, deg);
    const SceneTriple without = generate_scene(empty, deg);
    // Same scene seed: terrain bumps are drawn before buildings, so the
    // terrain field is identical and must shine through where mask == 0.
    for (int r = 0; r < cfg.size_px; ++r)
        for (int c = 0; c < cfg.size_px; ++c)
            if (with.mask.at(r, c) == 0)
                CHECK(with.dsm_gt.at(r, c) == without.dsm_gt.at(r, c));
}

TEST_CASE("gabled roofs have the ridge at eave plus rise and planar faces") {
    SceneConfig cfg = small_scene(8);
    cfg.n_buildings = 1;
    cfg.terrain_amplitude_m = 0.0;
    cfg.flat_fraction = 0.0;
    cfg.gabled_fraction = 1.0;
    cfg.min_height_m = cfg.max_height_m = 12.0;
    cfg.min_footprint_m = 10.5; // 21 px at 0.5 m: odd, so the ridge is a pixel row
    cfg.max_footprint_m = 10.5;
    const SceneTriple s = generate_scene(cfg, no_degrade());

    int r0 = 1e9, r1 = -1, c0 = 1e9, c1 = -1;
    for (int r = 0; r < cfg.size_px; ++r)
        for (int c = 0; c < cfg.size_px; ++c)
            if (s.mask.at(r, c)) {
                r0 = std::min(r0, r);
                r1 = std::max(r1, r);
                c0 = std::min(c0, c);
                c1 = std::max(c1, c);
            }
    REQUIRE(r1 >= 0);
    const int h_px = r1 - r0 + 1;
    const int w_px = c1 - c0 + 1;
    REQUIRE(h_px == w_px); // square footprint by construction

    // eave = 0.7 * height, ridge = height
    const float ridge = 12.0f;
    const float eave = 8.4f;
    float max_h = 0.0f;
    for (float v : s.dsm_gt.values) max_h = std::max(max_h, v);
    CHECK(max_h == doctest::Approx(ridge).epsilon(1e-6));
    CHECK(max_h == doctest::Approx(eave + 0.3 * 12.0).epsilon(1e-6));

    // Face planarity: within each face column of the roof, heights are linear.
    const int mid_r = (r0 + r1) / 2;
    for (int c = c0; c <= c1; ++c) {
        for (int r = r0 + 1; r < mid_r; ++r) {
            const float d1 = s.dsm_gt.at(r, c) - s.dsm_gt.at(r - 1, c);
            const float d2 = s.dsm_gt.at(r + 1, c) - s.dsm_gt.at(r, c);
            CHECK(std::abs(d1 - d2) < 1e-5f);
        }
    }
    // Ridge row carries the maximum
    CHECK(s.dsm_gt.at(mid_r, (c0 + c1) / 2) == doctest::Approx(ridge).epsilon(1e-6));
}

TEST_CASE("degrade with zero magnitudes is the identity") {
    const SceneConfig cfg = small_scene(13);
    const SceneTriple s = generate_scene(cfg, no_degrade());
    const RasterGrid out = degrade_dsm(s.dsm_gt, no_degrade(31));
    CHECK(std::memcmp(out.values.data(), s.dsm_gt.values.data(),
                      out.values.size() * 4) == 0);
}

TEST_CASE("noise-only degradation has the configured standard deviation") {
    SceneConfig cfg = small_scene(19);
    cfg.size_px = 256;
    cfg.n_buildings = 0;
    const SceneTriple s = generate_scene(cfg, no_degrade());
    DegradeConfig deg = no_degrade(55);
    deg.noise_sigma_m = 1.0;
    const RasterGrid out = degrade_dsm(s.dsm_gt, deg);
    double mean = 0.0;
    const size_t n = out.values.size();
    std::vector<double> diff(n);
    for (size_t i = 0; i < n; ++i) {
        diff[i] = static_cast<double>(out.values[i]) - s.dsm_gt.values[i];
        mean += diff[i];
    }
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (double d : diff) var += (d - mean) * (d - mean);
    var /= static_cast<double>(n - 1);
    CHECK(std::sqrt(var) == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("outlier degradation spikes the expected pixel count") {
    SceneConfig cfg = small_scene(23);
    cfg.size_px = 128;
    cfg.n_buildings = 0;
    const SceneTriple s = generate_scene(cfg, no_degrade());
    DegradeConfig deg = no_degrade(70);
    deg.noise_sigma_m = 0.5;
    deg.outlier_fraction = 0.01;
    deg.outlier_min_m = 5.0;
    deg.outlier_max_m = 10.0;
    const RasterGrid out = degrade_dsm(s.dsm_gt, deg);
    int count = 0;
    for (size_t i = 0; i < out.values.size(); ++i)
        if (std::abs(out.values[i] - s.dsm_gt.values[i]) > 3.0 * 0.5) ++count;
    // 16384 pixels at 1% outliers plus the normal tail beyond 3 sigma (~0.27%).
    const double expected = 16384 * (0.01 + 0.0027);
    CHECK(count > expected * 0.7);
    CHECK(count < expected * 1.3);
}

TEST_CASE("pan rendering is deterministic and near-constant on empty scenes") {
    SceneConfig cfg = small_scene(29);
    cfg.n_buildings = 0;
    cfg.terrain_amplitude_m = 0.0;
    const SceneTriple s = generate_scene(cfg, no_degrade());
    Rng r1(4), r2(4);
    const RasterGrid p1 = render_pan(s.dsm_gt, s.mask, SunVector{}, r1);
    const RasterGrid p2 = render_pan(s.dsm_gt, s.mask, SunVector{}, r2);
    CHECK(p1.values == p2.values);

    double mean = 0.0;
    for (float v : p1.values) mean += v;
    mean /= static_cast<double>(p1.values.size());
    double var = 0.0;
    for (float v : p1.values) var += (v - mean) * (v - mean);
    var /= static_cast<double>(p1.values.size());
    CHECK(std::sqrt(var) < 12.0); // albedo field and sensor noise only
}

TEST_CASE("pan carries stronger gradients along footprint boundaries") {
    SceneConfig cfg = small_scene(31);
    cfg.n_buildings = 1;
    cfg.min_footprint_m = 12.0;
    cfg.max_footprint_m = 12.0;
    const SceneTriple s = generate_scene(cfg, no_degrade());

    auto grad_mag = [&](const RasterGrid& g, int r, int c) {
        return std::hypot(g.at(r, c + 1) - g.at(r, c - 1), g.at(r + 1, c) - g.at(r - 1, c));
    };
    double boundary_sum = 0.0, background_sum = 0.0;
    int boundary_n = 0, background_n = 0;
    for (int r = 2; r < cfg.size_px - 2; ++r)
        for (int c = 2; c < cfg.size_px - 2; ++c) {
            bool is_boundary = false;
            for (int dr = -1; dr <= 1; ++dr)
                for (int dc = -1; dc <= 1; ++dc)
                    if (s.mask.at(r + dr, c + dc) != s.mask.at(r, c)) is_boundary = true;
            bool near_building = false;
            for (int dr = -4; dr <= 4 && !near_building; ++dr)
                for (int dc = -4; dc <= 4 && !near_building; ++dc) {
                    const int rr = std::clamp(r + dr, 0, cfg.size_px - 1);
                    const int cc = std::clamp(c + dc, 0, cfg.size_px - 1);
                    if (s.mask.at(rr, cc)) near_building = true;
                }
            if (is_boundary) {
                boundary_sum += grad_mag(s.pan, r, c);
                ++boundary_n;
            } else if (!near_building) {
                background_sum += grad_mag(s.pan, r, c);
                ++background_n;
            }
        }
    REQUIRE(boundary_n > 0);
    REQUIRE(background_n > 0);
    CHECK(boundary_sum / boundary_n > background_sum / background_n);
}

TEST_CASE("scene save and load round trip through a directory") {
    const SceneConfig cfg = small_scene(37);
    DegradeConfig deg;
    deg.seed = 41;
    const SceneTriple s = generate_scene(cfg, deg);
    const std::string dir = dsmr::test::tmp_dir("scene_rt");
    save_scene(s, dir);
    const SceneTriple back = load_scene(dir);
    CHECK(back.pan.values == s.pan.values);
    CHECK(back.dsm_photo.values == s.dsm_photo.values);
    CHECK(back.dsm_gt.values == s.dsm_gt.values);
    CHECK(back.mask.values == s.mask.values);
}

TEST_CASE("impossible placement raises a placement error") {
    SceneConfig cfg;
    cfg.size_px = 96;
    cfg.pixel_size_m = 0.5;
    cfg.n_buildings = 60; // cannot fit without overlap
    cfg.min_footprint_m = 10.0;
    cfg.max_footprint_m = 12.0;
    cfg.seed = 1;
    CHECK_THROWS_AS(generate_scene(cfg, no_degrade()), ConfigError);
}

TEST_SUITE_END();
