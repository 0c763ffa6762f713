#include "dsmr/tiling.hpp"

#include <algorithm>
#include <cmath>

namespace dsmr {

float normalize_value(float x, const NormSpec& spec) {
    const float y = 2.0f * (x - spec.lo) / (spec.hi - spec.lo) - 1.0f;
    return std::clamp(y, -1.0f, 1.0f);
}

float denormalize_value(float y, const NormSpec& spec) {
    return (y + 1.0f) * 0.5f * (spec.hi - spec.lo) + spec.lo;
}

std::vector<float> normalize(std::span<const float> values, const NormSpec& spec) {
    spec.validate();
    std::vector<float> out(values.size());
    for (size_t i = 0; i < values.size(); ++i) out[i] = normalize_value(values[i], spec);
    return out;
}

std::vector<float> denormalize(std::span<const float> values, const NormSpec& spec) {
    spec.validate();
    std::vector<float> out(values.size());
    for (size_t i = 0; i < values.size(); ++i) out[i] = denormalize_value(values[i], spec);
    return out;
}

namespace {

NormSpec percentile_spec(std::vector<float> sample, NormSpec::Kind kind, double widen) {
    GridStats stats(std::move(sample));
    double lo = stats.percentile(1.0);
    double hi = stats.percentile(99.0);
    if (!(hi > lo)) { // degenerate sample; fall back to an epsilon span
        lo -= 0.5;
        hi += 0.5;
    }
    const double pad = widen * 0.5 * (hi - lo);
    NormSpec spec;
    spec.kind = kind;
    spec.lo = static_cast<float>(lo - pad);
    spec.hi = static_cast<float>(hi + pad);
    spec.validate();
    return spec;
}

void append_valid(std::vector<float>& out, const RasterGrid& g) {
    for (float v : g.values)
        if (!g.is_nodata(v)) out.push_back(v);
}

} // namespace

NormSpec height_norm_from_scenes(std::span<const SceneTriple> scenes) {
    if (scenes.empty()) throw EmptyDomainError("height norm: no scenes");
    std::vector<float> sample;
    for (const SceneTriple& s : scenes) {
        append_valid(sample, s.dsm_gt);
        append_valid(sample, s.dsm_photo);
    }
    return percentile_spec(std::move(sample), NormSpec::Kind::Height, 0.05);
}

NormSpec intensity_norm_from_scenes(std::span<const SceneTriple> scenes) {
    if (scenes.empty()) throw EmptyDomainError("intensity norm: no scenes");
    std::vector<float> sample;
    for (const SceneTriple& s : scenes) append_valid(sample, s.pan);
    return percentile_spec(std::move(sample), NormSpec::Kind::Intensity, 0.0);
}

std::vector<float> cut_window(const RasterGrid& grid, const TileWindow& window) {
    if (window.col0 < 0 || window.row0 < 0 || window.size <= 0 ||
        window.col0 + window.size > grid.width || window.row0 + window.size > grid.height)
        throw RangeError("cut_window: window outside grid");
    std::vector<float> out(static_cast<size_t>(window.size) * window.size);
    for (int r = 0; r < window.size; ++r) {
        const float* src = grid.values.data() +
                           static_cast<size_t>(window.row0 + r) * grid.width + window.col0;
        std::copy(src, src + window.size,
                  out.begin() + static_cast<std::ptrdiff_t>(static_cast<size_t>(r) * window.size));
    }
    return out;
}

PatchTriple sample_training_patch(const SceneTriple& scene, int patch,
                                  const NormSpec& height_spec,
                                  const NormSpec& intensity_spec, Rng& rng) {
    const int w = scene.dsm_gt.width, h = scene.dsm_gt.height;
    if (patch <= 0) throw ConfigError("patch size must be positive");
    if (w < patch || h < patch)
        throw ShapeError("scene " + std::to_string(w) + "x" + std::to_string(h) +
                         " smaller than patch " + std::to_string(patch));
    PatchTriple out;
    out.window.size = patch;
    out.window.col0 = static_cast<int>(rng.uniform_int(0, w - patch));
    out.window.row0 = static_cast<int>(rng.uniform_int(0, h - patch));

    const Shape shape{1, 1, patch, patch};
    out.pan = Tensor<float>::from(shape,
                                  normalize(cut_window(scene.pan, out.window), intensity_spec));
    out.dsm = Tensor<float>::from(shape,
                                  normalize(cut_window(scene.dsm_photo, out.window), height_spec));
    out.gt = Tensor<float>::from(shape,
                                 normalize(cut_window(scene.dsm_gt, out.window), height_spec));
    return out;
}

std::vector<int> tile_offsets(int extent, int patch) {
    if (patch <= 0) throw ConfigError("tile planning: patch must be positive");
    if (patch % 2 != 0) throw ConfigError("tile planning: patch must be even for half overlap");
    if (extent < patch) throw ShapeError("tile planning: extent smaller than patch");
    const int stride = patch / 2;
    std::vector<int> offsets;
    for (int off = 0; off + patch < extent; off += stride) offsets.push_back(off);
    const int last = extent - patch; // clamp flush to the edge
    if (offsets.empty() || offsets.back() != last) offsets.push_back(last);
    return offsets;
}

std::vector<TileWindow> plan_inference_tiles(int width, int height, int patch) {
    const std::vector<int> cols = tile_offsets(width, patch);
    const std::vector<int> rows = tile_offsets(height, patch);
    std::vector<TileWindow> out;
    out.reserve(cols.size() * rows.size());
    for (int row : rows)
        for (int col : cols) out.push_back({col, row, patch});
    return out;
}

std::vector<float> stitch(int width, int height, int patch,
                          const std::vector<TileWindow>& windows,
                          const std::vector<std::vector<float>>& tiles) {
    if (windows.size() != tiles.size())
        throw EmptyDomainError("stitch: missing tile for a planned window");
    const size_t count = static_cast<size_t>(width) * height;
    std::vector<double> acc(count, 0.0), wsum(count, 0.0);

    std::vector<double> w1(static_cast<size_t>(patch));
    for (int i = 0; i < patch; ++i)
        w1[static_cast<size_t>(i)] = 0.5 - 0.5 * std::cos(2.0 * M_PI * (i + 0.5) / patch);

    for (size_t t = 0; t < windows.size(); ++t) {
        const TileWindow& win = windows[t];
        if (win.size != patch || win.col0 < 0 || win.row0 < 0 ||
            win.col0 + patch > width || win.row0 + patch > height)
            throw RangeError("stitch: window outside extent");
        const std::vector<float>& tile = tiles[t];
        if (tile.size() != static_cast<size_t>(patch) * patch)
            throw ShapeError("stitch: tile size does not match window");
        for (int r = 0; r < patch; ++r) {
            const size_t dst0 = static_cast<size_t>(win.row0 + r) * width + win.col0;
            const size_t src0 = static_cast<size_t>(r) * patch;
            for (int c = 0; c < patch; ++c) {
                const double w = std::max(w1[static_cast<size_t>(r)] * w1[static_cast<size_t>(c)], 1e-6);
                acc[dst0 + c] += w * tile[src0 + c];
                wsum[dst0 + c] += w;
            }
        }
    }

    std::vector<float> out(count);
    for (size_t i = 0; i < count; ++i) {
        if (wsum[i] <= 0.0)
            throw EmptyDomainError("stitch: pixel not covered by any tile");
        out[i] = static_cast<float>(acc[i] / wsum[i]);
    }
    return out;
}

} // namespace dsmr
