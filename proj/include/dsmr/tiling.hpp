#pragma once

#include <span>
#include <vector>

#include "dsmr/synthcity.hpp"
#include "dsmr/tensor.hpp"

namespace dsmr {

// Affine mapping of a source value range onto the network's tanh range
// [-1, 1]. Values outside [lo, hi] clamp.
struct NormSpec {
    enum class Kind { Height, Intensity };
    Kind kind = Kind::Height;
    float lo = 0.0f;
    float hi = 1.0f;

    void validate() const {
        if (!(hi > lo)) throw ConfigError("norm spec: hi must exceed lo");
    }
};

float normalize_value(float x, const NormSpec& spec);
float denormalize_value(float y, const NormSpec& spec);
std::vector<float> normalize(std::span<const float> values, const NormSpec& spec);
std::vector<float> denormalize(std::span<const float> values, const NormSpec& spec);

// Joint 1st/99th percentile of ground-truth and input DSM heights over the
// training split, widened by 5%; fixed at training time so inference inverts
// with the same mapping.
NormSpec height_norm_from_scenes(std::span<const SceneTriple> scenes);
// 1st/99th percentile stretch of the PAN intensities.
NormSpec intensity_norm_from_scenes(std::span<const SceneTriple> scenes);

// ---------------------------------------------------------------------------
// Training-time random patches
// ---------------------------------------------------------------------------

struct TileWindow {
    int col0 = 0;
    int row0 = 0;
    int size = 0;
};

struct PatchTriple {
    Tensor<float> pan, dsm, gt; // each 1x1xPxP, normalized
    TileWindow window;
};

// Window values cut from one grid, row-major.
std::vector<float> cut_window(const RasterGrid& grid, const TileWindow& window);

// Top-left drawn uniformly over all valid positions (column first, then row).
PatchTriple sample_training_patch(const SceneTriple& scene, int patch,
                                  const NormSpec& height_spec,
                                  const NormSpec& intensity_spec, Rng& rng);

// ---------------------------------------------------------------------------
// Inference tiling: stride = patch/2, final windows clamp flush to the edge.
// ---------------------------------------------------------------------------

std::vector<int> tile_offsets(int extent, int patch);
std::vector<TileWindow> plan_inference_tiles(int width, int height, int patch);

// Hann-weighted blend of per-window patches back onto the full extent.
// Weights are separable raised cosines with floor 1e-6; accumulation runs in
// 64-bit so tile order cannot change the result.
std::vector<float> stitch(int width, int height, int patch,
                          const std::vector<TileWindow>& windows,
                          const std::vector<std::vector<float>>& tiles);

} // namespace dsmr
