#pragma once

#include <functional>
#include <ostream>
#include <string>
#include <vector>

#include "dsmr/adam.hpp"
#include "dsmr/network.hpp"
#include "dsmr/objective.hpp"
#include "dsmr/tiling.hpp"

namespace dsmr {

struct TrainConfig {
    GeneratorConfig gen;
    DiscriminatorConfig disc;
    int epochs = 30;
    int batch_size = 5;
    int64_t patches_per_epoch = 0; // 0 -> ceil(total scene area / patch area)
    double lr = 2e-4;
    double beta1 = 0.5;
    double beta2 = 0.999;
    LossWeights weights;
    AdvObjective adv = AdvObjective::LeastSquares;
    uint64_t seed = 1;
    int checkpoint_every = 0;      // epochs between cadence checkpoints, 0 = none
    std::string checkpoint_path;   // cadence target; also holds the last good state
    int threads = 1;

    int patch() const { return gen.patch_size(); }
    void validate() const;
};

struct TrainLogRow {
    int epoch = 0;
    int step = 0;
    double d_loss = 0.0, g_adv = 0.0, g_l1 = 0.0, g_normal = 0.0, g_total = 0.0;
    double wall_s = 0.0;
};

void write_train_log_header(std::ostream& out);
void write_train_log_row(std::ostream& out, const TrainLogRow& row);

struct TrainCallbacks {
    std::function<void(const TrainLogRow&)> on_step;
    std::function<void(int epoch, double val_rmse_m)> on_epoch;
};

// ---------------------------------------------------------------------------
// Checkpoints
// ---------------------------------------------------------------------------

struct TensorBlob {
    std::string name;
    std::vector<uint32_t> dims;
    std::vector<float> data;
};

struct Checkpoint {
    uint16_t version = 1;
    GeneratorConfig gen;
    DiscriminatorConfig disc;
    NormSpec height_norm;
    NormSpec intensity_norm;
    uint32_t epoch = 0;
    std::vector<TensorBlob> params; // generator then discriminator entries
    std::vector<TensorBlob> opt;    // adam.t, then adam.m.* / adam.v.* per parameter
};

void save_checkpoint(const Checkpoint& ckpt, const std::string& path);
Checkpoint load_checkpoint(const std::string& path);

// Rebuild networks from a checkpoint; throws IntegrityError naming the first
// missing or mismatched parameter.
Generator<float> generator_from_checkpoint(const Checkpoint& ckpt);
Discriminator<float> discriminator_from_checkpoint(const Checkpoint& ckpt);

// ---------------------------------------------------------------------------
// Training and inference
// ---------------------------------------------------------------------------

// Alternating optimization: one discriminator step and one generator step per
// batch. Deterministic in cfg.seed; pass resume to continue from a checkpoint
// produced with the same seed and data.
Checkpoint train(const std::vector<SceneTriple>& scenes, const SceneTriple* val,
                 const TrainConfig& cfg, const TrainCallbacks& cb = {},
                 const Checkpoint* resume = nullptr);

// Tile the scene with half-patch overlap, run the generator in eval mode and
// blend. Output extent equals the input extent, heights in meters.
RasterGrid infer_with_generator(Generator<float>& gen, const RasterGrid& pan,
                                const RasterGrid& dsm, const NormSpec& height_spec,
                                const NormSpec& intensity_spec, int threads = 1,
                                int tile_batch = 8);

RasterGrid infer_scene(const Checkpoint& ckpt, const RasterGrid& pan,
                       const RasterGrid& dsm, int threads = 1);

} // namespace dsmr
