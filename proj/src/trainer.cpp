#include "dsmr/trainer.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <thread>

#include "dsmr/metrics.hpp"

namespace dsmr {

void TrainConfig::validate() const {
    gen.validate();
    disc.validate();
    weights.validate();
    if (gen.kind == GeneratorKind::IdentityStub)
        throw ConfigError("train: the identity stub cannot be trained");
    if (epochs < 1) throw ConfigError("train: epochs must be >= 1");
    if (batch_size < 1) throw ConfigError("train: batch size must be >= 1");
    if (patches_per_epoch < 0) throw ConfigError("train: negative patches per epoch");
    if (!(lr > 0.0)) throw ConfigError("train: learning rate must be positive");
    if (beta1 < 0.0 || beta1 >= 1.0 || beta2 < 0.0 || beta2 >= 1.0)
        throw ConfigError("train: momentum parameters must lie in [0,1)");
    if (checkpoint_every < 0) throw ConfigError("train: negative checkpoint cadence");
    if (threads < 1) throw ConfigError("train: threads must be >= 1");
}

void write_train_log_header(std::ostream& out) {
    out << "epoch,step,d_loss,g_adv,g_l1,g_normal,g_total,wall_s\n";
}

void write_train_log_row(std::ostream& out, const TrainLogRow& row) {
    char buf[192];
    std::snprintf(buf, sizeof(buf), "%d,%d,%.6f,%.6f,%.6f,%.6f,%.6f,%.3f\n", row.epoch,
                  row.step, row.d_loss, row.g_adv, row.g_l1, row.g_normal, row.g_total,
                  row.wall_s);
    out << buf;
}

// ---------------------------------------------------------------------------
// Checkpoint serialization: magic TGCK, version, descriptor, parameters,
// then the optimizer section behind an ADAM tag. Little-endian throughout.
// ---------------------------------------------------------------------------

namespace {

void put_u16(std::string& out, uint16_t v) {
    out.push_back(static_cast<char>(v & 0xff));
    out.push_back(static_cast<char>((v >> 8) & 0xff));
}

void put_u32(std::string& out, uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_f32(std::string& out, float v) {
    uint32_t bits;
    std::memcpy(&bits, &v, 4);
    put_u32(out, bits);
}

struct Reader {
    const std::string& buf;
    size_t pos = 0;
    const std::string& path;

    void need(size_t n) const {
        if (pos + n > buf.size()) throw FormatError(path + ": truncated checkpoint");
    }
    uint8_t u8() {
        need(1);
        return static_cast<uint8_t>(buf[pos++]);
    }
    uint16_t u16() {
        need(2);
        uint16_t v = static_cast<uint8_t>(buf[pos]) |
                     (static_cast<uint16_t>(static_cast<uint8_t>(buf[pos + 1])) << 8);
        pos += 2;
        return v;
    }
    uint32_t u32() {
        need(4);
        uint32_t v = 0;
        for (int i = 0; i < 4; ++i)
            v |= static_cast<uint32_t>(static_cast<uint8_t>(buf[pos + i])) << (8 * i);
        pos += 4;
        return v;
    }
    float f32() {
        const uint32_t bits = u32();
        float v;
        std::memcpy(&v, &bits, 4);
        return v;
    }
    std::string bytes(size_t n) {
        need(n);
        std::string s = buf.substr(pos, n);
        pos += n;
        return s;
    }
};

uint8_t kind_code(GeneratorKind k) {
    switch (k) {
        case GeneratorKind::SingleStream: return 0;
        case GeneratorKind::WNetLateFusion: return 1;
        case GeneratorKind::HybridEarlyFusion: return 2;
        case GeneratorKind::IdentityStub: return 255;
    }
    throw ConfigError("unknown generator kind");
}

GeneratorKind kind_from_code(uint8_t code) {
    switch (code) {
        case 0: return GeneratorKind::SingleStream;
        case 1: return GeneratorKind::WNetLateFusion;
        case 2: return GeneratorKind::HybridEarlyFusion;
        case 255: return GeneratorKind::IdentityStub;
    }
    throw FormatError("checkpoint: unknown generator kind code " + std::to_string(code));
}

void put_blob(std::string& out, const TensorBlob& blob) {
    if (blob.name.size() > 0xffff) throw IntegrityError("parameter name too long");
    put_u16(out, static_cast<uint16_t>(blob.name.size()));
    out.append(blob.name);
    out.push_back(static_cast<char>(blob.dims.size()));
    int64_t count = 1;
    for (uint32_t d : blob.dims) {
        put_u32(out, d);
        count *= d;
    }
    if (static_cast<int64_t>(blob.data.size()) != count)
        throw IntegrityError("parameter " + blob.name + ": data does not match dims");
    for (float v : blob.data) put_f32(out, v);
}

TensorBlob read_blob(Reader& r) {
    TensorBlob blob;
    const uint16_t name_len = r.u16();
    blob.name = r.bytes(name_len);
    const uint8_t rank = r.u8();
    int64_t count = 1;
    for (int i = 0; i < rank; ++i) {
        blob.dims.push_back(r.u32());
        count *= blob.dims.back();
    }
    if (count < 0 || count > (int64_t(1) << 33))
        throw FormatError("checkpoint: implausible tensor size for " + blob.name);
    blob.data.resize(static_cast<size_t>(count));
    r.need(static_cast<size_t>(count) * 4);
    for (int64_t i = 0; i < count; ++i) blob.data[static_cast<size_t>(i)] = r.f32();
    return blob;
}

} // namespace

void save_checkpoint(const Checkpoint& ckpt, const std::string& path) {
    std::string out;
    out.append("TGCK");
    put_u16(out, ckpt.version);
    out.push_back(static_cast<char>(kind_code(ckpt.gen.kind)));
    out.push_back(static_cast<char>(ckpt.disc.condition_on_pan ? 1 : 0));
    put_u16(out, static_cast<uint16_t>(ckpt.gen.depth));
    put_u16(out, static_cast<uint16_t>(ckpt.gen.base_width));
    put_u16(out, static_cast<uint16_t>(ckpt.disc.layers));
    put_u16(out, static_cast<uint16_t>(ckpt.disc.base_width));
    put_f32(out, static_cast<float>(ckpt.gen.dropout_rate));
    put_u16(out, static_cast<uint16_t>(ckpt.gen.dropout_layers));
    put_u32(out, ckpt.epoch);
    put_f32(out, ckpt.height_norm.lo);
    put_f32(out, ckpt.height_norm.hi);
    put_f32(out, ckpt.intensity_norm.lo);
    put_f32(out, ckpt.intensity_norm.hi);
    put_u32(out, static_cast<uint32_t>(ckpt.params.size()));
    for (const TensorBlob& blob : ckpt.params) put_blob(out, blob);
    out.append("ADAM");
    put_u32(out, static_cast<uint32_t>(ckpt.opt.size()));
    for (const TensorBlob& blob : ckpt.opt) put_blob(out, blob);

    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("cannot open " + path + " for writing");
    f.write(out.data(), static_cast<std::streamsize>(out.size()));
    if (!f) throw IoError("write failed on " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open " + path);
    std::string buf((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    if (buf.size() < 4 || buf.compare(0, 4, "TGCK") != 0)
        throw FormatError(path + ": bad magic, expected TGCK");
    Reader r{buf, 4, path};
    Checkpoint ckpt;
    ckpt.version = r.u16();
    if (ckpt.version != 1)
        throw FormatError(path + ": unsupported checkpoint version " +
                          std::to_string(ckpt.version));
    ckpt.gen.kind = kind_from_code(r.u8());
    ckpt.disc.condition_on_pan = r.u8() != 0;
    ckpt.gen.depth = r.u16();
    ckpt.gen.base_width = r.u16();
    ckpt.disc.layers = r.u16();
    ckpt.disc.base_width = r.u16();
    ckpt.gen.dropout_rate = r.f32();
    ckpt.gen.dropout_layers = r.u16();
    ckpt.epoch = r.u32();
    ckpt.height_norm = {NormSpec::Kind::Height, r.f32(), r.f32()};
    float ilo = r.f32(), ihi = r.f32();
    ckpt.intensity_norm = {NormSpec::Kind::Intensity, ilo, ihi};
    const uint32_t nparams = r.u32();
    ckpt.params.reserve(nparams);
    for (uint32_t i = 0; i < nparams; ++i) ckpt.params.push_back(read_blob(r));
    if (r.bytes(4) != "ADAM") throw FormatError(path + ": missing optimizer section tag");
    const uint32_t nopt = r.u32();
    ckpt.opt.reserve(nopt);
    for (uint32_t i = 0; i < nopt; ++i) ckpt.opt.push_back(read_blob(r));
    if (r.pos != buf.size()) throw FormatError(path + ": trailing bytes");
    return ckpt;
}

// ---------------------------------------------------------------------------
// Checkpoint <-> network transfer
// ---------------------------------------------------------------------------

namespace {

std::vector<uint32_t> shape_dims(const Shape& s) {
    return {static_cast<uint32_t>(s.n), static_cast<uint32_t>(s.c),
            static_cast<uint32_t>(s.h), static_cast<uint32_t>(s.w)};
}

template <typename Store>
void append_store_blobs(const Store& store, std::vector<TensorBlob>& out) {
    for (const auto& e : store.entries())
        out.push_back({e.name, shape_dims(e.tensor.shape()), e.tensor.values()});
}

// Populate a store from blobs following the expected layout exactly.
ParamStore<float> store_from_blobs(const std::vector<ParamDesc>& layout,
                                   const std::vector<TensorBlob>& blobs,
                                   const std::string& prefix) {
    std::unordered_map<std::string, const TensorBlob*> by_name;
    for (const auto& blob : blobs)
        if (blob.name.rfind(prefix, 0) == 0) by_name[blob.name] = &blob;

    ParamStore<float> store;
    for (const ParamDesc& d : layout) {
        auto it = by_name.find(d.name);
        if (it == by_name.end())
            throw IntegrityError("checkpoint: missing parameter " + d.name);
        const TensorBlob& blob = *it->second;
        if (blob.dims != shape_dims(d.shape))
            throw IntegrityError("checkpoint: shape mismatch for " + d.name);
        auto& t = store.create(d.name, d.shape,
                               d.trainable ? ParamStore<float>::Kind::Trainable
                                           : ParamStore<float>::Kind::Buffer);
        t.values() = blob.data;
        by_name.erase(it);
    }
    if (!by_name.empty())
        throw IntegrityError("checkpoint: unexpected parameter " + by_name.begin()->first);
    return store;
}

Checkpoint snapshot(const TrainConfig& cfg, const Generator<float>& gen,
                    const Discriminator<float>& disc, const Adam<float>& adam_g,
                    const Adam<float>& adam_d, const NormSpec& hspec, const NormSpec& ispec,
                    uint32_t epoch) {
    Checkpoint ckpt;
    ckpt.gen = cfg.gen;
    ckpt.disc = cfg.disc;
    ckpt.height_norm = hspec;
    ckpt.intensity_norm = ispec;
    ckpt.epoch = epoch;
    append_store_blobs(gen.params(), ckpt.params);
    append_store_blobs(disc.params(), ckpt.params);

    ckpt.opt.push_back({"adam.t", {2},
                        {static_cast<float>(adam_g.step_count()),
                         static_cast<float>(adam_d.step_count())}});
    const auto add_moments = [&](const Adam<float>& adam, const ParamStore<float>& store) {
        const auto names = store.trainable_names();
        for (size_t i = 0; i < names.size(); ++i) {
            ckpt.opt.push_back({"adam.m." + names[i], {static_cast<uint32_t>(adam.first_moment(i).size())},
                                adam.first_moment(i)});
            ckpt.opt.push_back({"adam.v." + names[i], {static_cast<uint32_t>(adam.second_moment(i).size())},
                                adam.second_moment(i)});
        }
    };
    add_moments(adam_g, gen.params());
    add_moments(adam_d, disc.params());
    return ckpt;
}

void restore_adam(Adam<float>& adam, const ParamStore<float>& store, int64_t t,
                  const std::vector<TensorBlob>& opt) {
    std::unordered_map<std::string, const TensorBlob*> by_name;
    for (const auto& blob : opt) by_name[blob.name] = &blob;
    adam.set_step_count(t);
    const auto names = store.trainable_names();
    for (size_t i = 0; i < names.size(); ++i) {
        const auto m = by_name.find("adam.m." + names[i]);
        const auto v = by_name.find("adam.v." + names[i]);
        if (m == by_name.end() || v == by_name.end())
            throw IntegrityError("checkpoint: missing optimizer state for " + names[i]);
        if (m->second->data.size() != adam.first_moment(i).size() ||
            v->second->data.size() != adam.second_moment(i).size())
            throw IntegrityError("checkpoint: optimizer state size mismatch for " + names[i]);
        adam.first_moment(i) = m->second->data;
        adam.second_moment(i) = v->second->data;
    }
}

} // namespace

Generator<float> generator_from_checkpoint(const Checkpoint& ckpt) {
    ParamStore<float> store =
        store_from_blobs(generator_param_layout(ckpt.gen), ckpt.params, "g.");
    return Generator<float>(ckpt.gen, std::move(store));
}

Discriminator<float> discriminator_from_checkpoint(const Checkpoint& ckpt) {
    ParamStore<float> store =
        store_from_blobs(discriminator_param_layout(ckpt.disc), ckpt.params, "d.");
    return Discriminator<float>(ckpt.disc, std::move(store));
}

// ---------------------------------------------------------------------------
// Inference
// ---------------------------------------------------------------------------

RasterGrid infer_with_generator(Generator<float>& gen, const RasterGrid& pan,
                                const RasterGrid& dsm, const NormSpec& height_spec,
                                const NormSpec& intensity_spec, int threads,
                                int tile_batch) {
    require_aligned(pan, dsm, "infer");
    height_spec.validate();
    intensity_spec.validate();
    if (tile_batch < 1) tile_batch = 1;
    const int patch = gen.config().patch_size();

    RasterGrid norm_pan = pan;
    norm_pan.values = normalize(pan.values, intensity_spec);
    RasterGrid norm_dsm = dsm;
    norm_dsm.values = normalize(dsm.values, height_spec);

    const std::vector<TileWindow> windows = plan_inference_tiles(dsm.width, dsm.height, patch);
    std::vector<std::vector<float>> tiles(windows.size());

    const int64_t groups = (static_cast<int64_t>(windows.size()) + tile_batch - 1) / tile_batch;
    auto run_group = [&](int64_t g) {
        NoGradGuard no_grad;
        const size_t begin = static_cast<size_t>(g) * tile_batch;
        const size_t end = std::min(windows.size(), begin + tile_batch);
        const int nb = static_cast<int>(end - begin);
        const size_t plane = static_cast<size_t>(patch) * patch;
        std::vector<float> pan_buf(nb * plane), dsm_buf(nb * plane);
        for (int i = 0; i < nb; ++i) {
            const std::vector<float> pw = cut_window(norm_pan, windows[begin + i]);
            const std::vector<float> dw = cut_window(norm_dsm, windows[begin + i]);
            std::copy(pw.begin(), pw.end(), pan_buf.begin() + i * plane);
            std::copy(dw.begin(), dw.end(), dsm_buf.begin() + i * plane);
        }
        const Shape shape{nb, 1, patch, patch};
        Tensor<float> pan_t = Tensor<float>::from(shape, std::move(pan_buf));
        Tensor<float> dsm_t = Tensor<float>::from(shape, std::move(dsm_buf));
        Rng dummy(0);
        Tensor<float> out = gen.forward(pan_t, dsm_t, false, dummy);
        if (!(out.shape() == shape))
            throw ShapeError("infer: generator output shape " + out.shape().str() +
                             " does not match input " + shape.str());
        for (int i = 0; i < nb; ++i) {
            tiles[begin + i].assign(out.values().begin() + i * plane,
                                    out.values().begin() + (i + 1) * plane);
        }
    };

    if (threads <= 1 || groups <= 1) {
        for (int64_t g = 0; g < groups; ++g) run_group(g);
    } else {
        std::atomic<int64_t> next{0};
        std::vector<std::thread> pool;
        const int nthreads = static_cast<int>(std::min<int64_t>(threads, groups));
        for (int t = 0; t < nthreads; ++t) {
            pool.emplace_back([&] {
                for (int64_t g = next.fetch_add(1); g < groups; g = next.fetch_add(1))
                    run_group(g);
            });
        }
        for (auto& th : pool) th.join();
    }

    // Accumulation order is fixed by the window plan, not by thread timing.
    std::vector<float> stitched = stitch(dsm.width, dsm.height, patch, windows, tiles);

    RasterGrid out = dsm;
    out.values = denormalize(stitched, height_spec);
    return out;
}

RasterGrid infer_scene(const Checkpoint& ckpt, const RasterGrid& pan,
                       const RasterGrid& dsm, int threads) {
    Generator<float> gen = generator_from_checkpoint(ckpt);
    return infer_with_generator(gen, pan, dsm, ckpt.height_norm, ckpt.intensity_norm,
                                threads);
}

// ---------------------------------------------------------------------------
// Training
// ---------------------------------------------------------------------------

Checkpoint train(const std::vector<SceneTriple>& scenes, const SceneTriple* val,
                 const TrainConfig& cfg, const TrainCallbacks& cb,
                 const Checkpoint* resume) {
    cfg.validate();
    if (scenes.empty()) throw ConfigError("train: no training scenes");
    const int patch = cfg.patch();
    int64_t total_area = 0;
    for (const SceneTriple& s : scenes) {
        require_aligned(s.pan, s.dsm_photo, "train scene");
        require_aligned(s.pan, s.dsm_gt, "train scene");
        require_aligned(s.pan, s.mask, "train scene");
        if (s.dsm_gt.width < patch || s.dsm_gt.height < patch)
            throw ConfigError("train: scene smaller than patch size");
        total_area += static_cast<int64_t>(s.dsm_gt.width) * s.dsm_gt.height;
    }
    const double spacing = scenes[0].dsm_gt.transform.pixel_size_x;

    const NormSpec hspec = resume ? resume->height_norm : height_norm_from_scenes(scenes);
    const NormSpec ispec = resume ? resume->intensity_norm : intensity_norm_from_scenes(scenes);

    // Stream 0 initializes weights; stream e drives epoch e.
    Rng init_rng = Rng::derive(cfg.seed, 0);
    Generator<float> gen = resume ? generator_from_checkpoint(*resume)
                                  : Generator<float>(cfg.gen, init_rng);
    Discriminator<float> disc = resume ? discriminator_from_checkpoint(*resume)
                                       : Discriminator<float>(cfg.disc, init_rng);

    Adam<float> adam_g(gen.params().trainable(), static_cast<float>(cfg.lr),
                       static_cast<float>(cfg.beta1), static_cast<float>(cfg.beta2));
    Adam<float> adam_d(disc.params().trainable(), static_cast<float>(cfg.lr),
                       static_cast<float>(cfg.beta1), static_cast<float>(cfg.beta2));
    int start_epoch = 0;
    if (resume) {
        if (resume->gen.kind != cfg.gen.kind || resume->gen.depth != cfg.gen.depth ||
            resume->gen.base_width != cfg.gen.base_width ||
            resume->disc.layers != cfg.disc.layers ||
            resume->disc.base_width != cfg.disc.base_width ||
            resume->disc.condition_on_pan != cfg.disc.condition_on_pan)
            throw ConfigError("train: resume checkpoint architecture differs from config");
        if (resume->opt.empty() || resume->opt[0].name != "adam.t" ||
            resume->opt[0].data.size() != 2)
            throw IntegrityError("checkpoint: missing optimizer step counts");
        restore_adam(adam_g, gen.params(), static_cast<int64_t>(resume->opt[0].data[0]),
                     resume->opt);
        restore_adam(adam_d, disc.params(), static_cast<int64_t>(resume->opt[0].data[1]),
                     resume->opt);
        start_epoch = static_cast<int>(resume->epoch);
        if (start_epoch >= cfg.epochs)
            throw ConfigError("train: checkpoint already at or past the target epoch");
    }

    const int64_t patch_area = static_cast<int64_t>(patch) * patch;
    const int64_t ppe = cfg.patches_per_epoch > 0
                            ? cfg.patches_per_epoch
                            : (total_area + patch_area - 1) / patch_area;
    const int64_t steps_per_epoch = (ppe + cfg.batch_size - 1) / cfg.batch_size;
    const size_t plane = static_cast<size_t>(patch) * patch;
    const int nb = cfg.batch_size;

    const auto t0 = std::chrono::steady_clock::now();
    auto wall = [&] {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    };

    Checkpoint latest;
    for (int epoch = start_epoch + 1; epoch <= cfg.epochs; ++epoch) {
        Rng er = Rng::derive(cfg.seed, static_cast<uint64_t>(epoch));
        for (int64_t step = 1; step <= steps_per_epoch; ++step) {
            std::vector<float> pan_buf(nb * plane), dsm_buf(nb * plane), gt_buf(nb * plane);
            for (int b = 0; b < nb; ++b) {
                const size_t idx = static_cast<size_t>(
                    er.uniform_int(0, static_cast<int64_t>(scenes.size()) - 1));
                const PatchTriple patch_t =
                    sample_training_patch(scenes[idx], patch, hspec, ispec, er);
                std::copy(patch_t.pan.values().begin(), patch_t.pan.values().end(),
                          pan_buf.begin() + b * plane);
                std::copy(patch_t.dsm.values().begin(), patch_t.dsm.values().end(),
                          dsm_buf.begin() + b * plane);
                std::copy(patch_t.gt.values().begin(), patch_t.gt.values().end(),
                          gt_buf.begin() + b * plane);
            }
            const Shape bshape{nb, 1, patch, patch};
            Tensor<float> pan_b = Tensor<float>::from(bshape, std::move(pan_buf));
            Tensor<float> dsm_b = Tensor<float>::from(bshape, std::move(dsm_buf));
            Tensor<float> gt_b = Tensor<float>::from(bshape, std::move(gt_buf));

            // One generator forward per step; the discriminator sees it
            // detached, the generator step differentiates through it.
            Tensor<float> fake = gen.forward(pan_b, dsm_b, true, er);

            std::vector<Tensor<float>> condition{dsm_b};
            if (cfg.disc.condition_on_pan) condition.push_back(pan_b);

            // Discriminator step.
            gen.params().zero_grads();
            disc.params().zero_grads();
            Tensor<float> d_real = disc.forward(condition, gt_b, true);
            Tensor<float> d_fake = disc.forward(condition, fake.detach(), true);
            Tensor<float> d_loss = adv_d_loss(d_real, d_fake, cfg.adv);
            if (!std::isfinite(d_loss.item()))
                throw NumericError("train: non-finite discriminator loss at epoch " +
                                   std::to_string(epoch));
            d_loss.backward();
            adam_d.step();

            // Generator step, through the updated discriminator.
            gen.params().zero_grads();
            disc.params().zero_grads();
            Tensor<float> d_fake2 = disc.forward(condition, fake, true);
            GeneratorLoss<float> g_loss = total_g_loss(d_fake2, fake, gt_b, hspec, spacing,
                                                       cfg.weights, cfg.adv);
            if (!std::isfinite(g_loss.total.item()))
                throw NumericError("train: non-finite generator loss at epoch " +
                                   std::to_string(epoch));
            g_loss.total.backward();
            adam_g.step();

            if (cb.on_step) {
                TrainLogRow row;
                row.epoch = epoch;
                row.step = static_cast<int>(step);
                row.d_loss = d_loss.item();
                row.g_adv = g_loss.adv;
                row.g_l1 = g_loss.l1;
                row.g_normal = g_loss.normal;
                row.g_total = g_loss.total.item();
                row.wall_s = wall();
                cb.on_step(row);
            }
        }

        if (val && cb.on_epoch) {
            RasterGrid pred = infer_with_generator(gen, val->pan, val->dsm_photo, hspec,
                                                   ispec, cfg.threads);
            cb.on_epoch(epoch, rmse(pred, val->dsm_gt, val->mask));
        }

        latest = snapshot(cfg, gen, disc, adam_g, adam_d, hspec, ispec,
                          static_cast<uint32_t>(epoch));
        if (cfg.checkpoint_every > 0 && !cfg.checkpoint_path.empty() &&
            (epoch % cfg.checkpoint_every == 0 || epoch == cfg.epochs))
            save_checkpoint(latest, cfg.checkpoint_path);
    }
    return latest;
}

} // namespace dsmr
