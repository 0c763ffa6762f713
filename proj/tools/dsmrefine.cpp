// dsmrefine: synthetic-scene DSM refinement pipeline in one binary.
//
// Subcommands: synth, train, infer, eval, render, profile, describe, replay.
// Exit codes: 0 success, 2 usage error, 3 numeric failure, 4 alignment error,
// 5 empty domain, 6 range error, 1 any other failure.

#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"

#include "dsmr/metrics.hpp"
#include "dsmr/synthcity.hpp"
#include "dsmr/trainer.hpp"

namespace fs = std::filesystem;
using namespace dsmr;

namespace {

constexpr const char* kToolVersion = "0.1.0";

// ---------------------------------------------------------------------------
// Run manifests: key=value lines plus the exact argv, enough to replay any
// command deterministically.
// ---------------------------------------------------------------------------

std::string quote_arg(const std::string& arg) {
    if (!arg.empty() && arg.find_first_of(" \t\"\\") == std::string::npos) return arg;
    std::string out = "\"";
    for (char c : arg) {
        if (c == '"' || c == '\\') out.push_back('\\');
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

std::vector<std::string> split_args(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    bool in_quotes = false, have = false;
    for (size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (in_quotes) {
            if (c == '\\' && i + 1 < line.size()) {
                cur.push_back(line[++i]);
            } else if (c == '"') {
                in_quotes = false;
            } else {
                cur.push_back(c);
            }
        } else if (c == '"') {
            in_quotes = true;
            have = true;
        } else if (c == ' ' || c == '\t') {
            if (have || !cur.empty()) out.push_back(cur);
            cur.clear();
            have = false;
        } else {
            cur.push_back(c);
        }
    }
    if (have || !cur.empty()) out.push_back(cur);
    return out;
}

std::string iso_now() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
    return buf;
}

class Manifest {
public:
    Manifest(std::string command, const std::vector<std::string>& argv)
        : command_(std::move(command)) {
        std::string joined;
        for (size_t i = 0; i < argv.size(); ++i) {
            if (i) joined.push_back(' ');
            joined += quote_arg(argv[i]);
        }
        set("tool", "dsmrefine");
        set("version", kToolVersion);
        set("command", command_);
        set("argv", joined);
        set("start", iso_now());
    }

    void set(const std::string& key, const std::string& value) {
        for (auto& kv : entries_)
            if (kv.first == key) {
                kv.second = value;
                return;
            }
        entries_.emplace_back(key, value);
    }
    void set(const std::string& key, double v) {
        char buf[48];
        std::snprintf(buf, sizeof(buf), "%.10g", v);
        set(key, std::string(buf));
    }
    void set(const std::string& key, int64_t v) { set(key, std::to_string(v)); }
    void set(const std::string& key, uint64_t v) { set(key, std::to_string(v)); }
    void set(const std::string& key, int v) { set(key, std::to_string(v)); }

    void write(const std::string& path) {
        set("end", iso_now());
        std::ofstream f(path, std::ios::trunc);
        if (!f) throw IoError("cannot write manifest " + path);
        for (const auto& [k, v] : entries_) f << k << "=" << v << "\n";
    }

private:
    std::string command_;
    std::vector<std::pair<std::string, std::string>> entries_;
};

// ---------------------------------------------------------------------------
// Shared option bundles
// ---------------------------------------------------------------------------

struct SynthOptions {
    std::string out;
    int size = 512;
    double pixel_size = 0.5;
    int buildings = 20;
    uint64_t seed = 1;
    std::string preset = "default";
    double terrain_amplitude = 3.0;
    double min_footprint = 8.0;
    double max_footprint = -1.0; // default scales with the scene
    double min_height = 4.0;
    double max_height = 25.0;
    double flat_fraction = 0.6;
};

DegradeConfig degrade_preset(const std::string& name, uint64_t seed) {
    DegradeConfig d;
    d.seed = seed;
    if (name == "default") return d;
    if (name == "mild") {
        d.blur_sigma_px = 0.6;
        d.noise_sigma_m = 0.3;
        d.outlier_fraction = 0.002;
        d.vegetation_count = 15;
        return d;
    }
    if (name == "heavy") {
        d.blur_sigma_px = 1.8;
        d.noise_sigma_m = 1.0;
        d.outlier_fraction = 0.01;
        d.outlier_max_m = 15.0;
        d.vegetation_count = 50;
        return d;
    }
    if (name == "none") {
        d.blur_sigma_px = 0.0;
        d.noise_sigma_m = 0.0;
        d.outlier_fraction = 0.0;
        d.vegetation_count = 0;
        return d;
    }
    throw CLI::ValidationError("--degrade-preset",
                               "unknown preset '" + name + "' (default|mild|heavy|none)");
}

void write_scene_sidecar(const std::string& path, const SceneConfig& cfg,
                         const DegradeConfig& deg, const std::string& preset) {
    std::ofstream f(path, std::ios::trunc);
    if (!f) throw IoError("cannot write sidecar " + path);
    char buf[64];
    auto num = [&](double v) {
        std::snprintf(buf, sizeof(buf), "%.10g", v);
        return std::string(buf);
    };
    f << "tool=dsmrefine\n"
      << "version=" << kToolVersion << "\n"
      << "scene.size_px=" << cfg.size_px << "\n"
      << "scene.pixel_size_m=" << num(cfg.pixel_size_m) << "\n"
      << "scene.n_buildings=" << cfg.n_buildings << "\n"
      << "scene.min_footprint_m=" << num(cfg.min_footprint_m) << "\n"
      << "scene.max_footprint_m=" << num(cfg.max_footprint_m) << "\n"
      << "scene.min_height_m=" << num(cfg.min_height_m) << "\n"
      << "scene.max_height_m=" << num(cfg.max_height_m) << "\n"
      << "scene.flat_fraction=" << num(cfg.flat_fraction) << "\n"
      << "scene.gabled_fraction=" << num(cfg.gabled_fraction) << "\n"
      << "scene.l_shape_fraction=" << num(cfg.l_shape_fraction) << "\n"
      << "scene.terrain_amplitude_m=" << num(cfg.terrain_amplitude_m) << "\n"
      << "scene.seed=" << cfg.seed << "\n"
      << "degrade.preset=" << preset << "\n"
      << "degrade.blur_sigma_px=" << num(deg.blur_sigma_px) << "\n"
      << "degrade.noise_sigma_m=" << num(deg.noise_sigma_m) << "\n"
      << "degrade.outlier_fraction=" << num(deg.outlier_fraction) << "\n"
      << "degrade.outlier_min_m=" << num(deg.outlier_min_m) << "\n"
      << "degrade.outlier_max_m=" << num(deg.outlier_max_m) << "\n"
      << "degrade.vegetation_count=" << deg.vegetation_count << "\n"
      << "degrade.veg_min_height_m=" << num(deg.veg_min_height_m) << "\n"
      << "degrade.veg_max_height_m=" << num(deg.veg_max_height_m) << "\n"
      << "degrade.veg_min_radius_m=" << num(deg.veg_min_radius_m) << "\n"
      << "degrade.veg_max_radius_m=" << num(deg.veg_max_radius_m) << "\n"
      << "degrade.seed=" << deg.seed << "\n";
}

// ---------------------------------------------------------------------------
// Command implementations
// ---------------------------------------------------------------------------

int cmd_synth(const SynthOptions& opt, const std::vector<std::string>& argv) {
    SceneConfig cfg;
    cfg.size_px = opt.size;
    cfg.pixel_size_m = opt.pixel_size;
    cfg.n_buildings = opt.buildings;
    cfg.terrain_amplitude_m = opt.terrain_amplitude;
    cfg.seed = opt.seed;
    // Unspecified footprint ceiling scales with the scene so small scenes work.
    cfg.max_footprint_m = opt.max_footprint > 0.0
                              ? opt.max_footprint
                              : std::min(40.0, opt.size * opt.pixel_size / 4.0);
    cfg.min_footprint_m = std::min(opt.min_footprint, cfg.max_footprint_m);
    cfg.min_height_m = opt.min_height;
    cfg.max_height_m = opt.max_height;
    cfg.flat_fraction = opt.flat_fraction;
    cfg.gabled_fraction = 1.0 - opt.flat_fraction;
    const DegradeConfig deg = degrade_preset(opt.preset, opt.seed + 1000003u);

    const SceneTriple scene = generate_scene(cfg, deg);
    save_scene(scene, opt.out);
    const ScenePaths paths = scene_paths(opt.out);
    write_scene_sidecar(paths.meta, cfg, deg, opt.preset);

    Manifest m("synth", argv);
    m.set("seed", cfg.seed);
    m.set("out", opt.out);
    m.set("artifact.pan", paths.pan);
    m.set("artifact.dsm_photo", paths.dsm_photo);
    m.set("artifact.dsm_gt", paths.dsm_gt);
    m.set("artifact.mask", paths.mask);
    m.write((fs::path(opt.out) / "manifest.txt").string());
    std::cout << "synth: wrote scene to " << opt.out << "\n";
    return 0;
}

struct TrainOptions {
    std::vector<std::string> data_dirs;
    std::string val_dir;
    std::string variant = "hybrid";
    std::string profile = "desk";
    std::string adv = "ls";
    int epochs = -1;
    int batch = 5;
    int64_t patches_per_epoch = 0;
    double lr = 2e-4, beta1 = 0.5, beta2 = 0.999;
    double lambda_l1 = 1000.0, gamma_normal = 10.0;
    uint64_t seed = 1;
    std::string out;
    std::string log_path;
    std::string resume;
    int checkpoint_every = 10;
    int threads = 1;
    bool condition_on_pan = false;
};

int cmd_train(const TrainOptions& opt, const std::vector<std::string>& argv) {
    TrainConfig cfg;
    if (opt.variant != "hybrid" && opt.variant != "wnet" && opt.variant != "single")
        throw CLI::ValidationError("--variant", "expected hybrid, wnet or single");
    cfg.gen.kind = generator_kind_from_string(opt.variant);
    if (opt.profile == "desk") {
        cfg.gen.depth = 6;
        cfg.gen.base_width = 16;
        cfg.epochs = 30;
    } else if (opt.profile == "paper") {
        cfg.gen.depth = 8;
        cfg.gen.base_width = 64;
        cfg.epochs = 200;
    } else {
        throw CLI::ValidationError("--profile", "expected desk or paper");
    }
    if (opt.epochs > 0) cfg.epochs = opt.epochs;
    cfg.disc.layers = 5;
    cfg.disc.base_width = cfg.gen.base_width;
    cfg.disc.condition_on_pan = opt.condition_on_pan;
    cfg.batch_size = opt.batch;
    cfg.patches_per_epoch = opt.patches_per_epoch;
    cfg.lr = opt.lr;
    cfg.beta1 = opt.beta1;
    cfg.beta2 = opt.beta2;
    cfg.weights.l1 = opt.lambda_l1;
    cfg.weights.normal = opt.gamma_normal;
    cfg.seed = opt.seed;
    cfg.threads = opt.threads;
    cfg.checkpoint_every = opt.checkpoint_every;
    cfg.checkpoint_path = opt.out;
    if (opt.adv == "ls")
        cfg.adv = AdvObjective::LeastSquares;
    else if (opt.adv == "nll")
        cfg.adv = AdvObjective::LogLikelihood;
    else
        throw CLI::ValidationError("--adv", "expected ls or nll");

    std::vector<SceneTriple> scenes;
    for (const std::string& dir : opt.data_dirs) scenes.push_back(load_scene(dir));
    std::optional<SceneTriple> val;
    if (!opt.val_dir.empty()) val = load_scene(opt.val_dir);

    std::optional<Checkpoint> resume;
    if (!opt.resume.empty()) resume = load_checkpoint(opt.resume);

    const std::string log_path =
        opt.log_path.empty() ? opt.out + ".train_log.csv" : opt.log_path;
    std::ofstream log(log_path, std::ios::trunc);
    if (!log) throw IoError("cannot open train log " + log_path);
    write_train_log_header(log);

    TrainCallbacks cb;
    cb.on_step = [&](const TrainLogRow& row) { write_train_log_row(log, row); };
    cb.on_epoch = [&](int epoch, double val_rmse) {
        std::cout << "epoch " << epoch << ": val masked RMSE " << val_rmse << " m\n";
    };

    const Checkpoint final_ckpt = train(scenes, val ? &*val : nullptr, cfg, cb,
                                        resume ? &*resume : nullptr);
    save_checkpoint(final_ckpt, opt.out);
    log.close();

    Manifest m("train", argv);
    m.set("seed", cfg.seed);
    m.set("variant", opt.variant);
    m.set("profile", opt.profile);
    m.set("epochs", cfg.epochs);
    m.set("out", opt.out);
    m.set("artifact.checkpoint", opt.out);
    m.set("artifact.log", log_path);
    m.write(opt.out + ".manifest");
    std::cout << "train: wrote checkpoint " << opt.out << " and log " << log_path << "\n";
    return 0;
}

struct InferOptions {
    std::string ckpt, pan, dsm, out;
    int threads = 1;
};

int cmd_infer(const InferOptions& opt, const std::vector<std::string>& argv) {
    const Checkpoint ckpt = load_checkpoint(opt.ckpt);
    const RasterGrid pan = read_rfg(opt.pan);
    const RasterGrid dsm = read_rfg(opt.dsm);
    const RasterGrid refined = infer_scene(ckpt, pan, dsm, opt.threads);
    write_rfg(refined, opt.out);

    Manifest m("infer", argv);
    m.set("ckpt", opt.ckpt);
    m.set("out", opt.out);
    m.set("artifact.raster", opt.out);
    m.write(opt.out + ".manifest");
    std::cout << "infer: wrote " << opt.out << "\n";
    return 0;
}

struct EvalOptions {
    std::vector<std::string> pred;
    std::string gt, mask, out;
};

int cmd_eval(const EvalOptions& opt, const std::vector<std::string>& argv) {
    const RasterGrid gt = read_rfg(opt.gt);
    const MaskGrid mask = read_rfm(opt.mask);
    std::vector<MetricsReport> reports;
    for (const std::string& pred_path : opt.pred) {
        const RasterGrid pred = read_rfg(pred_path);
        reports.push_back(evaluate(pred, gt, mask, fs::path(pred_path).stem().string()));
    }
    std::ofstream out(opt.out, std::ios::trunc);
    if (!out) throw IoError("cannot open " + opt.out);
    write_metrics_csv(out, reports);
    write_metrics_csv(std::cout, reports);

    Manifest m("eval", argv);
    m.set("gt", opt.gt);
    m.set("mask", opt.mask);
    m.set("out", opt.out);
    m.set("artifact.csv", opt.out);
    m.write(opt.out + ".manifest");
    return 0;
}

struct RenderOptions {
    std::string in, out;
    std::string mode = "colormap";
    double azimuth = 315.0, altitude = 45.0;
};

int cmd_render(const RenderOptions& opt, const std::vector<std::string>& argv) {
    const RasterGrid grid = read_rfg(opt.in);
    RenderMode mode;
    if (opt.mode == "hillshade")
        mode = RenderMode::Hillshade;
    else if (opt.mode == "colormap")
        mode = RenderMode::Colormap;
    else
        throw CLI::ValidationError("--mode", "expected hillshade or colormap");
    render_png(grid, mode, opt.out, SunVector{opt.azimuth, opt.altitude});

    Manifest m("render", argv);
    m.set("in", opt.in);
    m.set("out", opt.out);
    m.set("artifact.png", opt.out);
    m.write(opt.out + ".manifest");
    std::cout << "render: wrote " << opt.out << "\n";
    return 0;
}

struct ProfileOptions {
    std::vector<std::string> rasters;
    double x0 = 0, y0 = 0, x1 = 0, y1 = 0;
    int samples = 101;
    std::string out;
};

int cmd_profile(const ProfileOptions& opt, const std::vector<std::string>& argv) {
    std::vector<std::vector<ProfileSample>> profiles;
    std::vector<std::string> names;
    for (const std::string& path : opt.rasters) {
        const RasterGrid grid = read_rfg(path);
        profiles.push_back(extract_profile(grid, opt.x0, opt.y0, opt.x1, opt.y1,
                                           opt.samples));
        names.push_back(fs::path(path).stem().string());
    }
    std::ofstream out(opt.out, std::ios::trunc);
    if (!out) throw IoError("cannot open " + opt.out);
    out << "distance_m";
    if (names.size() == 1)
        out << ",height_m";
    else
        for (const std::string& n : names) out << "," << n;
    out << "\n";
    char buf[64];
    for (int i = 0; i < opt.samples; ++i) {
        std::snprintf(buf, sizeof(buf), "%.6f", profiles[0][static_cast<size_t>(i)].distance_m);
        out << buf;
        for (const auto& prof : profiles) {
            std::snprintf(buf, sizeof(buf), ",%.6f", prof[static_cast<size_t>(i)].height_m);
            out << buf;
        }
        out << "\n";
    }

    Manifest m("profile", argv);
    m.set("out", opt.out);
    m.set("artifact.csv", opt.out);
    m.write(opt.out + ".manifest");
    std::cout << "profile: wrote " << opt.out << "\n";
    return 0;
}

struct DescribeOptions {
    std::string variant = "hybrid";
    int depth = 6;
    int width = 16;
};

int cmd_describe(const DescribeOptions& opt) {
    GeneratorConfig cfg;
    cfg.kind = generator_kind_from_string(opt.variant);
    cfg.depth = opt.depth;
    cfg.base_width = opt.width;
    for (const std::string& line : describe_generator(cfg, cfg.patch_size()))
        std::cout << line << "\n";
    DiscriminatorConfig dc;
    dc.base_width = opt.width;
    for (const std::string& line : describe_discriminator(dc, cfg.patch_size()))
        std::cout << line << "\n";
    return 0;
}

int run_argv(std::vector<std::string> argv);

int cmd_replay(const std::string& manifest_path) {
    std::ifstream f(manifest_path);
    if (!f) throw IoError("cannot open manifest " + manifest_path);
    std::string line, argv_line;
    while (std::getline(f, line)) {
        if (line.rfind("argv=", 0) == 0) {
            argv_line = line.substr(5);
            break;
        }
    }
    if (argv_line.empty()) throw FormatError("manifest has no argv line");
    std::cout << "replay: " << argv_line << "\n";
    return run_argv(split_args(argv_line));
}

// ---------------------------------------------------------------------------
// Argument wiring
// ---------------------------------------------------------------------------

int run_argv(std::vector<std::string> argv) {
    CLI::App app{"DSM refinement pipeline: synthesize, train, infer, evaluate, render"};
    app.require_subcommand(1);

    SynthOptions synth;
    CLI::App* s = app.add_subcommand("synth", "generate a synthetic scene directory");
    s->add_option("--out", synth.out, "output directory")->required();
    s->add_option("--size", synth.size, "scene size in pixels");
    s->add_option("--pixel-size", synth.pixel_size, "pixel size in meters");
    s->add_option("--buildings", synth.buildings, "number of buildings");
    s->add_option("--seed", synth.seed, "scene seed");
    s->add_option("--terrain-amplitude", synth.terrain_amplitude, "terrain relief in meters");
    s->add_option("--degrade-preset", synth.preset, "default|mild|heavy|none");
    s->add_option("--min-footprint", synth.min_footprint, "min building side, meters");
    s->add_option("--max-footprint", synth.max_footprint, "max building side, meters");
    s->add_option("--min-height", synth.min_height, "min building height, meters");
    s->add_option("--max-height", synth.max_height, "max building height, meters");
    s->add_option("--flat-fraction", synth.flat_fraction, "share of flat roofs in [0,1]");

    TrainOptions tr;
    CLI::App* t = app.add_subcommand("train", "train a refinement model");
    t->add_option("--data", tr.data_dirs, "training scene directories")->required();
    t->add_option("--val", tr.val_dir, "validation scene directory");
    t->add_option("--variant", tr.variant, "hybrid|wnet|single");
    t->add_option("--profile", tr.profile, "desk|paper");
    t->add_option("--epochs", tr.epochs, "override epoch count");
    t->add_option("--batch", tr.batch, "batch size");
    t->add_option("--patches-per-epoch", tr.patches_per_epoch, "0 derives from scene area");
    t->add_option("--lr", tr.lr, "Adam learning rate");
    t->add_option("--beta1", tr.beta1, "Adam beta1");
    t->add_option("--beta2", tr.beta2, "Adam beta2");
    t->add_option("--lambda", tr.lambda_l1, "L1 weight");
    t->add_option("--gamma", tr.gamma_normal, "normal loss weight");
    t->add_option("--adv", tr.adv, "adversarial objective: ls|nll");
    t->add_option("--seed", tr.seed, "training seed");
    t->add_option("--out", tr.out, "checkpoint output path")->required();
    t->add_option("--log", tr.log_path, "training log CSV path");
    t->add_option("--resume", tr.resume, "checkpoint to resume from");
    t->add_option("--checkpoint-every", tr.checkpoint_every, "cadence in epochs");
    t->add_option("--threads", tr.threads, "validation inference threads");
    t->add_flag("--condition-on-pan", tr.condition_on_pan,
                "condition the discriminator on PAN as well");

    InferOptions inf;
    CLI::App* i = app.add_subcommand("infer", "refine a DSM with a trained model");
    i->add_option("--ckpt", inf.ckpt, "checkpoint path")->required();
    i->add_option("--pan", inf.pan, "PAN raster (RFG)")->required();
    i->add_option("--dsm", inf.dsm, "input DSM raster (RFG)")->required();
    i->add_option("--out", inf.out, "output raster path")->required();
    i->add_option("--threads", inf.threads, "tile inference threads");

    EvalOptions ev;
    CLI::App* e = app.add_subcommand("eval", "masked height-error metrics");
    e->add_option("--pred", ev.pred, "predicted rasters, order preserved")->required();
    e->add_option("--gt", ev.gt, "ground truth raster")->required();
    e->add_option("--mask", ev.mask, "building mask (RFM)")->required();
    e->add_option("--out", ev.out, "metrics CSV path")->required();

    RenderOptions rd;
    CLI::App* r = app.add_subcommand("render", "export a raster as PNG");
    r->add_option("--in", rd.in, "input raster")->required();
    r->add_option("--out", rd.out, "output PNG")->required();
    r->add_option("--mode", rd.mode, "hillshade|colormap");
    r->add_option("--azimuth", rd.azimuth, "sun azimuth, degrees from north");
    r->add_option("--altitude", rd.altitude, "sun altitude, degrees");

    ProfileOptions pf;
    CLI::App* p = app.add_subcommand("profile", "sample heights along a segment");
    p->add_option("--raster", pf.rasters, "rasters to overlay, one column each")->required();
    p->add_option("--x0", pf.x0, "segment start x (world)")->required();
    p->add_option("--y0", pf.y0, "segment start y (world)")->required();
    p->add_option("--x1", pf.x1, "segment end x (world)")->required();
    p->add_option("--y1", pf.y1, "segment end y (world)")->required();
    p->add_option("--n", pf.samples, "sample count");
    p->add_option("--out", pf.out, "output CSV")->required();

    DescribeOptions de;
    CLI::App* d = app.add_subcommand("describe", "print a network layer table");
    d->add_option("--variant", de.variant, "hybrid|wnet|single");
    d->add_option("--depth", de.depth, "encoder depth");
    d->add_option("--width", de.width, "base channel width");

    std::string replay_manifest;
    CLI::App* rp = app.add_subcommand("replay", "re-execute a command from its manifest");
    rp->add_option("manifest", replay_manifest, "manifest file")->required();

    std::vector<const char*> cargv;
    cargv.push_back("dsmrefine");
    for (const auto& a : argv) cargv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(cargv.size()), cargv.data());
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    if (*s) return cmd_synth(synth, argv);
    if (*t) return cmd_train(tr, argv);
    if (*i) return cmd_infer(inf, argv);
    if (*e) return cmd_eval(ev, argv);
    if (*r) return cmd_render(rd, argv);
    if (*p) return cmd_profile(pf, argv);
    if (*d) return cmd_describe(de);
    if (*rp) return cmd_replay(replay_manifest);
    return 2;
}

} // namespace

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    try {
        return run_argv(std::move(args));
    } catch (const CLI::ParseError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const NumericError& e) {
        std::cerr << "numeric failure: " << e.what() << "\n";
        return 3;
    } catch (const AlignmentError& e) {
        std::cerr << "alignment error: " << e.what() << "\n";
        return 4;
    } catch (const EmptyDomainError& e) {
        std::cerr << "empty domain: " << e.what() << "\n";
        return 5;
    } catch (const RangeError& e) {
        std::cerr << "range error: " << e.what() << "\n";
        return 6;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
