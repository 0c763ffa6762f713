#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "dsmr/metrics.hpp"
#include "dsmr/trainer.hpp"
#include "test_util.hpp"

#include <sys/wait.h>

using namespace dsmr;
using dsmr::test::tmp_dir;
namespace fs = std::filesystem;

namespace {

int run_cli(const std::string& args, const std::string& capture = "") {
    std::string cmd = std::string(DSMR_CLI_PATH) + " " + args;
    if (!capture.empty())
        cmd += " >" + capture + " 2>&1";
    else
        cmd += " >/dev/null 2>&1";
    const int rc = std::system(cmd.c_str());
    REQUIRE(rc != -1);
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::string file_bytes(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    REQUIRE(f.good());
    return std::string((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
}

std::string read_text(const std::string& path) { return file_bytes(path); }

// The wall_s column is wall-clock time and legitimately differs between
// runs; compare training logs with it blanked out.
std::string strip_wall_column(const std::string& csv) {
    std::istringstream in(csv);
    std::string line, out;
    while (std::getline(in, line)) {
        const size_t comma = line.rfind(',');
        out += line.substr(0, comma);
        out += "\n";
    }
    return out;
}

std::string identity_ckpt_path(int depth) {
    const std::string path = tmp_dir("cli") + "/identity_d" + std::to_string(depth) + ".ckpt";
    Checkpoint ckpt;
    ckpt.gen.kind = GeneratorKind::IdentityStub;
    ckpt.gen.depth = depth;
    ckpt.gen.base_width = 1;
    ckpt.height_norm = {NormSpec::Kind::Height, -100.0f, 300.0f};
    ckpt.intensity_norm = {NormSpec::Kind::Intensity, 0.0f, 255.0f};
    save_checkpoint(ckpt, path);
    return path;
}

} // namespace

TEST_SUITE_BEGIN("cli");

TEST_CASE("synth is deterministic and replayable") {
    const std::string dir = tmp_dir("cli");
    const std::string a = dir + "/scene_a";
    const std::string b = dir + "/scene_b";
    REQUIRE(run_cli("synth --out " + a + " --size 96 --buildings 3 --seed 7") == 0);
    REQUIRE(run_cli("synth --out " + b + " --size 96 --buildings 3 --seed 7") == 0);
    for (const char* name : {"pan.rfg", "dsm_photo.rfg", "dsm_gt.rfg", "mask.rfm",
                             "scene_meta.txt"})
        CHECK(file_bytes(a + "/" + name) == file_bytes(b + "/" + name));

    // replay from the manifest overwrites byte-identically
    const std::string before = file_bytes(a + "/dsm_gt.rfg");
    REQUIRE(run_cli("replay " + a + "/manifest.txt") == 0);
    CHECK(file_bytes(a + "/dsm_gt.rfg") == before);
}

TEST_CASE("synth with zero buildings yields an all-zero mask") {
    const std::string dir = tmp_dir("cli") + "/empty_scene";
    REQUIRE(run_cli("synth --out " + dir + " --size 64 --buildings 0 --seed 3") == 0);
    const MaskGrid mask = read_rfm(dir + "/mask.rfm");
    for (uint8_t v : mask.values) CHECK(v == 0);
}

TEST_CASE("usage errors exit with code 2") {
    CHECK(run_cli("synth --size 64") == 2);                       // missing --out
    CHECK(run_cli("synth --out /tmp/x --degrade-preset nope") == 2);
    CHECK(run_cli("train --data /tmp --out /tmp/x --variant wat") == 2);
    CHECK(run_cli("definitely-not-a-command") == 2);
}

TEST_CASE("describe prints parameter counts") {
    const std::string out = tmp_dir("cli") + "/describe.txt";
    REQUIRE(run_cli("describe --variant hybrid --depth 6 --width 16", out) == 0);
    const std::string text = read_text(out);
    CHECK(text.find("parameters=") != std::string::npos);
    CHECK(text.find("skips=10") != std::string::npos); // 2*(6-1)
}

TEST_CASE("eval emits ordered rows and gates on empty masks") {
    const std::string dir = tmp_dir("cli") + "/eval_scene";
    REQUIRE(run_cli("synth --out " + dir + " --size 64 --buildings 2 --seed 11") == 0);

    const std::string csv = dir + "/metrics.csv";
    REQUIRE(run_cli("eval --pred " + dir + "/dsm_gt.rfg --pred " + dir +
                    "/dsm_photo.rfg --gt " + dir + "/dsm_gt.rfg --mask " + dir +
                    "/mask.rfm --out " + csv) == 0);
    std::istringstream in(read_text(csv));
    std::string header, row1, row2;
    std::getline(in, header);
    std::getline(in, row1);
    std::getline(in, row2);
    CHECK(header == "method,rmse_m,nmad_m,mae_m,n_pixels");
    CHECK(row1.rfind("dsm_gt,0.000000,0.000000,0.000000,", 0) == 0);
    CHECK(row2.rfind("dsm_photo,", 0) == 0);

    // all-zero mask -> exit 5
    MaskGrid zeros = read_rfm(dir + "/mask.rfm");
    std::fill(zeros.values.begin(), zeros.values.end(), 0);
    write_rfm(zeros, dir + "/zeros.rfm");
    CHECK(run_cli("eval --pred " + dir + "/dsm_gt.rfg --gt " + dir + "/dsm_gt.rfg --mask " +
                  dir + "/zeros.rfm --out " + dir + "/z.csv") == 5);
}

TEST_CASE("infer with an identity checkpoint reproduces the dsm") {
    const std::string dir = tmp_dir("cli") + "/infer_scene";
    REQUIRE(run_cli("synth --out " + dir + " --size 96 --buildings 2 --seed 13") == 0);
    const std::string ckpt = identity_ckpt_path(5); // patch 32

    const std::string out1 = dir + "/refined1.rfg";
    const std::string out2 = dir + "/refined2.rfg";
    REQUIRE(run_cli("infer --ckpt " + ckpt + " --pan " + dir + "/pan.rfg --dsm " + dir +
                    "/dsm_photo.rfg --out " + out1) == 0);
    REQUIRE(run_cli("infer --ckpt " + ckpt + " --pan " + dir + "/pan.rfg --dsm " + dir +
                    "/dsm_photo.rfg --out " + out2) == 0);
    CHECK(file_bytes(out1) == file_bytes(out2));

    const RasterGrid dsm = read_rfg(dir + "/dsm_photo.rfg");
    const RasterGrid refined = read_rfg(out1);
    double max_err = 0.0;
    for (size_t i = 0; i < dsm.values.size(); ++i)
        max_err = std::max(max_err,
                           std::abs(static_cast<double>(refined.values[i]) - dsm.values[i]));
    CHECK(max_err < 1e-4);

    // replay reproduces the refined raster byte for byte
    REQUIRE(run_cli("replay " + out1 + ".manifest") == 0);
    CHECK(file_bytes(out1) == file_bytes(out2));
}

TEST_CASE("infer rejects misaligned rasters with exit 4") {
    const std::string dir = tmp_dir("cli") + "/mis_scene";
    REQUIRE(run_cli("synth --out " + dir + " --size 64 --buildings 1 --seed 17") == 0);
    RasterGrid pan = read_rfg(dir + "/pan.rfg");
    pan.transform.origin_x += 5.0;
    write_rfg(pan, dir + "/pan_shift.rfg");
    const std::string ckpt = identity_ckpt_path(5);
    CHECK(run_cli("infer --ckpt " + ckpt + " --pan " + dir + "/pan_shift.rfg --dsm " + dir +
                  "/dsm_photo.rfg --out " + dir + "/x.rfg") == 4);
}

TEST_CASE("render produces a PNG with matching dimensions") {
    const std::string dir = tmp_dir("cli") + "/render_scene";
    REQUIRE(run_cli("synth --out " + dir + " --size 64 --buildings 2 --seed 19") == 0);
    REQUIRE(run_cli("render --in " + dir + "/dsm_gt.rfg --out " + dir +
                    "/gt.png --mode colormap") == 0);
    const auto img = dsmr::test::read_png_for_test(dir + "/gt.png");
    CHECK(img.width == 64);
    CHECK(img.height == 64);
    CHECK(img.channels == 3);
    REQUIRE(run_cli("render --in " + dir + "/dsm_gt.rfg --out " + dir +
                    "/gt_hs.png --mode hillshade") == 0);
    const auto hs = dsmr::test::read_png_for_test(dir + "/gt_hs.png");
    CHECK(hs.channels == 1);
}

TEST_CASE("profile emits one column per raster and gates on range") {
    const std::string dir = tmp_dir("cli") + "/profile_scene";
    REQUIRE(run_cli("synth --out " + dir + " --size 64 --buildings 1 --seed 23") == 0);
    const std::string csv = dir + "/profile.csv";
    REQUIRE(run_cli("profile --raster " + dir + "/dsm_gt.rfg --raster " + dir +
                    "/dsm_photo.rfg --raster " + dir +
                    "/pan.rfg --x0 1 --y0 -1 --x1 25 --y1 -25 --n 11 --out " + csv) == 0);
    std::istringstream in(read_text(csv));
    std::string header;
    std::getline(in, header);
    CHECK(header == "distance_m,dsm_gt,dsm_photo,pan");
    int rows = 0;
    std::string line;
    while (std::getline(in, line)) {
        ++rows;
        CHECK(std::count(line.begin(), line.end(), ',') == 3);
    }
    CHECK(rows == 11);

    CHECK(run_cli("profile --raster " + dir + "/dsm_gt.rfg --x0 0 --y0 0 --x1 9999 --y1 0 "
                  "--n 5 --out " + dir + "/bad.csv") == 6);
}

TEST_CASE("train smoke via the CLI is deterministic and variant-sensitive") {
    const std::string dir = tmp_dir("cli") + "/train_scene";
    REQUIRE(run_cli("synth --out " + dir + " --size 64 --buildings 2 --seed 29") == 0);

    const std::string base = "train --data " + dir + " --val " + dir +
                             " --profile desk --epochs 1 --batch 1 --patches-per-epoch 2 "
                             "--seed 31 --checkpoint-every 1 ";
    const std::string ck1 = dir + "/run1.ckpt";
    const std::string ck2 = dir + "/run2.ckpt";
    REQUIRE(run_cli(base + "--variant hybrid --out " + ck1) == 0);
    REQUIRE(run_cli(base + "--variant hybrid --out " + ck2) == 0);
    CHECK(file_bytes(ck1) == file_bytes(ck2));
    CHECK(strip_wall_column(read_text(ck1 + ".train_log.csv")) ==
          strip_wall_column(read_text(ck2 + ".train_log.csv")));
    std::istringstream log(read_text(ck1 + ".train_log.csv"));
    std::string line;
    int rows = -1; // header
    while (std::getline(log, line)) ++rows;
    CHECK(rows >= 1);

    const std::string cks = dir + "/single.ckpt";
    REQUIRE(run_cli(base + "--variant single --out " + cks) == 0);
    const Checkpoint hybrid = load_checkpoint(ck1);
    const Checkpoint single = load_checkpoint(cks);
    auto g_count = [](const Checkpoint& c) {
        int64_t acc = 0;
        for (const auto& blob : c.params)
            if (blob.name.rfind("g.", 0) == 0) acc += static_cast<int64_t>(blob.data.size());
        return acc;
    };
    CHECK(g_count(hybrid) > g_count(single));
}

TEST_SUITE_END();
