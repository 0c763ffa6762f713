#include <fstream>
#include <map>
#include <sstream>

#include "doctest.h"
#include "dsmr/network.hpp"

using namespace dsmr;

namespace {

Tensor<float> rand_input(Shape s, Rng& rng) {
    Tensor<float> t = Tensor<float>::zeros(s);
    for (float& v : t.values()) v = static_cast<float>(rng.uniform(-0.95, 0.95));
    return t;
}

GeneratorConfig tiny(GeneratorKind kind, int depth = 4, int width = 4) {
    GeneratorConfig cfg;
    cfg.kind = kind;
    cfg.depth = depth;
    cfg.base_width = width;
    return cfg;
}

} // namespace

TEST_SUITE_BEGIN("network");

TEST_CASE("skip connection counts follow the variant rules") {
    GeneratorConfig cfg;
    cfg.depth = 8;
    cfg.kind = GeneratorKind::HybridEarlyFusion;
    CHECK(generator_skip_count(cfg) == 14);
    cfg.kind = GeneratorKind::SingleStream;
    CHECK(generator_skip_count(cfg) == 7);
    cfg.kind = GeneratorKind::WNetLateFusion;
    CHECK(generator_skip_count(cfg) == 14);
}

TEST_CASE("forward passes use exactly the declared number of skips") {
    Rng init(1);
    for (const GeneratorKind kind : {GeneratorKind::SingleStream,
                                     GeneratorKind::WNetLateFusion,
                                     GeneratorKind::HybridEarlyFusion}) {
        const GeneratorConfig cfg = tiny(kind);
        Generator<float> gen(cfg, init);
        Rng rng(2);
        auto pan = rand_input({1, 1, 16, 16}, rng);
        auto dsm = rand_input({1, 1, 16, 16}, rng);
        NoGradGuard ng;
        Rng drop(3);
        gen.forward(pan, dsm, false, drop);
        CHECK(gen.skip_connections_used() == generator_skip_count(cfg));
    }
}

TEST_CASE("dry-run shape pass over all variants and patch sizes") {
    Rng init(5);
    for (const GeneratorKind kind : {GeneratorKind::SingleStream,
                                     GeneratorKind::WNetLateFusion,
                                     GeneratorKind::HybridEarlyFusion}) {
        for (const int depth : {5, 6, 8}) {
            const int patch = 1 << depth;
            GeneratorConfig cfg = tiny(kind, depth, depth == 8 ? 1 : 2);
            Generator<float> gen(cfg, init);
            NoGradGuard ng;
            auto pan = Tensor<float>::zeros({1, 1, patch, patch});
            auto dsm = Tensor<float>::zeros({1, 1, patch, patch});
            Rng drop(1);
            const auto out = gen.forward(pan, dsm, false, drop);
            CHECK(out.shape() == Shape{1, 1, patch, patch});
        }
    }
}

TEST_CASE("describe reports a 1x1 bottleneck for patch 256 at depth 8") {
    GeneratorConfig cfg = tiny(GeneratorKind::HybridEarlyFusion, 8, 1);
    const auto lines = describe_generator(cfg, 256);
    bool saw_bottleneck = false;
    for (const auto& line : lines)
        if (line.find("enc.7") != std::string::npos && line.find(" 1x1") != std::string::npos)
            saw_bottleneck = true;
    CHECK(saw_bottleneck);
}

TEST_CASE("generator output lies inside the tanh range") {
    Rng init(7);
    Generator<float> gen(tiny(GeneratorKind::HybridEarlyFusion), init);
    Rng rng(8);
    auto pan = rand_input({2, 1, 16, 16}, rng);
    auto dsm = rand_input({2, 1, 16, 16}, rng);
    NoGradGuard ng;
    Rng drop(9);
    const auto out = gen.forward(pan, dsm, false, drop);
    for (float v : out.values()) {
        CHECK(v > -1.0f);
        CHECK(v < 1.0f);
    }
}

TEST_CASE("eval mode forwards are deterministic") {
    Rng init(11);
    Generator<float> gen(tiny(GeneratorKind::HybridEarlyFusion), init);
    Rng rng(12);
    auto pan = rand_input({1, 1, 16, 16}, rng);
    auto dsm = rand_input({1, 1, 16, 16}, rng);
    NoGradGuard ng;
    Rng d1(1), d2(999);
    const auto a = gen.forward(pan, dsm, false, d1);
    const auto b = gen.forward(pan, dsm, false, d2);
    CHECK(a.values() == b.values());
}

TEST_CASE("single stream ignores the pan argument entirely") {
    Rng init(13);
    Generator<float> gen(tiny(GeneratorKind::SingleStream), init);
    Rng rng(14);
    auto pan1 = rand_input({1, 1, 16, 16}, rng);
    auto pan2 = rand_input({1, 1, 16, 16}, rng);
    auto dsm = rand_input({1, 1, 16, 16}, rng);
    NoGradGuard ng;
    Rng drop(1);
    const auto a = gen.forward(pan1, dsm, false, drop);
    const auto b = gen.forward(pan2, dsm, false, drop);
    CHECK(a.values() == b.values());
}

TEST_CASE("hybrid output depends on both inputs") {
    Rng init(15);
    Generator<float> gen(tiny(GeneratorKind::HybridEarlyFusion), init);
    Rng rng(16);
    auto pan = rand_input({1, 1, 16, 16}, rng);
    auto dsm = rand_input({1, 1, 16, 16}, rng);
    NoGradGuard ng;
    Rng drop(1);
    const auto base = gen.forward(pan, dsm, false, drop);

    auto pan2 = pan.detach();
    pan2.values()[40] += 0.05f;
    const auto moved_pan = gen.forward(pan2, dsm, false, drop);
    CHECK(moved_pan.values() != base.values());

    auto dsm2 = dsm.detach();
    dsm2.values()[40] += 0.05f;
    const auto moved_dsm = gen.forward(pan, dsm2, false, drop);
    CHECK(moved_dsm.values() != base.values());
}

TEST_CASE("unnormalized inputs are rejected") {
    Rng init(17);
    Generator<float> gen(tiny(GeneratorKind::HybridEarlyFusion), init);
    auto pan = Tensor<float>::zeros({1, 1, 16, 16});
    auto dsm = Tensor<float>::full({1, 1, 16, 16}, 1.5f);
    Rng drop(1);
    CHECK_THROWS_AS(gen.forward(pan, dsm, false, drop), ValidationError);
}

TEST_CASE("identity stub passes the dsm through") {
    GeneratorConfig cfg;
    cfg.kind = GeneratorKind::IdentityStub;
    Rng init(18);
    Generator<float> gen(cfg, init);
    CHECK(gen.params().entries().empty());
    Rng rng(19);
    auto pan = rand_input({1, 1, 8, 8}, rng);
    auto dsm = rand_input({1, 1, 8, 8}, rng);
    Rng drop(1);
    CHECK(gen.forward(pan, dsm, false, drop).values() == dsm.values());
}

TEST_CASE("discriminator score map: five halvings of 256 give 8x8, in (0,1)") {
    DiscriminatorConfig cfg;
    cfg.layers = 5;
    cfg.base_width = 1;
    Rng init(21);
    Discriminator<float> disc(cfg, init);
    Rng rng(22);
    auto cond = rand_input({1, 1, 256, 256}, rng);
    auto cand = rand_input({1, 1, 256, 256}, rng);
    NoGradGuard ng;
    const auto score = disc.forward({cond}, cand, false);
    CHECK(score.shape() == Shape{1, 1, 8, 8});
    for (float v : score.values()) {
        CHECK(v > 0.0f);
        CHECK(v < 1.0f);
    }
}

TEST_CASE("discriminator with zeroed parameters scores a constant half") {
    DiscriminatorConfig cfg;
    cfg.layers = 4;
    cfg.base_width = 2;
    Rng init(23);
    Discriminator<float> disc(cfg, init);
    // zero every trainable weight; running var stays 1 so eval BN is benign
    for (const auto& name : disc.params().trainable_names())
        for (float& v : disc.params().get(name).values()) v = 0.0f;
    Rng rng(24);
    auto cond = rand_input({1, 1, 32, 32}, rng);
    auto cand = rand_input({1, 1, 32, 32}, rng);
    NoGradGuard ng;
    const auto score = disc.forward({cond}, cand, false);
    for (float v : score.values()) CHECK(v == doctest::Approx(0.5));
}

TEST_CASE("parameter counts: hybrid exceeds single and is below twice wnet") {
    for (const auto& [depth, width] : {std::pair{6, 16}, {8, 64}}) {
        const int64_t hybrid =
            generator_param_count(tiny(GeneratorKind::HybridEarlyFusion, depth, width));
        const int64_t single =
            generator_param_count(tiny(GeneratorKind::SingleStream, depth, width));
        const int64_t wnet =
            generator_param_count(tiny(GeneratorKind::WNetLateFusion, depth, width));
        CHECK(hybrid > single);
        CHECK(hybrid < 2 * wnet);
    }
}

TEST_CASE("allocated parameter totals match the layout arithmetic") {
    Rng init(25);
    for (const GeneratorKind kind : {GeneratorKind::SingleStream,
                                     GeneratorKind::WNetLateFusion,
                                     GeneratorKind::HybridEarlyFusion}) {
        const GeneratorConfig cfg = tiny(kind, 5, 3);
        Generator<float> gen(cfg, init);
        CHECK(gen.params().trainable_element_count() == generator_param_count(cfg));
    }
    DiscriminatorConfig dc;
    dc.layers = 5;
    dc.base_width = 3;
    Discriminator<float> disc(dc, init);
    CHECK(disc.params().trainable_element_count() == discriminator_param_count(dc));
}

TEST_CASE("parameter counts match the frozen golden file") {
    std::ifstream golden(std::string(DSMR_GOLDEN_DIR) + "/param_counts.txt");
    REQUIRE(golden.good());
    std::map<std::string, int64_t> expected;
    std::string key;
    int64_t count;
    while (golden >> key >> count) expected[key] = count;
    REQUIRE(!expected.empty());

    auto check = [&](const std::string& name, GeneratorKind kind, int depth, int width) {
        REQUIRE(expected.count(name) == 1);
        CHECK(expected[name] == generator_param_count(tiny(kind, depth, width)));
    };
    check("hybrid_d6_w16", GeneratorKind::HybridEarlyFusion, 6, 16);
    check("single_d6_w16", GeneratorKind::SingleStream, 6, 16);
    check("wnet_d6_w16", GeneratorKind::WNetLateFusion, 6, 16);
    check("hybrid_d8_w64", GeneratorKind::HybridEarlyFusion, 8, 64);
    check("single_d8_w64", GeneratorKind::SingleStream, 8, 64);
    check("wnet_d8_w64", GeneratorKind::WNetLateFusion, 8, 64);

    DiscriminatorConfig dc;
    dc.layers = 5;
    dc.base_width = 16;
    REQUIRE(expected.count("disc_l5_w16") == 1);
    CHECK(expected["disc_l5_w16"] == discriminator_param_count(dc));
}

TEST_CASE("weight init reproducibility and statistics") {
    Rng a(31), b(31);
    Generator<float> g1(tiny(GeneratorKind::SingleStream), a);
    Generator<float> g2(tiny(GeneratorKind::SingleStream), b);
    for (size_t i = 0; i < g1.params().entries().size(); ++i)
        CHECK(g1.params().entries()[i].tensor.values() ==
              g2.params().entries()[i].tensor.values());

    // conv weights near sd 0.02, biases exactly zero, bn gamma near 1
    const auto& w = g1.params().get("g.enc1.1.weight").values();
    double var = 0.0;
    for (float v : w) var += static_cast<double>(v) * v;
    var /= static_cast<double>(w.size());
    CHECK(std::sqrt(var) == doctest::Approx(0.02).epsilon(0.25));
    for (float v : g1.params().get("g.enc1.0.bias").values()) CHECK(v == 0.0f);
    double mean_gamma = 0.0;
    const auto& gamma = g1.params().get("g.enc1.1.bn.gamma").values();
    for (float v : gamma) mean_gamma += v;
    CHECK(mean_gamma / gamma.size() == doctest::Approx(1.0).epsilon(0.05));
}

TEST_SUITE_END();
