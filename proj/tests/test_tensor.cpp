#include <numeric>

#include "doctest.h"
#include "dsmr/adam.hpp"
#include "dsmr/nn_ops.hpp"
#include "dsmr/tensor.hpp"

using namespace dsmr;

namespace {

Tensor<double> rand_tensor(Shape s, Rng& rng, double lo = -1.0, double hi = 1.0) {
    Tensor<double> t = Tensor<double>::zeros(s);
    for (double& v : t.values()) v = rng.uniform(lo, hi);
    return t;
}

// Values bounded away from zero, for ops with kinks there.
Tensor<double> rand_tensor_away_from_zero(Shape s, Rng& rng, double min_abs = 0.1) {
    Tensor<double> t = Tensor<double>::zeros(s);
    for (double& v : t.values()) {
        const double mag = rng.uniform(min_abs, 1.0);
        v = rng.uniform() < 0.5 ? -mag : mag;
    }
    return t;
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double acc = 0.0;
    for (size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
    return acc;
}

} // namespace

TEST_SUITE_BEGIN("tensor");

TEST_CASE("shape bookkeeping and leaf basics") {
    Tensor<float> t = Tensor<float>::zeros({2, 3, 4, 5});
    CHECK(t.size() == 120);
    CHECK(t.shape().str() == "2x3x4x5");
    CHECK_THROWS_AS(Tensor<float>::from({1, 1, 2, 2}, {1.0f, 2.0f}), ShapeError);
    CHECK_THROWS_AS(t.item(), ShapeError);
}

TEST_CASE("elementwise ops forward values") {
    auto a = Tensor<double>::from({1, 1, 1, 3}, {1, 2, 3});
    auto b = Tensor<double>::from({1, 1, 1, 3}, {4, 5, 6});
    CHECK(add(a, b).values() == std::vector<double>{5, 7, 9});
    CHECK(sub(b, a).values() == std::vector<double>{3, 3, 3});
    CHECK(mul(a, b).values() == std::vector<double>{4, 10, 18});
    CHECK(div(b, a).values() == std::vector<double>{4, 2.5, 2});
    CHECK(affine(a, 2.0, 1.0).values() == std::vector<double>{3, 5, 7});
    CHECK(abs_val(Tensor<double>::from({1, 1, 1, 2}, {-2, 2})).values() ==
          std::vector<double>{2, 2});
}

TEST_CASE("activation values match their definitions") {
    auto x = Tensor<double>::from({1, 1, 1, 4}, {-1.0, 0.0, 3.0, -0.5});
    const auto lr = lrelu(x, 0.2).values();
    CHECK(lr[0] == doctest::Approx(-0.2));
    CHECK(lr[1] == 0.0);
    CHECK(lr[2] == 3.0);
    CHECK(lr[3] == doctest::Approx(-0.1));

    CHECK(tanh_act(Tensor<double>::from({1, 1, 1, 1}, {0.0})).item() == 0.0);
    CHECK(sigmoid(Tensor<double>::from({1, 1, 1, 1}, {0.0})).item() == 0.5);
    CHECK(relu(Tensor<double>::from({1, 1, 1, 2}, {-3.0, 3.0})).values() ==
          std::vector<double>{0.0, 3.0});
    CHECK_THROWS_AS(lrelu(x, 0.0), ConfigError);
}

TEST_CASE("reduce_mean value, gradient, and summation oracle") {
    auto x = Tensor<double>::from({1, 1, 1, 3}, {1, 2, 3}, true);
    auto m = reduce_mean(x);
    CHECK(m.item() == doctest::Approx(2.0));
    m.backward();
    for (double g : x.grad()) CHECK(g == doctest::Approx(1.0 / 3.0));

    auto q = Tensor<double>::from({1, 1, 2, 2}, {1, 2, 3, 4}, true);
    reduce_mean(q).backward();
    for (double g : q.grad()) CHECK(g == doctest::Approx(0.25));

    Rng rng(9);
    std::vector<double> big(100000);
    for (double& v : big) v = rng.uniform(-100.0, 100.0);
    double seq = 0.0;
    for (double v : big) seq += v;
    auto t = Tensor<double>::from({1, 1, 100, 1000}, big);
    CHECK(reduce_mean(t).item() == doctest::Approx(seq / 100000.0).epsilon(1e-6));
}

TEST_CASE("concat and slice are inverse and split gradients") {
    Rng rng(3);
    auto a = rand_tensor({1, 2, 4, 4}, rng);
    auto b = rand_tensor({1, 3, 4, 4}, rng);
    auto cat = concat_channels(a, b);
    CHECK(cat.shape() == Shape{1, 5, 4, 4});
    CHECK(slice_channels(cat, 0, 2).values() == a.values());
    CHECK(slice_channels(cat, 2, 5).values() == b.values());

    a.set_requires_grad(true);
    b.set_requires_grad(true);
    reduce_sum(concat_channels(a, b)).backward();
    for (double g : a.grad()) CHECK(g == 1.0);
    for (double g : b.grad()) CHECK(g == 1.0);

    auto c = rand_tensor({1, 2, 3, 3}, rng);
    CHECK_THROWS_AS(concat_channels(a, c), ShapeError);
}

TEST_CASE("conv2d forward examples") {
    auto x = Tensor<double>::full({1, 1, 3, 3}, 1.0);
    auto w = Tensor<double>::full({1, 1, 3, 3}, 1.0);
    auto b = Tensor<double>::zeros({1, 1, 1, 1});
    auto y = conv2d(x, w, b, 1, 0);
    CHECK(y.shape() == Shape{1, 1, 1, 1});
    CHECK(y.item() == doctest::Approx(9.0));

    auto x2 = Tensor<double>::full({1, 1, 4, 4}, 1.0);
    auto w2 = Tensor<double>::full({2, 1, 4, 4}, 1.0);
    auto b2 = Tensor<double>::zeros({1, 2, 1, 1});
    CHECK(conv2d(x2, w2, b2, 2, 1).shape() == Shape{1, 2, 2, 2});

    auto wbad = Tensor<double>::full({1, 3, 3, 3}, 1.0);
    CHECK_THROWS_AS(conv2d(x, wbad, b, 1, 0), ShapeError);
}

TEST_CASE("conv_transpose2d shape and linearity") {
    auto x = Tensor<double>::full({1, 1, 2, 2}, 1.0);
    auto w = Tensor<double>::full({1, 1, 4, 4}, 1.0);
    auto b = Tensor<double>::zeros({1, 1, 1, 1});
    CHECK(conv_transpose2d(x, w, b, 2, 1).shape() == Shape{1, 1, 4, 4});

    // zero input -> output is the broadcast bias
    auto xz = Tensor<double>::zeros({1, 2, 3, 3});
    auto w2 = Tensor<double>::full({2, 3, 4, 4}, 0.5);
    auto b2 = Tensor<double>::from({1, 3, 1, 1}, {1.0, 2.0, 3.0});
    auto y = conv_transpose2d(xz, w2, b2, 2, 1);
    CHECK(y.shape() == Shape{1, 3, 6, 6});
    for (int c = 0; c < 3; ++c)
        for (int i = 0; i < 36; ++i)
            CHECK(y.values()[static_cast<size_t>(c) * 36 + i] == doctest::Approx(c + 1.0));
}

TEST_CASE("conv pair satisfies the adjoint inner-product identity") {
    Rng rng(17);
    for (int trial = 0; trial < 10; ++trial) {
        const int ci = static_cast<int>(rng.uniform_int(1, 3));
        const int co = static_cast<int>(rng.uniform_int(1, 3));
        const int hw = 6;
        auto x = rand_tensor({2, ci, hw, hw}, rng);
        auto w = rand_tensor({co, ci, 4, 4}, rng);
        auto zb_y = Tensor<double>::zeros({1, co, 1, 1});
        auto zb_x = Tensor<double>::zeros({1, ci, 1, 1});
        auto cx = conv2d(x, w, zb_y, 2, 1);
        auto y = rand_tensor(cx.shape(), rng);
        auto cty = conv_transpose2d(y, w, zb_x, 2, 1);
        const double lhs = dot(cx.values(), y.values());
        const double rhs = dot(x.values(), cty.values());
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-10));
    }
}

TEST_CASE("conv2d gradient matches finite differences") {
    Rng rng(21);
    auto x = rand_tensor({1, 2, 6, 6}, rng);
    auto w = rand_tensor({3, 2, 3, 3}, rng, -0.5, 0.5);
    auto b = rand_tensor({1, 3, 1, 1}, rng, -0.1, 0.1);
    auto f = [](std::vector<Tensor<double>>& in) {
        return reduce_mean(square(conv2d(in[0], in[1], in[2], 1, 1)));
    };
    const auto rep = grad_check(f, {x, w, b});
    CHECK(rep.max_rel_err < 1e-4);
}

TEST_CASE("conv_transpose2d gradient matches finite differences") {
    Rng rng(22);
    auto x = rand_tensor({1, 2, 3, 3}, rng);
    auto w = rand_tensor({2, 3, 4, 4}, rng, -0.5, 0.5);
    auto b = rand_tensor({1, 3, 1, 1}, rng, -0.1, 0.1);
    auto f = [](std::vector<Tensor<double>>& in) {
        return reduce_mean(square(conv_transpose2d(in[0], in[1], in[2], 2, 1)));
    };
    const auto rep = grad_check(f, {x, w, b});
    CHECK(rep.max_rel_err < 1e-4);
}

TEST_CASE("batch_norm normalizes in train mode") {
    Rng rng(31);
    auto x = rand_tensor({4, 3, 5, 5}, rng, -4.0, 7.0);
    auto gamma = Tensor<double>::full({1, 3, 1, 1}, 1.0);
    auto beta = Tensor<double>::zeros({1, 3, 1, 1});
    std::vector<double> rm(3, 0.0), rv(3, 1.0);
    auto y = batch_norm(x, gamma, beta, rm, rv, true);
    for (int c = 0; c < 3; ++c) {
        double mean = 0.0, var = 0.0;
        std::vector<double> vals;
        for (int n = 0; n < 4; ++n)
            for (int i = 0; i < 25; ++i)
                vals.push_back(y.values()[(n * 3 + c) * 25 + i]);
        for (double v : vals) mean += v;
        mean /= vals.size();
        for (double v : vals) var += (v - mean) * (v - mean);
        var /= vals.size();
        CHECK(mean == doctest::Approx(0.0).epsilon(1e-4));
        CHECK(std::abs(var - 1.0) < 1e-4);
    }
    // running stats moved towards the batch stats
    CHECK(rm[0] != 0.0);
    CHECK(rv[0] != 1.0);
}

TEST_CASE("batch_norm collapses to beta when gamma is zero") {
    Rng rng(32);
    auto x = rand_tensor({2, 2, 4, 4}, rng);
    auto gamma = Tensor<double>::zeros({1, 2, 1, 1});
    auto beta = Tensor<double>::full({1, 2, 1, 1}, 5.0);
    std::vector<double> rm(2, 0.0), rv(2, 1.0);
    auto y = batch_norm(x, gamma, beta, rm, rv, true);
    for (double v : y.values()) CHECK(v == doctest::Approx(5.0));
}

TEST_CASE("batch_norm rejects degenerate statistics") {
    auto x = Tensor<double>::full({1, 2, 1, 1}, 1.0);
    auto gamma = Tensor<double>::full({1, 2, 1, 1}, 1.0);
    auto beta = Tensor<double>::zeros({1, 2, 1, 1});
    std::vector<double> rm(2, 0.0), rv(2, 1.0);
    CHECK_THROWS_AS(batch_norm(x, gamma, beta, rm, rv, true), ValidationError);
    CHECK_NOTHROW(batch_norm(x, gamma, beta, rm, rv, false)); // eval mode is fine
}

TEST_CASE("batch_norm gradient matches finite differences in both modes") {
    Rng rng(33);
    for (const bool train : {true, false}) {
        auto x = rand_tensor({2, 2, 3, 3}, rng, -2.0, 2.0);
        auto gamma = rand_tensor({1, 2, 1, 1}, rng, 0.5, 1.5);
        auto beta = rand_tensor({1, 2, 1, 1}, rng, -0.5, 0.5);
        auto f = [train](std::vector<Tensor<double>>& in) {
            std::vector<double> rm{0.1, -0.2}, rv{1.3, 0.7};
            return reduce_mean(square(batch_norm(in[0], in[1], in[2], rm, rv, train)));
        };
        const auto rep = grad_check(f, {x, gamma, beta});
        CHECK(rep.max_rel_err < 1e-4);
    }
}

TEST_CASE("activation gradients match finite differences away from kinks") {
    Rng rng(34);
    auto x = rand_tensor_away_from_zero({1, 2, 4, 4}, rng);
    for (int kind = 0; kind < 4; ++kind) {
        auto f = [kind](std::vector<Tensor<double>>& in) {
            Tensor<double> y;
            switch (kind) {
                case 0: y = relu(in[0]); break;
                case 1: y = lrelu(in[0], 0.2); break;
                case 2: y = tanh_act(in[0]); break;
                default: y = sigmoid(in[0]); break;
            }
            return reduce_mean(square(y));
        };
        const auto rep = grad_check(f, {x});
        CHECK(rep.max_rel_err < 1e-4);
    }
}

TEST_CASE("dropout eval and zero-rate are the identity") {
    Rng rng(35);
    auto x = rand_tensor({1, 1, 8, 8}, rng);
    Rng r1(1);
    CHECK(dropout(x, 0.0, true, r1).values() == x.values());
    CHECK(dropout(x, 0.7, false, r1).values() == x.values());
    CHECK_THROWS_AS(dropout(x, 1.0, true, r1), ConfigError);
}

TEST_CASE("dropout statistics: survivor fraction and mean preservation") {
    auto x = Tensor<double>::full({1, 1, 1000, 1000}, 1.0);
    Rng rng(36);
    auto y = dropout(x, 0.5, true, rng);
    int64_t survivors = 0;
    double sum = 0.0;
    for (double v : y.values()) {
        if (v != 0.0) ++survivors;
        sum += v;
    }
    const double frac = static_cast<double>(survivors) / 1e6;
    CHECK(frac == doctest::Approx(0.5).epsilon(0.02));
    CHECK(sum / 1e6 == doctest::Approx(1.0).epsilon(0.01));
}

TEST_CASE("dropout gradient with a fixed mask matches finite differences") {
    Rng rng(37);
    auto x = rand_tensor({1, 1, 5, 5}, rng);
    auto f = [](std::vector<Tensor<double>>& in) {
        Rng fixed(123);
        return reduce_mean(square(dropout(in[0], 0.4, true, fixed)));
    };
    const auto rep = grad_check(f, {x});
    CHECK(rep.max_rel_err < 1e-4);
}

TEST_CASE("crop and elementwise gradients match finite differences") {
    Rng rng(38);
    auto a = rand_tensor_away_from_zero({1, 1, 5, 5}, rng);
    auto b = rand_tensor_away_from_zero({1, 1, 5, 5}, rng, 0.3);
    auto f = [](std::vector<Tensor<double>>& in) {
        auto c = crop_spatial(in[0], 1, 1, 3, 3);
        auto d = crop_spatial(in[1], 1, 1, 3, 3);
        auto q = div(mul(c, c), add_scalar(abs_val(d), 1.0));
        return reduce_mean(sqrt_val(add_scalar(square(q), 0.5)));
    };
    const auto rep = grad_check(f, {a, b});
    CHECK(rep.max_rel_err < 1e-4);
}

TEST_CASE("grad_check on sum of squares is near exact") {
    Rng rng(39);
    auto x = rand_tensor({1, 1, 4, 4}, rng);
    auto f = [](std::vector<Tensor<double>>& in) { return reduce_sum(square(in[0])); };
    const auto rep = grad_check(f, {x});
    CHECK(rep.max_rel_err < 1e-6);
}

TEST_CASE("grad_check detects a wrong backward rule") {
    Rng rng(40);
    auto x = rand_tensor_away_from_zero({1, 1, 3, 3}, rng, 0.5);
    auto f = [](std::vector<Tensor<double>>& in) {
        // forward x^2 but a backward rule claiming 3x^2
        auto bad = map_unary(in[0], [](double v) { return v * v; },
                             [](double xv, double) { return 3.0 * xv * xv; });
        return reduce_sum(bad);
    };
    const auto rep = grad_check(f, {x});
    CHECK(rep.max_rel_err > 1e-2);
}

TEST_CASE("backward accumulates into leaves across reuse") {
    auto x = Tensor<double>::from({1, 1, 1, 2}, {2.0, 3.0}, true);
    auto y = add(mul(x, x), x); // y = x^2 + x, dy/dx = 2x + 1
    reduce_sum(y).backward();
    CHECK(x.grad()[0] == doctest::Approx(5.0));
    CHECK(x.grad()[1] == doctest::Approx(7.0));
}

TEST_CASE("adam first step and fixed points") {
    auto w = Tensor<float>::zeros({1, 1, 1, 1}, true);
    Adam<float> adam({w}, 2e-4f, 0.5f, 0.999f);
    reduce_sum(w).backward(); // gradient 1
    adam.step();
    CHECK(w.values()[0] == doctest::Approx(-2e-4).epsilon(1e-6));

    // zero gradients leave parameters unchanged
    auto p = Tensor<float>::from({1, 1, 1, 1}, {0.75f}, true);
    Adam<float> adam2({p}, 2e-4f, 0.5f, 0.999f);
    for (int i = 0; i < 5; ++i) {
        p.zero_grad();
        adam2.step();
        CHECK(p.values()[0] == 0.75f);
    }
}

TEST_CASE("adam treats identical parameters identically") {
    auto a = Tensor<float>::from({1, 1, 1, 3}, {0.1f, 0.2f, 0.3f}, true);
    auto b = Tensor<float>::from({1, 1, 1, 3}, {0.1f, 0.2f, 0.3f}, true);
    Adam<float> adam({a, b}, 1e-3f, 0.9f, 0.999f);
    for (int i = 0; i < 4; ++i) {
        a.zero_grad();
        b.zero_grad();
        reduce_sum(square(a)).backward();
        reduce_sum(square(b)).backward();
        adam.step();
        CHECK(a.values() == b.values());
    }
}

TEST_CASE("adam fails fast on non-finite gradients") {
    auto w = Tensor<float>::zeros({1, 1, 1, 1}, true);
    Adam<float> adam({w}, 1e-3f, 0.9f, 0.999f);
    w.zero_grad();
    w.node()->grad[0] = std::numeric_limits<float>::quiet_NaN();
    CHECK_THROWS_AS(adam.step(), NumericError);
}

TEST_SUITE_END();
