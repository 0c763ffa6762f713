#pragma once

#include "dsmr/tensor.hpp"
#include "dsmr/tiling.hpp"

namespace dsmr {

// The least-squares adversarial objective is the default; the log-likelihood
// form is kept selectable for ablations.
enum class AdvObjective { LeastSquares, LogLikelihood };

struct LossWeights {
    double l1 = 1000.0;     // lambda
    double normal = 10.0;   // gamma

    void validate() const {
        if (l1 < 0.0 || normal < 0.0) throw ConfigError("loss weights must be >= 0");
    }
};

// mean((d_real - 1)^2) + mean(d_fake^2)
template <typename T>
Tensor<T> lsgan_d_loss(const Tensor<T>& d_real, const Tensor<T>& d_fake) {
    detail::require_same_shape(d_real, d_fake, "lsgan_d_loss");
    return add(reduce_mean(square(add_scalar(d_real, T(-1)))),
               reduce_mean(square(d_fake)));
}

// mean((d_fake - 1)^2), the non-saturating least-squares generator target.
template <typename T>
Tensor<T> lsgan_g_loss(const Tensor<T>& d_fake) {
    return reduce_mean(square(add_scalar(d_fake, T(-1))));
}

// Negative log-likelihood forms of the same game.
template <typename T>
Tensor<T> nll_d_loss(const Tensor<T>& d_real, const Tensor<T>& d_fake) {
    detail::require_same_shape(d_real, d_fake, "nll_d_loss");
    auto log_t = [](const Tensor<T>& x) {
        return map_unary(x, [](T v) { return std::log(v); }, [](T xv, T) { return T(1) / xv; });
    };
    auto one_minus = [](const Tensor<T>& x) { return affine(x, T(-1), T(1)); };
    return scale(add(reduce_mean(log_t(d_real)), reduce_mean(log_t(one_minus(d_fake)))), T(-1));
}

template <typename T>
Tensor<T> nll_g_loss(const Tensor<T>& d_fake) {
    auto lg = map_unary(d_fake, [](T v) { return std::log(v); },
                        [](T xv, T) { return T(1) / xv; });
    return scale(reduce_mean(lg), T(-1));
}

template <typename T>
Tensor<T> adv_d_loss(const Tensor<T>& d_real, const Tensor<T>& d_fake, AdvObjective kind) {
    return kind == AdvObjective::LeastSquares ? lsgan_d_loss(d_real, d_fake)
                                              : nll_d_loss(d_real, d_fake);
}

template <typename T>
Tensor<T> adv_g_loss(const Tensor<T>& d_fake, AdvObjective kind) {
    return kind == AdvObjective::LeastSquares ? lsgan_g_loss(d_fake)
                                              : nll_g_loss(d_fake);
}

// Mean absolute difference.
template <typename T>
Tensor<T> l1_loss(const Tensor<T>& pred, const Tensor<T>& target) {
    detail::require_same_shape(pred, target, "l1_loss");
    return reduce_mean(abs_val(sub(pred, target)));
}

// ---------------------------------------------------------------------------
// Surface normals and the normal vector loss
// ---------------------------------------------------------------------------

// Unit surface normals over the interior pixels of a height map,
// N x 3 x (H-2) x (W-2); border pixels lack central differences.
template <typename T>
struct NormalField {
    Tensor<T> vectors;
    int64_t count = 0; // valid normals per the whole batch
};

// Central differences over the physical spacing; the unnormalized normal is
// (-dh/dx, -dh/dy, 1), then unit-normalized. Differentiable w.r.t. the DSM.
template <typename T>
NormalField<T> normals_from_dsm(const Tensor<T>& dsm, double spacing) {
    const Shape s = dsm.shape();
    if (s.c != 1) throw ShapeError("normals: expected single-channel heights");
    if (s.h < 3 || s.w < 3) throw ShapeError("normals: grid must be at least 3x3");
    if (!(spacing > 0.0)) throw ConfigError("normals: spacing must be positive");
    const int ih = s.h - 2, iw = s.w - 2;
    const T inv2s = static_cast<T>(1.0 / (2.0 * spacing));

    Tensor<T> dzdx = scale(sub(crop_spatial(dsm, 1, 2, ih, iw), crop_spatial(dsm, 1, 0, ih, iw)), inv2s);
    Tensor<T> dzdy = scale(sub(crop_spatial(dsm, 2, 1, ih, iw), crop_spatial(dsm, 0, 1, ih, iw)), inv2s);

    Tensor<T> ones = Tensor<T>::full(Shape{s.n, 1, ih, iw}, T(1));
    Tensor<T> mag = sqrt_val(add(add(square(dzdx), square(dzdy)), ones));
    Tensor<T> nx = div(scale(dzdx, T(-1)), mag);
    Tensor<T> ny = div(scale(dzdy, T(-1)), mag);
    Tensor<T> nz = div(ones, mag);

    NormalField<T> field;
    field.vectors = concat_channels<T>({nx, ny, nz});
    field.count = static_cast<int64_t>(s.n) * ih * iw;
    return field;
}

// (1/m) * sum(1 - <n_t, n_p>); the fields carry unit vectors so the cosine is
// the plain dot product. Range [0, 2].
template <typename T>
Tensor<T> normal_loss(const NormalField<T>& pred, const NormalField<T>& target) {
    if (pred.count == 0 || target.count == 0)
        throw EmptyDomainError("normal_loss: no valid normals");
    detail::require_same_shape(pred.vectors, target.vectors, "normal_loss");
    Tensor<T> dots = sum_channels(mul(pred.vectors, target.vectors));
    return add_scalar(scale(reduce_mean(dots), T(-1)), T(1));
}

// ---------------------------------------------------------------------------
// Composite generator objective: adv + lambda * L1 + gamma * normal loss.
// L1 acts on normalized values; normals act on denormalized heights.
// ---------------------------------------------------------------------------

template <typename T>
struct GeneratorLoss {
    Tensor<T> total;
    T adv = T(0);
    T l1 = T(0);
    T normal = T(0);
};

template <typename T>
GeneratorLoss<T> total_g_loss(const Tensor<T>& d_fake, const Tensor<T>& pred,
                              const Tensor<T>& target, const NormSpec& height_spec,
                              double spacing, const LossWeights& weights,
                              AdvObjective adv_kind = AdvObjective::LeastSquares) {
    weights.validate();
    height_spec.validate();
    GeneratorLoss<T> out;

    Tensor<T> adv = adv_g_loss(d_fake, adv_kind);
    Tensor<T> l1 = l1_loss(pred, target);

    // Denormalization is affine, hence differentiable.
    const T dn_mul = static_cast<T>((height_spec.hi - height_spec.lo) * 0.5f);
    const T dn_add = static_cast<T>((height_spec.hi + height_spec.lo) * 0.5f);
    NormalField<T> n_pred = normals_from_dsm(affine(pred, dn_mul, dn_add), spacing);
    NormalField<T> n_target = normals_from_dsm(affine(target, dn_mul, dn_add), spacing);
    Tensor<T> nl = normal_loss(n_pred, n_target);

    out.adv = adv.item();
    out.l1 = l1.item();
    out.normal = nl.item();

    Tensor<T> total = add(adv, scale(l1, static_cast<T>(weights.l1)));
    if (weights.normal > 0.0)
        total = add(total, scale(nl, static_cast<T>(weights.normal)));
    out.total = total;
    return out;
}

} // namespace dsmr
