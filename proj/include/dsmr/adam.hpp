#pragma once

#include <cmath>
#include <vector>

#include "dsmr/tensor.hpp"

namespace dsmr {

// Adam with bias correction. Owns first/second moment buffers per parameter;
// parameters keep their order for checkpoint round trips.
template <typename T>
class Adam {
public:
    Adam(std::vector<Tensor<T>> params, T lr, T beta1, T beta2, T eps = T(1e-8))
        : params_(std::move(params)), lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps) {
        m_.reserve(params_.size());
        v_.reserve(params_.size());
        for (const auto& p : params_) {
            m_.emplace_back(p.values().size(), T(0));
            v_.emplace_back(p.values().size(), T(0));
        }
    }

    // One update from the gradients currently stored on the parameters.
    void step() {
        ++t_;
        const T c1 = T(1) / (T(1) - std::pow(beta1_, static_cast<T>(t_)));
        const T c2 = T(1) / (T(1) - std::pow(beta2_, static_cast<T>(t_)));
        for (size_t i = 0; i < params_.size(); ++i) {
            auto& p = params_[i];
            if (!p.has_grad())
                throw NumericError("adam: parameter has no gradient");
            const auto& g = p.grad();
            auto& vals = p.values();
            auto& m = m_[i];
            auto& v = v_[i];
            for (size_t j = 0; j < vals.size(); ++j) {
                const T gj = g[j];
                if (!std::isfinite(gj))
                    throw NumericError("adam: non-finite gradient encountered");
                m[j] = beta1_ * m[j] + (T(1) - beta1_) * gj;
                v[j] = beta2_ * v[j] + (T(1) - beta2_) * gj * gj;
                const T mhat = m[j] * c1;
                const T vhat = v[j] * c2;
                vals[j] -= lr_ * mhat / (std::sqrt(vhat) + eps_);
            }
        }
    }

    int64_t step_count() const { return t_; }
    void set_step_count(int64_t t) { t_ = t; }

    size_t param_count() const { return params_.size(); }
    std::vector<T>& first_moment(size_t i) { return m_[i]; }
    std::vector<T>& second_moment(size_t i) { return v_[i]; }
    const std::vector<T>& first_moment(size_t i) const { return m_[i]; }
    const std::vector<T>& second_moment(size_t i) const { return v_[i]; }

private:
    std::vector<Tensor<T>> params_;
    std::vector<std::vector<T>> m_, v_;
    int64_t t_ = 0;
    T lr_, beta1_, beta2_, eps_;
};

} // namespace dsmr
