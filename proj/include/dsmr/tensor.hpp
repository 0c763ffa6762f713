#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "dsmr/errors.hpp"
#include "dsmr/rng.hpp"

namespace dsmr {

// N x C x H x W layout, row-major with W fastest.
struct Shape {
    int n = 1, c = 1, h = 1, w = 1;

    int64_t count() const {
        return static_cast<int64_t>(n) * c * h * w;
    }
    bool operator==(const Shape&) const = default;

    std::string str() const {
        return std::to_string(n) + "x" + std::to_string(c) + "x" +
               std::to_string(h) + "x" + std::to_string(w);
    }
};

// Graph recording is on by default; eval paths disable it to skip the tape.
namespace detail {
inline thread_local bool g_grad_enabled = true;
}

struct NoGradGuard {
    bool prev;
    NoGradGuard() : prev(detail::g_grad_enabled) { detail::g_grad_enabled = false; }
    ~NoGradGuard() { detail::g_grad_enabled = prev; }
    NoGradGuard(const NoGradGuard&) = delete;
    NoGradGuard& operator=(const NoGradGuard&) = delete;
};

inline bool grad_enabled() { return detail::g_grad_enabled; }

namespace detail {

template <typename T>
struct Node {
    Shape shape;
    std::vector<T> values;
    std::vector<T> grad; // allocated lazily
    bool requires_grad = false;
    std::vector<std::shared_ptr<Node<T>>> parents;
    std::function<void(Node<T>&)> backward_fn;
};

template <typename T>
inline std::vector<T>& ensure_grad(Node<T>& node) {
    if (node.grad.size() != node.values.size())
        node.grad.assign(node.values.size(), T(0));
    return node.grad;
}

} // namespace detail

// Reverse-mode autodiff tensor. Copies are shallow handles onto one node.
template <typename T>
class Tensor {
public:
    using Node = detail::Node<T>;

    Tensor() = default;

    static Tensor zeros(Shape s, bool requires_grad = false) {
        return full(s, T(0), requires_grad);
    }

    static Tensor full(Shape s, T v, bool requires_grad = false) {
        auto n = std::make_shared<Node>();
        n->shape = s;
        n->values.assign(static_cast<size_t>(s.count()), v);
        n->requires_grad = requires_grad;
        return Tensor(std::move(n));
    }

    static Tensor from(Shape s, std::vector<T> v, bool requires_grad = false) {
        if (static_cast<int64_t>(v.size()) != s.count())
            throw ShapeError("tensor: value count " + std::to_string(v.size()) +
                             " does not match shape " + s.str());
        auto n = std::make_shared<Node>();
        n->shape = s;
        n->values = std::move(v);
        n->requires_grad = requires_grad;
        return Tensor(std::move(n));
    }

    static Tensor randn(Shape s, T stddev, Rng& rng, bool requires_grad = false) {
        Tensor t = zeros(s, requires_grad);
        for (T& v : t.values()) v = static_cast<T>(rng.normal() * static_cast<double>(stddev));
        return t;
    }

    bool defined() const { return static_cast<bool>(n_); }
    const Shape& shape() const { return n_->shape; }
    int64_t size() const { return n_->shape.count(); }

    std::vector<T>& values() { return n_->values; }
    const std::vector<T>& values() const { return n_->values; }

    bool has_grad() const { return n_ && n_->grad.size() == n_->values.size(); }
    const std::vector<T>& grad() const {
        if (!has_grad()) throw ValidationError("tensor: gradient not populated");
        return n_->grad;
    }

    bool requires_grad() const { return n_ && n_->requires_grad; }
    void set_requires_grad(bool on) {
        if (on && n_->backward_fn)
            throw ValidationError("tensor: only leaves can toggle requires_grad");
        n_->requires_grad = on;
    }

    void zero_grad() {
        if (n_) n_->grad.assign(n_->values.size(), T(0));
    }

    // Leaf copy sharing no graph history.
    Tensor detach() const {
        auto n = std::make_shared<Node>();
        n->shape = n_->shape;
        n->values = n_->values;
        n->requires_grad = false;
        return Tensor(std::move(n));
    }

    T item() const {
        if (size() != 1) throw ShapeError("item() on non-scalar tensor " + shape().str());
        return n_->values[0];
    }

    // Reverse-mode sweep from a scalar root. Gradients accumulate into every
    // reachable node with requires_grad (leaf grads persist until zero_grad).
    void backward() const {
        if (!n_) throw ValidationError("backward on undefined tensor");
        if (size() != 1) throw ShapeError("backward requires a scalar root");
        if (!n_->requires_grad)
            throw ValidationError("backward on a graph without gradients");

        std::vector<Node*> order;
        std::unordered_set<Node*> visited;
        std::vector<std::pair<Node*, size_t>> stack;
        stack.emplace_back(n_.get(), 0);
        visited.insert(n_.get());
        while (!stack.empty()) {
            auto& [node, idx] = stack.back();
            if (idx < node->parents.size()) {
                Node* p = node->parents[idx++].get();
                if (p->requires_grad && !visited.count(p)) {
                    visited.insert(p);
                    stack.emplace_back(p, 0);
                }
            } else {
                order.push_back(node);
                stack.pop_back();
            }
        }

        detail::ensure_grad(*n_);
        n_->grad[0] += T(1);
        for (auto it = order.rbegin(); it != order.rend(); ++it) {
            if ((*it)->backward_fn) {
                detail::ensure_grad(**it);
                (*it)->backward_fn(**it);
            }
        }
    }

    std::shared_ptr<Node> node() const { return n_; }
    static Tensor wrap(std::shared_ptr<Node> n) { return Tensor(std::move(n)); }

private:
    explicit Tensor(std::shared_ptr<Node> n) : n_(std::move(n)) {}
    std::shared_ptr<Node> n_;
};

namespace detail {

// Builds an op node. The backward callable receives the finished node and
// must accumulate into parents that require gradients.
template <typename T, typename BackwardFn>
Tensor<T> make_op(Shape shape, std::vector<T> values,
                  std::vector<Tensor<T>> parents, BackwardFn&& bw) {
    auto node = std::make_shared<Node<T>>();
    node->shape = shape;
    node->values = std::move(values);
    bool needs = false;
    if (g_grad_enabled) {
        for (const auto& p : parents) needs = needs || p.requires_grad();
    }
    node->requires_grad = needs;
    if (needs) {
        node->parents.reserve(parents.size());
        for (auto& p : parents) node->parents.push_back(p.node());
        node->backward_fn = std::forward<BackwardFn>(bw);
    }
    return Tensor<T>::wrap(std::move(node));
}

template <typename T>
void require_same_shape(const Tensor<T>& a, const Tensor<T>& b, const char* op) {
    if (!(a.shape() == b.shape()))
        throw ShapeError(std::string(op) + ": shape mismatch " + a.shape().str() +
                         " vs " + b.shape().str());
}

} // namespace detail

// ---------------------------------------------------------------------------
// Elementwise arithmetic
// ---------------------------------------------------------------------------

template <typename T>
Tensor<T> add(const Tensor<T>& a, const Tensor<T>& b) {
    detail::require_same_shape(a, b, "add");
    std::vector<T> out(a.values());
    const auto& bv = b.values();
    for (size_t i = 0; i < out.size(); ++i) out[i] += bv[i];
    return detail::make_op<T>(a.shape(), std::move(out), {a, b}, [](auto& self) {
        for (int p = 0; p < 2; ++p) {
            auto& parent = *self.parents[p];
            if (!parent.requires_grad) continue;
            auto& g = detail::ensure_grad(parent);
            for (size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i];
        }
    });
}

template <typename T>
Tensor<T> sub(const Tensor<T>& a, const Tensor<T>& b) {
    detail::require_same_shape(a, b, "sub");
    std::vector<T> out(a.values());
    const auto& bv = b.values();
    for (size_t i = 0; i < out.size(); ++i) out[i] -= bv[i];
    return detail::make_op<T>(a.shape(), std::move(out), {a, b}, [](auto& self) {
        if (self.parents[0]->requires_grad) {
            auto& g = detail::ensure_grad(*self.parents[0]);
            for (size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i];
        }
        if (self.parents[1]->requires_grad) {
            auto& g = detail::ensure_grad(*self.parents[1]);
            for (size_t i = 0; i < g.size(); ++i) g[i] -= self.grad[i];
        }
    });
}

template <typename T>
Tensor<T> mul(const Tensor<T>& a, const Tensor<T>& b) {
    detail::require_same_shape(a, b, "mul");
    std::vector<T> out(a.values());
    const auto& bv = b.values();
    for (size_t i = 0; i < out.size(); ++i) out[i] *= bv[i];
    return detail::make_op<T>(a.shape(), std::move(out), {a, b}, [](auto& self) {
        const auto& av = self.parents[0]->values;
        const auto& bv2 = self.parents[1]->values;
        if (self.parents[0]->requires_grad) {
            auto& g = detail::ensure_grad(*self.parents[0]);
            for (size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i] * bv2[i];
        }
        if (self.parents[1]->requires_grad) {
            auto& g = detail::ensure_grad(*self.parents[1]);
            for (size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i] * av[i];
        }
    });
}

template <typename T>
Tensor<T> div(const Tensor<T>& a, const Tensor<T>& b) {
    detail::require_same_shape(a, b, "div");
    std::vector<T> out(a.values());
    const auto& bv = b.values();
    for (size_t i = 0; i < out.size(); ++i) out[i] /= bv[i];
    return detail::make_op<T>(a.shape(), std::move(out), {a, b}, [](auto& self) {
        const auto& av = self.parents[0]->values;
        const auto& bv2 = self.parents[1]->values;
        if (self.parents[0]->requires_grad) {
            auto& g = detail::ensure_grad(*self.parents[0]);
            for (size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i] / bv2[i];
        }
        if (self.parents[1]->requires_grad) {
            auto& g = detail::ensure_grad(*self.parents[1]);
            for (size_t i = 0; i < g.size(); ++i)
                g[i] -= self.grad[i] * av[i] / (bv2[i] * bv2[i]);
        }
    });
}

// y = x * mul + add
template <typename T>
Tensor<T> affine(const Tensor<T>& x, T mul_by, T add_to) {
    std::vector<T> out(x.values());
    for (T& v : out) v = v * mul_by + add_to;
    return detail::make_op<T>(x.shape(), std::move(out), {x}, [mul_by](auto& self) {
        if (!self.parents[0]->requires_grad) return;
        auto& g = detail::ensure_grad(*self.parents[0]);
        for (size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i] * mul_by;
    });
}

template <typename T>
Tensor<T> scale(const Tensor<T>& x, T s) { return affine(x, s, T(0)); }

template <typename T>
Tensor<T> add_scalar(const Tensor<T>& x, T c) { return affine(x, T(1), c); }

// Generic elementwise op: y_i = f(x_i), dy/dx supplied as df(x_i, y_i).
template <typename T, typename F, typename DF>
Tensor<T> map_unary(const Tensor<T>& x, F&& f, DF&& df) {
    std::vector<T> out(x.values());
    for (T& v : out) v = f(v);
    return detail::make_op<T>(x.shape(), std::move(out), {x},
                              [df = std::forward<DF>(df)](auto& self) {
        if (!self.parents[0]->requires_grad) return;
        const auto& xv = self.parents[0]->values;
        auto& g = detail::ensure_grad(*self.parents[0]);
        for (size_t i = 0; i < g.size(); ++i)
            g[i] += self.grad[i] * df(xv[i], self.values[i]);
    });
}

template <typename T>
Tensor<T> square(const Tensor<T>& x) {
    return map_unary(x, [](T v) { return v * v; }, [](T xv, T) { return T(2) * xv; });
}

template <typename T>
Tensor<T> abs_val(const Tensor<T>& x) {
    return map_unary(x, [](T v) { return std::abs(v); },
                     [](T xv, T) { return xv > T(0) ? T(1) : (xv < T(0) ? T(-1) : T(0)); });
}

template <typename T>
Tensor<T> sqrt_val(const Tensor<T>& x) {
    return map_unary(x, [](T v) { return std::sqrt(v); },
                     [](T, T yv) { return T(0.5) / yv; });
}

// ---------------------------------------------------------------------------
// Activations; kink subgradients take the positive branch.
// ---------------------------------------------------------------------------

template <typename T>
Tensor<T> relu(const Tensor<T>& x) {
    return map_unary(x, [](T v) { return v > T(0) ? v : T(0); },
                     [](T xv, T) { return xv >= T(0) ? T(1) : T(0); });
}

template <typename T>
Tensor<T> lrelu(const Tensor<T>& x, T slope) {
    if (!(slope > T(0))) throw ConfigError("lrelu: slope must be positive");
    return map_unary(x, [slope](T v) { return v > T(0) ? v : slope * v; },
                     [slope](T xv, T) { return xv >= T(0) ? T(1) : slope; });
}

template <typename T>
Tensor<T> tanh_act(const Tensor<T>& x) {
    return map_unary(x, [](T v) { return std::tanh(v); },
                     [](T, T yv) { return T(1) - yv * yv; });
}

template <typename T>
Tensor<T> sigmoid(const Tensor<T>& x) {
    return map_unary(x, [](T v) { return T(1) / (T(1) + std::exp(-v)); },
                     [](T, T yv) { return yv * (T(1) - yv); });
}

// ---------------------------------------------------------------------------
// Shape ops
// ---------------------------------------------------------------------------

template <typename T>
Tensor<T> concat_channels(const std::vector<Tensor<T>>& xs) {
    if (xs.empty()) throw ShapeError("concat_channels: no inputs");
    const Shape s0 = xs[0].shape();
    int total_c = 0;
    for (const auto& x : xs) {
        const Shape s = x.shape();
        if (s.n != s0.n || s.h != s0.h || s.w != s0.w)
            throw ShapeError("concat_channels: spatial/batch mismatch " + s.str() +
                             " vs " + s0.str());
        total_c += s.c;
    }
    const Shape out_shape{s0.n, total_c, s0.h, s0.w};
    const size_t plane = static_cast<size_t>(s0.h) * s0.w;
    std::vector<T> out(static_cast<size_t>(out_shape.count()));
    for (int n = 0; n < s0.n; ++n) {
        size_t off = static_cast<size_t>(n) * total_c * plane;
        for (const auto& x : xs) {
            const size_t block = static_cast<size_t>(x.shape().c) * plane;
            const T* src = x.values().data() + static_cast<size_t>(n) * block;
            std::copy(src, src + block, out.begin() + static_cast<std::ptrdiff_t>(off));
            off += block;
        }
    }
    return detail::make_op<T>(out_shape, std::move(out), xs, [plane, total_c](auto& self) {
        const int nb = self.shape.n;
        for (int n = 0; n < nb; ++n) {
            size_t off = static_cast<size_t>(n) * total_c * plane;
            for (auto& pptr : self.parents) {
                auto& parent = *pptr;
                const size_t block = static_cast<size_t>(parent.shape.c) * plane;
                if (parent.requires_grad) {
                    auto& g = detail::ensure_grad(parent);
                    T* dst = g.data() + static_cast<size_t>(n) * block;
                    const T* src = self.grad.data() + off;
                    for (size_t i = 0; i < block; ++i) dst[i] += src[i];
                }
                off += block;
            }
        }
    });
}

template <typename T>
Tensor<T> concat_channels(const Tensor<T>& a, const Tensor<T>& b) {
    return concat_channels<T>({a, b});
}

template <typename T>
Tensor<T> slice_channels(const Tensor<T>& x, int c0, int c1) {
    const Shape s = x.shape();
    if (c0 < 0 || c1 > s.c || c0 >= c1)
        throw ShapeError("slice_channels: bad range");
    const Shape out_shape{s.n, c1 - c0, s.h, s.w};
    const size_t plane = static_cast<size_t>(s.h) * s.w;
    std::vector<T> out(static_cast<size_t>(out_shape.count()));
    for (int n = 0; n < s.n; ++n) {
        const T* src = x.values().data() + (static_cast<size_t>(n) * s.c + c0) * plane;
        std::copy(src, src + static_cast<size_t>(c1 - c0) * plane,
                  out.begin() + static_cast<std::ptrdiff_t>(static_cast<size_t>(n) * (c1 - c0) * plane));
    }
    return detail::make_op<T>(out_shape, std::move(out), {x}, [c0, plane](auto& self) {
        auto& parent = *self.parents[0];
        if (!parent.requires_grad) return;
        auto& g = detail::ensure_grad(parent);
        const int cs = self.shape.c;
        for (int n = 0; n < self.shape.n; ++n) {
            T* dst = g.data() + (static_cast<size_t>(n) * parent.shape.c + c0) * plane;
            const T* src = self.grad.data() + static_cast<size_t>(n) * cs * plane;
            for (size_t i = 0; i < static_cast<size_t>(cs) * plane; ++i) dst[i] += src[i];
        }
    });
}

template <typename T>
Tensor<T> crop_spatial(const Tensor<T>& x, int top, int left, int out_h, int out_w) {
    const Shape s = x.shape();
    if (top < 0 || left < 0 || out_h <= 0 || out_w <= 0 ||
        top + out_h > s.h || left + out_w > s.w)
        throw ShapeError("crop_spatial: window outside tensor");
    const Shape out_shape{s.n, s.c, out_h, out_w};
    std::vector<T> out(static_cast<size_t>(out_shape.count()));
    const auto& xv = x.values();
    size_t o = 0;
    for (int n = 0; n < s.n; ++n)
        for (int c = 0; c < s.c; ++c)
            for (int i = 0; i < out_h; ++i) {
                const size_t base =
                    ((static_cast<size_t>(n) * s.c + c) * s.h + (top + i)) * s.w + left;
                for (int j = 0; j < out_w; ++j) out[o++] = xv[base + j];
            }
    return detail::make_op<T>(out_shape, std::move(out), {x}, [top, left](auto& self) {
        auto& parent = *self.parents[0];
        if (!parent.requires_grad) return;
        auto& g = detail::ensure_grad(parent);
        const Shape& ps = parent.shape;
        const Shape& os = self.shape;
        size_t o = 0;
        for (int n = 0; n < os.n; ++n)
            for (int c = 0; c < os.c; ++c)
                for (int i = 0; i < os.h; ++i) {
                    const size_t base =
                        ((static_cast<size_t>(n) * ps.c + c) * ps.h + (top + i)) * ps.w + left;
                    for (int j = 0; j < os.w; ++j) g[base + j] += self.grad[o++];
                }
    });
}

// Per-pixel sum over the channel axis -> N x 1 x H x W.
template <typename T>
Tensor<T> sum_channels(const Tensor<T>& x) {
    const Shape s = x.shape();
    const Shape out_shape{s.n, 1, s.h, s.w};
    const size_t plane = static_cast<size_t>(s.h) * s.w;
    std::vector<T> out(static_cast<size_t>(out_shape.count()), T(0));
    const auto& xv = x.values();
    for (int n = 0; n < s.n; ++n)
        for (int c = 0; c < s.c; ++c) {
            const T* src = xv.data() + (static_cast<size_t>(n) * s.c + c) * plane;
            T* dst = out.data() + static_cast<size_t>(n) * plane;
            for (size_t i = 0; i < plane; ++i) dst[i] += src[i];
        }
    return detail::make_op<T>(out_shape, std::move(out), {x}, [plane](auto& self) {
        auto& parent = *self.parents[0];
        if (!parent.requires_grad) return;
        auto& g = detail::ensure_grad(parent);
        const Shape& ps = parent.shape;
        for (int n = 0; n < ps.n; ++n)
            for (int c = 0; c < ps.c; ++c) {
                T* dst = g.data() + (static_cast<size_t>(n) * ps.c + c) * plane;
                const T* src = self.grad.data() + static_cast<size_t>(n) * plane;
                for (size_t i = 0; i < plane; ++i) dst[i] += src[i];
            }
    });
}

// ---------------------------------------------------------------------------
// Reductions
// ---------------------------------------------------------------------------

template <typename T>
Tensor<T> reduce_sum(const Tensor<T>& x) {
    if (x.size() == 0) throw EmptyDomainError("reduce_sum of empty tensor");
    T acc = T(0);
    for (T v : x.values()) acc += v;
    return detail::make_op<T>(Shape{1, 1, 1, 1}, std::vector<T>{acc}, {x}, [](auto& self) {
        auto& parent = *self.parents[0];
        if (!parent.requires_grad) return;
        auto& g = detail::ensure_grad(parent);
        const T go = self.grad[0];
        for (T& v : g) v += go;
    });
}

template <typename T>
Tensor<T> reduce_mean(const Tensor<T>& x) {
    if (x.size() == 0) throw EmptyDomainError("reduce_mean of empty tensor");
    T acc = T(0);
    for (T v : x.values()) acc += v;
    const T inv = T(1) / static_cast<T>(x.size());
    return detail::make_op<T>(Shape{1, 1, 1, 1}, std::vector<T>{acc * inv}, {x},
                              [inv](auto& self) {
        auto& parent = *self.parents[0];
        if (!parent.requires_grad) return;
        auto& g = detail::ensure_grad(parent);
        const T go = self.grad[0] * inv;
        for (T& v : g) v += go;
    });
}

// ---------------------------------------------------------------------------
// Gradient verification against central finite differences (64-bit).
// ---------------------------------------------------------------------------

struct GradCheckReport {
    double max_rel_err = 0.0;
    int worst_input = -1;
    int64_t worst_elem = -1;
};

// |g_ad - g_fd| / max(1e-8, |g_ad| + |g_fd|), maximized over every element of
// every input. The callable must rebuild its graph on each invocation and be
// deterministic (fix any rng seeds inside).
inline GradCheckReport grad_check(
    const std::function<Tensor<double>(std::vector<Tensor<double>>&)>& f,
    std::vector<Tensor<double>> inputs, double eps = 1e-3) {
    for (auto& in : inputs) {
        in.set_requires_grad(true);
        in.zero_grad();
    }
    Tensor<double> y = f(inputs);
    if (y.size() != 1) throw ConfigError("grad_check: function must be scalar-valued");
    if (!std::isfinite(y.item()))
        throw NumericError("grad_check: non-finite function value");
    y.backward();

    std::vector<std::vector<double>> g_ad;
    g_ad.reserve(inputs.size());
    for (auto& in : inputs)
        g_ad.push_back(in.has_grad() ? in.grad() : std::vector<double>(in.values().size(), 0.0));

    GradCheckReport report;
    NoGradGuard no_grad;
    for (size_t i = 0; i < inputs.size(); ++i) {
        auto& vals = inputs[i].values();
        for (size_t j = 0; j < vals.size(); ++j) {
            const double x0 = vals[j];
            vals[j] = x0 + eps;
            const double yp = f(inputs).item();
            vals[j] = x0 - eps;
            const double ym = f(inputs).item();
            vals[j] = x0;
            if (!std::isfinite(yp) || !std::isfinite(ym))
                throw NumericError("grad_check: non-finite value at input " +
                                   std::to_string(i) + " element " + std::to_string(j));
            const double g_fd = (yp - ym) / (2.0 * eps);
            const double g = g_ad[i][j];
            const double rel = std::abs(g - g_fd) / std::max(1e-8, std::abs(g) + std::abs(g_fd));
            if (rel > report.max_rel_err) {
                report.max_rel_err = rel;
                report.worst_input = static_cast<int>(i);
                report.worst_elem = static_cast<int64_t>(j);
            }
        }
    }
    return report;
}

} // namespace dsmr
