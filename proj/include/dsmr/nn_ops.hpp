#pragma once

#include <Eigen/Core>

#include "dsmr/tensor.hpp"

namespace dsmr {

namespace detail {

template <typename T>
using MatCM = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor>;
template <typename T>
using MatRM = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Dimensions of one convolution, in the downsampling direction.
struct ConvDims {
    int n, ci, h, w;   // input
    int co, k;         // kernel
    int stride, pad;
    int ho, wo;        // output

    int64_t cols_rows() const { return static_cast<int64_t>(ci) * k * k; }
    int64_t cols_cols() const { return static_cast<int64_t>(n) * ho * wo; }
    int64_t in_plane() const { return static_cast<int64_t>(h) * w; }
    int64_t out_plane() const { return static_cast<int64_t>(ho) * wo; }
};

inline int conv_out_dim(int in, int k, int stride, int pad) {
    const int span = in + 2 * pad - k;
    if (span < 0) throw ShapeError("conv: kernel larger than padded input");
    return span / stride + 1;
}

inline ConvDims make_conv_dims(const Shape& x, const Shape& w, int stride, int pad) {
    if (stride < 1 || pad < 0) throw ConfigError("conv: bad stride/padding");
    if (x.c != w.c)
        throw ShapeError("conv: input channels " + std::to_string(x.c) +
                         " do not match kernel channels " + std::to_string(w.c));
    if (w.h != w.w) throw ShapeError("conv: only square kernels supported");
    ConvDims d;
    d.n = x.n; d.ci = x.c; d.h = x.h; d.w = x.w;
    d.co = w.n; d.k = w.h;
    d.stride = stride; d.pad = pad;
    d.ho = conv_out_dim(x.h, d.k, stride, pad);
    d.wo = conv_out_dim(x.w, d.k, stride, pad);
    return d;
}

template <typename T>
std::vector<T>& conv_scratch(int which) {
    thread_local std::vector<T> bufs[3];
    return bufs[which];
}

// Unfolds x into [ci*k*k x n*ho*wo], column-major, one column per output pixel.
template <typename T>
void im2col(const T* x, const ConvDims& d, T* cols) {
    const int64_t rows = d.cols_rows();
    int64_t col = 0;
    for (int n = 0; n < d.n; ++n) {
        const T* xn = x + static_cast<int64_t>(n) * d.ci * d.in_plane();
        for (int oh = 0; oh < d.ho; ++oh) {
            const int h0 = oh * d.stride - d.pad;
            for (int ow = 0; ow < d.wo; ++ow, ++col) {
                const int w0 = ow * d.stride - d.pad;
                T* dst = cols + col * rows;
                for (int ci = 0; ci < d.ci; ++ci) {
                    const T* xc = xn + static_cast<int64_t>(ci) * d.in_plane();
                    for (int ki = 0; ki < d.k; ++ki) {
                        const int hh = h0 + ki;
                        if (hh < 0 || hh >= d.h) {
                            for (int kj = 0; kj < d.k; ++kj) *dst++ = T(0);
                            continue;
                        }
                        const T* xrow = xc + static_cast<int64_t>(hh) * d.w;
                        for (int kj = 0; kj < d.k; ++kj) {
                            const int ww = w0 + kj;
                            *dst++ = (ww >= 0 && ww < d.w) ? xrow[ww] : T(0);
                        }
                    }
                }
            }
        }
    }
}

// Adjoint of im2col: scatter-adds columns back onto the image grid.
template <typename T>
void col2im_add(const T* cols, const ConvDims& d, T* gx) {
    const int64_t rows = d.cols_rows();
    int64_t col = 0;
    for (int n = 0; n < d.n; ++n) {
        T* xn = gx + static_cast<int64_t>(n) * d.ci * d.in_plane();
        for (int oh = 0; oh < d.ho; ++oh) {
            const int h0 = oh * d.stride - d.pad;
            for (int ow = 0; ow < d.wo; ++ow, ++col) {
                const int w0 = ow * d.stride - d.pad;
                const T* src = cols + col * rows;
                for (int ci = 0; ci < d.ci; ++ci) {
                    T* xc = xn + static_cast<int64_t>(ci) * d.in_plane();
                    for (int ki = 0; ki < d.k; ++ki) {
                        const int hh = h0 + ki;
                        if (hh < 0 || hh >= d.h) {
                            src += d.k;
                            continue;
                        }
                        T* xrow = xc + static_cast<int64_t>(hh) * d.w;
                        for (int kj = 0; kj < d.k; ++kj) {
                            const int ww = w0 + kj;
                            if (ww >= 0 && ww < d.w) xrow[ww] += *src;
                            ++src;
                        }
                    }
                }
            }
        }
    }
}

// Gathers gy [n][co][ho][wo] into a [co x n*ho*wo] column-major matrix whose
// column order matches im2col.
template <typename T>
void gather_gy(const T* gy, const ConvDims& d, T* out) {
    const int64_t plane = d.out_plane();
    for (int n = 0; n < d.n; ++n) {
        for (int co = 0; co < d.co; ++co) {
            const T* src = gy + (static_cast<int64_t>(n) * d.co + co) * plane;
            T* dst = out + (static_cast<int64_t>(n) * plane) * d.co + co;
            for (int64_t i = 0; i < plane; ++i) dst[i * d.co] = src[i];
        }
    }
}

// y = w * im2col(x) + b
template <typename T>
void conv_forward(const T* x, const T* w, const T* b, T* y, const ConvDims& d) {
    auto& colbuf = conv_scratch<T>(0);
    colbuf.resize(static_cast<size_t>(d.cols_rows() * d.cols_cols()));
    im2col(x, d, colbuf.data());

    auto& ybuf = conv_scratch<T>(1);
    ybuf.resize(static_cast<size_t>(d.co * d.cols_cols()));
    Eigen::Map<const MatRM<T>> W(w, d.co, d.cols_rows());
    Eigen::Map<const MatCM<T>> C(colbuf.data(), d.cols_rows(), d.cols_cols());
    Eigen::Map<MatCM<T>> Y(ybuf.data(), d.co, d.cols_cols());
    Y.noalias() = W * C;

    const int64_t plane = d.out_plane();
    for (int64_t col = 0; col < d.cols_cols(); ++col) {
        const int n = static_cast<int>(col / plane);
        const int64_t ohw = col % plane;
        const T* yc = ybuf.data() + col * d.co;
        for (int co = 0; co < d.co; ++co)
            y[(static_cast<int64_t>(n) * d.co + co) * plane + ohw] =
                yc[co] + (b ? b[co] : T(0));
    }
}

// gx += w^T applied to gy (the adjoint map), scattered back to image layout.
template <typename T>
void conv_input_grad(const T* gy, const T* w, T* gx_accum, const ConvDims& d) {
    auto& gybuf = conv_scratch<T>(1);
    gybuf.resize(static_cast<size_t>(d.co * d.cols_cols()));
    gather_gy(gy, d, gybuf.data());

    auto& colbuf = conv_scratch<T>(0);
    colbuf.resize(static_cast<size_t>(d.cols_rows() * d.cols_cols()));
    Eigen::Map<const MatRM<T>> W(w, d.co, d.cols_rows());
    Eigen::Map<const MatCM<T>> GY(gybuf.data(), d.co, d.cols_cols());
    Eigen::Map<MatCM<T>> CG(colbuf.data(), d.cols_rows(), d.cols_cols());
    CG.noalias() = W.transpose() * GY;

    col2im_add(colbuf.data(), d, gx_accum);
}

// gw += gy * im2col(x)^T
template <typename T>
void conv_weight_grad(const T* x, const T* gy, T* gw_accum, const ConvDims& d) {
    auto& colbuf = conv_scratch<T>(0);
    colbuf.resize(static_cast<size_t>(d.cols_rows() * d.cols_cols()));
    im2col(x, d, colbuf.data());

    auto& gybuf = conv_scratch<T>(1);
    gybuf.resize(static_cast<size_t>(d.co * d.cols_cols()));
    gather_gy(gy, d, gybuf.data());

    Eigen::Map<const MatCM<T>> C(colbuf.data(), d.cols_rows(), d.cols_cols());
    Eigen::Map<const MatCM<T>> GY(gybuf.data(), d.co, d.cols_cols());
    Eigen::Map<MatRM<T>> GW(gw_accum, d.co, d.cols_rows());
    GW.noalias() += GY * C.transpose();
}

template <typename T>
void conv_bias_grad(const T* gy, T* gb_accum, int n, int co, int64_t plane) {
    for (int i = 0; i < n; ++i)
        for (int c = 0; c < co; ++c) {
            const T* src = gy + (static_cast<int64_t>(i) * co + c) * plane;
            T acc = T(0);
            for (int64_t p = 0; p < plane; ++p) acc += src[p];
            gb_accum[c] += acc;
        }
}

template <typename T>
void check_bias_shape(const Tensor<T>& b, int channels, const char* op) {
    const Shape s = b.shape();
    if (!(s == Shape{1, channels, 1, 1}))
        throw ShapeError(std::string(op) + ": bias must be 1x" + std::to_string(channels) +
                         "x1x1, got " + s.str());
}

} // namespace detail

// ---------------------------------------------------------------------------
// conv2d: x [N,Ci,H,W] * w [Co,Ci,K,K] + b [1,Co,1,1] -> [N,Co,Ho,Wo]
// Ho = (H + 2p - k)/s + 1
// ---------------------------------------------------------------------------

template <typename T>
Tensor<T> conv2d(const Tensor<T>& x, const Tensor<T>& w, const Tensor<T>& b,
                 int stride, int pad) {
    const detail::ConvDims d = detail::make_conv_dims(x.shape(), w.shape(), stride, pad);
    detail::check_bias_shape(b, d.co, "conv2d");
    const Shape out_shape{d.n, d.co, d.ho, d.wo};
    std::vector<T> out(static_cast<size_t>(out_shape.count()));
    detail::conv_forward(x.values().data(), w.values().data(), b.values().data(),
                         out.data(), d);
    return detail::make_op<T>(out_shape, std::move(out), {x, w, b}, [d](auto& self) {
        auto& xn = *self.parents[0];
        auto& wn = *self.parents[1];
        auto& bn = *self.parents[2];
        if (xn.requires_grad) {
            auto& gx = detail::ensure_grad(xn);
            detail::conv_input_grad(self.grad.data(), wn.values.data(), gx.data(), d);
        }
        if (wn.requires_grad) {
            auto& gw = detail::ensure_grad(wn);
            detail::conv_weight_grad(xn.values.data(), self.grad.data(), gw.data(), d);
        }
        if (bn.requires_grad) {
            auto& gb = detail::ensure_grad(bn);
            detail::conv_bias_grad(self.grad.data(), gb.data(), d.n, d.co, d.out_plane());
        }
    });
}

// ---------------------------------------------------------------------------
// conv_transpose2d: x [N,A,H,W] * w [A,B,K,K] + b [1,B,1,1] -> [N,B,Ho,Wo]
// Ho = (H-1)*s - 2p + k. Exact adjoint of conv2d with the same weight array.
// ---------------------------------------------------------------------------

template <typename T>
Tensor<T> conv_transpose2d(const Tensor<T>& x, const Tensor<T>& w, const Tensor<T>& b,
                           int stride, int pad) {
    const Shape xs = x.shape();
    const Shape ws = w.shape();
    if (xs.c != ws.n)
        throw ShapeError("conv_transpose2d: input channels " + std::to_string(xs.c) +
                         " do not match kernel in-channels " + std::to_string(ws.n));
    if (ws.h != ws.w) throw ShapeError("conv_transpose2d: only square kernels supported");
    const int k = ws.h;
    const int out_h = (xs.h - 1) * stride - 2 * pad + k;
    const int out_w = (xs.w - 1) * stride - 2 * pad + k;
    if (out_h <= 0 || out_w <= 0)
        throw ShapeError("conv_transpose2d: non-positive output size");
    detail::check_bias_shape(b, ws.c, "conv_transpose2d");

    // Dims of the matching forward convolution (output -> input direction).
    detail::ConvDims d;
    d.n = xs.n; d.ci = ws.c; d.h = out_h; d.w = out_w;
    d.co = ws.n; d.k = k; d.stride = stride; d.pad = pad;
    d.ho = xs.h; d.wo = xs.w;
    if (detail::conv_out_dim(out_h, k, stride, pad) != xs.h ||
        detail::conv_out_dim(out_w, k, stride, pad) != xs.w)
        throw ShapeError("conv_transpose2d: geometry does not invert");

    const Shape out_shape{xs.n, ws.c, out_h, out_w};
    std::vector<T> out(static_cast<size_t>(out_shape.count()), T(0));
    detail::conv_input_grad(x.values().data(), w.values().data(), out.data(), d);
    const auto& bias = b.values();
    const int64_t plane = static_cast<int64_t>(out_h) * out_w;
    for (int n = 0; n < xs.n; ++n)
        for (int c = 0; c < ws.c; ++c) {
            T* dst = out.data() + (static_cast<int64_t>(n) * ws.c + c) * plane;
            for (int64_t i = 0; i < plane; ++i) dst[i] += bias[c];
        }

    return detail::make_op<T>(out_shape, std::move(out), {x, w, b}, [d](auto& self) {
        auto& xn = *self.parents[0];
        auto& wn = *self.parents[1];
        auto& bn = *self.parents[2];
        if (xn.requires_grad) {
            auto& gx = detail::ensure_grad(xn);
            // d/dx of the adjoint map is the forward convolution.
            auto& tmp = detail::conv_scratch<T>(2);
            tmp.resize(gx.size());
            detail::conv_forward<T>(self.grad.data(), wn.values.data(), nullptr,
                                    tmp.data(), d);
            for (size_t i = 0; i < gx.size(); ++i) gx[i] += tmp[i];
        }
        if (wn.requires_grad) {
            auto& gw = detail::ensure_grad(wn);
            detail::conv_weight_grad(self.grad.data(), xn.values.data(), gw.data(), d);
        }
        if (bn.requires_grad) {
            auto& gb = detail::ensure_grad(bn);
            const int64_t plane2 = static_cast<int64_t>(self.shape.h) * self.shape.w;
            detail::conv_bias_grad(self.grad.data(), gb.data(), self.shape.n,
                                   self.shape.c, plane2);
        }
    });
}

// ---------------------------------------------------------------------------
// Batch normalization over N,H,W per channel.
// ---------------------------------------------------------------------------

template <typename T>
Tensor<T> batch_norm(const Tensor<T>& x, const Tensor<T>& gamma, const Tensor<T>& beta,
                     std::vector<T>& running_mean, std::vector<T>& running_var,
                     bool train, T momentum = T(0.1), T eps = T(1e-5)) {
    const Shape s = x.shape();
    const int C = s.c;
    if (!(gamma.shape() == Shape{1, C, 1, 1}) || !(beta.shape() == Shape{1, C, 1, 1}))
        throw ShapeError("batch_norm: gamma/beta must be 1x" + std::to_string(C) + "x1x1");
    if (running_mean.size() != static_cast<size_t>(C) ||
        running_var.size() != static_cast<size_t>(C))
        throw ShapeError("batch_norm: running stats length mismatch");
    const int64_t plane = static_cast<int64_t>(s.h) * s.w;
    const int64_t cnt = static_cast<int64_t>(s.n) * plane;

    std::vector<T> mean(C), invstd(C);
    if (train) {
        if (cnt < 2)
            throw ValidationError("batch_norm: degenerate statistics, N*H*W must be >= 2");
        for (int c = 0; c < C; ++c) {
            double acc = 0.0;
            for (int n = 0; n < s.n; ++n) {
                const T* src = x.values().data() + (static_cast<int64_t>(n) * C + c) * plane;
                for (int64_t i = 0; i < plane; ++i) acc += static_cast<double>(src[i]);
            }
            const double mu = acc / static_cast<double>(cnt);
            double var_acc = 0.0;
            for (int n = 0; n < s.n; ++n) {
                const T* src = x.values().data() + (static_cast<int64_t>(n) * C + c) * plane;
                for (int64_t i = 0; i < plane; ++i) {
                    const double dv = static_cast<double>(src[i]) - mu;
                    var_acc += dv * dv;
                }
            }
            const double var = var_acc / static_cast<double>(cnt);
            mean[c] = static_cast<T>(mu);
            invstd[c] = static_cast<T>(1.0 / std::sqrt(var + static_cast<double>(eps)));
            // Running variance keeps the unbiased estimate.
            running_mean[c] = (T(1) - momentum) * running_mean[c] + momentum * static_cast<T>(mu);
            running_var[c] = (T(1) - momentum) * running_var[c] +
                             momentum * static_cast<T>(var * static_cast<double>(cnt) /
                                                       static_cast<double>(cnt - 1));
        }
    } else {
        for (int c = 0; c < C; ++c) {
            mean[c] = running_mean[c];
            invstd[c] = T(1) / std::sqrt(running_var[c] + eps);
        }
    }

    std::vector<T> out(x.values().size());
    const auto& gv = gamma.values();
    const auto& bv = beta.values();
    for (int n = 0; n < s.n; ++n)
        for (int c = 0; c < C; ++c) {
            const T* src = x.values().data() + (static_cast<int64_t>(n) * C + c) * plane;
            T* dst = out.data() + (static_cast<int64_t>(n) * C + c) * plane;
            const T m = mean[c], is = invstd[c], g = gv[c], b = bv[c];
            for (int64_t i = 0; i < plane; ++i) dst[i] = g * (src[i] - m) * is + b;
        }

    return detail::make_op<T>(s, std::move(out), {x, gamma, beta},
                              [mean, invstd, train, cnt](auto& self) {
        auto& xn = *self.parents[0];
        auto& gn = *self.parents[1];
        auto& bn = *self.parents[2];
        const Shape& s2 = self.shape;
        const int C2 = s2.c;
        const int64_t plane2 = static_cast<int64_t>(s2.h) * s2.w;
        const auto& gv2 = gn.values;

        for (int c = 0; c < C2; ++c) {
            const T m = mean[c], is = invstd[c];
            double sum_dy = 0.0, sum_dy_xhat = 0.0;
            for (int n = 0; n < s2.n; ++n) {
                const int64_t off = (static_cast<int64_t>(n) * C2 + c) * plane2;
                const T* dy = self.grad.data() + off;
                const T* xv = xn.values.data() + off;
                for (int64_t i = 0; i < plane2; ++i) {
                    sum_dy += static_cast<double>(dy[i]);
                    sum_dy_xhat += static_cast<double>(dy[i]) *
                                   (static_cast<double>(xv[i]) - m) * is;
                }
            }
            if (bn.requires_grad)
                detail::ensure_grad(bn)[c] += static_cast<T>(sum_dy);
            if (gn.requires_grad)
                detail::ensure_grad(gn)[c] += static_cast<T>(sum_dy_xhat);
            if (xn.requires_grad) {
                auto& gx = detail::ensure_grad(xn);
                const T g = gv2[c];
                if (train) {
                    const T mean_dy = static_cast<T>(sum_dy / static_cast<double>(cnt));
                    const T mean_dy_xhat =
                        static_cast<T>(sum_dy_xhat / static_cast<double>(cnt));
                    for (int n = 0; n < s2.n; ++n) {
                        const int64_t off = (static_cast<int64_t>(n) * C2 + c) * plane2;
                        const T* dy = self.grad.data() + off;
                        const T* xv = xn.values.data() + off;
                        T* dst = gx.data() + off;
                        for (int64_t i = 0; i < plane2; ++i) {
                            const T xhat = (xv[i] - m) * is;
                            dst[i] += g * is * (dy[i] - mean_dy - xhat * mean_dy_xhat);
                        }
                    }
                } else {
                    for (int n = 0; n < s2.n; ++n) {
                        const int64_t off = (static_cast<int64_t>(n) * C2 + c) * plane2;
                        const T* dy = self.grad.data() + off;
                        T* dst = gx.data() + off;
                        for (int64_t i = 0; i < plane2; ++i) dst[i] += g * is * dy[i];
                    }
                }
            }
        }
    });
}

// ---------------------------------------------------------------------------
// Inverted dropout; eval mode passes the tensor through untouched.
// ---------------------------------------------------------------------------

template <typename T>
Tensor<T> dropout(const Tensor<T>& x, double rate, bool train, Rng& rng) {
    if (rate < 0.0 || rate >= 1.0)
        throw ConfigError("dropout: rate must lie in [0,1)");
    if (!train || rate == 0.0) return x;
    const T keep_scale = static_cast<T>(1.0 / (1.0 - rate));
    auto mask = std::make_shared<std::vector<T>>(x.values().size());
    std::vector<T> out(x.values());
    for (size_t i = 0; i < out.size(); ++i) {
        const T m = (rng.uniform() >= rate) ? keep_scale : T(0);
        (*mask)[i] = m;
        out[i] *= m;
    }
    return detail::make_op<T>(x.shape(), std::move(out), {x}, [mask](auto& self) {
        auto& parent = *self.parents[0];
        if (!parent.requires_grad) return;
        auto& g = detail::ensure_grad(parent);
        for (size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i] * (*mask)[i];
    });
}

} // namespace dsmr
