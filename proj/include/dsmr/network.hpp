#pragma once

#include <algorithm>
#include <optional>
#include <string>
#include <vector>

#include "dsmr/nn_ops.hpp"
#include "dsmr/params.hpp"

namespace dsmr {

// All down/up-sampling convolutions use kernel 4, stride 2, padding 1, so
// every layer exactly halves or doubles the spatial size and an input of
// 2^depth pixels bottlenecks at 1x1.
inline constexpr int kConvKernel = 4;
inline constexpr double kLReluSlope = 0.2;
inline constexpr double kWeightInitStd = 0.02;

enum class GeneratorKind {
    SingleStream,      // one encoder fed with the DSM only
    WNetLateFusion,    // two full encoder-decoder streams fused before tanh
    HybridEarlyFusion, // two encoders, shared decoder
    IdentityStub,      // passes the DSM through; test fixture for pipelines
};

std::string to_string(GeneratorKind k);
GeneratorKind generator_kind_from_string(const std::string& s);

struct GeneratorConfig {
    GeneratorKind kind = GeneratorKind::HybridEarlyFusion;
    int depth = 8;          // conv layers per encoder; patch size is 2^depth
    int base_width = 64;
    double dropout_rate = 0.5;
    int dropout_layers = 3; // first decoder layers carrying dropout

    int patch_size() const { return 1 << depth; }

    void validate() const {
        if (kind == GeneratorKind::IdentityStub) return;
        if (depth < 2 || depth > 10) throw ConfigError("generator: depth must be in [2,10]");
        if (base_width < 1) throw ConfigError("generator: base_width must be >= 1");
        if (dropout_rate < 0.0 || dropout_rate >= 1.0)
            throw ConfigError("generator: dropout rate must be in [0,1)");
        if (dropout_layers < 0 || dropout_layers > depth - 1)
            throw ConfigError("generator: dropout_layers must be in [0, depth-1]");
    }
};

struct DiscriminatorConfig {
    int layers = 5;
    int base_width = 64;
    bool condition_on_pan = false; // condition carries the input DSM; optionally PAN too

    void validate() const {
        if (layers < 2 || layers > 8) throw ConfigError("discriminator: layers must be in [2,8]");
        if (base_width < 1) throw ConfigError("discriminator: base_width must be >= 1");
    }
};

// Channel progression base_width * {1,2,4,8,8,...}.
inline int width_at(int base_width, int layer) {
    return base_width * std::min(1 << std::min(layer, 3), 8);
}

// The first layer and the bottleneck layer carry no normalization (the
// bottleneck's 1x1 maps leave nothing to normalize over at small batches).
inline bool encoder_layer_has_bn(int layer, int depth) {
    return layer > 0 && layer < depth - 1;
}

// ---------------------------------------------------------------------------
// Declarative parameter layout. The same enumeration drives construction,
// counting, and checkpoint integrity checks.
// ---------------------------------------------------------------------------

enum class ParamInit { ConvWeight, Zero, BnGamma, One };

struct ParamDesc {
    std::string name;
    Shape shape;
    bool trainable;
    ParamInit init;
};

std::vector<ParamDesc> generator_param_layout(const GeneratorConfig& cfg);
std::vector<ParamDesc> discriminator_param_layout(const DiscriminatorConfig& cfg);
int64_t generator_param_count(const GeneratorConfig& cfg);
int64_t discriminator_param_count(const DiscriminatorConfig& cfg);

// Skip concatenations from encoder levels into the decoder.
inline int generator_skip_count(const GeneratorConfig& cfg) {
    switch (cfg.kind) {
        case GeneratorKind::SingleStream: return cfg.depth - 1;
        case GeneratorKind::WNetLateFusion: return 2 * (cfg.depth - 1);
        case GeneratorKind::HybridEarlyFusion: return 2 * (cfg.depth - 1);
        case GeneratorKind::IdentityStub: return 0;
    }
    return 0;
}

// Human-readable layer table with spatial sizes for the given patch.
std::vector<std::string> describe_generator(const GeneratorConfig& cfg, int patch);
std::vector<std::string> describe_discriminator(const DiscriminatorConfig& cfg, int patch);

namespace detail {

template <typename T>
void init_param(Tensor<T>& t, ParamInit init, Rng& rng) {
    switch (init) {
        case ParamInit::ConvWeight:
            for (T& v : t.values()) v = static_cast<T>(rng.normal(0.0, kWeightInitStd));
            break;
        case ParamInit::Zero:
            break;
        case ParamInit::BnGamma:
            for (T& v : t.values()) v = static_cast<T>(rng.normal(1.0, kWeightInitStd));
            break;
        case ParamInit::One:
            for (T& v : t.values()) v = T(1);
            break;
    }
}

template <typename T>
void build_params(ParamStore<T>& store, const std::vector<ParamDesc>& layout, Rng& rng) {
    for (const ParamDesc& d : layout) {
        auto& t = store.create(d.name, d.shape,
                               d.trainable ? ParamStore<T>::Kind::Trainable
                                           : ParamStore<T>::Kind::Buffer);
        init_param(t, d.init, rng);
    }
}

template <typename T>
struct ConvUnit {
    Tensor<T> w, b;
};

template <typename T>
struct BnUnit {
    Tensor<T> gamma, beta, mean, var;
};

template <typename T>
ConvUnit<T> bind_conv(ParamStore<T>& store, const std::string& prefix) {
    return {store.get(prefix + ".weight"), store.get(prefix + ".bias")};
}

template <typename T>
BnUnit<T> bind_bn(ParamStore<T>& store, const std::string& prefix) {
    return {store.get(prefix + ".bn.gamma"), store.get(prefix + ".bn.beta"),
            store.get(prefix + ".bn.mean"), store.get(prefix + ".bn.var")};
}

} // namespace detail

// ---------------------------------------------------------------------------
// Generator
// ---------------------------------------------------------------------------

template <typename T>
class Generator {
public:
    // Builds fresh parameters, drawing initial weights from init_rng in
    // layout order.
    Generator(const GeneratorConfig& cfg, Rng& init_rng) : cfg_(cfg) {
        cfg_.validate();
        detail::build_params(store_, generator_param_layout(cfg_), init_rng);
        bind();
    }

    // Binds onto an already-populated store (checkpoint load path).
    Generator(const GeneratorConfig& cfg, ParamStore<T>&& store)
        : cfg_(cfg), store_(std::move(store)) {
        cfg_.validate();
        bind();
    }

    const GeneratorConfig& config() const { return cfg_; }
    ParamStore<T>& params() { return store_; }
    const ParamStore<T>& params() const { return store_; }
    int skip_connections_used() const { return skips_used_; }

    // pan and dsm must be normalized to [-1,1] and 2^depth pixels square.
    // Train mode applies dropout noise from rng; eval mode is deterministic.
    Tensor<T> forward(const Tensor<T>& pan, const Tensor<T>& dsm, bool train, Rng& rng) {
        if (cfg_.kind == GeneratorKind::IdentityStub) {
            skips_used_ = 0;
            return dsm;
        }
        check_input(dsm, "dsm");
        if (consumes_pan()) {
            check_input(pan, "pan");
            if (!(pan.shape() == dsm.shape()))
                throw ShapeError("generator: pan/dsm shape mismatch");
        }
        skips_used_ = 0;
        switch (cfg_.kind) {
            case GeneratorKind::SingleStream: {
                auto feats = encode(enc1_, dsm, train);
                Tensor<T> y = decode(dec_, feats, nullptr, train, rng, false);
                return tanh_act(y);
            }
            case GeneratorKind::HybridEarlyFusion: {
                auto f1 = encode(enc1_, pan, train);
                auto f2 = encode(enc2_, dsm, train);
                Tensor<T> y = decode(dec_, f1, &f2, train, rng, false);
                return tanh_act(y);
            }
            case GeneratorKind::WNetLateFusion: {
                auto f1 = encode(enc1_, pan, train);
                Tensor<T> s1 = decode(dec_, f1, nullptr, train, rng, true);
                auto f2 = encode(enc2_, dsm, train);
                Tensor<T> s2 = decode(dec2_, f2, nullptr, train, rng, true);
                Tensor<T> fused = concat_channels(s1, s2);
                fused = conv2d(fused, fuse_.w, fuse_.b, 1, 1);
                return tanh_act(fused);
            }
            default:
                throw ConfigError("generator: unsupported kind");
        }
    }

    bool consumes_pan() const {
        return cfg_.kind == GeneratorKind::HybridEarlyFusion ||
               cfg_.kind == GeneratorKind::WNetLateFusion;
    }

private:
    struct EncLayer {
        detail::ConvUnit<T> conv;
        std::optional<detail::BnUnit<T>> bn;
    };
    struct DecLayer {
        detail::ConvUnit<T> conv;
        std::optional<detail::BnUnit<T>> bn;
        bool dropout = false;
    };

    void check_input(const Tensor<T>& x, const char* which) const {
        const Shape s = x.shape();
        const int p = cfg_.patch_size();
        if (s.c != 1 || s.h != p || s.w != p)
            throw ShapeError(std::string("generator: ") + which + " must be Nx1x" +
                             std::to_string(p) + "x" + std::to_string(p) + ", got " + s.str());
        for (T v : x.values())
            if (std::abs(v) > T(1) + T(1e-3))
                throw ValidationError(std::string("generator: ") + which +
                                      " is not normalized to [-1,1]");
    }

    void bind_stream(const std::string& enc_prefix, std::vector<EncLayer>& enc,
                     const std::string& dec_prefix, std::vector<DecLayer>& dec,
                     bool head_has_bn) {
        const int d = cfg_.depth;
        enc.resize(d);
        for (int i = 0; i < d; ++i) {
            const std::string p = enc_prefix + "." + std::to_string(i);
            enc[i].conv = detail::bind_conv(store_, p);
            if (encoder_layer_has_bn(i, d)) enc[i].bn = detail::bind_bn(store_, p);
        }
        dec.resize(d);
        for (int i = 0; i < d; ++i) {
            const std::string p = dec_prefix + "." + std::to_string(i);
            dec[i].conv = detail::bind_conv(store_, p);
            if (i < d - 1 || head_has_bn) dec[i].bn = detail::bind_bn(store_, p);
            dec[i].dropout = i < cfg_.dropout_layers;
        }
    }

    void bind() {
        if (cfg_.kind == GeneratorKind::IdentityStub) return;
        switch (cfg_.kind) {
            case GeneratorKind::SingleStream:
                bind_stream("g.enc1", enc1_, "g.dec", dec_, false);
                break;
            case GeneratorKind::HybridEarlyFusion: {
                const int d = cfg_.depth;
                enc1_.resize(d);
                enc2_.resize(d);
                for (int i = 0; i < d; ++i) {
                    const std::string p1 = "g.enc1." + std::to_string(i);
                    const std::string p2 = "g.enc2." + std::to_string(i);
                    enc1_[i].conv = detail::bind_conv(store_, p1);
                    enc2_[i].conv = detail::bind_conv(store_, p2);
                    if (encoder_layer_has_bn(i, d)) {
                        enc1_[i].bn = detail::bind_bn(store_, p1);
                        enc2_[i].bn = detail::bind_bn(store_, p2);
                    }
                }
                dec_.resize(d);
                for (int i = 0; i < d; ++i) {
                    const std::string p = "g.dec." + std::to_string(i);
                    dec_[i].conv = detail::bind_conv(store_, p);
                    if (i < d - 1) dec_[i].bn = detail::bind_bn(store_, p);
                    dec_[i].dropout = i < cfg_.dropout_layers;
                }
                break;
            }
            case GeneratorKind::WNetLateFusion:
                bind_stream("g.s1.enc", enc1_, "g.s1.dec", dec_, true);
                bind_stream("g.s2.enc", enc2_, "g.s2.dec", dec2_, true);
                fuse_ = detail::bind_conv(store_, "g.fuse");
                break;
            default:
                break;
        }
    }

    std::vector<Tensor<T>> encode(std::vector<EncLayer>& enc, const Tensor<T>& input,
                                  bool train) {
        std::vector<Tensor<T>> feats;
        feats.reserve(enc.size());
        Tensor<T> x = input;
        for (size_t i = 0; i < enc.size(); ++i) {
            x = conv2d(x, enc[i].conv.w, enc[i].conv.b, 2, 1);
            x = lrelu(x, static_cast<T>(kLReluSlope));
            if (enc[i].bn)
                x = batch_norm(x, enc[i].bn->gamma, enc[i].bn->beta,
                               enc[i].bn->mean.values(), enc[i].bn->var.values(), train);
            feats.push_back(x);
        }
        return feats;
    }

    // Decodes from the deepest features; skips2 supplies the second encoder's
    // features for the hybrid variant. feature_head keeps activation and
    // normalization on the final layer (W-Net feature head).
    Tensor<T> decode(std::vector<DecLayer>& dec, const std::vector<Tensor<T>>& skips,
                     const std::vector<Tensor<T>>* skips2, bool train, Rng& rng,
                     bool feature_head) {
        const int d = cfg_.depth;
        Tensor<T> y = skips2 ? concat_channels(skips.back(), (*skips2).back())
                             : skips.back();
        for (int i = 0; i < d; ++i) {
            y = conv_transpose2d(y, dec[i].conv.w, dec[i].conv.b, 2, 1);
            const bool is_head = (i == d - 1);
            if (!is_head || feature_head) {
                y = relu(y);
                if (dec[i].bn)
                    y = batch_norm(y, dec[i].bn->gamma, dec[i].bn->beta,
                                   dec[i].bn->mean.values(), dec[i].bn->var.values(), train);
                if (dec[i].dropout && cfg_.dropout_rate > 0.0)
                    y = dropout(y, cfg_.dropout_rate, train, rng);
            }
            if (!is_head) {
                if (skips2) {
                    y = concat_channels<T>({y, skips[d - 2 - i], (*skips2)[d - 2 - i]});
                    skips_used_ += 2;
                } else {
                    y = concat_channels(y, skips[d - 2 - i]);
                    skips_used_ += 1;
                }
            }
        }
        return y;
    }

    GeneratorConfig cfg_;
    ParamStore<T> store_;
    std::vector<EncLayer> enc1_, enc2_;
    std::vector<DecLayer> dec_, dec2_;
    detail::ConvUnit<T> fuse_;
    int skips_used_ = 0;
};

// ---------------------------------------------------------------------------
// Discriminator: 5 halving conv layers, LReLU+BN interior, sigmoid score map.
// ---------------------------------------------------------------------------

template <typename T>
class Discriminator {
public:
    Discriminator(const DiscriminatorConfig& cfg, Rng& init_rng) : cfg_(cfg) {
        cfg_.validate();
        detail::build_params(store_, discriminator_param_layout(cfg_), init_rng);
        bind();
    }

    Discriminator(const DiscriminatorConfig& cfg, ParamStore<T>&& store)
        : cfg_(cfg), store_(std::move(store)) {
        cfg_.validate();
        bind();
    }

    const DiscriminatorConfig& config() const { return cfg_; }
    ParamStore<T>& params() { return store_; }
    const ParamStore<T>& params() const { return store_; }

    // condition: the normalized input DSM (plus PAN when configured);
    // candidate: ground truth or generated DSM, same shape. Returns a score
    // map strictly inside (0,1).
    Tensor<T> forward(const std::vector<Tensor<T>>& condition, const Tensor<T>& candidate,
                      bool train) {
        if (condition.empty()) throw ShapeError("discriminator: missing condition");
        for (const auto& c : condition)
            if (!(c.shape() == candidate.shape()))
                throw ShapeError("discriminator: condition/candidate shape mismatch");
        std::vector<Tensor<T>> all = condition;
        all.push_back(candidate);
        Tensor<T> x = concat_channels(all);
        for (size_t i = 0; i < layers_.size(); ++i) {
            x = conv2d(x, layers_[i].conv.w, layers_[i].conv.b, 2, 1);
            if (i + 1 < layers_.size()) {
                x = lrelu(x, static_cast<T>(kLReluSlope));
                if (layers_[i].bn)
                    x = batch_norm(x, layers_[i].bn->gamma, layers_[i].bn->beta,
                                   layers_[i].bn->mean.values(), layers_[i].bn->var.values(),
                                   train);
            } else {
                x = sigmoid(x);
            }
        }
        return x;
    }

private:
    struct Layer {
        detail::ConvUnit<T> conv;
        std::optional<detail::BnUnit<T>> bn;
    };

    void bind() {
        layers_.resize(cfg_.layers);
        for (int i = 0; i < cfg_.layers; ++i) {
            const std::string p = "d." + std::to_string(i);
            layers_[i].conv = detail::bind_conv(store_, p);
            if (i > 0 && i + 1 < cfg_.layers) layers_[i].bn = detail::bind_bn(store_, p);
        }
    }

    DiscriminatorConfig cfg_;
    ParamStore<T> store_;
    std::vector<Layer> layers_;
};

// ---------------------------------------------------------------------------
// Layout definitions (inline so the header stays self-contained)
// ---------------------------------------------------------------------------

inline std::string to_string(GeneratorKind k) {
    switch (k) {
        case GeneratorKind::SingleStream: return "single";
        case GeneratorKind::WNetLateFusion: return "wnet";
        case GeneratorKind::HybridEarlyFusion: return "hybrid";
        case GeneratorKind::IdentityStub: return "identity";
    }
    return "?";
}

inline GeneratorKind generator_kind_from_string(const std::string& s) {
    if (s == "single") return GeneratorKind::SingleStream;
    if (s == "wnet") return GeneratorKind::WNetLateFusion;
    if (s == "hybrid") return GeneratorKind::HybridEarlyFusion;
    if (s == "identity") return GeneratorKind::IdentityStub;
    throw ConfigError("unknown generator variant: " + s);
}

namespace detail {

inline void push_conv_fwd(std::vector<ParamDesc>& out, const std::string& prefix,
                          int co, int ci, int k) {
    out.push_back({prefix + ".weight", Shape{co, ci, k, k}, true, ParamInit::ConvWeight});
    out.push_back({prefix + ".bias", Shape{1, co, 1, 1}, true, ParamInit::Zero});
}

inline void push_conv_tr(std::vector<ParamDesc>& out, const std::string& prefix,
                         int ci, int co, int k) {
    out.push_back({prefix + ".weight", Shape{ci, co, k, k}, true, ParamInit::ConvWeight});
    out.push_back({prefix + ".bias", Shape{1, co, 1, 1}, true, ParamInit::Zero});
}

inline void push_bn(std::vector<ParamDesc>& out, const std::string& prefix, int c) {
    out.push_back({prefix + ".bn.gamma", Shape{1, c, 1, 1}, true, ParamInit::BnGamma});
    out.push_back({prefix + ".bn.beta", Shape{1, c, 1, 1}, true, ParamInit::Zero});
    out.push_back({prefix + ".bn.mean", Shape{1, c, 1, 1}, false, ParamInit::Zero});
    out.push_back({prefix + ".bn.var", Shape{1, c, 1, 1}, false, ParamInit::One});
}

inline void push_encoder(std::vector<ParamDesc>& out, const std::string& prefix,
                         const GeneratorConfig& cfg) {
    for (int i = 0; i < cfg.depth; ++i) {
        const std::string p = prefix + "." + std::to_string(i);
        const int ci = (i == 0) ? 1 : width_at(cfg.base_width, i - 1);
        const int co = width_at(cfg.base_width, i);
        push_conv_fwd(out, p, co, ci, kConvKernel);
        if (encoder_layer_has_bn(i, cfg.depth)) push_bn(out, p, co);
    }
}

// streams: encoder feature multiplicity at each skip level (1 or 2).
// feature_head: W-Net streams end in a base_width feature layer that keeps
// activation and normalization; the plain variants end in the 1-channel
// tanh head without either.
inline void push_decoder(std::vector<ParamDesc>& out, const std::string& prefix,
                         const GeneratorConfig& cfg, int streams, bool feature_head) {
    const int d = cfg.depth;
    for (int i = 0; i < d; ++i) {
        const std::string p = prefix + "." + std::to_string(i);
        const int level = d - 1 - i; // encoder level whose resolution we restore
        int ci;
        if (i == 0) {
            ci = streams * width_at(cfg.base_width, d - 1);
        } else {
            ci = (1 + streams) * width_at(cfg.base_width, level);
        }
        const bool is_head = (i == d - 1);
        const int co = is_head ? (feature_head ? cfg.base_width : 1)
                               : width_at(cfg.base_width, level - 1);
        push_conv_tr(out, p, ci, co, kConvKernel);
        if (!is_head || feature_head) push_bn(out, p, co);
    }
}

} // namespace detail

inline std::vector<ParamDesc> generator_param_layout(const GeneratorConfig& cfg) {
    cfg.validate();
    std::vector<ParamDesc> out;
    switch (cfg.kind) {
        case GeneratorKind::IdentityStub:
            break;
        case GeneratorKind::SingleStream:
            detail::push_encoder(out, "g.enc1", cfg);
            detail::push_decoder(out, "g.dec", cfg, 1, false);
            break;
        case GeneratorKind::HybridEarlyFusion:
            detail::push_encoder(out, "g.enc1", cfg);
            detail::push_encoder(out, "g.enc2", cfg);
            detail::push_decoder(out, "g.dec", cfg, 2, false);
            break;
        case GeneratorKind::WNetLateFusion:
            detail::push_encoder(out, "g.s1.enc", cfg);
            detail::push_decoder(out, "g.s1.dec", cfg, 1, true);
            detail::push_encoder(out, "g.s2.enc", cfg);
            detail::push_decoder(out, "g.s2.dec", cfg, 1, true);
            detail::push_conv_fwd(out, "g.fuse", 1, 2 * cfg.base_width, 3);
            break;
    }
    return out;
}

inline std::vector<ParamDesc> discriminator_param_layout(const DiscriminatorConfig& cfg) {
    cfg.validate();
    std::vector<ParamDesc> out;
    const int in_ch = (cfg.condition_on_pan ? 2 : 1) + 1;
    for (int i = 0; i < cfg.layers; ++i) {
        const std::string p = "d." + std::to_string(i);
        const int ci = (i == 0) ? in_ch : width_at(cfg.base_width, i - 1);
        const int co = (i + 1 == cfg.layers) ? 1 : width_at(cfg.base_width, i);
        detail::push_conv_fwd(out, p, co, ci, kConvKernel);
        if (i > 0 && i + 1 < cfg.layers) detail::push_bn(out, p, co);
    }
    return out;
}

inline int64_t count_trainable(const std::vector<ParamDesc>& layout) {
    int64_t acc = 0;
    for (const auto& d : layout)
        if (d.trainable) acc += d.shape.count();
    return acc;
}

inline int64_t generator_param_count(const GeneratorConfig& cfg) {
    return count_trainable(generator_param_layout(cfg));
}

inline int64_t discriminator_param_count(const DiscriminatorConfig& cfg) {
    return count_trainable(discriminator_param_layout(cfg));
}

inline std::vector<std::string> describe_generator(const GeneratorConfig& cfg, int patch) {
    cfg.validate();
    if (cfg.kind != GeneratorKind::IdentityStub && patch != cfg.patch_size())
        throw ConfigError("describe: patch must equal 2^depth");
    std::vector<std::string> lines;
    lines.push_back("variant=" + to_string(cfg.kind) + " depth=" + std::to_string(cfg.depth) +
                    " base_width=" + std::to_string(cfg.base_width));
    if (cfg.kind == GeneratorKind::IdentityStub) return lines;
    for (int i = 0; i < cfg.depth; ++i) {
        const int sp = patch >> (i + 1);
        lines.push_back("enc." + std::to_string(i) + ": conv 4x4 s2 -> " +
                        std::to_string(width_at(cfg.base_width, i)) + "ch " +
                        std::to_string(sp) + "x" + std::to_string(sp));
    }
    for (int i = 0; i < cfg.depth; ++i) {
        const int sp = 1 << (i + 1);
        const int level = cfg.depth - 1 - i;
        const int co = (i == cfg.depth - 1)
                           ? (cfg.kind == GeneratorKind::WNetLateFusion ? cfg.base_width : 1)
                           : width_at(cfg.base_width, level - 1);
        lines.push_back("dec." + std::to_string(i) + ": tconv 4x4 s2 -> " +
                        std::to_string(co) + "ch " + std::to_string(sp) + "x" +
                        std::to_string(sp));
    }
    lines.push_back("skips=" + std::to_string(generator_skip_count(cfg)));
    lines.push_back("parameters=" + std::to_string(generator_param_count(cfg)));
    return lines;
}

inline std::vector<std::string> describe_discriminator(const DiscriminatorConfig& cfg,
                                                       int patch) {
    cfg.validate();
    std::vector<std::string> lines;
    int sp = patch;
    for (int i = 0; i < cfg.layers; ++i) {
        sp /= 2;
        const int co = (i + 1 == cfg.layers) ? 1 : width_at(cfg.base_width, i);
        lines.push_back("d." + std::to_string(i) + ": conv 4x4 s2 -> " + std::to_string(co) +
                        "ch " + std::to_string(sp) + "x" + std::to_string(sp));
    }
    lines.push_back("parameters=" + std::to_string(discriminator_param_count(cfg)));
    return lines;
}

} // namespace dsmr
