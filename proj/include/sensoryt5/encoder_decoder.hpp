#pragma once

// Toy T5-style encoder-decoder. The decoder is fed a zero-embedding sequence
// (plus learned positions) and exposes two taps for the sensory adapter:
// V_d, the final decoder output, and K_0, the penultimate layer's state.

#include <span>
#include <string>
#include <vector>

#include "sensoryt5/attention.hpp"

namespace sensoryt5 {

struct ModelConfig {
    std::size_t vocab_size = 1;
    std::size_t d_model = 64;
    std::size_t n_heads = 4;
    std::size_t d_ff = 128;
    std::size_t n_enc_layers = 2;
    std::size_t n_dec_layers = 2;
    std::size_t max_seq_len = 64;
    double dropout_keep = 0.9;
    /// Hidden width of the sensory projection (6 -> d_sensory_hidden -> d_model).
    std::size_t d_sensory_hidden = 128;
    std::size_t n_classes = 2;
    /// Adapter head count; 0 means "same as n_heads".
    std::size_t adapter_heads = 0;
    bool max_pool = false;
    /// Feed the decoder a single zero position instead of n of them.
    bool decoder_len1 = false;

    std::size_t d_head() const { return d_model / n_heads; }
    std::size_t resolved_adapter_heads() const { return adapter_heads ? adapter_heads : n_heads; }

    void validate() const {
        auto positive = [](std::size_t v, const char* name) {
            if (v == 0) throw Error(std::string("model config: ") + name + " must be >= 1");
        };
        positive(vocab_size, "vocab_size");
        positive(d_model, "d_model");
        positive(n_heads, "n_heads");
        positive(d_ff, "d_ff");
        positive(n_enc_layers, "n_enc_layers");
        positive(n_dec_layers, "n_dec_layers");
        positive(max_seq_len, "max_seq_len");
        positive(d_sensory_hidden, "d_sensory_hidden");
        positive(n_classes, "n_classes");
        if (d_model % n_heads != 0) throw Error("model config: d_model must be divisible by n_heads");
        if (d_model % resolved_adapter_heads() != 0) {
            throw Error("model config: d_model must be divisible by adapter_heads");
        }
        if (!(dropout_keep > 0.0 && dropout_keep <= 1.0)) throw Error("model config: dropout_keep must lie in (0, 1]");
    }

    friend bool operator==(const ModelConfig&, const ModelConfig&) = default;
};

struct LayerNormWeights {
    std::size_t gain;
    std::size_t shift;

    template <std::floating_point T>
    static LayerNormWeights create(ParamStore<T>& store, const std::string& prefix, std::size_t d, Rng& rng) {
        return {store.add(prefix + ".gain", {d}, Init::ones, rng), store.add(prefix + ".shift", {d}, Init::zeros, rng)};
    }

    template <std::floating_point T>
    Var<T> apply(ParamStore<T>& store, const Var<T>& x) const {
        Tape<T>& tape = x.tape();
        return layer_norm(x, tape.param(store[gain]), tape.param(store[shift]));
    }
};

struct FeedForwardWeights {
    std::size_t w_in;
    std::size_t w_out;

    template <std::floating_point T>
    static FeedForwardWeights create(ParamStore<T>& store, const std::string& prefix, std::size_t d,
                                     std::size_t d_ff, Rng& rng) {
        return {store.add(prefix + ".w_in", {d, d_ff}, Init::glorot_uniform, rng),
                store.add(prefix + ".w_out", {d_ff, d}, Init::glorot_uniform, rng)};
    }

    template <std::floating_point T>
    Var<T> apply(ParamStore<T>& store, const Var<T>& x) const {
        Tape<T>& tape = x.tape();
        return matmul(relu(matmul(x, tape.param(store[w_in]))), tape.param(store[w_out]));
    }
};

struct EncoderLayerWeights {
    LayerNormWeights ln_attn;
    AttentionWeights self_attn;
    LayerNormWeights ln_ff;
    FeedForwardWeights ff;
};

struct DecoderLayerWeights {
    LayerNormWeights ln_self;
    AttentionWeights self_attn;
    LayerNormWeights ln_cross;
    AttentionWeights cross_attn;
    LayerNormWeights ln_ff;
    FeedForwardWeights ff;
};

struct BackboneWeights {
    std::size_t token_embedding;
    std::size_t encoder_positions;
    std::vector<EncoderLayerWeights> encoder;
    LayerNormWeights encoder_norm;
    std::size_t decoder_positions;
    std::vector<DecoderLayerWeights> decoder;
    LayerNormWeights decoder_norm;

    template <std::floating_point T>
    static BackboneWeights create(ParamStore<T>& store, const ModelConfig& cfg, Rng& rng) {
        BackboneWeights w;
        const std::size_t d = cfg.d_model;
        w.token_embedding = store.add("enc.embed", {cfg.vocab_size, d}, Init::glorot_uniform, rng);
        w.encoder_positions = store.add("enc.pos", {cfg.max_seq_len, d}, Init::glorot_uniform, rng);
        for (std::size_t l = 0; l < cfg.n_enc_layers; ++l) {
            const std::string p = "enc." + std::to_string(l);
            EncoderLayerWeights lw;
            lw.ln_attn = LayerNormWeights::create(store, p + ".ln_attn", d, rng);
            lw.self_attn = AttentionWeights::create(store, p + ".self", d, rng);
            lw.ln_ff = LayerNormWeights::create(store, p + ".ln_ff", d, rng);
            lw.ff = FeedForwardWeights::create(store, p + ".ff", d, cfg.d_ff, rng);
            w.encoder.push_back(lw);
        }
        w.encoder_norm = LayerNormWeights::create(store, "enc.final_ln", d, rng);
        w.decoder_positions = store.add("dec.pos", {cfg.max_seq_len, d}, Init::glorot_uniform, rng);
        for (std::size_t l = 0; l < cfg.n_dec_layers; ++l) {
            const std::string p = "dec." + std::to_string(l);
            DecoderLayerWeights lw;
            lw.ln_self = LayerNormWeights::create(store, p + ".ln_self", d, rng);
            lw.self_attn = AttentionWeights::create(store, p + ".self", d, rng);
            lw.ln_cross = LayerNormWeights::create(store, p + ".ln_cross", d, rng);
            lw.cross_attn = AttentionWeights::create(store, p + ".cross", d, rng);
            lw.ln_ff = LayerNormWeights::create(store, p + ".ln_ff", d, rng);
            lw.ff = FeedForwardWeights::create(store, p + ".ff", d, cfg.d_ff, rng);
            w.decoder.push_back(lw);
        }
        w.decoder_norm = LayerNormWeights::create(store, "dec.final_ln", d, rng);
        return w;
    }
};

template <std::floating_point T>
struct EncoderOutput {
    Var<T> hidden;                                       // [n x d_model]
    std::vector<std::vector<Tensor<T>>> layer_weights;   // [layer][head] when captured
};

template <std::floating_point T>
struct DecoderTaps {
    Var<T> v_d;  // final decoder output, [m x d_model]
    Var<T> k_0;  // penultimate decoder state after the final layer norm, [m x d_model]
    std::vector<std::vector<Tensor<T>>> self_weights;   // [layer][head] when captured
    std::vector<std::vector<Tensor<T>>> cross_weights;  // [layer][head] when captured
};

/// Pre-norm encoder: embeddings + learned positions, then per layer
/// x += SelfAttn(LN(x)); x += FF(LN(x)); a final LN closes the stack.
template <std::floating_point T>
EncoderOutput<T> encode(const ModelConfig& cfg, ParamStore<T>& store, const BackboneWeights& w,
                        const ForwardContext<T>& ctx, std::span<const std::size_t> token_ids,
                        bool capture = false) {
    const std::size_t n = token_ids.size();
    if (n == 0) throw Error("encode: empty token sequence");
    if (n > cfg.max_seq_len) {
        throw Error("encode: sequence length " + std::to_string(n) + " exceeds max_seq_len " +
                    std::to_string(cfg.max_seq_len));
    }
    for (auto id : token_ids) {
        if (id >= cfg.vocab_size) {
            throw Error("encode: token id " + std::to_string(id) + " >= vocab_size " + std::to_string(cfg.vocab_size));
        }
    }
    Tape<T>& tape = ctx.tape;
    Var<T> x = add(gather_rows(tape.param(store[w.token_embedding]), token_ids),
                   slice_rows(tape.param(store[w.encoder_positions]), 0, n));
    x = ctx.drop(x);
    EncoderOutput<T> out;
    for (const auto& layer : w.encoder) {
        Var<T> h = layer.ln_attn.apply(store, x);
        auto attn = multi_head_attention(store, layer.self_attn, h, h, h, cfg.n_heads, nullptr, capture);
        if (capture) out.layer_weights.push_back(std::move(attn.head_weights));
        x = add(x, ctx.drop(attn.output));
        x = add(x, ctx.drop(layer.ff.apply(store, layer.ln_ff.apply(store, x))));
    }
    out.hidden = ctx.drop(w.encoder_norm.apply(store, x));
    return out;
}

/// Runs the decoder over a zero-embedding input (learned positions only) of
/// length n, or 1 under decoder_len1. Each layer: self-attention,
/// cross-attention over the encoder output, feed-forward. With a single
/// decoder layer K_0 is taken from the decoder input state.
template <std::floating_point T>
DecoderTaps<T> decode(const ModelConfig& cfg, ParamStore<T>& store, const BackboneWeights& w,
                      const ForwardContext<T>& ctx, const Var<T>& encoder_out, bool capture = false) {
    if (encoder_out.cols() != cfg.d_model) {
        throw ShapeError("decode: encoder output " + shape_string(encoder_out.shape()) + " has wrong width");
    }
    const std::size_t m = cfg.decoder_len1 ? 1 : encoder_out.rows();
    if (m > cfg.max_seq_len) throw Error("decode: sequence length exceeds max_seq_len");
    Tape<T>& tape = ctx.tape;
    Var<T> y = slice_rows(tape.param(store[w.decoder_positions]), 0, m);
    Var<T> previous = y;
    DecoderTaps<T> taps;
    for (const auto& layer : w.decoder) {
        previous = y;
        Var<T> h = layer.ln_self.apply(store, y);
        auto self = multi_head_attention(store, layer.self_attn, h, h, h, cfg.n_heads, nullptr, capture);
        y = add(y, ctx.drop(self.output));
        h = layer.ln_cross.apply(store, y);
        auto cross = multi_head_attention(store, layer.cross_attn, h, encoder_out, encoder_out, cfg.n_heads, nullptr,
                                          capture);
        y = add(y, ctx.drop(cross.output));
        y = add(y, ctx.drop(layer.ff.apply(store, layer.ln_ff.apply(store, y))));
        if (capture) {
            taps.self_weights.push_back(std::move(self.head_weights));
            taps.cross_weights.push_back(std::move(cross.head_weights));
        }
    }
    taps.k_0 = w.decoder_norm.apply(store, previous);
    taps.v_d = ctx.drop(w.decoder_norm.apply(store, y));
    return taps;
}

}  // namespace sensoryt5
