#pragma once

// Sensory adapter: per-token sensory vectors are lifted into model space by a
// two-layer ReLU projection and used as the queries of an attention block
// whose keys come from K_0 and values from V_d. The adapter output is pooled,
// passed through dropout, and classified.

#include <algorithm>
#include <vector>

#include "sensoryt5/encoder_decoder.hpp"
#include "sensoryt5/lexicon.hpp"

namespace sensoryt5 {

struct SensoryProjectionWeights {
    std::size_t w1;  // [6 x d_hidden]
    std::size_t b1;  // [d_hidden]
    std::size_t w2;  // [d_hidden x d_model]
    std::size_t b2;  // [d_model]

    template <std::floating_point T>
    static SensoryProjectionWeights create(ParamStore<T>& store, std::size_t d_hidden, std::size_t d_model, Rng& rng) {
        return {store.add("sensory.w1", {kSensoryDims, d_hidden}, Init::glorot_uniform, rng),
                store.add("sensory.b1", {d_hidden}, Init::zeros, rng),
                store.add("sensory.w2", {d_hidden, d_model}, Init::glorot_uniform, rng),
                store.add("sensory.b2", {d_model}, Init::zeros, rng)};
    }
};

struct AdapterWeights {
    AttentionWeights attention;  // W_i^Q, W_i^K, W_i^V per head and output projection W_d
    std::size_t classifier_w;    // [d_model x n_classes]
    std::size_t classifier_b;    // [n_classes]

    template <std::floating_point T>
    static AdapterWeights create(ParamStore<T>& store, std::size_t d_model, std::size_t n_classes, Rng& rng) {
        AdapterWeights w;
        w.attention = AttentionWeights::create(store, "adapter.attn", d_model, rng);
        w.classifier_w = store.add("classifier.w", {d_model, n_classes}, Init::glorot_uniform, rng);
        w.classifier_b = store.add("classifier.b", {n_classes}, Init::zeros, rng);
        return w;
    }
};

/// s'(w) = ReLU(s(w) W1 + b1) W2 + b2, row-wise over an [n x 6] input.
template <std::floating_point T>
Var<T> project_sensory(ParamStore<T>& store, const SensoryProjectionWeights& w, const Var<T>& sensory) {
    if (sensory.cols() != kSensoryDims) {
        throw ShapeError("sensory input must be [n x 6], got " + shape_string(sensory.shape()));
    }
    Tape<T>& tape = sensory.tape();
    Var<T> hidden = relu(add_bias(matmul(sensory, tape.param(store[w.w1])), tape.param(store[w.b1])));
    return add_bias(matmul(hidden, tape.param(store[w.w2])), tape.param(store[w.b2]));
}

/// Normalizes a non-negative trace by its maximum (all-zero stays zero).
inline std::vector<double> normalize_by_max(std::vector<double> v) {
    const double mx = v.empty() ? 0.0 : *std::max_element(v.begin(), v.end());
    if (mx > 0.0)
        for (auto& x : v) x /= mx;
    return v;
}

/// Per-token attention score: weights summed over heads and over the query
/// axis (attention received by each key position), scaled to [0, 1] by the
/// max. If the key axis does not line up with the tokens (length-1 decoder),
/// the per-query sums are used instead so the trace still has one value per
/// token.
template <std::floating_point T>
std::vector<double> aggregate_trace(const std::vector<Tensor<T>>& head_weights, std::size_t n_tokens) {
    std::vector<double> trace(n_tokens, 0.0);
    for (const auto& w : head_weights) {
        if (w.cols() == n_tokens) {
            for (std::size_t i = 0; i < w.rows(); ++i)
                for (std::size_t j = 0; j < w.cols(); ++j) trace[j] += static_cast<double>(w(i, j));
        } else {
            for (std::size_t i = 0; i < std::min(w.rows(), n_tokens); ++i)
                for (std::size_t j = 0; j < w.cols(); ++j) trace[i] += static_cast<double>(w(i, j));
        }
    }
    return normalize_by_max(std::move(trace));
}

template <std::floating_point T>
struct SensoryAttentionResult {
    Var<T> a_d;                          // [n x d_model]
    std::vector<Tensor<T>> head_weights; // per head [n x m]
    std::vector<double> trace;           // length n
};

/// A_d = MultiHead(s'(w), K_0, V_d): the projected sensory vectors replace the
/// queries; keys and values are projected from the decoder taps.
template <std::floating_point T>
SensoryAttentionResult<T> sensory_attention(ParamStore<T>& store, const AdapterWeights& w, const Var<T>& s_prime,
                                            const DecoderTaps<T>& taps, std::size_t n_heads) {
    auto attn = multi_head_attention(store, w.attention, s_prime, taps.k_0, taps.v_d, n_heads, nullptr, true);
    SensoryAttentionResult<T> r;
    r.a_d = attn.output;
    r.trace = aggregate_trace(attn.head_weights, s_prime.rows());
    r.head_weights = std::move(attn.head_weights);
    return r;
}

template <std::floating_point T>
struct ClassifierOutput {
    Var<T> logits;         // [1 x C]
    Tensor<T> probabilities;
};

/// Lowest index wins ties.
template <std::floating_point T>
std::size_t argmax(std::span<const T> v) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < v.size(); ++i)
        if (v[i] > v[best]) best = i;
    return best;
}

template <std::floating_point T>
Tensor<T> softmax_values(const Tensor<T>& logits) {
    Tensor<T> p = logits;
    const T mx = *std::max_element(p.data().begin(), p.data().end());
    T z = 0;
    for (auto& v : p.data()) z += (v = std::exp(v - mx));
    for (auto& v : p.data()) v /= z;
    return p;
}

/// P_d = Dropout(Pool(A_d)); C_d = Softmax(Linear(Dropout(P_d))). Both dropouts
/// share the configured keep-probability and are inactive in eval mode.
template <std::floating_point T>
ClassifierOutput<T> pool_and_classify(ParamStore<T>& store, const AdapterWeights& w, const ForwardContext<T>& ctx,
                                      const Var<T>& a_d, bool max_pool = false) {
    if (a_d.rows() == 0) throw Error("pool_and_classify: empty sequence");
    Tape<T>& tape = ctx.tape;
    Var<T> pooled = ctx.drop(max_pool ? max_rows(a_d) : mean_rows(a_d));
    Var<T> logits = add_bias(matmul(ctx.drop(pooled), tape.param(store[w.classifier_w])),
                             tape.param(store[w.classifier_b]));
    return {logits, softmax_values(logits.value())};
}

}  // namespace sensoryt5
