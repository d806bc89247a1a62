#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <type_traits>
#include <vector>

#include "sensoryt5/autograd.hpp"
#include "sensoryt5/params.hpp"

namespace sensoryt5 {

/// Everything a forward pass needs besides parameters.
template <std::floating_point T>
struct ForwardContext {
    Tape<T>& tape;
    bool train = false;
    Rng* rng = nullptr;  // dropout source; required when train is set
    double keep = 1.0;

    Var<T> drop(const Var<T>& x) const { return dropout(x, keep, rng, train); }
};

/// Handles of the four projections of one multi-head attention block, each
/// [d_model x d_model]. Head i uses columns [i*d_head, (i+1)*d_head) of the
/// query/key/value projections.
struct AttentionWeights {
    std::size_t query;
    std::size_t key;
    std::size_t value;
    std::size_t output;

    template <std::floating_point T>
    static AttentionWeights create(ParamStore<T>& store, const std::string& prefix, std::size_t d_model, Rng& rng) {
        return {store.add(prefix + ".q", {d_model, d_model}, Init::glorot_uniform, rng),
                store.add(prefix + ".k", {d_model, d_model}, Init::glorot_uniform, rng),
                store.add(prefix + ".v", {d_model, d_model}, Init::glorot_uniform, rng),
                store.add(prefix + ".o", {d_model, d_model}, Init::glorot_uniform, rng)};
    }
};

template <std::floating_point T>
struct AttentionResult {
    Var<T> output;                           // [n_q x d_model]
    std::vector<Tensor<T>> head_weights;     // per head [n_q x n_k], filled when captured
};

/// Scaled dot-product multi-head attention:
///   head_i = softmax((q W_i^Q)(k W_i^K)^T / sqrt(d_head) + bias) (v W_i^V)
///   out    = [head_1, ..., head_h] W_O
/// `score_bias`, when given, is added to every head's [n_q x n_k] scores.
template <std::floating_point T>
AttentionResult<T> multi_head_attention(ParamStore<T>& store, const AttentionWeights& w, const Var<T>& q_in,
                                        const Var<T>& k_in, const Var<T>& v_in, std::size_t n_heads,
                                        const std::type_identity_t<Tensor<T>>* score_bias = nullptr, bool capture = false) {
    Tape<T>& tape = q_in.tape();
    const std::size_t d_model = store[w.query].value.rows();
    if (q_in.cols() != d_model || k_in.cols() != d_model || v_in.cols() != d_model) {
        throw ShapeError("attention inputs must have width " + std::to_string(d_model) + ": q " +
                         shape_string(q_in.shape()) + ", k " + shape_string(k_in.shape()) + ", v " +
                         shape_string(v_in.shape()));
    }
    if (k_in.rows() != v_in.rows()) {
        throw ShapeError("attention keys " + shape_string(k_in.shape()) + " and values " +
                         shape_string(v_in.shape()) + " differ in length");
    }
    if (n_heads == 0 || d_model % n_heads != 0) {
        throw ShapeError("d_model " + std::to_string(d_model) + " not divisible by " + std::to_string(n_heads) +
                         " heads");
    }
    if (score_bias && (score_bias->rows() != q_in.rows() || score_bias->cols() != k_in.rows())) {
        throw ShapeError("score bias " + shape_string(score_bias->shape()) + " does not match scores [" +
                         std::to_string(q_in.rows()) + "x" + std::to_string(k_in.rows()) + "]");
    }
    const std::size_t d_head = d_model / n_heads;
    const T inv_sqrt = T(1) / std::sqrt(static_cast<T>(d_head));

    Var<T> q = matmul(q_in, tape.param(store[w.query]));
    Var<T> k = matmul(k_in, tape.param(store[w.key]));
    Var<T> v = matmul(v_in, tape.param(store[w.value]));
    std::optional<Var<T>> bias;
    if (score_bias) bias = tape.constant(*score_bias);

    AttentionResult<T> result;
    std::vector<Var<T>> heads;
    heads.reserve(n_heads);
    for (std::size_t h = 0; h < n_heads; ++h) {
        const std::size_t c0 = h * d_head;
        Var<T> qh = n_heads == 1 ? q : slice_cols(q, c0, d_head);
        Var<T> kh = n_heads == 1 ? k : slice_cols(k, c0, d_head);
        Var<T> vh = n_heads == 1 ? v : slice_cols(v, c0, d_head);
        Var<T> scores = scale(matmul_nt(qh, kh), inv_sqrt);
        if (bias) scores = add(scores, *bias);
        Var<T> weights = softmax_rows(scores);
        if (capture) result.head_weights.push_back(weights.value());
        heads.push_back(matmul(weights, vh));
    }
    Var<T> joined = n_heads == 1 ? heads.front() : concat_cols(heads);
    result.output = matmul(joined, tape.param(store[w.output]));
    return result;
}

}  // namespace sensoryt5
