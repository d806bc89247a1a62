#pragma once

#include <span>
#include <vector>

#include "sensoryt5/sensory_adapter.hpp"

namespace sensoryt5 {

/// Per-token aggregated attention for heatmaps. `sensory` is empty when the
/// adapter is bypassed; `encoder` averages all encoder layers and heads.
struct AttentionTrace {
    std::vector<double> sensory;
    std::vector<double> encoder;
};

template <std::floating_point T>
struct ForwardResult {
    Var<T> logits;
    Tensor<T> probabilities;  // C_d
    std::size_t predicted = 0;
    AttentionTrace trace;
};

/// Backbone + sensory projection + adapter + classifier, with all learnable
/// tensors in one ParamStore. Parameter names group into
///   enc.* / dec.*      backbone (dec.* includes the final decoder layer)
///   sensory.*          projection of the sensory vectors
///   adapter.*          sensory attention
///   classifier.*       output head
template <std::floating_point T>
class SensoryT5 {
public:
    SensoryT5() = default;

    SensoryT5(const ModelConfig& cfg, std::uint64_t seed) : config_(cfg) {
        cfg.validate();
        Rng rng(seed);
        backbone_ = BackboneWeights::create(store_, cfg, rng);
        projection_ = SensoryProjectionWeights::create(store_, cfg.d_sensory_hidden, cfg.d_model, rng);
        adapter_ = AdapterWeights::create(store_, cfg.d_model, cfg.n_classes, rng);
    }

    const ModelConfig& config() const noexcept { return config_; }
    ParamStore<T>& params() noexcept { return store_; }
    const ParamStore<T>& params() const noexcept { return store_; }
    const BackboneWeights& backbone() const noexcept { return backbone_; }
    const SensoryProjectionWeights& projection() const noexcept { return projection_; }
    const AdapterWeights& adapter() const noexcept { return adapter_; }

    EncoderOutput<T> encode(const ForwardContext<T>& ctx, std::span<const std::size_t> ids, bool capture = false) {
        return sensoryt5::encode(config_, store_, backbone_, ctx, ids, capture);
    }

    DecoderTaps<T> decode(const ForwardContext<T>& ctx, const Var<T>& encoder_out, bool capture = false) {
        return sensoryt5::decode(config_, store_, backbone_, ctx, encoder_out, capture);
    }

    Var<T> project(const Var<T>& sensory) { return project_sensory(store_, projection_, sensory); }

    SensoryAttentionResult<T> attend(const Var<T>& s_prime, const DecoderTaps<T>& taps) {
        return sensory_attention(store_, adapter_, s_prime, taps, config_.resolved_adapter_heads());
    }

    ClassifierOutput<T> classify(const ForwardContext<T>& ctx, const Var<T>& a_d) {
        return pool_and_classify(store_, adapter_, ctx, a_d, config_.max_pool);
    }

    /// encode -> decode -> project -> sensory attention -> pool & classify.
    /// With use_adapter == false the adapter is bypassed and V_d itself is
    /// pooled and classified. `sensory` is [n x 6], one row per token.
    ForwardResult<T> forward(const ForwardContext<T>& ctx, std::span<const std::size_t> ids, const Tensor<T>& sensory,
                             bool use_adapter = true, bool capture = false) {
        if (use_adapter && (sensory.rows() != ids.size() || sensory.cols() != kSensoryDims)) {
            throw ShapeError("forward: sensory input " + shape_string(sensory.shape()) + " for " +
                             std::to_string(ids.size()) + " tokens");
        }
        ForwardResult<T> r;
        auto enc = encode(ctx, ids, capture);
        auto taps = decode(ctx, enc.hidden);
        Var<T> pooled_input = taps.v_d;
        if (use_adapter) {
            Var<T> s_prime = project(ctx.tape.constant(sensory));
            auto attn = attend(s_prime, taps);
            pooled_input = attn.a_d;
            r.trace.sensory = std::move(attn.trace);
        }
        auto cls = classify(ctx, pooled_input);
        r.logits = cls.logits;
        r.probabilities = std::move(cls.probabilities);
        r.predicted = argmax<T>(r.probabilities.data());
        if (capture) r.trace.encoder = encoder_trace(enc.layer_weights, ids.size());
        return r;
    }

    /// Attention matrices averaged over encoder layers and heads, then reduced
    /// per token like the sensory trace.
    static std::vector<double> encoder_trace(const std::vector<std::vector<Tensor<T>>>& layers, std::size_t n) {
        std::vector<Tensor<T>> flat;
        for (const auto& l : layers)
            for (const auto& h : l) flat.push_back(h);
        return aggregate_trace(flat, n);
    }

private:
    ModelConfig config_;
    ParamStore<T> store_;
    BackboneWeights backbone_;
    SensoryProjectionWeights projection_;
    AdapterWeights adapter_;
};

}  // namespace sensoryt5
