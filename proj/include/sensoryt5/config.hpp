#pragma once

// Flat JSON run configuration shared by the command-line tools. vocab_size
// and n_classes are derived from data and never read from a config file.

#include <string>

#include <nlohmann/json.hpp>

#include "sensoryt5/encoder_decoder.hpp"
#include "sensoryt5/train.hpp"

namespace sensoryt5 {

struct RunConfig {
    ModelConfig model;
    TrainConfig train;
};

inline nlohmann::json to_json(const RunConfig& rc) {
    const auto& m = rc.model;
    const auto& t = rc.train;
    return {{"d_model", m.d_model},
            {"n_heads", m.n_heads},
            {"d_ff", m.d_ff},
            {"n_enc_layers", m.n_enc_layers},
            {"n_dec_layers", m.n_dec_layers},
            {"max_seq_len", m.max_seq_len},
            {"dropout_keep", m.dropout_keep},
            {"d_sensory_hidden", m.d_sensory_hidden},
            {"adapter_heads", m.adapter_heads},
            {"max_pool", m.max_pool},
            {"decoder_len1", m.decoder_len1},
            {"epochs", t.epochs},
            {"batch_size", t.batch_size},
            {"learning_rate", t.adam.learning_rate},
            {"beta1", t.adam.beta1},
            {"beta2", t.adam.beta2},
            {"adam_eps", t.adam.eps},
            {"seed", t.seed},
            {"mode", std::string(mode_name(t.mode))}};
}

/// Overlays the keys present in `j` onto `rc`. Unknown keys and wrongly typed
/// values are errors so that typos do not silently fall back to defaults.
inline void apply_json(RunConfig& rc, const nlohmann::json& j) {
    if (!j.is_object()) throw Error("config must be a JSON object");
    auto& m = rc.model;
    auto& t = rc.train;
    for (const auto& [key, value] : j.items()) {
        auto count = [&](std::size_t& dst) {
            if (!value.is_number_unsigned()) throw Error("config key '" + key + "' must be a non-negative integer");
            dst = value.get<std::size_t>();
        };
        auto real = [&](double& dst) {
            if (!value.is_number()) throw Error("config key '" + key + "' must be a number");
            dst = value.get<double>();
        };
        auto flag = [&](bool& dst) {
            if (!value.is_boolean()) throw Error("config key '" + key + "' must be true or false");
            dst = value.get<bool>();
        };
        if (key == "d_model") count(m.d_model);
        else if (key == "n_heads") count(m.n_heads);
        else if (key == "d_ff") count(m.d_ff);
        else if (key == "n_enc_layers") count(m.n_enc_layers);
        else if (key == "n_dec_layers") count(m.n_dec_layers);
        else if (key == "max_seq_len") count(m.max_seq_len);
        else if (key == "dropout_keep") real(m.dropout_keep);
        else if (key == "d_sensory_hidden") count(m.d_sensory_hidden);
        else if (key == "adapter_heads") count(m.adapter_heads);
        else if (key == "max_pool") flag(m.max_pool);
        else if (key == "decoder_len1") flag(m.decoder_len1);
        else if (key == "epochs") count(t.epochs);
        else if (key == "batch_size") count(t.batch_size);
        else if (key == "learning_rate") real(t.adam.learning_rate);
        else if (key == "beta1") real(t.adam.beta1);
        else if (key == "beta2") real(t.adam.beta2);
        else if (key == "adam_eps") real(t.adam.eps);
        else if (key == "seed") {
            if (!value.is_number_unsigned()) throw Error("config key 'seed' must be a non-negative integer");
            t.seed = value.get<std::uint64_t>();
        } else if (key == "mode") {
            if (!value.is_string()) throw Error("config key 'mode' must be a string");
            t.mode = parse_mode(value.get<std::string>());
        } else {
            throw Error("unknown config key '" + key + "'");
        }
    }
}

inline RunConfig parse_run_config(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw Error(std::string("config is not valid JSON: ") + e.what());
    }
    RunConfig rc;
    apply_json(rc, j);
    return rc;
}

}  // namespace sensoryt5
