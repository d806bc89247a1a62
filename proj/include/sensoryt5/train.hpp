#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "sensoryt5/checkpoint.hpp"
#include "sensoryt5/dataset.hpp"
#include "sensoryt5/metrics.hpp"
#include "sensoryt5/model.hpp"
#include "sensoryt5/optim.hpp"

namespace sensoryt5 {

struct TrainConfig {
    std::size_t epochs = 30;
    std::size_t batch_size = 16;
    AdamOptions adam;  // learning rate 1e-4, betas (0.9, 0.999), eps 1e-8
    std::uint64_t seed = 0;
    AblationMode mode = AblationMode::sensory;
};

struct EpochRecord {
    std::size_t epoch = 0;
    double train_loss = 0.0;
    double dev_acc = 0.0;
    double dev_macro_f1 = 0.0;
};

/// Stream salts: the sensory draws of a random_sensory run depend on
/// (run seed, stream, example index), so evaluation reproduces training-time dev scores.
enum class DataStream : std::uint64_t { train = 0, eval = 1 };

/// A tokenized example ready for the model.
template <std::floating_point T>
struct EncodedExample {
    std::vector<std::string> tokens;
    std::vector<std::size_t> ids;
    Tensor<T> sensory;  // [n x 6]
    std::size_t label = 0;
};

/// Tokenizes and attaches sensory vectors. An empty token list is an error in
/// training; at evaluation it becomes a single unknown token with a zero vector.
template <std::floating_point T>
EncodedExample<T> encode_text(const std::string& text, std::size_t label, const Vocabulary& vocab,
                              const Lexicon& lexicon, AblationMode mode, std::uint64_t seed, std::size_t max_len,
                              bool allow_empty) {
    EncodedExample<T> ex;
    ex.label = label;
    ex.tokens = tokenize(text, max_len);
    std::vector<SensoryVector> seq;
    if (ex.tokens.empty()) {
        if (!allow_empty) throw Error("training text '" + text + "' has no tokens");
        ex.ids = {Vocabulary::kUnknown};
        seq.assign(1, SensoryVector{});
    } else {
        ex.ids = vocab.ids(ex.tokens);
        seq = sensory_sequence(lexicon, ex.tokens, mode, seed);
    }
    ex.sensory = Tensor<T>::matrix(seq.size(), kSensoryDims);
    for (std::size_t i = 0; i < seq.size(); ++i)
        for (std::size_t d = 0; d < kSensoryDims; ++d) ex.sensory(i, d) = static_cast<T>(seq[i][d]);
    return ex;
}

template <std::floating_point T>
std::vector<EncodedExample<T>> encode_dataset(const Dataset& ds, const Vocabulary& vocab, const Lexicon& lexicon,
                                              AblationMode mode, std::uint64_t seed, DataStream stream,
                                              std::size_t max_len) {
    std::vector<EncodedExample<T>> out;
    out.reserve(ds.size());
    const std::uint64_t stream_seed = mix_seed(seed, 1000 + static_cast<std::uint64_t>(stream));
    for (std::size_t i = 0; i < ds.size(); ++i) {
        out.push_back(encode_text<T>(ds.examples[i].text, ds.examples[i].label, vocab, lexicon, mode,
                                     mix_seed(stream_seed, i), max_len, stream == DataStream::eval));
    }
    return out;
}

/// Eval-mode forward for one encoded example.
template <std::floating_point T>
ForwardResult<T> predict(SensoryT5<T>& model, const EncodedExample<T>& ex, AblationMode mode, bool capture = false) {
    Tape<T> tape(false);
    ForwardContext<T> ctx{tape};
    return model.forward(ctx, ex.ids, ex.sensory, mode != AblationMode::none, capture);
}

template <std::floating_point T>
EvalReport evaluate(SensoryT5<T>& model, const std::vector<EncodedExample<T>>& data, AblationMode mode) {
    if (data.empty()) throw Error("evaluate: dataset is empty");
    std::vector<std::size_t> gold, pred;
    for (const auto& ex : data) {
        gold.push_back(ex.label);
        pred.push_back(predict(model, ex, mode).predicted);
    }
    return report_from_predictions(gold, pred, model.config().n_classes);
}

template <std::floating_point T>
struct TrainResult {
    SensoryT5<T> model;  // parameters from the best dev epoch (last epoch without a dev set)
    std::vector<EpochRecord> history;
    std::size_t best_epoch = 0;
};

/// Mini-batch Adam on the cross-entropy of C_d. The run seed fixes the
/// initialization, data order, dropout masks and random sensory draws.
template <std::floating_point T>
TrainResult<T> train(const ModelConfig& model_config, const TrainConfig& cfg,
                     const std::vector<EncodedExample<T>>& train_set, const std::vector<EncodedExample<T>>& dev_set,
                     const std::function<void(const EpochRecord&)>& on_epoch = {}) {
    if (train_set.empty()) throw Error("train: training set is empty");
    if (cfg.batch_size == 0) throw Error("train: batch size must be >= 1");
    if (!(cfg.adam.learning_rate >= 0.0)) throw Error("train: learning rate must be >= 0");

    SensoryT5<T> model(model_config, mix_seed(cfg.seed, 1));
    Rng order_rng(mix_seed(cfg.seed, 2));
    Rng dropout_rng(mix_seed(cfg.seed, 3));
    Adam<T> adam(cfg.adam);
    const bool use_adapter = cfg.mode != AblationMode::none;

    TrainResult<T> result{model, {}, 0};
    double best_dev = -1.0;
    std::vector<std::size_t> order(train_set.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

    for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
        shuffle(order, order_rng);
        double loss_sum = 0.0;
        std::size_t step = 0;
        for (std::size_t start = 0; start < order.size(); start += cfg.batch_size, ++step) {
            const std::size_t end = std::min(order.size(), start + cfg.batch_size);
            model.params().zero_grad();
            Tape<T> tape;
            ForwardContext<T> ctx{tape, true, &dropout_rng, model_config.dropout_keep};
            std::optional<Var<T>> total;
            try {
                for (std::size_t b = start; b < end; ++b) {
                    const auto& ex = train_set[order[b]];
                    auto out = model.forward(ctx, ex.ids, ex.sensory, use_adapter);
                    Var<T> l = cross_entropy(out.logits, ex.label);
                    total = total ? add(*total, l) : l;
                }
            } catch (const NumericError& e) {
                throw NumericError("training diverged at epoch " + std::to_string(epoch) + ", step " +
                                   std::to_string(step) + ": " + e.what());
            }
            Var<T> loss = scale(*total, T(1) / static_cast<T>(end - start));
            const double lv = static_cast<double>(loss.value()[0]);
            if (!std::isfinite(lv)) {
                throw NumericError("training diverged at epoch " + std::to_string(epoch) + ", step " +
                                   std::to_string(step) + ": loss is not finite");
            }
            loss_sum += lv * static_cast<double>(end - start);
            tape.backward(loss);
            adam.step(model.params());
        }
        EpochRecord rec{epoch, loss_sum / static_cast<double>(train_set.size()), 0.0, 0.0};
        if (!dev_set.empty()) {
            const auto report = evaluate(model, dev_set, cfg.mode);
            rec.dev_acc = report.accuracy;
            rec.dev_macro_f1 = report.macro_f1;
        }
        result.history.push_back(rec);
        if (on_epoch) on_epoch(rec);
        if (dev_set.empty() || rec.dev_acc > best_dev) {
            best_dev = rec.dev_acc;
            result.best_epoch = epoch;
            result.model = model;
        }
    }
    return result;
}

/// Turns a text line into an eval-mode prediction plus attention traces.
template <std::floating_point T>
struct Prediction {
    std::vector<std::string> tokens;
    Tensor<T> probabilities;
    std::size_t label = 0;
    AttentionTrace trace;
};

template <std::floating_point T>
Prediction<T> predict_text(Checkpoint<T>& ck, const Lexicon& lexicon, const std::string& text) {
    auto ex = encode_text<T>(text, 0, ck.vocab, lexicon, ck.mode, mix_seed(ck.seed, 7), ck.model.config().max_seq_len,
                             true);
    auto out = predict(ck.model, ex, ck.mode, true);
    Prediction<T> p;
    p.tokens = ex.tokens;
    p.probabilities = out.probabilities;
    p.label = out.predicted;
    p.trace = std::move(out.trace);
    if (p.tokens.empty()) {
        p.trace.sensory.clear();
        p.trace.encoder.clear();
    }
    return p;
}

}  // namespace sensoryt5
