// Acceptance run: one PASS/FAIL line per criterion, non-zero exit on any FAIL.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "sensoryt5/sensoryt5.hpp"
#include "support/oracles.hpp"

using namespace sensoryt5;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    enum class Status { pass, fail, skip } status = Status::fail;
    std::string detail;
};

Outcome verdict(bool ok, std::string detail) {
    return {ok ? Outcome::Status::pass : Outcome::Status::fail, std::move(detail)};
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(double v, int precision = 3) {
    std::ostringstream os;
    os.precision(precision);
    os << v;
    return os.str();
}

Tensor<double> random_sensory(std::size_t n, Rng& rng) {
    return oracle::random_matrix(n, kSensoryDims, rng, kSensoryMin, kSensoryMax);
}

// 1 -------------------------------------------------------------------------

Outcome gradient_fidelity() {
    ModelConfig cfg;
    cfg.vocab_size = 30;
    cfg.d_model = 32;
    cfg.n_heads = 4;
    cfg.d_ff = 64;
    cfg.n_enc_layers = 2;
    cfg.n_dec_layers = 2;
    cfg.max_seq_len = 8;
    cfg.dropout_keep = 1.0;
    cfg.d_sensory_hidden = 32;
    cfg.n_classes = 4;

    const auto t0 = std::chrono::steady_clock::now();
    SensoryT5<double> model(cfg, 101);
    Rng rng(102);
    std::vector<std::size_t> ids(8);
    for (auto& id : ids) id = uniform_index(rng, cfg.vocab_size);
    const Tensor<double> sensory = random_sensory(8, rng);
    const std::size_t label = 2;

    auto r = grad_check<double>(
        [&](Tape<double>& t) {
            ForwardContext<double> ctx{t};
            return cross_entropy(model.forward(ctx, ids, sensory).logits, label);
        },
        model.params().all(), {1e-5, 8, 103});
    const double elapsed = seconds_since(t0);

    std::size_t adapter = 0, backbone = 0, projection = 0;
    for (const auto& e : r.entries) {
        if (e.param.starts_with("adapter.") || e.param.starts_with("classifier.")) ++adapter;
        else if (e.param.starts_with("enc.") || e.param.starts_with("dec.")) ++backbone;
        else if (e.param.starts_with("sensory.")) ++projection;
    }
    const bool ok = r.max_rel_error < 1e-4 && r.entries.size() >= 200 && adapter > 0 && backbone > 0 &&
                    projection > 0 && elapsed < 60.0;
    return verdict(ok, "max rel error " + fmt(r.max_rel_error) + " over " + std::to_string(r.entries.size()) +
                           " coordinates (adapter " + std::to_string(adapter) + ", encoder/decoder " +
                           std::to_string(backbone) + ", sensory " + std::to_string(projection) + ") in " +
                           fmt(elapsed) + " s");
}

// 2 -------------------------------------------------------------------------

struct RowSumStats {
    double worst = 0.0;
    std::size_t rows = 0;

    void add(const Tensor<double>& w) {
        for (std::size_t i = 0; i < w.rows(); ++i) {
            double s = 0.0;
            for (std::size_t j = 0; j < w.cols(); ++j) s += w(i, j);
            worst = std::max(worst, std::abs(s - 1.0));
            ++rows;
        }
    }
    void add(const std::vector<std::vector<Tensor<double>>>& layers) {
        for (const auto& l : layers)
            for (const auto& h : l) add(h);
    }
};

Outcome attention_invariants() {
    Rng rng(201);
    RowSumStats stats;
    bool single_key_exact = true;
    for (std::size_t trial = 0; trial < 1000; ++trial) {
        ModelConfig cfg;
        cfg.n_heads = 1 + uniform_index(rng, 4);
        cfg.d_model = cfg.n_heads * (2 + uniform_index(rng, 4));
        cfg.d_ff = 4 + uniform_index(rng, 12);
        cfg.n_enc_layers = 1 + uniform_index(rng, 2);
        cfg.n_dec_layers = 1 + uniform_index(rng, 2);
        cfg.vocab_size = 5 + uniform_index(rng, 20);
        cfg.max_seq_len = 12;
        cfg.dropout_keep = 1.0;
        cfg.d_sensory_hidden = 3 + uniform_index(rng, 8);
        cfg.n_classes = 2 + uniform_index(rng, 5);
        cfg.decoder_len1 = uniform_index(rng, 4) == 0;
        cfg.max_pool = uniform_index(rng, 2) == 0;
        const bool single = trial % 10 == 0;
        const std::size_t n = single ? 1 : 1 + uniform_index(rng, cfg.max_seq_len);
        if (single) cfg.decoder_len1 = true;

        SensoryT5<double> model(cfg, mix_seed(202, trial));
        std::vector<std::size_t> ids(n);
        for (auto& id : ids) id = uniform_index(rng, cfg.vocab_size);
        Tape<double> tape(false);
        ForwardContext<double> ctx{tape};
        auto enc = model.encode(ctx, ids, true);
        auto taps = model.decode(ctx, enc.hidden, true);
        auto attn = model.attend(model.project(tape.constant(random_sensory(n, rng))), taps);
        auto cls = model.classify(ctx, attn.a_d);

        stats.add(enc.layer_weights);
        stats.add(taps.self_weights);
        stats.add(taps.cross_weights);
        for (const auto& h : attn.head_weights) stats.add(h);
        stats.add(Tensor<double>({1, cls.probabilities.size()}, cls.probabilities.data()));

        if (single) {
            auto exact_one = [&](const Tensor<double>& w) {
                for (double v : w.data()) single_key_exact = single_key_exact && v == 1.0;
            };
            for (const auto* group : {&enc.layer_weights, &taps.self_weights, &taps.cross_weights})
                for (const auto& l : *group)
                    for (const auto& h : l) exact_one(h);
            for (const auto& h : attn.head_weights) exact_one(h);
        }
    }
    const bool ok = stats.worst <= 1e-9 && single_key_exact;
    return verdict(ok, "worst |row sum - 1| " + fmt(stats.worst) + " over " + std::to_string(stats.rows) +
                           " softmax rows in 1000 forwards; single-key weights " +
                           (single_key_exact ? "exactly 1.0" : "NOT exactly 1.0"));
}

// 3 -------------------------------------------------------------------------

Outcome projection_contract() {
    ParamStore<double> store;
    Rng rng(301);
    auto w = SensoryProjectionWeights::create(store, 128, 1024, rng);
    const bool shapes = store[w.w1].value.shape() == Shape{6, 128} && store[w.b1].value.shape() == Shape{128} &&
                        store[w.w2].value.shape() == Shape{128, 1024} && store[w.b2].value.shape() == Shape{1024};

    bool exact = true;
    for (int trial = 0; trial < 5; ++trial) {
        for (auto& v : store[w.b1].value.data()) v = trial == 0 ? 0.0 : uniform(rng, -1.0, 0.0);
        for (auto& v : store[w.b2].value.data()) v = uniform(rng, -1.0, 1.0);
        Tape<double> tape(false);
        auto out = project_sensory(store, w, tape.constant(Tensor<double>::matrix(3, kSensoryDims, 0.0)));
        exact = exact && out.shape() == Shape{3, 1024};
        for (std::size_t i = 0; i < 3; ++i)
            for (std::size_t j = 0; j < 1024; ++j) exact = exact && out.value()(i, j) == store[w.b2].value[j];
    }
    return verdict(shapes && exact, std::string("W1 ") + shape_string(store[w.w1].value.shape()) + ", W2 " +
                                        shape_string(store[w.w2].value.shape()) + "; zero input returns b2 " +
                                        (exact ? "exactly" : "NOT exactly"));
}

// 4 -------------------------------------------------------------------------

Outcome regression_oracle() {
    double worst = 0.0;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        Rng rng(400 + seed);
        const std::size_t d = 4 + seed;
        Lexicon lex;
        EmbeddingTable emb(d);
        oracle::Mat x, y;
        for (std::size_t i = 0; i < 20; ++i) {
            const std::string word = "w" + std::to_string(i);
            std::vector<float> e(d);
            for (auto& v : e) v = static_cast<float>(uniform(rng, -1.0, 1.0));
            SensoryVector s;
            for (auto& v : s.values) v = uniform(rng, 0.0, 5.0);
            emb.add(word, e);
            lex.insert(word, s);
            x.emplace_back(e.begin(), e.end());
            y.emplace_back(s.values.begin(), s.values.end());
        }
        for (double lambda : {0.0, 0.1, 1.0, 10.0}) {
            const auto model = fit_ridge(lex, emb, lambda);
            const auto ref = oracle::oracle_ridge(x, y, lambda);
            for (std::size_t k = 0; k < kSensoryDims; ++k) {
                const auto kk = static_cast<Eigen::Index>(k);
                worst = std::max(worst, std::abs(model.bias(kk) - ref.bias[k]));
                for (std::size_t j = 0; j < d; ++j)
                    worst = std::max(worst, std::abs(model.weights(static_cast<Eigen::Index>(j), kk) - ref.weights[j][k]));
            }
        }
    }

    Rng rng(410);
    const std::size_t d = 10;
    std::vector<std::array<double, kSensoryDims>> w(d);
    for (auto& row : w)
        for (auto& v : row) v = uniform(rng, -0.3, 0.3);
    Lexicon lex;
    EmbeddingTable emb(d);
    for (std::size_t i = 0; i < 500; ++i) {
        const std::string word = "lin" + std::to_string(i);
        std::vector<float> e(d);
        for (auto& v : e) v = static_cast<float>(uniform(rng, -1.0, 1.0));
        SensoryVector s;
        for (std::size_t k = 0; k < kSensoryDims; ++k) {
            double v = 2.5;
            for (std::size_t j = 0; j < d; ++j) v += static_cast<double>(e[j]) * w[j][k];
            s[k] = v;
        }
        emb.add(word, e);
        lex.insert(word, s);
    }
    const auto split = split_validation(lex, emb, 0.1, 411);
    const auto rmse = evaluate_rmse(fit_ridge(split.train, emb, 1e-8), split.validation, emb);

    return verdict(worst <= 1e-8 && rmse.total < 1e-3,
                   "max |coef - oracle| " + fmt(worst) + " on 20-word fixtures; exact-linear validation RMSE " +
                       fmt(rmse.total) + " (n=" + std::to_string(rmse.n_validation) + ")");
}

// 5 -------------------------------------------------------------------------

Outcome ablation_ordering() {
    ModelConfig cfg;
    cfg.d_model = 16;
    cfg.n_heads = 2;
    cfg.n_enc_layers = 1;
    cfg.n_dec_layers = 1;
    cfg.max_seq_len = 64;

    const auto t0 = std::chrono::steady_clock::now();
    std::size_t votes = 0;
    std::string detail;
    double min_sensory = 1.0;
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
        const auto data = make_synthetic(seed, 2000, 500, 4);
        const Vocabulary vocab = Vocabulary::build(data.train, cfg.max_seq_len);
        ModelConfig mc = cfg;
        mc.vocab_size = vocab.size();
        mc.n_classes = 4;
        double acc[3] = {};
        const AblationMode modes[3] = {AblationMode::sensory, AblationMode::none, AblationMode::random_sensory};
        for (int m = 0; m < 3; ++m) {
            TrainConfig tc;
            tc.epochs = 15;
            tc.batch_size = 16;
            tc.adam.learning_rate = 1e-3;
            tc.seed = seed;
            tc.mode = modes[m];
            const auto tr = encode_dataset<double>(data.train, vocab, data.lexicon, tc.mode, seed, DataStream::train,
                                                   mc.max_seq_len);
            const auto te = encode_dataset<double>(data.test, vocab, data.lexicon, tc.mode, seed, DataStream::eval,
                                                   mc.max_seq_len);
            auto result = train(mc, tc, tr, te);
            acc[m] = evaluate(result.model, te, tc.mode).accuracy;
        }
        const bool ok = acc[0] >= acc[1] + 0.05 && acc[1] >= acc[2];
        votes += ok;
        min_sensory = std::min(min_sensory, acc[0]);
        detail += "seed " + std::to_string(seed) + ": sensory " + fmt(acc[0]) + " none " + fmt(acc[1]) + " random " +
                  fmt(acc[2]) + (ok ? " ok; " : " violated; ");
    }
    const double elapsed = seconds_since(t0);
    return verdict(votes >= 2 && elapsed < 600.0, detail + std::to_string(votes) + "/3 seeds hold, " + fmt(elapsed) +
                                                      " s (sensory >= " + fmt(min_sensory) + " on every seed)");
}

// 6 -------------------------------------------------------------------------

Outcome coverage_monotonicity() {
    Lexicon fixture;
    fixture.insert("sweet", SensoryVector{{0, 4.5, 0, 0, 1, 0}});
    fixture.insert("loud", SensoryVector{{5, 0, 0, 0, 0, 1}});
    fixture.insert("soft", SensoryVector{{1, 0, 4, 0, 0, 2}});
    const auto fixed = coverage(fixture, {tokenize("sweet and loud"), tokenize("soft")});
    const bool fixture_ok = fixed.covered_tokens == 3 && fixed.total_tokens == 4 && fixed.coverage_pct == 75.0;

    // Random corpora against a base lexicon and its regression-augmented version.
    Rng rng(601);
    std::size_t violations = 0, trials = 0;
    for (std::size_t t = 0; t < 50; ++t) {
        const std::size_t vocab = 20 + uniform_index(rng, 60), d = 3;
        EmbeddingTable emb(d);
        Lexicon base;
        std::vector<std::string> words;
        for (std::size_t i = 0; i < vocab; ++i) {
            words.push_back("t" + std::to_string(i));
            if (uniform01(rng) < 0.8) {
                std::vector<float> e(d);
                for (auto& v : e) v = static_cast<float>(uniform(rng, -1.0, 1.0));
                emb.add(words.back(), e);
            }
            if (uniform01(rng) < 0.3) {
                SensoryVector s;
                for (auto& v : s.values) v = uniform(rng, 0.0, 5.0);
                base.insert(words.back(), s);
            }
        }
        bool overlap = false;
        for (const auto& e : base) overlap = overlap || emb.contains(e.word);
        if (!overlap) continue;
        const Lexicon augmented = augment_lexicon(base, emb, fit_ridge(base, emb, 1.0));
        std::vector<Document> corpus(1 + uniform_index(rng, 10));
        for (auto& doc : corpus)
            for (std::size_t k = uniform_index(rng, 30); k > 0; --k) doc.push_back(words[uniform_index(rng, vocab)]);
        for (bool types : {false, true}) {
            ++trials;
            violations += coverage(augmented, corpus, types).coverage_pct < coverage(base, corpus, types).coverage_pct;
        }
    }
    return verdict(fixture_ok && violations == 0 && trials > 0,
                   "fixture " + std::to_string(fixed.covered_tokens) + "/" + std::to_string(fixed.total_tokens) + " = " +
                       fmt(fixed.coverage_pct) + "%; augmented >= original in " +
                       std::to_string(trials - violations) + "/" + std::to_string(trials) + " random corpora");
}

// 7 -------------------------------------------------------------------------

int run_cli(const std::string& args) {
    const std::string cmd = std::string(SENSORYT5_CLI_PATH) + " " + args + " > /dev/null 2>&1";
    return std::system(cmd.c_str());
}

Outcome determinism() {
    const fs::path dir = fs::temp_directory_path() / "sensoryt5_acceptance_determinism";
    fs::remove_all(dir);
    fs::create_directories(dir);
    const std::string d = dir.string();
    std::string detail;
    bool ok = run_cli("synth-gen --seed 7 --classes 3 --n-train 200 --n-test 60 --out " + d + "/data") == 0;
    const std::string common = "train --seed 7 --train " + d + "/data/train.tsv --dev " + d + "/data/test.tsv" +
                               " --lexicon " + d + "/data/lexicon.tsv --mode random --epochs 2 --batch-size 8" +
                               " --lr 1e-3 --d-model 16 --heads 2 --layers 2";
    ok = ok && run_cli(common + " --out " + d + "/a.ckpt") == 0 && run_cli(common + " --out " + d + "/b.ckpt") == 0;
    if (ok) {
        const auto a = read_file(dir / "a.ckpt");
        const auto b = read_file(dir / "b.ckpt");
        ok = a == b && !a.empty();
        detail = "two train runs wrote " + std::to_string(a.size()) + " and " + std::to_string(b.size()) + " bytes, " +
                 (a == b ? "bitwise identical" : "DIFFERENT");
    } else {
        detail = "CLI run failed";
    }
    fs::remove_all(dir);
    return verdict(ok, detail);
}

// 8 -------------------------------------------------------------------------

Outcome real_data() {
    const char* norms_path = std::getenv("SENSORYT5_LANCASTER_NORMS");
    const char* glove_path = std::getenv("SENSORYT5_GLOVE");
    if (!norms_path || !glove_path) {
        return {Outcome::Status::skip,
                "set SENSORYT5_LANCASTER_NORMS (CSV) and SENSORYT5_GLOVE (GloVe 200d text) to run"};
    }
    auto norms_in = open_input(norms_path);
    const Lexicon base = parse_lexicon(norms_in, {','});
    auto glove_in = open_input(glove_path);
    const EmbeddingTable emb = load_embeddings(glove_in);

    const auto split = split_validation(base, emb, 0.1, 0);
    const auto rmse = evaluate_rmse(fit_ridge(split.train, emb, 1.0), split.validation, emb);
    Lexicon known;
    for (const auto& e : base)
        if (emb.contains(e.word)) known.insert(e.word, e.vector, e.source);
    const Lexicon augmented = augment_lexicon(base, emb, fit_ridge(known, emb, 1.0));

    constexpr double reference[kSensoryDims] = {0.803, 0.534, 0.698, 0.662, 0.501, 0.743};
    bool dims_ok = true;
    std::string dims;
    for (std::size_t k = 0; k < kSensoryDims; ++k) {
        dims_ok = dims_ok && std::abs(rmse.per_dimension[k] - reference[k]) <= 0.07;
        dims += std::string(kSensoryNames[k]) + " " + fmt(rmse.per_dimension[k]) + " ";
    }
    const bool total_ok = std::abs(rmse.total - 0.665) <= 0.05;
    const bool size_ok = augmented.size() == 407572;
    return verdict(size_ok && total_ok && dims_ok, "augmented size " + std::to_string(augmented.size()) +
                                                       " (expected 407572); total RMSE " + fmt(rmse.total) +
                                                       " (0.665 +/- 0.05); " + dims + "(each +/- 0.07)");
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
        {"1 gradient fidelity", gradient_fidelity},
        {"2 attention invariants", attention_invariants},
        {"3 projection contract", projection_contract},
        {"4 regression oracle", regression_oracle},
        {"5 ablation ordering", ablation_ordering},
        {"6 coverage monotonicity", coverage_monotonicity},
        {"7 determinism", determinism},
        {"8 real-data reproduction", real_data},
    };
    int failures = 0;
    for (const auto& [name, check] : criteria) {
        Outcome o;
        try {
            o = check();
        } catch (const std::exception& e) {
            o = {Outcome::Status::fail, std::string("exception: ") + e.what()};
        }
        const char* tag = o.status == Outcome::Status::pass ? "PASS" : o.status == Outcome::Status::skip ? "SKIP" : "FAIL";
        failures += o.status == Outcome::Status::fail;
        std::cout << tag << "  " << name << ": " << o.detail << std::endl;
    }
    return failures == 0 ? 0 : 1;
}
