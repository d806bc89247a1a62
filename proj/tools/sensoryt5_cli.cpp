#include <chrono>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "sensoryt5/sensoryt5.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace sensoryt5;

namespace {

// Options shared by every subcommand.
struct Common {
    std::uint64_t seed = 0;
    std::string config_path;
    std::string out;
};

void add_common(CLI::App* cmd, Common& c, bool out_required) {
    cmd->add_option("--seed", c.seed, "Run seed");
    cmd->add_option("--config", c.config_path, "JSON config file (flags override its values)")->check(CLI::ExistingFile);
    auto* out = cmd->add_option("--out", c.out, "Output path");
    if (out_required) out->required();
}

void announce(const std::string& command, const json& resolved, std::uint64_t seed) {
    std::cout << command << " config " << to_json_string(resolved) << "\n";
    std::cout << command << " seed " << seed << "\n";
}

char delimiter_char(const std::string& name) {
    if (name == "tab") return '\t';
    if (name == "comma") return ',';
    throw Error("unknown delimiter '" + name + "' (expected tab or comma)");
}

Lexicon load_lexicon_file(const std::string& path, char delim) {
    auto in = open_input(path);
    try {
        return parse_lexicon(in, {delim});
    } catch (const ParseError& e) {
        throw Error(path + ": " + e.what());
    }
}

Dataset load_dataset_file(const std::string& path, const std::vector<std::string>* labels = nullptr) {
    auto in = open_input(path);
    try {
        return load_dataset(in, labels);
    } catch (const ParseError& e) {
        throw Error(path + ": " + e.what());
    }
}

EmbeddingTable load_embeddings_file(const std::string& path) {
    auto in = open_input(path);
    try {
        return load_embeddings(in);
    } catch (const ParseError& e) {
        throw Error(path + ": " + e.what());
    }
}

// One document per line; a tab-separated label column is ignored.
std::vector<Document> load_corpus(const std::string& path) {
    auto in = open_input(path);
    std::vector<Document> docs;
    std::string line;
    while (std::getline(in, line)) {
        if (auto tab = line.find('\t'); tab != std::string::npos) line.resize(tab);
        if (detail::trim(line).empty()) continue;
        docs.push_back(tokenize(line));
    }
    return docs;
}

RunConfig load_run_config(const Common& c) {
    return c.config_path.empty() ? RunConfig{} : parse_run_config(read_file(c.config_path));
}

json rmse_json(const RmseReport& r, bool mean_total) {
    json per;
    for (std::size_t d = 0; d < kSensoryDims; ++d) per[std::string(kSensoryNames[d])] = r.per_dimension[d];
    return {{"per_dimension", per},
            {"total", mean_total ? r.mean_of_dimensions : r.total},
            {"n_validation", r.n_validation}};
}

json report_json(const EvalReport& r, const std::vector<std::string>& labels, bool weighted) {
    json per = json::array();
    for (std::size_t k = 0; k < r.per_class.size(); ++k) {
        const auto& m = r.per_class[k];
        per.push_back({{"label", labels[k]}, {"precision", m.precision}, {"recall", m.recall}, {"f1", m.f1},
                       {"support", m.support}});
    }
    json out{{"accuracy", r.accuracy}, {"macro_f1", r.macro_f1}, {"per_class", per}, {"confusion", r.confusion},
             {"f1", weighted ? r.weighted_f1 : r.macro_f1}, {"f1_average", weighted ? "weighted" : "macro"}};
    if (weighted) out["weighted_f1"] = r.weighted_f1;
    return out;
}

// ---------------------------------------------------------------------------

struct LexiconStatsArgs {
    Common common;
    std::string lexicon, corpus, augmented, delimiter = "tab";
    std::size_t bins = 10;
    bool types = false;
};

int cmd_lexicon_stats(const LexiconStatsArgs& a) {
    announce("lexicon-stats",
             {{"lexicon", a.lexicon}, {"bins", a.bins}, {"corpus", a.corpus}, {"augmented", a.augmented},
              {"types", a.types}, {"delimiter", a.delimiter}},
             a.common.seed);
    if (a.bins == 0) throw Error("--bins must be >= 1");
    const char delim = delimiter_char(a.delimiter);
    const Lexicon lex = load_lexicon_file(a.lexicon, delim);
    if (lex.duplicate_rows()) std::cerr << "warning: " << lex.duplicate_rows() << " duplicate rows skipped\n";

    json hist;
    for (std::size_t d = 0; d < kSensoryDims; ++d) {
        const auto h = histogram(lex, d, a.bins);
        hist[std::string(kSensoryNames[d])] = {{"bin_edges", h.bin_edges}, {"counts", h.counts}};
    }
    json out{{"entries", lex.size()},
             {"original", lex.count(EntrySource::original)},
             {"predicted", lex.count(EntrySource::predicted)},
             {"duplicate_rows", lex.duplicate_rows()},
             {"histograms", hist}};

    if (!a.corpus.empty()) {
        const auto docs = load_corpus(a.corpus);
        auto cov_json = [&](const Lexicon& l) {
            const auto r = coverage(l, docs, a.types);
            return json{{"covered", r.covered_tokens}, {"total", r.total_tokens}, {"coverage_pct", r.coverage_pct}};
        };
        json cov{{"unit", a.types ? "types" : "tokens"}, {"documents", docs.size()}, {"lexicon", cov_json(lex)}};
        if (!a.augmented.empty()) cov["augmented"] = cov_json(load_lexicon_file(a.augmented, delim));
        out["coverage"] = cov;
        std::cout << "coverage " << to_json_string(cov) << "\n";
    }
    std::cout << "entries " << lex.size() << "\n";
    write_file_atomic(a.common.out, to_json_string(out) + "\n");
    return 0;
}

struct AugmentArgs {
    Common common;
    std::string lexicon, embeddings, report, delimiter = "tab";
    double lambda = 1.0;
    double val_fraction = 0.1;
    bool mean_rmse = false;
};

int cmd_augment(const AugmentArgs& a) {
    announce("augment",
             {{"lexicon", a.lexicon}, {"embeddings", a.embeddings}, {"lambda", a.lambda},
              {"val_fraction", a.val_fraction}, {"mean_rmse", a.mean_rmse}, {"delimiter", a.delimiter}},
             a.common.seed);
    if (!(a.lambda >= 0.0)) throw Error("--lambda must be >= 0");
    const char delim = delimiter_char(a.delimiter);
    const Lexicon base = load_lexicon_file(a.lexicon, delim);
    const EmbeddingTable emb = load_embeddings_file(a.embeddings);

    std::size_t overlap = 0;
    for (const auto& e : base) overlap += emb.contains(e.word);
    if (overlap == 0) throw Error("lexicon and embeddings share no words");

    const auto split = split_validation(base, emb, a.val_fraction, a.common.seed);
    const auto model = fit_ridge(split.train, emb, a.lambda);
    const auto rmse = evaluate_rmse(model, split.validation, emb);
    // Refit on every overlapping word before predicting OOV entries.
    Lexicon all_known;
    for (const auto& e : base)
        if (emb.contains(e.word)) all_known.insert(e.word, e.vector, e.source);
    const auto full = fit_ridge(all_known, emb, a.lambda);
    const Lexicon out = augment_lexicon(base, emb, full);

    std::ostringstream text;
    write_lexicon(text, out, {delim});
    const json rj = rmse_json(rmse, a.mean_rmse);
    if (!a.report.empty()) write_file_atomic(a.report, to_json_string(rj) + "\n");
    write_file_atomic(a.common.out, text.str());
    std::cout << "rmse " << to_json_string(rj) << "\n";
    std::cout << "entries " << out.size() << " (original " << out.count(EntrySource::original) << ", predicted "
              << out.count(EntrySource::predicted) << ")\n";
    return 0;
}

struct ModelFlags {
    std::size_t epochs = 0, batch_size = 0, d_model = 0, n_heads = 0, layers = 0;
    double lr = 0.0;
    std::string mode;
    bool decoder_len1 = false, max_pool = false;
};

void add_model_flags(CLI::App* cmd, ModelFlags& f) {
    cmd->add_option("--mode", f.mode, "Ablation mode")->check(CLI::IsMember({"sensory", "random", "none"}));
    cmd->add_option("--epochs", f.epochs, "Training epochs");
    cmd->add_option("--batch-size", f.batch_size, "Mini-batch size");
    cmd->add_option("--lr", f.lr, "Adam learning rate");
    cmd->add_option("--d-model", f.d_model, "Model width");
    cmd->add_option("--heads", f.n_heads, "Attention heads");
    cmd->add_option("--layers", f.layers, "Encoder and decoder layers (each)");
    cmd->add_flag("--decoder-len1", f.decoder_len1, "Feed the decoder a single position");
    cmd->add_flag("--max-pool", f.max_pool, "Max-pool the adapter output instead of mean-pooling");
}

void apply_model_flags(const CLI::App* cmd, const ModelFlags& f, RunConfig& rc) {
    if (cmd->count("--mode")) rc.train.mode = parse_mode(f.mode);
    if (cmd->count("--epochs")) rc.train.epochs = f.epochs;
    if (cmd->count("--batch-size")) rc.train.batch_size = f.batch_size;
    if (cmd->count("--lr")) rc.train.adam.learning_rate = f.lr;
    if (cmd->count("--d-model")) rc.model.d_model = f.d_model;
    if (cmd->count("--heads")) rc.model.n_heads = f.n_heads;
    if (cmd->count("--layers")) rc.model.n_enc_layers = rc.model.n_dec_layers = f.layers;
    if (f.decoder_len1) rc.model.decoder_len1 = true;
    if (f.max_pool) rc.model.max_pool = true;
}

struct TrainArgs {
    Common common;
    ModelFlags flags;
    std::string train, dev, lexicon, history, delimiter = "tab";
};

int cmd_train(const CLI::App* cmd, const TrainArgs& a) {
    RunConfig rc = load_run_config(a.common);
    if (cmd->count("--seed")) rc.train.seed = a.common.seed;
    apply_model_flags(cmd, a.flags, rc);
    announce("train", to_json(rc), rc.train.seed);

    const bool needs_lexicon = rc.train.mode == AblationMode::sensory;
    if (needs_lexicon && a.lexicon.empty()) throw Error("--lexicon is required in sensory mode");
    const Lexicon lex = a.lexicon.empty() ? Lexicon{} : load_lexicon_file(a.lexicon, delimiter_char(a.delimiter));
    const Dataset train_ds = load_dataset_file(a.train);
    if (train_ds.empty()) throw Error(a.train + ": no training examples");
    Dataset dev_ds;
    if (!a.dev.empty()) dev_ds = load_dataset_file(a.dev, &train_ds.label_names);

    const std::size_t max_len = rc.model.max_seq_len;
    const Vocabulary vocab = Vocabulary::build(train_ds, max_len);
    rc.model.vocab_size = vocab.size();
    rc.model.n_classes = train_ds.n_classes();
    rc.model.validate();
    std::cout << "train data " << train_ds.size() << " examples, " << train_ds.n_classes() << " classes, vocabulary "
              << vocab.size() << "\n";

    const auto train_set =
        encode_dataset<double>(train_ds, vocab, lex, rc.train.mode, rc.train.seed, DataStream::train, max_len);
    const auto dev_set =
        encode_dataset<double>(dev_ds, vocab, lex, rc.train.mode, rc.train.seed, DataStream::eval, max_len);

    std::string history;
    auto result = train(rc.model, rc.train, train_set, dev_set, [&](const EpochRecord& r) {
        const json line{{"epoch", r.epoch}, {"train_loss", r.train_loss}, {"dev_acc", r.dev_acc},
                        {"dev_macro_f1", r.dev_macro_f1}};
        history += to_json_string(line) + "\n";
        std::cout << to_json_string(line) << std::endl;
    });

    Checkpoint<double> ck{std::move(result.model), rc.train.mode, rc.train.seed, train_ds.label_names, vocab};
    if (!a.history.empty()) write_file_atomic(a.history, history);
    save_checkpoint(a.common.out, ck);
    std::cout << "best epoch " << result.best_epoch << "\n";
    return 0;
}

struct EvalArgs {
    Common common;
    std::string checkpoint, data, lexicon, delimiter = "tab";
    bool weighted = false;
};

int cmd_eval(const EvalArgs& a) {
    auto ck = load_checkpoint<double>(a.checkpoint);
    json resolved = to_json(RunConfig{ck.model.config(), {}});
    resolved["mode"] = std::string(mode_name(ck.mode));
    resolved["seed"] = ck.seed;
    resolved["checkpoint"] = a.checkpoint;
    resolved["data"] = a.data;
    resolved["weighted_f1"] = a.weighted;
    for (const char* k : {"epochs", "batch_size", "learning_rate", "beta1", "beta2", "adam_eps"}) resolved.erase(k);
    announce("eval", resolved, ck.seed);

    if (ck.mode == AblationMode::sensory && a.lexicon.empty()) throw Error("--lexicon is required for a sensory-mode checkpoint");
    const Lexicon lex = a.lexicon.empty() ? Lexicon{} : load_lexicon_file(a.lexicon, delimiter_char(a.delimiter));
    const Dataset ds = load_dataset_file(a.data, &ck.labels);
    const auto data = encode_dataset<double>(ds, ck.vocab, lex, ck.mode, ck.seed, DataStream::eval,
                                             ck.model.config().max_seq_len);
    const auto report = evaluate(ck.model, data, ck.mode);
    const json out = report_json(report, ck.labels, a.weighted);
    std::cout << "accuracy " << to_json_string(report.accuracy) << " f1 " << to_json_string(out["f1"]) << "\n";
    if (!a.common.out.empty()) write_file_atomic(a.common.out, to_json_string(out) + "\n");
    return 0;
}

struct GradCheckArgs {
    Common common;
    std::string mode = "sensory";
    std::size_t samples = 4, tokens = 6, classes = 3;
    double eps = 1e-5, tolerance = 1e-4;
};

int cmd_gradcheck(const CLI::App* cmd, const GradCheckArgs& a) {
    RunConfig rc = load_run_config(a.common);
    if (!cmd->count("--config")) {
        rc.model.d_model = 8;
        rc.model.n_heads = 2;
        rc.model.d_ff = 16;
        rc.model.n_enc_layers = 2;
        rc.model.n_dec_layers = 2;
        rc.model.d_sensory_hidden = 8;
    }
    rc.model.dropout_keep = 1.0;
    rc.model.vocab_size = 10;
    rc.model.n_classes = a.classes;
    rc.model.max_seq_len = std::max(rc.model.max_seq_len, a.tokens);
    rc.train.mode = parse_mode(a.mode);
    rc.train.seed = a.common.seed;
    json resolved = to_json(rc);
    resolved["samples_per_param"] = a.samples;
    resolved["eps"] = a.eps;
    resolved["tolerance"] = a.tolerance;
    resolved["tokens"] = a.tokens;
    resolved["classes"] = a.classes;
    announce("gradcheck", resolved, a.common.seed);
    if (a.tokens == 0) throw Error("--tokens must be >= 1");

    SensoryT5<double> model(rc.model, mix_seed(a.common.seed, 1));
    Rng rng(mix_seed(a.common.seed, 5));
    std::vector<std::size_t> ids(a.tokens);
    for (auto& id : ids) id = uniform_index(rng, rc.model.vocab_size);
    Tensor<double> sensory = Tensor<double>::matrix(a.tokens, kSensoryDims);
    for (auto& v : sensory.data()) v = uniform(rng, kSensoryMin, kSensoryMax);
    const std::size_t label = uniform_index(rng, rc.model.n_classes);
    const bool use_adapter = rc.train.mode != AblationMode::none;

    std::vector<Parameter<double>*> params = model.params().all();
    if (!use_adapter) {
        std::erase_if(params, [](const Parameter<double>* p) {
            return p->name.starts_with("sensory.") || p->name.starts_with("adapter.");
        });
    }
    const auto start = std::chrono::steady_clock::now();
    auto r = grad_check<double>(
        [&](Tape<double>& t) {
            ForwardContext<double> ctx{t};
            return cross_entropy(model.forward(ctx, ids, sensory, use_adapter).logits, label);
        },
        params, {a.eps, a.samples, mix_seed(a.common.seed, 6)});
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    json groups;
    for (const auto& e : r.entries) {
        const std::string g = e.param.substr(0, e.param.find('.'));
        if (!groups.contains(g)) groups[g] = {{"coordinates", 0}, {"max_rel_error", 0.0}};
        auto& slot = groups[g];
        slot["coordinates"] = slot["coordinates"].get<std::size_t>() + 1;
        slot["max_rel_error"] = std::max(slot["max_rel_error"].get<double>(), e.rel_error);
    }
    const bool passed = r.max_rel_error < a.tolerance;
    const json out{{"max_rel_error", r.max_rel_error}, {"coordinates", r.entries.size()}, {"groups", groups},
                   {"tolerance", a.tolerance}, {"passed", passed}};
    std::cout << "max rel error " << to_json_string(r.max_rel_error) << " over " << r.entries.size()
              << " coordinates (" << seconds << " s)\n";
    if (!a.common.out.empty()) write_file_atomic(a.common.out, to_json_string(out) + "\n");
    if (!passed) {
        std::cerr << "error: max relative error " << r.max_rel_error << " exceeds tolerance " << a.tolerance << "\n";
        return 1;
    }
    return 0;
}

struct HeatmapArgs {
    Common common;
    std::string checkpoint, lexicon, text, delimiter = "tab";
};

int cmd_heatmap(const HeatmapArgs& a) {
    auto ck = load_checkpoint<double>(a.checkpoint);
    announce("heatmap",
             {{"checkpoint", a.checkpoint}, {"lexicon", a.lexicon}, {"text", a.text},
              {"mode", std::string(mode_name(ck.mode))}},
             ck.seed);
    if (ck.mode == AblationMode::sensory && a.lexicon.empty()) throw Error("--lexicon is required for a sensory-mode checkpoint");
    const Lexicon lex = a.lexicon.empty() ? Lexicon{} : load_lexicon_file(a.lexicon, delimiter_char(a.delimiter));
    const auto p = predict_text(ck, lex, a.text);
    const json out{{"tokens", p.tokens}, {"sensory_trace", p.trace.sensory}, {"encoder_trace", p.trace.encoder}};
    write_file_atomic(a.common.out, to_json_string(out) + "\n");
    std::cout << "predicted " << ck.labels[p.label] << " " << to_json_string(p.probabilities.data()) << "\n";
    return 0;
}

struct SynthArgs {
    Common common;
    std::size_t n_train = 2000, n_test = 500, classes = 4;
    SyntheticSpec spec;
};

int cmd_synth(const SynthArgs& a) {
    announce("synth-gen",
             {{"n_train", a.n_train}, {"n_test", a.n_test}, {"classes", a.classes},
              {"indicative_per_class", a.spec.indicative_per_class}, {"distractors", a.spec.distractors},
              {"sentence_length", a.spec.sentence_length}, {"indicative_per_sentence", a.spec.indicative_per_sentence},
              {"confounders_per_sentence", a.spec.confounders_per_sentence}, {"out", a.common.out}},
             a.common.seed);
    const auto data = make_synthetic(a.common.seed, a.n_train, a.n_test, a.classes, a.spec);
    const fs::path dir(a.common.out);
    fs::create_directories(dir);
    std::ostringstream train, test, lex;
    write_dataset(train, data.train);
    write_dataset(test, data.test);
    write_lexicon(lex, data.lexicon);
    write_file_atomic(dir / "train.tsv", train.str());
    write_file_atomic(dir / "test.tsv", test.str());
    write_file_atomic(dir / "lexicon.tsv", lex.str());
    std::cout << "wrote " << data.train.size() << " train, " << data.test.size() << " test, " << data.lexicon.size()
              << " lexicon entries to " << dir.string() << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Sensory-augmented T5-style classifier toolkit"};
    app.require_subcommand(1);

    LexiconStatsArgs stats;
    auto* c_stats = app.add_subcommand("lexicon-stats", "Histograms and coverage of a sensory lexicon");
    add_common(c_stats, stats.common, true);
    c_stats->add_option("--lexicon", stats.lexicon, "Lexicon file")->required();
    c_stats->add_option("--bins", stats.bins, "Histogram bins over [0, 5]");
    c_stats->add_option("--corpus", stats.corpus, "Corpus (one document per line) for coverage");
    c_stats->add_option("--augmented", stats.augmented, "Second lexicon to compare coverage against");
    c_stats->add_flag("--types", stats.types, "Count coverage over unique types instead of tokens");
    c_stats->add_option("--delimiter", stats.delimiter, "tab or comma");

    AugmentArgs aug;
    auto* c_aug = app.add_subcommand("augment", "Predict sensory values for out-of-lexicon embedding words");
    add_common(c_aug, aug.common, true);
    c_aug->add_option("--lexicon", aug.lexicon, "Lexicon file")->required();
    c_aug->add_option("--embeddings", aug.embeddings, "GloVe-format embedding file")->required();
    c_aug->add_option("--lambda", aug.lambda, "Ridge penalty");
    c_aug->add_option("--val-fraction", aug.val_fraction, "Held-out fraction for RMSE");
    c_aug->add_option("--report", aug.report, "RMSE JSON output path");
    c_aug->add_flag("--mean-rmse", aug.mean_rmse, "Report total RMSE as the mean of the six dimensions");
    c_aug->add_option("--delimiter", aug.delimiter, "tab or comma");

    TrainArgs tr;
    auto* c_train = app.add_subcommand("train", "Train a classifier and write a checkpoint");
    add_common(c_train, tr.common, true);
    add_model_flags(c_train, tr.flags);
    c_train->add_option("--train", tr.train, "Training set (text<TAB>label)")->required();
    c_train->add_option("--dev", tr.dev, "Dev set for model selection");
    c_train->add_option("--lexicon", tr.lexicon, "Sensory lexicon");
    c_train->add_option("--history", tr.history, "Per-epoch JSON lines output");
    c_train->add_option("--delimiter", tr.delimiter, "Lexicon delimiter: tab or comma");

    EvalArgs ev;
    auto* c_eval = app.add_subcommand("eval", "Evaluate a checkpoint on a labelled set");
    add_common(c_eval, ev.common, false);
    c_eval->add_option("--checkpoint", ev.checkpoint, "Checkpoint file")->required();
    c_eval->add_option("--data", ev.data, "Dataset (text<TAB>label)")->required();
    c_eval->add_option("--lexicon", ev.lexicon, "Sensory lexicon");
    c_eval->add_flag("--weighted-f1", ev.weighted, "Report support-weighted F1");
    c_eval->add_option("--delimiter", ev.delimiter, "Lexicon delimiter: tab or comma");

    GradCheckArgs gc;
    auto* c_gc = app.add_subcommand("gradcheck", "Finite-difference check of the full model gradient");
    add_common(c_gc, gc.common, false);
    c_gc->add_option("--mode", gc.mode, "Ablation mode")->check(CLI::IsMember({"sensory", "random", "none"}));
    c_gc->add_option("--samples", gc.samples, "Sampled coordinates per parameter tensor");
    c_gc->add_option("--eps", gc.eps, "Central-difference step");
    c_gc->add_option("--tolerance", gc.tolerance, "Maximum accepted relative error");
    c_gc->add_option("--tokens", gc.tokens, "Sequence length");
    c_gc->add_option("--classes", gc.classes, "Number of classes");

    HeatmapArgs hm;
    auto* c_hm = app.add_subcommand("heatmap", "Export per-token attention traces for one text");
    add_common(c_hm, hm.common, true);
    c_hm->add_option("--checkpoint", hm.checkpoint, "Checkpoint file")->required();
    c_hm->add_option("--lexicon", hm.lexicon, "Sensory lexicon");
    c_hm->add_option("--text", hm.text, "Input text")->required();
    c_hm->add_option("--delimiter", hm.delimiter, "Lexicon delimiter: tab or comma");

    SynthArgs sy;
    auto* c_sy = app.add_subcommand("synth-gen", "Generate a sensory-separable synthetic dataset");
    add_common(c_sy, sy.common, true);
    c_sy->add_option("--n-train", sy.n_train, "Training examples");
    c_sy->add_option("--n-test", sy.n_test, "Test examples");
    c_sy->add_option("--classes", sy.classes, "Classes (1..6)");
    c_sy->add_option("--indicative-per-class", sy.spec.indicative_per_class, "Indicative words per class");
    c_sy->add_option("--distractors", sy.spec.distractors, "Distractor words");
    c_sy->add_option("--sentence-length", sy.spec.sentence_length, "Words per sentence");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (c_stats->parsed()) return cmd_lexicon_stats(stats);
        if (c_aug->parsed()) return cmd_augment(aug);
        if (c_train->parsed()) return cmd_train(c_train, tr);
        if (c_eval->parsed()) return cmd_eval(ev);
        if (c_gc->parsed()) return cmd_gradcheck(c_gc, gc);
        if (c_hm->parsed()) return cmd_heatmap(hm);
        if (c_sy->parsed()) return cmd_synth(sy);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
