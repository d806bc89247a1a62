#pragma once

#include <cctype>
#include <istream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "sensoryt5/lexicon.hpp"
#include "sensoryt5/random.hpp"

namespace sensoryt5 {

struct Example {
    std::string text;
    std::size_t label = 0;
};

struct Dataset {
    std::vector<Example> examples;
    std::vector<std::string> label_names;

    std::size_t n_classes() const noexcept { return label_names.size(); }
    std::size_t size() const noexcept { return examples.size(); }
    bool empty() const noexcept { return examples.empty(); }
};

/// Reads `text<TAB>label` rows. Labels are numbered by first appearance unless
/// `labels` fixes the inventory, in which case unseen labels are an error.
inline Dataset load_dataset(std::istream& in, const std::vector<std::string>* labels = nullptr) {
    Dataset ds;
    std::unordered_map<std::string, std::size_t> ids;
    if (labels) {
        ds.label_names = *labels;
        for (std::size_t i = 0; i < labels->size(); ++i) ids.emplace((*labels)[i], i);
    }
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        detail::strip_cr(line);
        if (detail::trim(line).empty()) continue;
        const auto fields = detail::split_fields(line, '\t');
        if (fields.size() != 2) {
            throw ParseError("expected 2 tab-separated columns, found " + std::to_string(fields.size()), line_no);
        }
        const std::string text(detail::trim(fields[0]));
        const std::string label(detail::trim(fields[1]));
        if (text.empty()) throw ParseError("empty text", line_no);
        if (label.empty()) throw ParseError("empty label", line_no);
        auto it = ids.find(label);
        if (it == ids.end()) {
            if (labels) throw ParseError("label '" + label + "' is not in the model's label set", line_no);
            it = ids.emplace(label, ds.label_names.size()).first;
            ds.label_names.push_back(label);
        }
        ds.examples.push_back({text, it->second});
    }
    return ds;
}

inline void write_dataset(std::ostream& out, const Dataset& ds) {
    for (const auto& ex : ds.examples) out << ex.text << '\t' << ds.label_names.at(ex.label) << '\n';
}

/// Lowercase, split on whitespace, strip edge punctuation, drop empties,
/// truncate to max_len tokens.
inline std::vector<std::string> tokenize(std::string_view text, std::size_t max_len = SIZE_MAX) {
    std::vector<std::string> out;
    std::size_t i = 0;
    while (i < text.size() && out.size() < max_len) {
        while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
        std::size_t j = i;
        while (j < text.size() && !std::isspace(static_cast<unsigned char>(text[j]))) ++j;
        if (j > i) {
            std::string tok = normalize_word(text.substr(i, j - i));
            if (!tok.empty()) out.push_back(std::move(tok));
        }
        i = j;
    }
    return out;
}

/// Token -> id map for the toy encoder. Id 0 is reserved for unknown tokens.
class Vocabulary {
public:
    static constexpr std::size_t kUnknown = 0;

    Vocabulary() : tokens_{"<unk>"} { ids_.emplace("<unk>", 0); }

    static Vocabulary build(const Dataset& ds, std::size_t max_len) {
        Vocabulary v;
        for (const auto& ex : ds.examples)
            for (auto& t : tokenize(ex.text, max_len)) v.add(t);
        return v;
    }

    std::size_t add(const std::string& token) {
        auto [it, inserted] = ids_.emplace(token, tokens_.size());
        if (inserted) tokens_.push_back(token);
        return it->second;
    }

    std::size_t id(const std::string& token) const {
        auto it = ids_.find(token);
        return it == ids_.end() ? kUnknown : it->second;
    }

    std::vector<std::size_t> ids(const std::vector<std::string>& tokens) const {
        std::vector<std::size_t> out;
        out.reserve(tokens.size());
        for (const auto& t : tokens) out.push_back(id(t));
        return out;
    }

    std::size_t size() const noexcept { return tokens_.size(); }
    const std::vector<std::string>& tokens() const noexcept { return tokens_; }

private:
    std::vector<std::string> tokens_;
    std::unordered_map<std::string, std::size_t> ids_;
};

enum class AblationMode { sensory, random_sensory, none };

inline std::string_view mode_name(AblationMode m) {
    switch (m) {
        case AblationMode::sensory: return "sensory";
        case AblationMode::random_sensory: return "random";
        case AblationMode::none: return "none";
    }
    return "?";
}

inline AblationMode parse_mode(std::string_view s) {
    if (s == "sensory") return AblationMode::sensory;
    if (s == "random" || s == "random_sensory") return AblationMode::random_sensory;
    if (s == "none") return AblationMode::none;
    throw Error("unknown mode '" + std::string(s) + "' (expected sensory, random or none)");
}

/// One sensory vector per token.
///   sensory: lexicon lookup, zero vector for out-of-lexicon tokens
///   random_sensory: i.i.d. uniform [0, 5] draws from `seed`
///   none: zero vectors (the adapter is bypassed downstream)
inline std::vector<SensoryVector> sensory_sequence(const Lexicon& lex, const std::vector<std::string>& tokens,
                                                   AblationMode mode, std::uint64_t seed) {
    std::vector<SensoryVector> out(tokens.size());
    switch (mode) {
        case AblationMode::sensory:
            for (std::size_t i = 0; i < tokens.size(); ++i)
                if (auto v = lex.lookup(tokens[i])) out[i] = *v;
            break;
        case AblationMode::random_sensory: {
            Rng rng(seed);
            for (auto& v : out)
                for (auto& x : v.values) x = uniform(rng, kSensoryMin, kSensoryMax);
            break;
        }
        case AblationMode::none:
            break;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Synthetic sensory-separable data

struct SyntheticSpec {
    std::size_t indicative_per_class = 300;
    std::size_t distractors = 60;
    std::size_t sentence_length = 6;
    std::size_t indicative_per_sentence = 2;
    std::size_t confounders_per_sentence = 1;
};

struct SyntheticData {
    Dataset train;
    Dataset test;
    Lexicon lexicon;
};

namespace detail {

inline std::string pseudo_word(Rng& rng) {
    static constexpr std::string_view consonants = "bcdfghjklmnprstvz";
    static constexpr std::string_view vowels = "aeiou";
    std::string w;
    const std::size_t syllables = 2 + uniform_index(rng, 2);
    for (std::size_t s = 0; s < syllables; ++s) {
        w += consonants[uniform_index(rng, consonants.size())];
        w += vowels[uniform_index(rng, vowels.size())];
    }
    w += consonants[uniform_index(rng, consonants.size())];
    return w;
}

}  // namespace detail

/// Index of the largest mean value across the six dimensions (lowest index on ties).
inline std::size_t dominant_dimension(const std::vector<SensoryVector>& seq) {
    std::array<double, kSensoryDims> mean{};
    for (const auto& v : seq)
        for (std::size_t d = 0; d < kSensoryDims; ++d) mean[d] += v[d];
    std::size_t best = 0;
    for (std::size_t d = 1; d < kSensoryDims; ++d)
        if (mean[d] > mean[best]) best = d;
    return best;
}

/// Builds a vocabulary where each class c < n_classes owns indicative words
/// rated >= 4 on dimension c and <= 1 elsewhere, plus shared distractors rated
/// <= 1 everywhere. Each sentence mixes indicative words of its target class,
/// confounders from another class, and distractors; targets rotate round-robin
/// and a sentence is redrawn until its dominant mean dimension is the target,
/// which is then its label. With many indicative words per class each word is
/// rare, so token identity alone is a weaker cue than the sensory ratings.
inline SyntheticData make_synthetic(std::uint64_t seed, std::size_t n_train, std::size_t n_test,
                                    std::size_t n_classes, const SyntheticSpec& spec = {}) {
    if (n_classes < 1 || n_classes > kSensoryDims) throw Error("synthetic data needs 1..6 classes");
    if (spec.indicative_per_class == 0 || spec.sentence_length == 0 ||
        spec.indicative_per_sentence + spec.confounders_per_sentence > spec.sentence_length) {
        throw Error("synthetic data: sentence too short for its indicative/confounder words");
    }
    if (spec.distractors == 0 &&
        spec.indicative_per_sentence + spec.confounders_per_sentence < spec.sentence_length) {
        throw Error("synthetic data: distractor words are needed to fill sentences");
    }
    Rng rng(seed);
    SyntheticData out;

    std::unordered_map<std::string, bool> used;
    auto fresh_word = [&] {
        for (;;) {
            std::string w = detail::pseudo_word(rng);
            if (used.emplace(w, true).second) return w;
        }
    };

    std::vector<std::vector<std::string>> indicative(n_classes);
    for (std::size_t c = 0; c < n_classes; ++c) {
        for (std::size_t i = 0; i < spec.indicative_per_class; ++i) {
            SensoryVector v;
            for (std::size_t d = 0; d < kSensoryDims; ++d) v[d] = d == c ? uniform(rng, 4.0, 5.0) : uniform(rng, 0.0, 1.0);
            indicative[c].push_back(fresh_word());
            out.lexicon.insert(indicative[c].back(), v);
        }
    }
    std::vector<std::string> distractors;
    for (std::size_t i = 0; i < spec.distractors; ++i) {
        SensoryVector v;
        for (auto& x : v.values) x = uniform(rng, 0.0, 1.0);
        distractors.push_back(fresh_word());
        out.lexicon.insert(distractors.back(), v);
    }

    std::vector<std::string> names;
    for (std::size_t c = 0; c < n_classes; ++c) names.emplace_back(kSensoryNames[c]);
    out.train.label_names = names;
    out.test.label_names = names;

    auto sentence = [&](std::size_t target) {
        for (;;) {
            std::vector<std::string> words;
            for (std::size_t i = 0; i < spec.indicative_per_sentence; ++i)
                words.push_back(indicative[target][uniform_index(rng, spec.indicative_per_class)]);
            if (n_classes > 1) {
                for (std::size_t i = 0; i < spec.confounders_per_sentence; ++i) {
                    std::size_t other = uniform_index(rng, n_classes - 1);
                    if (other >= target) ++other;
                    words.push_back(indicative[other][uniform_index(rng, spec.indicative_per_class)]);
                }
            }
            while (words.size() < spec.sentence_length) words.push_back(distractors[uniform_index(rng, distractors.size())]);
            shuffle(words, rng);
            std::vector<SensoryVector> seq;
            for (const auto& w : words) seq.push_back(*out.lexicon.lookup(w));
            if (dominant_dimension(seq) != target) continue;
            std::string text;
            for (const auto& w : words) text += (text.empty() ? "" : " ") + w;
            return Example{text, target};
        }
    };

    for (std::size_t i = 0; i < n_train; ++i) out.train.examples.push_back(sentence(i % n_classes));
    for (std::size_t i = 0; i < n_test; ++i) out.test.examples.push_back(sentence(i % n_classes));
    return out;
}

}  // namespace sensoryt5
