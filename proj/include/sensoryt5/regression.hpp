#pragma once

// Out-of-vocabulary sensory prediction: closed-form multi-output ridge
// regression from static word embeddings onto the six sensory dimensions.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <istream>
#include <span>
#include <sstream>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "sensoryt5/error.hpp"
#include "sensoryt5/lexicon.hpp"
#include "sensoryt5/random.hpp"

namespace sensoryt5 {

/// Static word vectors in GloVe text format. Stored as float; a 400k x 200
/// table is ~320 MB this way. Rows keep file order.
class EmbeddingTable {
public:
    EmbeddingTable() = default;
    explicit EmbeddingTable(std::size_t dim) : dim_(dim) {}

    std::size_t dim() const noexcept { return dim_; }
    std::size_t size() const noexcept { return words_.size(); }
    const std::vector<std::string>& words() const noexcept { return words_; }

    /// Returns false if the normalized word was already present (first row wins).
    bool add(std::string_view word, std::span<const float> vec) {
        if (vec.size() != dim_) {
            throw ShapeError("embedding for '" + std::string(word) + "' has dimension " +
                             std::to_string(vec.size()) + ", expected " + std::to_string(dim_));
        }
        std::string key = normalize_word(word);
        if (key.empty() || index_.contains(key)) return false;
        index_.emplace(key, words_.size());
        words_.push_back(std::move(key));
        data_.insert(data_.end(), vec.begin(), vec.end());
        return true;
    }

    std::span<const float> row(std::size_t i) const { return {data_.data() + i * dim_, dim_}; }

    std::optional<std::span<const float>> find(std::string_view word) const {
        auto it = index_.find(normalize_word(word));
        if (it == index_.end()) return std::nullopt;
        return row(it->second);
    }

    bool contains(std::string_view word) const { return index_.contains(normalize_word(word)); }

private:
    std::size_t dim_ = 0;
    std::vector<std::string> words_;
    std::vector<float> data_;
    std::unordered_map<std::string, std::size_t> index_;
};

/// Reads `word v1 ... vd` rows (space separated, no header). The dimension is
/// fixed by the first row.
inline EmbeddingTable load_embeddings(std::istream& in) {
    EmbeddingTable table;
    std::string line;
    std::size_t line_no = 0;
    std::vector<float> vec;
    bool first = true;
    while (std::getline(in, line)) {
        ++line_no;
        detail::strip_cr(line);
        std::istringstream ls(line);
        std::string word;
        if (!(ls >> word)) continue;
        vec.clear();
        std::string tok;
        while (ls >> tok) {
            auto v = detail::parse_double(tok);
            if (!v) throw ParseError("non-numeric embedding value '" + tok + "'", line_no);
            if (!std::isfinite(*v)) throw ParseError("non-finite embedding value", line_no);
            vec.push_back(static_cast<float>(*v));
        }
        if (first) {
            if (vec.empty()) throw ParseError("embedding row has no values", line_no);
            table = EmbeddingTable(vec.size());
            first = false;
        } else if (vec.size() != table.dim()) {
            throw ParseError("dimension mismatch: " + std::to_string(vec.size()) + " values, expected " +
                                 std::to_string(table.dim()),
                             line_no);
        }
        table.add(word, vec);
    }
    if (first) throw ParseError("embedding stream is empty");
    return table;
}

struct LexiconSplit {
    Lexicon train;
    Lexicon validation;
};

/// Seeded random hold-out over the lexicon entries that have an embedding.
/// The validation size is round(fraction * n), kept within [1, n - 1] when n >= 2.
inline LexiconSplit split_validation(const Lexicon& lex, const EmbeddingTable& emb, double fraction,
                                     std::uint64_t seed) {
    if (!(fraction > 0.0 && fraction < 1.0)) {
        throw Error("validation fraction must lie in (0, 1), got " + std::to_string(fraction));
    }
    std::vector<std::size_t> usable;
    for (std::size_t i = 0; i < lex.size(); ++i)
        if (emb.contains(lex.entries()[i].word)) usable.push_back(i);
    const std::size_t n = usable.size();
    auto n_val = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(n)));
    if (n >= 2) n_val = std::clamp<std::size_t>(n_val, 1, n - 1);
    Rng rng(seed);
    shuffle(usable, rng);
    std::vector<bool> is_val(lex.size(), false);
    for (std::size_t i = 0; i < n_val; ++i) is_val[usable[i]] = true;
    std::vector<bool> is_usable(lex.size(), false);
    for (auto i : usable) is_usable[i] = true;

    LexiconSplit split;
    for (std::size_t i = 0; i < lex.size(); ++i) {
        if (!is_usable[i]) continue;
        const auto& e = lex.entries()[i];
        (is_val[i] ? split.validation : split.train).insert(e.word, e.vector, e.source);
    }
    return split;
}

/// y = x W + b for one embedding row x; W is d_emb x 6.
struct RegressionModel {
    Eigen::MatrixXd weights;
    Eigen::VectorXd bias = Eigen::VectorXd::Zero(kSensoryDims);
    double ridge_lambda = 0.0;

    std::size_t dim() const { return static_cast<std::size_t>(weights.rows()); }

    std::array<double, kSensoryDims> predict_raw(std::span<const float> x) const {
        if (x.size() != dim()) {
            throw ShapeError("embedding dimension " + std::to_string(x.size()) + " does not match model dimension " +
                             std::to_string(dim()));
        }
        std::array<double, kSensoryDims> y{};
        for (std::size_t d = 0; d < kSensoryDims; ++d) {
            double s = bias(static_cast<Eigen::Index>(d));
            for (std::size_t k = 0; k < x.size(); ++k)
                s += static_cast<double>(x[k]) * weights(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(d));
            y[d] = s;
        }
        return y;
    }
};

namespace detail {

inline std::pair<Eigen::MatrixXd, Eigen::MatrixXd> design(const Lexicon& lex, const EmbeddingTable& emb) {
    std::vector<std::pair<std::span<const float>, const SensoryVector*>> rows;
    for (const auto& e : lex)
        if (auto v = emb.find(e.word)) rows.emplace_back(*v, &e.vector);
    const auto n = static_cast<Eigen::Index>(rows.size());
    const auto d = static_cast<Eigen::Index>(emb.dim());
    Eigen::MatrixXd x(n, d);
    Eigen::MatrixXd y(n, static_cast<Eigen::Index>(kSensoryDims));
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index k = 0; k < d; ++k) x(i, k) = rows[i].first[k];
        for (std::size_t j = 0; j < kSensoryDims; ++j) y(i, static_cast<Eigen::Index>(j)) = (*rows[i].second)[j];
    }
    return {std::move(x), std::move(y)};
}

}  // namespace detail

/// Solves (Xc^T Xc + lambda I) W = Xc^T Yc jointly for all six targets, with
/// Xc, Yc mean-centered; the bias absorbs the means (an unpenalized intercept).
inline RegressionModel fit_ridge(const Lexicon& train, const EmbeddingTable& emb, double lambda) {
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw Error("ridge lambda must be finite and >= 0");
    auto [x, y] = detail::design(train, emb);
    if (x.rows() == 0) throw Error("no training word has an embedding");

    const Eigen::RowVectorXd x_mean = x.colwise().mean();
    const Eigen::RowVectorXd y_mean = y.colwise().mean();
    x.rowwise() -= x_mean;
    y.rowwise() -= y_mean;

    Eigen::MatrixXd gram = x.transpose() * x;
    gram.diagonal().array() += lambda;
    const Eigen::MatrixXd rhs = x.transpose() * y;

    Eigen::LDLT<Eigen::MatrixXd> ldlt(gram);
    const double scale = std::max(1.0, gram.diagonal().cwiseAbs().maxCoeff());
    if (ldlt.info() != Eigen::Success || !ldlt.isPositive() || ldlt.rcond() < 1e-13 ||
        ldlt.vectorD().minCoeff() <= 1e-13 * scale) {
        throw Error(lambda == 0.0 ? "ridge system is singular with lambda = 0; use lambda > 0"
                                  : "ridge system is numerically singular; increase lambda");
    }
    RegressionModel model;
    model.weights = ldlt.solve(rhs);
    model.bias = (y_mean - x_mean * model.weights).transpose();
    model.ridge_lambda = lambda;
    if (!model.weights.allFinite() || !model.bias.allFinite()) throw NumericError("ridge solution is not finite");
    return model;
}

/// Prediction clamped into [0, 5] per dimension.
inline SensoryVector predict_sensory(const RegressionModel& model, std::span<const float> embedding) {
    const auto raw = model.predict_raw(embedding);
    SensoryVector v;
    for (std::size_t d = 0; d < kSensoryDims; ++d) v[d] = std::clamp(raw[d], kSensoryMin, kSensoryMax);
    return v;
}

struct RmseReport {
    std::array<double, kSensoryDims> per_dimension{};
    double total = 0.0;  // pooled over all 6 * n residuals
    double mean_of_dimensions = 0.0;
    std::size_t n_validation = 0;
};

/// RMSE of unclamped predictions over the validation words that have embeddings.
inline RmseReport evaluate_rmse(const RegressionModel& model, const Lexicon& val, const EmbeddingTable& emb) {
    RmseReport r;
    std::array<double, kSensoryDims> sq{};
    for (const auto& e : val) {
        auto x = emb.find(e.word);
        if (!x) continue;
        const auto y = model.predict_raw(*x);
        for (std::size_t d = 0; d < kSensoryDims; ++d) sq[d] += (y[d] - e.vector[d]) * (y[d] - e.vector[d]);
        ++r.n_validation;
    }
    if (r.n_validation == 0) throw Error("validation set is empty (no word with an embedding)");
    const double n = static_cast<double>(r.n_validation);
    double pooled = 0.0;
    for (std::size_t d = 0; d < kSensoryDims; ++d) {
        r.per_dimension[d] = std::sqrt(sq[d] / n);
        pooled += sq[d];
        r.mean_of_dimensions += r.per_dimension[d] / static_cast<double>(kSensoryDims);
    }
    r.total = std::sqrt(pooled / (n * static_cast<double>(kSensoryDims)));
    return r;
}

/// Adds a predicted entry for every embedding word missing from `base`.
inline Lexicon augment_lexicon(const Lexicon& base, const EmbeddingTable& emb, const RegressionModel& model) {
    if (model.dim() != emb.dim()) {
        throw ShapeError("model dimension " + std::to_string(model.dim()) + " does not match embeddings " +
                         std::to_string(emb.dim()));
    }
    Lexicon additions;
    for (std::size_t i = 0; i < emb.size(); ++i) {
        const auto& w = emb.words()[i];
        if (base.contains(w)) continue;
        additions.insert(w, predict_sensory(model, emb.row(i)), EntrySource::predicted);
    }
    return merge(base, additions);
}

}  // namespace sensoryt5
