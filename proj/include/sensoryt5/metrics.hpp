#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "sensoryt5/error.hpp"

namespace sensoryt5 {

struct ClassMetrics {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    std::size_t support = 0;
};

struct EvalReport {
    double accuracy = 0.0;
    double macro_f1 = 0.0;
    double weighted_f1 = 0.0;
    std::vector<ClassMetrics> per_class;
    std::vector<std::vector<std::size_t>> confusion;  // [gold][predicted]
    std::vector<std::size_t> predictions;
};

/// All scores derive from the confusion matrix. A class with no gold and no
/// predicted instances still counts toward the macro average with F1 = 0.
inline EvalReport report_from_confusion(std::vector<std::vector<std::size_t>> confusion) {
    const std::size_t c = confusion.size();
    for (const auto& row : confusion)
        if (row.size() != c) throw Error("confusion matrix must be square");
    EvalReport r;
    std::size_t total = 0, correct = 0;
    std::vector<std::size_t> predicted(c, 0);
    r.per_class.resize(c);
    for (std::size_t g = 0; g < c; ++g) {
        for (std::size_t p = 0; p < c; ++p) {
            total += confusion[g][p];
            predicted[p] += confusion[g][p];
            r.per_class[g].support += confusion[g][p];
        }
        correct += confusion[g][g];
    }
    r.accuracy = total ? static_cast<double>(correct) / static_cast<double>(total) : 0.0;
    for (std::size_t k = 0; k < c; ++k) {
        auto& m = r.per_class[k];
        const double tp = static_cast<double>(confusion[k][k]);
        m.precision = predicted[k] ? tp / static_cast<double>(predicted[k]) : 0.0;
        m.recall = m.support ? tp / static_cast<double>(m.support) : 0.0;
        m.f1 = m.precision + m.recall > 0.0 ? 2.0 * m.precision * m.recall / (m.precision + m.recall) : 0.0;
        r.macro_f1 += m.f1 / static_cast<double>(c);
        if (total) r.weighted_f1 += m.f1 * static_cast<double>(m.support) / static_cast<double>(total);
    }
    r.confusion = std::move(confusion);
    return r;
}

inline EvalReport report_from_predictions(const std::vector<std::size_t>& gold, const std::vector<std::size_t>& pred,
                                          std::size_t n_classes) {
    if (gold.size() != pred.size()) throw Error("gold and predicted label counts differ");
    std::vector<std::vector<std::size_t>> confusion(n_classes, std::vector<std::size_t>(n_classes, 0));
    for (std::size_t i = 0; i < gold.size(); ++i) {
        if (gold[i] >= n_classes || pred[i] >= n_classes) throw Error("label out of range");
        ++confusion[gold[i]][pred[i]];
    }
    auto r = report_from_confusion(std::move(confusion));
    r.predictions = pred;
    return r;
}

}  // namespace sensoryt5
