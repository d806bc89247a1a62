#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "sensoryt5/autograd.hpp"
#include "sensoryt5/random.hpp"

namespace sensoryt5 {

struct GradCheckOptions {
    double eps = 1e-5;
    /// Coordinates sampled per parameter tensor (all of them when the tensor is smaller).
    std::size_t samples_per_param = 8;
    std::uint64_t seed = 0;
};

struct GradCheckEntry {
    std::string param;
    std::size_t index;
    double analytic;
    double numeric;
    double rel_error;
};

struct GradCheckResult {
    double max_rel_error = 0.0;
    std::vector<GradCheckEntry> entries;
};

/// Compares reverse-mode gradients against central differences.
///
/// `loss` builds a scalar on the given tape from the current parameter values;
/// it must be deterministic (dropout off or seed-frozen). The relative error of
/// a coordinate is |g_ad - g_fd| / max(1, |g_ad|, |g_fd|).
template <std::floating_point T>
GradCheckResult grad_check(const std::function<Var<T>(Tape<T>&)>& loss,
                           const std::vector<Parameter<T>*>& params,
                           const GradCheckOptions& opt = {}) {
    for (auto* p : params) p->zero_grad();
    {
        Tape<T> tape;
        Var<T> l = loss(tape);
        if (!std::isfinite(static_cast<double>(l.value()[0]))) throw NumericError("grad_check: non-finite loss");
        tape.backward(l);
    }

    auto eval = [&] {
        Tape<T> tape(false);
        const double v = static_cast<double>(loss(tape).value()[0]);
        if (!std::isfinite(v)) throw NumericError("grad_check: non-finite loss under perturbation");
        return v;
    };

    Rng rng(opt.seed);
    GradCheckResult result;
    for (auto* p : params) {
        const std::size_t n = p->value.size();
        std::vector<std::size_t> coords(n);
        for (std::size_t i = 0; i < n; ++i) coords[i] = i;
        if (n > opt.samples_per_param) {
            shuffle(coords, rng);
            coords.resize(opt.samples_per_param);
        }
        for (std::size_t idx : coords) {
            T& x = p->value[idx];
            const T saved = x;
            x = saved + static_cast<T>(opt.eps);
            const double up = eval();
            x = saved - static_cast<T>(opt.eps);
            const double down = eval();
            x = saved;
            const double numeric = (up - down) / (2.0 * opt.eps);
            const double analytic = static_cast<double>(p->grad[idx]);
            const double denom = std::max({1.0, std::abs(analytic), std::abs(numeric)});
            const double rel = std::abs(analytic - numeric) / denom;
            result.entries.push_back({p->name, idx, analytic, numeric, rel});
            result.max_rel_error = std::max(result.max_rel_error, rel);
        }
    }
    return result;
}

}  // namespace sensoryt5
