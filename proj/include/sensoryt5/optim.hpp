#pragma once

#include <cmath>
#include <vector>

#include "sensoryt5/params.hpp"

namespace sensoryt5 {

struct AdamOptions {
    double learning_rate = 1e-4;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

/// Adam with bias-corrected moment estimates.
template <std::floating_point T>
class Adam {
public:
    explicit Adam(AdamOptions opt = {}) : opt_(opt) {
        if (!(opt.learning_rate >= 0.0)) throw Error("learning rate must be >= 0");
    }

    /// Applies one update from the gradients currently held by `store`.
    /// Parameters without a gradient buffer are treated as having zero gradient.
    void step(ParamStore<T>& store) {
        if (m_.empty()) {
            for (const auto& p : store) {
                m_.emplace_back(p.value.size(), T(0));
                v_.emplace_back(p.value.size(), T(0));
            }
        }
        ++t_;
        const double c1 = 1.0 - std::pow(opt_.beta1, static_cast<double>(t_));
        const double c2 = 1.0 - std::pow(opt_.beta2, static_cast<double>(t_));
        const T b1 = static_cast<T>(opt_.beta1), b2 = static_cast<T>(opt_.beta2);
        const T lr = static_cast<T>(opt_.learning_rate);
        const T eps = static_cast<T>(opt_.eps);
        std::size_t k = 0;
        for (auto& p : store) {
            auto& m = m_[k];
            auto& v = v_[k];
            ++k;
            if (p.grad.size() != p.value.size()) continue;
            for (std::size_t i = 0; i < m.size(); ++i) {
                const T g = p.grad[i];
                m[i] = b1 * m[i] + (T(1) - b1) * g;
                v[i] = b2 * v[i] + (T(1) - b2) * g * g;
                const T m_hat = m[i] / static_cast<T>(c1);
                const T v_hat = v[i] / static_cast<T>(c2);
                p.value[i] -= lr * m_hat / (std::sqrt(v_hat) + eps);
            }
        }
    }

    std::size_t steps() const noexcept { return t_; }

private:
    AdamOptions opt_;
    std::size_t t_ = 0;
    std::vector<std::vector<T>> m_, v_;
};

}  // namespace sensoryt5
