#pragma once

#include <cmath>
#include <string>
#include <unordered_map>
#include <vector>

#include "sensoryt5/autograd.hpp"
#include "sensoryt5/random.hpp"

namespace sensoryt5 {

enum class Init { glorot_uniform, zeros, ones };

/// Named, ordered collection of learnable tensors. Modules refer to their
/// parameters by index so the whole store copies by value.
template <std::floating_point T>
class ParamStore {
public:
    using Handle = std::size_t;

    Handle add(std::string name, Shape shape, Init init, Rng& rng) {
        if (index_.contains(name)) throw Error("duplicate parameter name '" + name + "'");
        Parameter<T> p{name, Tensor<T>(shape), Tensor<T>()};
        if (init == Init::ones) {
            p.value.fill(T(1));
        } else if (init == Init::glorot_uniform) {
            const double fan_in = static_cast<double>(p.value.rows());
            const double fan_out = static_cast<double>(p.value.cols());
            const double limit = std::sqrt(6.0 / (fan_in + fan_out));
            for (auto& v : p.value.data()) v = static_cast<T>(uniform(rng, -limit, limit));
        }
        index_.emplace(name, params_.size());
        params_.push_back(std::move(p));
        return params_.size() - 1;
    }

    Parameter<T>& operator[](Handle h) { return params_[h]; }
    const Parameter<T>& operator[](Handle h) const { return params_[h]; }

    Parameter<T>* find(const std::string& name) {
        auto it = index_.find(name);
        return it == index_.end() ? nullptr : &params_[it->second];
    }
    const Parameter<T>* find(const std::string& name) const {
        auto it = index_.find(name);
        return it == index_.end() ? nullptr : &params_[it->second];
    }

    std::size_t size() const noexcept { return params_.size(); }
    auto begin() noexcept { return params_.begin(); }
    auto end() noexcept { return params_.end(); }
    auto begin() const noexcept { return params_.begin(); }
    auto end() const noexcept { return params_.end(); }

    std::size_t scalar_count() const {
        std::size_t n = 0;
        for (const auto& p : params_) n += p.value.size();
        return n;
    }

    void zero_grad() {
        for (auto& p : params_) p.zero_grad();
    }

    /// Parameters whose name starts with `prefix`.
    std::vector<Parameter<T>*> with_prefix(std::string_view prefix) {
        std::vector<Parameter<T>*> out;
        for (auto& p : params_)
            if (p.name.starts_with(prefix)) out.push_back(&p);
        return out;
    }

    std::vector<Parameter<T>*> all() {
        std::vector<Parameter<T>*> out;
        for (auto& p : params_) out.push_back(&p);
        return out;
    }

private:
    std::vector<Parameter<T>> params_;
    std::unordered_map<std::string, Handle> index_;
};

}  // namespace sensoryt5
