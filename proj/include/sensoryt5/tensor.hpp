#pragma once

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <functional>
#include <numeric>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "sensoryt5/error.hpp"

namespace sensoryt5 {

using Shape = std::vector<std::size_t>;

inline std::string shape_string(const Shape& s) {
    std::ostringstream os;
    os << '[';
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (i) os << 'x';
        os << s[i];
    }
    os << ']';
    return os.str();
}

inline std::size_t shape_numel(const Shape& s) {
    return std::accumulate(s.begin(), s.end(), std::size_t{1}, std::multiplies<>());
}

/// Dense row-major array. Model code only uses rank 1 and rank 2; a rank-1
/// tensor of extent n is treated as a 1 x n row where a matrix is expected.
template <std::floating_point T>
class Tensor {
public:
    using value_type = T;

    Tensor() = default;
    explicit Tensor(Shape shape, T fill = T(0))
        : shape_(std::move(shape)), data_(shape_numel(shape_), fill) {}
    Tensor(Shape shape, std::vector<T> data) : shape_(std::move(shape)), data_(std::move(data)) {
        if (data_.size() != shape_numel(shape_)) {
            throw ShapeError("tensor data length " + std::to_string(data_.size()) +
                             " does not match shape " + shape_string(shape_));
        }
    }

    static Tensor matrix(std::size_t rows, std::size_t cols, T fill = T(0)) {
        return Tensor({rows, cols}, fill);
    }

    /// Builds a matrix from nested rows; all rows must have equal length.
    static Tensor from_rows(const std::vector<std::vector<T>>& rows) {
        const std::size_t r = rows.size();
        const std::size_t c = r ? rows.front().size() : 0;
        Tensor out = matrix(r, c);
        for (std::size_t i = 0; i < r; ++i) {
            if (rows[i].size() != c) throw ShapeError("ragged rows in Tensor::from_rows");
            std::copy(rows[i].begin(), rows[i].end(), out.data_.begin() + i * c);
        }
        return out;
    }

    const Shape& shape() const noexcept { return shape_; }
    std::size_t rank() const noexcept { return shape_.size(); }
    std::size_t size() const noexcept { return data_.size(); }
    bool empty() const noexcept { return data_.empty(); }

    std::size_t rows() const noexcept {
        return shape_.size() >= 2 ? shape_[shape_.size() - 2] : 1;
    }
    std::size_t cols() const noexcept { return shape_.empty() ? 1 : shape_.back(); }

    T& operator[](std::size_t i) noexcept { return data_[i]; }
    const T& operator[](std::size_t i) const noexcept { return data_[i]; }
    T& operator()(std::size_t r, std::size_t c) noexcept { return data_[r * cols() + c]; }
    const T& operator()(std::size_t r, std::size_t c) const noexcept { return data_[r * cols() + c]; }

    std::span<T> row(std::size_t r) noexcept { return {data_.data() + r * cols(), cols()}; }
    std::span<const T> row(std::size_t r) const noexcept {
        return {data_.data() + r * cols(), cols()};
    }

    std::vector<T>& data() noexcept { return data_; }
    const std::vector<T>& data() const noexcept { return data_; }

    void fill(T v) { std::fill(data_.begin(), data_.end(), v); }

    bool all_finite() const noexcept {
        return std::all_of(data_.begin(), data_.end(), [](T v) { return std::isfinite(v); });
    }

    friend bool operator==(const Tensor& a, const Tensor& b) {
        return a.shape_ == b.shape_ && a.data_ == b.data_;
    }

private:
    Shape shape_;
    std::vector<T> data_;
};

template <std::floating_point T>
T max_abs_diff(const Tensor<T>& a, const Tensor<T>& b) {
    if (a.shape() != b.shape()) {
        throw ShapeError("max_abs_diff: " + shape_string(a.shape()) + " vs " + shape_string(b.shape()));
    }
    T m = 0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

}  // namespace sensoryt5
