#pragma once

// Reverse-mode automatic differentiation over 2-D tensors.
//
// A Tape owns every node created during one forward pass. Ops append nodes in
// creation order, which is a valid topological order, so backward() simply
// walks the record in reverse. Parameters live outside the tape and are bound
// into it by pointer; backward() accumulates their gradients exactly once.

#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <memory>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "sensoryt5/error.hpp"
#include "sensoryt5/random.hpp"
#include "sensoryt5/tensor.hpp"

namespace sensoryt5 {

template <std::floating_point T>
struct Parameter {
    std::string name;
    Tensor<T> value;
    Tensor<T> grad;

    void zero_grad() { grad = Tensor<T>(value.shape()); }
};

namespace detail {

// C (m x n) += A (m x k) * B (k x n)
template <typename T>
void gemm_nn(const T* a, const T* b, T* c, std::size_t m, std::size_t k, std::size_t n) {
    for (std::size_t i = 0; i < m; ++i) {
        T* ci = c + i * n;
        const T* ai = a + i * k;
        for (std::size_t p = 0; p < k; ++p) {
            const T av = ai[p];
            if (av == T(0)) continue;
            const T* bp = b + p * n;
            for (std::size_t j = 0; j < n; ++j) ci[j] += av * bp[j];
        }
    }
}

// C (m x n) += A (m x k) * B^T, B is (n x k)
template <typename T>
void gemm_nt(const T* a, const T* b, T* c, std::size_t m, std::size_t k, std::size_t n) {
    for (std::size_t i = 0; i < m; ++i) {
        const T* ai = a + i * k;
        for (std::size_t j = 0; j < n; ++j) {
            const T* bj = b + j * k;
            T s = 0;
            for (std::size_t p = 0; p < k; ++p) s += ai[p] * bj[p];
            c[i * n + j] += s;
        }
    }
}

// C (m x n) += A^T * B, A is (k x m), B is (k x n)
template <typename T>
void gemm_tn(const T* a, const T* b, T* c, std::size_t m, std::size_t k, std::size_t n) {
    for (std::size_t p = 0; p < k; ++p) {
        const T* ap = a + p * m;
        const T* bp = b + p * n;
        for (std::size_t i = 0; i < m; ++i) {
            const T av = ap[i];
            if (av == T(0)) continue;
            T* ci = c + i * n;
            for (std::size_t j = 0; j < n; ++j) ci[j] += av * bp[j];
        }
    }
}

}  // namespace detail

template <std::floating_point T>
class Tape;

template <std::floating_point T>
struct Node {
    Tensor<T> owned;
    const Tensor<T>* external = nullptr;  // bound parameter value
    Tensor<T> grad;                       // allocated on first accumulation
    bool needs_grad = false;
    Parameter<T>* param = nullptr;
    std::function<void()> backward;

    const Tensor<T>& value() const { return external ? *external : owned; }

    Tensor<T>& grad_buffer() {
        if (grad.empty() && !value().empty()) grad = Tensor<T>(value().shape());
        return grad;
    }
};

/// Lightweight handle to a node on a tape. Copyable; valid while the tape lives.
template <std::floating_point T>
class Var {
public:
    Var() = default;
    Var(Tape<T>* tape, Node<T>* node) : tape_(tape), node_(node) {}

    const Tensor<T>& value() const { return node_->value(); }
    const Shape& shape() const { return value().shape(); }
    std::size_t rows() const { return value().rows(); }
    std::size_t cols() const { return value().cols(); }
    /// Gradient after backward(); a zero tensor if nothing reached this node.
    Tensor<T> grad() const {
        return node_->grad.empty() ? Tensor<T>(value().shape()) : node_->grad;
    }
    bool needs_grad() const { return node_->needs_grad; }

    Tape<T>& tape() const { return *tape_; }
    Node<T>* node() const { return node_; }
    explicit operator bool() const { return node_ != nullptr; }

private:
    Tape<T>* tape_ = nullptr;
    Node<T>* node_ = nullptr;
};

template <std::floating_point T>
class Tape {
public:
    explicit Tape(bool grad_enabled = true) : grad_enabled_(grad_enabled) {}
    Tape(const Tape&) = delete;
    Tape& operator=(const Tape&) = delete;

    bool grad_enabled() const noexcept { return grad_enabled_; }
    std::size_t size() const noexcept { return nodes_.size(); }

    Var<T> constant(Tensor<T> value) { return make(std::move(value), false); }

    /// A free leaf, differentiable when the tape records gradients.
    Var<T> leaf(Tensor<T> value) { return make(std::move(value), grad_enabled_); }

    /// Binds a parameter by reference. Repeated binds return the same node.
    Var<T> param(Parameter<T>& p) {
        if (auto it = bound_.find(&p); it != bound_.end()) return Var<T>(this, it->second);
        auto node = std::make_unique<Node<T>>();
        node->external = &p.value;
        node->needs_grad = grad_enabled_;
        node->param = &p;
        Node<T>* raw = node.get();
        nodes_.push_back(std::move(node));
        bound_.emplace(&p, raw);
        return Var<T>(this, raw);
    }

    /// Creates an op node. `backward` runs only if the node needs gradients.
    Var<T> record(Tensor<T> value, std::initializer_list<Var<T>> inputs, const char* op,
                  std::function<void(Node<T>&)> backward) {
        if (!value.all_finite()) throw NumericError(std::string("non-finite value produced by ") + op);
        bool needs = false;
        for (const auto& in : inputs) needs = needs || in.needs_grad();
        return record_node(std::move(value), needs, std::move(backward));
    }

    Var<T> record_many(Tensor<T> value, std::span<const Var<T>> inputs, const char* op,
                       std::function<void(Node<T>&)> backward) {
        if (!value.all_finite()) throw NumericError(std::string("non-finite value produced by ") + op);
        bool needs = false;
        for (const auto& in : inputs) needs = needs || in.needs_grad();
        return record_node(std::move(value), needs, std::move(backward));
    }

    /// Seeds d(loss)/d(loss) = 1 and propagates in reverse creation order.
    /// Bound parameter gradients are accumulated into Parameter::grad.
    void backward(const Var<T>& loss) {
        if (!grad_enabled_) throw Error("backward() called on a tape without gradient recording");
        if (backward_done_) throw Error("backward() called twice on the same tape");
        if (loss.value().size() != 1) {
            throw ShapeError("backward() expects a scalar loss, got " + shape_string(loss.shape()));
        }
        backward_done_ = true;
        loss.node()->grad_buffer()[0] += T(1);
        for (auto it = nodes_.rbegin(); it != nodes_.rend(); ++it) {
            Node<T>& n = **it;
            if (n.grad.empty() || !n.backward) continue;
            n.backward();
        }
        for (auto& [key, node] : bound_) {
            if (node->grad.empty()) continue;
            Parameter<T>* p = node->param;
            if (p->grad.shape() != p->value.shape()) p->zero_grad();
            auto& dst = p->grad.data();
            const auto& src = node->grad.data();
            for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += src[i];
        }
    }

private:
    Var<T> make(Tensor<T> value, bool needs) {
        if (!value.all_finite()) throw NumericError("non-finite value fed into tape");
        auto node = std::make_unique<Node<T>>();
        node->owned = std::move(value);
        node->needs_grad = needs;
        Node<T>* raw = node.get();
        nodes_.push_back(std::move(node));
        return Var<T>(this, raw);
    }

    Var<T> record_node(Tensor<T> value, bool needs, std::function<void(Node<T>&)> backward) {
        auto node = std::make_unique<Node<T>>();
        node->owned = std::move(value);
        node->needs_grad = needs && grad_enabled_;
        Node<T>* raw = node.get();
        if (node->needs_grad && backward) {
            node->backward = [raw, fn = std::move(backward)] { fn(*raw); };
        }
        nodes_.push_back(std::move(node));
        return Var<T>(this, raw);
    }

    bool grad_enabled_;
    bool backward_done_ = false;
    std::vector<std::unique_ptr<Node<T>>> nodes_;
    std::unordered_map<const Parameter<T>*, Node<T>*> bound_;
};

namespace detail {

template <typename T>
void accumulate(Node<T>* dst, const Tensor<T>& g) {
    if (!dst->needs_grad) return;
    auto& buf = dst->grad_buffer().data();
    const auto& src = g.data();
    for (std::size_t i = 0; i < buf.size(); ++i) buf[i] += src[i];
}

inline void require(bool ok, const std::string& msg) {
    if (!ok) throw ShapeError(msg);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Linear algebra

template <std::floating_point T>
Var<T> matmul(const Var<T>& a, const Var<T>& b) {
    const auto& av = a.value();
    const auto& bv = b.value();
    const std::size_t m = av.rows(), k = av.cols(), n = bv.cols();
    detail::require(bv.rows() == k, "matmul: inner dimensions differ, " + shape_string(av.shape()) +
                                        " x " + shape_string(bv.shape()));
    Tensor<T> out = Tensor<T>::matrix(m, n);
    detail::gemm_nn(av.data().data(), bv.data().data(), out.data().data(), m, k, n);
    Node<T>* an = a.node();
    Node<T>* bn = b.node();
    return a.tape().record(std::move(out), {a, b}, "matmul", [an, bn, m, k, n](Node<T>& self) {
        const T* g = self.grad.data().data();
        if (an->needs_grad) {
            detail::gemm_nt(g, bn->value().data().data(), an->grad_buffer().data().data(), m, n, k);
        }
        if (bn->needs_grad) {
            detail::gemm_tn(an->value().data().data(), g, bn->grad_buffer().data().data(), k, m, n);
        }
    });
}

/// a * b^T, used for attention scores without materializing a transpose.
template <std::floating_point T>
Var<T> matmul_nt(const Var<T>& a, const Var<T>& b) {
    const auto& av = a.value();
    const auto& bv = b.value();
    const std::size_t m = av.rows(), k = av.cols(), n = bv.rows();
    detail::require(bv.cols() == k, "matmul_nt: inner dimensions differ, " + shape_string(av.shape()) +
                                        " x " + shape_string(bv.shape()) + "^T");
    Tensor<T> out = Tensor<T>::matrix(m, n);
    detail::gemm_nt(av.data().data(), bv.data().data(), out.data().data(), m, k, n);
    Node<T>* an = a.node();
    Node<T>* bn = b.node();
    return a.tape().record(std::move(out), {a, b}, "matmul_nt", [an, bn, m, k, n](Node<T>& self) {
        const T* g = self.grad.data().data();
        if (an->needs_grad) {
            detail::gemm_nn(g, bn->value().data().data(), an->grad_buffer().data().data(), m, n, k);
        }
        if (bn->needs_grad) {
            detail::gemm_tn(g, an->value().data().data(), bn->grad_buffer().data().data(), n, m, k);
        }
    });
}

template <std::floating_point T>
Var<T> transpose(const Var<T>& a) {
    const auto& av = a.value();
    const std::size_t m = av.rows(), n = av.cols();
    Tensor<T> out = Tensor<T>::matrix(n, m);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j) out(j, i) = av(i, j);
    Node<T>* an = a.node();
    return a.tape().record(std::move(out), {a}, "transpose", [an, m, n](Node<T>& self) {
        auto& g = an->grad_buffer();
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < n; ++j) g[i * n + j] += self.grad[j * m + i];
    });
}

// ---------------------------------------------------------------------------
// Elementwise

template <std::floating_point T>
Var<T> add(const Var<T>& a, const Var<T>& b) {
    detail::require(a.shape() == b.shape(),
                    "add: " + shape_string(a.shape()) + " vs " + shape_string(b.shape()));
    Tensor<T> out = a.value();
    const auto& bv = b.value();
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += bv[i];
    Node<T>* an = a.node();
    Node<T>* bn = b.node();
    return a.tape().record(std::move(out), {a, b}, "add", [an, bn](Node<T>& self) {
        detail::accumulate(an, self.grad);
        detail::accumulate(bn, self.grad);
    });
}

/// x [m x n] + bias broadcast over rows; bias is [1 x n] or [n].
template <std::floating_point T>
Var<T> add_bias(const Var<T>& x, const Var<T>& bias) {
    const auto& xv = x.value();
    const auto& bv = bias.value();
    const std::size_t m = xv.rows(), n = xv.cols();
    detail::require(bv.size() == n, "add_bias: bias " + shape_string(bv.shape()) + " for input " +
                                        shape_string(xv.shape()));
    Tensor<T> out = xv;
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j) out(i, j) += bv[j];
    Node<T>* xn = x.node();
    Node<T>* bn = bias.node();
    return x.tape().record(std::move(out), {x, bias}, "add_bias", [xn, bn, m, n](Node<T>& self) {
        detail::accumulate(xn, self.grad);
        if (bn->needs_grad) {
            auto& g = bn->grad_buffer();
            for (std::size_t i = 0; i < m; ++i)
                for (std::size_t j = 0; j < n; ++j) g[j] += self.grad[i * n + j];
        }
    });
}

template <std::floating_point T>
Var<T> scale(const Var<T>& a, T s) {
    Tensor<T> out = a.value();
    for (auto& v : out.data()) v *= s;
    Node<T>* an = a.node();
    return a.tape().record(std::move(out), {a}, "scale", [an, s](Node<T>& self) {
        auto& g = an->grad_buffer();
        for (std::size_t i = 0; i < g.size(); ++i) g[i] += s * self.grad[i];
    });
}

template <std::floating_point T>
Var<T> relu(const Var<T>& a) {
    Tensor<T> out = a.value();
    for (auto& v : out.data()) v = v > T(0) ? v : T(0);
    Node<T>* an = a.node();
    return a.tape().record(std::move(out), {a}, "relu", [an](Node<T>& self) {
        auto& g = an->grad_buffer();
        const auto& x = an->value();
        for (std::size_t i = 0; i < g.size(); ++i)
            if (x[i] > T(0)) g[i] += self.grad[i];
    });
}

/// Inverted dropout: survivors are scaled by 1/keep so evaluation needs no
/// rescaling. With train == false or keep == 1 this is the identity.
template <std::floating_point T>
Var<T> dropout(const Var<T>& a, double keep, Rng* rng, bool train) {
    if (!(keep > 0.0 && keep <= 1.0)) {
        throw Error("dropout keep-probability must lie in (0, 1], got " + std::to_string(keep));
    }
    if (!train || keep == 1.0) return a;
    if (!rng) throw Error("dropout in train mode needs an RNG");
    const T inv = T(1) / static_cast<T>(keep);
    std::vector<T> mask(a.value().size());
    for (auto& m : mask) m = uniform01(*rng) < keep ? inv : T(0);
    Tensor<T> out = a.value();
    for (std::size_t i = 0; i < out.size(); ++i) out[i] *= mask[i];
    Node<T>* an = a.node();
    return a.tape().record(std::move(out), {a}, "dropout", [an, mask = std::move(mask)](Node<T>& self) {
        auto& g = an->grad_buffer();
        for (std::size_t i = 0; i < g.size(); ++i) g[i] += mask[i] * self.grad[i];
    });
}

// ---------------------------------------------------------------------------
// Row-wise reductions and normalizations

template <std::floating_point T>
Var<T> softmax_rows(const Var<T>& x) {
    const auto& xv = x.value();
    const std::size_t m = xv.rows(), n = xv.cols();
    Tensor<T> out = Tensor<T>::matrix(m, n);
    for (std::size_t i = 0; i < m; ++i) {
        auto in = xv.row(i);
        auto o = out.row(i);
        const T mx = *std::max_element(in.begin(), in.end());
        T sum = 0;
        for (std::size_t j = 0; j < n; ++j) {
            o[j] = std::exp(in[j] - mx);
            sum += o[j];
        }
        for (std::size_t j = 0; j < n; ++j) o[j] /= sum;
    }
    Node<T>* xn = x.node();
    return x.tape().record(std::move(out), {x}, "softmax_rows", [xn, m, n](Node<T>& self) {
        auto& g = xn->grad_buffer();
        const auto& y = self.value();
        for (std::size_t i = 0; i < m; ++i) {
            T dot = 0;
            for (std::size_t j = 0; j < n; ++j) dot += self.grad[i * n + j] * y(i, j);
            for (std::size_t j = 0; j < n; ++j) g[i * n + j] += y(i, j) * (self.grad[i * n + j] - dot);
        }
    });
}

/// Row-wise layer normalization with learned gain and shift ([n] or [1 x n]).
template <std::floating_point T>
Var<T> layer_norm(const Var<T>& x, const Var<T>& gain, const Var<T>& shift, T eps = T(1e-6)) {
    const auto& xv = x.value();
    const std::size_t m = xv.rows(), n = xv.cols();
    detail::require(gain.value().size() == n && shift.value().size() == n,
                    "layer_norm: gain/shift width does not match input " + shape_string(xv.shape()));
    Tensor<T> xhat = Tensor<T>::matrix(m, n);
    std::vector<T> inv_std(m);
    for (std::size_t i = 0; i < m; ++i) {
        auto r = xv.row(i);
        T mean = 0;
        for (T v : r) mean += v;
        mean /= static_cast<T>(n);
        T var = 0;
        for (T v : r) var += (v - mean) * (v - mean);
        var /= static_cast<T>(n);
        inv_std[i] = T(1) / std::sqrt(var + eps);
        for (std::size_t j = 0; j < n; ++j) xhat(i, j) = (r[j] - mean) * inv_std[i];
    }
    Tensor<T> out = xhat;
    const auto& gv = gain.value();
    const auto& sv = shift.value();
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j) out(i, j) = out(i, j) * gv[j] + sv[j];
    Node<T>* xn = x.node();
    Node<T>* gn = gain.node();
    Node<T>* sn = shift.node();
    return x.tape().record(
        std::move(out), {x, gain, shift}, "layer_norm",
        [xn, gn, sn, m, n, xhat = std::move(xhat), inv_std = std::move(inv_std)](Node<T>& self) {
            const auto& gv = gn->value();
            const T* dy = self.grad.data().data();
            if (gn->needs_grad || sn->needs_grad) {
                auto& gg = gn->grad_buffer();
                auto& sg = sn->grad_buffer();
                for (std::size_t i = 0; i < m; ++i)
                    for (std::size_t j = 0; j < n; ++j) {
                        if (gn->needs_grad) gg[j] += dy[i * n + j] * xhat(i, j);
                        if (sn->needs_grad) sg[j] += dy[i * n + j];
                    }
            }
            if (!xn->needs_grad) return;
            auto& xg = xn->grad_buffer();
            const T inv_n = T(1) / static_cast<T>(n);
            for (std::size_t i = 0; i < m; ++i) {
                T sum_d = 0, sum_dx = 0;
                for (std::size_t j = 0; j < n; ++j) {
                    const T d = dy[i * n + j] * gv[j];
                    sum_d += d;
                    sum_dx += d * xhat(i, j);
                }
                for (std::size_t j = 0; j < n; ++j) {
                    const T d = dy[i * n + j] * gv[j];
                    xg[i * n + j] += inv_std[i] * (d - inv_n * sum_d - xhat(i, j) * inv_n * sum_dx);
                }
            }
        });
}

/// Mean over the row (sequence) axis: [m x n] -> [1 x n].
template <std::floating_point T>
Var<T> mean_rows(const Var<T>& x) {
    const auto& xv = x.value();
    const std::size_t m = xv.rows(), n = xv.cols();
    detail::require(m >= 1, "mean_rows: empty input");
    Tensor<T> out = Tensor<T>::matrix(1, n);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j) out[j] += xv(i, j);
    const T inv = T(1) / static_cast<T>(m);
    for (auto& v : out.data()) v *= inv;
    Node<T>* xn = x.node();
    return x.tape().record(std::move(out), {x}, "mean_rows", [xn, m, n, inv](Node<T>& self) {
        auto& g = xn->grad_buffer();
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < n; ++j) g[i * n + j] += inv * self.grad[j];
    });
}

/// Max over the row axis; ties route the gradient to the first maximal row.
template <std::floating_point T>
Var<T> max_rows(const Var<T>& x) {
    const auto& xv = x.value();
    const std::size_t m = xv.rows(), n = xv.cols();
    detail::require(m >= 1, "max_rows: empty input");
    Tensor<T> out = Tensor<T>::matrix(1, n);
    std::vector<std::size_t> arg(n, 0);
    for (std::size_t j = 0; j < n; ++j) {
        out[j] = xv(0, j);
        for (std::size_t i = 1; i < m; ++i)
            if (xv(i, j) > out[j]) {
                out[j] = xv(i, j);
                arg[j] = i;
            }
    }
    Node<T>* xn = x.node();
    return x.tape().record(std::move(out), {x}, "max_rows", [xn, n, arg = std::move(arg)](Node<T>& self) {
        auto& g = xn->grad_buffer();
        for (std::size_t j = 0; j < n; ++j) g[arg[j] * n + j] += self.grad[j];
    });
}

template <std::floating_point T>
Var<T> sum(const Var<T>& x) {
    T s = 0;
    for (T v : x.value().data()) s += v;
    Node<T>* xn = x.node();
    return x.tape().record(Tensor<T>({1, 1}, s), {x}, "sum", [xn](Node<T>& self) {
        auto& g = xn->grad_buffer();
        for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[0];
    });
}

/// Cross-entropy of one example: logits [1 x C] (or [C]) and a class index.
/// Log-softmax is applied internally. Returns a [1 x 1] scalar.
template <std::floating_point T>
Var<T> cross_entropy(const Var<T>& logits, std::size_t label) {
    const auto& lv = logits.value();
    const std::size_t c = lv.size();
    detail::require(label < c, "cross_entropy: label " + std::to_string(label) + " out of range for " +
                                   std::to_string(c) + " classes");
    const T mx = *std::max_element(lv.data().begin(), lv.data().end());
    T z = 0;
    for (T v : lv.data()) z += std::exp(v - mx);
    const T log_z = mx + std::log(z);
    const T loss = log_z - lv[label];
    Node<T>* ln = logits.node();
    return logits.tape().record(Tensor<T>({1, 1}, loss), {logits}, "cross_entropy",
                                [ln, label, log_z, c](Node<T>& self) {
                                    auto& g = ln->grad_buffer();
                                    const auto& v = ln->value();
                                    for (std::size_t j = 0; j < c; ++j) {
                                        const T p = std::exp(v[j] - log_z);
                                        g[j] += self.grad[0] * (p - (j == label ? T(1) : T(0)));
                                    }
                                });
}

// ---------------------------------------------------------------------------
// Slicing and gathering

template <std::floating_point T>
Var<T> slice_cols(const Var<T>& x, std::size_t begin, std::size_t width) {
    const auto& xv = x.value();
    const std::size_t m = xv.rows(), n = xv.cols();
    detail::require(begin + width <= n, "slice_cols: columns [" + std::to_string(begin) + ", " +
                                            std::to_string(begin + width) + ") exceed " +
                                            shape_string(xv.shape()));
    Tensor<T> out = Tensor<T>::matrix(m, width);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < width; ++j) out(i, j) = xv(i, begin + j);
    Node<T>* xn = x.node();
    return x.tape().record(std::move(out), {x}, "slice_cols", [xn, m, n, begin, width](Node<T>& self) {
        auto& g = xn->grad_buffer();
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < width; ++j) g[i * n + begin + j] += self.grad[i * width + j];
    });
}

template <std::floating_point T>
Var<T> slice_rows(const Var<T>& x, std::size_t begin, std::size_t count) {
    const auto& xv = x.value();
    const std::size_t n = xv.cols();
    detail::require(begin + count <= xv.rows(), "slice_rows: rows [" + std::to_string(begin) + ", " +
                                                    std::to_string(begin + count) + ") exceed " +
                                                    shape_string(xv.shape()));
    Tensor<T> out = Tensor<T>::matrix(count, n);
    std::copy_n(xv.data().begin() + begin * n, count * n, out.data().begin());
    Node<T>* xn = x.node();
    return x.tape().record(std::move(out), {x}, "slice_rows", [xn, begin, count, n](Node<T>& self) {
        auto& g = xn->grad_buffer();
        for (std::size_t i = 0; i < count * n; ++i) g[begin * n + i] += self.grad[i];
    });
}

template <std::floating_point T>
Var<T> concat_cols(const std::vector<Var<T>>& parts) {
    detail::require(!parts.empty(), "concat_cols: no inputs");
    const std::size_t m = parts.front().rows();
    std::size_t n = 0;
    for (const auto& p : parts) {
        detail::require(p.rows() == m, "concat_cols: row counts differ");
        n += p.cols();
    }
    Tensor<T> out = Tensor<T>::matrix(m, n);
    std::vector<Node<T>*> nodes;
    std::vector<std::size_t> offsets;
    std::size_t off = 0;
    for (const auto& p : parts) {
        const auto& pv = p.value();
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < pv.cols(); ++j) out(i, off + j) = pv(i, j);
        nodes.push_back(p.node());
        offsets.push_back(off);
        off += pv.cols();
    }
    return parts.front().tape().record_many(
        std::move(out), parts, "concat_cols",
        [nodes = std::move(nodes), offsets = std::move(offsets), m, n](Node<T>& self) {
            for (std::size_t k = 0; k < nodes.size(); ++k) {
                Node<T>* pn = nodes[k];
                if (!pn->needs_grad) continue;
                const std::size_t w = pn->value().cols();
                auto& g = pn->grad_buffer();
                for (std::size_t i = 0; i < m; ++i)
                    for (std::size_t j = 0; j < w; ++j) g[i * w + j] += self.grad[i * n + offsets[k] + j];
            }
        });
}

/// Row lookup into an embedding table; backward scatter-adds into the table.
template <std::floating_point T>
Var<T> gather_rows(const Var<T>& table, std::span<const std::size_t> ids) {
    const auto& tv = table.value();
    const std::size_t n = tv.cols();
    Tensor<T> out = Tensor<T>::matrix(ids.size(), n);
    for (std::size_t i = 0; i < ids.size(); ++i) {
        detail::require(ids[i] < tv.rows(), "gather_rows: id " + std::to_string(ids[i]) +
                                                " out of range for table " + shape_string(tv.shape()));
        std::copy_n(tv.data().begin() + ids[i] * n, n, out.data().begin() + i * n);
    }
    Node<T>* tn = table.node();
    std::vector<std::size_t> idx(ids.begin(), ids.end());
    return table.tape().record(std::move(out), {table}, "gather_rows",
                               [tn, n, idx = std::move(idx)](Node<T>& self) {
                                   auto& g = tn->grad_buffer();
                                   for (std::size_t i = 0; i < idx.size(); ++i)
                                       for (std::size_t j = 0; j < n; ++j)
                                           g[idx[i] * n + j] += self.grad[i * n + j];
                               });
}

}  // namespace sensoryt5
