#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "nullcone/errors.hpp"
#include "nullcone/rational.hpp"

namespace nullcone {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Dims = std::vector<std::size_t>;

// One matrix per acted-on axis; factor k acts on axis k + 1.
using GroupElement = std::vector<Matrix>;
using ExactGroupElement = std::vector<ExactMatrix>;

/**
 * Element of C^{n0} x C^{n1} x ... x C^{nd}, row-major (last index fastest).
 * Axis 0 carries no group action. An exact view over Q(i) is kept when the
 * tensor was built from exact data; the floating entries are its rounding.
 */
class Tensor {
public:
    Tensor() = default;

    Tensor(Dims dims, std::vector<Complex> entries) : dims_(std::move(dims)), entries_(std::move(entries)) {
        validate();
    }

    static Tensor zeros(Dims dims) {
        std::size_t n = checked_size(dims);
        return Tensor(std::move(dims), std::vector<Complex>(n));
    }

    static Tensor from_exact(Dims dims, std::vector<GaussianRational> exact) {
        Tensor t;
        t.dims_ = std::move(dims);
        t.entries_.reserve(exact.size());
        for (const auto& z : exact) t.entries_.push_back(z.to_complex());
        t.exact_ = std::move(exact);
        t.validate();
        return t;
    }

    static Tensor from_integers(Dims dims, const std::vector<long long>& values) {
        std::vector<GaussianRational> exact;
        exact.reserve(values.size());
        for (long long v : values) exact.emplace_back(v);
        return from_exact(std::move(dims), std::move(exact));
    }

    const Dims& dims() const { return dims_; }
    std::size_t order() const { return dims_.size(); }
    // Number of acted-on axes.
    std::size_t parties() const { return dims_.size() - 1; }
    std::size_t size() const { return entries_.size(); }

    std::span<const Complex> entries() const { return entries_; }
    const Complex& operator[](std::size_t flat) const { return entries_[flat]; }

    bool is_exact() const { return exact_.has_value(); }
    std::span<const GaussianRational> exact_entries() const {
        if (!exact_) throw ArgumentError("tensor has no exact view");
        return *exact_;
    }
    bool is_integral() const {
        if (!exact_) return false;
        return std::all_of(exact_->begin(), exact_->end(), [](const GaussianRational& z) { return z.is_integral(); });
    }

    std::size_t flat_index(std::span<const std::size_t> idx) const {
        if (idx.size() != dims_.size()) throw ArgumentError("index arity does not match tensor order");
        std::size_t flat = 0;
        for (std::size_t a = 0; a < dims_.size(); ++a) {
            if (idx[a] >= dims_[a]) throw ArgumentError("index out of range");
            flat = flat * dims_[a] + idx[a];
        }
        return flat;
    }

    std::vector<std::size_t> multi_index(std::size_t flat) const {
        std::vector<std::size_t> idx(dims_.size());
        for (std::size_t a = dims_.size(); a-- > 0;) {
            idx[a] = flat % dims_[a];
            flat /= dims_[a];
        }
        return idx;
    }

    // Product of dims before / after an axis.
    std::size_t outer(std::size_t axis) const {
        std::size_t p = 1;
        for (std::size_t a = 0; a < axis; ++a) p *= dims_[a];
        return p;
    }
    std::size_t inner(std::size_t axis) const {
        std::size_t p = 1;
        for (std::size_t a = axis + 1; a < dims_.size(); ++a) p *= dims_[a];
        return p;
    }

    static std::size_t checked_size(const Dims& dims) {
        if (dims.size() < 2) throw ArgumentError("tensor needs an index axis and at least one acted-on axis");
        std::size_t n = 1;
        for (std::size_t d : dims) {
            if (d == 0) throw ArgumentError("tensor dimensions must be positive");
            n *= d;
        }
        return n;
    }

private:
    void validate() const {
        if (checked_size(dims_) != entries_.size()) throw ArgumentError("entry count does not match dimensions");
        if (exact_ && exact_->size() != entries_.size()) throw ArgumentError("exact view size mismatch");
    }

    Dims dims_;
    std::vector<Complex> entries_;
    std::optional<std::vector<GaussianRational>> exact_;
};

inline double norm_sq(const Tensor& x) {
    double s = 0;
    for (const auto& z : x.entries()) s += std::norm(z);
    return s;
}

inline Rational exact_norm_sq(const Tensor& x) {
    Rational s = 0;
    for (const auto& z : x.exact_entries()) s += z.norm_sq();
    return s;
}

inline void check_axis(const Tensor& x, std::size_t axis) {
    if (axis == 0 || axis >= x.order()) throw ArgumentError("axis must be one of the acted-on axes 1..d");
}

// Partial trace of x x^dagger onto one axis, without normalization.
inline Matrix marginal_unnormalized(const Tensor& x, std::size_t axis) {
    check_axis(x, axis);
    const std::size_t n = x.dims()[axis], out = x.outer(axis), in = x.inner(axis);
    Matrix rho = Matrix::Zero(n, n);
    for (std::size_t o = 0; o < out; ++o) {
        const std::size_t base = o * n * in;
        for (std::size_t a = 0; a < n; ++a)
            for (std::size_t b = a; b < n; ++b) {
                Complex s = 0;
                for (std::size_t k = 0; k < in; ++k) s += x[base + a * in + k] * std::conj(x[base + b * in + k]);
                rho(a, b) += s;
            }
    }
    for (std::size_t a = 0; a < n; ++a) {
        rho(a, a) = rho(a, a).real();
        for (std::size_t b = a + 1; b < n; ++b) rho(b, a) = std::conj(rho(a, b));
    }
    return rho;
}

// Normalized to trace 1.
inline Matrix marginal(const Tensor& x, std::size_t axis) {
    double nrm = norm_sq(x);
    if (nrm == 0) throw ArgumentError("the zero tensor has no normalized marginal");
    return marginal_unnormalized(x, axis) / nrm;
}

inline std::vector<Matrix> marginals(const Tensor& x) {
    std::vector<Matrix> out;
    for (std::size_t i = 1; i < x.order(); ++i) out.push_back(marginal(x, i));
    return out;
}

// Contract matrix a against one axis: y[.., r, ..] = sum_c a(r, c) x[.., c, ..].
inline Tensor apply_axis(const Tensor& x, const Matrix& a, std::size_t axis) {
    check_axis(x, axis);
    const std::size_t n = x.dims()[axis], out = x.outer(axis), in = x.inner(axis);
    if (a.rows() != static_cast<Eigen::Index>(n) || a.cols() != static_cast<Eigen::Index>(n))
        throw ArgumentError("matrix size does not match axis dimension");
    std::vector<Complex> y(x.size());
    for (std::size_t o = 0; o < out; ++o) {
        const std::size_t base = o * n * in;
        for (std::size_t r = 0; r < n; ++r)
            for (std::size_t c = 0; c < n; ++c) {
                const Complex arc = a(r, c);
                if (arc == Complex(0)) continue;
                for (std::size_t k = 0; k < in; ++k) y[base + r * in + k] += arc * x[base + c * in + k];
            }
    }
    return Tensor(x.dims(), std::move(y));
}

inline Matrix to_matrix(const ExactMatrix& m) {
    Matrix out(m.rows(), m.cols());
    for (std::size_t r = 0; r < m.rows(); ++r)
        for (std::size_t c = 0; c < m.cols(); ++c) out(r, c) = m(r, c).to_complex();
    return out;
}

// Exact contraction; the result keeps an exact view only if x has one.
inline Tensor apply_axis(const Tensor& x, const ExactMatrix& a, std::size_t axis) {
    if (!x.is_exact()) return apply_axis(x, to_matrix(a), axis);
    check_axis(x, axis);
    const std::size_t n = x.dims()[axis], out = x.outer(axis), in = x.inner(axis);
    if (a.rows() != n || a.cols() != n) throw ArgumentError("matrix size does not match axis dimension");
    auto xe = x.exact_entries();
    std::vector<GaussianRational> y(x.size());
    for (std::size_t o = 0; o < out; ++o) {
        const std::size_t base = o * n * in;
        for (std::size_t r = 0; r < n; ++r)
            for (std::size_t c = 0; c < n; ++c) {
                if (a(r, c).is_zero()) continue;
                for (std::size_t k = 0; k < in; ++k) {
                    const auto& v = xe[base + c * in + k];
                    if (!v.is_zero()) y[base + r * in + k] += a(r, c) * v;
                }
            }
    }
    return Tensor::from_exact(x.dims(), std::move(y));
}

template <class Mat>
Tensor act(const Tensor& x, const std::vector<Mat>& g) {
    if (g.size() != x.parties()) throw ArgumentError("group element has the wrong number of factors");
    Tensor y = x;
    for (std::size_t k = 0; k < g.size(); ++k) y = apply_axis(y, g[k], k + 1);
    return y;
}

// Axis-vs-rest matricization; columns follow the remaining axes in row-major order.
inline Matrix flattening(const Tensor& x, std::size_t axis) {
    if (axis >= x.order()) throw ArgumentError("axis out of range");
    const std::size_t n = x.dims()[axis], out = x.outer(axis), in = x.inner(axis);
    Matrix m(n, out * in);
    for (std::size_t o = 0; o < out; ++o)
        for (std::size_t j = 0; j < n; ++j)
            for (std::size_t k = 0; k < in; ++k) m(j, o * in + k) = x[(o * n + j) * in + k];
    return m;
}

inline ExactMatrix exact_flattening(const Tensor& x, std::size_t axis) {
    if (axis >= x.order()) throw ArgumentError("axis out of range");
    auto xe = x.exact_entries();
    const std::size_t n = x.dims()[axis], out = x.outer(axis), in = x.inner(axis);
    ExactMatrix m(n, out * in);
    for (std::size_t o = 0; o < out; ++o)
        for (std::size_t j = 0; j < n; ++j)
            for (std::size_t k = 0; k < in; ++k) m(j, o * in + k) = xe[(o * n + j) * in + k];
    return m;
}

// rank(rho_i) equals the rank of the axis-i flattening.
inline std::size_t exact_marginal_rank(const Tensor& x, std::size_t axis) {
    check_axis(x, axis);
    return rational_rank(exact_flattening(x, axis));
}

/**
 * Subset of [n1] x ... x [nd] (0-based tuples, sorted). The index axis is
 * projected away.
 */
struct Support {
    Dims dims;
    std::vector<std::vector<std::size_t>> tuples;

    void normalize() {
        for (const auto& t : tuples) {
            if (t.size() != dims.size()) throw ArgumentError("support tuple arity does not match dims");
            for (std::size_t i = 0; i < t.size(); ++i)
                if (t[i] >= dims[i]) throw ArgumentError("support tuple out of range");
        }
        std::sort(tuples.begin(), tuples.end());
        tuples.erase(std::unique(tuples.begin(), tuples.end()), tuples.end());
    }
    friend bool operator==(const Support&, const Support&) = default;
};

inline double default_support_threshold(const Tensor& x) {
    if (x.is_exact()) return 0.0;
    double mx = 0;
    for (const auto& z : x.entries()) mx = std::max(mx, std::abs(z));
    return 1e-12 * mx;
}

// Entries with magnitude above threshold (exactly nonzero in exact mode).
inline Support support(const Tensor& x, std::optional<double> threshold = std::nullopt) {
    Support s;
    s.dims.assign(x.dims().begin() + 1, x.dims().end());
    const bool exact = x.is_exact() && !threshold;
    const double thr = threshold.value_or(default_support_threshold(x));
    for (std::size_t f = 0; f < x.size(); ++f) {
        bool nz = exact ? !x.exact_entries()[f].is_zero() : std::abs(x[f]) > thr;
        if (!nz) continue;
        auto idx = x.multi_index(f);
        s.tuples.emplace_back(idx.begin() + 1, idx.end());
    }
    s.normalize();
    return s;
}

/**
 * k-fold tensor power with copies grouped per axis: axis a of the result has
 * dimension n_a^k and index (j_a^(1), ..., j_a^(k)) in row-major order.
 */
inline Tensor tensor_power(const Tensor& x, std::size_t k, std::size_t max_entries = 10'000'000) {
    if (k == 0) throw ArgumentError("tensor power needs k >= 1");
    Dims dims;
    double total = 1;
    for (std::size_t n : x.dims()) {
        std::size_t p = 1;
        for (std::size_t c = 0; c < k; ++c) p *= n;
        dims.push_back(p);
        total *= static_cast<double>(p);
    }
    if (total > static_cast<double>(max_entries))
        throw ResourceError("tensor power would have " + std::to_string(static_cast<long double>(total)) +
                            " entries");
    const std::size_t order = x.order();
    const std::size_t count = static_cast<std::size_t>(total);
    std::vector<std::size_t> src(k);
    auto decode = [&](std::size_t flat) {
        // Split each grouped axis index into its k per-copy digits.
        std::vector<std::size_t> idx(order);
        for (std::size_t a = order; a-- > 0;) {
            idx[a] = flat % dims[a];
            flat /= dims[a];
        }
        std::vector<std::size_t> per(k * order);
        for (std::size_t a = 0; a < order; ++a) {
            std::size_t v = idx[a];
            for (std::size_t c = k; c-- > 0;) {
                per[c * order + a] = v % x.dims()[a];
                v /= x.dims()[a];
            }
        }
        for (std::size_t c = 0; c < k; ++c)
            src[c] = x.flat_index(std::span<const std::size_t>(per.data() + c * order, order));
    };
    if (x.is_exact()) {
        auto xe = x.exact_entries();
        std::vector<GaussianRational> y(count);
        for (std::size_t f = 0; f < count; ++f) {
            decode(f);
            GaussianRational p(1);
            for (std::size_t c = 0; c < k && !p.is_zero(); ++c) p *= xe[src[c]];
            y[f] = std::move(p);
        }
        return Tensor::from_exact(std::move(dims), std::move(y));
    }
    std::vector<Complex> y(count);
    for (std::size_t f = 0; f < count; ++f) {
        decode(f);
        Complex p = 1;
        for (std::size_t c = 0; c < k; ++c) p *= x[src[c]];
        y[f] = p;
    }
    return Tensor(std::move(dims), std::move(y));
}

}  // namespace nullcone
