#pragma once

#include <complex>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "nullcone/errors.hpp"

namespace nullcone {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline double to_double(const Rational& q) { return q.convert_to<double>(); }

// Accepts "p", "-p", "p/q".
inline Rational parse_rational(const std::string& text) {
    try {
        auto slash = text.find('/');
        if (slash == std::string::npos) return Rational(BigInt(text));
        BigInt num(text.substr(0, slash));
        BigInt den(text.substr(slash + 1));
        if (den == 0) throw ParseError("zero denominator in '" + text + "'");
        return Rational(num, den);
    } catch (const ParseError&) {
        throw;
    } catch (const std::exception&) {
        throw ParseError("not a rational number: '" + text + "'");
    }
}

inline std::string to_string(const Rational& q) {
    if (denominator(q) == 1) return numerator(q).str();
    return numerator(q).str() + "/" + denominator(q).str();
}

// Exact element of Q(i).
struct GaussianRational {
    Rational re;
    Rational im;

    GaussianRational() = default;
    GaussianRational(Rational r, Rational i = Rational(0)) : re(std::move(r)), im(std::move(i)) {}
    GaussianRational(long long r) : re(r), im(0) {}

    bool is_zero() const { return re == 0 && im == 0; }
    bool is_integral() const { return denominator(re) == 1 && denominator(im) == 1; }
    GaussianRational conj() const { return {re, -im}; }
    Rational norm_sq() const { return re * re + im * im; }
    std::complex<double> to_complex() const { return {to_double(re), to_double(im)}; }

    GaussianRational inverse() const {
        Rational n = norm_sq();
        if (n == 0) throw ArgumentError("division by zero in Q(i)");
        return {re / n, -im / n};
    }

    GaussianRational& operator+=(const GaussianRational& o) {
        re += o.re;
        im += o.im;
        return *this;
    }
    GaussianRational& operator-=(const GaussianRational& o) {
        re -= o.re;
        im -= o.im;
        return *this;
    }
    GaussianRational& operator*=(const GaussianRational& o) {
        Rational r = re * o.re - im * o.im;
        im = re * o.im + im * o.re;
        re = std::move(r);
        return *this;
    }
    GaussianRational& operator/=(const GaussianRational& o) { return *this *= o.inverse(); }

    friend GaussianRational operator+(GaussianRational a, const GaussianRational& b) { return a += b; }
    friend GaussianRational operator-(GaussianRational a, const GaussianRational& b) { return a -= b; }
    friend GaussianRational operator*(GaussianRational a, const GaussianRational& b) { return a *= b; }
    friend GaussianRational operator/(GaussianRational a, const GaussianRational& b) { return a /= b; }
    friend GaussianRational operator-(const GaussianRational& a) { return {-a.re, -a.im}; }
    friend bool operator==(const GaussianRational& a, const GaussianRational& b) {
        return a.re == b.re && a.im == b.im;
    }
    friend bool operator!=(const GaussianRational& a, const GaussianRational& b) { return !(a == b); }
};

inline std::string to_string(const GaussianRational& z) {
    if (z.im == 0) return to_string(z.re);
    return to_string(z.re) + (z.im < 0 ? "-" : "+") + to_string(abs(z.im)) + "i";
}

// Element of Z[i]; used for fraction-free elimination.
struct GaussianInt {
    BigInt re;
    BigInt im;

    bool is_zero() const { return re == 0 && im == 0; }
    friend GaussianInt operator*(const GaussianInt& a, const GaussianInt& b) {
        return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
    }
    friend GaussianInt operator-(const GaussianInt& a, const GaussianInt& b) { return {a.re - b.re, a.im - b.im}; }

    // Caller guarantees b divides a.
    friend GaussianInt exact_div(const GaussianInt& a, const GaussianInt& b) {
        BigInt n = b.re * b.re + b.im * b.im;
        BigInt r = a.re * b.re + a.im * b.im;
        BigInt i = a.im * b.re - a.re * b.im;
        return {r / n, i / n};
    }
};

// Dense row-major matrix over Q(i).
class ExactMatrix {
public:
    ExactMatrix() = default;
    ExactMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}

    static ExactMatrix identity(std::size_t n) {
        ExactMatrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = GaussianRational(1);
        return m;
    }

    static ExactMatrix from_integers(std::size_t rows, std::size_t cols, const std::vector<long long>& values) {
        if (values.size() != rows * cols) throw ArgumentError("matrix entry count does not match shape");
        ExactMatrix m(rows, cols);
        for (std::size_t k = 0; k < values.size(); ++k) m.data_[k] = GaussianRational(values[k]);
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    GaussianRational& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    const GaussianRational& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    ExactMatrix transpose() const {
        ExactMatrix t(cols_, rows_);
        for (std::size_t r = 0; r < rows_; ++r)
            for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
        return t;
    }

    friend ExactMatrix operator*(const ExactMatrix& a, const ExactMatrix& b) {
        if (a.cols_ != b.rows_) throw ArgumentError("matrix product shape mismatch");
        ExactMatrix p(a.rows_, b.cols_);
        for (std::size_t i = 0; i < a.rows_; ++i)
            for (std::size_t k = 0; k < a.cols_; ++k) {
                if (a(i, k).is_zero()) continue;
                for (std::size_t j = 0; j < b.cols_; ++j) p(i, j) += a(i, k) * b(k, j);
            }
        return p;
    }

    friend bool operator==(const ExactMatrix& a, const ExactMatrix& b) {
        return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
    }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<GaussianRational> data_;
};

namespace detail {

inline BigInt lcm_big(const BigInt& a, const BigInt& b) {
    return a / boost::multiprecision::gcd(a, b) * b;
}

// Each row scaled by the lcm of its denominators; rank is unchanged.
inline std::vector<std::vector<GaussianInt>> clear_denominators(const ExactMatrix& m) {
    std::vector<std::vector<GaussianInt>> out(m.rows(), std::vector<GaussianInt>(m.cols()));
    for (std::size_t r = 0; r < m.rows(); ++r) {
        BigInt l = 1;
        for (std::size_t c = 0; c < m.cols(); ++c) {
            l = lcm_big(l, denominator(m(r, c).re));
            l = lcm_big(l, denominator(m(r, c).im));
        }
        for (std::size_t c = 0; c < m.cols(); ++c) {
            const auto& z = m(r, c);
            out[r][c] = {numerator(z.re) * (l / denominator(z.re)), numerator(z.im) * (l / denominator(z.im))};
        }
    }
    return out;
}

}  // namespace detail

// Fraction-free (Bareiss) elimination over Z[i].
inline std::size_t rational_rank(const ExactMatrix& m) {
    auto a = detail::clear_denominators(m);
    const std::size_t rows = m.rows(), cols = m.cols();
    GaussianInt prev{1, 0};
    std::size_t rank = 0;
    for (std::size_t c = 0; c < cols && rank < rows; ++c) {
        std::size_t p = rank;
        while (p < rows && a[p][c].is_zero()) ++p;
        if (p == rows) continue;
        std::swap(a[p], a[rank]);
        for (std::size_t i = rank + 1; i < rows; ++i) {
            for (std::size_t j = c + 1; j < cols; ++j)
                a[i][j] = exact_div(a[rank][c] * a[i][j] - a[i][c] * a[rank][j], prev);
            a[i][c] = GaussianInt{0, 0};
        }
        prev = a[rank][c];
        ++rank;
    }
    return rank;
}

inline GaussianRational determinant(ExactMatrix m) {
    if (m.rows() != m.cols()) throw ArgumentError("determinant of a non-square matrix");
    const std::size_t n = m.rows();
    GaussianRational det(1);
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t p = c;
        while (p < n && m(p, c).is_zero()) ++p;
        if (p == n) return GaussianRational(0);
        if (p != c) {
            for (std::size_t j = 0; j < n; ++j) std::swap(m(p, j), m(c, j));
            det = -det;
        }
        det *= m(c, c);
        GaussianRational inv = m(c, c).inverse();
        for (std::size_t i = c + 1; i < n; ++i) {
            if (m(i, c).is_zero()) continue;
            GaussianRational f = m(i, c) * inv;
            for (std::size_t j = c; j < n; ++j) m(i, j) -= f * m(c, j);
        }
    }
    return det;
}

}  // namespace nullcone
