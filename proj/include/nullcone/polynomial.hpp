#pragma once

#include <cstdint>
#include <map>
#include <numeric>
#include <string>
#include <vector>

#include "nullcone/errors.hpp"
#include "nullcone/rational.hpp"

namespace nullcone {

using Exponent = std::vector<std::uint32_t>;

inline std::uint64_t total_degree(const Exponent& e) {
    return std::accumulate(e.begin(), e.end(), std::uint64_t{0});
}

/**
 * Sparse polynomial with exact rational coefficients. Terms are kept in
 * lexicographic exponent order and zero coefficients are never stored.
 */
class Polynomial {
public:
    using Terms = std::map<Exponent, Rational>;

    Polynomial() = default;
    explicit Polynomial(std::size_t nvars) : nvars_(nvars) {}

    static Polynomial constant(std::size_t nvars, const Rational& c) {
        Polynomial p(nvars);
        p.add_term(Exponent(nvars, 0), c);
        return p;
    }
    static Polynomial variable(std::size_t nvars, std::size_t var) {
        if (var >= nvars) throw ArgumentError("variable index out of range");
        Exponent e(nvars, 0);
        e[var] = 1;
        Polynomial p(nvars);
        p.add_term(std::move(e), Rational(1));
        return p;
    }
    static Polynomial monomial(Exponent e, const Rational& c = Rational(1)) {
        Polynomial p(e.size());
        p.add_term(std::move(e), c);
        return p;
    }

    std::size_t nvars() const { return nvars_; }
    const Terms& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    std::size_t term_count() const { return terms_.size(); }

    void add_term(const Exponent& e, const Rational& c) {
        if (e.size() != nvars_) throw ArgumentError("exponent length does not match variable count");
        if (c == 0) return;
        auto [it, inserted] = terms_.try_emplace(e, c);
        if (!inserted) {
            it->second += c;
            if (it->second == 0) terms_.erase(it);
        }
    }

    Rational coefficient(const Exponent& e) const {
        auto it = terms_.find(e);
        return it == terms_.end() ? Rational(0) : it->second;
    }

    // -1 for the zero polynomial.
    long long degree() const {
        long long d = -1;
        for (const auto& [e, c] : terms_) d = std::max(d, static_cast<long long>(total_degree(e)));
        return d;
    }

    bool is_homogeneous() const {
        if (terms_.empty()) return true;
        const auto d = total_degree(terms_.begin()->first);
        for (const auto& [e, c] : terms_)
            if (total_degree(e) != d) return false;
        return true;
    }

    Polynomial& operator+=(const Polynomial& o) {
        check_same(o);
        for (const auto& [e, c] : o.terms_) add_term(e, c);
        return *this;
    }
    Polynomial& operator-=(const Polynomial& o) {
        check_same(o);
        for (const auto& [e, c] : o.terms_) add_term(e, -c);
        return *this;
    }
    Polynomial& operator*=(const Rational& s) {
        if (s == 0) {
            terms_.clear();
            return *this;
        }
        for (auto& [e, c] : terms_) c *= s;
        return *this;
    }

    friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
    friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
    friend Polynomial operator*(Polynomial a, const Rational& s) { return a *= s; }
    friend Polynomial operator*(const Rational& s, Polynomial a) { return a *= s; }

    friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
        a.check_same(b);
        Polynomial p(a.nvars_);
        Exponent e(a.nvars_);
        for (const auto& [ea, ca] : a.terms_)
            for (const auto& [eb, cb] : b.terms_) {
                for (std::size_t k = 0; k < e.size(); ++k) e[k] = ea[k] + eb[k];
                p.add_term(e, ca * cb);
            }
        return p;
    }

    friend bool operator==(const Polynomial& a, const Polynomial& b) {
        return a.nvars_ == b.nvars_ && a.terms_ == b.terms_;
    }

    Polynomial pow(unsigned k) const {
        Polynomial result = constant(nvars_, 1), base = *this;
        while (k) {
            if (k & 1) result = result * base;
            k >>= 1;
            if (k) base = base * base;
        }
        return result;
    }

    Polynomial derivative(std::size_t var) const {
        if (var >= nvars_) throw ArgumentError("variable index out of range");
        Polynomial p(nvars_);
        for (const auto& [e, c] : terms_) {
            if (e[var] == 0) continue;
            Exponent f = e;
            --f[var];
            p.add_term(f, c * e[var]);
        }
        return p;
    }

    // Component of the given total degree.
    Polynomial homogeneous_part(std::uint64_t deg) const {
        Polynomial p(nvars_);
        for (const auto& [e, c] : terms_)
            if (total_degree(e) == deg) p.terms_.emplace(e, c);
        return p;
    }

    template <class T>
    T evaluate(const std::vector<T>& point) const {
        if (point.size() != nvars_) throw ArgumentError("evaluation point has the wrong length");
        T sum(0);
        for (const auto& [e, c] : terms_) {
            T term = T(c);
            for (std::size_t k = 0; k < nvars_ && !(term == T(0)); ++k)
                for (std::uint32_t r = 0; r < e[k]; ++r) term *= point[k];
            sum += term;
        }
        return sum;
    }

    // Replaces variable k by images[k]; all images share one variable count.
    Polynomial substitute(const std::vector<Polynomial>& images) const {
        if (images.size() != nvars_) throw ArgumentError("substitution needs one image per variable");
        const std::size_t out_vars = images.empty() ? 0 : images[0].nvars();
        std::vector<std::vector<Polynomial>> powers(nvars_);
        Polynomial out(out_vars);
        for (const auto& [e, c] : terms_) {
            Polynomial term = constant(out_vars, c);
            for (std::size_t k = 0; k < nvars_; ++k) {
                if (e[k] == 0) continue;
                auto& pw = powers[k];
                if (pw.empty()) pw.push_back(constant(out_vars, 1));
                while (pw.size() <= e[k]) pw.push_back(pw.back() * images[k]);
                term = term * pw[e[k]];
            }
            out += term;
        }
        return out;
    }

    BigInt max_abs_numerator() const {
        BigInt m = 0;
        for (const auto& [e, c] : terms_) m = std::max(m, BigInt(abs(numerator(c))));
        return m;
    }

    bool has_integer_coefficients() const {
        for (const auto& [e, c] : terms_)
            if (denominator(c) != 1) return false;
        return true;
    }

private:
    void check_same(const Polynomial& o) const {
        if (o.nvars_ != nvars_) throw ArgumentError("polynomials over different variable sets");
    }

    std::size_t nvars_ = 0;
    Terms terms_;
};

}  // namespace nullcone
