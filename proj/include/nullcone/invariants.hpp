#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "nullcone/errors.hpp"
#include "nullcone/polynomial.hpp"
#include "nullcone/rational.hpp"
#include "nullcone/tensor.hpp"

namespace nullcone {

// ---------------------------------------------------------------------------
// Permutations

struct SignedPermutation {
    std::vector<std::size_t> image;
    int sign;
};

inline int permutation_sign(const std::vector<std::size_t>& p) {
    int sign = 1;
    std::vector<bool> seen(p.size(), false);
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (seen[i]) continue;
        std::size_t len = 0;
        for (std::size_t j = i; !seen[j]; j = p[j]) seen[j] = true, ++len;
        if (len % 2 == 0) sign = -sign;
    }
    return sign;
}

inline bool is_permutation_of_range(const std::vector<std::size_t>& p) {
    std::vector<bool> seen(p.size(), false);
    for (std::size_t v : p) {
        if (v >= p.size() || seen[v]) return false;
        seen[v] = true;
    }
    return true;
}

// All permutations of [n] in lexicographic order.
inline const std::vector<SignedPermutation>& all_permutations(std::size_t n) {
    static std::map<std::size_t, std::vector<SignedPermutation>> cache;
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;
    std::vector<SignedPermutation> out;
    std::vector<std::size_t> p(n);
    std::iota(p.begin(), p.end(), 0);
    do out.push_back({p, permutation_sign(p)});
    while (std::next_permutation(p.begin(), p.end()));
    return cache.emplace(n, std::move(out)).first->second;
}

// ---------------------------------------------------------------------------
// Omega process on polynomials in an m x m variable matrix Z (variable i*m + j)

inline std::size_t z_var(std::size_t i, std::size_t j, std::size_t m) { return i * m + j; }

inline Polynomial det_polynomial(std::size_t m) {
    Polynomial p(m * m);
    for (const auto& sp : all_permutations(m)) {
        Exponent e(m * m, 0);
        for (std::size_t i = 0; i < m; ++i) e[z_var(i, sp.image[i], m)] = 1;
        p.add_term(e, Rational(sp.sign));
    }
    return p;
}

inline void check_z_family(const Polynomial& q, std::size_t m) {
    if (m == 0 || q.nvars() != m * m) throw ArgumentError("polynomial is not over an m x m variable matrix");
}

// sum over sigma of sgn(sigma) d^m q / dZ_{1,sigma(1)} ... dZ_{m,sigma(m)}
inline Polynomial omega(const Polynomial& q, std::size_t m) {
    check_z_family(q, m);
    Polynomial out(m * m);
    const auto& perms = all_permutations(m);
    for (const auto& [e, c] : q.terms()) {
        for (const auto& sp : perms) {
            BigInt factor = sp.sign;
            for (std::size_t i = 0; i < m && factor != 0; ++i) factor *= e[z_var(i, sp.image[i], m)];
            if (factor == 0) continue;
            Exponent f = e;
            for (std::size_t i = 0; i < m; ++i) --f[z_var(i, sp.image[i], m)];
            out.add_term(f, c * Rational(factor));
        }
    }
    return out;
}

inline Polynomial omega_power(Polynomial q, std::size_t m, std::size_t r) {
    for (std::size_t k = 0; k < r && !q.is_zero(); ++k) q = omega(q, m);
    return q;
}

inline Rational constant_term(const Polynomial& p) { return p.coefficient(Exponent(p.nvars(), 0)); }

// Omega^r(det^r), the scalar by which the SL(m) Reynolds image of an invariant is scaled.
inline Rational omega_constant(std::size_t m, std::size_t r) {
    return constant_term(omega_power(det_polynomial(m).pow(static_cast<unsigned>(r)), m, r));
}

inline void check_real_square(const ExactMatrix& a, std::size_t m) {
    if (a.rows() != m || a.cols() != m) throw ArgumentError("matrix must be m x m");
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j)
            if (a(i, j).im != 0) throw ArgumentError("matrix must have real rational entries");
}

// (A * q)(Z) = q(A^T Z)
inline Polynomial star(const ExactMatrix& a, const Polynomial& q, std::size_t m) {
    check_z_family(q, m);
    check_real_square(a, m);
    std::vector<Polynomial> images;
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j) {
            Polynomial img(m * m);
            for (std::size_t k = 0; k < m; ++k) img += Polynomial::variable(m * m, z_var(k, j, m)) * a(k, i).re;
            images.push_back(std::move(img));
        }
    return q.substitute(images);
}

// Omega^r(A * q) == det(A)^r Omega^r(q) for q homogeneous of degree r m.
inline bool equivariance_check(const Polynomial& q, const ExactMatrix& a, std::size_t m) {
    check_z_family(q, m);
    check_real_square(a, m);
    if (!q.is_homogeneous() || q.is_zero() || q.degree() % static_cast<long long>(m) != 0)
        throw ArgumentError("equivariance check needs a nonzero homogeneous polynomial of degree divisible by m");
    const std::size_t r = static_cast<std::size_t>(q.degree()) / m;
    Rational det = determinant(a).re, detr = 1;
    for (std::size_t k = 0; k < r; ++k) detr *= det;
    return omega_power(star(a, q, m), m, r) == omega_power(q, m, r) * detr;
}

// Coefficients of Omega^s(p) are bounded by R (deg^m m!)^s for integer p of degree deg.
inline BigInt omega_coefficient_bound(const BigInt& r, std::uint64_t deg, std::size_t m, std::size_t s) {
    BigInt base = boost::multiprecision::pow(BigInt(deg), static_cast<unsigned>(m));
    for (std::size_t k = 2; k <= m; ++k) base *= k;
    return r * boost::multiprecision::pow(base, static_cast<unsigned>(s));
}

// ---------------------------------------------------------------------------
// Rational actions of products of SL(m_k) on C^n

struct ActionFactor {
    std::size_t m = 0;
    std::size_t degree = 0;                   // homogeneous degree of the entries of rho in Z
    std::vector<std::vector<Polynomial>> rho; // n x n, polynomials in m*m variables
};

struct ActionSpec {
    std::size_t n = 0;
    std::vector<ActionFactor> factors;

    // Shapes, homogeneity, integer coefficients, and rho(I) = I.
    void validate() const {
        for (const auto& f : factors) {
            if (f.m == 0 || f.rho.size() != n) throw ArgumentError("action factor has the wrong shape");
            std::vector<Rational> id(f.m * f.m, Rational(0));
            for (std::size_t i = 0; i < f.m; ++i) id[z_var(i, i, f.m)] = 1;
            for (std::size_t a = 0; a < n; ++a) {
                if (f.rho[a].size() != n) throw ArgumentError("action factor has the wrong shape");
                for (std::size_t b = 0; b < n; ++b) {
                    const auto& p = f.rho[a][b];
                    if (p.nvars() != f.m * f.m) throw ArgumentError("action entry over the wrong variables");
                    if (!p.is_zero() && (!p.is_homogeneous() || p.degree() != static_cast<long long>(f.degree)))
                        throw ArgumentError("action entries must be homogeneous of the declared degree");
                    if (!p.has_integer_coefficients()) throw ArgumentError("action entries need integer coefficients");
                    if (p.evaluate(id) != Rational(a == b ? 1 : 0))
                        throw ArgumentError("action does not send the identity to the identity");
                }
            }
        }
    }

    BigInt max_coefficient() const {
        BigInt r = 1;
        for (const auto& f : factors)
            for (const auto& row : f.rho)
                for (const auto& p : row) r = std::max(r, p.max_abs_numerator());
        return r;
    }
};

// SL(n1) x ... x SL(nd) on Ten(n0, ..., nd), one factor per acted-on axis; variables are flat tensor positions.
inline ActionSpec tensor_action(const Dims& dims) {
    const std::size_t n = Tensor::checked_size(dims);
    ActionSpec spec;
    spec.n = n;
    Tensor shape = Tensor::zeros(dims);
    for (std::size_t axis = 1; axis < dims.size(); ++axis) {
        ActionFactor f;
        f.m = dims[axis];
        f.degree = 1;
        f.rho.assign(n, std::vector<Polynomial>(n, Polynomial(f.m * f.m)));
        for (std::size_t a = 0; a < n; ++a) {
            auto ia = shape.multi_index(a);
            for (std::size_t c = 0; c < f.m; ++c) {
                auto ib = ia;
                ib[axis] = c;
                f.rho[a][shape.flat_index(ib)] = Polynomial::variable(f.m * f.m, z_var(ia[axis], c, f.m));
            }
        }
        spec.factors.push_back(std::move(f));
    }
    return spec;
}

/**
 * Reynolds operator of one SL(m) factor: substitute v -> rho(Z)^T v, collect
 * the coefficient of each v-monomial, and apply Omega^{l t} to it. Homogeneous
 * parts of degree not divisible by m map to zero.
 */
inline Polynomial reynolds_sl(const Polynomial& p, const ActionSpec& spec, std::size_t factor,
                              std::size_t max_terms = 2'000'000) {
    if (factor >= spec.factors.size()) throw ArgumentError("factor index out of range");
    if (p.nvars() != spec.n) throw ArgumentError("polynomial is not over the action's variables");
    const auto& f = spec.factors[factor];
    const std::size_t n = spec.n, mm = f.m * f.m, joint = n + mm;

    std::vector<Polynomial> images(n, Polynomial(joint));
    std::size_t widest = 1;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j)
            for (const auto& [ez, c] : f.rho[j][i].terms()) {
                Exponent e(joint, 0);
                e[j] = 1;
                std::copy(ez.begin(), ez.end(), e.begin() + static_cast<std::ptrdiff_t>(n));
                images[i].add_term(e, c);
            }
        widest = std::max(widest, images[i].term_count());
    }

    Polynomial out(n);
    for (long long deg = 0; deg <= p.degree(); ++deg) {
        Polynomial part = p.homogeneous_part(static_cast<std::uint64_t>(deg));
        if (part.is_zero() || deg % static_cast<long long>(f.m) != 0) continue;
        const double est = static_cast<double>(part.term_count()) * std::pow(static_cast<double>(widest), deg);
        if (est > static_cast<double>(max_terms))
            throw ResourceError("Reynolds substitution would expand to about " + std::to_string(est) + " terms");
        const std::size_t lt = f.degree * static_cast<std::size_t>(deg) / f.m;
        Polynomial lifted(joint);
        for (const auto& [e, c] : part.terms()) {
            Exponent le(joint, 0);
            std::copy(e.begin(), e.end(), le.begin());
            lifted.add_term(le, c);
        }
        std::vector<Polynomial> subst(joint);
        for (std::size_t i = 0; i < n; ++i) subst[i] = images[i];
        for (std::size_t k = 0; k < mm; ++k) subst[n + k] = Polynomial::variable(joint, n + k);
        Polynomial expanded = lifted.substitute(subst);

        std::map<Exponent, Polynomial> groups;
        for (const auto& [e, c] : expanded.terms()) {
            Exponent ev(e.begin(), e.begin() + static_cast<std::ptrdiff_t>(n));
            Exponent ez(e.begin() + static_cast<std::ptrdiff_t>(n), e.end());
            auto [it, ins] = groups.try_emplace(ev, Polynomial(mm));
            it->second.add_term(ez, c);
        }
        for (const auto& [ev, zp] : groups) out.add_term(ev, constant_term(omega_power(zp, f.m, lt)));
    }
    return out;
}

// R_{SL(n1)} ... R_{SL(nd)}: the last factor is applied first.
inline Polynomial reynolds_product(const Polynomial& p, const ActionSpec& spec, std::size_t max_terms = 2'000'000) {
    Polynomial q = p;
    for (std::size_t k = spec.factors.size(); k-- > 0 && !q.is_zero();) q = reynolds_sl(q, spec, k, max_terms);
    return q;
}

// l^{sum (m_k^2 - 1)} * max(m_k)^d with l the total degree of the action.
inline BigInt derksen_bound(const ActionSpec& spec) {
    std::size_t l = 0, dimsum = 0, mmax = 1;
    for (const auto& f : spec.factors) {
        l += f.degree;
        dimsum += f.m * f.m - 1;
        mmax = std::max(mmax, f.m);
    }
    if (spec.factors.empty()) return 1;
    return boost::multiprecision::pow(BigInt(l), static_cast<unsigned>(dimsum)) *
           boost::multiprecision::pow(BigInt(mmax), static_cast<unsigned>(spec.factors.size()));
}

// Same formula for the tensor action (l = d), without building the action.
inline BigInt derksen_bound(const Dims& dims) {
    Tensor::checked_size(dims);
    const std::size_t d = dims.size() - 1;
    std::size_t dimsum = 0, mmax = 1;
    for (std::size_t i = 1; i < dims.size(); ++i) dimsum += dims[i] * dims[i] - 1, mmax = std::max(mmax, dims[i]);
    return boost::multiprecision::pow(BigInt(d), static_cast<unsigned>(dimsum)) *
           boost::multiprecision::pow(BigInt(mmax), static_cast<unsigned>(d));
}

// exp(2 d ln(d) max n_i^2) = d^{2 d max n_i^2}
inline BigInt derksen_bound_exp_form(const Dims& dims) {
    Tensor::checked_size(dims);
    const std::size_t d = dims.size() - 1;
    std::size_t mmax = 1;
    for (std::size_t i = 1; i < dims.size(); ++i) mmax = std::max(mmax, dims[i]);
    return boost::multiprecision::pow(BigInt(d), static_cast<unsigned>(2 * d * mmax * mmax));
}

// M (R n^2)^{t m} (l t m^4)^{l t m}
inline BigInt coefficient_bound(const BigInt& big_m, const BigInt& r, std::size_t n, std::size_t t, std::size_t m,
                                std::size_t l) {
    using boost::multiprecision::pow;
    BigInt rn2 = r * BigInt(n) * BigInt(n);
    BigInt ltm4 = BigInt(l) * BigInt(t) * pow(BigInt(m), 4);
    return big_m * pow(rn2, static_cast<unsigned>(t * m)) * pow(ltm4, static_cast<unsigned>(l * t * m));
}

// Per-factor bounds multiplied, starting from a single monomial (M = 1).
inline BigInt coefficient_bound(const ActionSpec& spec, std::size_t degree) {
    const BigInt r = spec.max_coefficient();
    BigInt bound = 1;
    for (const auto& f : spec.factors) {
        const std::size_t t = (degree + f.m - 1) / f.m;
        bound = coefficient_bound(bound, r, spec.n, t, f.m, f.degree);
    }
    return bound;
}

// ---------------------------------------------------------------------------
// Spanning invariants: P(X) = (eps_idx (x) p_{n1,pi1} (x) ... (x) p_{nd,pid})(X^{(x)m})

struct SpanningInvariant {
    std::size_t m = 0;
    std::vector<std::vector<std::size_t>> perms;  // one permutation of [m] per acted-on axis
    std::vector<std::size_t> idx;                 // m values in [n0]
};

namespace detail {

// Index maps J: [m] -> [n] on which the product of block determinants is nonzero, with that value (+-1).
struct FactorMaps {
    std::vector<std::vector<std::size_t>> maps;
    std::vector<int> signs;
};

inline FactorMaps factor_maps(std::size_t n, std::size_t m, const std::vector<std::size_t>& perm) {
    const auto& sn = all_permutations(n);
    const std::size_t blocks = m / n;
    FactorMaps fm;
    std::vector<std::size_t> choice(blocks, 0);
    for (;;) {
        std::vector<std::size_t> j(m);
        int sign = 1;
        for (std::size_t b = 0; b < blocks; ++b) {
            const auto& tau = sn[choice[b]];
            for (std::size_t t = 0; t < n; ++t) j[perm[b * n + t]] = tau.image[t];
            sign *= tau.sign;
        }
        fm.maps.push_back(std::move(j));
        fm.signs.push_back(sign);
        std::size_t b = 0;
        while (b < blocks && ++choice[b] == sn.size()) choice[b++] = 0;
        if (b == blocks) break;
    }
    return fm;
}

inline double term_count(const Dims& dims, std::size_t m) {
    double count = 1;
    for (std::size_t k = 1; k < dims.size(); ++k) {
        double f = std::tgamma(static_cast<double>(dims[k]) + 1);
        count *= std::pow(f, static_cast<double>(m / dims[k]));
    }
    return count;
}

inline void check_invariant(const Tensor& x, const SpanningInvariant& inv) {
    const auto& dims = x.dims();
    if (inv.m == 0) throw ArgumentError("spanning invariants need degree m >= 1");
    for (std::size_t k = 1; k < dims.size(); ++k)
        if (inv.m % dims[k] != 0) throw ArgumentError("degree must be divisible by every acted-on dimension");
    if (inv.perms.size() != x.parties()) throw ArgumentError("need one permutation per acted-on axis");
    for (const auto& p : inv.perms)
        if (p.size() != inv.m || !is_permutation_of_range(p)) throw ArgumentError("invalid permutation of [m]");
    if (inv.idx.size() != inv.m) throw ArgumentError("need m index values");
    for (std::size_t v : inv.idx)
        if (v >= dims[0]) throw ArgumentError("index value out of range for axis 0");
}

/**
 * Sums prod_alpha X[idx_alpha, J_1(alpha), ..., J_d(alpha)] * prod_k sign_k over
 * index maps with nonzero determinant products. T is the accumulator type;
 * get(flat) returns the entry as T.
 */
template <class T, class Get>
T spanning_sum(const Tensor& x, const SpanningInvariant& inv, Get get, double max_terms) {
    check_invariant(x, inv);
    const auto& dims = x.dims();
    const std::size_t d = x.parties(), m = inv.m;
    const double count = term_count(dims, m);
    if (count > max_terms)
        throw ResourceError("spanning invariant has " + std::to_string(count) + " nonzero index-map terms");
    std::vector<FactorMaps> fms;
    std::vector<std::size_t> stride(dims.size(), 1);
    for (std::size_t a = dims.size() - 1; a-- > 0;) stride[a] = stride[a + 1] * dims[a + 1];
    // contrib[k][c][alpha]: offset of factor k's map c at position alpha.
    std::vector<std::vector<std::vector<std::size_t>>> contrib(d);
    for (std::size_t k = 0; k < d; ++k) {
        fms.push_back(factor_maps(dims[k + 1], m, inv.perms[k]));
        for (const auto& j : fms.back().maps) {
            std::vector<std::size_t> off(m);
            for (std::size_t a = 0; a < m; ++a) off[a] = j[a] * stride[k + 1];
            contrib[k].push_back(std::move(off));
        }
    }
    std::vector<std::size_t> base(m);
    for (std::size_t a = 0; a < m; ++a) base[a] = inv.idx[a] * stride[0];

    T sum(0);
    std::vector<std::size_t> choice(d, 0);
    for (;;) {
        int sign = 1;
        for (std::size_t k = 0; k < d; ++k) sign *= fms[k].signs[choice[k]];
        T prod(sign);
        for (std::size_t a = 0; a < m; ++a) {
            std::size_t f = base[a];
            for (std::size_t k = 0; k < d; ++k) f += contrib[k][choice[k]][a];
            const T v = get(f);
            if (v == T(0)) {
                prod = T(0);
                break;
            }
            prod *= v;
        }
        if (!(prod == T(0))) sum += prod;
        std::size_t k = 0;
        while (k < d && ++choice[k] == fms[k].maps.size()) choice[k++] = 0;
        if (k == d) break;
    }
    return sum;
}

}  // namespace detail

inline constexpr double kSpanningTermBudget = 5e7;

// Floating evaluation.
inline Complex schur_weyl_eval(const Tensor& x, const SpanningInvariant& inv) {
    return detail::spanning_sum<Complex>(x, inv, [&](std::size_t f) { return x[f]; }, kSpanningTermBudget);
}

// Exact evaluation; machine integers when every partial sum provably fits.
inline GaussianRational schur_weyl_eval_exact(const Tensor& x, const SpanningInvariant& inv) {
    auto xe = x.exact_entries();
    if (x.is_integral()) {
        long double mx = 0;
        std::vector<std::complex<long long>> small(x.size());
        bool fits = true;
        for (std::size_t f = 0; f < x.size() && fits; ++f) {
            const auto& re = numerator(xe[f].re);
            const auto& im = numerator(xe[f].im);
            if (abs(re) > BigInt(1) << 30 || abs(im) > BigInt(1) << 30) fits = false;
            else {
                small[f] = {re.convert_to<long long>(), im.convert_to<long long>()};
                mx = std::max({mx, std::fabs(static_cast<long double>(small[f].real())),
                               std::fabs(static_cast<long double>(small[f].imag()))});
            }
        }
        if (fits) {
            const long double bound = static_cast<long double>(detail::term_count(x.dims(), inv.m)) *
                                      std::pow(2 * mx, static_cast<long double>(inv.m));
            if (bound < 4e18L) {
                auto s = detail::spanning_sum<std::complex<long long>>(
                    x, inv, [&](std::size_t f) { return small[f]; }, kSpanningTermBudget);
                return GaussianRational(Rational(s.real()), Rational(s.imag()));
            }
        }
    }
    return detail::spanning_sum<GaussianRational>(x, inv, [&](std::size_t f) { return xe[f]; }, kSpanningTermBudget);
}

// (n1 ... nd)^m ||X||^m
inline double schur_weyl_bound(const Tensor& x, std::size_t m) {
    double p = 1;
    for (std::size_t k = 1; k < x.order(); ++k) p *= static_cast<double>(x.dims()[k]);
    return std::pow(p * std::sqrt(norm_sq(x)), static_cast<double>(m));
}

// ---------------------------------------------------------------------------
// Algebraic null-cone search

inline std::uint64_t splitmix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Fisher-Yates with an explicit modulo draw so runs are reproducible across standard libraries.
inline std::vector<std::size_t> random_permutation(std::size_t m, std::mt19937_64& rng) {
    std::vector<std::size_t> p(m);
    std::iota(p.begin(), p.end(), 0);
    for (std::size_t i = m; i-- > 1;) std::swap(p[i], p[rng() % (i + 1)]);
    return p;
}

inline SpanningInvariant random_spanning_invariant(const Dims& dims, std::size_t m, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    SpanningInvariant inv;
    inv.m = m;
    for (std::size_t k = 1; k < dims.size(); ++k) inv.perms.push_back(random_permutation(m, rng));
    for (std::size_t a = 0; a < m; ++a) inv.idx.push_back(rng() % dims[0]);
    return inv;
}

// Permutations listing the blocks of each set partition of [m] into blocks of size n (blocks and entries ascending).
inline std::vector<std::vector<std::size_t>> block_partitions(std::size_t m, std::size_t n) {
    std::vector<std::vector<std::size_t>> out;
    std::vector<std::size_t> cur;
    std::vector<bool> used(m, false);
    auto rec = [&](auto&& self) -> void {
        if (cur.size() == m) {
            out.push_back(cur);
            return;
        }
        std::size_t first = 0;
        while (used[first]) ++first;
        used[first] = true;
        cur.push_back(first);
        std::vector<std::size_t> rest;
        for (std::size_t v = first + 1; v < m; ++v)
            if (!used[v]) rest.push_back(v);
        // choose n - 1 companions from rest, ascending
        std::vector<std::size_t> pick;
        auto choose = [&](auto&& ch, std::size_t from) -> void {
            if (pick.size() == n - 1) {
                for (std::size_t v : pick) used[v] = true, cur.push_back(v);
                self(self);
                for (std::size_t v : pick) used[v] = false, cur.pop_back();
                return;
            }
            for (std::size_t q = from; q < rest.size(); ++q) {
                pick.push_back(rest[q]);
                ch(ch, q + 1);
                pick.pop_back();
            }
        };
        choose(choose, 0);
        cur.pop_back();
        used[first] = false;
    };
    rec(rec);
    return out;
}

enum class AlgebraicVerdict { NotInNullCone, NoWitnessFound, InNullCone };

inline const char* to_string(AlgebraicVerdict v) {
    switch (v) {
        case AlgebraicVerdict::NotInNullCone: return "NotInNullCone";
        case AlgebraicVerdict::NoWitnessFound: return "NoWitnessFound";
        case AlgebraicVerdict::InNullCone: return "InNullCone";
    }
    return "?";
}

struct AlgebraicWitness {
    enum class Kind { Spanning, Reynolds } kind = Kind::Spanning;
    SpanningInvariant invariant;  // Spanning
    Exponent monomial;            // Reynolds: the monomial whose image is nonzero at X
    GaussianRational value;
};

struct AlgebraicOptions {
    std::size_t degree_cap = 0;
    std::size_t samples = 16;
    std::uint64_t seed = 0;
    // Enumerate every spanning invariant (and, when tiny, every Reynolds image) per degree.
    bool exhaustive = false;
    double budget = 2e7;                 // evaluation terms per degree
    std::size_t reynolds_monomials = 64; // Reynolds stage runs when at most this many monomials
};

struct AlgebraicOutcome {
    AlgebraicVerdict verdict = AlgebraicVerdict::NoWitnessFound;
    std::optional<AlgebraicWitness> witness;
    std::vector<std::size_t> degrees_checked;
    // Degrees where no weight-zero monomial is supported on X, so every invariant vanishes there.
    std::vector<std::size_t> degrees_pruned;
    // Randomized mode only: degrees whose single evaluation exceeds the budget.
    std::vector<std::size_t> degrees_skipped;
    std::uint64_t evaluations = 0;
};

namespace detail {

inline std::size_t lcm_of_parties(const Dims& dims) {
    std::size_t l = 1;
    for (std::size_t k = 1; k < dims.size(); ++k) l = std::lcm(l, dims[k]);
    return l;
}

/**
 * Visits, in lexicographic order, the exponent vectors over `vars` (flat tensor
 * positions) of total degree D whose torus weight is zero: every index j of
 * acted-on axis k occurs exactly D / n_k times. visit returns true to stop.
 * Returns false if more than max_nodes search nodes were needed.
 */
template <class Visit>
bool weight_zero_monomials(const Tensor& shape, const std::vector<std::size_t>& vars, std::size_t degree,
                           std::size_t max_nodes, Visit visit) {
    const auto& dims = shape.dims();
    std::vector<std::vector<std::size_t>> cap(dims.size());
    for (std::size_t k = 1; k < dims.size(); ++k) cap[k].assign(dims[k], degree / dims[k]);
    std::vector<std::vector<std::size_t>> index;
    for (std::size_t v : vars) index.push_back(shape.multi_index(v));
    Exponent e(shape.size(), 0);
    std::size_t nodes = 0;
    bool stop = false, exceeded = false;
    auto rec = [&](auto&& self, std::size_t pos, std::size_t left) -> void {
        if (stop || exceeded) return;
        if (++nodes > max_nodes) {
            exceeded = true;
            return;
        }
        if (left == 0) {
            stop = visit(e);
            return;
        }
        if (pos == vars.size()) return;
        std::size_t most = left;
        for (std::size_t k = 1; k < dims.size(); ++k) most = std::min(most, cap[k][index[pos][k]]);
        for (std::size_t c = 0; c <= most && !stop && !exceeded; ++c) {
            if (c == 0) {
                self(self, pos + 1, left);
                continue;
            }
            for (std::size_t k = 1; k < dims.size(); ++k) cap[k][index[pos][k]] -= c;
            e[vars[pos]] = static_cast<std::uint32_t>(c);
            self(self, pos + 1, left - c);
            e[vars[pos]] = 0;
            for (std::size_t k = 1; k < dims.size(); ++k) cap[k][index[pos][k]] += c;
        }
    };
    rec(rec, 0, degree);
    return !exceeded;
}

}  // namespace detail

/**
 * Searches for an invariant that does not vanish at X, degree by degree up to
 * degree_cap (multiples of lcm(n_k) only). Randomized mode evaluates `samples`
 * random spanning invariants per degree. Exhaustive mode first prunes degrees
 * with no weight-zero monomial supported on X, then enumerates all spanning
 * invariants (first permutation fixed, later ones up to block reordering) and,
 * for tiny instances, the Reynolds image of every weight-zero monomial.
 * NoWitnessFound becomes InNullCone only for an exhaustive run with
 * degree_cap at least the degree bound for generators.
 */
inline AlgebraicOutcome nullcone_algebraic(const Tensor& x, const AlgebraicOptions& opt) {
    if (!x.is_exact()) throw ArgumentError("algebraic null-cone search needs exact entries");
    const auto& dims = x.dims();
    const std::size_t step = detail::lcm_of_parties(dims);
    AlgebraicOutcome out;

    std::vector<std::size_t> supp_vars, all_vars(x.size());
    std::iota(all_vars.begin(), all_vars.end(), 0);
    for (std::size_t f = 0; f < x.size(); ++f)
        if (!x.exact_entries()[f].is_zero()) supp_vars.push_back(f);

    auto found = [&](AlgebraicWitness w) {
        out.verdict = AlgebraicVerdict::NotInNullCone;
        out.witness = std::move(w);
        return out;
    };

    std::optional<ActionSpec> action;
    for (std::size_t m = step; m <= opt.degree_cap; m += step) {
        out.degrees_checked.push_back(m);
        const double per_eval = detail::term_count(dims, m);
        if (!opt.exhaustive) {
            if (per_eval > opt.budget) {
                out.degrees_skipped.push_back(m);
                continue;
            }
            for (std::size_t s = 0; s < opt.samples; ++s) {
                const std::uint64_t seed = splitmix64(opt.seed ^ splitmix64((static_cast<std::uint64_t>(m) << 32) + s));
                auto inv = random_spanning_invariant(dims, m, seed);
                ++out.evaluations;
                auto v = schur_weyl_eval_exact(x, inv);
                if (!v.is_zero()) return found({AlgebraicWitness::Kind::Spanning, inv, {}, v});
            }
            continue;
        }

        bool any = false;
        const bool searched = detail::weight_zero_monomials(x, supp_vars, m, 1'000'000, [&](const Exponent&) {
            any = true;
            return true;
        });
        if (searched && !any) {
            out.degrees_pruned.push_back(m);
            continue;
        }

        std::vector<std::vector<std::vector<std::size_t>>> choices(x.parties());
        double count = std::pow(static_cast<double>(dims[0]), static_cast<double>(m));
        std::vector<std::size_t> ident(m);
        std::iota(ident.begin(), ident.end(), 0);
        choices[0] = {ident};
        for (std::size_t k = 1; k < x.parties(); ++k) {
            choices[k] = block_partitions(m, dims[k + 1]);
            count *= static_cast<double>(choices[k].size());
        }
        if (count * per_eval > opt.budget)
            throw ResourceError("exhaustive search at degree " + std::to_string(m) + " needs " +
                                std::to_string(count) + " spanning invariants of " + std::to_string(per_eval) +
                                " terms each");
        std::vector<std::size_t> pick(x.parties(), 0), idx(m, 0);
        for (bool more_idx = true; more_idx;) {
            std::fill(pick.begin(), pick.end(), 0);
            for (bool more = true; more;) {
                SpanningInvariant inv;
                inv.m = m;
                inv.idx = idx;
                for (std::size_t k = 0; k < x.parties(); ++k) inv.perms.push_back(choices[k][pick[k]]);
                ++out.evaluations;
                auto v = schur_weyl_eval_exact(x, inv);
                if (!v.is_zero()) return found({AlgebraicWitness::Kind::Spanning, inv, {}, v});
                std::size_t k = 0;
                while (k < pick.size() && ++pick[k] == choices[k].size()) pick[k++] = 0;
                more = k < pick.size();
            }
            std::size_t a = 0;
            while (a < m && ++idx[a] == dims[0]) idx[a++] = 0;
            more_idx = a < m;
        }

        std::vector<Exponent> monomials;
        const bool listed = detail::weight_zero_monomials(x, all_vars, m, 100'000, [&](const Exponent& e) {
            monomials.push_back(e);
            return monomials.size() > opt.reynolds_monomials;
        });
        if (listed && monomials.size() <= opt.reynolds_monomials) {
            if (!action) action = tensor_action(dims);
            std::vector<GaussianRational> point(x.exact_entries().begin(), x.exact_entries().end());
            for (const auto& mono : monomials) {
                auto r = reynolds_product(Polynomial::monomial(mono), *action);
                ++out.evaluations;
                GaussianRational v(0);
                for (const auto& [e, c] : r.terms()) {
                    GaussianRational t(c);
                    for (std::size_t q = 0; q < e.size() && !t.is_zero(); ++q)
                        for (std::uint32_t p = 0; p < e[q]; ++p) t *= point[q];
                    v += t;
                }
                if (!v.is_zero()) return found({AlgebraicWitness::Kind::Reynolds, {}, mono, v});
            }
        }
    }
    if (opt.exhaustive && BigInt(opt.degree_cap) >= derksen_bound(dims)) out.verdict = AlgebraicVerdict::InNullCone;
    return out;
}

}  // namespace nullcone
