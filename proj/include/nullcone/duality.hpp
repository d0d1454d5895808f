#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "nullcone/lp.hpp"
#include "nullcone/numerics.hpp"
#include "nullcone/scaling.hpp"
#include "nullcone/tensor.hpp"

namespace nullcone {

// n * det(rho)^{1/n}: the least value of ||A.Y||^2 over det-one A on the axis with marginal rho.
inline double local_min_value(const Matrix& rho, std::size_t n) {
    if (rho.rows() != static_cast<Eigen::Index>(n) || rho.cols() != static_cast<Eigen::Index>(n))
        throw ArgumentError("marginal size does not match n");
    const auto eig = herm_eig(rho);
    if (eig.values.minCoeff() <= 0) return 0.0;
    double log_sum = 0;
    for (Eigen::Index k = 0; k < eig.values.size(); ++k) log_sum += std::log(eig.values(k));
    return static_cast<double>(n) * std::exp(log_sum / static_cast<double>(n));
}

struct CapacityEstimate {
    double value = 0;
    std::vector<double> history;  // ||Y||^2 after each step, starting with the input
    std::string note;
};

/**
 * Cyclic sweeps of the closed-form single-axis minimization. A step that
 * would not lower the norm (rounding at a fixed point) is skipped, so the
 * history never increases.
 */
inline CapacityEstimate capacity_estimate(const Tensor& x, std::size_t sweeps) {
    CapacityEstimate est;
    est.history.push_back(norm_sq(x));
    for (std::size_t i = 1; i < x.order(); ++i) {
        bool sing = false;
        if (x.is_exact()) {
            sing = exact_marginal_rank(x, i) < x.dims()[i];
        } else if (est.history[0] == 0) {
            sing = true;
        } else {
            Matrix rho = marginal(x, i);
            sing = is_numerically_singular(herm_eig(rho).values, rho.trace().real());
        }
        if (sing) {
            est.note = "marginal " + std::to_string(i) + " is singular; capacity is 0";
            return est;
        }
    }
    Tensor y(x.dims(), std::vector<Complex>(x.entries().begin(), x.entries().end()));
    for (std::size_t s = 0; s < sweeps; ++s)
        for (std::size_t i = 1; i < x.order(); ++i) {
            Matrix a;
            try {
                a = scaling_matrix(marginal_unnormalized(y, i));
            } catch (const SingularMarginalError&) {
                est.note = "marginal " + std::to_string(i) + " became numerically singular; capacity is 0";
                est.value = 0;
                return est;
            }
            Tensor next = apply_axis(y, a, i);
            const double v = norm_sq(next);
            if (v <= est.history.back()) {
                y = std::move(next);
                est.history.push_back(v);
            } else {
                est.history.push_back(est.history.back());
            }
        }
    est.value = est.history.back();
    return est;
}

// Integer weights a[i][j], one row per acted-on axis.
struct DeficiencyCertificate {
    std::vector<std::vector<BigInt>> a;
};

struct DeficiencyResult {
    bool deficient = false;
    std::optional<DeficiencyCertificate> certificate;
    // Otherwise: nonnegative weights on the support tuples with uniform marginals 1/n_i.
    std::vector<Rational> witness;
};

// Rows sum to zero and every support tuple collects weight at least one.
inline bool verify_certificate(const Support& s, const DeficiencyCertificate& cert) {
    if (cert.a.size() != s.dims.size()) return false;
    for (std::size_t i = 0; i < s.dims.size(); ++i) {
        if (cert.a[i].size() != s.dims[i]) return false;
        BigInt row = 0;
        for (const auto& v : cert.a[i]) row += v;
        if (row != 0) return false;
    }
    for (const auto& t : s.tuples) {
        BigInt sum = 0;
        for (std::size_t i = 0; i < t.size(); ++i) sum += cert.a[i][t[i]];
        if (sum < 1) return false;
    }
    return true;
}

inline bool verify_witness(const Support& s, const std::vector<Rational>& w) {
    if (w.size() != s.tuples.size()) return false;
    for (const auto& v : w)
        if (v < 0) return false;
    for (std::size_t i = 0; i < s.dims.size(); ++i) {
        std::vector<Rational> marg(s.dims[i]);
        for (std::size_t k = 0; k < w.size(); ++k) marg[s.tuples[k][i]] += w[k];
        for (const auto& v : marg)
            if (v != Rational(BigInt(1), BigInt(s.dims[i]))) return false;
    }
    return true;
}

namespace detail {

inline std::vector<std::size_t> axis_offsets(const Dims& dims) {
    std::vector<std::size_t> off(dims.size() + 1, 0);
    for (std::size_t i = 0; i < dims.size(); ++i) off[i + 1] = off[i] + dims[i];
    return off;
}

}  // namespace detail

/**
 * Decides whether some weights with zero row sums give every tuple of s total
 * weight at least one. Feasible: an integer certificate (verified exactly).
 * Infeasible: the alternative, a distribution on s with uniform marginals.
 */
inline DeficiencyResult is_deficient(Support s) {
    s.normalize();
    const auto off = detail::axis_offsets(s.dims);
    const std::size_t nw = off.back(), nt = s.tuples.size();
    // Variables: a+ (nw), a- (nw), one surplus per tuple.
    lp::Problem p;
    p.num_vars = 2 * nw + nt;
    for (std::size_t i = 0; i < s.dims.size(); ++i) {
        std::vector<Rational> row(p.num_vars);
        for (std::size_t j = 0; j < s.dims[i]; ++j) row[off[i] + j] = 1, row[nw + off[i] + j] = -1;
        p.add_row(std::move(row), 0);
    }
    for (std::size_t k = 0; k < nt; ++k) {
        std::vector<Rational> row(p.num_vars);
        for (std::size_t i = 0; i < s.dims.size(); ++i) {
            row[off[i] + s.tuples[k][i]] += 1;
            row[nw + off[i] + s.tuples[k][i]] -= 1;
        }
        row[2 * nw + k] = -1;
        p.add_row(std::move(row), 1);
    }
    DeficiencyResult res;
    auto sol = lp::solve(p);
    if (sol.status == lp::Status::Optimal) {
        std::vector<Rational> a(nw);
        BigInt l = 1;
        for (std::size_t k = 0; k < nw; ++k) {
            a[k] = sol.x[k] - sol.x[nw + k];
            l = detail::lcm_big(l, denominator(a[k]));
        }
        DeficiencyCertificate cert;
        for (std::size_t i = 0; i < s.dims.size(); ++i) {
            cert.a.emplace_back();
            for (std::size_t j = 0; j < s.dims[i]; ++j) cert.a[i].push_back(numerator(Rational(a[off[i] + j] * l)));
        }
        if (!verify_certificate(s, cert)) throw NumericalError("deficiency certificate failed exact verification");
        res.deficient = true;
        res.certificate = std::move(cert);
        return res;
    }
    lp::Problem q;
    q.num_vars = nt;
    for (std::size_t i = 0; i < s.dims.size(); ++i)
        for (std::size_t j = 0; j < s.dims[i]; ++j) {
            std::vector<Rational> row(nt);
            for (std::size_t k = 0; k < nt; ++k)
                if (s.tuples[k][i] == j) row[k] = 1;
            q.add_row(std::move(row), Rational(BigInt(1), BigInt(s.dims[i])));
        }
    auto dual = lp::solve(q);
    if (dual.status != lp::Status::Optimal || !verify_witness(s, dual.x))
        throw NumericalError("neither a deficiency certificate nor a uniform-marginal witness was found");
    res.witness = std::move(dual.x);
    return res;
}

/**
 * max t subject to zero row sums, |a| <= 1 and every tuple weight >= t.
 * Positive exactly when s is deficient; zero otherwise.
 */
inline Rational unnormalized_deficiency_optimum(Support s) {
    s.normalize();
    const auto off = detail::axis_offsets(s.dims);
    const std::size_t nw = off.back(), nt = s.tuples.size();
    // Variables: a+ (nw), a- (nw), box slacks (2 nw), t+, t-, one surplus per tuple.
    const std::size_t tp = 4 * nw, tm = tp + 1, sur = tp + 2;
    lp::Problem p;
    p.num_vars = sur + nt;
    for (std::size_t i = 0; i < s.dims.size(); ++i) {
        std::vector<Rational> row(p.num_vars);
        for (std::size_t j = 0; j < s.dims[i]; ++j) row[off[i] + j] = 1, row[nw + off[i] + j] = -1;
        p.add_row(std::move(row), 0);
    }
    for (std::size_t k = 0; k < 2 * nw; ++k) {
        std::vector<Rational> row(p.num_vars);
        row[k] = 1;
        row[2 * nw + k] = 1;
        p.add_row(std::move(row), 1);
    }
    for (std::size_t k = 0; k < nt; ++k) {
        std::vector<Rational> row(p.num_vars);
        for (std::size_t i = 0; i < s.dims.size(); ++i) {
            row[off[i] + s.tuples[k][i]] += 1;
            row[nw + off[i] + s.tuples[k][i]] -= 1;
        }
        row[tp] = -1;
        row[tm] = 1;
        row[sur + k] = -1;
        p.add_row(std::move(row), 0);
    }
    p.c.assign(p.num_vars, Rational(0));
    p.c[tp] = -1;
    p.c[tm] = 1;
    auto sol = lp::solve(p);
    if (sol.status != lp::Status::Optimal) throw NumericalError("bounded deficiency program did not solve");
    return -sol.objective;
}

struct DeficiencyValue {
    // 1/||a|| for a feasible a; a certified lower bound within tolerance of the optimum.
    double value = 0;
    // 1/sqrt(2 * dual value); the optimum lies in [value, upper].
    double upper = 0;
    bool deficient = false;
    bool converged = true;
    std::vector<std::vector<double>> a;
};

/**
 * Largest min over tuples of sum_i a[i][j_i] / ||a|| over zero-row-sum a,
 * i.e. 1/||a*|| for the least-norm a* with every tuple weight >= 1. Solved by
 * exact dual coordinate ascent on the multipliers (Hildreth). For supports that
 * are not deficient the bounded program's optimum (<= 0) is returned.
 */
inline DeficiencyValue deficiency_value(Support s, double rel_tol = 1e-8, std::size_t max_sweeps = 2'000'000) {
    s.normalize();
    DeficiencyValue out;
    if (s.tuples.empty()) {
        out.value = out.upper = std::numeric_limits<double>::infinity();
        out.deficient = true;
        for (std::size_t n : s.dims) out.a.emplace_back(n, 0.0);
        return out;
    }
    if (!is_deficient(s).deficient) {
        out.value = out.upper = to_double(unnormalized_deficiency_optimum(s));
        return out;
    }
    out.deficient = true;
    const auto off = detail::axis_offsets(s.dims);
    const std::size_t nw = off.back(), nt = s.tuples.size();
    // Constraint normals projected onto the zero-row-sum subspace.
    std::vector<std::vector<double>> h(nt, std::vector<double>(nw));
    double hnorm = 0;
    for (std::size_t i = 0; i < s.dims.size(); ++i) hnorm += 1.0 - 1.0 / static_cast<double>(s.dims[i]);
    for (std::size_t k = 0; k < nt; ++k)
        for (std::size_t i = 0; i < s.dims.size(); ++i)
            for (std::size_t j = 0; j < s.dims[i]; ++j)
                h[k][off[i] + j] = (j == s.tuples[k][i] ? 1.0 : 0.0) - 1.0 / static_cast<double>(s.dims[i]);
    auto dot = [](const std::vector<double>& u, const std::vector<double>& v) {
        double r = 0;
        for (std::size_t q = 0; q < u.size(); ++q) r += u[q] * v[q];
        return r;
    };
    std::vector<double> lambda(nt, 0.0), a(nw, 0.0);
    double best_upper_norm = std::numeric_limits<double>::infinity();
    std::vector<double> best_a;
    out.converged = false;
    for (std::size_t sweep = 0; sweep < max_sweeps; ++sweep) {
        for (std::size_t k = 0; k < nt; ++k) {
            double delta = std::max(-lambda[k], (1.0 - dot(h[k], a)) / hnorm);
            if (delta == 0) continue;
            lambda[k] += delta;
            for (std::size_t q = 0; q < nw; ++q) a[q] += delta * h[k][q];
        }
        double mn = std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < nt; ++k) mn = std::min(mn, dot(h[k], a));
        if (!(mn > 0)) continue;
        const double norm2 = dot(a, a);
        const double feasible_norm2 = norm2 / (mn * mn);
        if (feasible_norm2 < best_upper_norm) {
            best_upper_norm = feasible_norm2;
            best_a = a;
            for (double& v : best_a) v /= mn;
        }
        double lsum = 0;
        for (double l : lambda) lsum += l;
        const double lower_norm2 = 2 * lsum - norm2;
        if (lower_norm2 > 0) out.upper = 1 / std::sqrt(lower_norm2);
        if (best_upper_norm - lower_norm2 <= rel_tol * best_upper_norm) {
            out.converged = true;
            break;
        }
    }
    if (best_a.empty()) throw NumericalError("least-norm iteration found no feasible point");
    out.value = 1 / std::sqrt(best_upper_norm);
    for (std::size_t i = 0; i < s.dims.size(); ++i)
        out.a.emplace_back(best_a.begin() + static_cast<std::ptrdiff_t>(off[i]),
                           best_a.begin() + static_cast<std::ptrdiff_t>(off[i + 1]));
    return out;
}

// Best deficiency over the supports of B.X for the identity and each supplied basis change.
template <class Mat = Matrix>
double instability_lower_bound(const Tensor& x, const std::vector<std::vector<Mat>>& bases = {}) {
    double best = deficiency_value(support(x)).value;
    for (const auto& b : bases) best = std::max(best, deficiency_value(support(act(x, b))).value);
    return best;
}

enum class InstabilityVerdict { NotInNullCone, InstabilityAtLeastEps };

inline const char* to_string(InstabilityVerdict v) {
    return v == InstabilityVerdict::NotInNullCone ? "NotInNullCone" : "InstabilityAtLeastEps";
}

struct InstabilityOutcome {
    InstabilityVerdict verdict;
    ScalingOutcome scaling;
};

// Scaling with precision eps^2: ds below it means not in the null cone, otherwise ins(X) >= eps.
inline InstabilityOutcome eps_instability(const Tensor& x, double eps, std::optional<std::uint64_t> max_iters = {}) {
    ScalingOptions opt;
    opt.eps = eps * eps;
    opt.max_iters = max_iters;
    opt.record_trace = false;
    auto sc = scale(x, opt);
    const bool scaled = sc.verdict == Verdict::Scaled && sc.ds_value < eps * eps;
    return {scaled ? InstabilityVerdict::NotInNullCone : InstabilityVerdict::InstabilityAtLeastEps, std::move(sc)};
}

}  // namespace nullcone
