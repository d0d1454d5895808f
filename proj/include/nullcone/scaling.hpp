#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <tuple>
#include <limits>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "nullcone/numerics.hpp"
#include "nullcone/tensor.hpp"

namespace nullcone {

// Sum over acted-on axes of ||rho_i - I/n_i||_F^2.
inline double ds(const Tensor& x) {
    double s = 0;
    for (std::size_t i = 1; i < x.order(); ++i) {
        const auto n = static_cast<Eigen::Index>(x.dims()[i]);
        Matrix dev = marginal(x, i) - Matrix::Identity(n, n) / static_cast<double>(n);
        s += dev.squaredNorm();
    }
    return s;
}

inline std::size_t max_party_dim(const Dims& dims) {
    std::size_t m = 0;
    for (std::size_t i = 1; i < dims.size(); ++i) m = std::max(m, dims[i]);
    return m;
}

inline std::size_t min_party_dim(const Dims& dims) {
    std::size_t m = std::numeric_limits<std::size_t>::max();
    for (std::size_t i = 1; i < dims.size(); ++i) m = std::min(m, dims[i]);
    return m;
}

inline void check_eps(const Dims& dims, double eps) {
    Tensor::checked_size(dims);
    const double d = static_cast<double>(dims.size() - 1);
    const double nmax = static_cast<double>(max_party_dim(dims));
    if (!(eps > 0) || eps > d / (nmax * nmax))
        throw ArgumentError("eps must lie in (0, d / max(n_i)^2]");
}

/**
 * Iterations after which a tensor that is still not eps-scaled is certified to
 * be in the null cone: ceil(18 ln2 / (l eps) * d * (b + log2 n)), with l the
 * smallest acted-on dimension and n the total number of entries. Saturates at
 * the largest uint64 value.
 */
inline std::uint64_t iteration_bound(const Dims& dims, unsigned bit_size, double eps) {
    check_eps(dims, eps);
    if (bit_size == 0) throw ArgumentError("bit size must be positive");
    const double d = static_cast<double>(dims.size() - 1);
    double n = 1;
    for (std::size_t k : dims) n *= static_cast<double>(k);
    const double l = static_cast<double>(min_party_dim(dims));
    const double v = std::ceil(18.0 * std::log(2.0) / (l * eps) * d * (bit_size + std::log2(n)));
    if (!(v < 1.8e19)) return std::numeric_limits<std::uint64_t>::max();
    return static_cast<std::uint64_t>(v);
}

// log2 of the instability lower bound n^{-4n} over all null-cone tensors with integer entries.
inline double instability_floor_log2(const Dims& dims) {
    double n = static_cast<double>(Tensor::checked_size(dims));
    return -4.0 * n * std::log2(n);
}

// Clamped to the smallest positive double when the true value underflows.
inline double instability_floor(const Dims& dims) {
    return std::max(std::exp2(instability_floor_log2(dims)), std::numeric_limits<double>::denorm_min());
}

// Per-step guaranteed shrink of ||Y||^2 when the scaled axis deviates by at least eps/d.
inline double norm_decrease_factor(std::size_t n_i, double eps, std::size_t d) {
    return std::exp(-static_cast<double>(n_i) * eps / (6.0 * static_cast<double>(d)));
}

// Largest bit length over real and imaginary parts; at least 1.
inline unsigned bit_size(const Tensor& x) {
    unsigned b = 1;
    if (x.is_integral()) {
        for (const auto& z : x.exact_entries())
            for (const Rational* part : {&z.re, &z.im}) {
                BigInt v = abs(numerator(*part));
                if (v != 0) b = std::max(b, static_cast<unsigned>(boost::multiprecision::msb(v) + 1));
            }
        return b;
    }
    double mx = 0;
    for (const auto& z : x.entries()) mx = std::max({mx, std::abs(z.real()), std::abs(z.imag())});
    return std::max(1u, static_cast<unsigned>(std::ceil(std::log2(mx + 1))));
}

// Clears denominators of an exact tensor; returns the integral multiple and the factor used.
inline std::pair<Tensor, BigInt> integerize(const Tensor& x) {
    BigInt l = 1;
    for (const auto& z : x.exact_entries()) {
        l = detail::lcm_big(l, denominator(z.re));
        l = detail::lcm_big(l, denominator(z.im));
    }
    if (l == 1) return {x, l};
    std::vector<GaussianRational> y;
    for (const auto& z : x.exact_entries()) y.emplace_back(z.re * l, z.im * l);
    return {Tensor::from_exact(x.dims(), std::move(y)), l};
}

enum class Verdict { InNullCone, Scaled };
enum class NullConeReason { SingularMarginal, CapacityBoundViolated, IterationBudgetExhausted };

inline const char* to_string(Verdict v) { return v == Verdict::InNullCone ? "InNullCone" : "Scaled"; }
inline const char* to_string(NullConeReason r) {
    switch (r) {
        case NullConeReason::SingularMarginal: return "SingularMarginal";
        case NullConeReason::CapacityBoundViolated: return "CapacityBoundViolated";
        case NullConeReason::IterationBudgetExhausted: return "IterationBudgetExhausted";
    }
    return "?";
}

// One row per visited iterate; axis is the one of largest deviation there.
struct TraceRow {
    std::uint64_t iter;
    std::size_t axis;
    double ds;
    double norm_sq;
};

struct ScalingOptions {
    double eps = 1e-3;
    std::optional<std::uint64_t> max_iters;
    std::optional<int> truncate_bits;
    bool record_trace = true;
};

struct ScalingOutcome {
    Verdict verdict = Verdict::Scaled;
    std::optional<NullConeReason> reason;
    std::optional<std::size_t> singular_axis;
    // InNullCone: follows from exact data (rank, capacity or full budget).
    // Scaled: eps is at or below the instability floor, so X is not in the null cone.
    bool certified = false;
    Tensor scaled;        // last iterate
    GroupElement group;   // scaled ~= group . (input_multiplier * input)
    BigInt input_multiplier = 1;
    double ds_value = 0;
    std::uint64_t iterations = 0;
    std::uint64_t budget = 0;
    std::uint64_t bound = 0;
    std::vector<TraceRow> trace;
};

inline Rational capacity_lower_bound(const Dims& dims) {
    BigInt p = 1;
    for (std::size_t i = 1; i < dims.size(); ++i) p *= dims[i];
    return Rational(BigInt(1), p * p);
}

/**
 * Alternating scaling. Returns InNullCone when a marginal is singular, when the
 * norm drops below the capacity floor (integral input only), or when the full
 * iteration budget runs out; Scaled once every marginal is within eps/d of
 * uniform. A truncated budget that runs out raises InconclusiveError.
 */
inline ScalingOutcome scale(const Tensor& input, const ScalingOptions& opt = {}) {
    const Dims& dims = input.dims();
    check_eps(dims, opt.eps);
    const std::size_t d = input.parties();

    ScalingOutcome out;
    Tensor x = input;
    if (input.is_exact()) std::tie(x, out.input_multiplier) = integerize(input);
    const bool integral = x.is_integral();
    out.bound = iteration_bound(dims, bit_size(x), opt.eps);
    out.budget = opt.max_iters ? std::min(*opt.max_iters, out.bound) : out.bound;
    for (std::size_t i = 1; i <= d; ++i) {
        const auto n = static_cast<Eigen::Index>(dims[i]);
        out.group.push_back(Matrix::Identity(n, n));
    }

    auto singular = [&](std::size_t axis) {
        out.verdict = Verdict::InNullCone;
        out.reason = NullConeReason::SingularMarginal;
        out.singular_axis = axis;
        out.certified = x.is_exact();
        out.scaled = x;
        out.ds_value = norm_sq(x) > 0 ? ds(x) : 0.0;
        return out;
    };

    if (norm_sq(x) == 0 && (!x.is_exact() || exact_norm_sq(x) == 0)) return singular(1);
    for (std::size_t i = 1; i <= d; ++i) {
        if (x.is_exact()) {
            if (exact_marginal_rank(x, i) < dims[i]) return singular(i);
        } else {
            Matrix rho = marginal(x, i);
            if (is_numerically_singular(herm_eig(rho).values, rho.trace().real())) return singular(i);
        }
    }

    const double floor = to_double(capacity_lower_bound(dims)) * (1 - 1e-9);
    Tensor y = Tensor(x.dims(), std::vector<Complex>(x.entries().begin(), x.entries().end()));
    for (std::uint64_t t = 0;; ++t) {
        const double nrm = norm_sq(y);
        std::vector<Matrix> rho;
        std::size_t best = 1;
        double best_dev = -1, total = 0;
        for (std::size_t i = 1; i <= d; ++i) {
            rho.push_back(marginal_unnormalized(y, i) / nrm);
            const auto n = static_cast<Eigen::Index>(dims[i]);
            const double dev = (rho.back() - Matrix::Identity(n, n) / static_cast<double>(n)).squaredNorm();
            total += dev;
            if (dev > best_dev) best_dev = dev, best = i;
        }
        if (opt.record_trace) out.trace.push_back({t, best, total, nrm});
        out.iterations = t;
        out.ds_value = total;
        out.scaled = y;
        if (best_dev < opt.eps / static_cast<double>(d)) {
            out.verdict = Verdict::Scaled;
            out.certified = x.is_exact() && opt.eps <= instability_floor(dims);
            return out;
        }
        if (integral && nrm < floor) {
            out.verdict = Verdict::InNullCone;
            out.reason = NullConeReason::CapacityBoundViolated;
            out.certified = true;
            return out;
        }
        if (t >= out.budget) break;
        Matrix a;
        try {
            a = scaling_matrix(rho[best - 1], opt.truncate_bits);
        } catch (const SingularMarginalError&) {
            throw NumericalError("marginal " + std::to_string(best) + " became numerically singular at iteration " +
                                 std::to_string(t));
        }
        y = apply_axis(y, a, best);
        out.group[best - 1] = a * out.group[best - 1];
    }
    if (integral && out.budget == out.bound) {
        out.verdict = Verdict::InNullCone;
        out.reason = NullConeReason::IterationBudgetExhausted;
        out.certified = true;
        return out;
    }
    throw InconclusiveError("iteration budget of " + std::to_string(out.budget) +
                            " exhausted before the certified bound of " + std::to_string(out.bound));
}

inline void write_trace_csv(std::ostream& os, const std::vector<TraceRow>& trace) {
    os << "iter,axis,ds,norm_sq\n";
    char buf[128];
    for (const auto& r : trace) {
        std::snprintf(buf, sizeof buf, "%llu,%zu,%.17g,%.17g\n", static_cast<unsigned long long>(r.iter), r.axis,
                      r.ds, r.norm_sq);
        os << buf;
    }
}

}  // namespace nullcone
