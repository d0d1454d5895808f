#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <vector>

#include "nullcone/errors.hpp"
#include "nullcone/rational.hpp"
#include "nullcone/scaling.hpp"
#include "nullcone/tensor.hpp"

namespace nullcone {

inline std::size_t flattening_rank(const Tensor& x, std::size_t axis) {
    check_axis(x, axis);
    return rational_rank(exact_flattening(x, axis));
}

// Side length m of a tensor in Ten(1, m, ..., m).
inline std::size_t cubical_side(const Tensor& x) {
    const auto& dims = x.dims();
    if (dims[0] != 1) throw ArgumentError("slice rank is defined for tensors with a trivial index axis");
    for (std::size_t k = 2; k < dims.size(); ++k)
        if (dims[k] != dims[1]) throw ArgumentError("slice rank needs equal acted-on dimensions");
    if (!x.is_exact()) throw ArgumentError("slice rank needs exact entries");
    return dims[1];
}

inline std::size_t min_flattening_rank(const Tensor& x) {
    std::size_t best = x.dims()[1];
    for (std::size_t k = 1; k < x.order(); ++k) best = std::min(best, flattening_rank(x, k));
    return best;
}

/**
 * Greedy upper bound: repeatedly zero the coordinate slice of largest norm
 * (one slice-rank-one term each), and at every stage also consider finishing
 * with the smallest flattening rank of what is left.
 */
inline std::size_t slice_rank_upper(const Tensor& x) {
    cubical_side(x);
    std::vector<GaussianRational> t(x.exact_entries().begin(), x.exact_entries().end());
    Tensor cur = x;
    std::size_t removed = 0;
    std::size_t best = min_flattening_rank(cur);
    for (;;) {
        bool zero = std::all_of(t.begin(), t.end(), [](const GaussianRational& z) { return z.is_zero(); });
        if (zero) return std::min(best, removed);
        std::size_t best_axis = 0, best_index = 0;
        Rational best_norm = -1;
        for (std::size_t k = 1; k < x.order(); ++k) {
            const std::size_t n = x.dims()[k], out = x.outer(k), in = x.inner(k);
            for (std::size_t j = 0; j < n; ++j) {
                Rational s = 0;
                for (std::size_t o = 0; o < out; ++o)
                    for (std::size_t q = 0; q < in; ++q) s += t[(o * n + j) * in + q].norm_sq();
                if (s > best_norm) best_norm = s, best_axis = k, best_index = j;
            }
        }
        const std::size_t n = x.dims()[best_axis], out = x.outer(best_axis), in = x.inner(best_axis);
        for (std::size_t o = 0; o < out; ++o)
            for (std::size_t q = 0; q < in; ++q) t[(o * n + best_index) * in + q] = GaussianRational(0);
        ++removed;
        cur = Tensor::from_exact(x.dims(), t);
        best = std::min(best, removed + min_flattening_rank(cur));
    }
}

namespace detail {

// Basis (as rows) of the span of the given vectors over Q(i).
inline std::vector<std::vector<GaussianRational>> row_basis(std::vector<std::vector<GaussianRational>> rows) {
    std::vector<std::vector<GaussianRational>> basis;
    if (rows.empty()) return basis;
    const std::size_t n = rows[0].size();
    std::size_t r = 0;
    for (std::size_t c = 0; c < n && r < rows.size(); ++c) {
        std::size_t p = r;
        while (p < rows.size() && rows[p][c].is_zero()) ++p;
        if (p == rows.size()) continue;
        std::swap(rows[p], rows[r]);
        auto inv = rows[r][c].inverse();
        for (std::size_t i = r + 1; i < rows.size(); ++i) {
            if (rows[i][c].is_zero()) continue;
            auto f = rows[i][c] * inv;
            for (std::size_t j = c; j < n; ++j) rows[i][j] -= f * rows[r][j];
        }
        ++r;
    }
    rows.resize(r);
    return rows;
}

/**
 * For 3x3 slices S_l (rows: axis a, columns: axis b), decides whether some
 * plane K and line L satisfy S_l K within L for every l. Valid when no
 * flattening has rank <= 2: then the generic slice combination has rank 2 and
 * K must be the span of the kernels of the rank-2 combinations, i.e. of the
 * adjugate columns of S(c) = sum c_l S_l as polynomials in c.
 */
inline bool compression_2_to_1(const std::vector<ExactMatrix>& slices) {
    using Lin = std::array<GaussianRational, 3>;  // linear form in c
    std::array<std::array<Lin, 3>, 3> s{};
    for (std::size_t l = 0; l < 3; ++l)
        for (std::size_t i = 0; i < 3; ++i)
            for (std::size_t j = 0; j < 3; ++j) s[i][j][l] = slices[l](i, j);
    // Quadratic forms in c over the 6 monomials c_p c_q (p <= q).
    auto mul = [](const Lin& u, const Lin& v) {
        std::array<GaussianRational, 6> out{};
        std::size_t k = 0;
        for (std::size_t p = 0; p < 3; ++p)
            for (std::size_t q = p; q < 3; ++q, ++k) {
                out[k] = u[p] * v[q];
                if (p != q) out[k] += u[q] * v[p];
            }
        return out;
    };
    // adj(S)(i, j) = (-1)^{i+j} minor(j, i)
    std::vector<std::vector<GaussianRational>> kernel_vectors;
    for (std::size_t j = 0; j < 3; ++j) {
        std::array<std::array<GaussianRational, 6>, 3> column{};
        for (std::size_t i = 0; i < 3; ++i) {
            std::size_t r0 = j == 0 ? 1 : 0, r1 = j == 2 ? 1 : 2;
            std::size_t c0 = i == 0 ? 1 : 0, c1 = i == 2 ? 1 : 2;
            auto a = mul(s[r0][c0], s[r1][c1]);
            auto b = mul(s[r0][c1], s[r1][c0]);
            for (std::size_t k = 0; k < 6; ++k) {
                column[i][k] = a[k] - b[k];
                if ((i + j) % 2) column[i][k] = -column[i][k];
            }
        }
        for (std::size_t k = 0; k < 6; ++k) kernel_vectors.push_back({column[0][k], column[1][k], column[2][k]});
    }
    auto k = row_basis(kernel_vectors);
    if (k.size() != 2) return false;
    std::vector<std::vector<GaussianRational>> images;
    for (const auto& sl : slices)
        for (const auto& v : k) {
            std::vector<GaussianRational> img(3);
            for (std::size_t i = 0; i < 3; ++i)
                for (std::size_t j = 0; j < 3; ++j) img[i] += sl(i, j) * v[j];
            images.push_back(std::move(img));
        }
    return row_basis(images).size() <= 1;
}

// Slices along the third axis c of a 1 x 3 x 3 x 3 tensor, as matrices over axes (a, b).
inline std::vector<ExactMatrix> pair_slices(const Tensor& x, std::size_t a, std::size_t b, std::size_t c) {
    std::vector<ExactMatrix> out(3, ExactMatrix(3, 3));
    auto xe = x.exact_entries();
    for (std::size_t f = 0; f < x.size(); ++f) {
        auto mi = x.multi_index(f);
        out[mi[c]](mi[a], mi[b]) = xe[f];
    }
    return out;
}

}  // namespace detail

struct SliceRankResult {
    std::size_t value = 0;
    std::vector<std::size_t> pattern;  // slices used per acted-on axis
};

/**
 * Exact slice rank for m <= 3 and d <= 3. Candidate patterns (r_1..r_d) are
 * tried in order of increasing total; one-axis patterns reduce to flattening
 * ranks and the only mixed pattern below m (m = d = 3, one slice on each of
 * two axes) reduces to a plane-to-line compression of the slice pencil.
 */
inline SliceRankResult slice_rank_exact_small(const Tensor& x) {
    const std::size_t m = cubical_side(x), d = x.parties();
    if (m > 3 || d > 3) throw ResourceError("exact slice rank is limited to m <= 3 and d <= 3");
    SliceRankResult res;
    res.pattern.assign(d, 0);
    bool zero = std::all_of(x.exact_entries().begin(), x.exact_entries().end(),
                            [](const GaussianRational& z) { return z.is_zero(); });
    if (zero) return res;
    std::vector<std::size_t> ranks(d);
    for (std::size_t k = 0; k < d; ++k) ranks[k] = flattening_rank(x, k + 1);
    for (std::size_t r = 1; r <= m; ++r) {
        for (std::size_t k = 0; k < d; ++k)
            if (ranks[k] <= r) {
                res.value = r;
                res.pattern[k] = r;
                return res;
            }
        if (m == 3 && d == 3 && r == 2) {
            const std::array<std::array<std::size_t, 3>, 3> pairs{{{1, 2, 3}, {1, 3, 2}, {2, 3, 1}}};
            for (const auto& p : pairs)
                if (detail::compression_2_to_1(detail::pair_slices(x, p[0], p[1], p[2]))) {
                    res.value = 2;
                    res.pattern[p[0] - 1] = 1;
                    res.pattern[p[1] - 1] = 1;
                    return res;
                }
        }
    }
    res.value = m;
    res.pattern[0] = m;
    return res;
}

// Instability lower bound for tensors with slice rank below m.
inline double instability_from_slice_rank(std::size_t m, std::size_t d) {
    if (m == 0 || d == 0) throw ArgumentError("m and d must be positive");
    const double md = static_cast<double>(m);
    return 1.0 / std::sqrt(static_cast<double>(d) * md * md * md);
}

struct SliceRankReport {
    std::size_t m = 0;
    std::size_t d = 0;
    std::size_t upper = 0;
    std::optional<std::size_t> exact;
    Verdict verdict = Verdict::Scaled;
    std::optional<NullConeReason> reason;
    Verdict power_verdict = Verdict::Scaled;
    std::size_t power_upper = 0;
    double instability_bound = 0;
    // slice rank below m forces the null cone
    bool slice_rank_consistent = true;
    // X and its square agree on null-cone membership
    bool power_consistent = true;
};

/**
 * Scales X and X^{(x)2}, bounds both slice ranks, and checks that slice rank
 * below m implies the null cone and that membership survives the tensor square.
 */
inline SliceRankReport nullcone_vs_slicerank_check(const Tensor& x, double eps = 1e-6) {
    SliceRankReport rep;
    rep.m = cubical_side(x);
    rep.d = x.parties();
    rep.upper = slice_rank_upper(x);
    if (rep.m <= 3 && rep.d <= 3) rep.exact = slice_rank_exact_small(x).value;
    rep.instability_bound = instability_from_slice_rank(rep.m, rep.d);

    ScalingOptions opt;
    opt.eps = std::min(eps, static_cast<double>(rep.d) / static_cast<double>(rep.m * rep.m));
    opt.record_trace = false;
    auto sc = scale(x, opt);
    rep.verdict = sc.verdict;
    rep.reason = sc.reason;

    Tensor sq = tensor_power(x, 2);
    ScalingOptions opt2 = opt;
    opt2.eps = std::min(eps, static_cast<double>(rep.d) / static_cast<double>(rep.m * rep.m * rep.m * rep.m));
    rep.power_verdict = scale(sq, opt2).verdict;
    rep.power_upper = slice_rank_upper(sq);

    const std::size_t sr = rep.exact.value_or(rep.upper);
    rep.slice_rank_consistent = !(sr < rep.m) || rep.verdict == Verdict::InNullCone;
    rep.power_consistent = rep.verdict == rep.power_verdict;
    return rep;
}

}  // namespace nullcone
