#pragma once

// Independent reference computations used to derive expected values in tests.

#include <complex>
#include <functional>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "nullcone/invariants.hpp"
#include "nullcone/rational.hpp"
#include "nullcone/tensor.hpp"

namespace oracle {

using nullcone::Complex;
using nullcone::Dims;
using nullcone::GaussianRational;
using nullcone::Matrix;
using nullcone::Rational;
using nullcone::Tensor;

inline Tensor random_int_tensor(const Dims& dims, long long lo, long long hi, std::mt19937_64& rng) {
    std::uniform_int_distribution<long long> u(lo, hi);
    std::vector<long long> v(Tensor::checked_size(dims));
    for (auto& e : v) e = u(rng);
    return Tensor::from_integers(dims, v);
}

inline Tensor random_float_tensor(const Dims& dims, std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    std::vector<Complex> v(Tensor::checked_size(dims));
    for (auto& e : v) e = Complex(g(rng), g(rng));
    return Tensor(dims, v);
}

inline Matrix random_matrix(std::size_t n, std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    Matrix a(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) a(i, j) = Complex(g(rng), g(rng));
    return a;
}

inline Matrix random_hermitian(std::size_t n, std::mt19937_64& rng) {
    Matrix a = random_matrix(n, rng);
    return (a + a.adjoint()) / 2.0;
}

inline Matrix random_unitary(std::size_t n, std::mt19937_64& rng) {
    Eigen::HouseholderQR<Matrix> qr(random_matrix(n, rng));
    return qr.householderQ();
}

// Random complex matrix rescaled to determinant one.
inline Matrix random_sl(std::size_t n, std::mt19937_64& rng, double spread = 1.0) {
    Matrix a = Matrix::Identity(n, n) + spread * random_matrix(n, rng) / std::sqrt(double(n));
    Complex det = a.determinant();
    return a / std::pow(det, 1.0 / double(n));
}

// Exact SL element as a product of integer shears.
inline nullcone::ExactMatrix random_exact_sl(std::size_t n, std::mt19937_64& rng, int steps = 4) {
    std::uniform_int_distribution<int> pick(0, int(n) - 1), shift(-2, 2);
    nullcone::ExactMatrix a = nullcone::ExactMatrix::identity(n);
    if (n == 1) return a;
    for (int s = 0; s < steps; ++s) {
        int i = pick(rng), j = pick(rng);
        if (i == j) continue;
        nullcone::ExactMatrix e = nullcone::ExactMatrix::identity(n);
        e(i, j) = GaussianRational(shift(rng));
        a = e * a;
    }
    return a;
}

// rho(j, j') summed over all entry pairs that differ at most in the given axis.
inline Matrix marginal(const Tensor& x, std::size_t axis) {
    const std::size_t n = x.dims()[axis];
    Matrix rho = Matrix::Zero(n, n);
    double total = 0;
    for (std::size_t f = 0; f < x.size(); ++f) {
        total += std::norm(x[f]);
        auto a = x.multi_index(f);
        for (std::size_t g = 0; g < x.size(); ++g) {
            auto b = x.multi_index(g);
            bool same = true;
            for (std::size_t k = 0; k < a.size(); ++k)
                if (k != axis && a[k] != b[k]) same = false;
            if (same) rho(a[axis], b[axis]) += x[f] * std::conj(x[g]);
        }
    }
    return rho / total;
}

// Rank by full pivoting (largest |entry|) over exact rationals, real matrices.
inline std::size_t elimination_rank(std::vector<std::vector<Rational>> a) {
    std::size_t rank = 0;
    const std::size_t rows = a.size(), cols = rows ? a[0].size() : 0;
    std::vector<bool> used_col(cols, false);
    for (std::size_t step = 0; step < std::min(rows, cols); ++step) {
        std::size_t pr = rows, pc = cols;
        Rational best = 0;
        for (std::size_t r = rank; r < rows; ++r)
            for (std::size_t c = 0; c < cols; ++c)
                if (!used_col[c] && abs(a[r][c]) > best) best = abs(a[r][c]), pr = r, pc = c;
        if (pr == rows) break;
        std::swap(a[pr], a[rank]);
        used_col[pc] = true;
        for (std::size_t r = 0; r < rows; ++r) {
            if (r == rank || a[r][pc] == 0) continue;
            Rational f = a[r][pc] / a[rank][pc];
            for (std::size_t c = 0; c < cols; ++c) a[r][c] -= f * a[rank][c];
        }
        ++rank;
    }
    return rank;
}

// Kuhn's augmenting paths; adj[i][j] true when left i may match right j.
inline bool has_perfect_matching(const std::vector<std::vector<bool>>& adj) {
    const std::size_t n = adj.size();
    std::vector<int> match(n, -1);
    for (std::size_t u = 0; u < n; ++u) {
        std::vector<bool> seen(n, false);
        std::function<bool(std::size_t)> augment = [&](std::size_t v) {
            for (std::size_t w = 0; w < n; ++w) {
                if (!adj[v][w] || seen[w]) continue;
                seen[w] = true;
                if (match[w] < 0 || augment(std::size_t(match[w]))) {
                    match[w] = int(v);
                    return true;
                }
            }
            return false;
        };
        if (!augment(u)) return false;
    }
    return true;
}

// Sign of t -> j(perm(b n + t)) on one block, zero unless it is a bijection.
inline int block_sign(const std::vector<std::size_t>& j, const std::vector<std::size_t>& perm, std::size_t b,
                      std::size_t n) {
    std::vector<std::size_t> tau(n);
    std::vector<bool> hit(n, false);
    for (std::size_t t = 0; t < n; ++t) {
        tau[t] = j[perm[b * n + t]];
        if (hit[tau[t]]) return 0;
        hit[tau[t]] = true;
    }
    int sign = 1;
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t c = a + 1; c < n; ++c)
            if (tau[a] > tau[c]) sign = -sign;
    return sign;
}

// Sum over every map J_k: [m] -> [n_k] of the block-determinant weights times the entry product.
inline Complex schur_weyl_brute(const Tensor& x, const nullcone::SpanningInvariant& inv) {
    const auto& dims = x.dims();
    const std::size_t d = x.parties(), m = inv.m;
    std::vector<std::vector<std::size_t>> j(d, std::vector<std::size_t>(m, 0));
    Complex sum = 0;
    for (;;) {
        int w = 1;
        for (std::size_t k = 0; k < d && w; ++k)
            for (std::size_t b = 0; b < m / dims[k + 1] && w; ++b) w *= block_sign(j[k], inv.perms[k], b, dims[k + 1]);
        if (w) {
            Complex prod = double(w);
            for (std::size_t a = 0; a < m; ++a) {
                std::vector<std::size_t> idx{inv.idx[a]};
                for (std::size_t k = 0; k < d; ++k) idx.push_back(j[k][a]);
                prod *= x[x.flat_index(idx)];
            }
            sum += prod;
        }
        std::size_t k = 0, a = 0;
        for (;;) {
            if (++j[k][a] < dims[k + 1]) break;
            j[k][a] = 0;
            if (++a == m) {
                a = 0;
                if (++k == d) return sum;
            }
        }
    }
}

// Cofactor-expansion determinant of a small rational matrix.
inline Rational cofactor_det(const std::vector<std::vector<Rational>>& a) {
    const std::size_t n = a.size();
    if (n == 1) return a[0][0];
    Rational det = 0;
    for (std::size_t c = 0; c < n; ++c) {
        std::vector<std::vector<Rational>> minor;
        for (std::size_t r = 1; r < n; ++r) {
            minor.emplace_back();
            for (std::size_t cc = 0; cc < n; ++cc)
                if (cc != c) minor.back().push_back(a[r][cc]);
        }
        Rational term = a[0][c] * cofactor_det(minor);
        det += c % 2 ? -term : term;
    }
    return det;
}

}  // namespace oracle
