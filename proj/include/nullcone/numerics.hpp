#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <vector>

#include "nullcone/errors.hpp"
#include "nullcone/tensor.hpp"

namespace nullcone {

struct EigenDecomposition {
    Eigen::VectorXd values;  // ascending
    Matrix vectors;          // unitary, columns are eigenvectors
};

inline double off_diagonal_norm_sq(const Matrix& h) {
    double s = 0;
    for (Eigen::Index i = 0; i < h.rows(); ++i)
        for (Eigen::Index j = 0; j < h.cols(); ++j)
            if (i != j) s += std::norm(h(i, j));
    return s;
}

/**
 * Cyclic Jacobi for Hermitian matrices. Each rotation first removes the phase
 * of h(p, q) with a diagonal unitary, then applies a real Givens rotation.
 */
inline EigenDecomposition herm_eig(const Matrix& input, int max_sweeps = 100) {
    if (input.rows() != input.cols()) throw ArgumentError("herm_eig needs a square matrix");
    const Eigen::Index n = input.rows();
    Matrix h = (input + input.adjoint()) / 2.0;
    Matrix v = Matrix::Identity(n, n);
    const double scale = std::max(h.squaredNorm(), 1e-300);
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        if (off_diagonal_norm_sq(h) <= 1e-32 * scale) break;
        for (Eigen::Index p = 0; p < n; ++p)
            for (Eigen::Index q = p + 1; q < n; ++q) {
                const Complex hpq = h(p, q);
                const double mag = std::abs(hpq);
                if (mag <= 1e-300) continue;
                const Complex phase = hpq / mag;
                const double app = h(p, p).real(), aqq = h(q, q).real();
                const double theta = (aqq - app) / (2 * mag);
                const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1));
                const double c = 1 / std::sqrt(t * t + 1), s = t * c;
                // J = D R with D = diag(1, conj(phase)) on (p, q), R = [[c, s], [-s, c]].
                const Complex jpp = c, jpq = s, jqp = -s * std::conj(phase), jqq = c * std::conj(phase);
                for (Eigen::Index k = 0; k < n; ++k) {
                    const Complex hkp = h(k, p), hkq = h(k, q);
                    h(k, p) = hkp * jpp + hkq * jqp;
                    h(k, q) = hkp * jpq + hkq * jqq;
                    const Complex vkp = v(k, p), vkq = v(k, q);
                    v(k, p) = vkp * jpp + vkq * jqp;
                    v(k, q) = vkp * jpq + vkq * jqq;
                }
                for (Eigen::Index k = 0; k < n; ++k) {
                    const Complex hpk = h(p, k), hqk = h(q, k);
                    h(p, k) = std::conj(jpp) * hpk + std::conj(jqp) * hqk;
                    h(q, k) = std::conj(jpq) * hpk + std::conj(jqq) * hqk;
                }
                h(p, q) = 0;
                h(q, p) = 0;
            }
    }
    std::vector<Eigen::Index> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](Eigen::Index a, Eigen::Index b) { return h(a, a).real() < h(b, b).real(); });
    EigenDecomposition out{Eigen::VectorXd(n), Matrix(n, n)};
    for (Eigen::Index k = 0; k < n; ++k) {
        out.values(k) = h(order[k], order[k]).real();
        out.vectors.col(k) = v.col(order[k]);
    }
    return out;
}

inline constexpr double kSingularRelTol = 1e-12;

inline bool is_numerically_singular(const Eigen::VectorXd& eigenvalues, double trace) {
    return eigenvalues.minCoeff() <= kSingularRelTol * trace;
}

// Rounds each real and imaginary part toward zero to the given number of fractional bits.
inline Matrix truncate_entries(const Matrix& a, int fractional_bits) {
    const double s = std::ldexp(1.0, fractional_bits);
    Matrix out = a;
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            const Complex z = a(i, j);
            out(i, j) = Complex(std::trunc(z.real() * s) / s, std::trunc(z.imag() * s) / s);
        }
    return out;
}

struct SingularMarginalError : NumericalError {
    using NumericalError::NumericalError;
};

/**
 * det(rho)^{1/(2n)} rho^{-1/2}: determinant one, and applying it to the
 * corresponding axis turns that marginal into I/n. Invariant under positive
 * rescaling of rho.
 */
inline Matrix scaling_matrix(const Matrix& rho, std::optional<int> truncate_bits = std::nullopt) {
    const Eigen::Index n = rho.rows();
    if (n != rho.cols() || n == 0) throw ArgumentError("scaling_matrix needs a nonempty square matrix");
    const auto eig = herm_eig(rho);
    const double tr = rho.trace().real();
    if (!(tr > 0) || is_numerically_singular(eig.values, tr))
        throw SingularMarginalError("marginal is numerically singular");
    double log_sum = 0;
    for (Eigen::Index k = 0; k < n; ++k) log_sum += std::log(eig.values(k));
    const double log_det_root = log_sum / (2.0 * static_cast<double>(n));
    Eigen::VectorXcd w(n);
    for (Eigen::Index k = 0; k < n; ++k) w(k) = std::exp(log_det_root - 0.5 * std::log(eig.values(k)));
    Matrix a = eig.vectors * w.asDiagonal() * eig.vectors.adjoint();
    if (truncate_bits) a = truncate_entries(a, *truncate_bits);
    return a;
}

}  // namespace nullcone
