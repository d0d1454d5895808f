// Capacity side and the Hilbert-Mumford side: supports, deficiency, instability.

#include <gtest/gtest.h>

#include <random>

#include "nullcone/duality.hpp"
#include "oracles.hpp"

using namespace nullcone;

namespace {

Tensor identity_tensor(std::size_t n) {
    std::vector<long long> v(n * n, 0);
    for (std::size_t j = 0; j < n; ++j) v[j * n + j] = 1;
    return Tensor::from_integers({1, n, n}, v);
}

Tensor matrix_tensor(std::size_t n, const std::vector<long long>& v) { return Tensor::from_integers({1, n, n}, v); }

Support bipartite(std::size_t n, unsigned mask) {
    Support s;
    s.dims = {n, n};
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (mask >> (i * n + j) & 1u) s.tuples.push_back({i, j});
    return s;
}

bool matching_oracle(std::size_t n, unsigned mask) {
    std::vector<std::vector<bool>> adj(n, std::vector<bool>(n));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) adj[i][j] = mask >> (i * n + j) & 1u;
    return oracle::has_perfect_matching(adj);
}

Support random_support(const Dims& dims, double density, std::mt19937_64& rng) {
    std::bernoulli_distribution keep(density);
    Support s;
    s.dims = dims;
    std::size_t total = 1;
    for (auto n : dims) total *= n;
    for (std::size_t f = 0; f < total; ++f) {
        if (!keep(rng)) continue;
        std::vector<std::size_t> t(dims.size());
        for (std::size_t a = dims.size(), g = f; a-- > 0; g /= dims[a]) t[a] = g % dims[a];
        s.tuples.push_back(t);
    }
    return s;
}

void expect_sound(const Support& s, const DeficiencyResult& r) {
    if (r.deficient) {
        ASSERT_TRUE(r.certificate.has_value());
        EXPECT_TRUE(verify_certificate(s, *r.certificate));
    } else {
        EXPECT_TRUE(verify_witness(s, r.witness));
    }
}

}  // namespace

TEST(LocalMin, Values) {
    EXPECT_NEAR(local_min_value(Matrix::Identity(2, 2) / 2.0, 2), 1.0, 1e-15);
    Matrix rho = Matrix::Zero(2, 2);
    rho(0, 0) = 0.2;
    rho(1, 1) = 0.8;
    EXPECT_NEAR(local_min_value(rho, 2), 0.8, 1e-14);
    rho(0, 0) = 0;
    EXPECT_EQ(local_min_value(rho, 2), 0.0);
}

TEST(LocalMin, AtMostTraceWithEqualityForScalars) {
    std::mt19937_64 rng(41);
    for (int t = 0; t < 100; ++t) {
        const std::size_t n = 2 + t % 3;
        Matrix a = oracle::random_matrix(n, rng);
        Matrix rho = a * a.adjoint();
        EXPECT_LE(local_min_value(rho, n), rho.trace().real() * (1 + 1e-12));
        EXPECT_LT(local_min_value(rho, n), rho.trace().real() * (1 - 1e-9));
        Matrix s = Matrix::Identity(n, n) * (0.5 + t);
        EXPECT_NEAR(local_min_value(s, n), s.trace().real(), 1e-9 * s.trace().real());
    }
}

TEST(Capacity, FixedPointHistoryIsConstant) {
    auto est = capacity_estimate(identity_tensor(2), 10);
    EXPECT_NEAR(est.value, 2.0, 1e-14);
    for (double h : est.history) EXPECT_NEAR(h, 2.0, 1e-14);
}

TEST(Capacity, ProductStateIsZeroWithNote) {
    auto est = capacity_estimate(matrix_tensor(2, {1, 0, 0, 0}), 5);
    EXPECT_EQ(est.value, 0.0);
    EXPECT_FALSE(est.note.empty());
}

TEST(Capacity, DiagonalMatrixApproachesOrbitMinimum) {
    Tensor x = matrix_tensor(2, {1, 0, 0, 2});
    auto est = capacity_estimate(x, 40);
    for (std::size_t k = 1; k < est.history.size(); ++k) EXPECT_LE(est.history[k], est.history[k - 1]);
    EXPECT_LT(est.history[1], est.history[0]);
    // hill-climbing random search over SL(2) x SL(2)
    std::mt19937_64 rng(42);
    std::vector<Matrix> g{Matrix::Identity(2, 2), Matrix::Identity(2, 2)};
    double best = norm_sq(x);
    for (int t = 0; t < 20000; ++t) {
        const double step = t < 10000 ? 0.2 : 0.02;
        std::vector<Matrix> h = g;
        for (auto& m : h) m = oracle::random_sl(2, rng, step) * m;
        double v = norm_sq(act(x, h));
        if (v < best) best = v, g = h;
    }
    EXPECT_NEAR(est.value, 4.0, 0.04);
    EXPECT_NEAR(best, est.value, 0.01 * est.value);
    EXPECT_GE(best, est.value * (1 - 1e-6));
}

TEST(Capacity, HistoryNeverIncreases) {
    std::mt19937_64 rng(43);
    for (int t = 0; t < 20; ++t) {
        auto est = capacity_estimate(oracle::random_float_tensor({2, 2, 3, 2}, rng), 15);
        for (std::size_t k = 1; k < est.history.size(); ++k) EXPECT_LE(est.history[k], est.history[k - 1]);
        EXPECT_EQ(est.value, est.history.back());
    }
}

TEST(Capacity, LowerBoundHoldsOnScaledIntegralTensors) {
    std::mt19937_64 rng(44);
    int screened = 0;
    for (int t = 0; screened < 50 && t < 500; ++t) {
        const Dims dims = t % 2 ? Dims{2, 2, 2} : Dims{1, 2, 2, 2};
        Tensor x = oracle::random_int_tensor(dims, -1, 1, rng);
        ScalingOptions opt;
        opt.eps = 1e-6;
        opt.record_trace = false;
        if (scale(x, opt).verdict != Verdict::Scaled) continue;
        ++screened;
        EXPECT_GE(capacity_estimate(x, 30).value, to_double(capacity_lower_bound(dims)));
    }
    EXPECT_EQ(screened, 50);
}

TEST(Capacity, NeverBothScaledAndBelowFloor) {
    std::mt19937_64 rng(45);
    for (int t = 0; t < 60; ++t) {
        const Dims dims = t % 3 ? Dims{1, 2, 2, 2} : Dims{2, 3, 3};
        Tensor x = oracle::random_int_tensor(dims, 0, 1, rng);
        if (exact_norm_sq(x) == 0) continue;
        ScalingOptions opt;
        opt.eps = 1e-6;
        opt.record_trace = false;
        const bool scaled = scale(x, opt).verdict == Verdict::Scaled;
        const bool vanishing = capacity_estimate(x, 200).value < to_double(capacity_lower_bound(dims));
        EXPECT_FALSE(scaled && vanishing);
    }
}

TEST(Deficiency, RowSupportIsDeficient) {
    Support s{{2, 2}, {{0, 0}, {0, 1}}};
    auto r = is_deficient(s);
    ASSERT_TRUE(r.deficient);
    EXPECT_EQ(r.certificate->a, (std::vector<std::vector<BigInt>>{{1, -1}, {0, 0}}));
    EXPECT_TRUE(verify_certificate(s, *r.certificate));
}

TEST(Deficiency, PerfectMatchingIsNotDeficient) {
    Support s{{2, 2}, {{0, 0}, {1, 1}}};
    auto r = is_deficient(s);
    EXPECT_FALSE(r.deficient);
    EXPECT_TRUE(verify_witness(s, r.witness));
}

TEST(Deficiency, BadCertificatesRejected) {
    Support s{{2, 2}, {{0, 0}, {0, 1}}};
    EXPECT_FALSE(verify_certificate(s, {{{1, 0}, {0, 0}}}));    // row sum
    EXPECT_FALSE(verify_certificate(s, {{{1, -1}, {-1, 1}}}));  // tuple (1,1) gets 0
}

TEST(Deficiency, MatchesMatchingOracleExhaustively) {
    for (std::size_t n = 1; n <= 3; ++n)
        for (unsigned mask = 0; mask < (1u << (n * n)); ++mask) {
            Support s = bipartite(n, mask);
            auto r = is_deficient(s);
            EXPECT_EQ(r.deficient, !matching_oracle(n, mask)) << n << " " << mask;
            expect_sound(s, r);
        }
}

TEST(Deficiency, MatchesMatchingOracleOnRandomSupports) {
    std::mt19937_64 rng(46);
    std::uniform_int_distribution<std::size_t> size(2, 5);
    std::uniform_real_distribution<double> dens(0.1, 0.6);
    for (int t = 0; t < 500; ++t) {
        const std::size_t n = size(rng);
        Support s = random_support({n, n}, dens(rng), rng);
        std::vector<std::vector<bool>> adj(n, std::vector<bool>(n, false));
        for (const auto& tup : s.tuples) adj[tup[0]][tup[1]] = true;
        auto r = is_deficient(s);
        EXPECT_EQ(r.deficient, !oracle::has_perfect_matching(adj));
        expect_sound(s, r);
    }
}

TEST(Deficiency, HigherOrderSupportsAreSound) {
    std::mt19937_64 rng(47);
    for (int t = 0; t < 100; ++t) {
        Support s = random_support(t % 2 ? Dims{2, 2, 2} : Dims{3, 2, 3}, 0.35, rng);
        s.normalize();
        expect_sound(s, is_deficient(s));
    }
}

TEST(DeficiencyValue, RowSupport) {
    auto v = deficiency_value(Support{{2, 2}, {{0, 0}, {0, 1}}});
    EXPECT_TRUE(v.deficient);
    EXPECT_NEAR(v.value, 1 / std::sqrt(2.0), 1e-7);
    EXPECT_LE(v.value, v.upper + 1e-12);
}

TEST(DeficiencyValue, FullSupportIsNotPositive) {
    for (std::size_t n = 1; n <= 4; ++n) EXPECT_LE(deficiency_value(bipartite(n, (1u << (n * n)) - 1)).value, 0.0);
}

TEST(DeficiencyValue, SingletonMatchesClosedForm) {
    // least-norm a is the projected indicator scaled to weight one: value sqrt(sum (1 - 1/n_i))
    for (const Dims& dims : {Dims{2, 2}, Dims{2, 3}, Dims{3, 3, 3}, Dims{2, 2, 2}}) {
        Support s{dims, {std::vector<std::size_t>(dims.size(), 0)}};
        double expect = 0;
        for (auto n : dims) expect += 1 - 1.0 / double(n);
        EXPECT_NEAR(deficiency_value(s).value, std::sqrt(expect), 1e-7);
    }
}

TEST(DeficiencyValue, PositiveExactlyWhenDeficient) {
    std::mt19937_64 rng(48);
    for (int t = 0; t < 200; ++t) {
        Support s = random_support(t % 2 ? Dims{3, 3} : Dims{2, 2, 2}, 0.4, rng);
        if (s.tuples.empty()) continue;
        s.normalize();
        EXPECT_EQ(deficiency_value(s).value > 0, is_deficient(s).deficient);
    }
}

TEST(Instability, ProductStateSingletonBound) {
    const double v = instability_lower_bound(matrix_tensor(2, {1, 0, 0, 0}));
    EXPECT_GE(v, 1 / std::sqrt(2.0));
    EXPECT_NEAR(v, 1.0, 1e-7);
}

TEST(Instability, ScaledTensorHasNoPositiveDeficiency) {
    std::mt19937_64 rng(49);
    std::vector<std::vector<Matrix>> bases;
    for (int t = 0; t < 10; ++t) bases.push_back({oracle::random_unitary(2, rng), oracle::random_unitary(2, rng)});
    EXPECT_LE(instability_lower_bound(identity_tensor(2), bases), 0.0);
    Tensor ghz = Tensor::from_integers({1, 2, 2, 2}, {1, 0, 0, 0, 0, 0, 0, 1});
    EXPECT_LE(instability_lower_bound(ghz), 0.0);
}

TEST(Instability, MoreBasesNeverLower) {
    std::mt19937_64 rng(50);
    Tensor x = matrix_tensor(3, {1, 1, 0, 0, 1, 0, 0, 0, 0});
    std::vector<std::vector<Matrix>> bases;
    double prev = instability_lower_bound(x, bases);
    for (int t = 0; t < 5; ++t) {
        bases.push_back({oracle::random_unitary(3, rng), oracle::random_unitary(3, rng)});
        const double now = instability_lower_bound(x, bases);
        EXPECT_GE(now, prev);
        prev = now;
    }
}

TEST(EpsInstability, Verdicts) {
    EXPECT_EQ(eps_instability(identity_tensor(2), 0.1).verdict, InstabilityVerdict::NotInNullCone);
    EXPECT_EQ(eps_instability(matrix_tensor(2, {1, 0, 0, 0}), 0.5).verdict, InstabilityVerdict::InstabilityAtLeastEps);
    EXPECT_EQ(eps_instability(matrix_tensor(2, {0, 1, 0, 0}), 0.3).verdict, InstabilityVerdict::InstabilityAtLeastEps);
    EXPECT_GE(instability_lower_bound(matrix_tensor(2, {0, 1, 0, 0})), 0.3);
}

TEST(Instability, BoundedBySqrtDsOfIterates) {
    std::mt19937_64 rng(51);
    for (int t = 0; t < 20; ++t) {
        const Dims dims = t % 2 ? Dims{1, 3, 3} : Dims{1, 2, 2, 2};
        Tensor x = oracle::random_int_tensor(dims, 0, 1, rng);
        if (exact_norm_sq(x) == 0) continue;
        ScalingOptions opt;
        opt.eps = 1e-4;
        auto sc = scale(x, opt);
        double min_ds = 1e300;
        for (const auto& row : sc.trace) min_ds = std::min(min_ds, row.ds);
        if (sc.trace.empty()) min_ds = sc.ds_value;
        std::vector<std::vector<ExactMatrix>> bases;
        for (int b = 0; b < 3; ++b) {
            std::vector<ExactMatrix> g;
            for (std::size_t k = 1; k < dims.size(); ++k) g.push_back(oracle::random_exact_sl(dims[k], rng, 2));
            bases.push_back(g);
        }
        EXPECT_LE(instability_lower_bound(x, bases), std::sqrt(min_ds) + 1e-6);
    }
}
