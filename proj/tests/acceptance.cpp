// End-to-end acceptance checks. One PASS/FAIL line per criterion; exit status 1 if any fails.

#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <string>

#include "nullcone/duality.hpp"
#include "nullcone/invariants.hpp"
#include "nullcone/scaling.hpp"
#include "nullcone/slicerank.hpp"
#include "oracles.hpp"

using namespace nullcone;
using Clock = std::chrono::steady_clock;

namespace {

struct Result {
    bool pass = true;
    std::string detail;

    void fail(const std::string& why) {
        if (pass) detail = why;
        pass = false;
    }
};

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(const char* f, double a, double b = 0, double c = 0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, a, b, c);
    return buf;
}

std::size_t lcm_dims(const Dims& dims) {
    std::size_t l = 1;
    for (std::size_t k = 1; k < dims.size(); ++k) l = std::lcm(l, dims[k]);
    return l;
}

Tensor from_code(const Dims& dims, std::size_t code, int base, int offset) {
    std::vector<long long> v(Tensor::checked_size(dims));
    for (auto& e : v) e = static_cast<long long>(code % base) + offset, code /= base;
    return Tensor::from_integers(dims, v);
}

// Random integral tensors with a nonzero degree-lcm spanning invariant, so they are not in the null cone.
std::vector<Tensor> screened_tensors(std::mt19937_64& rng) {
    std::vector<Tensor> out;
    for (const Dims& dims : {Dims{2, 2, 2}, Dims{2, 3, 3}}) {
        std::size_t kept = 0;
        while (kept < 50) {
            Tensor x = oracle::random_int_tensor(dims, -3, 3, rng);
            bool witness = false;
            for (int s = 0; s < 16 && !witness; ++s)
                witness = !schur_weyl_eval_exact(x, random_spanning_invariant(dims, lcm_dims(dims), rng())).is_zero();
            if (!witness) continue;
            out.push_back(x);
            ++kept;
        }
    }
    return out;
}

struct ScaledRun {
    ScalingOutcome outcome;
    double secs;
};

std::vector<ScaledRun> runs_c1;

Result converges_on_screened() {
    Result r;
    std::mt19937_64 rng(1001);
    double worst = 0, worst_ds = 0;
    for (const Tensor& x : screened_tensors(rng)) {
        ScalingOptions opt;
        opt.eps = 1e-3;
        const auto t0 = Clock::now();
        auto sc = scale(x, opt);
        const double secs = seconds_since(t0);
        worst = std::max(worst, secs);
        if (sc.verdict != Verdict::Scaled) r.fail("a screened tensor was reported in the null cone");
        worst_ds = std::max(worst_ds, sc.ds_value);
        if (!(sc.ds_value < opt.eps)) r.fail(fmt("ds %.3g not below eps", sc.ds_value));
        if (secs >= 10) r.fail(fmt("run took %.1f s", secs));
        const std::size_t d = x.order() - 1;
        for (std::size_t t = 0; t + 1 < sc.trace.size(); ++t)
            if (!(sc.trace[t + 1].norm_sq < norm_decrease_factor(x.dims()[sc.trace[t].axis], opt.eps, d) * sc.trace[t].norm_sq))
                r.fail(fmt("norm did not shrink by the guaranteed factor at step %.0f", double(t)));
        runs_c1.push_back({std::move(sc), secs});
    }
    if (r.pass) r.detail = fmt("%.0f tensors, max ds %.2e, slowest %.3f s", double(runs_c1.size()), worst_ds, worst);
    return r;
}

Result norm_stays_above_floor() {
    Result r;
    double worst_margin = 1e300;
    for (const auto& run : runs_c1) {
        const double floor = to_double(capacity_lower_bound(run.outcome.scaled.dims()));
        double lowest = norm_sq(run.outcome.scaled);
        for (const auto& row : run.outcome.trace) lowest = std::min(lowest, row.norm_sq);
        worst_margin = std::min(worst_margin, lowest - floor);
        if (lowest < floor - 1e-9) r.fail(fmt("norm_sq %.6g below floor %.6g", lowest, floor));
    }
    if (runs_c1.empty()) r.fail("no runs from the convergence check");
    if (r.pass) r.detail = fmt("smallest margin above floor %.4g", worst_margin);
    return r;
}

Result sign_matrices_match_determinant() {
    Result r;
    const auto t0 = Clock::now();
    std::size_t singular = 0;
    for (std::size_t code = 0; code < 19683; ++code) {
        Tensor x = from_code({1, 3, 3}, code, 3, -1);
        std::vector<std::vector<Rational>> rows(3, std::vector<Rational>(3));
        for (std::size_t f = 0; f < 9; ++f) rows[f / 3][f % 3] = x.exact_entries()[f].re;
        const bool det_zero = oracle::cofactor_det(rows) == 0;
        singular += det_zero;
        if ((scale(x).verdict == Verdict::InNullCone) != det_zero) r.fail(fmt("mismatch at matrix %.0f", double(code)));
    }
    const double secs = seconds_since(t0);
    if (secs >= 300) r.fail(fmt("took %.1f s", secs));
    if (r.pass) r.detail = fmt("19683 matrices, %.0f singular, %.1f s", double(singular), secs);
    return r;
}

Result supports_match_matchings() {
    Result r;
    std::size_t deficient = 0;
    for (unsigned mask = 0; mask < 512; ++mask) {
        Support s;
        s.dims = {3, 3};
        std::vector<std::vector<bool>> adj(3, std::vector<bool>(3, false));
        for (std::size_t k = 0; k < 9; ++k)
            if (mask >> k & 1u) s.tuples.push_back({k / 3, k % 3}), adj[k / 3][k % 3] = true;
        s.normalize();
        auto res = is_deficient(s);
        if (res.deficient == oracle::has_perfect_matching(adj)) r.fail(fmt("support %.0f disagrees with matching", mask));
        if (res.deficient) {
            ++deficient;
            if (!res.certificate || !verify_certificate(s, *res.certificate)) r.fail(fmt("bad certificate for %.0f", mask));
        } else if (!verify_witness(s, res.witness)) {
            r.fail(fmt("bad witness for %.0f", mask));
        }
    }
    if (r.pass) r.detail = fmt("512 supports, %.0f deficient, all certificates verified", double(deficient));
    return r;
}

Result fixed_points_are_stationary() {
    Result r;
    std::mt19937_64 rng(1005);
    std::vector<Tensor> points;
    for (std::size_t n : {2, 3, 4}) {
        std::vector<long long> v(n * n, 0);
        for (std::size_t j = 0; j < n; ++j) v[j * n + j] = 1;
        points.push_back(Tensor::from_integers({1, n, n}, v));
    }
    points.push_back(Tensor::from_integers({1, 2, 2, 2}, {1, 0, 0, 0, 0, 0, 0, 1}));
    {
        std::vector<long long> v(27, 0);
        for (std::size_t j = 0; j < 3; ++j) v[j * 13] = 1;
        points.push_back(Tensor::from_integers({1, 3, 3, 3}, v));
    }
    for (std::size_t n : {2, 3, 4}) {
        Matrix u = oracle::random_unitary(n, rng);
        std::vector<Complex> v(n * n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) v[i * n + j] = u(i, j);
        points.emplace_back(Dims{1, n, n}, v);
    }

    double worst_ds = 0, worst_g = 0;
    for (const Tensor& y : points) {
        ScalingOptions opt;
        opt.eps = 1e-6;
        auto sc = scale(y, opt);
        worst_ds = std::max(worst_ds, sc.ds_value);
        if (sc.verdict != Verdict::Scaled) r.fail("a fixed point was reported in the null cone");
        if (sc.ds_value > (y.is_exact() ? 0.0 : 1e-20)) r.fail(fmt("ds %.3g at a fixed point", sc.ds_value));
        for (const Matrix& g : sc.group) {
            const double dev = (g - Matrix::Identity(g.rows(), g.cols())).cwiseAbs().maxCoeff();
            worst_g = std::max(worst_g, dev);
            if (dev > 1e-10) r.fail(fmt("scaling matrix differs from identity by %.3g", dev));
        }
        for (int t = 0; t < 50; ++t) {
            std::vector<Matrix> g;
            for (std::size_t k = 1; k < y.order(); ++k) g.push_back(oracle::random_sl(y.dims()[k], rng, 0.8));
            const double before = norm_sq(y), after = norm_sq(act(y, g));
            if (std::sqrt(after) < std::sqrt(before) * (1 - 1e-8)) r.fail(fmt("SL element reduced the norm %.6g -> %.6g", before, after));
        }
    }
    if (r.pass) r.detail = fmt("%.0f fixed points, max ds %.2e, max |g - I| %.2e", double(points.size()), worst_ds, worst_g);
    return r;
}

ExactMatrix random_rational_matrix(std::size_t m, std::mt19937_64& rng) {
    std::uniform_int_distribution<int> num(-6, 6), den(1, 4);
    ExactMatrix a(m, m);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j) a(i, j) = GaussianRational(Rational(num(rng), den(rng)));
    return a;
}

Polynomial random_homogeneous(std::size_t nvars, std::size_t deg, std::size_t terms, std::mt19937_64& rng) {
    std::uniform_int_distribution<std::size_t> pick(0, nvars - 1);
    std::uniform_int_distribution<int> coef(-5, 5);
    Polynomial p(nvars);
    for (std::size_t t = 0; t < terms; ++t) {
        Exponent e(nvars, 0);
        for (std::size_t k = 0; k < deg; ++k) ++e[pick(rng)];
        p.add_term(e, Rational(coef(rng)));
    }
    return p;
}

Result omega_process_identities() {
    Result r;
    std::mt19937_64 rng(1006);
    if (omega(det_polynomial(2), 2) != Polynomial::constant(4, 2)) r.fail("Omega(det) is not 2");
    int checked = 0;
    while (checked < 50) {
        Polynomial q = random_homogeneous(4, 2 + 2 * (checked % 2), 5, rng);
        if (q.is_zero()) continue;
        ++checked;
        if (!equivariance_check(q, random_rational_matrix(2, rng), 2)) r.fail("equivariance failed");
    }
    ActionSpec spec = tensor_action({1, 2, 2});
    Polynomial x11 = Polynomial::variable(4, 0), x12 = Polynomial::variable(4, 1), x21 = Polynomial::variable(4, 2),
               x22 = Polynomial::variable(4, 3);
    Polynomial det = x11 * x22 - x12 * x21;
    Polynomial rp = reynolds_product(x11 * x22, spec);
    const Rational c = rp.coefficient({1, 0, 0, 1});
    if (rp.is_zero() || rp != det * c) r.fail("Reynolds image of x11 x22 is not a multiple of det");
    std::uniform_int_distribution<int> u(-5, 5);
    for (int t = 0; t < 20; ++t) {
        const long long a = u(rng), b = u(rng), s = u(rng), w = u(rng);
        const std::vector<Rational> pt{Rational(a * s), Rational(a * w), Rational(b * s), Rational(b * w)};
        if (rp.evaluate(pt) != 0) r.fail("Reynolds image does not vanish on a singular matrix");
    }
    if (r.pass) r.detail = "Omega(det) = 2, 50 equivariance checks, Reynolds image = " + to_string(c) + " * det";
    return r;
}

Result algebraic_agrees_on_binary_cubes() {
    Result r;
    std::size_t scaled = 0;
    for (std::size_t code = 0; code < 256; ++code) {
        Tensor x = from_code({1, 2, 2, 2}, code, 2, 0);
        AlgebraicOptions opt;
        opt.degree_cap = 4;
        opt.samples = 64;
        opt.seed = code;
        const bool witness = nullcone_algebraic(x, opt).verdict == AlgebraicVerdict::NotInNullCone;
        const bool not_null = scale(x).verdict == Verdict::Scaled;
        scaled += not_null;
        if (witness != not_null) r.fail(fmt("tensor %.0f: invariants and scaling disagree", double(code)));
    }
    if (r.pass) r.detail = fmt("256 tensors, %.0f outside the null cone", double(scaled));
    return r;
}

Result coefficients_within_bounds() {
    Result r;
    std::mt19937_64 rng(1008);
    ActionSpec spec = tensor_action({1, 2, 2});
    std::size_t images = 0;
    for (std::size_t deg : {2, 4}) {
        const BigInt bound = coefficient_bound(spec, deg);
        for (int t = 0; t < 8; ++t) {
            Exponent e(4, 0);
            for (std::size_t k = 0; k < deg; ++k) ++e[rng() % 4];
            Polynomial img = reynolds_product(Polynomial::monomial(e), spec);
            ++images;
            for (const auto& [mono, coef] : img.terms())
                if (BigInt(abs(numerator(coef))) > bound * denominator(coef)) r.fail("Reynolds coefficient exceeds bound");
        }
    }
    std::size_t evals = 0;
    for (int t = 0; t < 60; ++t) {
        const Dims dims = t % 3 == 0 ? Dims{1, 2, 2} : t % 3 == 1 ? Dims{2, 2, 2} : Dims{1, 2, 2, 2};
        const std::size_t m = t % 3 == 2 ? 4 : 2;
        Tensor x = t % 2 ? oracle::random_float_tensor(dims, rng) : oracle::random_int_tensor(dims, -3, 3, rng);
        const double bound = schur_weyl_bound(x, m);
        for (int s = 0; s < 10; ++s, ++evals) {
            auto inv = random_spanning_invariant(dims, m, rng());
            const double mag = std::abs(schur_weyl_eval(x, inv));
            if (mag > bound * (1 + 1e-12)) r.fail(fmt("|P(X)| = %.6g exceeds %.6g", mag, bound));
        }
    }
    if (r.pass) r.detail = fmt("%.0f Reynolds images, %.0f invariant evaluations", double(images), double(evals));
    return r;
}

Result low_slice_rank_forces_null_cone() {
    Result r;
    std::size_t low = 0;
    for (std::size_t code = 0; code < 6561; ++code) {
        Tensor x = from_code({1, 2, 2, 2}, code, 3, -1);
        if (slice_rank_exact_small(x).value >= 2) continue;
        ++low;
        if (scale(x).verdict != Verdict::InNullCone) r.fail(fmt("tensor %.0f has slice rank < 2 but scales", double(code)));
    }
    std::mt19937_64 rng(1009);
    int powers = 0;
    while (powers < 20) {
        const Dims dims = powers % 2 ? Dims{1, 2, 2, 2} : Dims{1, 3, 3};
        Tensor x = oracle::random_int_tensor(dims, -1, 1, rng);
        if (exact_norm_sq(x) == 0) continue;
        ++powers;
        auto rep = nullcone_vs_slicerank_check(x);
        if (!rep.power_consistent) r.fail("tensor square changed the null-cone verdict");
        if (!rep.slice_rank_consistent) r.fail("slice rank below side but tensor scales");
    }
    if (r.pass) r.detail = fmt("6561 tensors, %.0f with slice rank < 2, 20 square checks", double(low));
    return r;
}

Result deficiency_below_sqrt_ds() {
    Result r;
    std::mt19937_64 rng(1010);
    double worst = -1e300;
    int tensors = 0;
    while (tensors < 100) {
        const Dims dims = tensors % 2 ? Dims{1, 3, 3} : Dims{1, 2, 2, 2};
        Tensor x = oracle::random_int_tensor(dims, 0, 1, rng);
        if (exact_norm_sq(x) == 0) continue;
        ++tensors;
        ScalingOptions opt;
        opt.eps = 1e-4;
        auto sc = scale(x, opt);
        double min_ds = sc.ds_value;
        for (const auto& row : sc.trace) min_ds = std::min(min_ds, row.ds);
        for (int b = 0; b < 10; ++b) {
            std::vector<ExactMatrix> g;
            for (std::size_t k = 1; k < dims.size(); ++k) g.push_back(oracle::random_exact_sl(dims[k], rng, 2));
            const double v = deficiency_value(support(act(x, g))).value;
            worst = std::max(worst, v - std::sqrt(min_ds));
            if (v > std::sqrt(min_ds) + 1e-6) r.fail(fmt("deficiency %.6g above sqrt(ds) %.6g", v, std::sqrt(min_ds)));
        }
    }
    if (r.pass) r.detail = fmt("1000 supports, largest deficiency - sqrt(ds) = %.3g", worst);
    return r;
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Result()>>> criteria{
        {"scaling converges on screened random tensors", converges_on_screened},
        {"norm stays above the capacity floor", norm_stays_above_floor},
        {"3x3 sign matrices: verdict matches determinant", sign_matrices_match_determinant},
        {"[3]x[3] supports: deficiency matches matchings", supports_match_matchings},
        {"fixed points are stationary and norm-minimal", fixed_points_are_stationary},
        {"Omega process, equivariance, Reynolds on 2x2", omega_process_identities},
        {"invariants agree with scaling on binary 2x2x2", algebraic_agrees_on_binary_cubes},
        {"coefficients and evaluations within bounds", coefficients_within_bounds},
        {"slice rank below side implies null cone", low_slice_rank_forces_null_cone},
        {"deficiency bounded by sqrt(ds) of iterates", deficiency_below_sqrt_ds},
    };
    int failed = 0;
    for (std::size_t k = 0; k < criteria.size(); ++k) {
        Result res;
        const auto t0 = Clock::now();
        try {
            res = criteria[k].second();
        } catch (const std::exception& e) {
            res.fail(std::string("exception: ") + e.what());
        }
        failed += !res.pass;
        std::printf("%s %zu %s: %s [%.1f s]\n", res.pass ? "PASS" : "FAIL", k + 1, criteria[k].first.c_str(),
                    res.detail.c_str(), seconds_since(t0));
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria failed\n", failed, criteria.size());
    return failed ? 1 : 0;
}
