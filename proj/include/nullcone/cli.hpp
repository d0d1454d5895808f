#pragma once

#include <fstream>
#include <iostream>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "nullcone/duality.hpp"
#include "nullcone/invariants.hpp"
#include "nullcone/json_io.hpp"
#include "nullcone/scaling.hpp"
#include "nullcone/slicerank.hpp"

namespace nullcone::cli {

enum ExitCode : int {
    kNotInNullCone = 0,
    kUsage = 1,
    kParse = 2,
    kInNullCone = 3,
    kInconclusive = 4,
};

using io::Json;

inline std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot read '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// "double" or "truncated[:BITS]" (64 fractional bits by default).
inline std::optional<int> parse_precision(const std::string& p) {
    if (p == "double") return std::nullopt;
    if (p == "truncated") return 64;
    if (p.rfind("truncated:", 0) == 0) {
        try {
            int bits = std::stoi(p.substr(10));
            if (bits > 0 && bits <= 1000) return bits;
        } catch (const std::exception&) {
        }
    }
    throw ArgumentError("precision must be 'double' or 'truncated[:BITS]'");
}

inline Json matrix_json(const Matrix& a) {
    Json rows = Json::array();
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        Json row = Json::array();
        for (Eigen::Index j = 0; j < a.cols(); ++j) row.push_back(Json::array({a(i, j).real(), a(i, j).imag()}));
        rows.push_back(row);
    }
    return rows;
}

inline Json scaling_json(const ScalingOutcome& sc, bool include_tensor) {
    Json j{{"verdict", to_string(sc.verdict)},
           {"certified", sc.certified},
           {"ds", sc.ds_value},
           {"norm_sq", sc.scaled.size() ? norm_sq(sc.scaled) : 0.0},
           {"iterations", sc.iterations},
           {"budget", sc.budget},
           {"iteration_bound", sc.bound}};
    if (sc.reason) j["reason"] = to_string(*sc.reason);
    if (sc.singular_axis) j["singular_axis"] = *sc.singular_axis;
    if (sc.input_multiplier != 1) j["input_multiplier"] = io::big_json(sc.input_multiplier);
    if (include_tensor && sc.verdict == Verdict::Scaled) {
        j["scaled"] = io::tensor_to_json(sc.scaled);
        Json g = Json::array();
        for (const auto& a : sc.group) g.push_back(matrix_json(a));
        j["group"] = g;
    }
    return j;
}

inline void write_trace(const std::string& path, const ScalingOutcome& sc) {
    if (path.empty()) return;
    std::ofstream os(path);
    if (!os) throw ArgumentError("cannot write trace file '" + path + "'");
    write_trace_csv(os, sc.trace);
}

struct Options {
    std::string input;
    std::string certificate;
    double eps = 1e-6;
    std::optional<std::uint64_t> max_iters;
    std::string mode = "scaling";
    std::uint64_t seed = 0;
    std::optional<std::size_t> degree_cap;
    std::size_t samples = 16;
    bool exhaustive = false;
    std::string trace;
    std::string precision = "double";
    std::size_t sweeps = 50;
    std::string dims;
    std::optional<std::size_t> degree;
};

inline Dims parse_dims_list(const std::string& s) {
    Dims dims;
    std::stringstream ss(s);
    std::string part;
    while (std::getline(ss, part, ',')) {
        try {
            long long v = std::stoll(part);
            if (v <= 0) throw ArgumentError("dimensions must be positive");
            dims.push_back(static_cast<std::size_t>(v));
        } catch (const std::logic_error&) {
            throw ArgumentError("--dims must be a comma-separated list of positive integers");
        }
    }
    Tensor::checked_size(dims);
    return dims;
}

inline int cmd_scale(const Options& o, Json& report) {
    Tensor x = io::tensor_from_text(read_file(o.input));
    ScalingOptions opt{o.eps, o.max_iters, parse_precision(o.precision), true};
    report["dims"] = x.dims();
    report["exact"] = x.is_exact();
    report["eps"] = o.eps;
    auto sc = scale(x, opt);
    write_trace(o.trace, sc);
    report["scaling"] = scaling_json(sc, true);
    report["verdict"] = to_string(sc.verdict);
    return sc.verdict == Verdict::InNullCone ? kInNullCone : kNotInNullCone;
}

inline int cmd_nullcone(const Options& o, Json& report) {
    Tensor x = io::tensor_from_text(read_file(o.input));
    if (o.mode != "scaling" && o.mode != "algebraic" && o.mode != "both")
        throw ArgumentError("--mode must be scaling, algebraic or both");
    report["dims"] = x.dims();
    report["exact"] = x.is_exact();
    report["mode"] = o.mode;

    std::optional<ScalingOutcome> sc;
    if (o.mode != "algebraic") {
        ScalingOptions opt{o.eps, o.max_iters, parse_precision(o.precision), true};
        report["eps"] = o.eps;
        report["instability_floor_log2"] = instability_floor_log2(x.dims());
        sc = scale(x, opt);
        write_trace(o.trace, *sc);
        report["scaling"] = scaling_json(*sc, false);
    }
    std::optional<AlgebraicOutcome> alg;
    const bool need_alg = o.mode == "algebraic" || (o.mode == "both" && !sc->certified && x.is_exact());
    if (o.mode == "both" && !sc->certified && !x.is_exact())
        report["algebraic_skipped"] = "invariant evaluation needs exact entries";
    if (need_alg) {
        AlgebraicOptions ao;
        std::size_t step = 1;
        for (std::size_t k = 1; k < x.order(); ++k) step = std::lcm(step, x.dims()[k]);
        ao.degree_cap = o.degree_cap.value_or(2 * step);
        ao.samples = o.samples;
        ao.seed = o.seed;
        ao.exhaustive = o.exhaustive;
        alg = nullcone_algebraic(x, ao);
        Json a{{"verdict", to_string(alg->verdict)},
               {"degree_cap", ao.degree_cap},
               {"seed", ao.seed},
               {"samples", ao.samples},
               {"exhaustive", ao.exhaustive},
               {"evaluations", alg->evaluations},
               {"degrees_checked", alg->degrees_checked},
               {"degrees_pruned", alg->degrees_pruned},
               {"degrees_skipped", alg->degrees_skipped},
               {"degree_bound", io::big_json(derksen_bound(x.dims()))}};
        if (alg->witness) a["witness"] = io::witness_json(*alg->witness);
        report["algebraic"] = a;
    }

    std::string verdict = "Inconclusive";
    bool certified = false;
    if (sc && sc->verdict == Verdict::InNullCone) {
        verdict = "InNullCone";
        certified = sc->certified;
        if (alg && alg->verdict == AlgebraicVerdict::NotInNullCone) verdict = "Conflict";
    } else if (alg && alg->verdict == AlgebraicVerdict::NotInNullCone) {
        verdict = "NotInNullCone";
        certified = true;
    } else if (alg && alg->verdict == AlgebraicVerdict::InNullCone) {
        verdict = "InNullCone";
        certified = true;
    } else if (sc && sc->verdict == Verdict::Scaled) {
        if (sc->certified || o.mode == "scaling") {
            verdict = "NotInNullCone";
            certified = sc->certified;
        }
    }
    report["verdict"] = verdict;
    report["certified"] = certified;
    if (verdict == "NotInNullCone" && !certified)
        report["note"] = "ds fell below eps; this certifies the verdict only when eps is at most the instability floor";
    if (verdict == "NotInNullCone") return kNotInNullCone;
    if (verdict == "InNullCone") return kInNullCone;
    return kInconclusive;
}

inline int cmd_capacity(const Options& o, Json& report) {
    Tensor x = io::tensor_from_text(read_file(o.input));
    auto est = capacity_estimate(x, o.sweeps);
    report["dims"] = x.dims();
    report["sweeps"] = o.sweeps;
    report["value"] = est.value;
    report["initial_norm_sq"] = est.history.front();
    report["steps"] = est.history.size() - 1;
    report["lower_bound_if_not_in_null_cone"] = to_string(capacity_lower_bound(x.dims()));
    if (!est.note.empty()) report["note"] = est.note;
    bool below = est.value == 0 && !est.note.empty();
    if (!below && x.is_exact()) {
        // capacity is 2-homogeneous, so compare the integerized tensor against the floor
        const double l = to_double(Rational(integerize(x).second));
        below = est.value * l * l < to_double(capacity_lower_bound(x.dims()));
    }
    report["verdict"] = below ? "InNullCone" : "PositiveEstimate";
    return below ? kInNullCone : kNotInNullCone;
}

inline int cmd_deficiency(const Options& o, Json& report) {
    Support s = io::support_from_json(io::parse_json(read_file(o.input)));
    auto res = is_deficient(s);
    report["support"] = io::support_to_json(s);
    report["deficient"] = res.deficient;
    if (res.certificate) report["certificate"] = io::certificate_to_json(*res.certificate);
    if (!res.deficient) {
        Json w = Json::array();
        for (std::size_t k = 0; k < s.tuples.size(); ++k) {
            if (res.witness[k] == 0) continue;
            Json t = Json::array();
            for (std::size_t v : s.tuples[k]) t.push_back(v + 1);
            w.push_back(Json{{"tuple", t}, {"weight", to_string(res.witness[k])}});
        }
        report["uniform_marginal_witness"] = w;
    }
    auto val = deficiency_value(s);
    report["value"] = val.value;
    report["value_upper"] = val.upper;
    report["converged"] = val.converged;
    if (!o.certificate.empty()) {
        auto cert = io::certificate_from_json(io::parse_json(read_file(o.certificate)));
        report["supplied_certificate_valid"] = verify_certificate(s, cert);
    }
    return kNotInNullCone;
}

inline int cmd_invariants(const Options& o, Json& report) {
    std::optional<Tensor> x;
    if (!o.input.empty()) x = io::tensor_from_text(read_file(o.input));
    Dims dims;
    if (!o.dims.empty()) {
        dims = parse_dims_list(o.dims);
        if (x && dims != x->dims()) throw ArgumentError("--dims does not match the tensor file");
    } else if (x) {
        dims = x->dims();
    } else {
        throw ArgumentError("invariants needs a tensor file or --dims");
    }
    std::size_t step = 1;
    for (std::size_t k = 1; k < dims.size(); ++k) step = std::lcm(step, dims[k]);
    const std::size_t m = o.degree.value_or(step);
    report["dims"] = dims;
    report["degree"] = m;
    report["degree_bound"] = io::big_json(derksen_bound(dims));
    report["degree_bound_exp_form"] = io::big_json(derksen_bound_exp_form(dims));
    if (!x) return kNotInNullCone;

    report["seed"] = o.seed;
    Json evals = Json::array();
    bool nonzero = false;
    const double bound = schur_weyl_bound(*x, m);
    report["value_bound"] = bound;
    for (std::size_t s = 0; s < o.samples; ++s) {
        const std::uint64_t seed = splitmix64(o.seed ^ splitmix64((static_cast<std::uint64_t>(m) << 32) + s));
        auto inv = random_spanning_invariant(dims, m, seed);
        Json e = io::invariant_json(inv);
        double mag;
        if (x->is_exact()) {
            auto v = schur_weyl_eval_exact(*x, inv);
            e["value"] = io::gaussian_json(v);
            nonzero = nonzero || !v.is_zero();
            mag = std::abs(v.to_complex());
        } else {
            auto v = schur_weyl_eval(*x, inv);
            e["value"] = Json::array({v.real(), v.imag()});
            nonzero = nonzero || std::abs(v) > 1e-9 * std::max(1.0, bound);
            mag = std::abs(v);
        }
        e["within_bound"] = mag <= bound * (1 + 1e-12);
        evals.push_back(e);
    }
    report["evaluations"] = evals;
    report["verdict"] = nonzero ? "NotInNullCone" : "NoWitnessFound";
    return nonzero ? kNotInNullCone : kInconclusive;
}

inline int cmd_slicerank(const Options& o, Json& report) {
    Tensor x = io::tensor_from_text(read_file(o.input));
    auto rep = nullcone_vs_slicerank_check(x, o.eps);
    report["dims"] = x.dims();
    report["m"] = rep.m;
    report["d"] = rep.d;
    report["slice_rank_upper"] = rep.upper;
    if (rep.exact) report["slice_rank"] = *rep.exact;
    report["flattening_ranks"] = Json::array();
    for (std::size_t k = 1; k < x.order(); ++k) report["flattening_ranks"].push_back(flattening_rank(x, k));
    report["instability_bound_if_below_m"] = rep.instability_bound;
    report["scaling_verdict"] = to_string(rep.verdict);
    if (rep.reason) report["reason"] = to_string(*rep.reason);
    report["square_scaling_verdict"] = to_string(rep.power_verdict);
    report["square_slice_rank_upper"] = rep.power_upper;
    report["slice_rank_consistent"] = rep.slice_rank_consistent;
    report["square_consistent"] = rep.power_consistent;
    report["verdict"] = rep.verdict == Verdict::InNullCone ? "InNullCone" : "NotInNullCone";
    return rep.verdict == Verdict::InNullCone ? kInNullCone : kNotInNullCone;
}

/**
 * Entry point shared by the executable and the tests. Writes one JSON report
 * to out (errors go to err) and returns the process exit code.
 */
inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Null-cone membership, scaling and invariant tools for tensor actions"};
    app.require_subcommand(1);
    Options o;

    auto add_scaling = [&](CLI::App* sub) {
        sub->add_option("--eps", o.eps, "target precision for ds");
        sub->add_option("--max-iters", o.max_iters, "cap on scaling iterations");
        sub->add_option("--trace,--csv-trace", o.trace, "write iter,axis,ds,norm_sq rows to this CSV file");
        sub->add_option("--precision", o.precision, "double or truncated[:BITS]");
    };

    auto* nullcone = app.add_subcommand("nullcone", "decide null-cone membership");
    nullcone->add_option("tensor", o.input, "tensor JSON file")->required();
    add_scaling(nullcone);
    nullcone->add_option("--mode", o.mode, "scaling, algebraic or both");
    nullcone->add_option("--seed", o.seed, "seed for random invariants");
    nullcone->add_option("--degree-cap", o.degree_cap, "largest invariant degree to try");
    nullcone->add_option("--samples", o.samples, "random invariants per degree");
    nullcone->add_flag("--exhaustive", o.exhaustive, "enumerate every spanning invariant per degree");

    auto* scale_cmd = app.add_subcommand("scale", "run alternating scaling");
    scale_cmd->add_option("tensor", o.input, "tensor JSON file")->required();
    add_scaling(scale_cmd);

    auto* capacity = app.add_subcommand("capacity", "estimate the capacity");
    capacity->add_option("tensor", o.input, "tensor JSON file")->required();
    capacity->add_option("--sweeps", o.sweeps, "cyclic sweeps over the axes");

    auto* deficiency = app.add_subcommand("deficiency", "decide deficiency of a support");
    deficiency->add_option("support", o.input, "support JSON file")->required();
    deficiency->add_option("--certificate", o.certificate, "certificate JSON file to verify");

    auto* invariants = app.add_subcommand("invariants", "evaluate random spanning invariants");
    invariants->add_option("tensor", o.input, "tensor JSON file");
    invariants->add_option("--dims", o.dims, "comma-separated dimensions n0,...,nd");
    invariants->add_option("--degree", o.degree, "invariant degree");
    invariants->add_option("--samples", o.samples, "number of random invariants");
    invariants->add_option("--seed", o.seed, "seed for random invariants");

    auto* slicerank = app.add_subcommand("slicerank", "slice rank bounds and null-cone consistency");
    slicerank->add_option("tensor", o.input, "tensor JSON file")->required();
    slicerank->add_option("--eps", o.eps, "scaling precision");

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return kUsage;
    }

    Json report;
    int code = kUsage;
    try {
        if (*nullcone) report["command"] = "nullcone", code = cmd_nullcone(o, report);
        else if (*scale_cmd) report["command"] = "scale", code = cmd_scale(o, report);
        else if (*capacity) report["command"] = "capacity", code = cmd_capacity(o, report);
        else if (*deficiency) report["command"] = "deficiency", code = cmd_deficiency(o, report);
        else if (*invariants) report["command"] = "invariants", code = cmd_invariants(o, report);
        else if (*slicerank) report["command"] = "slicerank", code = cmd_slicerank(o, report);
    } catch (const ParseError& e) {
        err << "parse error: " << e.what() << "\n";
        return kParse;
    } catch (const ArgumentError& e) {
        err << "usage error: " << e.what() << "\n";
        return kUsage;
    } catch (const InconclusiveError& e) {
        report["verdict"] = "Inconclusive";
        report["reason"] = e.what();
        code = kInconclusive;
    } catch (const ResourceError& e) {
        report["verdict"] = "Inconclusive";
        report["reason"] = std::string("resource limit: ") + e.what();
        code = kInconclusive;
    } catch (const NumericalError& e) {
        report["verdict"] = "Inconclusive";
        report["reason"] = std::string("numerical failure: ") + e.what();
        code = kInconclusive;
    }
    report["exit_code"] = code;
    out << report.dump(2) << "\n";
    return code;
}

}  // namespace nullcone::cli
