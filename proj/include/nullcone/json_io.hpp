#pragma once

#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "nullcone/duality.hpp"
#include "nullcone/errors.hpp"
#include "nullcone/invariants.hpp"
#include "nullcone/polynomial.hpp"
#include "nullcone/tensor.hpp"

namespace nullcone::io {

using Json = nlohmann::json;

inline Json parse_json(const std::string& text) {
    try {
        return Json::parse(text);
    } catch (const Json::parse_error& e) {
        throw ParseError(std::string("invalid JSON: ") + e.what());
    }
}

namespace detail {

inline std::vector<std::size_t> read_dims(const Json& j, const char* key) {
    if (!j.is_object() || !j.contains(key) || !j[key].is_array()) throw ParseError(std::string("missing '") + key + "' array");
    std::vector<std::size_t> dims;
    for (const auto& v : j[key]) {
        if (!v.is_number_integer() || v.get<long long>() <= 0) throw ParseError("dimensions must be positive integers");
        dims.push_back(v.get<std::size_t>());
    }
    return dims;
}

// 1-based JSON indices to 0-based.
inline std::vector<std::size_t> read_index(const Json& j, const std::vector<std::size_t>& dims) {
    if (!j.is_array() || j.size() != dims.size()) throw ParseError("index has the wrong arity");
    std::vector<std::size_t> idx;
    for (std::size_t a = 0; a < dims.size(); ++a) {
        if (!j[a].is_number_integer()) throw ParseError("indices must be integers");
        long long v = j[a].get<long long>();
        if (v < 1 || static_cast<std::size_t>(v) > dims[a]) throw ParseError("index out of range");
        idx.push_back(static_cast<std::size_t>(v - 1));
    }
    return idx;
}

struct Scalar {
    bool exact = true;
    Rational q;
    double f = 0;
};

inline Scalar read_scalar(const Json& j) {
    Scalar s;
    if (j.is_number_integer()) {
        s.q = j.is_number_unsigned() ? Rational(BigInt(j.get<unsigned long long>())) : Rational(BigInt(j.get<long long>()));
        s.f = to_double(s.q);
    } else if (j.is_number_float()) {
        s.exact = false;
        s.f = j.get<double>();
    } else if (j.is_string()) {
        s.q = parse_rational(j.get<std::string>());
        s.f = to_double(s.q);
    } else {
        throw ParseError("entry values must be numbers or rational strings");
    }
    return s;
}

}  // namespace detail

/**
 * {"dims":[n0,...,nd],"entries":[{"idx":[j0,...,jd],"re":..,"im":..}]} with
 * 1-based indices; omitted entries are zero. Integer or "p/q" string values
 * give an exact tensor, any floating value gives a floating one.
 */
inline Tensor tensor_from_json(const Json& j) {
    auto dims = detail::read_dims(j, "dims");
    const std::size_t n = Tensor::checked_size(dims);
    if (!j.contains("entries") || !j["entries"].is_array()) throw ParseError("missing 'entries' array");
    Tensor shape = Tensor::zeros(dims);
    std::vector<GaussianRational> exact(n);
    std::vector<Complex> fl(n);
    std::vector<bool> seen(n, false);
    bool all_exact = true;
    for (const auto& e : j["entries"]) {
        if (!e.is_object() || !e.contains("idx")) throw ParseError("entry without 'idx'");
        auto idx = detail::read_index(e["idx"], dims);
        const std::size_t f = shape.flat_index(idx);
        if (seen[f]) throw ParseError("duplicate entry index");
        seen[f] = true;
        detail::Scalar re = e.contains("re") ? detail::read_scalar(e["re"]) : detail::Scalar{};
        detail::Scalar im = e.contains("im") ? detail::read_scalar(e["im"]) : detail::Scalar{};
        all_exact = all_exact && re.exact && im.exact;
        exact[f] = GaussianRational(re.q, im.q);
        fl[f] = Complex(re.f, im.f);
    }
    if (all_exact) return Tensor::from_exact(std::move(dims), std::move(exact));
    return Tensor(std::move(dims), std::move(fl));
}

inline Tensor tensor_from_text(const std::string& text) { return tensor_from_json(parse_json(text)); }

inline Json scalar_json(const Rational& q) {
    if (denominator(q) == 1 && abs(numerator(q)) < BigInt(1) << 53) return numerator(q).convert_to<long long>();
    return to_string(q);
}

// Nonzero entries only, in row-major order.
inline Json tensor_to_json(const Tensor& x) {
    Json j;
    j["dims"] = x.dims();
    Json entries = Json::array();
    for (std::size_t f = 0; f < x.size(); ++f) {
        Json idx = Json::array();
        for (std::size_t v : x.multi_index(f)) idx.push_back(v + 1);
        if (x.is_exact()) {
            const auto& z = x.exact_entries()[f];
            if (z.is_zero()) continue;
            Json e{{"idx", idx}, {"re", scalar_json(z.re)}};
            if (z.im != 0) e["im"] = scalar_json(z.im);
            entries.push_back(e);
        } else {
            if (x[f] == Complex(0)) continue;
            Json e{{"idx", idx}, {"re", x[f].real()}};
            if (x[f].imag() != 0) e["im"] = x[f].imag();
            entries.push_back(e);
        }
    }
    j["entries"] = entries;
    return j;
}

// {"dims":[n1..nd],"tuples":[[j1..jd],...]} with 1-based tuples.
inline Support support_from_json(const Json& j) {
    Support s;
    s.dims = detail::read_dims(j, "dims");
    if (s.dims.empty()) throw ParseError("support needs at least one axis");
    if (!j.contains("tuples") || !j["tuples"].is_array()) throw ParseError("missing 'tuples' array");
    for (const auto& t : j["tuples"]) s.tuples.push_back(detail::read_index(t, s.dims));
    s.normalize();
    return s;
}

inline Json support_to_json(const Support& s) {
    Json tuples = Json::array();
    for (const auto& t : s.tuples) {
        Json row = Json::array();
        for (std::size_t v : t) row.push_back(v + 1);
        tuples.push_back(row);
    }
    return Json{{"dims", s.dims}, {"tuples", tuples}};
}

inline Json big_json(const BigInt& v) {
    if (abs(v) < BigInt(1) << 53) return v.convert_to<long long>();
    return v.str();
}

// {"a":[[...],...]}
inline Json certificate_to_json(const DeficiencyCertificate& c) {
    Json rows = Json::array();
    for (const auto& r : c.a) {
        Json row = Json::array();
        for (const auto& v : r) row.push_back(big_json(v));
        rows.push_back(row);
    }
    return Json{{"a", rows}};
}

inline DeficiencyCertificate certificate_from_json(const Json& j) {
    if (!j.is_object() || !j.contains("a") || !j["a"].is_array()) throw ParseError("missing 'a' array");
    DeficiencyCertificate c;
    for (const auto& row : j["a"]) {
        if (!row.is_array()) throw ParseError("certificate rows must be arrays");
        c.a.emplace_back();
        for (const auto& v : row) {
            if (v.is_number_integer()) c.a.back().push_back(BigInt(v.get<long long>()));
            else if (v.is_string()) c.a.back().push_back(BigInt(v.get<std::string>()));
            else throw ParseError("certificate entries must be integers");
        }
    }
    return c;
}

inline std::string exponent_key(const Exponent& e) {
    std::string k;
    for (std::size_t i = 0; i < e.size(); ++i) {
        if (i) k += ',';
        k += std::to_string(e[i]);
    }
    return k;
}

// {"nvars":n,"terms":{"e1,...,en":"coefficient"}}
inline Json polynomial_to_json(const Polynomial& p) {
    Json terms = Json::object();
    for (const auto& [e, c] : p.terms()) terms[exponent_key(e)] = to_string(c);
    return Json{{"nvars", p.nvars()}, {"terms", terms}};
}

inline Polynomial polynomial_from_json(const Json& j) {
    if (!j.is_object() || !j.contains("nvars") || !j["nvars"].is_number_integer())
        throw ParseError("polynomial needs 'nvars'");
    Polynomial p(j["nvars"].get<std::size_t>());
    if (!j.contains("terms")) return p;
    if (!j["terms"].is_object()) throw ParseError("'terms' must be an object");
    for (const auto& [key, val] : j["terms"].items()) {
        Exponent e;
        std::stringstream ss(key);
        std::string part;
        while (std::getline(ss, part, ',')) {
            try {
                e.push_back(static_cast<std::uint32_t>(std::stoul(part)));
            } catch (const std::exception&) {
                throw ParseError("bad exponent key '" + key + "'");
            }
        }
        if (key.empty()) e.clear();
        if (e.size() != p.nvars()) throw ParseError("exponent key '" + key + "' has the wrong length");
        Rational c = val.is_string() ? parse_rational(val.get<std::string>()) : detail::read_scalar(val).q;
        p.add_term(e, c);
    }
    return p;
}

// {"n":n,"factors":[{"m":m,"degree":l,"rho":{"a,b":polynomial,...}}]} with 1-based (a, b); absent entries are zero.
inline ActionSpec action_from_json(const Json& j) {
    ActionSpec spec;
    if (!j.is_object() || !j.contains("n") || !j.contains("factors")) throw ParseError("action needs 'n' and 'factors'");
    spec.n = j["n"].get<std::size_t>();
    for (const auto& fj : j["factors"]) {
        ActionFactor f;
        f.m = fj.at("m").get<std::size_t>();
        f.degree = fj.at("degree").get<std::size_t>();
        f.rho.assign(spec.n, std::vector<Polynomial>(spec.n, Polynomial(f.m * f.m)));
        for (const auto& [key, val] : fj.at("rho").items()) {
            auto comma = key.find(',');
            if (comma == std::string::npos) throw ParseError("rho keys must be 'row,col'");
            std::size_t a = std::stoul(key.substr(0, comma)), b = std::stoul(key.substr(comma + 1));
            if (a < 1 || b < 1 || a > spec.n || b > spec.n) throw ParseError("rho index out of range");
            f.rho[a - 1][b - 1] = polynomial_from_json(val);
        }
        spec.factors.push_back(std::move(f));
    }
    spec.validate();
    return spec;
}

inline Json gaussian_json(const GaussianRational& z) { return Json{{"re", to_string(z.re)}, {"im", to_string(z.im)}}; }

inline Json invariant_json(const SpanningInvariant& inv) {
    Json perms = Json::array();
    for (const auto& p : inv.perms) {
        Json row = Json::array();
        for (std::size_t v : p) row.push_back(v + 1);
        perms.push_back(row);
    }
    Json idx = Json::array();
    for (std::size_t v : inv.idx) idx.push_back(v + 1);
    return Json{{"degree", inv.m}, {"perms", perms}, {"idx", idx}};
}

inline Json witness_json(const AlgebraicWitness& w) {
    Json j;
    if (w.kind == AlgebraicWitness::Kind::Spanning) {
        j = invariant_json(w.invariant);
        j["kind"] = "spanning";
    } else {
        j["kind"] = "reynolds";
        j["monomial"] = exponent_key(w.monomial);
    }
    j["value"] = gaussian_json(w.value);
    return j;
}

}  // namespace nullcone::io
