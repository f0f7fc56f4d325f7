#pragma once

// Structured output: every record becomes a JSON value (objects keep sorted
// keys), rendered either as strict JSON or as flattened `key = value` lines.

#include <string>

#include "json.hpp"
#include "kida/kida.hpp"

namespace kida::report {

using json = nlohmann::json;

/// Integers that fit 64 bits stay numbers; larger ones become decimal strings.
inline json integer(Int v) {
    if (v >= Int(INT64_MIN) && v <= Int(INT64_MAX)) return json(static_cast<std::int64_t>(v));
    return json(kida::to_string(v));
}

inline json optional_u64(const std::optional<u64>& v) { return v ? json(*v) : json("unknown"); }

inline json to_json(const splitting::PlaceData& d) { return {{"ell", d.ell}, {"e", d.e}, {"f", d.f}, {"g", d.g}}; }

inline json to_json(const splitting::TowerPlaceData& t) {
    json layers = json::array();
    for (const auto& l : t.layers)
        layers.push_back({{"level", l.level}, {"cyclotomic_level", l.cyclotomic_level}, {"modulus", l.modulus},
                          {"degree", l.degree}, {"places", l.places}});
    return {{"ell", t.ell},          {"p", t.p},           {"g_base", t.g_base},
            {"g_infinity", t.g_infinity}, {"ramified", t.ramified}, {"layers", layers}};
}

inline json to_json(const InvariantRecord& r) {
    return {{"kind", to_string(r.kind)},
            {"mu", optional_u64(r.mu)},
            {"lambda", optional_u64(r.lambda)},
            {"provenance", to_string(r.provenance)}};
}

inline json to_json(const LocalFactorReport& l) {
    json j{{"ell", l.ell},
           {"local_degree", l.local_degree},
           {"places", l.places},
           {"base_places", l.base_places},
           {"base_efg", to_json(l.base)},
           {"local_type", localfactor::to_string(l.type)},
           {"type_source", l.type_source},
           {"case", l.h_case},
           {"m", integer(l.m)},
           {"contribution", integer(Int(l.places) * l.m)}};
    j["h"] = l.h ? integer(*l.h) : json("n/a");
    return j;
}

inline json to_json(const TransitionReport& r) {
    json places = json::array();
    for (const auto& pl : r.places) places.push_back(to_json(pl));
    json hyp = json::object();
    for (const auto& [k, v] : r.hypotheses.flags) hyp[k] = v;
    json j{{"form", r.form},
           {"p", r.p},
           {"base", r.base.describe()},
           {"extension", r.ext.describe()},
           {"kind", to_string(r.kind)},
           {"degree", r.degree},
           {"finite_degree", r.finite_degree},
           {"unramified_at_p", r.unramified_at_p},
           {"linearly_disjoint", r.linearly_disjoint},
           {"places", places},
           {"m_total", integer(r.m_total)},
           {"input", to_json(r.input)},
           {"output", to_json(r.output)},
           {"hypotheses", hyp},
           {"warnings", r.warnings}};
    j["lambda_h_route"] = r.lambda_h_route ? integer(*r.lambda_h_route) : json("n/a");
    return j;
}

inline json to_json(const MainConjectureTransfer& t) {
    return {{"base_status", t.base_status},
            {"extension_status", t.extension_status},
            {"lambda_algebraic", t.lambda_algebraic},
            {"lambda_analytic", t.lambda_analytic},
            {"statement", t.statement}};
}

namespace detail {
inline std::string scalar(const json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_null()) return "null";
    return v.dump();
}

inline void flatten(const json& v, const std::string& prefix, std::string& out) {
    if (v.is_object()) {
        if (v.empty() && !prefix.empty()) out += prefix + " = {}\n";
        for (auto it = v.begin(); it != v.end(); ++it)
            flatten(it.value(), prefix.empty() ? it.key() : prefix + "." + it.key(), out);
    } else if (v.is_array()) {
        if (v.empty()) out += prefix + " = []\n";
        for (std::size_t i = 0; i < v.size(); ++i) flatten(v[i], prefix + "." + std::to_string(i), out);
    } else {
        out += prefix + " = " + scalar(v) + "\n";
    }
}
} // namespace detail

/// One `key = value` line per leaf, nested keys joined by dots.
inline std::string render_kv(const json& v) {
    std::string out;
    detail::flatten(v, "", out);
    return out;
}

inline std::string render_json(const json& v) { return v.dump(2) + "\n"; }

inline std::string render(const json& v, bool as_json) { return as_json ? render_json(v) : render_kv(v); }

} // namespace kida::report
