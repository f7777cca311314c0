#pragma once

// JSON encodings of measures, inversion results and membership reports.
// Exact rationals are written as strings ("3/2"); numbers are accepted on
// input and read through their shortest decimal form.

#include <cmath>
#include <string>

#include <json.hpp>

#include "stieltjesk/expr_parse.hpp"
#include "stieltjesk/membership.hpp"
#include "stieltjesk/stieltjes.hpp"

namespace stieltjesk {

inline constexpr const char* kJsonSchema = "stieltjes-k/1";

using Json = nlohmann::ordered_json;

namespace detail {

inline Rational rational_from_json(const Json& j, const char* what) {
    if (j.is_string()) return parse_rational(j.get<std::string>());
    if (j.is_number_integer() || j.is_number_unsigned()) return parse_rational(j.dump());
    if (j.is_number_float()) {
        const double d = j.get<double>();
        if (!std::isfinite(d)) throw std::invalid_argument(std::string(what) + " must be finite");
        return parse_rational(j.dump());
    }
    throw std::invalid_argument(std::string(what) + " must be a number or a rational string");
}

inline Json real_json(double v) {
    if (std::isfinite(v)) return v;
    return Json(std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf"));
}

}  // namespace detail

inline Json to_json(const MeasureSpec& mu) {
    Json j;
    j["atoms"] = Json::array();
    for (const auto& a : mu.atoms) j["atoms"].push_back(Json::array({to_string(a.location), to_string(a.mass)}));
    j["pieces"] = Json::array();
    for (const auto& p : mu.pieces) {
        Json q;
        q["a"] = to_string(p.a);
        q["b"] = p.b ? Json(to_string(*p.b)) : Json("inf");
        q["density"] = to_string(p.density);
        j["pieces"].push_back(q);
    }
    j["tail_exponent"] = mu.tail_exponent ? Json(*mu.tail_exponent) : Json(nullptr);
    return j;
}

/// Parses {"atoms":[[loc,mass],...],"pieces":[{"a":..,"b":..,"density":"<expr>"}],"tail_exponent":s}.
/// "b" may be "inf" or absent for an unbounded piece. Validation is left to the caller.
inline MeasureSpec measure_from_json(const Json& j) {
    if (!j.is_object()) throw std::invalid_argument("measure must be a JSON object");
    MeasureSpec mu;
    if (j.contains("atoms")) {
        for (const auto& a : j.at("atoms")) {
            if (!a.is_array() || a.size() != 2) throw std::invalid_argument("atom must be [location, mass]");
            mu.atoms.push_back({detail::rational_from_json(a[0], "atom location"), detail::rational_from_json(a[1], "atom mass")});
        }
    }
    if (j.contains("pieces")) {
        for (const auto& p : j.at("pieces")) {
            if (!p.is_object() || !p.contains("a") || !p.contains("density"))
                throw std::invalid_argument("piece needs \"a\" and \"density\"");
            DensityPiece d{detail::rational_from_json(p.at("a"), "piece start"), std::nullopt,
                           parse_model(p.at("density").get<std::string>())};
            if (p.contains("b") && !(p.at("b").is_string() && p.at("b").get<std::string>() == "inf") && !p.at("b").is_null())
                d.b = detail::rational_from_json(p.at("b"), "piece end");
            mu.pieces.push_back(std::move(d));
        }
    }
    if (j.contains("tail_exponent") && !j.at("tail_exponent").is_null()) mu.tail_exponent = j.at("tail_exponent").get<double>();
    return mu;
}

inline MeasureSpec measure_from_json_text(const std::string& text) {
    Json j;
    try {
        j = Json::parse(text);
    } catch (const Json::parse_error& e) {
        throw std::invalid_argument(std::string("measure JSON: ") + e.what());
    }
    return measure_from_json(j);
}

inline Json to_json(const LimitValue& v) {
    Json j;
    j["value"] = detail::real_json(static_cast<double>(v.value));
    if (v.exact) j["exact"] = to_string(*v.exact);
    j["uncertainty"] = detail::real_json(static_cast<double>(v.uncertainty));
    j["method"] = v.method;
    return j;
}

inline Json to_json(const InversionResult& r) {
    Json j;
    j["schema"] = kJsonSchema;
    j["kind"] = "inversion";
    j["k"] = r.k;
    j["drift"] = to_json(r.drift);
    j["atom_at_zero"] = to_json(r.atom_at_zero);
    j["b_k"] = to_json(r.b_k);
    j["measure"] = to_json(r.measure);
    j["density"] = to_string(r.density);
    if (r.negative_witness) j["negative_density_at"] = Json::array({r.negative_witness->first, r.negative_witness->second});
    return j;
}

inline Json to_json(const OrderVerdict& o) {
    Json j;
    j["order"] = o.order;
    j["condition"] = o.condition;
    j["verdict"] = to_string(o.verdict);
    j["worst_margin"] = detail::real_json(o.worst_margin);
    j["location"] = detail::real_json(o.location);
    if (o.u) j["u"] = *o.u;
    j["method"] = o.method;
    return j;
}

inline Json to_json(const MembershipReport& r) {
    Json j;
    j["schema"] = kJsonSchema;
    j["kind"] = "membership";
    j["test"] = r.test;
    j["k"] = r.k;
    j["verdict"] = to_string(r.verdict);
    j["worst_margin"] = detail::real_json(r.worst_margin);
    j["location"] = detail::real_json(r.location);
    if (r.u) j["u"] = *r.u;
    j["method"] = r.method;
    j["grid"] = r.grid;
    j["sign_tolerance"] = r.sign_tolerance;
    j["orders"] = Json::array();
    for (const auto& o : r.orders) j["orders"].push_back(to_json(o));
    return j;
}

}  // namespace stieltjesk
