#pragma once

// Measure documents:
//
//   {
//     "atoms":   [{"loc": 0.0, "mass": 1.0}, ...],
//     "density": [{"lo": 0.0, "hi": 1.0, "value": 1.0}, ...],
//     "counterexample": {"K": 6}
//   }
//
// All keys are optional; the counterexample directive appends the atoms of
// sum_{k=1..K} (delta_{k^2} + delta_{k^2 + 2^-k}).

#include "wlt/errors.hpp"
#include "wlt/measure.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace wlt {

namespace detail {

inline double number_field(const nlohmann::json& obj, const char* key, const std::string& path) {
    const std::string field = path + "." + key;
    if (!obj.is_object() || !obj.contains(key)) throw config_error(field, "missing");
    const auto& v = obj.at(key);
    if (!v.is_number()) throw config_error(field, "must be a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) throw config_error(field, "must be finite");
    return d;
}

}  // namespace detail

[[nodiscard]] inline WeightedMeasure measure_from_json(const nlohmann::json& doc,
                                                       const std::string& path = "measure") {
    if (!doc.is_object()) throw config_error(path, "must be an object");
    for (const auto& [key, _] : doc.items()) {
        if (key != "atoms" && key != "density" && key != "counterexample") {
            throw config_error(path + "." + key, "unknown key");
        }
    }
    std::vector<Atom> atoms;
    std::vector<DensityPiece> pieces;
    if (doc.contains("atoms")) {
        const auto& list = doc.at("atoms");
        if (!list.is_array()) throw config_error(path + ".atoms", "must be an array");
        for (std::size_t i = 0; i < list.size(); ++i) {
            const std::string p = path + ".atoms[" + std::to_string(i) + "]";
            const double loc = detail::number_field(list[i], "loc", p);
            const double mass = detail::number_field(list[i], "mass", p);
            if (!(mass > 0.0)) throw config_error(p + ".mass", "must be > 0");
            atoms.push_back({loc, mass});
        }
    }
    if (doc.contains("density")) {
        const auto& list = doc.at("density");
        if (!list.is_array()) throw config_error(path + ".density", "must be an array");
        for (std::size_t i = 0; i < list.size(); ++i) {
            const std::string p = path + ".density[" + std::to_string(i) + "]";
            const double lo = detail::number_field(list[i], "lo", p);
            const double hi = detail::number_field(list[i], "hi", p);
            const double value = detail::number_field(list[i], "value", p);
            if (!(lo < hi)) throw config_error(p, "need lo < hi");
            if (value < 0.0) throw config_error(p + ".value", "must be >= 0");
            pieces.push_back({lo, hi, value});
        }
    }
    if (doc.contains("counterexample")) {
        const std::string p = path + ".counterexample";
        const double k = detail::number_field(doc.at("counterexample"), "K", p);
        if (k != std::floor(k) || k < 1 || k > 40) throw config_error(p + ".K", "must be an integer in [1, 40]");
        const WeightedMeasure extra = counterexample_measure(static_cast<int>(k));
        atoms.insert(atoms.end(), extra.atoms().begin(), extra.atoms().end());
    }
    try {
        return WeightedMeasure(std::move(atoms), std::move(pieces));
    } catch (const argument_error& e) {
        throw config_error(path, e.what());
    }
}

[[nodiscard]] inline nlohmann::json parse_document(std::string_view text,
                                                   const std::string& what = "config") {
    try {
        return nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw config_error(what, std::string("not valid JSON: ") + e.what());
    }
}

[[nodiscard]] inline nlohmann::json load_document(const std::string& file) {
    std::ifstream in(file);
    if (!in) throw config_error(file, "cannot open");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_document(buf.str(), file);
}

[[nodiscard]] inline WeightedMeasure parse_measure(std::string_view text) {
    return measure_from_json(parse_document(text, "measure"));
}

[[nodiscard]] inline nlohmann::ordered_json to_json(const WeightedMeasure& mu) {
    nlohmann::ordered_json atoms = nlohmann::ordered_json::array();
    for (const Atom& a : mu.atoms()) atoms.push_back({{"loc", a.location}, {"mass", a.mass}});
    nlohmann::ordered_json density = nlohmann::ordered_json::array();
    for (const DensityPiece& p : mu.density()) {
        density.push_back({{"lo", p.lo}, {"hi", p.hi}, {"value", p.value}});
    }
    return {{"atoms", atoms}, {"density", density}};
}

}  // namespace wlt
