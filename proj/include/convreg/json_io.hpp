#pragma once

// JSON descriptors for functions, sets and schedules (the CLI interchange
// format) plus report serialization. Infinities travel as the strings
// "inf" / "-inf" since JSON has no literal for them.

#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "convreg/duality.hpp"
#include "convreg/proximal.hpp"
#include "convreg/regularity.hpp"

namespace convreg {

using nlohmann::json;

inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline json extended_to_json(double v) {
    if (v == kInf) return "inf";
    if (v == -kInf) return "-inf";
    return v;
}

inline double extended_from_json(const json& j) {
    if (j.is_string()) {
        const std::string s = j.get<std::string>();
        if (s == "inf" || s == "+inf") return kInf;
        if (s == "-inf") return -kInf;
        throw std::invalid_argument("expected a number or \"inf\"/\"-inf\", got \"" + s + "\"");
    }
    return j.get<double>();
}

inline Vec vec_from_json(const json& j) {
    Vec v;
    for (const auto& e : j) v.push_back(extended_from_json(e));
    return v;
}

inline json vec_to_json(const Vec& v) {
    json j = json::array();
    for (double x : v) j.push_back(extended_to_json(x));
    return j;
}

inline Mat mat_from_json(const json& j) {
    Mat m;
    for (const auto& row : j) m.push_back(vec_from_json(row));
    return m;
}

inline FunPtr function_from_json(const json& j) {
    const std::string type = j.at("type").get<std::string>();
    if (type == "quadratic") return ConvexFunctionSpec::quadratic(mat_from_json(j.at("A")), vec_from_json(j.at("b")));
    if (type == "abs") return ConvexFunctionSpec::abs();
    if (type == "power_even") return ConvexFunctionSpec::power_even(j.at("p").get<int>());
    if (type == "max_affine") {
        std::vector<Vec> slopes;
        for (const auto& s : j.at("slopes")) slopes.push_back(vec_from_json(s));
        return ConvexFunctionSpec::max_affine(std::move(slopes), vec_from_json(j.at("intercepts")));
    }
    if (type == "indicator_box")
        return ConvexFunctionSpec::indicator_box(vec_from_json(j.at("lo")), vec_from_json(j.at("hi")));
    if (type == "scaled")
        return ConvexFunctionSpec::scaled(function_from_json(j.at("inner")), j.at("alpha").get<double>());
    if (type == "sum")
        return ConvexFunctionSpec::sum(function_from_json(j.at("left")), function_from_json(j.at("right")));
    if (type == "separable") {
        std::vector<FunPtr> parts;
        for (const auto& p : j.at("parts")) parts.push_back(function_from_json(p));
        return ConvexFunctionSpec::separable(std::move(parts));
    }
    if (type == "tilted")
        return ConvexFunctionSpec::tilted(function_from_json(j.at("inner")), vec_from_json(j.at("tilt")));
    throw std::invalid_argument("unknown function type: " + type);
}

inline json set_to_json(const ConvexSet& S) {
    json j;
    if (S.is_empty()) {
        j["type"] = "empty";
    } else if (auto* s = S.as<Singleton>()) {
        j["type"] = "singleton";
        j["v"] = vec_to_json(s->v);
    } else if (auto* b = S.as<Box>()) {
        j["type"] = "box";
        j["lo"] = vec_to_json(b->lo);
        j["hi"] = vec_to_json(b->hi);
    } else if (auto* p = S.as<Polytope>()) {
        j["type"] = "polytope";
        j["vertices"] = json::array();
        for (const Vec& v : p->vertices) j["vertices"].push_back(vec_to_json(v));
    } else if (auto* a = S.as<AffineSet>()) {
        j["type"] = "affine";
        j["point"] = vec_to_json(a->point);
        j["basis"] = json::array();
        for (const Vec& v : a->basis) j["basis"].push_back(vec_to_json(v));
    } else {
        j["type"] = "distance_oracle";
        j["tag"] = S.as<DistanceOracle>()->tag;
    }
    return j;
}

inline ConvexSet set_from_json(const json& j) {
    const std::string type = j.at("type").get<std::string>();
    if (type == "empty") return ConvexSet::empty();
    if (type == "singleton") return ConvexSet::singleton(vec_from_json(j.at("v")));
    if (type == "box") return ConvexSet::box(vec_from_json(j.at("lo")), vec_from_json(j.at("hi")));
    if (type == "polytope") {
        std::vector<Vec> verts;
        for (const auto& v : j.at("vertices")) verts.push_back(vec_from_json(v));
        return ConvexSet::polytope(std::move(verts));
    }
    if (type == "affine") {
        std::vector<Vec> basis;
        for (const auto& v : j.at("basis")) basis.push_back(vec_from_json(v));
        return ConvexSet::affine(vec_from_json(j.at("point")), std::move(basis));
    }
    throw std::invalid_argument("unknown set type: " + type);
}

inline ProxSchedule schedule_from_json(const json& j) {
    ProxSchedule sched;
    const std::string type = j.at("type").get<std::string>();
    if (type == "constant")
        sched.variant = ConstantSchedule{j.at("lambda").get<double>()};
    else if (type == "harmonic")
        sched.variant = HarmonicSchedule{j.at("lambda0").get<double>()};
    else if (type == "explicit")
        sched.variant = ExplicitSchedule{j.at("values").get<std::vector<double>>()};
    else
        throw std::invalid_argument("unknown schedule type: " + type);
    if (j.contains("max_iterations")) sched.max_iterations = j.at("max_iterations").get<int>();
    if (j.contains("stop_tolerance")) sched.stop_tolerance = j.at("stop_tolerance").get<double>();
    sched.validate();
    return sched;
}

inline json modulus_report_to_json(const ModulusReport& rep) {
    json j;
    j["schema"] = "1";
    j["kind"] = to_string(rep.kind);
    j["value"] = extended_to_json(rep.value);
    j["witness"] = vec_to_json(rep.witness);
    j["classification"] = to_string(rep.classification);
    j["radii_sweep"] = json::array();
    for (const auto& [r, v] : rep.radii_sweep)
        j["radii_sweep"].push_back({{"radius", r}, {"value", extended_to_json(v)}});
    return j;
}

inline json rate_report_to_json(const RateReport& rep) {
    json j;
    j["schema"] = "1";
    j["classification"] = to_string(rep.classification);
    j["fitted_q"] = rep.fitted_q;
    j["errors"] = rep.errors;
    j["ratios"] = rep.ratios;
    return j;
}

inline std::string vec_to_csv_field(const Vec& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) s += ';';
        s += format_double(v[i]);
    }
    return s;
}

inline void write_ledger_csv(const std::string& path, const std::vector<LedgerEntry>& ledger) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << "x,numerator,denominator,ratio\n";
    for (const auto& e : ledger)
        out << vec_to_csv_field(e.x) << ',' << format_double(e.numerator) << ','
            << format_double(e.denominator) << ',' << format_double(e.numerator / e.denominator)
            << '\n';
}

inline void write_run_csv(const std::string& path, const ProxRun& run, const Vec& xstar) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << "n,x,f,step,residual,error,ratio\n";
    double prev_error = -1.0;
    for (std::size_t n = 0; n < run.steps.size(); ++n) {
        const auto& s = run.steps[n];
        const double error = norm(sub(s.x, xstar));
        out << n << ',' << vec_to_csv_field(s.x) << ',' << format_double(s.fx) << ','
            << format_double(s.step_length) << ',' << format_double(s.residual) << ','
            << format_double(error) << ',';
        if (n > 0 && prev_error > 1e-14) out << format_double(error / prev_error);
        out << '\n';
        prev_error = error;
    }
}

inline void write_error_csv(const std::string& path, const ProxRun& run, const Vec& xstar) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << "n,error\n";
    for (std::size_t n = 0; n < run.steps.size(); ++n)
        out << n << ',' << format_double(norm(sub(run.steps[n].x, xstar))) << '\n';
}

inline void write_json_file(const std::string& path, const json& j) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << j.dump(2) << '\n';
}

}  // namespace convreg
