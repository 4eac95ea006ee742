#pragma once

// Exact proximal point iteration, the generalized variant driven by
// Lipschitz step functions, and deterministic convergence-rate
// classification of the error sequence.

#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "convreg/catalog.hpp"

namespace convreg {

struct ConstantSchedule {
    double lambda;
};

struct HarmonicSchedule {
    double lambda0;  // lambda_n = lambda0 / (n + 1)
};

struct ExplicitSchedule {
    std::vector<double> values;
};

struct ProxSchedule {
    std::variant<ConstantSchedule, HarmonicSchedule, ExplicitSchedule> variant;
    int max_iterations = 200;
    double stop_tolerance = 1e-13;  // on step length

    double lambda_at(int n) const {
        if (auto* c = std::get_if<ConstantSchedule>(&variant)) return c->lambda;
        if (auto* h = std::get_if<HarmonicSchedule>(&variant)) return h->lambda0 / (n + 1);
        const auto& v = std::get<ExplicitSchedule>(variant).values;
        if (n >= static_cast<int>(v.size()))
            throw std::out_of_range("ProxSchedule: explicit schedule exhausted");
        return v[n];
    }

    int step_count() const {
        if (auto* e = std::get_if<ExplicitSchedule>(&variant))
            return std::min<int>(max_iterations, static_cast<int>(e->values.size()));
        return max_iterations;
    }

    void validate() const {
        if (max_iterations < 1) throw std::invalid_argument("ProxSchedule: max_iterations < 1");
        for (int n = 0; n < step_count(); ++n)
            if (!(lambda_at(n) > 0.0)) throw std::invalid_argument("ProxSchedule: lambda must be positive");
    }
};

struct IterationStep {
    Vec x;
    double fx;
    double step_length;
    double residual;  // d(lambda (x_prev - x), df(x))
};

struct ProxRun {
    std::vector<IterationStep> steps;  // steps[0] is the initial point

    std::vector<Vec> iterates() const {
        std::vector<Vec> out;
        for (const auto& s : steps) out.push_back(s.x);
        return out;
    }
};

inline ProxRun run_exact_ppa(const ConvexFunctionSpec& f, const Vec& x0, const ProxSchedule& sched) {
    sched.validate();
    ProxRun run;
    run.steps.push_back({x0, value(f, x0), 0.0, 0.0});
    Vec x = x0;
    for (int n = 0; n < sched.step_count(); ++n) {
        const double lambda = sched.lambda_at(n);
        const Vec z = prox(f, lambda, x);
        const double step = norm(sub(z, x));
        const double residual = set_distance(subdifferential(f, z), scale(sub(x, z), lambda));
        run.steps.push_back({z, value(f, z), step, residual});
        x = z;
        if (step <= sched.stop_tolerance) break;
    }
    return run;
}

// Step functions for the generalized iteration 0 in g_n(x_{n+1} - x_n) + df(x_{n+1}).
struct LinearStep {
    double lambda;
};

struct SaturatedStep {
    double lambda, cap;  // g(u) = lambda * clamp(u, -cap, cap)
};

struct GeneralizedStep {
    std::variant<LinearStep, SaturatedStep> variant;

    double operator()(double u) const {
        if (auto* l = std::get_if<LinearStep>(&variant)) return l->lambda * u;
        const auto& s = std::get<SaturatedStep>(variant);
        return s.lambda * std::clamp(u, -s.cap, s.cap);
    }

    double lipschitz_constant() const {
        if (auto* l = std::get_if<LinearStep>(&variant)) return l->lambda;
        return std::get<SaturatedStep>(variant).lambda;
    }
};

namespace detail {

// Solve 0 in g(u - x) + df(u) in one dimension. g nondecreasing with g(0)=0
// and df monotone, so the residual interval crosses zero monotonically.
inline double solve_generalized_step(const ConvexFunctionSpec& f, const GeneralizedStep& g, double x) {
    auto status = [&](double u) -> int {
        const auto iv = as_interval(subdifferential(f, {u}));
        if (!iv) throw std::runtime_error("generalized step: left the domain during bisection");
        const double gv = g(u - x);
        if (iv->hi + gv < 0.0) return +1;  // solution is to the right
        if (iv->lo + gv > 0.0) return -1;  // to the left
        return 0;
    };
    double width = 1.0;
    double lo = x - width, hi = x + width;
    int slo = status(lo), shi = status(hi);
    for (int attempt = 0; (slo < 0 || shi > 0) && attempt < 60; ++attempt) {
        width *= 2.0;
        if (slo < 0) {
            lo -= width;
            slo = status(lo);
        }
        if (shi > 0) {
            hi += width;
            shi = status(hi);
        }
    }
    if (slo < 0 || shi > 0) {
        std::ostringstream msg;
        msg << "generalized step: no sign change in bracket [" << lo << ", " << hi
            << "] for x = " << x << " (status " << slo << ", " << shi << ")";
        throw std::runtime_error(msg.str());
    }
    if (slo == 0) return lo;
    if (shi == 0) return hi;
    while (hi - lo > kBisectTol) {
        const double mid = 0.5 * (lo + hi);
        const int s = status(mid);
        if (s == 0) return mid;
        if (s > 0)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace detail

inline ProxRun run_generalized_ppa(const ConvexFunctionSpec& f, double x0,
                                   const std::vector<GeneralizedStep>& steps,
                                   double stop_tolerance = 1e-13) {
    if (f.dim() != 1) throw std::invalid_argument("run_generalized_ppa: 1-D only");
    for (const auto& g : steps)
        if (std::abs(g(0.0)) > 0.0) throw std::invalid_argument("generalized step: g(0) != 0");
    ProxRun run;
    run.steps.push_back({{x0}, value(f, {x0}), 0.0, 0.0});
    double x = x0;
    for (const auto& g : steps) {
        const double u = detail::solve_generalized_step(f, g, x);
        const double residual = set_distance(subdifferential(f, {u}), {-g(u - x)});
        run.steps.push_back({{u}, value(f, {u}), std::abs(u - x), residual});
        x = u;
        if (std::abs(run.steps.back().step_length) <= stop_tolerance) break;
    }
    return run;
}

enum class RateClass { Superlinear, Linear, Sublinear, Finite, Diverged, Degenerate };

inline std::string to_string(RateClass c) {
    switch (c) {
        case RateClass::Superlinear: return "superlinear";
        case RateClass::Linear: return "linear";
        case RateClass::Sublinear: return "sublinear";
        case RateClass::Finite: return "finite";
        case RateClass::Diverged: return "diverged";
        case RateClass::Degenerate: return "degenerate";
    }
    return "?";
}

struct RateReport {
    std::vector<double> errors;
    std::vector<double> ratios;  // q_n = e_{n+1} / e_n while e_n > 1e-14
    RateClass classification = RateClass::Degenerate;
    double fitted_q = 0.0;  // mean of the last five ratios, when defined
};

// Deterministic classification thresholds (artifact policy):
//   finite      some e_n < 1e-14
//   diverged    e_n increases for 10 consecutive steps
//   superlinear last 5 ratios decreasing with mean < 0.1
//   linear(q)   last 5 ratios with stddev < 0.05 and mean in [0.05, 0.95]
//   sublinear   mean of last 5 ratios > 0.95 with e_n above stop tolerance
inline RateReport classify_rate(const std::vector<Vec>& iterates, const Vec& xstar,
                                double stop_tolerance = 1e-13) {
    RateReport rep;
    for (const Vec& x : iterates) rep.errors.push_back(norm(sub(x, xstar)));
    for (std::size_t n = 0; n + 1 < rep.errors.size(); ++n) {
        if (rep.errors[n] <= 1e-14) break;
        rep.ratios.push_back(rep.errors[n + 1] / rep.errors[n]);
    }
    for (double e : rep.errors) {
        if (e < 1e-14) {
            rep.classification = RateClass::Finite;
            return rep;
        }
    }
    int increasing = 0;
    for (std::size_t n = 0; n + 1 < rep.errors.size(); ++n) {
        increasing = rep.errors[n + 1] > rep.errors[n] ? increasing + 1 : 0;
        if (increasing >= 10) {
            rep.classification = RateClass::Diverged;
            return rep;
        }
    }
    if (rep.ratios.size() < 6) {
        rep.classification = RateClass::Degenerate;
        return rep;
    }
    const std::size_t m = rep.ratios.size();
    std::vector<double> tail(rep.ratios.end() - 5, rep.ratios.end());
    const double mean = std::accumulate(tail.begin(), tail.end(), 0.0) / 5.0;
    double var = 0.0;
    for (double q : tail) var += (q - mean) * (q - mean);
    const double sd = std::sqrt(var / 5.0);
    bool decreasing = true;
    for (std::size_t i = 0; i + 1 < tail.size(); ++i) decreasing = decreasing && tail[i + 1] < tail[i];
    rep.fitted_q = mean;
    if (decreasing && mean < 0.1)
        rep.classification = RateClass::Superlinear;
    else if (sd < 0.05 && mean >= 0.05 && mean <= 0.95)
        rep.classification = RateClass::Linear;
    else if (mean > 0.95 && rep.errors[m] > stop_tolerance)
        rep.classification = RateClass::Sublinear;
    else
        rep.classification = RateClass::Degenerate;
    return rep;
}

// Reference point for rate measurement: the exact solution set, never the
// iterate limit. Singleton solution sets give their point; otherwise the
// final iterate is projected onto the set.
inline Vec rate_reference_point(const ConvexFunctionSpec& f, const ProxRun& run) {
    const ConvexSet S = solution_set(f, Vec(f.dim(), 0.0));
    if (S.is_empty()) throw std::runtime_error("rate_reference_point: no minimizer");
    if (auto* s = S.as<Singleton>()) return s->v;
    return project(S, run.steps.back().x);
}

}  // namespace convreg
