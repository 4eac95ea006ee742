#pragma once

// Sample-based estimators for metric subregularity, quadratic growth,
// strong growth and strong monotone relatedness of the subdifferential,
// plus the exact second-order criteria (Hessian and contingent-derivative
// moduli) and the bound/equivalence checks tying them together.

#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "convreg/catalog.hpp"

namespace convreg {

inline constexpr double kAssertTol = 1e-9;
inline constexpr double kDenominatorFloor = 1e-12;

// Anchor (xbar, ystar) with ystar in df(xbar), plus the analysis radius.
struct BasePair {
    FunPtr f;
    Vec xbar;
    Vec ystar;
    double radius;

    BasePair(FunPtr fun, Vec xb, Vec ys, double a)
        : f(std::move(fun)), xbar(std::move(xb)), ystar(std::move(ys)), radius(a) {
        if (!(radius > 0.0)) throw std::invalid_argument("BasePair: radius must be positive");
        if (set_distance(subdifferential(*f, xbar), ystar) > kMembershipTol)
            throw std::invalid_argument("BasePair: ystar is not a subgradient at xbar");
    }
};

// Deterministic samples in the closed Euclidean ball about the center:
// a symmetric tensor grid followed by seeded uniform draws.
struct SampleGrid {
    Vec center;
    double radius;
    int grid_per_axis = 41;
    int random_samples = 200;
    std::uint64_t seed = 0;

    std::vector<Vec> samples() const {
        const std::size_t n = center.size();
        std::vector<Vec> out;
        std::vector<int> idx(n, 0);
        const int k = grid_per_axis;
        while (true) {
            Vec x(n);
            for (std::size_t i = 0; i < n; ++i) {
                const double t = (k == 1) ? 0.0 : -1.0 + 2.0 * idx[i] / (k - 1);
                x[i] = center[i] + radius * t;
            }
            if (norm(sub(x, center)) <= radius * (1.0 + 1e-15)) out.push_back(std::move(x));
            std::size_t d = 0;
            while (d < n && ++idx[d] == k) idx[d++] = 0;
            if (d == n) break;
        }
        // raw 53-bit draws keep the stream identical across standard libraries
        std::mt19937_64 rng(seed);
        auto uniform = [&rng]() { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
        int accepted = 0;
        while (accepted < random_samples) {
            Vec u(n);
            for (std::size_t i = 0; i < n; ++i) u[i] = 2.0 * uniform() - 1.0;
            if (norm(u) > 1.0) continue;
            Vec x(n);
            for (std::size_t i = 0; i < n; ++i) x[i] = center[i] + radius * u[i];
            out.push_back(std::move(x));
            ++accepted;
        }
        return out;
    }

    SampleGrid with_radius(double r) const {
        SampleGrid g = *this;
        g.radius = r;
        return g;
    }
};

enum class ModulusKind { Subregularity, Growth, StrongGrowth, MonotoneModulus, HessianModulus, ContingentModulus, Calmness };
enum class Classification { Holds, Fails, Degenerate };

inline std::string to_string(ModulusKind k) {
    switch (k) {
        case ModulusKind::Subregularity: return "subregularity";
        case ModulusKind::Growth: return "growth";
        case ModulusKind::StrongGrowth: return "strong-growth";
        case ModulusKind::MonotoneModulus: return "monotone-modulus";
        case ModulusKind::HessianModulus: return "hessian-modulus";
        case ModulusKind::ContingentModulus: return "contingent-modulus";
        case ModulusKind::Calmness: return "calmness";
    }
    return "?";
}

inline std::string to_string(Classification c) {
    switch (c) {
        case Classification::Holds: return "holds";
        case Classification::Fails: return "fails";
        case Classification::Degenerate: return "degenerate";
    }
    return "?";
}

struct LedgerEntry {
    Vec x;
    double numerator;
    double denominator;
};

struct ModulusReport {
    ModulusKind kind;
    double value = 0.0;
    Vec witness;
    std::vector<LedgerEntry> ledger;
    std::vector<std::pair<double, double>> radii_sweep;  // (radius, value), radii decreasing
    Classification classification = Classification::Degenerate;
};

namespace detail {

struct RadiusEstimate {
    double value;
    Vec witness;
    std::vector<LedgerEntry> ledger;
    bool any = false;
};

// One ratio sweep at a fixed radius. ratio_fn yields (numerator, denominator)
// or nullopt for skipped samples; sup selects max vs min aggregation.
template <class RatioFn>
RadiusEstimate estimate_at_radius(const SampleGrid& grid, bool sup, RatioFn&& ratio_fn) {
    RadiusEstimate est;
    est.value = sup ? 0.0 : kInf;
    for (const Vec& x : grid.samples()) {
        const auto nd = ratio_fn(x);
        if (!nd) continue;
        const auto [num, den] = *nd;
        const double r = num / den;
        est.ledger.push_back({x, num, den});
        if ((sup && (!est.any || r > est.value)) || (!sup && (!est.any || r < est.value))) {
            est.value = r;
            est.witness = x;
        }
        est.any = true;
    }
    if (!est.any) est.value = sup ? 0.0 : kInf;  // trivially satisfied at this radius
    return est;
}

inline std::vector<double> sweep_radii(double a) { return {a, a / 2, a / 4, a / 8, a / 16}; }

// Doubling heuristic: a sup-type constant growing by >= grow_factor across
// three consecutive halvings signals failure of the property; an inf-type
// constant shrinking by <= shrink_factor likewise.
inline Classification classify_sweep(const std::vector<std::pair<double, double>>& sweep, bool sup,
                                     double factor) {
    int consecutive = 0;
    for (std::size_t k = 0; k + 1 < sweep.size(); ++k) {
        const double prev = sweep[k].second;
        const double next = sweep[k + 1].second;
        bool bad;
        if (sup) {
            bad = (prev == 0.0) ? (next > 0.0) : (next / prev >= factor);
        } else {
            if (std::isinf(prev)) {
                bad = false;
            } else if (prev == 0.0) {
                bad = true;  // no growth at all
            } else {
                bad = next / prev <= factor;
            }
        }
        consecutive = bad ? consecutive + 1 : 0;
        if (consecutive >= 3) return Classification::Fails;
    }
    return Classification::Holds;
}

template <class RatioFn>
ModulusReport sweep_report(ModulusKind kind, const SampleGrid& grid, bool sup, double factor,
                           RatioFn&& ratio_fn) {
    ModulusReport rep;
    rep.kind = kind;
    for (double r : sweep_radii(grid.radius)) {
        const RadiusEstimate est = estimate_at_radius(grid.with_radius(r), sup, ratio_fn);
        rep.radii_sweep.emplace_back(r, est.value);
        if (r == grid.radius) {
            rep.value = est.value;
            rep.witness = est.witness;
            rep.ledger = std::move(est.ledger);
        }
    }
    rep.classification = classify_sweep(rep.radii_sweep, sup, factor);
    return rep;
}

}  // namespace detail

// kappa-hat = sup d(x, S) / d(ystar, df(x)) over the sample ball,
// S = (df)^{-1}(ystar); Fails when the sup doubles across three halvings.
inline ModulusReport estimate_subregularity_modulus(const BasePair& bp, const SampleGrid& grid,
                                                    std::optional<ConvexSet> S_override = std::nullopt) {
    const ConvexSet S = S_override ? *S_override : solution_set(*bp.f, bp.ystar);
    if (S.is_empty()) throw std::runtime_error("estimate_subregularity_modulus: empty solution set");
    auto ratio = [&](const Vec& x) -> std::optional<std::pair<double, double>> {
        const ConvexSet df = subdifferential(*bp.f, x);
        if (df.is_empty()) return std::nullopt;  // d(ystar, {}) = inf, bound trivial
        const double den = set_distance(df, bp.ystar);
        const double num = set_distance(S, x);
        // Oracles are exact, so only an exact zero disqualifies the sample; a
        // magnitude floor would drop the smallest samples at small radii and
        // mask genuine blow-up (e.g. den = 4|x|^3 for x^4).
        if (den == 0.0) {
            // an exact kernel sample must already lie on the solution set
            if (num >= 1e-8)
                throw std::logic_error("subregularity estimator: sample in ker but far from solution set");
            return std::nullopt;
        }
        return std::make_pair(num, den);
    };
    return detail::sweep_report(ModulusKind::Subregularity, grid, /*sup=*/true, 2.0, ratio);
}

// Strong variant: numerator ||x - xbar||.
inline ModulusReport estimate_strong_subregularity_modulus(const BasePair& bp, const SampleGrid& grid) {
    auto ratio = [&](const Vec& x) -> std::optional<std::pair<double, double>> {
        const ConvexSet df = subdifferential(*bp.f, x);
        if (df.is_empty()) return std::nullopt;
        const double den = set_distance(df, bp.ystar);
        const double num = norm(sub(x, bp.xbar));
        if (den == 0.0) return std::nullopt;
        return std::make_pair(num, den);
    };
    return detail::sweep_report(ModulusKind::Subregularity, grid, /*sup=*/true, 2.0, ratio);
}

// c-hat = inf (f(x) - f(xbar) - <ystar, x - xbar>) / d^2(x, S). The solution
// set may be overridden (used on conjugates, where S = df(xbar) is known).
inline ModulusReport estimate_growth_constant(const BasePair& bp, const SampleGrid& grid,
                                              std::optional<ConvexSet> S_override = std::nullopt) {
    const ConvexSet S = S_override ? *S_override : solution_set(*bp.f, bp.ystar);
    if (S.is_empty()) throw std::runtime_error("estimate_growth_constant: empty solution set");
    const double fbar = value(*bp.f, bp.xbar);
    auto ratio = [&](const Vec& x) -> std::optional<std::pair<double, double>> {
        const double num = value(*bp.f, x) - fbar - dot(bp.ystar, sub(x, bp.xbar));
        if (std::isinf(num)) return std::nullopt;  // outside dom f, growth trivial
        const double d = set_distance(S, x);
        if (d < kDenominatorFloor) {
            if (num < -kAssertTol)
                throw std::logic_error("growth estimator: subgradient inequality violated on solution set");
            return std::nullopt;
        }
        return std::make_pair(num, d * d);
    };
    return detail::sweep_report(ModulusKind::Growth, grid, /*sup=*/false, 0.5, ratio);
}

inline ModulusReport estimate_strong_growth_constant(const BasePair& bp, const SampleGrid& grid) {
    const double fbar = value(*bp.f, bp.xbar);
    auto ratio = [&](const Vec& x) -> std::optional<std::pair<double, double>> {
        const double d = norm(sub(x, bp.xbar));
        if (d < kDenominatorFloor) return std::nullopt;
        const double num = value(*bp.f, x) - fbar - dot(bp.ystar, sub(x, bp.xbar));
        if (std::isinf(num)) return std::nullopt;
        return std::make_pair(num, d * d);
    };
    ModulusReport rep = detail::sweep_report(ModulusKind::StrongGrowth, grid, /*sup=*/false, 0.5, ratio);
    return rep;
}

// Inf of the exact inner minimum of <y* - ystar, x - xbar> over df(x),
// divided by ||x - xbar||^2.
inline ModulusReport check_strong_monotone_relatedness(const BasePair& bp, const SampleGrid& grid) {
    auto ratio = [&](const Vec& x) -> std::optional<std::pair<double, double>> {
        const double d = norm(sub(x, bp.xbar));
        if (d < kDenominatorFloor) return std::nullopt;
        const ConvexSet df = subdifferential(*bp.f, x);
        if (df.is_empty()) return std::nullopt;
        const Vec dir = sub(x, bp.xbar);
        const double inner = support_min(df, dir) - dot(bp.ystar, dir);
        return std::make_pair(inner, d * d);
    };
    return detail::sweep_report(ModulusKind::MonotoneModulus, grid, /*sup=*/false, 0.5, ratio);
}

struct BoundCheck {
    ModulusReport kappa;
    ModulusReport c;
    bool forward_ok = false;   // c >= 1/(4 kappa) - tol
    bool backward_ok = false;  // kappa <= 1/c + tol
    double gap = 0.0;          // empirical c * kappa, reported not asserted
};

inline BoundCheck check_theorem_2_1(const BasePair& bp, const SampleGrid& grid) {
    BoundCheck bc;
    bc.kappa = estimate_subregularity_modulus(bp, grid);
    bc.c = estimate_growth_constant(bp, grid);
    if (bc.kappa.value > 0.0)
        bc.forward_ok = bc.c.value >= 1.0 / (4.0 * bc.kappa.value) - kAssertTol;
    else
        bc.forward_ok = true;  // trivially subregular, every c works
    bc.backward_ok = std::isinf(bc.c.value) || bc.c.value <= 0.0 ||
                     bc.kappa.value <= 1.0 / bc.c.value + kAssertTol;
    bc.gap = bc.c.value * bc.kappa.value;
    return bc;
}

struct StrongBoundCheck {
    ModulusReport kappa;  // strong subregularity modulus
    ModulusReport c;      // strong growth
    bool forward_ok = false;
    bool backward_ok = false;
    bool isolated = false;           // exact, from the solution-set variant
    bool strongly_subregular = false;  // kappa holds and isolated
    bool equivalence_ok = false;       // strongly_subregular <=> c holds
};

inline StrongBoundCheck check_theorem_3_1(const BasePair& bp, const SampleGrid& grid) {
    StrongBoundCheck bc;
    bc.kappa = estimate_strong_subregularity_modulus(bp, grid);
    bc.c = estimate_strong_growth_constant(bp, grid);
    const ConvexSet S = solution_set(*bp.f, bp.ystar);
    bc.isolated = isolated_in_ball(S, bp.xbar, bp.radius);
    bc.strongly_subregular = bc.isolated && bc.kappa.classification == Classification::Holds;
    if (bc.kappa.value > 0.0)
        bc.forward_ok = !bc.strongly_subregular || bc.c.value >= 1.0 / (4.0 * bc.kappa.value) - kAssertTol;
    else
        bc.forward_ok = true;
    bc.backward_ok = std::isinf(bc.c.value) || bc.c.value <= 0.0 ||
                     bc.kappa.value <= 1.0 / bc.c.value + kAssertTol;
    bc.equivalence_ok = bc.strongly_subregular == (bc.c.classification == Classification::Holds);
    return bc;
}

struct SumRuleCheck {
    double c_f, c_g, c_sum;
    bool ok;  // c_sum >= c_f + c_g - tol
};

// Strong growth constants add under pointwise sums (same anchor).
inline SumRuleCheck check_sum_rule(const BasePair& bpf, const BasePair& bpg, const SampleGrid& grid) {
    if (norm(sub(bpf.xbar, bpg.xbar)) > kMembershipTol)
        throw std::invalid_argument("check_sum_rule: anchors differ");
    const ModulusReport cf = estimate_strong_growth_constant(bpf, grid);
    const ModulusReport cg = estimate_strong_growth_constant(bpg, grid);
    const BasePair bps(ConvexFunctionSpec::sum(bpf.f, bpg.f), bpf.xbar, add(bpf.ystar, bpg.ystar),
                       bpf.radius);
    const ModulusReport cs = estimate_strong_growth_constant(bps, grid);
    return {cf.value, cg.value, cs.value, cs.value >= cf.value + cg.value - kAssertTol};
}

// Smallest eigenvalue of the Hessian; throws for nonsmooth entries.
inline double hessian_modulus(const ConvexFunctionSpec& f, const Vec& xbar) {
    return min_eigenvalue(hessian(f, xbar));
}

// Exact positive-definiteness modulus of the graphical derivative of df at
// (xbar, ystar). Quadratics reduce to the Rayleigh minimum; 1-D entries to
// polyline adjacency: a ray along the graph exists on a side only when ystar
// matches the one-sided derivative there and the domain continues, and its
// slope is the one-sided second derivative. No admissible direction means
// the condition holds vacuously (value +inf).
inline ModulusReport contingent_derivative_modulus(const BasePair& bp) {
    ModulusReport rep;
    rep.kind = ModulusKind::ContingentModulus;
    rep.witness = bp.xbar;
    if (auto* q = bp.f->as<Quadratic>()) {
        rep.value = min_eigenvalue(q->A);
        rep.classification = rep.value > kDenominatorFloor ? Classification::Holds : Classification::Fails;
        return rep;
    }
    if (bp.f->dim() != 1)
        throw std::runtime_error("contingent_derivative_modulus: requires Quadratic or dimension 1");
    const auto iv = detail::as_interval(subdifferential(*bp.f, bp.xbar));
    if (!iv) throw std::runtime_error("contingent_derivative_modulus: xbar outside domain");
    const Interval dom = domain_interval(*bp.f);
    const double y = bp.ystar[0];
    double modulus = kInf;
    bool any_ray = false;
    if (bp.xbar[0] < dom.hi - kDenominatorFloor && !std::isinf(iv->hi) &&
        std::abs(y - iv->hi) <= kMembershipTol) {
        modulus = std::min(modulus, one_sided_second_derivative(*bp.f, bp.xbar[0], +1));
        any_ray = true;
    }
    if (bp.xbar[0] > dom.lo + kDenominatorFloor && !std::isinf(iv->lo) &&
        std::abs(y - iv->lo) <= kMembershipTol) {
        modulus = std::min(modulus, one_sided_second_derivative(*bp.f, bp.xbar[0], -1));
        any_ray = true;
    }
    rep.value = any_ray ? modulus : kInf;
    rep.classification = rep.value > kDenominatorFloor ? Classification::Holds : Classification::Fails;
    return rep;
}

// Sampled fallback for the contingent modulus: graph points approaching the
// anchor, inf of <y - ystar, x - xbar> / ||x - xbar||^2 over directions that
// stay attached to the graph. Diagnostic only, never used for acceptance.
inline std::optional<double> contingent_derivative_modulus_sampled(const BasePair& bp) {
    if (bp.f->dim() != 1) return std::nullopt;
    double inf_ratio = kInf;
    bool any = false;
    for (int k = 10; k <= 24; ++k) {
        const double h = bp.radius * std::pow(0.5, k);
        for (int side : {-1, +1}) {
            const Vec x = {bp.xbar[0] + side * h};
            const ConvexSet df = subdifferential(*bp.f, x);
            if (df.is_empty()) continue;
            const Vec yv = project(df, bp.ystar);
            if (std::abs(yv[0] - bp.ystar[0]) > std::sqrt(h)) continue;  // detached direction
            const double ratio = (yv[0] - bp.ystar[0]) * (x[0] - bp.xbar[0]) / (h * h);
            if (k == 24) {
                inf_ratio = std::min(inf_ratio, ratio);
                any = true;
            }
        }
    }
    if (!any) return std::nullopt;  // no admissible nonzero direction
    return inf_ratio;
}

struct Prop39Check {
    bool premise_holds = true;      // condition (3.10) over the grid
    bool conclusion_holds = true;   // condition (3.11) for every extreme subgradient
    bool implication_ok = true;     // premise => conclusion
    Vec premise_witness;            // a violating sample, when premise fails
};

inline Prop39Check check_prop_3_9(const BasePair& bp, double c, const SampleGrid& grid) {
    Prop39Check out;
    const double fbar = value(*bp.f, bp.xbar);
    const auto samples = grid.samples();
    for (const Vec& x : samples) {
        const double fx = value(*bp.f, x);
        if (std::isinf(fx)) continue;  // right-hand side infinite, nothing to test
        const double d2 = dot(sub(x, bp.xbar), sub(x, bp.xbar));
        for (int j = 1; j <= 9 && out.premise_holds; ++j) {
            const double lam = 0.1 * j;
            Vec mid(x.size());
            for (std::size_t i = 0; i < x.size(); ++i)
                mid[i] = (1.0 - lam) * x[i] + lam * bp.xbar[i];
            const double lhs = value(*bp.f, mid);
            const double rhs = (1.0 - lam) * fx + lam * fbar - c * lam * (1.0 - lam) * d2;
            if (lhs > rhs + kAssertTol) {
                out.premise_holds = false;
                out.premise_witness = x;
            }
        }
        if (!out.premise_holds) break;
    }
    std::vector<Vec> subgrads;
    const ConvexSet dfbar = subdifferential(*bp.f, bp.xbar);
    if (dfbar.is_bounded())
        subgrads = extreme_points(dfbar);
    else
        subgrads = {bp.ystar};
    for (const Vec& y : subgrads) {
        for (const Vec& x : samples) {
            const double fx = value(*bp.f, x);
            if (std::isinf(fx)) continue;
            const double d2 = dot(sub(x, bp.xbar), sub(x, bp.xbar));
            if (fx < fbar + dot(y, sub(x, bp.xbar)) + c * d2 - kAssertTol) {
                out.conclusion_holds = false;
                break;
            }
        }
        if (!out.conclusion_holds) break;
    }
    out.implication_ok = !out.premise_holds || out.conclusion_holds;
    return out;
}

}  // namespace convreg
