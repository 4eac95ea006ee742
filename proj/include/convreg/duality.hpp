#pragma once

// Fenchel conjugates for the closed sub-catalog, calmness and isolated
// calmness via excess, the conjugate growth characterizations, and the
// y-independent parametric solution map.

#include <optional>
#include <stdexcept>
#include <utility>

#include "convreg/regularity.hpp"

namespace convreg {

namespace detail {

inline bool is_zero_function(const ConvexFunctionSpec& f) {
    if (auto* m = f.as<MaxAffine>()) {
        if (m->slopes.size() != 1) return false;
        for (double a : m->slopes[0])
            if (a != 0.0) return false;
        return m->intercepts[0] == 0.0;
    }
    return false;
}

}  // namespace detail

// Exact conjugate of a conjugable catalog entry:
//   Quadratic (A > 0)     -> Quadratic{A^-1, -A^-1 b} (+ constant when b != 0)
//   Abs                   -> indicator of [-1, 1]
//   MaxAffine (n = 1)     -> breakpoint envelope + indicator of the slope range
//   IndicatorBox (finite) -> support function, max-affine over the vertices
//   Separable             -> componentwise
inline FunPtr conjugate(const ConvexFunctionSpec& f) {
    if (auto* q = f.as<Quadratic>()) {
        if (min_eigenvalue(q->A) <= 1e-12)
            throw std::runtime_error("conjugate: Quadratic requires positive definite A");
        const Mat Ainv = inverse_spd(q->A);
        const Vec Ainv_b = matvec(Ainv, q->b);
        const double constant = 0.5 * dot(q->b, Ainv_b);
        FunPtr quad = ConvexFunctionSpec::quadratic(Ainv, scale(Ainv_b, -1.0));
        if (constant == 0.0) return quad;
        return ConvexFunctionSpec::sum(
            quad, ConvexFunctionSpec::max_affine({Vec(f.dim(), 0.0)}, {constant}));
    }
    if (f.as<Abs>()) return ConvexFunctionSpec::indicator_box({-1.0}, {1.0});
    if (auto* m = f.as<MaxAffine>()) {
        if (f.dim() != 1) throw std::runtime_error("conjugate: MaxAffine supported only in dimension 1");
        const auto pieces = detail::envelope_pieces(*m);
        const double slope_lo = pieces.front().slope;
        const double slope_hi = pieces.back().slope;
        FunPtr dom_part = ConvexFunctionSpec::indicator_box({slope_lo}, {slope_hi});
        std::vector<Vec> slopes;
        Vec intercepts;
        if (pieces.size() == 1) {
            slopes.push_back({0.0});
            intercepts.push_back(-pieces[0].intercept);
        } else {
            for (std::size_t k = 0; k + 1 < pieces.size(); ++k) {
                const double bkpt = pieces[k].hi;
                slopes.push_back({bkpt});
                intercepts.push_back(-value(f, {bkpt}));
            }
        }
        FunPtr pl_part = ConvexFunctionSpec::max_affine(std::move(slopes), std::move(intercepts));
        if (detail::is_zero_function(*pl_part)) return dom_part;
        return ConvexFunctionSpec::sum(std::move(pl_part), std::move(dom_part));
    }
    if (auto* ib = f.as<IndicatorBox>()) {
        const std::size_t n = f.dim();
        for (std::size_t i = 0; i < n; ++i)
            if (std::isinf(ib->lo[i]) || std::isinf(ib->hi[i]))
                throw std::runtime_error("conjugate: IndicatorBox must be bounded");
        std::vector<Vec> vertices =
            extreme_points(ConvexSet::box(ib->lo, ib->hi));
        return ConvexFunctionSpec::max_affine(std::move(vertices), Vec(1u << n, 0.0));
    }
    if (auto* s = f.as<Separable>()) {
        std::vector<FunPtr> parts;
        for (const FunPtr& p : s->parts) parts.push_back(conjugate(*p));
        return ConvexFunctionSpec::separable(std::move(parts));
    }
    throw std::runtime_error("conjugate: function outside the conjugable sub-catalog");
}

struct NumericConjugateValue {
    double value;
    bool trusted;  // false when the grid sup is attained at the boundary
};

// Grid-sup conjugate for 1-D primals, the independent numeric route. The odd
// point count puts round arguments (0, domain endpoints) exactly on the grid.
inline NumericConjugateValue conjugate_numeric(const ConvexFunctionSpec& f, double y, double R = 10.0,
                                               int points = 100001) {
    double best = -kInf;
    int first_idx = 0, last_idx = 0;
    for (int i = 0; i < points; ++i) {
        const double x = -R + 2.0 * R * i / (points - 1);
        const double v = x * y - value(f, {x});
        if (v > best) {
            best = v;
            first_idx = last_idx = i;
        } else if (v == best) {
            last_idx = i;
        }
    }
    // The argmax set is contiguous; the sup is trusted when it reaches an
    // interior grid point, even if it also touches the boundary.
    return {best, last_idx > 0 && first_idx < points - 1};
}

struct ConjugatePair {
    FunPtr primal;
    FunPtr conj;
};

inline ConjugatePair make_conjugate_pair(FunPtr f) {
    FunPtr c = conjugate(*f);
    return {std::move(f), std::move(c)};
}

// Set equality up to tolerance; exact endpoint comparison for unbounded
// intervals, mutual extreme-point distances for bounded sets.
inline bool sets_equal(const ConvexSet& A, const ConvexSet& B, double tol = 1e-8) {
    if (A.is_empty() || B.is_empty()) return A.is_empty() == B.is_empty();
    if (A.dim() != B.dim()) return false;
    if (A.dim() == 1) {
        const Interval a = *detail::as_interval(A);
        const Interval b = *detail::as_interval(B);
        auto end_eq = [tol](double u, double v) {
            if (std::isinf(u) || std::isinf(v)) return u == v;
            return std::abs(u - v) <= tol;
        };
        return end_eq(a.lo, b.lo) && end_eq(a.hi, b.hi);
    }
    if (!A.is_bounded() || !B.is_bounded()) {
        if (A.as<Box>() && B.as<Box>()) {
            const Box& a = *A.as<Box>();
            const Box& b = *B.as<Box>();
            for (std::size_t i = 0; i < a.lo.size(); ++i) {
                auto end_eq = [tol](double u, double v) {
                    if (std::isinf(u) || std::isinf(v)) return u == v;
                    return std::abs(u - v) <= tol;
                };
                if (!end_eq(a.lo[i], b.lo[i]) || !end_eq(a.hi[i], b.hi[i])) return false;
            }
            return true;
        }
        throw std::runtime_error("sets_equal: unbounded non-box comparison unsupported");
    }
    for (const Vec& p : extreme_points(A))
        if (set_distance(B, p) > tol) return false;
    for (const Vec& p : extreme_points(B))
        if (set_distance(A, p) > tol) return false;
    return true;
}

struct InverseSubdifferentialCheck {
    bool all_equal = true;
    Vec failing_dual;  // first y* where the sets differ
};

// (df)^{-1} = df* on the sampled duals.
inline InverseSubdifferentialCheck check_inverse_subdifferential(const ConjugatePair& pair,
                                                                 const std::vector<Vec>& dual_samples,
                                                                 double tol = 1e-8) {
    InverseSubdifferentialCheck out;
    for (const Vec& y : dual_samples) {
        const ConvexSet lhs = solution_set(*pair.primal, y);
        const ConvexSet rhs = subdifferential(*pair.conj, y);
        if (!sets_equal(lhs, rhs, tol)) {
            out.all_equal = false;
            out.failing_dual = y;
            break;
        }
    }
    return out;
}

// kappa-hat for calmness of df at (xbar, ystar): sup of
// e(df(x) cap V, df(xbar)) / ||x - xbar||, V a coordinate box about ystar.
inline ModulusReport estimate_calmness_modulus(const BasePair& bp, const SampleGrid& grid,
                                               double V_radius) {
    const ConvexSet ref = subdifferential(*bp.f, bp.xbar);
    Vec vlo(bp.ystar.size()), vhi(bp.ystar.size());
    for (std::size_t i = 0; i < bp.ystar.size(); ++i) {
        vlo[i] = bp.ystar[i] - V_radius;
        vhi[i] = bp.ystar[i] + V_radius;
    }
    auto ratio = [&](const Vec& x) -> std::optional<std::pair<double, double>> {
        const double d = norm(sub(x, bp.xbar));
        if (d < kDenominatorFloor) return std::nullopt;
        const ConvexSet clipped = intersect_box(subdifferential(*bp.f, x), vlo, vhi);
        return std::make_pair(set_excess(clipped, ref), d);
    };
    // calmness sup over nested balls is non-increasing; sustained growth
    // (gentler threshold than the subregularity doubling rule) means not calm
    return detail::sweep_report(ModulusKind::Calmness, grid, /*sup=*/true, 1.5, ratio);
}

// Subregularity modulus of df* at (ystar, xbar), with the known solution set
// (df*)^{-1}(xbar) = df(xbar). The bridge counterpart of the calmness modulus.
inline ModulusReport dual_subregularity_modulus(const BasePair& bp, const SampleGrid& dual_grid) {
    const ConjugatePair pair = make_conjugate_pair(bp.f);
    const BasePair dual_bp(pair.conj, bp.ystar, bp.xbar, dual_grid.radius);
    return estimate_subregularity_modulus(dual_bp, dual_grid, subdifferential(*bp.f, bp.xbar));
}

struct Corollary43Check {
    ModulusReport calmness;
    bool calm = false;
    bool isolated_calm = false;
    ModulusReport growth_4_5;   // growth of f* with distances to df(xbar)
    ModulusReport growth_4_6;   // strong growth of f* at ystar
    bool calm_equivalence_ok = false;
    bool isolated_equivalence_ok = false;
};

inline Corollary43Check check_corollary_4_3(const BasePair& bp, const SampleGrid& grid) {
    Corollary43Check out;
    out.calmness = estimate_calmness_modulus(bp, grid, bp.radius);
    out.calm = out.calmness.classification == Classification::Holds;
    const ConvexSet dfxbar = subdifferential(*bp.f, bp.xbar);
    out.isolated_calm = out.calm && isolated_in_ball(dfxbar, bp.ystar, bp.radius);
    const ConjugatePair pair = make_conjugate_pair(bp.f);
    const BasePair dual_bp(pair.conj, bp.ystar, bp.xbar, bp.radius);
    SampleGrid dual_grid = grid;
    dual_grid.center = bp.ystar;
    dual_grid.radius = bp.radius;
    out.growth_4_5 = estimate_growth_constant(dual_bp, dual_grid, dfxbar);
    out.growth_4_6 = estimate_strong_growth_constant(dual_bp, dual_grid);
    out.calm_equivalence_ok = out.calm == (out.growth_4_5.classification == Classification::Holds);
    out.isolated_equivalence_ok =
        out.isolated_calm == (out.growth_4_6.classification == Classification::Holds);
    return out;
}

// S(x) = { y : 0 in f(x) + dphi(y) } with an affine, y-independent base
// f(x) = alpha x + beta; then S(x) = (dphi)^{-1}(-f(x)).
struct SolutionMapSpec {
    FunPtr phi;  // 1-D
    double alpha, beta;
    Interval domain{-kInf, kInf};

    SolutionMapSpec(FunPtr p, double a, double b, Interval dom = {-kInf, kInf})
        : phi(std::move(p)), alpha(a), beta(b), domain(dom) {
        if (phi->dim() != 1) throw std::invalid_argument("SolutionMapSpec: phi must be 1-D");
    }
};

inline ConvexSet solution_map_eval(const SolutionMapSpec& spec, double x) {
    if (x < spec.domain.lo || x > spec.domain.hi)
        throw std::invalid_argument("solution_map_eval: parameter outside domain");
    return solution_set(*spec.phi, {-(spec.alpha * x + spec.beta)});
}

struct Corollary44Check {
    ModulusReport calm_S;
    bool calm = false;
    bool isolated_calm = false;
    ModulusReport growth_2_1;  // growth of phi at (ybar, -f(xbar))
    ModulusReport growth_3_1;  // strong growth, same anchor
    bool calm_equivalence_ok = false;   // calm <=> (2.1)
    bool isolated_implication_ok = false;  // (3.1) => isolated calmness
};

inline Corollary44Check check_corollary_4_4(const SolutionMapSpec& spec, double xbar, double ybar,
                                            const SampleGrid& param_grid, double V_radius) {
    const ConvexSet Sbar = solution_map_eval(spec, xbar);
    if (!contains(Sbar, {ybar})) throw std::invalid_argument("check_corollary_4_4: ybar not in S(xbar)");
    Corollary44Check out;
    const Vec vlo = {ybar - V_radius}, vhi = {ybar + V_radius};
    auto ratio = [&](const Vec& x) -> std::optional<std::pair<double, double>> {
        const double d = std::abs(x[0] - xbar);
        if (d < kDenominatorFloor) return std::nullopt;
        if (x[0] < spec.domain.lo || x[0] > spec.domain.hi) return std::nullopt;
        const ConvexSet clipped = intersect_box(solution_map_eval(spec, x[0]), vlo, vhi);
        return std::make_pair(set_excess(clipped, Sbar), d);
    };
    out.calm_S = detail::sweep_report(ModulusKind::Calmness, param_grid, /*sup=*/true, 1.5, ratio);
    out.calm = out.calm_S.classification == Classification::Holds;
    out.isolated_calm = out.calm && isolated_in_ball(Sbar, {ybar}, V_radius);
    const BasePair bp_phi(spec.phi, {ybar}, {-(spec.alpha * xbar + spec.beta)}, param_grid.radius);
    SampleGrid ygrid = param_grid;
    ygrid.center = {ybar};
    out.growth_2_1 = estimate_growth_constant(bp_phi, ygrid);
    out.growth_3_1 = estimate_strong_growth_constant(bp_phi, ygrid);
    out.calm_equivalence_ok = out.calm == (out.growth_2_1.classification == Classification::Holds);
    out.isolated_implication_ok =
        out.growth_3_1.classification != Classification::Holds || out.isolated_calm;
    return out;
}

}  // namespace convreg
