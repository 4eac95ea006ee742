#pragma once

// Exact oracles for the function catalog: value, subdifferential,
// solution set (inverse subdifferential), Euclidean prox, and the smooth
// second-order data used by the regularity module.

#include <cmath>
#include <optional>
#include <stdexcept>

#include "convreg/function.hpp"
#include "convreg/set.hpp"

namespace convreg {

inline constexpr double kBisectTol = 1e-12;
inline constexpr double kActiveMargin = 1e-10;  // MaxAffine activity margin at kinks

struct Interval {
    double lo, hi;  // may be +-inf
};

inline void check_dim(const ConvexFunctionSpec& f, const Vec& x) {
    if (f.dim() != x.size()) throw std::invalid_argument("catalog: point dimension mismatch");
}

inline double value(const ConvexFunctionSpec& f, const Vec& x) {
    check_dim(f, x);
    if (auto* q = f.as<Quadratic>()) return 0.5 * dot(x, matvec(q->A, x)) + dot(q->b, x);
    if (f.as<Abs>()) return std::abs(x[0]);
    if (auto* p = f.as<PowerEven>()) return std::pow(x[0], p->p);
    if (auto* m = f.as<MaxAffine>()) {
        double best = -kInf;
        for (std::size_t i = 0; i < m->slopes.size(); ++i)
            best = std::max(best, dot(m->slopes[i], x) + m->intercepts[i]);
        return best;
    }
    if (auto* ib = f.as<IndicatorBox>()) {
        for (std::size_t i = 0; i < x.size(); ++i)
            if (x[i] < ib->lo[i] || x[i] > ib->hi[i]) return kInf;
        return 0.0;
    }
    if (auto* s = f.as<Scaled>()) return s->alpha * value(*s->inner, x);
    if (auto* s = f.as<SumFun>()) return value(*s->left, x) + value(*s->right, x);
    if (auto* s = f.as<Separable>()) {
        double total = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) total += value(*s->parts[i], {x[i]});
        return total;
    }
    auto* t = f.as<Tilted>();
    return value(*t->inner, x) - dot(t->tilt, x);
}

inline bool in_domain(const ConvexFunctionSpec& f, const Vec& x) { return value(f, x) < kInf; }

namespace detail {

inline ConvexSet translate(const ConvexSet& S, const Vec& v) {
    if (S.is_empty()) return S;
    if (auto* s = S.as<Singleton>()) return ConvexSet::singleton(add(s->v, v));
    if (auto* b = S.as<Box>()) {
        Vec lo = b->lo, hi = b->hi;
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (!std::isinf(lo[i])) lo[i] += v[i];
            if (!std::isinf(hi[i])) hi[i] += v[i];
        }
        return ConvexSet::box(std::move(lo), std::move(hi));
    }
    if (auto* p = S.as<Polytope>()) {
        std::vector<Vec> verts;
        for (const Vec& w : p->vertices) verts.push_back(add(w, v));
        return ConvexSet::polytope(std::move(verts));
    }
    if (auto* a = S.as<AffineSet>()) return ConvexSet::affine(add(a->point, v), a->basis);
    throw std::runtime_error("translate: unsupported set variant");
}

inline ConvexSet scale_set(const ConvexSet& S, double alpha) {
    if (S.is_empty()) return S;
    if (auto* s = S.as<Singleton>()) return ConvexSet::singleton(scale(s->v, alpha));
    if (auto* b = S.as<Box>()) {
        Vec lo(b->lo.size()), hi(b->hi.size());
        for (std::size_t i = 0; i < lo.size(); ++i) {
            lo[i] = alpha >= 0 ? alpha * b->lo[i] : alpha * b->hi[i];
            hi[i] = alpha >= 0 ? alpha * b->hi[i] : alpha * b->lo[i];
        }
        return ConvexSet::box(std::move(lo), std::move(hi));
    }
    if (auto* p = S.as<Polytope>()) {
        std::vector<Vec> verts;
        for (const Vec& w : p->vertices) verts.push_back(scale(w, alpha));
        return ConvexSet::polytope(std::move(verts));
    }
    if (auto* a = S.as<AffineSet>()) return ConvexSet::affine(scale(a->point, alpha), a->basis);
    throw std::runtime_error("scale_set: unsupported set variant");
}

// 1-D canonicalization to an interval; nullopt for Empty.
inline std::optional<Interval> as_interval(const ConvexSet& S) {
    if (S.is_empty()) return std::nullopt;
    if (S.dim() != 1) throw std::invalid_argument("as_interval: set is not 1-D");
    if (auto* s = S.as<Singleton>()) return Interval{s->v[0], s->v[0]};
    if (auto* b = S.as<Box>()) return Interval{b->lo[0], b->hi[0]};
    if (auto* p = S.as<Polytope>()) {
        double lo = kInf, hi = -kInf;
        for (const Vec& v : p->vertices) {
            lo = std::min(lo, v[0]);
            hi = std::max(hi, v[0]);
        }
        return Interval{lo, hi};
    }
    if (auto* a = S.as<AffineSet>()) {
        if (a->basis.empty()) return Interval{a->point[0], a->point[0]};
        return Interval{-kInf, kInf};
    }
    throw std::runtime_error("as_interval: unsupported set variant");
}

inline ConvexSet from_interval(const Interval& iv) {
    if (std::isinf(iv.lo) || std::isinf(iv.hi)) return ConvexSet::box({iv.lo}, {iv.hi});
    return ConvexSet::interval(iv.lo, iv.hi);
}

}  // namespace detail

inline ConvexSet subdifferential(const ConvexFunctionSpec& f, const Vec& x);

namespace detail {

// Minkowski sum, exact for the catalog combinations: anything in 1-D,
// Singleton + any, Box + Box.
inline ConvexSet minkowski_sum(const ConvexSet& A, const ConvexSet& B) {
    if (A.is_empty() || B.is_empty()) return ConvexSet::empty();
    if (A.dim() == 1) {
        const Interval a = *as_interval(A);
        const Interval b = *as_interval(B);
        return from_interval(Interval{a.lo + b.lo, a.hi + b.hi});
    }
    if (auto* s = A.as<Singleton>()) return translate(B, s->v);
    if (auto* s = B.as<Singleton>()) return translate(A, s->v);
    if (A.as<Box>() && B.as<Box>()) {
        const Box& a = *A.as<Box>();
        const Box& b = *B.as<Box>();
        Vec lo(a.lo.size()), hi(a.hi.size());
        for (std::size_t i = 0; i < lo.size(); ++i) {
            lo[i] = a.lo[i] + b.lo[i];
            hi[i] = a.hi[i] + b.hi[i];
        }
        return ConvexSet::box(std::move(lo), std::move(hi));
    }
    throw std::runtime_error(
        "subdifferential: unsupported Minkowski sum combination in dimension >= 2");
}

}  // namespace detail

inline ConvexSet subdifferential(const ConvexFunctionSpec& f, const Vec& x) {
    check_dim(f, x);
    if (!in_domain(f, x)) return ConvexSet::empty();
    if (auto* q = f.as<Quadratic>()) return ConvexSet::singleton(add(matvec(q->A, x), q->b));
    if (f.as<Abs>()) {
        if (x[0] == 0.0) return ConvexSet::box({-1.0}, {1.0});
        return ConvexSet::singleton({x[0] > 0 ? 1.0 : -1.0});
    }
    if (auto* p = f.as<PowerEven>()) return ConvexSet::singleton({p->p * std::pow(x[0], p->p - 1)});
    if (auto* m = f.as<MaxAffine>()) {
        double best = -kInf;
        for (std::size_t i = 0; i < m->slopes.size(); ++i)
            best = std::max(best, dot(m->slopes[i], x) + m->intercepts[i]);
        std::vector<Vec> active;
        for (std::size_t i = 0; i < m->slopes.size(); ++i)
            if (dot(m->slopes[i], x) + m->intercepts[i] >= best - kActiveMargin)
                active.push_back(m->slopes[i]);
        if (active.size() == 1) return ConvexSet::singleton(active.front());
        return ConvexSet::polytope(std::move(active));
    }
    if (auto* ib = f.as<IndicatorBox>()) {
        // normal cone of the box at x, coordinatewise
        Vec lo(x.size()), hi(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) {
            const bool at_lo = x[i] <= ib->lo[i] + kMembershipTol;
            const bool at_hi = x[i] >= ib->hi[i] - kMembershipTol;
            lo[i] = at_lo ? -kInf : 0.0;
            hi[i] = at_hi ? kInf : 0.0;
        }
        return ConvexSet::box(std::move(lo), std::move(hi));
    }
    if (auto* s = f.as<Scaled>()) return detail::scale_set(subdifferential(*s->inner, x), s->alpha);
    if (auto* s = f.as<SumFun>())
        return detail::minkowski_sum(subdifferential(*s->left, x), subdifferential(*s->right, x));
    if (auto* s = f.as<Separable>()) {
        Vec lo(x.size()), hi(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) {
            const auto iv = detail::as_interval(subdifferential(*s->parts[i], {x[i]}));
            if (!iv) return ConvexSet::empty();
            lo[i] = iv->lo;
            hi[i] = iv->hi;
        }
        bool degenerate = true;
        for (std::size_t i = 0; i < x.size(); ++i) degenerate = degenerate && lo[i] == hi[i];
        if (degenerate) return ConvexSet::singleton(std::move(lo));
        return ConvexSet::box(std::move(lo), std::move(hi));
    }
    auto* t = f.as<Tilted>();
    return detail::translate(subdifferential(*t->inner, x), scale(t->tilt, -1.0));
}

namespace detail {

struct EnvelopePiece {
    double slope, intercept;
    double lo, hi;  // activity interval on the upper envelope
};

// Activity intervals of a 1-D max-affine envelope, from pairwise dominance.
inline std::vector<EnvelopePiece> envelope_pieces(const MaxAffine& m) {
    std::vector<EnvelopePiece> pieces;
    for (std::size_t i = 0; i < m.slopes.size(); ++i) {
        double lo = -kInf, hi = kInf;
        bool alive = true;
        for (std::size_t j = 0; j < m.slopes.size() && alive; ++j) {
            if (j == i) continue;
            const double da = m.slopes[i][0] - m.slopes[j][0];
            const double db = m.intercepts[j] - m.intercepts[i];
            if (std::abs(da) < 1e-14) {
                if (db > 1e-14) alive = false;  // parallel and strictly below
            } else if (da > 0) {
                lo = std::max(lo, db / da);
            } else {
                hi = std::min(hi, db / da);
            }
        }
        if (alive && lo <= hi + 1e-12)
            pieces.push_back({m.slopes[i][0], m.intercepts[i], lo, hi});
    }
    std::sort(pieces.begin(), pieces.end(),
              [](const EnvelopePiece& a, const EnvelopePiece& b) { return a.slope < b.slope; });
    return pieces;
}

}  // namespace detail

inline ConvexSet solution_set(const ConvexFunctionSpec& f, const Vec& ystar) {
    check_dim(f, ystar);
    if (auto* q = f.as<Quadratic>()) {
        const PseudoSolve ps = pseudo_solve_symmetric(q->A, sub(ystar, q->b));
        if (!ps.consistent) return ConvexSet::empty();
        if (ps.null_basis.empty()) return ConvexSet::singleton(ps.min_norm_solution);
        return ConvexSet::affine(ps.min_norm_solution, ps.null_basis);
    }
    if (f.as<Abs>()) {
        const double y = ystar[0];
        if (std::abs(y - 1.0) <= 1e-12) return ConvexSet::box({0.0}, {kInf});
        if (std::abs(y + 1.0) <= 1e-12) return ConvexSet::box({-kInf}, {0.0});
        if (std::abs(y) < 1.0) return ConvexSet::singleton({0.0});
        return ConvexSet::empty();
    }
    if (auto* p = f.as<PowerEven>()) {
        const double y = ystar[0];
        const double mag = std::pow(std::abs(y) / p->p, 1.0 / (p->p - 1));
        return ConvexSet::singleton({y >= 0 ? mag : -mag});
    }
    if (auto* m = f.as<MaxAffine>()) {
        if (f.dim() != 1)
            throw std::runtime_error("solution_set: MaxAffine supported only in dimension 1");
        const double y = ystar[0];
        const auto pieces = detail::envelope_pieces(*m);
        for (const auto& pc : pieces)
            if (std::abs(pc.slope - y) <= 1e-12)
                return detail::from_interval(Interval{pc.lo, pc.hi});
        for (std::size_t k = 0; k + 1 < pieces.size(); ++k)
            if (pieces[k].slope < y && y < pieces[k + 1].slope)
                return ConvexSet::singleton({pieces[k].hi});  // the shared breakpoint
        return ConvexSet::empty();
    }
    if (auto* ib = f.as<IndicatorBox>()) {
        Vec lo(ystar.size()), hi(ystar.size());
        for (std::size_t i = 0; i < ystar.size(); ++i) {
            if (ystar[i] > kMembershipTol) {
                if (std::isinf(ib->hi[i])) return ConvexSet::empty();
                lo[i] = hi[i] = ib->hi[i];
            } else if (ystar[i] < -kMembershipTol) {
                if (std::isinf(ib->lo[i])) return ConvexSet::empty();
                lo[i] = hi[i] = ib->lo[i];
            } else {
                lo[i] = ib->lo[i];
                hi[i] = ib->hi[i];
            }
        }
        bool degenerate = true;
        for (std::size_t i = 0; i < lo.size(); ++i) degenerate = degenerate && lo[i] == hi[i];
        if (degenerate) return ConvexSet::singleton(std::move(lo));
        return ConvexSet::box(std::move(lo), std::move(hi));
    }
    if (auto* s = f.as<Scaled>()) return solution_set(*s->inner, scale(ystar, 1.0 / s->alpha));
    if (auto* t = f.as<Tilted>()) return solution_set(*t->inner, add(ystar, t->tilt));
    if (auto* s = f.as<Separable>()) {
        Vec lo(ystar.size()), hi(ystar.size());
        for (std::size_t i = 0; i < ystar.size(); ++i) {
            const auto iv = detail::as_interval(solution_set(*s->parts[i], {ystar[i]}));
            if (!iv) return ConvexSet::empty();
            lo[i] = iv->lo;
            hi[i] = iv->hi;
        }
        bool degenerate = true;
        for (std::size_t i = 0; i < lo.size(); ++i) degenerate = degenerate && lo[i] == hi[i];
        if (degenerate) return ConvexSet::singleton(std::move(lo));
        return ConvexSet::box(std::move(lo), std::move(hi));
    }
    throw std::runtime_error("solution_set: unsupported variant combination");
}

namespace detail {

// Solve 0 in df(z) + lambda (z - x) for a 1-D catalog function by bisection
// on the monotone optimality inclusion.
inline double prox_bisection(const ConvexFunctionSpec& f, double lambda, double x) {
    const auto gx = as_interval(subdifferential(f, {x}));
    if (!gx) throw std::runtime_error("prox: point outside domain for bisection variant");
    const double g = std::max(std::abs(gx->lo), std::abs(gx->hi));
    double lo = x - g / lambda - kBisectTol;
    double hi = x + g / lambda + kBisectTol;
    auto residual = [&](double z) {
        const auto iv = as_interval(subdifferential(f, {z}));
        if (!iv) throw std::runtime_error("prox: bisection left the domain");
        return Interval{iv->lo + lambda * (z - x), iv->hi + lambda * (z - x)};
    };
    // Bisect to machine precision: when the minimizer is a kink, stopping at a
    // fixed width leaves the subgradient inclusion violated by the full jump.
    while (true) {
        const double mid = 0.5 * (lo + hi);
        if (!(lo < mid && mid < hi)) break;
        const Interval r = residual(mid);
        if (r.hi < 0.0)
            lo = mid;
        else if (r.lo > 0.0)
            hi = mid;
        else
            return mid;
    }
    const Interval rl = residual(lo);
    const Interval rh = residual(hi);
    return std::max({rl.lo, -rl.hi, 0.0}) <= std::max({rh.lo, -rh.hi, 0.0}) ? lo : hi;
}

}  // namespace detail

// argmin_z { f(z) + (lambda/2) ||z - x||^2 }
inline Vec prox(const ConvexFunctionSpec& f, double lambda, const Vec& x) {
    check_dim(f, x);
    if (!(lambda > 0.0)) throw std::invalid_argument("prox: lambda must be positive");
    if (auto* q = f.as<Quadratic>()) {
        Mat M = q->A;
        for (std::size_t i = 0; i < M.size(); ++i) M[i][i] += lambda;
        return solve_linear(std::move(M), sub(scale(x, lambda), q->b));
    }
    if (f.as<Abs>()) {
        const double t = std::max(std::abs(x[0]) - 1.0 / lambda, 0.0);
        return {x[0] >= 0 ? t : -t};
    }
    if (auto* ib = f.as<IndicatorBox>()) {
        Vec z(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) z[i] = std::clamp(x[i], ib->lo[i], ib->hi[i]);
        return z;
    }
    if (auto* s = f.as<Separable>()) {
        Vec z(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) z[i] = prox(*s->parts[i], lambda, {x[i]})[0];
        return z;
    }
    if (auto* s = f.as<Scaled>()) return prox(*s->inner, lambda / s->alpha, x);
    if (auto* t = f.as<Tilted>()) return prox(*t->inner, lambda, add(x, scale(t->tilt, 1.0 / lambda)));
    if (f.dim() != 1)
        throw std::runtime_error("prox: variant requires 1-D bisection, dimension must be 1");
    return {detail::prox_bisection(f, lambda, x[0])};
}

// Hessian at a point of twice-differentiability; throws on nonsmooth entries.
inline Mat hessian(const ConvexFunctionSpec& f, const Vec& x) {
    check_dim(f, x);
    const std::size_t n = f.dim();
    if (auto* q = f.as<Quadratic>()) return q->A;
    if (auto* p = f.as<PowerEven>())
        return {{static_cast<double>(p->p) * (p->p - 1) * std::pow(x[0], p->p - 2)}};
    if (auto* s = f.as<Scaled>()) {
        Mat H = hessian(*s->inner, x);
        for (auto& row : H)
            for (double& v : row) v *= s->alpha;
        return H;
    }
    if (auto* s = f.as<SumFun>()) {
        Mat H = hessian(*s->left, x);
        const Mat G = hessian(*s->right, x);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) H[i][j] += G[i][j];
        return H;
    }
    if (auto* s = f.as<Separable>()) {
        Mat H(n, Vec(n, 0.0));
        for (std::size_t i = 0; i < n; ++i) H[i][i] = hessian(*s->parts[i], {x[i]})[0][0];
        return H;
    }
    if (auto* t = f.as<Tilted>()) return hessian(*t->inner, x);
    throw std::runtime_error("hessian: function is not twice differentiable at this point");
}

// Effective 1-D domain as an interval.
inline Interval domain_interval(const ConvexFunctionSpec& f) {
    if (f.dim() != 1) throw std::invalid_argument("domain_interval: 1-D only");
    if (auto* ib = f.as<IndicatorBox>()) return {ib->lo[0], ib->hi[0]};
    if (auto* s = f.as<Scaled>()) return domain_interval(*s->inner);
    if (auto* t = f.as<Tilted>()) return domain_interval(*t->inner);
    if (auto* s = f.as<SumFun>()) {
        const Interval a = domain_interval(*s->left);
        const Interval b = domain_interval(*s->right);
        return {std::max(a.lo, b.lo), std::min(a.hi, b.hi)};
    }
    if (auto* s = f.as<Separable>()) return domain_interval(*s->parts[0]);
    return {-kInf, kInf};
}

// One-sided second derivatives for 1-D catalog entries (each piece is
// polynomial or affine, so these are exact). side > 0 means from the right.
inline double one_sided_second_derivative(const ConvexFunctionSpec& f, double x, int side) {
    if (f.dim() != 1) throw std::invalid_argument("one_sided_second_derivative: 1-D only");
    if (auto* q = f.as<Quadratic>()) return q->A[0][0];
    if (auto* p = f.as<PowerEven>())
        return static_cast<double>(p->p) * (p->p - 1) * std::pow(x, p->p - 2);
    if (f.as<Abs>() || f.as<MaxAffine>() || f.as<IndicatorBox>()) return 0.0;
    if (auto* s = f.as<Scaled>()) return s->alpha * one_sided_second_derivative(*s->inner, x, side);
    if (auto* t = f.as<Tilted>()) return one_sided_second_derivative(*t->inner, x, side);
    if (auto* s = f.as<SumFun>())
        return one_sided_second_derivative(*s->left, x, side) +
               one_sided_second_derivative(*s->right, x, side);
    auto* s = f.as<Separable>();
    return one_sided_second_derivative(*s->parts[0], x, side);
}

}  // namespace convreg
