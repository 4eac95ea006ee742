#pragma once

// Closed convex set representations with exact distance, projection, excess
// and extreme-point enumeration. Unbounded sets (half-lines, normal cones)
// are boxes with +-inf bounds; everything stays exact at dimension <= 4 and
// polytope vertex count <= 8.

#include <algorithm>
#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "convreg/linalg.hpp"

namespace convreg {

inline constexpr double kMembershipTol = 1e-10;

struct EmptySet {};

struct Singleton {
    Vec v;
};

struct Box {
    Vec lo, hi;  // entries may be +-inf, lo <= hi componentwise
};

struct Polytope {
    std::vector<Vec> vertices;  // at least one, at most 8
};

struct AffineSet {
    Vec point;
    std::vector<Vec> basis;  // orthonormal directions spanning the flat
};

struct DistanceOracle {
    std::string tag;
    std::function<double(const Vec&)> distance;
};

class ConvexSet {
public:
    using Variant = std::variant<EmptySet, Singleton, Box, Polytope, AffineSet, DistanceOracle>;

    ConvexSet() : v_(EmptySet{}) {}
    ConvexSet(Variant v) : v_(std::move(v)) { validate(); }

    static ConvexSet empty() { return ConvexSet(EmptySet{}); }
    static ConvexSet singleton(Vec v) { return ConvexSet(Singleton{std::move(v)}); }
    static ConvexSet box(Vec lo, Vec hi) { return ConvexSet(Box{std::move(lo), std::move(hi)}); }
    static ConvexSet polytope(std::vector<Vec> vertices) { return ConvexSet(Polytope{std::move(vertices)}); }
    static ConvexSet affine(Vec point, std::vector<Vec> basis) {
        return ConvexSet(AffineSet{std::move(point), std::move(basis)});
    }
    // 1-D interval, canonicalized to the tightest variant
    static ConvexSet interval(double lo, double hi) {
        if (lo > hi) return empty();
        if (lo == hi) return singleton({lo});
        return box({lo}, {hi});
    }

    const Variant& variant() const { return v_; }
    bool is_empty() const { return std::holds_alternative<EmptySet>(v_); }

    template <class T>
    const T* as() const {
        return std::get_if<T>(&v_);
    }

    std::size_t dim() const {
        if (auto* s = as<Singleton>()) return s->v.size();
        if (auto* b = as<Box>()) return b->lo.size();
        if (auto* p = as<Polytope>()) return p->vertices.front().size();
        if (auto* a = as<AffineSet>()) return a->point.size();
        return 0;
    }

    bool is_bounded() const {
        if (auto* b = as<Box>()) {
            for (std::size_t i = 0; i < b->lo.size(); ++i)
                if (std::isinf(b->lo[i]) || std::isinf(b->hi[i])) return false;
            return true;
        }
        if (as<AffineSet>()) return as<AffineSet>()->basis.empty();
        if (as<DistanceOracle>()) return false;  // unknown, treat as unbounded
        return true;  // Empty, Singleton, Polytope
    }

private:
    void validate() const {
        if (auto* b = as<Box>()) {
            if (b->lo.size() != b->hi.size()) throw std::invalid_argument("Box: lo/hi dimension mismatch");
            for (std::size_t i = 0; i < b->lo.size(); ++i)
                if (!(b->lo[i] <= b->hi[i])) throw std::invalid_argument("Box: lo > hi");
        }
        if (auto* p = as<Polytope>()) {
            if (p->vertices.empty()) throw std::invalid_argument("Polytope: needs at least one vertex");
            if (p->vertices.size() > 8) throw std::invalid_argument("Polytope: vertex count exceeds 8");
            for (const auto& v : p->vertices)
                if (v.size() != p->vertices.front().size())
                    throw std::invalid_argument("Polytope: inconsistent vertex dimensions");
        }
        if (auto* a = as<AffineSet>()) {
            for (std::size_t i = 0; i < a->basis.size(); ++i) {
                if (a->basis[i].size() != a->point.size())
                    throw std::invalid_argument("Affine: basis dimension mismatch");
                for (std::size_t j = 0; j <= i; ++j) {
                    const double g = dot(a->basis[i], a->basis[j]);
                    const double want = (i == j) ? 1.0 : 0.0;
                    if (std::abs(g - want) > 1e-12)
                        throw std::invalid_argument("Affine: basis not orthonormal");
                }
            }
        }
    }

    Variant v_;
};

// Projection of x onto the convex hull of a vertex subset, by active-set
// enumeration: the nearest point lies in the relative interior of some face,
// so checking every subset's affine-hull projection for nonnegative
// barycentric weights is exact.
namespace detail {

struct PolytopeProjection {
    double distance;
    Vec point;
};

inline std::optional<PolytopeProjection> project_onto_hull_subset(const std::vector<Vec>& verts,
                                                                  const std::vector<std::size_t>& idx,
                                                                  const Vec& x) {
    const std::size_t m = idx.size();
    if (m == 1) {
        return PolytopeProjection{norm(sub(x, verts[idx[0]])), verts[idx[0]]};
    }
    // Minimize ||x - v0 - sum_k mu_k (v_k - v0)||, then weights lambda from mu.
    const Vec& v0 = verts[idx[0]];
    std::vector<Vec> dirs;
    for (std::size_t k = 1; k < m; ++k) dirs.push_back(sub(verts[idx[k]], v0));
    Mat G(m - 1, Vec(m - 1));
    Vec rhs(m - 1);
    const Vec d = sub(x, v0);
    for (std::size_t i = 0; i + 1 < m; ++i) {
        rhs[i] = dot(dirs[i], d);
        for (std::size_t j = 0; j + 1 < m; ++j) G[i][j] = dot(dirs[i], dirs[j]);
    }
    const PseudoSolve ps = pseudo_solve_symmetric(G, rhs);
    if (!ps.consistent) return std::nullopt;  // affinely dependent and off-hull; a smaller face covers it
    const Vec& mu = ps.min_norm_solution;
    double mu_sum = 0.0;
    for (double m_k : mu) {
        if (m_k < -1e-12) return std::nullopt;
        mu_sum += m_k;
    }
    if (mu_sum > 1.0 + 1e-12) return std::nullopt;
    Vec p = v0;
    for (std::size_t k = 0; k + 1 < m; ++k) p = add(p, scale(dirs[k], mu[k]));
    return PolytopeProjection{norm(sub(x, p)), p};
}

}  // namespace detail

inline Vec project(const ConvexSet& S, const Vec& x);

inline double set_distance(const ConvexSet& S, const Vec& x) {
    if (S.is_empty()) return kInf;
    if (auto* o = S.as<DistanceOracle>()) return o->distance(x);
    return norm(sub(x, project(S, x)));
}

inline Vec project(const ConvexSet& S, const Vec& x) {
    if (auto* s = S.as<Singleton>()) return s->v;
    if (auto* b = S.as<Box>()) {
        Vec p(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) p[i] = std::clamp(x[i], b->lo[i], b->hi[i]);
        return p;
    }
    if (auto* a = S.as<AffineSet>()) {
        Vec p = a->point;
        const Vec d = sub(x, a->point);
        for (const Vec& u : a->basis) p = add(p, scale(u, dot(u, d)));
        return p;
    }
    if (auto* poly = S.as<Polytope>()) {
        const std::size_t nv = poly->vertices.size();
        double best = kInf;
        Vec best_p;
        for (std::size_t mask = 1; mask < (1u << nv); ++mask) {
            std::vector<std::size_t> idx;
            for (std::size_t k = 0; k < nv; ++k)
                if (mask & (1u << k)) idx.push_back(k);
            auto proj = detail::project_onto_hull_subset(poly->vertices, idx, x);
            if (proj && proj->distance < best) {
                best = proj->distance;
                best_p = proj->point;
            }
        }
        return best_p;
    }
    throw std::runtime_error("project: unsupported set variant");
}

inline bool contains(const ConvexSet& S, const Vec& x, double tol = kMembershipTol) {
    return set_distance(S, x) <= tol;
}

// Extreme points of the bounded variants; Box corners enumerated when finite.
inline std::vector<Vec> extreme_points(const ConvexSet& S) {
    if (S.is_empty()) return {};
    if (auto* s = S.as<Singleton>()) return {s->v};
    if (auto* p = S.as<Polytope>()) return p->vertices;
    if (auto* b = S.as<Box>()) {
        const std::size_t n = b->lo.size();
        for (std::size_t i = 0; i < n; ++i)
            if (std::isinf(b->lo[i]) || std::isinf(b->hi[i]))
                throw std::runtime_error("extreme_points: unbounded box");
        std::vector<Vec> pts;
        for (std::size_t mask = 0; mask < (1u << n); ++mask) {
            Vec v(n);
            for (std::size_t i = 0; i < n; ++i) v[i] = (mask & (1u << i)) ? b->hi[i] : b->lo[i];
            pts.push_back(std::move(v));
        }
        return pts;
    }
    throw std::runtime_error("extreme_points: unsupported set variant");
}

// e(C, D) = sup_{x in C} d(x, D); conventions e({}, D) = 0 for D nonempty
// and e({}, {}) = inf. The sup over a bounded C is attained at an extreme
// point since d(., D) is convex.
inline double set_excess(const ConvexSet& C, const ConvexSet& D) {
    if (C.is_empty()) return D.is_empty() ? kInf : 0.0;
    if (D.is_empty()) return kInf;
    if (!C.is_bounded()) return kInf;
    if (auto* a = C.as<AffineSet>()) return set_distance(D, a->point);  // bounded affine = point
    double sup = 0.0;
    for (const Vec& x : extreme_points(C)) sup = std::max(sup, set_distance(D, x));
    return sup;
}

// Exact minimum of a linear functional <d, .> over the set; may be -inf on
// unbounded variants.
inline double support_min(const ConvexSet& S, const Vec& d) {
    if (S.is_empty()) return kInf;
    if (auto* s = S.as<Singleton>()) return dot(d, s->v);
    if (auto* b = S.as<Box>()) {
        double m = 0.0;
        for (std::size_t i = 0; i < d.size(); ++i) {
            if (d[i] > 0.0) {
                if (std::isinf(b->lo[i])) return -kInf;
                m += d[i] * b->lo[i];
            } else if (d[i] < 0.0) {
                if (std::isinf(b->hi[i])) return -kInf;
                m += d[i] * b->hi[i];
            }
        }
        return m;
    }
    if (auto* p = S.as<Polytope>()) {
        double m = kInf;
        for (const Vec& v : p->vertices) m = std::min(m, dot(d, v));
        return m;
    }
    if (auto* a = S.as<AffineSet>()) {
        for (const Vec& u : a->basis)
            if (std::abs(dot(d, u)) > 1e-14) return -kInf;
        return dot(d, a->point);
    }
    throw std::runtime_error("support_min: unsupported set variant");
}

// Intersection with a coordinate box, exact for Singleton/Box and for
// Polytope in dimension <= 2 (Sutherland-Hodgman clipping).
inline ConvexSet intersect_box(const ConvexSet& S, const Vec& lo, const Vec& hi) {
    if (S.is_empty()) return ConvexSet::empty();
    if (auto* s = S.as<Singleton>()) {
        for (std::size_t i = 0; i < s->v.size(); ++i)
            if (s->v[i] < lo[i] - kMembershipTol || s->v[i] > hi[i] + kMembershipTol)
                return ConvexSet::empty();
        return S;
    }
    if (auto* b = S.as<Box>()) {
        Vec nlo(lo.size()), nhi(hi.size());
        for (std::size_t i = 0; i < lo.size(); ++i) {
            nlo[i] = std::max(b->lo[i], lo[i]);
            nhi[i] = std::min(b->hi[i], hi[i]);
            if (nlo[i] > nhi[i]) return ConvexSet::empty();
        }
        return ConvexSet::box(std::move(nlo), std::move(nhi));
    }
    if (auto* p = S.as<Polytope>()) {
        const std::size_t n = p->vertices.front().size();
        if (n == 1) {
            double plo = kInf, phi = -kInf;
            for (const Vec& v : p->vertices) {
                plo = std::min(plo, v[0]);
                phi = std::max(phi, v[0]);
            }
            plo = std::max(plo, lo[0]);
            phi = std::min(phi, hi[0]);
            if (plo > phi) return ConvexSet::empty();
            if (plo == phi) return ConvexSet::singleton({plo});
            return ConvexSet::polytope({{plo}, {phi}});
        }
        if (n == 2) {
            // order vertices counterclockwise around the centroid, then clip
            std::vector<Vec> poly = p->vertices;
            Vec c(2, 0.0);
            for (const Vec& v : poly) c = add(c, v);
            c = scale(c, 1.0 / static_cast<double>(poly.size()));
            std::sort(poly.begin(), poly.end(), [&](const Vec& a, const Vec& b2) {
                return std::atan2(a[1] - c[1], a[0] - c[0]) < std::atan2(b2[1] - c[1], b2[0] - c[0]);
            });
            auto clip = [](std::vector<Vec> pts, int axis, double bound, bool keep_below) {
                std::vector<Vec> out;
                const std::size_t m = pts.size();
                for (std::size_t i = 0; i < m; ++i) {
                    const Vec& a = pts[i];
                    const Vec& b2 = pts[(i + 1) % m];
                    const bool ain = keep_below ? a[axis] <= bound : a[axis] >= bound;
                    const bool bin = keep_below ? b2[axis] <= bound : b2[axis] >= bound;
                    if (ain) out.push_back(a);
                    if (ain != bin) {
                        const double t = (bound - a[axis]) / (b2[axis] - a[axis]);
                        out.push_back({a[0] + t * (b2[0] - a[0]), a[1] + t * (b2[1] - a[1])});
                    }
                }
                return out;
            };
            for (int axis = 0; axis < 2; ++axis) {
                if (!std::isinf(hi[axis])) poly = clip(poly, axis, hi[axis], true);
                if (poly.empty()) return ConvexSet::empty();
                if (!std::isinf(lo[axis])) poly = clip(poly, axis, lo[axis], false);
                if (poly.empty()) return ConvexSet::empty();
            }
            // deduplicate clip artifacts
            std::vector<Vec> uniq;
            for (const Vec& v : poly) {
                bool dup = false;
                for (const Vec& u : uniq)
                    if (norm(sub(u, v)) < 1e-12) dup = true;
                if (!dup) uniq.push_back(v);
            }
            if (uniq.size() == 1) return ConvexSet::singleton(uniq[0]);
            return ConvexSet::polytope(std::move(uniq));
        }
        throw std::runtime_error("intersect_box: polytope clipping only supported for n <= 2");
    }
    throw std::runtime_error("intersect_box: unsupported set variant");
}

// Exact test of S intersected with the coordinate box of radius a about
// center being the single point {center}; decided from the variant.
inline bool isolated_in_ball(const ConvexSet& S, const Vec& center, double a) {
    if (S.is_empty()) return false;
    if (auto* s = S.as<Singleton>()) return norm(sub(s->v, center)) <= kMembershipTol;
    if (auto* b = S.as<Box>()) {
        for (std::size_t i = 0; i < center.size(); ++i) {
            const double lo = std::max(b->lo[i], center[i] - a);
            const double hi = std::min(b->hi[i], center[i] + a);
            if (hi - lo > kMembershipTol) return false;
            if (std::abs(lo - center[i]) > kMembershipTol) return false;
        }
        return true;
    }
    if (auto* af = S.as<AffineSet>()) {
        if (!af->basis.empty()) return false;
        return norm(sub(af->point, center)) <= kMembershipTol;
    }
    if (auto* p = S.as<Polytope>()) {
        for (const Vec& v : p->vertices)
            if (norm(sub(v, center)) > kMembershipTol) return false;
        return true;
    }
    throw std::runtime_error("isolated_in_ball: unsupported set variant");
}

}  // namespace convreg
