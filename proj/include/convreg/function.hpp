#pragma once

// Symbolic descriptors for a fixed catalog of proper lsc convex functions
// on R^n, n <= 4. Each variant carries enough structure for exact value,
// subdifferential and solution-set oracles; see catalog.hpp.

#include <memory>
#include <stdexcept>
#include <variant>
#include <vector>

#include "convreg/linalg.hpp"

namespace convreg {

class ConvexFunctionSpec;
using FunPtr = std::shared_ptr<const ConvexFunctionSpec>;

// f(x) = 1/2 x'Ax + b'x, A symmetric positive semidefinite
struct Quadratic {
    Mat A;
    Vec b;
};

// f(x) = |x|, n = 1
struct Abs {};

// f(x) = x^p, p even >= 2, n = 1
struct PowerEven {
    int p;
};

// f(x) = max_i <a_i, x> + beta_i
struct MaxAffine {
    std::vector<Vec> slopes;
    Vec intercepts;
};

// 0 on [lo, hi], +inf outside
struct IndicatorBox {
    Vec lo, hi;
};

// alpha * inner, alpha > 0
struct Scaled {
    FunPtr inner;
    double alpha;
};

// left + right, same dimension
struct SumFun {
    FunPtr left, right;
};

// f(x) = sum_i parts[i](x_i), each part 1-D
struct Separable {
    std::vector<FunPtr> parts;
};

// inner(x) - <tilt, x>
struct Tilted {
    FunPtr inner;
    Vec tilt;
};

class ConvexFunctionSpec {
public:
    using Variant =
        std::variant<Quadratic, Abs, PowerEven, MaxAffine, IndicatorBox, Scaled, SumFun, Separable, Tilted>;

    ConvexFunctionSpec(Variant v) : v_(std::move(v)) { validate(); }

    static FunPtr make(Variant v) { return std::make_shared<const ConvexFunctionSpec>(std::move(v)); }

    static FunPtr quadratic(Mat A, Vec b) { return make(Quadratic{std::move(A), std::move(b)}); }
    static FunPtr abs() { return make(Abs{}); }
    static FunPtr power_even(int p) { return make(PowerEven{p}); }
    static FunPtr max_affine(std::vector<Vec> slopes, Vec intercepts) {
        return make(MaxAffine{std::move(slopes), std::move(intercepts)});
    }
    static FunPtr indicator_box(Vec lo, Vec hi) { return make(IndicatorBox{std::move(lo), std::move(hi)}); }
    static FunPtr scaled(FunPtr inner, double alpha) { return make(Scaled{std::move(inner), alpha}); }
    static FunPtr sum(FunPtr left, FunPtr right) { return make(SumFun{std::move(left), std::move(right)}); }
    static FunPtr separable(std::vector<FunPtr> parts) { return make(Separable{std::move(parts)}); }
    static FunPtr tilted(FunPtr inner, Vec tilt) { return make(Tilted{std::move(inner), std::move(tilt)}); }

    const Variant& variant() const { return v_; }

    template <class T>
    const T* as() const {
        return std::get_if<T>(&v_);
    }

    std::size_t dim() const {
        if (auto* q = as<Quadratic>()) return q->A.size();
        if (as<Abs>() || as<PowerEven>()) return 1;
        if (auto* m = as<MaxAffine>()) return m->slopes.front().size();
        if (auto* i = as<IndicatorBox>()) return i->lo.size();
        if (auto* s = as<Scaled>()) return s->inner->dim();
        if (auto* s = as<SumFun>()) return s->left->dim();
        if (auto* s = as<Separable>()) return s->parts.size();
        return as<Tilted>()->inner->dim();
    }

private:
    void validate() const {
        const std::size_t n = dim();
        if (n < 1 || n > 4) throw std::invalid_argument("catalog: dimension must be in [1, 4]");
        if (auto* q = as<Quadratic>()) {
            if (q->b.size() != n) throw std::invalid_argument("Quadratic: b dimension mismatch");
            for (const auto& row : q->A)
                if (row.size() != n) throw std::invalid_argument("Quadratic: A not square");
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = i + 1; j < n; ++j)
                    if (std::abs(q->A[i][j] - q->A[j][i]) > 1e-12)
                        throw std::invalid_argument("Quadratic: A not symmetric");
            if (min_eigenvalue(q->A) < -1e-12)
                throw std::invalid_argument("Quadratic: A not positive semidefinite");
        } else if (auto* p = as<PowerEven>()) {
            if (p->p < 2 || p->p % 2 != 0) throw std::invalid_argument("PowerEven: p must be even and >= 2");
        } else if (auto* m = as<MaxAffine>()) {
            if (m->slopes.empty()) throw std::invalid_argument("MaxAffine: needs at least one piece");
            if (m->intercepts.size() != m->slopes.size())
                throw std::invalid_argument("MaxAffine: slopes/intercepts count mismatch");
            for (const Vec& a : m->slopes)
                if (a.size() != n) throw std::invalid_argument("MaxAffine: slope dimension mismatch");
        } else if (auto* i = as<IndicatorBox>()) {
            if (i->hi.size() != n) throw std::invalid_argument("IndicatorBox: lo/hi dimension mismatch");
            for (std::size_t k = 0; k < n; ++k)
                if (!(i->lo[k] <= i->hi[k])) throw std::invalid_argument("IndicatorBox: lo > hi");
        } else if (auto* s = as<Scaled>()) {
            if (!(s->alpha > 0.0)) throw std::invalid_argument("Scaled: alpha must be positive");
        } else if (auto* s = as<SumFun>()) {
            if (s->left->dim() != s->right->dim())
                throw std::invalid_argument("Sum: operand dimensions differ");
        } else if (auto* s = as<Separable>()) {
            for (const FunPtr& part : s->parts)
                if (part->dim() != 1) throw std::invalid_argument("Separable: parts must be 1-D");
        } else if (auto* t = as<Tilted>()) {
            if (t->tilt.size() != n) throw std::invalid_argument("Tilted: tilt dimension mismatch");
        }
    }

    Variant v_;
};

}  // namespace convreg
