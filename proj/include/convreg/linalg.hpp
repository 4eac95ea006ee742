#pragma once

// Dense linear algebra for dimensions up to 4: vectors, symmetric matrices,
// Jacobi eigendecomposition, pseudoinverse solves. Everything is exact
// enumeration-scale; no external solver needed.

#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <vector>

namespace convreg {

using Vec = std::vector<double>;
using Mat = std::vector<std::vector<double>>;  // row-major, square when symmetric

inline constexpr double kInf = std::numeric_limits<double>::infinity();

inline double dot(const Vec& a, const Vec& b) {
    if (a.size() != b.size()) throw std::invalid_argument("dot: dimension mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline double norm(const Vec& a) { return std::sqrt(dot(a, a)); }

inline Vec add(const Vec& a, const Vec& b) {
    if (a.size() != b.size()) throw std::invalid_argument("add: dimension mismatch");
    Vec r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
    return r;
}

inline Vec sub(const Vec& a, const Vec& b) {
    if (a.size() != b.size()) throw std::invalid_argument("sub: dimension mismatch");
    Vec r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
    return r;
}

inline Vec scale(const Vec& a, double s) {
    Vec r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = s * a[i];
    return r;
}

inline Vec matvec(const Mat& A, const Vec& x) {
    Vec r(A.size(), 0.0);
    for (std::size_t i = 0; i < A.size(); ++i) {
        if (A[i].size() != x.size()) throw std::invalid_argument("matvec: dimension mismatch");
        for (std::size_t j = 0; j < x.size(); ++j) r[i] += A[i][j] * x[j];
    }
    return r;
}

inline Mat identity(std::size_t n) {
    Mat I(n, Vec(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) I[i][i] = 1.0;
    return I;
}

struct EigenDecomposition {
    Vec values;                 // ascending
    std::vector<Vec> vectors;   // vectors[k] pairs with values[k], orthonormal
};

// Cyclic Jacobi for symmetric matrices, n <= 4. Converges to off-diagonal
// magnitude below 1e-14 in a handful of sweeps at this size.
inline EigenDecomposition symmetric_eigen(const Mat& A) {
    const std::size_t n = A.size();
    for (const auto& row : A)
        if (row.size() != n) throw std::invalid_argument("symmetric_eigen: matrix not square");
    Mat a = A;
    Mat v = identity(n);
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) off += a[i][j] * a[i][j];
        if (off < 1e-28) break;
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                if (std::abs(a[p][q]) < 1e-300) continue;
                const double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                const double t = (theta >= 0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const double akp = a[k][p], akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double apk = a[p][k], aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double vkp = v[k][p], vkq = v[k][q];
                    v[k][p] = c * vkp - s * vkq;
                    v[k][q] = s * vkp + c * vkq;
                }
            }
        }
    }
    EigenDecomposition ed;
    ed.values.resize(n);
    ed.vectors.assign(n, Vec(n));
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (a[order[j]][order[j]] < a[order[i]][order[i]]) std::swap(order[i], order[j]);
    for (std::size_t k = 0; k < n; ++k) {
        ed.values[k] = a[order[k]][order[k]];
        for (std::size_t i = 0; i < n; ++i) ed.vectors[k][i] = v[i][order[k]];
    }
    return ed;
}

inline double min_eigenvalue(const Mat& A) { return symmetric_eigen(A).values.front(); }

struct PseudoSolve {
    bool consistent = false;
    Vec min_norm_solution;      // least-squares minimum-norm solution
    std::vector<Vec> null_basis;  // orthonormal basis of ker(A)
};

// Minimum-norm solve of A x = rhs for symmetric A via eigendecomposition,
// reporting consistency and the null space. rank_tol decides zero eigenvalues.
inline PseudoSolve pseudo_solve_symmetric(const Mat& A, const Vec& rhs, double rank_tol = 1e-10) {
    const std::size_t n = A.size();
    const EigenDecomposition ed = symmetric_eigen(A);
    double scale_ref = 0.0;
    for (double lam : ed.values) scale_ref = std::max(scale_ref, std::abs(lam));
    const double tol = rank_tol * std::max(1.0, scale_ref);
    PseudoSolve ps;
    ps.consistent = true;
    ps.min_norm_solution.assign(n, 0.0);
    for (std::size_t k = 0; k < n; ++k) {
        const double coef = dot(ed.vectors[k], rhs);
        if (std::abs(ed.values[k]) <= tol) {
            ps.null_basis.push_back(ed.vectors[k]);
            if (std::abs(coef) > 1e-9 * std::max(1.0, norm(rhs))) ps.consistent = false;
        } else {
            for (std::size_t i = 0; i < n; ++i)
                ps.min_norm_solution[i] += (coef / ed.values[k]) * ed.vectors[k][i];
        }
    }
    return ps;
}

// Solve a small SPD system by Gaussian elimination with partial pivoting.
inline Vec solve_linear(Mat A, Vec b) {
    const std::size_t n = A.size();
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::abs(A[r][col]) > std::abs(A[piv][col])) piv = r;
        if (std::abs(A[piv][col]) < 1e-300) throw std::runtime_error("solve_linear: singular matrix");
        std::swap(A[col], A[piv]);
        std::swap(b[col], b[piv]);
        for (std::size_t r = 0; r < n; ++r) {
            if (r == col) continue;
            const double m = A[r][col] / A[col][col];
            for (std::size_t c = col; c < n; ++c) A[r][c] -= m * A[col][c];
            b[r] -= m * b[col];
        }
    }
    Vec x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = b[i] / A[i][i];
    return x;
}

inline Mat inverse_spd(const Mat& A) {
    const std::size_t n = A.size();
    Mat inv(n, Vec(n, 0.0));
    for (std::size_t j = 0; j < n; ++j) {
        Vec e(n, 0.0);
        e[j] = 1.0;
        Vec col = solve_linear(A, e);
        for (std::size_t i = 0; i < n; ++i) inv[i][j] = col[i];
    }
    // symmetrize against elimination round-off
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            const double m = 0.5 * (inv[i][j] + inv[j][i]);
            inv[i][j] = inv[j][i] = m;
        }
    return inv;
}

}  // namespace convreg
