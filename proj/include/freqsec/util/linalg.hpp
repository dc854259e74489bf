#pragma once

// Small dense linear-algebra helpers. Problem sizes here are tiny (KKT
// systems up to ~20x20, Gram matrices 8x8), so everything is plain
// row-major storage with partial-pivot elimination.

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace freqsec::linalg {

using Vec = std::vector<double>;

class Mat {
public:
    Mat() = default;
    Mat(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    Vec& data() { return data_; }
    const Vec& data() const { return data_; }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    Vec data_;
};

inline double dot(const Vec& a, const Vec& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

// A^T A and A^T y for least-squares normal equations.
inline Mat gram(const Mat& a) {
    Mat g(a.cols(), a.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) {
            const double aij = a(i, j);
            if (aij == 0.0) continue;
            for (std::size_t k = j; k < a.cols(); ++k) g(j, k) += aij * a(i, k);
        }
    for (std::size_t j = 0; j < a.cols(); ++j)
        for (std::size_t k = 0; k < j; ++k) g(j, k) = g(k, j);
    return g;
}

inline Vec mat_vec(const Mat& a, const Vec& x) {
    Vec y(a.rows(), 0.0);
    for (std::size_t i = 0; i < a.rows(); ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < a.cols(); ++j) s += a(i, j) * x[j];
        y[i] = s;
    }
    return y;
}

inline Vec mat_t_vec(const Mat& a, const Vec& x) {
    Vec y(a.cols(), 0.0);
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) y[j] += a(i, j) * x[i];
    return y;
}

// Solves A x = b in place via Gaussian elimination with partial pivoting.
// Returns false if a pivot falls below `tol` times the largest entry.
inline bool lu_solve(Mat a, Vec b, Vec& x, double tol = 1e-13) {
    const std::size_t n = a.rows();
    if (a.cols() != n || b.size() != n) throw std::invalid_argument("lu_solve: shape mismatch");
    double scale = 0.0;
    for (double v : a.data()) scale = std::max(scale, std::fabs(v));
    if (scale == 0.0) return false;

    std::vector<std::size_t> perm(n);
    for (std::size_t i = 0; i < n; ++i) perm[i] = i;

    for (std::size_t k = 0; k < n; ++k) {
        std::size_t piv = k;
        double best = std::fabs(a(k, k));
        for (std::size_t i = k + 1; i < n; ++i) {
            const double v = std::fabs(a(i, k));
            if (v > best) { best = v; piv = i; }
        }
        if (best <= tol * scale) return false;
        if (piv != k) {
            for (std::size_t j = 0; j < n; ++j) std::swap(a(k, j), a(piv, j));
            std::swap(b[k], b[piv]);
        }
        const double inv = 1.0 / a(k, k);
        for (std::size_t i = k + 1; i < n; ++i) {
            const double f = a(i, k) * inv;
            if (f == 0.0) continue;
            a(i, k) = 0.0;
            for (std::size_t j = k + 1; j < n; ++j) a(i, j) -= f * a(k, j);
            b[i] -= f * b[k];
        }
    }
    x.assign(n, 0.0);
    for (std::size_t ik = n; ik-- > 0;) {
        double s = b[ik];
        for (std::size_t j = ik + 1; j < n; ++j) s -= a(ik, j) * x[j];
        x[ik] = s / a(ik, ik);
    }
    return true;
}

}  // namespace freqsec::linalg
