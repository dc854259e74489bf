#pragma once

// Test-only oracles for the conservative least-squares solver: a zooming
// dense grid combined with closed-form candidates from enumerated equality
// sets. Independent of the active-set implementation under test.

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "freqsec/util/linalg.hpp"

namespace ls_oracle {

using freqsec::linalg::Mat;
using freqsec::linalg::Vec;
namespace linalg = freqsec::linalg;

inline double objective(const Mat& X, const Vec& y, const Vec& theta) {
    double s = 0.0;
    for (std::size_t i = 0; i < X.rows(); ++i) {
        double r = -y[i];
        for (std::size_t j = 0; j < X.cols(); ++j) r += X(i, j) * theta[j];
        s += 0.5 * r * r;
    }
    return s;
}

inline bool is_feasible(const Mat& X, const Vec& y, const Vec& theta, double tol) {
    for (std::size_t i = 0; i < X.rows(); ++i) {
        double r = -y[i];
        for (std::size_t j = 0; j < X.cols(); ++j) r += X(i, j) * theta[j];
        if (r < -tol) return false;
    }
    return true;
}

// Grid/KKT oracle, independent of the active-set path: a zooming dense grid
// plus closed-form candidates with zero, one or two rows held at equality
// (the one-row case minimizes the quadratic along the constraint line).
inline Vec grid_search_oracle(const Mat& X, const Vec& y) {
    const std::size_t p = X.cols();
    const std::size_t n = X.rows();
    Vec center(p, 0.0), best(p, 0.0);
    double radius = 8.0;
    double best_obj = std::numeric_limits<double>::infinity();
    auto consider = [&](const Vec& theta) {
        if (!is_feasible(X, y, theta, 1e-9)) return;
        const double obj = objective(X, y, theta);
        if (obj < best_obj) {
            best_obj = obj;
            best = theta;
        }
    };
    for (int pass = 0; pass < 12; ++pass) {
        const int steps = 24;
        std::vector<int> idx(p, -steps);
        bool done = false;
        while (!done) {
            Vec theta(p);
            for (std::size_t j = 0; j < p; ++j)
                theta[j] = center[j] + radius * static_cast<double>(idx[j]) / steps;
            consider(theta);
            // odometer increment
            std::size_t j = 0;
            while (j < p) {
                if (++idx[j] <= steps) break;
                idx[j] = -steps;
                ++j;
            }
            done = j == p;
        }
        center = best;
        radius /= 4.0;
    }

    // Unconstrained stationary point.
    {
        Vec theta;
        if (linalg::lu_solve(linalg::gram(X), linalg::mat_t_vec(X, y), theta)) consider(theta);
    }
    if (p == 1) {
        for (std::size_t i = 0; i < n; ++i)
            if (std::fabs(X(i, 0)) > 1e-12) consider(Vec{y[i] / X(i, 0)});
    } else if (p == 2) {
        for (std::size_t i = 0; i < n; ++i) {
            const double a0 = X(i, 0), a1 = X(i, 1);
            const double nrm = a0 * a0 + a1 * a1;
            if (nrm < 1e-12) continue;
            // base point on the line a.theta = y_i, then minimize along the
            // null direction d = (-a1, a0): a scalar quadratic.
            const Vec base{a0 * y[i] / nrm, a1 * y[i] / nrm};
            const Vec dir{-a1, a0};
            double num = 0.0, den = 0.0;
            for (std::size_t r = 0; r < n; ++r) {
                const double xd = X(r, 0) * dir[0] + X(r, 1) * dir[1];
                const double res = X(r, 0) * base[0] + X(r, 1) * base[1] - y[r];
                num -= res * xd;
                den += xd * xd;
            }
            if (den > 1e-14) consider(Vec{base[0] + num / den * dir[0],
                                          base[1] + num / den * dir[1]});
            for (std::size_t k = i + 1; k < n; ++k) {
                const double b0 = X(k, 0), b1 = X(k, 1);
                const double det = a0 * b1 - a1 * b0;
                if (std::fabs(det) < 1e-12) continue;
                consider(Vec{(y[i] * b1 - a1 * y[k]) / det, (a0 * y[k] - y[i] * b0) / det});
            }
        }
    }
    return best;
}

}  // namespace ls_oracle
