#include "freqsec/scheduler/lp.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace freqsec::lp {

namespace {

constexpr double kPivTol = 1e-9;    // minimum pivot magnitude in the ratio test
constexpr double kDualTol = 1e-9;   // phase-1 pricing tolerance
constexpr double kDegenStep = 1e-11;

double feas_eps(double bound) { return 1e-7 * (1.0 + std::fabs(bound)); }

// Dense Gauss-Jordan inverse with partial pivoting.
bool invert_dense(std::vector<double>& a, int m) {
    std::vector<double> inv(static_cast<std::size_t>(m) * m, 0.0);
    for (int i = 0; i < m; ++i) inv[static_cast<std::size_t>(i) * m + i] = 1.0;
    for (int k = 0; k < m; ++k) {
        int piv = k;
        double best = std::fabs(a[static_cast<std::size_t>(k) * m + k]);
        for (int i = k + 1; i < m; ++i) {
            const double v = std::fabs(a[static_cast<std::size_t>(i) * m + k]);
            if (v > best) { best = v; piv = i; }
        }
        if (best < 1e-12) return false;
        if (piv != k) {
            for (int j = 0; j < m; ++j) {
                std::swap(a[static_cast<std::size_t>(k) * m + j],
                          a[static_cast<std::size_t>(piv) * m + j]);
                std::swap(inv[static_cast<std::size_t>(k) * m + j],
                          inv[static_cast<std::size_t>(piv) * m + j]);
            }
        }
        const double d = 1.0 / a[static_cast<std::size_t>(k) * m + k];
        for (int j = 0; j < m; ++j) {
            a[static_cast<std::size_t>(k) * m + j] *= d;
            inv[static_cast<std::size_t>(k) * m + j] *= d;
        }
        for (int i = 0; i < m; ++i) {
            if (i == k) continue;
            const double f = a[static_cast<std::size_t>(i) * m + k];
            if (f == 0.0) continue;
            for (int j = 0; j < m; ++j) {
                a[static_cast<std::size_t>(i) * m + j] -=
                    f * a[static_cast<std::size_t>(k) * m + j];
                inv[static_cast<std::size_t>(i) * m + j] -=
                    f * inv[static_cast<std::size_t>(k) * m + j];
            }
        }
    }
    a.swap(inv);
    return true;
}

}  // namespace

BoundedSimplex::BoundedSimplex(const Problem& problem) {
    n_ = problem.num_vars;
    m_ = static_cast<int>(problem.rows.size());
    width_ = n_ + m_;

    cost_ = problem.obj;
    cost_.resize(static_cast<std::size_t>(width_), 0.0);
    lo_ = problem.lo;
    up_ = problem.up;
    lo_.resize(static_cast<std::size_t>(width_), -kInf);
    up_.resize(static_cast<std::size_t>(width_), kInf);

    cols_.assign(static_cast<std::size_t>(width_), {});
    tableau_.assign(static_cast<std::size_t>(m_) * width_, 0.0);

    for (int i = 0; i < m_; ++i) {
        const Row& row = problem.rows[static_cast<std::size_t>(i)];
        double maxabs = 0.0;
        for (const auto& [j, v] : row.coeffs) {
            if (j < 0 || j >= n_) throw std::invalid_argument("lp: row references unknown var");
            maxabs = std::max(maxabs, std::fabs(v));
        }
        double scale = maxabs > 0.0 ? 1.0 / maxabs : 1.0;
        scale = std::clamp(scale, 1e-6, 1e6);
        for (const auto& [j, v] : row.coeffs) {
            cols_[static_cast<std::size_t>(j)].emplace_back(i, v * scale);
            t_at(i, j) = -v * scale;  // initial basis is the slacks with coefficient -1
        }
        const int slack = n_ + i;
        cols_[static_cast<std::size_t>(slack)].emplace_back(i, -1.0);
        t_at(i, slack) = 1.0;
        lo_[static_cast<std::size_t>(slack)] = row.lo == -kInf ? -kInf : row.lo * scale;
        up_[static_cast<std::size_t>(slack)] = row.up == kInf ? kInf : row.up * scale;
    }

    basis_.resize(static_cast<std::size_t>(m_));
    basis_pos_.assign(static_cast<std::size_t>(width_), -1);
    vstate_.assign(static_cast<std::size_t>(width_), VState::AtZero);
    for (int j = 0; j < width_; ++j) {
        if (lo_[static_cast<std::size_t>(j)] > -kInf)
            vstate_[static_cast<std::size_t>(j)] = VState::AtLo;
        else if (up_[static_cast<std::size_t>(j)] < kInf)
            vstate_[static_cast<std::size_t>(j)] = VState::AtUp;
    }
    for (int i = 0; i < m_; ++i) {
        const int slack = n_ + i;
        basis_[static_cast<std::size_t>(i)] = slack;
        basis_pos_[static_cast<std::size_t>(slack)] = i;
        vstate_[static_cast<std::size_t>(slack)] = VState::Basic;
    }
    xb_.assign(static_cast<std::size_t>(m_), 0.0);
    recompute_basic_values();
}

double BoundedSimplex::nonbasic_value(int col) const {
    switch (vstate_[static_cast<std::size_t>(col)]) {
        case VState::AtLo: return lo_[static_cast<std::size_t>(col)];
        case VState::AtUp: return up_[static_cast<std::size_t>(col)];
        default: return 0.0;
    }
}

void BoundedSimplex::recompute_basic_values() {
    std::fill(xb_.begin(), xb_.end(), 0.0);
    for (int j = 0; j < width_; ++j) {
        if (vstate_[static_cast<std::size_t>(j)] == VState::Basic) continue;
        const double v = nonbasic_value(j);
        if (v == 0.0) continue;
        for (int i = 0; i < m_; ++i) xb_[static_cast<std::size_t>(i)] -= t_at(i, j) * v;
    }
}

void BoundedSimplex::set_var_bounds(int var, double lo_v, double up_v) {
    if (var < 0 || var >= n_) throw std::invalid_argument("set_var_bounds: bad variable");
    const auto v = static_cast<std::size_t>(var);
    const bool basic = vstate_[v] == VState::Basic;
    const double old_val = basic ? 0.0 : nonbasic_value(var);
    lo_[v] = lo_v;
    up_[v] = up_v;
    if (basic) return;  // value unchanged; feasibility repaired on next optimize
    VState ns = vstate_[v];
    if (ns == VState::AtLo && lo_v == -kInf) ns = up_v < kInf ? VState::AtUp : VState::AtZero;
    if (ns == VState::AtUp && up_v == kInf) ns = lo_v > -kInf ? VState::AtLo : VState::AtZero;
    if (ns == VState::AtZero && lo_v > -kInf) ns = VState::AtLo;
    vstate_[v] = ns;
    const double new_val = nonbasic_value(var);
    const double delta = new_val - old_val;
    if (delta != 0.0)
        for (int i = 0; i < m_; ++i) xb_[static_cast<std::size_t>(i)] -= t_at(i, var) * delta;
}

void BoundedSimplex::refactorize() {
    std::vector<double> b(static_cast<std::size_t>(m_) * m_, 0.0);
    for (int k = 0; k < m_; ++k)
        for (const auto& [r, v] : cols_[static_cast<std::size_t>(basis_[static_cast<std::size_t>(k)])])
            b[static_cast<std::size_t>(r) * m_ + k] = v;
    if (!invert_dense(b, m_)) throw std::runtime_error("lp: singular basis during refactorization");
    // T(:, j) = Binv * a_j, exploiting sparse original columns.
    std::fill(tableau_.begin(), tableau_.end(), 0.0);
    for (int j = 0; j < width_; ++j) {
        for (const auto& [r, v] : cols_[static_cast<std::size_t>(j)])
            for (int i = 0; i < m_; ++i)
                t_at(i, j) += b[static_cast<std::size_t>(i) * m_ + r] * v;
    }
    recompute_basic_values();
    pivots_since_refactor_ = 0;
}

bool BoundedSimplex::infeasibility(double& total_viol) const {
    total_viol = 0.0;
    for (int i = 0; i < m_; ++i) {
        const int col = basis_[static_cast<std::size_t>(i)];
        const double v = xb_[static_cast<std::size_t>(i)];
        const double lo = lo_[static_cast<std::size_t>(col)];
        const double up = up_[static_cast<std::size_t>(col)];
        if (lo > -kInf && v < lo - feas_eps(lo)) total_viol += lo - v;
        if (up < kInf && v > up + feas_eps(up)) total_viol += v - up;
    }
    return total_viol <= 0.0;
}

int BoundedSimplex::price_phase1(bool bland) {
    // Gradient of the total bound violation with respect to each nonbasic.
    linalg::Vec rc(static_cast<std::size_t>(width_), 0.0);
    for (int i = 0; i < m_; ++i) {
        const int col = basis_[static_cast<std::size_t>(i)];
        const double v = xb_[static_cast<std::size_t>(i)];
        const double lo = lo_[static_cast<std::size_t>(col)];
        const double up = up_[static_cast<std::size_t>(col)];
        double w = 0.0;
        if (lo > -kInf && v < lo - feas_eps(lo)) w = -1.0;
        else if (up < kInf && v > up + feas_eps(up)) w = 1.0;
        if (w == 0.0) continue;
        const double* row = &tableau_[static_cast<std::size_t>(i) * width_];
        for (int j = 0; j < width_; ++j) rc[static_cast<std::size_t>(j)] -= w * row[j];
    }
    int best = -1;
    double best_score = kDualTol;
    for (int j = 0; j < width_; ++j) {
        const VState s = vstate_[static_cast<std::size_t>(j)];
        if (s == VState::Basic) continue;
        const double r = rc[static_cast<std::size_t>(j)];
        double score = 0.0;
        if ((s == VState::AtLo || s == VState::AtZero) && r < -kDualTol) score = -r;
        if ((s == VState::AtUp || s == VState::AtZero) && r > kDualTol)
            score = std::max(score, r);
        if (score > best_score) {
            best_score = score;
            best = j;
            if (bland) break;
        }
    }
    if (best < 0) return -1;
    // Encode direction in the sign convention used by the caller via rc sign.
    const double r = rc[static_cast<std::size_t>(best)];
    return r < 0.0 ? best : -(best + 2);  // negative encoding => move down
}

int BoundedSimplex::price_phase2(bool bland) {
    // Reduced costs from scratch; the tableau is modest so this stays cheap
    // relative to the pivot update, and it avoids stale increments.
    linalg::Vec rc(cost_.begin(), cost_.end());
    for (int i = 0; i < m_; ++i) {
        const double cb = cost_[static_cast<std::size_t>(basis_[static_cast<std::size_t>(i)])];
        if (cb == 0.0) continue;
        const double* row = &tableau_[static_cast<std::size_t>(i) * width_];
        for (int j = 0; j < width_; ++j) rc[static_cast<std::size_t>(j)] -= cb * row[j];
    }
    double cscale = 1.0;
    for (int j = 0; j < width_; ++j) cscale = std::max(cscale, std::fabs(cost_[static_cast<std::size_t>(j)]));
    const double tol = std::max(1e-9, 1e-12 * cscale);
    int best = -1;
    double best_score = tol;
    for (int j = 0; j < width_; ++j) {
        const VState s = vstate_[static_cast<std::size_t>(j)];
        if (s == VState::Basic) continue;
        const double r = rc[static_cast<std::size_t>(j)];
        double score = 0.0;
        if ((s == VState::AtLo || s == VState::AtZero) && r < -tol) score = -r;
        if ((s == VState::AtUp || s == VState::AtZero) && r > tol) score = std::max(score, r);
        if (score > best_score) {
            best_score = score;
            best = j;
            if (bland) break;
        }
    }
    if (best < 0) return -1;
    const double r = rc[static_cast<std::size_t>(best)];
    return r < 0.0 ? best : -(best + 2);
}

BoundedSimplex::RatioOutcome BoundedSimplex::ratio_test(int entering, int direction,
                                                        bool phase1) const {
    const auto e = static_cast<std::size_t>(entering);
    double flip_step = kInf;
    if (lo_[e] > -kInf && up_[e] < kInf) flip_step = up_[e] - lo_[e];

    double best_step = kInf;
    double best_piv = 0.0;
    int best_row = -1;
    bool best_upper = false;
    for (int i = 0; i < m_; ++i) {
        const double d = t_at(i, entering);
        if (std::fabs(d) <= kPivTol) continue;
        const double rate = -direction * d;  // change of basic i per unit entering step
        const int col = basis_[static_cast<std::size_t>(i)];
        const double cur = xb_[static_cast<std::size_t>(i)];
        const double lo = lo_[static_cast<std::size_t>(col)];
        const double up = up_[static_cast<std::size_t>(col)];
        double step;
        bool to_upper;
        if (rate < 0.0) {  // basic value decreasing
            if (phase1 && up < kInf && cur > up + feas_eps(up)) {
                step = (cur - up) / (-rate);  // blocks when it re-enters range at up
                to_upper = true;
            } else if (lo > -kInf && cur >= lo - feas_eps(lo)) {
                step = (cur - lo) / (-rate);
                to_upper = false;
            } else {
                continue;  // below its lower bound and unblocked in this direction
            }
        } else {  // increasing
            if (phase1 && lo > -kInf && cur < lo - feas_eps(lo)) {
                step = (lo - cur) / rate;
                to_upper = false;
            } else if (up < kInf && cur <= up + feas_eps(up)) {
                step = (up - cur) / rate;
                to_upper = true;
            } else {
                continue;
            }
        }
        if (step < 0.0) step = 0.0;
        const double window = 1e-9 * (1.0 + std::min(step, best_step));
        const bool strictly_smaller = step < best_step - window;
        const bool tie_better_pivot = step <= best_step + window && std::fabs(d) > best_piv;
        if (strictly_smaller || tie_better_pivot) {
            best_step = step;
            best_piv = std::fabs(d);
            best_row = i;
            best_upper = to_upper;
        }
    }

    RatioOutcome out;
    if (flip_step <= best_step) {
        out.step = flip_step;
        out.flip = flip_step < kInf;
        return out;
    }
    out.step = best_step;
    out.leaving_pos = best_row;
    out.to_upper = best_upper;
    return out;
}

void BoundedSimplex::pivot(int leaving_pos, int entering) {
    const auto r = static_cast<std::size_t>(leaving_pos);
    double* prow = &tableau_[r * width_];
    const double piv = prow[entering];
    const double inv = 1.0 / piv;
    for (int c = 0; c < width_; ++c) prow[c] *= inv;
    prow[entering] = 1.0;
    for (int i = 0; i < m_; ++i) {
        if (i == leaving_pos) continue;
        double* row = &tableau_[static_cast<std::size_t>(i) * width_];
        const double f = row[entering];
        if (f == 0.0) continue;
        for (int c = 0; c < width_; ++c) row[c] -= f * prow[c];
        row[entering] = 0.0;
    }
    ++pivots_since_refactor_;
    ++total_pivots_;
}

void BoundedSimplex::apply_step(int entering, int direction, const RatioOutcome& out) {
    const auto e = static_cast<std::size_t>(entering);
    if (out.flip) {
        const double old_val = nonbasic_value(entering);
        vstate_[e] = vstate_[e] == VState::AtLo ? VState::AtUp : VState::AtLo;
        const double delta = nonbasic_value(entering) - old_val;
        for (int i = 0; i < m_; ++i) xb_[static_cast<std::size_t>(i)] -= t_at(i, entering) * delta;
        return;
    }
    const double entering_val = nonbasic_value(entering) + direction * out.step;
    const double delta = direction * out.step;
    for (int i = 0; i < m_; ++i) xb_[static_cast<std::size_t>(i)] -= t_at(i, entering) * delta;

    const int leaving_col = basis_[static_cast<std::size_t>(out.leaving_pos)];
    vstate_[static_cast<std::size_t>(leaving_col)] = out.to_upper ? VState::AtUp : VState::AtLo;
    if (out.to_upper && up_[static_cast<std::size_t>(leaving_col)] == kInf)
        vstate_[static_cast<std::size_t>(leaving_col)] = VState::AtZero;
    if (!out.to_upper && lo_[static_cast<std::size_t>(leaving_col)] == -kInf)
        vstate_[static_cast<std::size_t>(leaving_col)] = VState::AtZero;
    basis_pos_[static_cast<std::size_t>(leaving_col)] = -1;

    basis_[static_cast<std::size_t>(out.leaving_pos)] = entering;
    basis_pos_[e] = out.leaving_pos;
    vstate_[e] = VState::Basic;
    pivot(out.leaving_pos, entering);
    xb_[static_cast<std::size_t>(out.leaving_pos)] = entering_val;
}

Result BoundedSimplex::optimize() {
    Result res;
    recompute_basic_values();
    const int iter_cap = 20000 + 60 * (m_ + n_);
    int iters = 0;
    int degen_run = 0;
    bool bland = false;

    // Phase 1: drive basic bound violations to zero.
    double viol = 0.0;
    while (!infeasibility(viol)) {
        if (++iters > iter_cap) {
            res.status = Status::IterLimit;
            res.pivots = total_pivots_;
            return res;
        }
        if (pivots_since_refactor_ > 400) refactorize();
        const int enc = price_phase1(bland);
        if (enc == -1) {
            res.status = Status::Infeasible;
            res.pivots = total_pivots_;
            return res;
        }
        const int entering = enc >= 0 ? enc : -enc - 2;
        const int direction = enc >= 0 ? 1 : -1;
        const RatioOutcome out = ratio_test(entering, direction, true);
        if (out.step == kInf) {
            res.status = Status::IterLimit;  // numerically stuck
            res.pivots = total_pivots_;
            return res;
        }
        apply_step(entering, direction, out);
        double new_viol = 0.0;
        infeasibility(new_viol);
        if (new_viol >= viol - 1e-12) {
            if (++degen_run > 200) bland = true;
        } else {
            degen_run = 0;
            bland = false;
        }
    }

    // Phase 2: optimize the true objective.
    degen_run = 0;
    bland = false;
    while (true) {
        if (++iters > iter_cap) {
            res.status = Status::IterLimit;
            res.pivots = total_pivots_;
            return res;
        }
        if (pivots_since_refactor_ > 400) refactorize();
        const int enc = price_phase2(bland);
        if (enc == -1) break;
        const int entering = enc >= 0 ? enc : -enc - 2;
        const int direction = enc >= 0 ? 1 : -1;
        const RatioOutcome out = ratio_test(entering, direction, false);
        if (out.step == kInf) {
            res.status = Status::Unbounded;
            res.pivots = total_pivots_;
            return res;
        }
        apply_step(entering, direction, out);
        if (out.step <= kDegenStep) {
            if (++degen_run > 200) bland = true;
        } else {
            degen_run = 0;
            bland = false;
        }
        // A phase-2 step may push a basic past its bound only through
        // round-off; repair rarely and cheaply.
        if (pivots_since_refactor_ % 128 == 0) recompute_basic_values();
    }

    res.status = Status::Optimal;
    res.x.assign(static_cast<std::size_t>(n_), 0.0);
    double obj = 0.0;
    for (int j = 0; j < n_; ++j) {
        double v = vstate_[static_cast<std::size_t>(j)] == VState::Basic
                       ? xb_[static_cast<std::size_t>(basis_pos_[static_cast<std::size_t>(j)])]
                       : nonbasic_value(j);
        const double lo = lo_[static_cast<std::size_t>(j)];
        const double up = up_[static_cast<std::size_t>(j)];
        if (lo > -kInf && v < lo && v > lo - feas_eps(lo)) v = lo;
        if (up < kInf && v > up && v < up + feas_eps(up)) v = up;
        res.x[static_cast<std::size_t>(j)] = v;
        obj += cost_[static_cast<std::size_t>(j)] * v;
    }
    res.obj = obj;
    res.pivots = total_pivots_;
    return res;
}

Result solve(const Problem& problem) {
    BoundedSimplex simplex(problem);
    return simplex.optimize();
}

}  // namespace freqsec::lp
