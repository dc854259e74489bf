#pragma once

// Two-region swing model with one transmission corridor.
//
// Per region i:   (2 h_i / f0) * ddf_i/dt = -loss_i + pfr_i - d_i pd_i df_i -/+ p_tie
// Corridor:       p_tie = (v1 v2 / x12) sin(delta12),  ddelta12/dt = 2 pi (df1 - df2)
//
// The generation loss is applied at t = 0 in the faulted region. PFR ramps
// linearly to full delivery at t_del and the total injection saturates at the
// lost power, so the system settles instead of drifting above nominal once
// response exceeds the loss.

#include <algorithm>
#include <cmath>

#include "freqsec/dynamics/types.hpp"

namespace freqsec::dynamics {

struct SwingState {
    double df1 = 0.0;      // Hz
    double df2 = 0.0;      // Hz
    double delta12 = 0.0;  // rad
};

// Precomputed per-point constants of the ODE right-hand side.
struct SwingConstants {
    double s1;        // f0 / (2 h1), Hz/s per MW
    double s2;        // f0 / (2 h2)
    double dpd1;      // d1 * pd1, MW/Hz
    double dpd2;      // d2 * pd2, MW/Hz
    double loss1;     // MW applied in region 1
    double loss2;     // MW applied in region 2
    double r1;        // MW
    double r2;        // MW
    double p_loss;    // MW
    double tie_k;     // MW
    double inv_t_del; // 1/s

    static SwingConstants from(const OperatingPoint& p, const SimParams& params) {
        SwingConstants c{};
        c.s1 = p.f0 / (2.0 * p.h1);
        c.s2 = p.f0 / (2.0 * p.h2);
        c.dpd1 = p.d1 * p.pd1;
        c.dpd2 = p.d2 * p.pd2;
        c.loss1 = p.faulted_region == 1 ? p.p_loss : 0.0;
        c.loss2 = p.faulted_region == 2 ? p.p_loss : 0.0;
        c.r1 = p.r1;
        c.r2 = p.r2;
        c.p_loss = p.p_loss;
        c.tie_k = p.tie_coefficient_mw();
        c.inv_t_del = 1.0 / params.t_del;
        return c;
    }
};

inline SwingState swing_rhs(const SwingConstants& c, double t, const SwingState& y) {
    const double ramp = std::min(t * c.inv_t_del, 1.0);
    double pfr1 = c.r1 * ramp;
    double pfr2 = c.r2 * ramp;
    const double total = pfr1 + pfr2;
    if (total > c.p_loss) {
        const double scale = c.p_loss / total;
        pfr1 *= scale;
        pfr2 *= scale;
    }
    const double tie = c.tie_k * std::sin(y.delta12);
    SwingState d;
    d.df1 = c.s1 * (-c.loss1 + pfr1 - c.dpd1 * y.df1 - tie);
    d.df2 = c.s2 * (-c.loss2 + pfr2 - c.dpd2 * y.df2 + tie);
    constexpr double two_pi = 6.283185307179586476925286766559;
    d.delta12 = two_pi * (y.df1 - y.df2);
    return d;
}

// Classic fixed-step RK4. `sink(step, t, state, tie_flow)` is invoked for
// every stored grid point including step 0. Throws SimulationError on the
// first non-finite state.
template <class Sink>
void integrate_swing(const OperatingPoint& point, const SimParams& params, Sink&& sink) {
    point.validate();
    params.validate();
    const SwingConstants c = SwingConstants::from(point, params);
    const double dt = params.dt;
    const std::size_t n = params.step_count();

    SwingState y{};
    sink(std::size_t{0}, 0.0, y, c.tie_k * std::sin(y.delta12));

    for (std::size_t k = 0; k < n; ++k) {
        const double t = static_cast<double>(k) * dt;
        const SwingState k1 = swing_rhs(c, t, y);
        SwingState y2{y.df1 + 0.5 * dt * k1.df1, y.df2 + 0.5 * dt * k1.df2,
                      y.delta12 + 0.5 * dt * k1.delta12};
        const SwingState k2 = swing_rhs(c, t + 0.5 * dt, y2);
        SwingState y3{y.df1 + 0.5 * dt * k2.df1, y.df2 + 0.5 * dt * k2.df2,
                      y.delta12 + 0.5 * dt * k2.delta12};
        const SwingState k3 = swing_rhs(c, t + 0.5 * dt, y3);
        SwingState y4{y.df1 + dt * k3.df1, y.df2 + dt * k3.df2, y.delta12 + dt * k3.delta12};
        const SwingState k4 = swing_rhs(c, t + dt, y4);

        y.df1 += dt / 6.0 * (k1.df1 + 2.0 * k2.df1 + 2.0 * k3.df1 + k4.df1);
        y.df2 += dt / 6.0 * (k1.df2 + 2.0 * k2.df2 + 2.0 * k3.df2 + k4.df2);
        y.delta12 += dt / 6.0 * (k1.delta12 + 2.0 * k2.delta12 + 2.0 * k3.delta12 + k4.delta12);

        if (!std::isfinite(y.df1) || !std::isfinite(y.df2) || !std::isfinite(y.delta12)) {
            throw SimulationError("simulation diverged: non-finite state at step " +
                                  std::to_string(k + 1) + " (t = " +
                                  std::to_string((static_cast<double>(k) + 1.0) * dt) + " s)");
        }
        sink(k + 1, (static_cast<double>(k) + 1.0) * dt, y, c.tie_k * std::sin(y.delta12));
    }
}

// Streaming computation of TraceStats. Feeding it the rows of a stored trace
// reproduces exactly what the streaming simulation paths compute, so stored
// and stream-analyzed statistics are identical by construction.
//
// Definitions: max RoCoF is the largest |forward difference| / dt on the
// grid; the nadir is the magnitude of the most negative deviation (first
// occurrence on ties); the integrals run up to the faulted region's nadir
// time using composite trapezoids.
class StatsAccumulator {
public:
    StatsAccumulator(const OperatingPoint& point, double dt)
        : dt_(dt),
          faulted_is_1_(point.faulted_region == 1),
          coi_w1_(point.h1 / (point.h1 + point.h2)),
          coi_w2_(point.h2 / (point.h1 + point.h2)),
          coi_term_(point.p_loss * point.f0 / (2.0 * (point.h1 + point.h2))) {}

    void add(std::size_t step, double df1, double df2) {
        if (step == 0) {
            min1_ = df1;
            min2_ = df2;
            prev1_ = df1;
            prev2_ = df2;
            return;
        }
        const double inv_dt = 1.0 / dt_;
        const double r1 = std::fabs(df1 - prev1_) * inv_dt;
        const double r2 = std::fabs(df2 - prev2_) * inv_dt;
        if (r1 > max_rocof_1_) max_rocof_1_ = r1;
        if (r2 > max_rocof_2_) max_rocof_2_ = r2;
        if (step == 1) {
            const double coi_prev = coi_w1_ * prev1_ + coi_w2_ * prev2_;
            const double coi_cur = coi_w1_ * df1 + coi_w2_ * df2;
            coi_rocof_0_ = (coi_cur - coi_prev) * inv_dt;
        }

        int_self_1_ += 0.5 * dt_ * (prev1_ + df1);
        int_self_2_ += 0.5 * dt_ * (prev2_ + df2);
        const double g_new = g_ + 0.5 * dt_ * ((prev1_ - prev2_) + (df1 - df2));
        int_doublediff_ += 0.5 * dt_ * (g_ + g_new);
        g_ = g_new;

        if (df1 < min1_) {
            min1_ = df1;
            argmin1_ = step;
            if (faulted_is_1_) snapshot_integrals();
        }
        if (df2 < min2_) {
            min2_ = df2;
            argmin2_ = step;
            if (!faulted_is_1_) snapshot_integrals();
        }
        prev1_ = df1;
        prev2_ = df2;
        ++count_;
    }

    TraceStats finalize() const {
        if (count_ == 0)
            throw std::invalid_argument("analyze: trace must have at least 2 samples");
        TraceStats s;
        s.max_rocof_1 = max_rocof_1_;
        s.max_rocof_2 = max_rocof_2_;
        s.nadir_1 = -min1_;
        s.nadir_2 = -min2_;
        s.t_nadir_1 = static_cast<double>(argmin1_) * dt_;
        s.t_nadir_2 = static_cast<double>(argmin2_) * dt_;
        s.coi_rocof_0 = coi_rocof_0_;
        s.osc_label_1 = max_rocof_1_ - coi_term_;
        s.osc_label_2 = max_rocof_2_ - coi_term_;
        s.integral_diff = snap_doublediff_;
        s.integral_self_1 = snap_self_1_;
        s.integral_self_2 = snap_self_2_;
        return s;
    }

private:
    void snapshot_integrals() {
        snap_self_1_ = int_self_1_;
        snap_self_2_ = int_self_2_;
        snap_doublediff_ = int_doublediff_;
    }

    double dt_;
    bool faulted_is_1_;
    double coi_w1_, coi_w2_;
    double coi_term_;

    double prev1_ = 0.0, prev2_ = 0.0;
    double max_rocof_1_ = 0.0, max_rocof_2_ = 0.0;
    double coi_rocof_0_ = 0.0;
    double min1_ = 0.0, min2_ = 0.0;
    std::size_t argmin1_ = 0, argmin2_ = 0;
    double int_self_1_ = 0.0, int_self_2_ = 0.0;
    double g_ = 0.0, int_doublediff_ = 0.0;
    double snap_self_1_ = 0.0, snap_self_2_ = 0.0, snap_doublediff_ = 0.0;
    std::size_t count_ = 0;
};

}  // namespace freqsec::dynamics
