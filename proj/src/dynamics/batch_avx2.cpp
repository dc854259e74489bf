// 4-lane AVX2 variant of the streamed swing-model statistics kernel.
// Compiled with -mavx2 -mfma when the toolchain allows; batch.cpp dispatches
// to it only after a runtime CPU check. Lane arithmetic is independent, so
// results do not depend on how points are grouped into quads.

#include "freqsec/dynamics/batch.hpp"
#include "freqsec/dynamics/swing_model.hpp"

#if defined(__x86_64__) && defined(FREQSEC_AVX2_BUILD)

#include <immintrin.h>

#include <cfloat>
#include <cstddef>
#include <string>

namespace freqsec::dynamics::detail {

namespace {

inline __m256d abs_pd(__m256d x) {
    return _mm256_andnot_pd(_mm256_set1_pd(-0.0), x);
}

// sin(x) for |x| up to ~1e6: quadrant reduction against pi/2 held in two
// parts, then the usual minimax polynomials on [-pi/4, pi/4].
inline __m256d sin_pd(__m256d x) {
    const __m256d two_over_pi = _mm256_set1_pd(0.63661977236758134308);
    const __m256d pio2_1 = _mm256_set1_pd(1.57079632673412561417e+00);
    const __m256d pio2_1t = _mm256_set1_pd(6.07710050650619224932e-11);

    const __m256d q = _mm256_round_pd(_mm256_mul_pd(x, two_over_pi),
                                      _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
    __m256d r = _mm256_fnmadd_pd(q, pio2_1, x);
    r = _mm256_fnmadd_pd(q, pio2_1t, r);
    const __m128i n = _mm256_cvtpd_epi32(q);

    const __m256d z = _mm256_mul_pd(r, r);

    __m256d sp = _mm256_set1_pd(1.58962301576546568060e-10);
    sp = _mm256_fmadd_pd(sp, z, _mm256_set1_pd(-2.50507477628578072866e-8));
    sp = _mm256_fmadd_pd(sp, z, _mm256_set1_pd(2.75573136213857245213e-6));
    sp = _mm256_fmadd_pd(sp, z, _mm256_set1_pd(-1.98412698295895385996e-4));
    sp = _mm256_fmadd_pd(sp, z, _mm256_set1_pd(8.33333333332211858878e-3));
    sp = _mm256_fmadd_pd(sp, z, _mm256_set1_pd(-1.66666666666666307295e-1));
    const __m256d sinr = _mm256_fmadd_pd(_mm256_mul_pd(r, z), sp, r);

    __m256d cp = _mm256_set1_pd(-1.13585365213876817300e-11);
    cp = _mm256_fmadd_pd(cp, z, _mm256_set1_pd(2.08757008419747316778e-9));
    cp = _mm256_fmadd_pd(cp, z, _mm256_set1_pd(-2.75573141792967388112e-7));
    cp = _mm256_fmadd_pd(cp, z, _mm256_set1_pd(2.48015872888517179954e-5));
    cp = _mm256_fmadd_pd(cp, z, _mm256_set1_pd(-1.38888888888730564116e-3));
    cp = _mm256_fmadd_pd(cp, z, _mm256_set1_pd(4.16666666666665929218e-2));
    __m256d cosr = _mm256_fmadd_pd(_mm256_set1_pd(-0.5), z, _mm256_set1_pd(1.0));
    cosr = _mm256_fmadd_pd(_mm256_mul_pd(z, z), cp, cosr);

    const __m128i one = _mm_set1_epi32(1);
    const __m128i two = _mm_set1_epi32(2);
    const __m256d use_cos = _mm256_castsi256_pd(
        _mm256_cvtepi32_epi64(_mm_cmpeq_epi32(_mm_and_si128(n, one), one)));
    const __m256d negate = _mm256_castsi256_pd(
        _mm256_cvtepi32_epi64(_mm_cmpeq_epi32(_mm_and_si128(n, two), two)));

    __m256d result = _mm256_blendv_pd(sinr, cosr, use_cos);
    result = _mm256_xor_pd(result, _mm256_and_pd(negate, _mm256_set1_pd(-0.0)));
    return result;
}

struct QuadConsts {
    __m256d s1, s2, dpd1, dpd2, loss1, loss2, r1, r2, p_loss, tie_k;
    __m256d coi_w1, coi_w2;
    __m256d faulted_is_1;  // all-ones mask per lane
    double inv_t_del;
};

inline QuadConsts load_consts(const OperatingPoint* p, const SimParams& params) {
    auto gather = [&](auto&& f) {
        return _mm256_set_pd(f(p[3]), f(p[2]), f(p[1]), f(p[0]));
    };
    QuadConsts c;
    c.s1 = gather([](const OperatingPoint& q) { return q.f0 / (2.0 * q.h1); });
    c.s2 = gather([](const OperatingPoint& q) { return q.f0 / (2.0 * q.h2); });
    c.dpd1 = gather([](const OperatingPoint& q) { return q.d1 * q.pd1; });
    c.dpd2 = gather([](const OperatingPoint& q) { return q.d2 * q.pd2; });
    c.loss1 = gather([](const OperatingPoint& q) { return q.faulted_region == 1 ? q.p_loss : 0.0; });
    c.loss2 = gather([](const OperatingPoint& q) { return q.faulted_region == 2 ? q.p_loss : 0.0; });
    c.r1 = gather([](const OperatingPoint& q) { return q.r1; });
    c.r2 = gather([](const OperatingPoint& q) { return q.r2; });
    c.p_loss = gather([](const OperatingPoint& q) { return q.p_loss; });
    c.tie_k = gather([](const OperatingPoint& q) { return q.tie_coefficient_mw(); });
    c.coi_w1 = gather([](const OperatingPoint& q) { return q.h1 / (q.h1 + q.h2); });
    c.coi_w2 = gather([](const OperatingPoint& q) { return q.h2 / (q.h1 + q.h2); });
    c.faulted_is_1 = _mm256_cmp_pd(
        gather([](const OperatingPoint& q) { return q.faulted_region == 1 ? 1.0 : 0.0; }),
        _mm256_set1_pd(0.5), _CMP_GT_OQ);
    c.inv_t_del = 1.0 / params.t_del;
    return c;
}

inline void rhs(const QuadConsts& c, double ramp, __m256d df1, __m256d df2, __m256d delta,
                __m256d& ddf1, __m256d& ddf2, __m256d& ddelta) {
    const __m256d rampv = _mm256_set1_pd(ramp);
    __m256d pfr1 = _mm256_mul_pd(c.r1, rampv);
    __m256d pfr2 = _mm256_mul_pd(c.r2, rampv);
    const __m256d total = _mm256_add_pd(pfr1, pfr2);
    const __m256d cap = _mm256_cmp_pd(total, c.p_loss, _CMP_GT_OQ);
    const __m256d scale = _mm256_div_pd(c.p_loss, total);
    pfr1 = _mm256_blendv_pd(pfr1, _mm256_mul_pd(pfr1, scale), cap);
    pfr2 = _mm256_blendv_pd(pfr2, _mm256_mul_pd(pfr2, scale), cap);

    const __m256d tie = _mm256_mul_pd(c.tie_k, sin_pd(delta));

    __m256d acc1 = _mm256_sub_pd(pfr1, c.loss1);
    acc1 = _mm256_fnmadd_pd(c.dpd1, df1, acc1);
    acc1 = _mm256_sub_pd(acc1, tie);
    ddf1 = _mm256_mul_pd(c.s1, acc1);

    __m256d acc2 = _mm256_sub_pd(pfr2, c.loss2);
    acc2 = _mm256_fnmadd_pd(c.dpd2, df2, acc2);
    acc2 = _mm256_add_pd(acc2, tie);
    ddf2 = _mm256_mul_pd(c.s2, acc2);

    const __m256d two_pi = _mm256_set1_pd(6.283185307179586476925286766559);
    ddelta = _mm256_mul_pd(two_pi, _mm256_sub_pd(df1, df2));
}

inline double lane(__m256d v, int j) {
    alignas(32) double tmp[4];
    _mm256_store_pd(tmp, v);
    return tmp[j];
}

}  // namespace

bool avx2_kernel_compiled() { return true; }

void simulate_stats_avx2_quad(const OperatingPoint* points, const SimParams& params,
                              LaneResult* out) {
    for (int j = 0; j < 4; ++j) points[j].validate();
    params.validate();
    const QuadConsts c = load_consts(points, params);
    const double dt = params.dt;
    const std::size_t n = params.step_count();
    const __m256d dtv = _mm256_set1_pd(dt);
    const __m256d half_dt = _mm256_set1_pd(0.5 * dt);
    const __m256d sixth_dt = _mm256_set1_pd(dt / 6.0);
    const __m256d two = _mm256_set1_pd(2.0);
    const __m256d inv_dt = _mm256_set1_pd(1.0 / dt);
    const __m256d huge = _mm256_set1_pd(DBL_MAX);

    __m256d df1 = _mm256_setzero_pd();
    __m256d df2 = _mm256_setzero_pd();
    __m256d delta = _mm256_setzero_pd();

    // Streaming statistics state, mirroring StatsAccumulator.
    __m256d prev1 = df1, prev2 = df2;
    __m256d max_r1 = _mm256_setzero_pd(), max_r2 = _mm256_setzero_pd();
    __m256d coi0 = _mm256_setzero_pd();
    __m256d min1 = _mm256_setzero_pd(), min2 = _mm256_setzero_pd();
    __m256d argmin1 = _mm256_setzero_pd(), argmin2 = _mm256_setzero_pd();
    __m256d iself1 = _mm256_setzero_pd(), iself2 = _mm256_setzero_pd();
    __m256d g = _mm256_setzero_pd(), idd = _mm256_setzero_pd();
    __m256d snap1 = _mm256_setzero_pd(), snap2 = _mm256_setzero_pd(),
            snapd = _mm256_setzero_pd();
    __m256d ok = _mm256_cmp_pd(_mm256_setzero_pd(), _mm256_setzero_pd(), _CMP_EQ_OQ);
    __m256d first_bad = _mm256_set1_pd(-1.0);

    for (std::size_t k = 0; k < n; ++k) {
        const double t = static_cast<double>(k) * dt;
        auto ramp_at = [&](double tt) { return tt * c.inv_t_del < 1.0 ? tt * c.inv_t_del : 1.0; };

        __m256d k1a, k1b, k1c, k2a, k2b, k2c, k3a, k3b, k3c, k4a, k4b, k4c;
        rhs(c, ramp_at(t), df1, df2, delta, k1a, k1b, k1c);
        rhs(c, ramp_at(t + 0.5 * dt), _mm256_fmadd_pd(half_dt, k1a, df1),
            _mm256_fmadd_pd(half_dt, k1b, df2), _mm256_fmadd_pd(half_dt, k1c, delta), k2a, k2b,
            k2c);
        rhs(c, ramp_at(t + 0.5 * dt), _mm256_fmadd_pd(half_dt, k2a, df1),
            _mm256_fmadd_pd(half_dt, k2b, df2), _mm256_fmadd_pd(half_dt, k2c, delta), k3a, k3b,
            k3c);
        rhs(c, ramp_at(t + dt), _mm256_fmadd_pd(dtv, k3a, df1), _mm256_fmadd_pd(dtv, k3b, df2),
            _mm256_fmadd_pd(dtv, k3c, delta), k4a, k4b, k4c);

        auto rk_sum = [&](__m256d a, __m256d b, __m256d cc, __m256d d) {
            __m256d s = _mm256_add_pd(a, d);
            s = _mm256_fmadd_pd(two, _mm256_add_pd(b, cc), s);
            return s;
        };
        df1 = _mm256_fmadd_pd(sixth_dt, rk_sum(k1a, k2a, k3a, k4a), df1);
        df2 = _mm256_fmadd_pd(sixth_dt, rk_sum(k1b, k2b, k3b, k4b), df2);
        delta = _mm256_fmadd_pd(sixth_dt, rk_sum(k1c, k2c, k3c, k4c), delta);

        const std::size_t kk = k + 1;
        const __m256d kkv = _mm256_set1_pd(static_cast<double>(kk));

        __m256d fin = _mm256_and_pd(_mm256_cmp_pd(df1, df1, _CMP_ORD_Q),
                                    _mm256_cmp_pd(df2, df2, _CMP_ORD_Q));
        fin = _mm256_and_pd(fin, _mm256_cmp_pd(delta, delta, _CMP_ORD_Q));
        fin = _mm256_and_pd(fin, _mm256_cmp_pd(abs_pd(df1), huge, _CMP_LE_OQ));
        fin = _mm256_and_pd(fin, _mm256_cmp_pd(abs_pd(df2), huge, _CMP_LE_OQ));
        fin = _mm256_and_pd(fin, _mm256_cmp_pd(abs_pd(delta), huge, _CMP_LE_OQ));
        const __m256d newly_bad = _mm256_andnot_pd(fin, ok);
        first_bad = _mm256_blendv_pd(first_bad, kkv, newly_bad);
        ok = _mm256_and_pd(ok, fin);

        const __m256d rr1 = _mm256_mul_pd(abs_pd(_mm256_sub_pd(df1, prev1)), inv_dt);
        const __m256d rr2 = _mm256_mul_pd(abs_pd(_mm256_sub_pd(df2, prev2)), inv_dt);
        max_r1 = _mm256_max_pd(max_r1, rr1);
        max_r2 = _mm256_max_pd(max_r2, rr2);
        if (kk == 1) {
            const __m256d coi_prev = _mm256_fmadd_pd(c.coi_w1, prev1, _mm256_mul_pd(c.coi_w2, prev2));
            const __m256d coi_cur = _mm256_fmadd_pd(c.coi_w1, df1, _mm256_mul_pd(c.coi_w2, df2));
            coi0 = _mm256_mul_pd(_mm256_sub_pd(coi_cur, coi_prev), inv_dt);
        }

        iself1 = _mm256_fmadd_pd(half_dt, _mm256_add_pd(prev1, df1), iself1);
        iself2 = _mm256_fmadd_pd(half_dt, _mm256_add_pd(prev2, df2), iself2);
        const __m256d diff_sum =
            _mm256_add_pd(_mm256_sub_pd(prev1, prev2), _mm256_sub_pd(df1, df2));
        const __m256d g_new = _mm256_fmadd_pd(half_dt, diff_sum, g);
        idd = _mm256_fmadd_pd(half_dt, _mm256_add_pd(g, g_new), idd);
        g = g_new;

        const __m256d m1 = _mm256_cmp_pd(df1, min1, _CMP_LT_OQ);
        min1 = _mm256_blendv_pd(min1, df1, m1);
        argmin1 = _mm256_blendv_pd(argmin1, kkv, m1);
        const __m256d m2 = _mm256_cmp_pd(df2, min2, _CMP_LT_OQ);
        min2 = _mm256_blendv_pd(min2, df2, m2);
        argmin2 = _mm256_blendv_pd(argmin2, kkv, m2);

        const __m256d snap_mask = _mm256_or_pd(_mm256_and_pd(c.faulted_is_1, m1),
                                               _mm256_andnot_pd(c.faulted_is_1, m2));
        snap1 = _mm256_blendv_pd(snap1, iself1, snap_mask);
        snap2 = _mm256_blendv_pd(snap2, iself2, snap_mask);
        snapd = _mm256_blendv_pd(snapd, idd, snap_mask);

        prev1 = df1;
        prev2 = df2;
    }

    for (int j = 0; j < 4; ++j) {
        LaneResult& res = out[j];
        // Mask lanes hold either the all-ones pattern (unordered vs 0.0,
        // so != compares true) or +0.0.
        const bool lane_ok = lane(ok, j) != 0.0;
        if (!lane_ok) {
            res.ok = false;
            const auto bad = static_cast<std::size_t>(lane(first_bad, j));
            res.error = "simulation diverged: non-finite state at step " + std::to_string(bad) +
                        " (t = " + std::to_string(static_cast<double>(bad) * dt) + " s)";
            continue;
        }
        const OperatingPoint& p = points[j];
        const double coi_term = p.p_loss * p.f0 / (2.0 * (p.h1 + p.h2));
        TraceStats s;
        s.max_rocof_1 = lane(max_r1, j);
        s.max_rocof_2 = lane(max_r2, j);
        s.nadir_1 = -lane(min1, j);
        s.nadir_2 = -lane(min2, j);
        s.t_nadir_1 = lane(argmin1, j) * dt;
        s.t_nadir_2 = lane(argmin2, j) * dt;
        s.coi_rocof_0 = lane(coi0, j);
        s.osc_label_1 = s.max_rocof_1 - coi_term;
        s.osc_label_2 = s.max_rocof_2 - coi_term;
        s.integral_self_1 = lane(snap1, j);
        s.integral_self_2 = lane(snap2, j);
        s.integral_diff = lane(snapd, j);
        res.stats = s;
        res.ok = true;
        res.error.clear();
    }
}

}  // namespace freqsec::dynamics::detail

#else  // no AVX2 toolchain support

namespace freqsec::dynamics::detail {

bool avx2_kernel_compiled() { return false; }

void simulate_stats_avx2_quad(const OperatingPoint*, const SimParams&, LaneResult*) {
    throw std::runtime_error("AVX2 kernel not compiled into this build");
}

}  // namespace freqsec::dynamics::detail

#endif
