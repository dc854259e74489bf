#include "freqsec/dynamics/batch.hpp"

#include <cstdlib>
#include <cstring>

#include "freqsec/dynamics/swing_model.hpp"

namespace freqsec::dynamics {

namespace detail {
// Implemented in batch_avx2.cpp when the toolchain can target AVX2.
bool avx2_kernel_compiled();
void simulate_stats_avx2_quad(const OperatingPoint* points, const SimParams& params,
                              LaneResult* out);
}  // namespace detail

bool avx2_available() {
#if defined(__x86_64__)
    if (!detail::avx2_kernel_compiled()) return false;
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

Backend resolve_backend(Backend requested) {
    if (requested == Backend::Scalar) return Backend::Scalar;
    if (requested == Backend::Avx2) {
        if (!avx2_available())
            throw std::runtime_error("AVX2 backend requested but not available on this host");
        return Backend::Avx2;
    }
    if (const char* env = std::getenv("FREQSEC_BACKEND")) {
        if (std::strcmp(env, "scalar") == 0) return Backend::Scalar;
        if (std::strcmp(env, "avx2") == 0) return resolve_backend(Backend::Avx2);
    }
    return avx2_available() ? Backend::Avx2 : Backend::Scalar;
}

const char* backend_name(Backend resolved) {
    switch (resolved) {
        case Backend::Scalar: return "scalar";
        case Backend::Avx2: return "avx2";
        default: return "auto";
    }
}

namespace {

LaneResult run_scalar(const OperatingPoint& point, const SimParams& params) {
    LaneResult lane;
    try {
        StatsAccumulator acc(point, params.dt);
        integrate_swing(point, params, [&](std::size_t k, double, const SwingState& y, double) {
            acc.add(k, y.df1, y.df2);
        });
        lane.stats = acc.finalize();
        lane.ok = true;
    } catch (const std::exception& e) {
        lane.ok = false;
        lane.error = e.what();
    }
    return lane;
}

}  // namespace

std::vector<LaneResult> simulate_stats(std::span<const OperatingPoint> points,
                                       const SimParams& params, Backend backend) {
    const Backend resolved = resolve_backend(backend);
    std::vector<LaneResult> out(points.size());
    std::size_t i = 0;
    if (resolved == Backend::Avx2) {
        for (; i + 4 <= points.size(); i += 4)
            detail::simulate_stats_avx2_quad(points.data() + i, params, out.data() + i);
    }
    for (; i < points.size(); ++i) out[i] = run_scalar(points[i], params);
    return out;
}

LaneResult simulate_stats_one(const OperatingPoint& point, const SimParams& params,
                              Backend backend) {
    // A single lane never fills an AVX2 group; keep it on the reference path.
    (void)backend;
    return run_scalar(point, params);
}

}  // namespace freqsec::dynamics
