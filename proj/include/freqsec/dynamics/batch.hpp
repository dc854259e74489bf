#pragma once

// Batched trace-statistics evaluation over independent operating points.
//
// Boundary sweeps and security audits run thousands of independent
// simulations whose per-step arithmetic is identical, so the kernel exists
// in two equivalence-tested variants: a scalar reference (the exact code
// path behind simulate/analyze) and a 4-lane AVX2 version selected at
// runtime on x86-64. Results are deterministic for a fixed backend.

#include <span>
#include <string>
#include <vector>

#include "freqsec/dynamics/types.hpp"

namespace freqsec::dynamics {

enum class Backend { Auto, Scalar, Avx2 };

struct LaneResult {
    TraceStats stats;
    bool ok = false;
    std::string error;
};

// True when the AVX2 kernel was compiled in and the CPU supports it.
bool avx2_available();

// Resolves Auto to the best available backend. The FREQSEC_BACKEND
// environment variable ("scalar" or "avx2") overrides Auto.
Backend resolve_backend(Backend requested);

const char* backend_name(Backend resolved);

// Simulates every point with the shared params and returns the streamed
// trace statistics per point. Failed lanes carry ok = false and a message.
std::vector<LaneResult> simulate_stats(std::span<const OperatingPoint> points,
                                       const SimParams& params, Backend backend = Backend::Auto);

// Single-point convenience wrapper.
LaneResult simulate_stats_one(const OperatingPoint& point, const SimParams& params,
                              Backend backend = Backend::Auto);

}  // namespace freqsec::dynamics
