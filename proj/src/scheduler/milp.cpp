#include "freqsec/scheduler/milp.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace freqsec::milp {

namespace {

using Clock = std::chrono::steady_clock;

struct Searcher {
    const Instance& inst;
    const Options& opts;
    lp::BoundedSimplex simplex;
    linalg::Vec best_x;
    double best_obj = std::numeric_limits<double>::infinity();
    bool have_incumbent = false;
    double min_open_bound = std::numeric_limits<double>::infinity();
    double root_bound = -std::numeric_limits<double>::infinity();
    bool have_root_bound = false;
    long nodes = 0;
    bool aborted = false;
    Status abort_status = Status::NodeLimit;
    Clock::time_point deadline;

    bool trace_nodes = std::getenv("FREQSEC_MILP_TRACE") != nullptr;

    Searcher(const Instance& instance, const Options& options)
        : inst(instance), opts(options), simplex(instance.lp) {
        deadline = Clock::now() + std::chrono::duration_cast<Clock::duration>(
                                      std::chrono::duration<double>(options.time_limit_s));
    }

    double gap_slack() const {
        return have_incumbent ? std::max(1e-9, opts.rel_gap * std::fabs(best_obj)) : 0.0;
    }

    // Fractional integer with the largest (fractionality x cost weight)
    // score; branching on expensive commitment counts first moves the dual
    // bound much faster than plain most-fractional selection.
    int fractional_var(const linalg::Vec& x) const {
        int best = -1;
        double best_score = 0.0;
        for (int j = 0; j < inst.lp.num_vars; ++j) {
            if (!inst.is_integer[static_cast<std::size_t>(j)]) continue;
            const double v = x[static_cast<std::size_t>(j)];
            const double frac = v - std::floor(v);
            const double dist = std::min(frac, 1.0 - frac);
            if (dist <= opts.int_tol) continue;
            const double weight = 1.0 + std::fabs(inst.lp.obj[static_cast<std::size_t>(j)]);
            const double score = dist * weight;
            if (score > best_score) {
                best_score = score;
                best = j;
            }
        }
        return best;
    }

    void consider_incumbent(const linalg::Vec& x, double obj) {
        if (obj >= best_obj) return;
        best_obj = obj;
        best_x = x;
        have_incumbent = true;
    }

    // Fix all integers to rounded-up relaxation values (within the current
    // node's bounds) and re-optimize the continuous part. Rounding
    // commitment counts up keeps coupled requirement rows satisfiable.
    void rounding_heuristic(const linalg::Vec& x) {
        std::vector<std::pair<double, double>> saved;
        saved.reserve(static_cast<std::size_t>(inst.lp.num_vars));
        for (int j = 0; j < inst.lp.num_vars; ++j) {
            saved.emplace_back(simplex.var_lo(j), simplex.var_up(j));
            if (!inst.is_integer[static_cast<std::size_t>(j)]) continue;
            double v = std::ceil(x[static_cast<std::size_t>(j)] - opts.int_tol);
            v = std::min(std::max(v, simplex.var_lo(j)), simplex.var_up(j));
            v = std::round(v);
            simplex.set_var_bounds(j, v, v);
        }
        const auto res = simplex.optimize();
        if (res.status == lp::Status::Optimal) consider_incumbent(res.x, res.obj);
        restore_bounds(saved);
    }

    void restore_bounds(const std::vector<std::pair<double, double>>& saved) {
        for (int j = 0; j < inst.lp.num_vars; ++j)
            simplex.set_var_bounds(j, saved[static_cast<std::size_t>(j)].first,
                                   saved[static_cast<std::size_t>(j)].second);
    }

    // Depth-first dive: repeatedly fix the most fractional integer to a
    // nearby value and re-solve, producing a strong incumbent cheaply.
    void dive_heuristic() {
        std::vector<std::pair<double, double>> saved;
        saved.reserve(static_cast<std::size_t>(inst.lp.num_vars));
        for (int j = 0; j < inst.lp.num_vars; ++j)
            saved.emplace_back(simplex.var_lo(j), simplex.var_up(j));
        for (int depth = 0; depth < 400; ++depth) {
            const auto res = simplex.optimize();
            if (res.status != lp::Status::Optimal) break;
            if (have_incumbent && res.obj >= best_obj - gap_slack()) break;
            const int j = fractional_var(res.x);
            if (j < 0) {
                consider_incumbent(res.x, res.obj);
                break;
            }
            const double v = res.x[static_cast<std::size_t>(j)];
            const double frac = v - std::floor(v);
            const double fixed = frac < 0.3 ? std::floor(v) : std::ceil(v);
            simplex.set_var_bounds(j, fixed, fixed);
        }
        restore_bounds(saved);
    }

    void dfs() {
        if (aborted) return;
        if (++nodes > opts.max_nodes) {
            aborted = true;
            abort_status = Status::NodeLimit;
            return;
        }
        if ((nodes & 7) == 0 && Clock::now() > deadline) {
            aborted = true;
            abort_status = Status::TimeLimit;
            return;
        }
        const auto res = simplex.optimize();
        if (res.status == lp::Status::Infeasible) return;
        if (res.status == lp::Status::Unbounded)
            throw std::runtime_error("milp: relaxation is unbounded");
        if (res.status == lp::Status::IterLimit)
            throw std::runtime_error("milp: simplex hit its iteration limit");
        if (!have_root_bound) {
            root_bound = res.obj;
            have_root_bound = true;
        }
        if (trace_nodes && nodes % 2000 == 0)
            std::fprintf(stderr, "[milp] nodes=%ld incumbent=%.1f pruned_min=%.1f lp=%.1f\n",
                         nodes, have_incumbent ? best_obj : -1.0, min_open_bound, res.obj);
        if (have_incumbent && res.obj >= best_obj - gap_slack()) {
            min_open_bound = std::min(min_open_bound, res.obj);
            return;
        }
        const int j = fractional_var(res.x);
        if (j < 0) {
            consider_incumbent(res.x, res.obj);
            return;
        }
        if (nodes == 1) dive_heuristic();
        const long cadence = have_incumbent ? 64 : 16;
        if (nodes % cadence == 0) rounding_heuristic(res.x);
        if (nodes % 2048 == 0) dive_heuristic();

        const double v = res.x[static_cast<std::size_t>(j)];
        const double fl = std::floor(v);
        const double old_lo = simplex.var_lo(j);
        const double old_up = simplex.var_up(j);
        const bool down_first = (v - fl) < 0.5;
        for (int side = 0; side < 2; ++side) {
            const bool down = (side == 0) == down_first;
            if (down)
                simplex.set_var_bounds(j, old_lo, fl);
            else
                simplex.set_var_bounds(j, fl + 1.0, old_up);
            dfs();
            simplex.set_var_bounds(j, old_lo, old_up);
            if (aborted) return;
        }
    }
};

}  // namespace

const char* status_name(Status s) {
    switch (s) {
        case Status::Optimal: return "optimal";
        case Status::GapFeasible: return "gap_feasible";
        case Status::Infeasible: return "infeasible";
        case Status::TimeLimit: return "time_limit";
        case Status::NodeLimit: return "node_limit";
    }
    return "unknown";
}

Result solve(const Instance& instance, const Options& options) {
    if (instance.is_integer.size() != static_cast<std::size_t>(instance.lp.num_vars))
        throw std::invalid_argument("milp: integrality mask length mismatch");
    Searcher s(instance, options);
    s.dfs();

    Result out;
    out.nodes = s.nodes;
    if (!s.have_incumbent) {
        out.status = s.aborted ? s.abort_status : Status::Infeasible;
        return out;
    }
    out.x = s.best_x;
    // Snap integers that are within tolerance of an integral value.
    for (int j = 0; j < instance.lp.num_vars; ++j) {
        if (!instance.is_integer[static_cast<std::size_t>(j)]) continue;
        double& v = out.x[static_cast<std::size_t>(j)];
        const double r = std::round(v);
        if (std::fabs(v - r) <= 1e-5) v = r;
    }
    out.obj = s.best_obj;
    double bound = std::min(s.min_open_bound, s.best_obj);
    if (s.aborted) bound = std::min(bound, s.have_root_bound ? s.root_bound : bound);
    out.bound = bound;
    out.gap = std::fabs(s.best_obj) > 1e-12 ? (s.best_obj - bound) / std::fabs(s.best_obj) : 0.0;
    if (out.gap < 0.0) out.gap = 0.0;
    if (s.aborted)
        out.status = s.abort_status;
    else
        out.status = out.gap <= 1e-9 ? Status::Optimal : Status::GapFeasible;
    return out;
}

bool check_solution(const lp::Problem& problem, const linalg::Vec& x, double tol,
                    std::string* why) {
    auto explain = [&](const std::string& msg) {
        if (why) *why = msg;
        return false;
    };
    if (x.size() != static_cast<std::size_t>(problem.num_vars))
        return explain("solution length mismatch");
    for (int j = 0; j < problem.num_vars; ++j) {
        const double v = x[static_cast<std::size_t>(j)];
        const double scale = 1.0 + std::fabs(v);
        if (problem.lo[static_cast<std::size_t>(j)] > -lp::kInf &&
            v < problem.lo[static_cast<std::size_t>(j)] - tol * scale)
            return explain("variable " + std::to_string(j) + " below lower bound");
        if (problem.up[static_cast<std::size_t>(j)] < lp::kInf &&
            v > problem.up[static_cast<std::size_t>(j)] + tol * scale)
            return explain("variable " + std::to_string(j) + " above upper bound");
    }
    for (std::size_t i = 0; i < problem.rows.size(); ++i) {
        const auto& row = problem.rows[i];
        double a = 0.0;
        double scale = 1.0;
        for (const auto& [j, c] : row.coeffs) {
            a += c * x[static_cast<std::size_t>(j)];
            scale = std::max(scale, std::fabs(c * x[static_cast<std::size_t>(j)]));
        }
        if (row.lo > -lp::kInf && a < row.lo - tol * scale)
            return explain("row " + std::to_string(i) + " below its lower bound");
        if (row.up < lp::kInf && a > row.up + tol * scale)
            return explain("row " + std::to_string(i) + " above its upper bound");
    }
    return true;
}

}  // namespace freqsec::milp
