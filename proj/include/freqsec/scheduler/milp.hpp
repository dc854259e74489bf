#pragma once

// Branch-and-bound over the bounded simplex. One tableau evolves through the
// whole search: entering a node tightens a single variable bound, leaving it
// restores the bound, and each re-optimization warm-starts from the current
// basis.

#include <vector>

#include "freqsec/scheduler/lp.hpp"

namespace freqsec::milp {

struct Options {
    double rel_gap = 1e-3;  // accepted relative optimality gap
    double int_tol = 1e-6;
    long max_nodes = 200000;
    double time_limit_s = 120.0;
};

enum class Status { Optimal, GapFeasible, Infeasible, TimeLimit, NodeLimit };

const char* status_name(Status s);

struct Result {
    Status status = Status::Infeasible;
    linalg::Vec x;
    double obj = 0.0;
    double bound = 0.0;  // proven lower bound on the optimum
    double gap = 0.0;
    long nodes = 0;
};

struct Instance {
    lp::Problem lp;
    std::vector<bool> is_integer;
};

Result solve(const Instance& instance, const Options& options = {});

// Independent feasibility check of a candidate solution against the raw
// problem data (used by tests and the schedule auditor).
bool check_solution(const lp::Problem& problem, const linalg::Vec& x, double tol,
                    std::string* why = nullptr);

}  // namespace freqsec::milp
