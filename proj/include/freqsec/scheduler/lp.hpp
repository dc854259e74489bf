#pragma once

// Dense bounded-variable simplex. Built for the desk-scale scheduling MILPs
// in this project: a few hundred rows, full-tableau pivoting, and cheap
// re-optimization after bound changes so branch-and-bound can keep one
// evolving tableau instead of solving every node from scratch.

#include <limits>
#include <string>
#include <vector>

#include "freqsec/util/linalg.hpp"

namespace freqsec::lp {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Row {
    std::vector<std::pair<int, double>> coeffs;
    double lo = -kInf;
    double up = kInf;
};

struct Problem {
    int num_vars = 0;
    linalg::Vec obj;
    linalg::Vec lo, up;
    std::vector<Row> rows;

    int add_var(double lo_v, double up_v, double cost) {
        obj.push_back(cost);
        lo.push_back(lo_v);
        up.push_back(up_v);
        return num_vars++;
    }
    void add_row(double lo_v, std::vector<std::pair<int, double>> coeffs, double up_v) {
        rows.push_back(Row{std::move(coeffs), lo_v, up_v});
    }
};

enum class Status { Optimal, Infeasible, Unbounded, IterLimit };

struct Result {
    Status status = Status::IterLimit;
    linalg::Vec x;  // structural variable values
    double obj = 0.0;
    int pivots = 0;
};

class BoundedSimplex {
public:
    explicit BoundedSimplex(const Problem& problem);

    // Changes a structural variable's bounds in place. The current basis is
    // kept; re-optimization repairs any primal infeasibility this causes.
    void set_var_bounds(int var, double lo, double up);
    double var_lo(int var) const { return lo_[var]; }
    double var_up(int var) const { return up_[var]; }

    Result optimize();

    int num_structural() const { return n_; }

private:
    int total() const { return n_ + m_; }
    double& t_at(int row, int col) { return tableau_[static_cast<std::size_t>(row) * width_ + col]; }
    double t_at(int row, int col) const {
        return tableau_[static_cast<std::size_t>(row) * width_ + col];
    }
    double nonbasic_value(int col) const;
    void recompute_basic_values();
    void refactorize();
    bool infeasibility(double& total_viol) const;
    int price_phase1(bool bland);
    int price_phase2(bool bland);
    struct RatioOutcome {
        double step = kInf;
        int leaving_pos = -1;   // row position in basis; -1 => bound flip or unbounded
        bool to_upper = false;  // bound the leaving basic lands on
        bool flip = false;
    };
    RatioOutcome ratio_test(int entering, int direction, bool phase1) const;
    void apply_step(int entering, int direction, const RatioOutcome& out);
    void pivot(int leaving_pos, int entering);

    int n_ = 0;  // structural vars
    int m_ = 0;  // rows
    int width_ = 0;
    std::vector<double> tableau_;  // m_ x (n_ + m_), current B^-1 * A
    linalg::Vec cost_;             // structural costs (slacks cost 0)
    linalg::Vec lo_, up_;          // bounds for all n_ + m_ columns
    std::vector<std::vector<std::pair<int, double>>> cols_;  // original sparse columns
    std::vector<int> basis_;       // column index per row position
    std::vector<int> basis_pos_;   // column -> row position or -1
    enum class VState : unsigned char { AtLo, AtUp, AtZero, Basic };
    std::vector<VState> vstate_;
    linalg::Vec xb_;               // basic values
    int pivots_since_refactor_ = 0;
    int total_pivots_ = 0;
};

Result solve(const Problem& problem);

}  // namespace freqsec::lp
