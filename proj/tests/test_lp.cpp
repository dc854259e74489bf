#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "freqsec/scheduler/lp.hpp"
#include "freqsec/scheduler/milp.hpp"
#include "freqsec/util/rng.hpp"

using namespace freqsec;
using freqsec::linalg::Vec;

namespace {

// Exact LP oracle for small bounded problems: enumerate candidate vertices
// (every choice of active hyperplanes among row bounds and variable bounds).
struct Hyperplane {
    Vec a;
    double b;
};

double vertex_enumeration_lp(const lp::Problem& p, bool& feasible) {
    const int n = p.num_vars;
    std::vector<Hyperplane> planes;
    for (const auto& row : p.rows) {
        Vec a(static_cast<std::size_t>(n), 0.0);
        for (const auto& [j, v] : row.coeffs) a[static_cast<std::size_t>(j)] += v;
        if (row.lo > -lp::kInf) planes.push_back({a, row.lo});
        if (row.up < lp::kInf) planes.push_back({a, row.up});
    }
    for (int j = 0; j < n; ++j) {
        Vec a(static_cast<std::size_t>(n), 0.0);
        a[static_cast<std::size_t>(j)] = 1.0;
        if (p.lo[static_cast<std::size_t>(j)] > -lp::kInf)
            planes.push_back({a, p.lo[static_cast<std::size_t>(j)]});
        if (p.up[static_cast<std::size_t>(j)] < lp::kInf)
            planes.push_back({a, p.up[static_cast<std::size_t>(j)]});
    }

    auto feasible_point = [&](const Vec& x) {
        for (int j = 0; j < n; ++j) {
            if (x[static_cast<std::size_t>(j)] < p.lo[static_cast<std::size_t>(j)] - 1e-7)
                return false;
            if (x[static_cast<std::size_t>(j)] > p.up[static_cast<std::size_t>(j)] + 1e-7)
                return false;
        }
        for (const auto& row : p.rows) {
            double v = 0.0;
            for (const auto& [j, c] : row.coeffs) v += c * x[static_cast<std::size_t>(j)];
            if (row.lo > -lp::kInf && v < row.lo - 1e-7) return false;
            if (row.up < lp::kInf && v > row.up + 1e-7) return false;
        }
        return true;
    };

    double best = std::numeric_limits<double>::infinity();
    feasible = false;
    std::vector<int> idx(static_cast<std::size_t>(n));
    const int m = static_cast<int>(planes.size());
    // iterate over all n-subsets of planes
    std::vector<int> comb(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) comb[static_cast<std::size_t>(i)] = i;
    if (m < n) return best;
    while (true) {
        linalg::Mat A(static_cast<std::size_t>(n), static_cast<std::size_t>(n));
        Vec b(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j)
                A(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) =
                    planes[static_cast<std::size_t>(comb[static_cast<std::size_t>(i)])]
                        .a[static_cast<std::size_t>(j)];
            b[static_cast<std::size_t>(i)] =
                planes[static_cast<std::size_t>(comb[static_cast<std::size_t>(i)])].b;
        }
        Vec x;
        if (linalg::lu_solve(A, b, x, 1e-10) && feasible_point(x)) {
            double obj = 0.0;
            for (int j = 0; j < n; ++j)
                obj += p.obj[static_cast<std::size_t>(j)] * x[static_cast<std::size_t>(j)];
            if (obj < best) {
                best = obj;
                feasible = true;
            }
        }
        // next combination
        int i = n - 1;
        while (i >= 0 && comb[static_cast<std::size_t>(i)] == m - n + i) --i;
        if (i < 0) break;
        ++comb[static_cast<std::size_t>(i)];
        for (int k = i + 1; k < n; ++k)
            comb[static_cast<std::size_t>(k)] = comb[static_cast<std::size_t>(k - 1)] + 1;
    }
    return best;
}

}  // namespace

TEST_CASE("simple LP with a shared resource") {
    lp::Problem p;
    const int x = p.add_var(0.0, 1.0, -1.0);
    const int y = p.add_var(0.0, 1.0, -1.0);
    p.add_row(-lp::kInf, {{x, 1.0}, {y, 1.0}}, 1.0);
    const auto res = lp::solve(p);
    REQUIRE(res.status == lp::Status::Optimal);
    CHECK(res.obj == doctest::Approx(-1.0));
    CHECK(res.x[0] + res.x[1] == doctest::Approx(1.0));
}

TEST_CASE("equality rows and negative costs at upper bounds") {
    lp::Problem p;
    const int x = p.add_var(0.0, 10.0, 2.0);
    const int y = p.add_var(0.0, 10.0, 1.0);
    p.add_row(6.0, {{x, 1.0}, {y, 1.0}}, 6.0);  // x + y = 6
    const auto res = lp::solve(p);
    REQUIRE(res.status == lp::Status::Optimal);
    CHECK(res.x[0] == doctest::Approx(0.0));
    CHECK(res.x[1] == doctest::Approx(6.0));
    CHECK(res.obj == doctest::Approx(6.0));
}

TEST_CASE("free variable reaches the interior optimum") {
    lp::Problem p;
    const int x = p.add_var(-lp::kInf, lp::kInf, 1.0);
    p.add_row(3.0, {{x, 1.0}}, lp::kInf);  // x >= 3
    const auto res = lp::solve(p);
    REQUIRE(res.status == lp::Status::Optimal);
    CHECK(res.x[0] == doctest::Approx(3.0));
}

TEST_CASE("infeasible and unbounded detection") {
    {
        lp::Problem p;
        const int x = p.add_var(0.0, 1.0, 1.0);
        p.add_row(2.0, {{x, 1.0}}, lp::kInf);  // x >= 2 vs x <= 1
        CHECK(lp::solve(p).status == lp::Status::Infeasible);
    }
    {
        lp::Problem p;
        (void)p.add_var(0.0, lp::kInf, -1.0);
        CHECK(lp::solve(p).status == lp::Status::Unbounded);
    }
}

TEST_CASE("two-region dispatch toy problem") {
    // Cheap unit in region A, expensive in B, limited transfer.
    lp::Problem p;
    const int pa = p.add_var(0.0, 100.0, 10.0);
    const int pb = p.add_var(0.0, 100.0, 50.0);
    const int f = p.add_var(-30.0, 30.0, 0.0);  // A -> B
    p.add_row(60.0, {{pa, 1.0}, {f, -1.0}}, 60.0);  // A balance: pa - f = 60
    p.add_row(50.0, {{pb, 1.0}, {f, 1.0}}, 50.0);   // B balance: pb + f = 50
    const auto res = lp::solve(p);
    REQUIRE(res.status == lp::Status::Optimal);
    CHECK(res.x[static_cast<std::size_t>(f)] == doctest::Approx(30.0));
    CHECK(res.x[static_cast<std::size_t>(pa)] == doctest::Approx(90.0));
    CHECK(res.x[static_cast<std::size_t>(pb)] == doctest::Approx(20.0));
    CHECK(res.obj == doctest::Approx(90.0 * 10.0 + 20.0 * 50.0));
}

TEST_CASE("random LPs match vertex enumeration") {
    rng::Xoshiro256ss gen(7);
    int solved = 0;
    for (int trial = 0; trial < 120; ++trial) {
        lp::Problem p;
        const int n = 2 + static_cast<int>(gen.uniform() * 3.0);  // 2..4 vars
        for (int j = 0; j < n; ++j)
            p.add_var(0.0, gen.uniform(0.5, 3.0), gen.uniform(-1.0, 1.0));
        const int m = 1 + static_cast<int>(gen.uniform() * 3.0);  // 1..3 rows
        for (int i = 0; i < m; ++i) {
            std::vector<std::pair<int, double>> coeffs;
            for (int j = 0; j < n; ++j) {
                const double c = gen.uniform(-1.0, 1.0);
                if (std::fabs(c) > 0.15) coeffs.emplace_back(j, c);
            }
            if (coeffs.empty()) coeffs.emplace_back(0, 1.0);
            if (gen.uniform() < 0.3)
                p.add_row(gen.uniform(-1.0, 0.5), coeffs, lp::kInf);
            else
                p.add_row(-lp::kInf, coeffs, gen.uniform(0.2, 2.5));
        }
        bool oracle_feasible = false;
        const double oracle = vertex_enumeration_lp(p, oracle_feasible);
        const auto res = lp::solve(p);
        if (!oracle_feasible) {
            CHECK(res.status == lp::Status::Infeasible);
            continue;
        }
        REQUIRE(res.status == lp::Status::Optimal);
        CHECK(res.obj == doctest::Approx(oracle).epsilon(1e-6).scale(1.0));
        std::string why;
        CHECK(milp::check_solution(p, res.x, 1e-6, &why));
        ++solved;
    }
    CHECK(solved > 60);  // most random instances are feasible
}

TEST_CASE("bound changes re-optimize from the current basis") {
    lp::Problem p;
    const int x = p.add_var(0.0, 4.0, -1.0);
    const int y = p.add_var(0.0, 4.0, -2.0);
    p.add_row(-lp::kInf, {{x, 1.0}, {y, 1.0}}, 5.0);
    lp::BoundedSimplex simplex(p);
    auto r1 = simplex.optimize();
    REQUIRE(r1.status == lp::Status::Optimal);
    CHECK(r1.obj == doctest::Approx(-9.0));  // y = 4, x = 1
    simplex.set_var_bounds(y, 0.0, 2.0);
    auto r2 = simplex.optimize();
    REQUIRE(r2.status == lp::Status::Optimal);
    CHECK(r2.obj == doctest::Approx(-7.0));  // y = 2, x = 3
    simplex.set_var_bounds(y, 0.0, 4.0);
    auto r3 = simplex.optimize();
    CHECK(r3.obj == doctest::Approx(-9.0));
}

TEST_CASE("branch and bound solves small knapsack-style integer programs") {
    rng::Xoshiro256ss gen(99);
    for (int trial = 0; trial < 40; ++trial) {
        const int n = 3 + static_cast<int>(gen.uniform() * 4.0);  // 3..6 items
        std::vector<double> value(static_cast<std::size_t>(n)), weight(static_cast<std::size_t>(n));
        double cap = 0.0;
        for (int j = 0; j < n; ++j) {
            value[static_cast<std::size_t>(j)] = gen.uniform(1.0, 10.0);
            weight[static_cast<std::size_t>(j)] = gen.uniform(1.0, 6.0);
            cap += weight[static_cast<std::size_t>(j)];
        }
        cap *= 0.45;

        milp::Instance inst;
        std::vector<std::pair<int, double>> row;
        for (int j = 0; j < n; ++j) {
            inst.lp.add_var(0.0, 1.0, -value[static_cast<std::size_t>(j)]);
            inst.is_integer.push_back(true);
            row.emplace_back(j, weight[static_cast<std::size_t>(j)]);
        }
        inst.lp.add_row(-lp::kInf, row, cap);
        milp::Options opts;
        opts.rel_gap = 0.0;
        const auto res = milp::solve(inst, opts);
        REQUIRE(res.status == milp::Status::Optimal);

        // Exhaustive oracle.
        double best = 0.0;
        for (int mask = 0; mask < (1 << n); ++mask) {
            double v = 0.0, w = 0.0;
            for (int j = 0; j < n; ++j)
                if (mask & (1 << j)) {
                    v += value[static_cast<std::size_t>(j)];
                    w += weight[static_cast<std::size_t>(j)];
                }
            if (w <= cap + 1e-9) best = std::max(best, v);
        }
        CHECK(-res.obj == doctest::Approx(best).epsilon(1e-9));
    }
}

TEST_CASE("branch and bound respects the gap setting and reports bounds") {
    milp::Instance inst;
    // min -sum x_j with a crowded constraint; optimum known.
    std::vector<std::pair<int, double>> row;
    for (int j = 0; j < 8; ++j) {
        inst.lp.add_var(0.0, 3.0, -1.0);
        inst.is_integer.push_back(true);
        row.emplace_back(j, 1.0);
    }
    inst.lp.add_row(-lp::kInf, row, 11.5);
    milp::Options opts;
    opts.rel_gap = 0.0;
    const auto res = milp::solve(inst, opts);
    REQUIRE(res.status == milp::Status::Optimal);
    CHECK(res.obj == doctest::Approx(-11.0));
    CHECK(res.bound <= res.obj + 1e-9);
}

TEST_CASE("integer infeasibility is reported") {
    milp::Instance inst;
    inst.lp.add_var(0.0, 5.0, 1.0);
    inst.is_integer.push_back(true);
    // 2x = 3 has no integer solution; the LP relaxation is feasible.
    inst.lp.add_row(3.0, {{0, 2.0}}, 3.0);
    const auto res = milp::solve(inst, {});
    CHECK(res.status == milp::Status::Infeasible);
}
