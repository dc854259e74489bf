#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "freqsec/scheduler/rolling.hpp"
#include "freqsec/scheduler/suc.hpp"
#include "freqsec/util/rng.hpp"
#include "suc_oracle.hpp"

using namespace freqsec;
using namespace freqsec::scheduler;

namespace {

GeneratorClass ccgt_like(const std::string& name, int region, int count) {
    GeneratorClass g;
    g.name = name;
    g.region = region;
    g.count = count;
    g.p_max = 500.0;
    g.p_msg = 250.0;
    g.c_nl = 4500.0;
    g.c_m = 46.0;
    g.c_st = 10000.0;
    g.start_up_time = 0;
    g.min_up = 0;
    g.min_down = 0;
    g.h_const = 5.0;
    g.r_max = 50.0;
    g.r_slope = 0.5;
    g.emissions = 368.0;
    return g;
}

ScenarioTree single_node_tree(double d1, double d2, double w1 = 0.0, double w2 = 0.0) {
    ScenarioTree tree;
    TreeNode n;
    n.id = 0;
    n.parent = -1;
    n.prob = 1.0;
    n.dt_hours = 1.0;
    n.start_hour = 0.0;
    n.demand[0] = d1;
    n.demand[1] = d2;
    n.wind[0] = w1;
    n.wind[1] = w2;
    tree.nodes.push_back(n);
    return tree;
}

SucOptions off_options() {
    SucOptions opt;
    opt.mode = FrequencyMode::Off;
    opt.corridor_limit = 7500.0;
    opt.mip.rel_gap = 0.0;
    return opt;
}

constraints::SecurityConstraintSet degenerate_pack(double p_loss, int faulted, double h_loss) {
    using regression::ModelKind;
    using regression::RegressionModel;
    std::vector<RegressionModel> models;
    for (int region : {1, 2}) {
        RegressionModel rocof;
        rocof.kind = ModelKind::Rocof;
        rocof.region = region;
        rocof.faulted_region = faulted;
        rocof.theta.assign(8, 0.0);
        models.push_back(rocof);
        RegressionModel nadir;
        nadir.kind = ModelKind::NadirDirect;
        nadir.region = region;
        nadir.faulted_region = faulted;
        nadir.theta.assign(8, 0.0);  // predicts zero nadir: never binding
        models.push_back(nadir);
    }
    constraints::SecurityParams params;
    params.p_loss = p_loss;
    params.faulted_region = faulted;
    params.h_loss = h_loss;
    return constraints::build(models, params, 135.0, 15.0);
}

}  // namespace

TEST_CASE("single CCGT node: one unit at full load") {
    const std::vector<GeneratorClass> classes{ccgt_like("ccgt", 1, 3)};
    const auto tree = single_node_tree(400.0, 0.0);
    const auto options = off_options();
    const auto state = RollingState::cold(classes);
    const auto model = build_milp(classes, tree, nullptr, options, state);
    const auto schedule = solve(model, classes, tree, nullptr, options, state);
    REQUIRE(schedule.status == milp::Status::Optimal);
    CHECK(schedule.decisions[0].n_up[0] == 1);
    CHECK(schedule.decisions[0].p[0] == doctest::Approx(400.0));
    // 4500 no-load + 46 * 400 marginal + 10000 start-up (cold state)
    CHECK(schedule.cost == doctest::Approx(4500.0 + 46.0 * 400.0 + 10000.0).epsilon(1e-9));
    CHECK(schedule.decisions[0].r[0] == doctest::Approx(0.0).scale(1.0));
}

TEST_CASE("COI inertia floor forces eighteen units online") {
    auto cls = ccgt_like("ccgt", 1, 30);
    cls.r_max = 100.0;  // enough response per unit that the QSS row binds mildly
    const std::vector<GeneratorClass> classes{cls};
    const auto tree = single_node_tree(5000.0, 0.0);
    auto options = off_options();
    options.mode = FrequencyMode::CoiOnly;
    const auto pack = degenerate_pack(1800.0, 1, 0.0);
    const auto state = RollingState::cold(classes);
    const auto model = build_milp(classes, tree, &pack, options, state);
    const auto schedule = solve(model, classes, tree, &pack, options, state);
    REQUIRE(schedule.status == milp::Status::Optimal);
    // H1+H2 >= 45000 MW*s at 2500 MW*s per unit
    CHECK(schedule.decisions[0].n_up[0] >= 18);
    CHECK(schedule.decisions[0].n_up[0] == 18);
    CHECK(schedule.decisions[0].h_region[0] == doctest::Approx(18 * 2500.0));
    // QSS: R >= 1800 - 0.005*5000*0.5 = 1787.5
    CHECK(schedule.decisions[0].r_region[0] >= 1787.5 - 1e-6);
}

TEST_CASE("committed minimum generation displaces wind") {
    auto cls = ccgt_like("ccgt", 1, 30);
    cls.r_max = 100.0;  // the fleet must also be able to cover the QSS row
    const std::vector<GeneratorClass> classes{cls};
    auto tree = single_node_tree(10000.0, 0.0, 12000.0, 0.0);
    auto options = off_options();
    options.mode = FrequencyMode::CoiOnly;
    const auto pack = degenerate_pack(1800.0, 1, 0.0);
    auto state = RollingState::cold(classes);
    const auto model = build_milp(classes, tree, &pack, options, state);
    const auto schedule = solve(model, classes, tree, &pack, options, state);
    REQUIRE(schedule.status != milp::Status::Infeasible);
    const auto& d = schedule.decisions[0];
    CHECK(d.n_up[0] >= 18);
    // 18 units at 250 MW minimum leave at most 5.5 GW of room for wind
    CHECK(d.wind_used[0] <= 5500.0 + 1e-6);
    CHECK(12000.0 - d.wind_used[0] >= 6500.0 - 1e-6);
}

TEST_CASE("shedding is priced at the value of lost load") {
    const std::vector<GeneratorClass> classes{ccgt_like("ccgt", 1, 2)};
    const auto tree = single_node_tree(2000.0, 0.0);  // capacity is only 1000 MW
    auto options = off_options();
    options.c_ls = 30000.0;
    const auto state = RollingState::cold(classes);
    const auto model = build_milp(classes, tree, nullptr, options, state);
    const auto schedule = solve(model, classes, tree, nullptr, options, state);
    REQUIRE(schedule.status == milp::Status::Optimal);
    const auto& d = schedule.decisions[0];
    CHECK(d.p_ls[0] == doctest::Approx(1000.0));
    CHECK(d.cost_loadshed == doctest::Approx(30000.0 * 1000.0));
}

TEST_CASE("start-up delay blocks the root hour; later hours are free") {
    auto cls = ccgt_like("ccgt", 1, 3);
    cls.start_up_time = 1;
    const std::vector<GeneratorClass> classes{cls};
    ScenarioTree tree;
    TreeNode root;
    root.id = 0;
    root.parent = -1;
    root.prob = 1.0;
    root.dt_hours = 1.0;
    root.start_hour = 0.0;
    root.demand[0] = 600.0;
    root.demand[1] = 0.0;
    tree.nodes.push_back(root);
    TreeNode next = root;
    next.id = 1;
    next.parent = 0;
    next.start_hour = 1.0;
    tree.nodes.push_back(next);
    auto options = off_options();
    const auto state = RollingState::cold(classes);  // empty pipeline
    const auto model = build_milp(classes, tree, nullptr, options, state);
    const auto schedule = solve(model, classes, tree, nullptr, options, state);
    REQUIRE(schedule.status == milp::Status::Optimal);
    CHECK(schedule.decisions[0].n_up[0] == 0);        // cannot start instantly
    CHECK(schedule.decisions[0].p_ls[0] == doctest::Approx(600.0));
    CHECK(schedule.decisions[1].n_up[0] >= 1);        // the delayed start lands here
    CHECK(schedule.decisions[1].p_ls[0] == doctest::Approx(0.0).scale(1.0));
}

TEST_CASE("min-up keeps freshly started units online") {
    auto cls = ccgt_like("ccgt", 1, 2);
    cls.min_up = 2;
    cls.c_nl = 100.0;
    const std::vector<GeneratorClass> classes{cls};
    ScenarioTree tree;
    double demand[3] = {700.0, 700.0, 300.0};
    for (int k = 0; k < 3; ++k) {
        TreeNode n;
        n.id = k;
        n.parent = k - 1;
        n.prob = 1.0;
        n.dt_hours = 1.0;
        n.start_hour = k;
        n.demand[0] = demand[k];
        n.demand[1] = 0.0;
        tree.nodes.push_back(n);
    }
    auto options = off_options();
    auto state = RollingState::cold(classes);
    const auto model = build_milp(classes, tree, nullptr, options, state);
    const auto schedule = solve(model, classes, tree, nullptr, options, state);
    REQUIRE(schedule.status == milp::Status::Optimal);
    CHECK(schedule.decisions[0].n_up[0] == 2);
    CHECK(schedule.decisions[1].n_up[0] == 2);
    // units started at hour 0 must still be up at hour 1 (within min-up);
    // by hour 2 they may shut down to the single unit the demand needs
    CHECK(schedule.decisions[2].n_up[0] == 1);
}

TEST_CASE("small random instances match the enumeration oracle") {
    rng::Xoshiro256ss gen(123);
    for (int trial = 0; trial < 6; ++trial) {
        std::vector<GeneratorClass> classes;
        auto a = ccgt_like("a", 1, 2);
        a.c_m = gen.uniform(20.0, 60.0);
        a.c_nl = gen.uniform(1000.0, 5000.0);
        a.min_up = static_cast<int>(gen.uniform(0.0, 2.99));
        classes.push_back(a);
        auto b = ccgt_like("b", 2, 2);
        b.c_m = gen.uniform(60.0, 150.0);
        b.c_st = 0.0;
        b.min_down = static_cast<int>(gen.uniform(0.0, 1.99));
        classes.push_back(b);

        ScenarioTree tree;
        const int chain = 3;
        for (int k = 0; k < chain; ++k) {
            TreeNode n;
            n.id = k;
            n.parent = k - 1;
            n.prob = 1.0;
            n.dt_hours = 1.0;
            n.start_hour = k;
            n.demand[0] = gen.uniform(300.0, 1500.0);
            n.demand[1] = gen.uniform(100.0, 800.0);
            n.wind[0] = gen.uniform(0.0, 500.0);
            n.wind[1] = gen.uniform(0.0, 500.0);
            tree.nodes.push_back(n);
        }
        auto options = off_options();
        options.corridor_limit = gen.uniform(200.0, 900.0);
        const auto state = RollingState::cold(classes);
        const auto model = build_milp(classes, tree, nullptr, options, state);
        const auto schedule = solve(model, classes, tree, nullptr, options, state);
        const double oracle = suc_oracle::optimal_cost(classes, tree, options, state);
        if (schedule.status == milp::Status::Infeasible) {
            CHECK(oracle == suc_oracle::kInf);
            continue;
        }
        REQUIRE(schedule.status == milp::Status::Optimal);
        CHECK(schedule.objective ==
              doctest::Approx(oracle).epsilon(1e-6).scale(std::fabs(oracle) + 1.0));
    }
}

TEST_CASE("a stationary problem settles into identical hourly decisions") {
    std::vector<GeneratorClass> classes{ccgt_like("ccgt", 1, 6)};
    classes[0].start_up_time = 2;
    classes[0].min_up = 2;
    classes[0].min_down = 1;
    HourlyProfile profile;
    for (int h = 0; h < 40; ++h) {
        profile.demand1.push_back(1800.0);
        profile.demand2.push_back(200.0);
        profile.wind1.push_back(300.0);
        profile.wind2.push_back(300.0);
    }
    TreeConfig tcfg;
    tcfg.branch_probs = {1.0};
    tcfg.branch_z = {0.0};
    tcfg.step_hours = {1, 1, 1, 4};
    auto options = off_options();
    options.mip.rel_gap = 0.0;
    const auto state = warm_start_state(classes, profile, 0);
    const auto records =
        rolling_horizon(classes, profile, 0, 8, tcfg, nullptr, options, state);
    REQUIRE(records.size() == 8);
    for (std::size_t k = 5; k < records.size(); ++k) {
        CHECK(records[k].root.n_up == records[4].root.n_up);
        CHECK(records[k].root.p[0] == doctest::Approx(records[4].root.p[0]));
    }
}

TEST_CASE("report: carbon intensity spans the class mix") {
    std::vector<GeneratorClass> classes;
    auto nuclear = ccgt_like("nuclear", 1, 2);
    nuclear.emissions = 0.0;
    nuclear.p_msg = 900.0;
    nuclear.p_max = 900.0;
    nuclear.must_run = true;
    classes.push_back(nuclear);
    auto ccgt = ccgt_like("ccgt", 1, 4);
    classes.push_back(ccgt);

    HourlyRecord rec;
    rec.hour = 0;
    rec.root.n_up = {2, 0};
    rec.root.n_sg = {0, 0};
    rec.root.n_sd = {0, 0};
    rec.root.p = {1800.0, 0.0};
    rec.root.r = {0.0, 0.0};
    rec.demand[0] = 1800.0;
    rec.demand[1] = 0.0;

    // pure nuclear dispatch: zero intensity
    auto summary = report({rec}, classes);
    CHECK(summary.carbon_intensity_dispatch == doctest::Approx(0.0).scale(1.0));

    // pure CCGT dispatch: the class factor itself
    rec.root.p = {0.0, 1200.0};
    summary = report({rec}, classes);
    CHECK(summary.carbon_intensity_dispatch == doctest::Approx(368.0));

    // mixed dispatch sits strictly between
    rec.root.p = {900.0, 600.0};
    summary = report({rec}, classes);
    CHECK(summary.carbon_intensity_dispatch > 0.0);
    CHECK(summary.carbon_intensity_dispatch < 368.0);
    CHECK(summary.carbon_intensity_dispatch ==
          doctest::Approx(368.0 * 600.0 / 1500.0).epsilon(1e-12));
}

TEST_CASE("the independent audit rejects corrupted schedules") {
    const std::vector<GeneratorClass> classes{ccgt_like("ccgt", 1, 3)};
    const auto tree = single_node_tree(400.0, 0.0);
    const auto options = off_options();
    const auto state = RollingState::cold(classes);
    const auto model = build_milp(classes, tree, nullptr, options, state);
    auto schedule = solve(model, classes, tree, nullptr, options, state);
    REQUIRE(audit_schedule(schedule, classes, tree, nullptr, options, state));

    auto corrupted = schedule;
    corrupted.decisions[0].p[0] += 50.0;  // breaks the balance
    std::vector<std::string> why;
    CHECK_FALSE(audit_schedule(corrupted, classes, tree, nullptr, options, state, &why));
    CHECK(!why.empty());

    auto wrong_obj = schedule;
    wrong_obj.objective *= 1.01;
    CHECK_FALSE(audit_schedule(wrong_obj, classes, tree, nullptr, options, state));
}

TEST_CASE("infeasibility names the offending constraint family") {
    // Frequency rows that no fleet can meet.
    auto cls = ccgt_like("ccgt", 1, 2);
    const std::vector<GeneratorClass> classes{cls};
    const auto tree = single_node_tree(400.0, 0.0);
    auto options = off_options();
    options.mode = FrequencyMode::CoiOnly;
    const auto pack = degenerate_pack(1800.0, 1, 0.0);  // needs 45 GWs, fleet has 2.5
    const auto state = RollingState::cold(classes);
    const auto model = build_milp(classes, tree, &pack, options, state);
    const auto schedule = solve(model, classes, tree, &pack, options, state);
    CHECK(schedule.status == milp::Status::Infeasible);
    CHECK(schedule.infeasibility_hint == "frequency rows");
}
