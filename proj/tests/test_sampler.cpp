#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>

#include "freqsec/dynamics/simulate.hpp"
#include "freqsec/sampler/sweep.hpp"

using namespace freqsec;
using namespace freqsec::sampler;
using dynamics::OperatingPoint;
using dynamics::SimParams;

namespace {

SweepSpec small_spec(SweepTarget target) {
    SweepSpec s;
    s.target = target;
    s.p_loss_values = {1800.0};
    s.faulted_region = 2;
    s.d_splits = {0.9};
    s.r_splits = {0.5};
    s.h_splits = {0.5};
    s.pd_total = 30000.0;
    s.d_total = 0.005;
    s.boundary_tol = 5e-3;
    s.walk_increment = target == SweepTarget::Rocof ? 4000.0 : 300.0;
    if (target == SweepTarget::Nadir) s.h_total_factors = {1.8};
    return s;
}

SimParams test_params() {
    SimParams p;
    p.dt = 2e-3;
    p.horizon = 20.0;
    p.t_del = 10.0;
    return p;
}

}  // namespace

TEST_CASE("initial point puts the COI exactly at its limits") {
    SweepSpec spec = small_spec(SweepTarget::Rocof);
    const auto p = initial_point(1800.0, spec);
    // total inertia from the COI RoCoF floor
    CHECK(p.h1 + p.h2 == doctest::Approx(45000.0).epsilon(1e-12));
    // total response from the COI nadir threshold: k*/h_total
    CHECK(p.r1 + p.r2 == doctest::Approx(5.0625e8 / 45000.0).epsilon(1e-12));
    CHECK(p.r1 == doctest::Approx(p.r2));
    CHECK(p.pd1 == doctest::Approx(27000.0));
    CHECK_THROWS_AS(initial_point(999.0, spec), std::invalid_argument);
}

TEST_CASE("quasi-steady-state floor lifts degenerate response") {
    SweepSpec spec = small_spec(SweepTarget::Rocof);
    // force k*/h below the floor with a large admissible nadir
    spec.df_max = 60.0;
    spec.df_ss_max = 0.5;
    const auto p = initial_point(1800.0, spec);
    // floor = 1800 - 0.005 * 30000 * 0.5 = 1725
    CHECK(p.r1 + p.r2 == doctest::Approx(1725.0).epsilon(1e-12));
}

TEST_CASE("walk lands on the boundary and re-simulates inside the band") {
    for (SweepTarget target : {SweepTarget::Rocof, SweepTarget::Nadir}) {
        SweepSpec spec = small_spec(target);
        const auto params = test_params();
        const auto start = initial_point(1800.0, spec);
        const auto walk = walk_to_boundary(start, spec, params, dynamics::Backend::Scalar);

        const auto lane = dynamics::simulate_stats_one(walk.point, params,
                                                       dynamics::Backend::Scalar);
        REQUIRE(lane.ok);
        const double limit = target == SweepTarget::Rocof ? spec.rocof_max : spec.df_max;
        const double metric = target == SweepTarget::Rocof
                                  ? std::max(lane.stats.max_rocof_1, lane.stats.max_rocof_2)
                                  : std::max(lane.stats.nadir_1, lane.stats.nadir_2);
        CHECK(metric <= limit + 1e-12);
        CHECK(metric >= limit - spec.boundary_tol);

        // the coarse ascent is monotone until the first non-violating point
        const auto& hist = walk.metric_history;
        std::size_t first_ok = 0;
        while (first_ok < hist.size() && hist[first_ok] > limit) ++first_ok;
        for (std::size_t k = 1; k <= first_ok && k < hist.size(); ++k)
            CHECK(hist[k] <= hist[k - 1] + 1e-6);

        // a point already inside the band comes back unchanged
        const auto again = walk_to_boundary(walk.point, spec, params, dynamics::Backend::Scalar);
        CHECK(again.point.h1 == walk.point.h1);
        CHECK(again.point.r1 == walk.point.r1);
        CHECK(again.evaluations == 1);
    }
}

TEST_CASE("sweep sample counts follow the grid") {
    SweepSpec spec = small_spec(SweepTarget::Rocof);
    const auto params = test_params();
    const auto set = run_sweep(spec, params, dynamics::Backend::Scalar);
    CHECK(set.samples.size() + 2 * set.failures.size() == 2);
    CHECK(set.failures.empty());
    CHECK(set.samples[0].region == 1);
    CHECK(set.samples[1].region == 2);
    CHECK(set.samples[0].features[7] == 1.0);
    for (const auto& s : set.samples) CHECK(s.label >= 0.0);
}

TEST_CASE("sweep covers the whole requested grid") {
    SweepSpec spec = small_spec(SweepTarget::Rocof);
    spec.p_loss_values = {1200.0, 1800.0};
    spec.d_splits = {0.7, 0.9};
    spec.r_splits = {0.3, 0.7};
    spec.h_splits = {0.4, 0.6};
    SimParams params = test_params();
    params.dt = 4e-3;
    params.horizon = 16.0;
    const auto set = run_sweep(spec, params, dynamics::Backend::Scalar);
    CHECK(spec.grid_size() == 16);
    CHECK(set.samples.size() == 2 * (spec.grid_size() - set.failures.size()));
    // every grid point either yielded two samples or a reported failure
    CHECK(set.samples.size() + 2 * set.failures.size() == 2 * spec.grid_size());
}

TEST_CASE("sweeps are deterministic") {
    SweepSpec spec = small_spec(SweepTarget::Rocof);
    spec.h_splits = {0.4, 0.6};
    const auto params = test_params();
    const auto a = run_sweep(spec, params, dynamics::Backend::Scalar);
    const auto b = run_sweep(spec, params, dynamics::Backend::Scalar);
    CHECK(samples_to_csv(a) == samples_to_csv(b));
    CHECK(sidecar_to_json(a) == sidecar_to_json(b));
}

TEST_CASE("emitted samples pass the boundary re-simulation audit") {
    SweepSpec spec = small_spec(SweepTarget::Nadir);
    spec.h_splits = {0.4, 0.6};
    spec.r_splits = {0.4, 0.7};
    const auto params = test_params();
    const auto set = run_sweep(spec, params, dynamics::Backend::Scalar);
    REQUIRE(!set.samples.empty());
    const auto audit = audit_boundary_membership(set, params, dynamics::Backend::Scalar);
    CHECK(audit.all_within);
    CHECK(audit.violations == 0);
    CHECK(audit.checked == set.samples.size() / 2);
}

TEST_CASE("sample set round trips through CSV plus sidecar") {
    namespace fs = std::filesystem;
    SweepSpec spec = small_spec(SweepTarget::Rocof);
    const auto params = test_params();
    const auto set = run_sweep(spec, params, dynamics::Backend::Scalar);
    const auto dir = fs::temp_directory_path() / "freqsec_sampler_test";
    fs::create_directories(dir);
    const auto csv_path = (dir / "samples.csv").string();
    const auto meta_path = (dir / "samples.meta.json").string();
    write_sample_set(set, csv_path, meta_path, (dir / "integrals.csv").string());

    const auto back = read_sample_set(csv_path, meta_path);
    REQUIRE(back.samples.size() == set.samples.size());
    for (std::size_t i = 0; i < set.samples.size(); ++i) {
        CHECK(back.samples[i].region == set.samples[i].region);
        CHECK(back.samples[i].label == set.samples[i].label);
        CHECK(back.samples[i].features == set.samples[i].features);
        CHECK(back.samples[i].point.pd1 == doctest::Approx(set.samples[i].point.pd1));
    }
    CHECK(back.spec.target == set.spec.target);
    CHECK(back.params.dt == set.params.dt);
    std::ifstream in(csv_path);
    std::string header;
    std::getline(in, header);
    CHECK(header == "region,h1,h2,p_loss,dpd1,dpd2,r1,r2,label");
}

TEST_CASE("degenerate sweep parameters are rejected, failures are recorded") {
    SweepSpec spec = small_spec(SweepTarget::Rocof);
    spec.d_splits = {1.5};
    CHECK_THROWS_AS(spec.validate(), std::invalid_argument);

    // An unreachable nadir boundary (limit far above anything the system
    // reaches at the response floor) must be reported, not fatal.
    SweepSpec nadir = small_spec(SweepTarget::Nadir);
    nadir.df_max = 30.0;  // deviation the model never approaches
    nadir.df_ss_max = 0.4;
    const auto params = test_params();
    const auto set = run_sweep(nadir, params, dynamics::Backend::Scalar);
    CHECK(set.samples.empty());
    CHECK(set.failures.size() == nadir.grid_size());
    CHECK(!set.failures[0].message.empty());
}
