#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "freqsec/constraints/security.hpp"
#include "freqsec/util/rng.hpp"

using namespace freqsec;
using namespace freqsec::constraints;
using regression::ModelKind;
using regression::RegressionModel;

namespace {

SecurityParams gb_params() {
    SecurityParams p;
    p.rocof_max = 1.0;
    p.df_max = 0.8;
    p.df_ss_max = 0.5;
    p.f0 = 50.0;
    p.p_loss = 1800.0;
    p.faulted_region = 1;
    p.h_loss = 9000.0;
    return p;
}

RegressionModel make_model(ModelKind kind, int region, const linalg::Vec& theta) {
    RegressionModel m;
    m.kind = kind;
    m.region = region;
    m.faulted_region = 1;
    m.theta = theta;
    m.feature_names = regression::standard_feature_names();
    return m;
}

}  // namespace

TEST_CASE("degenerate rocof model recovers the COI condition") {
    const auto model = make_model(ModelKind::Rocof, 1, linalg::Vec(8, 0.0));
    const auto row = rocof_row(model, gb_params(), 135.0, 15.0, 1);
    // 2*rocof_max*(H1+H2) >= f0*p_loss  <=>  H1+H2 >= 45000
    CHECK(row.coeff_h1 == doctest::Approx(2.0));
    CHECK(row.coeff_h2 == doctest::Approx(2.0));
    CHECK(row.coeff_r1 == 0.0);
    CHECK(row.coeff_r2 == 0.0);
    CHECK(row.rhs == doctest::Approx(90000.0));
    CHECK(row.satisfied(45000.0, 0.1, 0.0, 0.0));
    CHECK_FALSE(row.satisfied(44000.0, 900.0, 5000.0, 5000.0));
}

TEST_CASE("response coefficients flip sign in the >= form") {
    linalg::Vec theta(8, 0.0);
    theta[5] = -0.4;  // response reduces the oscillatory term
    theta[6] = 0.1;
    const auto row = rocof_row(make_model(ModelKind::Rocof, 2, theta), gb_params(), 135.0, 15.0, 2);
    CHECK(row.coeff_r1 == doctest::Approx(0.4));
    CHECK(row.coeff_r2 == doctest::Approx(-0.1));
}

TEST_CASE("degenerate nadir model holds with equality everywhere") {
    linalg::Vec theta(8, 0.0);
    theta[7] = 0.8;  // constant prediction at the limit
    const auto row = nadir_row(make_model(ModelKind::NadirDirect, 1, theta), gb_params(),
                               135.0, 15.0, 1);
    CHECK(row.lhs(70000.0, 30000.0, 1500.0, 300.0) == doctest::Approx(row.rhs).scale(1.0));
    CHECK(row.satisfied(1.0, 1.0, 0.0, 0.0, 1e-9));
}

TEST_CASE("quasi-steady-state row arithmetic") {
    auto params = gb_params();
    const auto row = qss_row(params, 150.0);
    CHECK(row.rhs == doctest::Approx(1800.0 - 150.0 * 0.5));  // 1725
    CHECK(row.coeff_r1 == 1.0);
    CHECK(row.coeff_r2 == 1.0);
    CHECK(row.coeff_h1 == 0.0);

    params.p_loss = 0.0;
    const auto vacuous = qss_row(params, 150.0);
    CHECK(vacuous.rhs <= 0.0);
    CHECK(vacuous.satisfied(0.0, 0.0, 0.0, 0.0));

    // the rhs never exceeds the loss itself
    rng::Xoshiro256ss gen(2);
    for (int k = 0; k < 50; ++k) {
        auto p = gb_params();
        p.p_loss = gen.uniform(0.0, 2000.0);
        CHECK(qss_row(p, gen.uniform(0.0, 400.0)).rhs <= p.p_loss + 1e-12);
    }
}

TEST_CASE("model kind and region mismatches are rejected") {
    const auto nadir_model = make_model(ModelKind::NadirDirect, 1, linalg::Vec(8, 0.0));
    CHECK_THROWS_AS(rocof_row(nadir_model, gb_params(), 135.0, 15.0, 1), std::invalid_argument);
    const auto rocof_model = make_model(ModelKind::Rocof, 1, linalg::Vec(8, 0.0));
    CHECK_THROWS_AS(nadir_row(rocof_model, gb_params(), 135.0, 15.0, 1), std::invalid_argument);
    CHECK_THROWS_AS(rocof_row(rocof_model, gb_params(), 135.0, 15.0, 2), std::invalid_argument);
}

TEST_CASE("build assembles exactly the six expected rows") {
    std::vector<RegressionModel> models;
    linalg::Vec tr(8, 0.0);
    tr[0] = -0.1;
    tr[1] = -0.05;
    tr[7] = 2000.0;
    linalg::Vec tn(8, 0.0);
    tn[0] = -4e-6;
    tn[1] = -2e-6;
    tn[5] = -1e-4;
    tn[6] = -5e-5;
    tn[7] = 1.2;
    for (int region : {1, 2}) {
        models.push_back(make_model(ModelKind::Rocof, region, tr));
        models.push_back(make_model(ModelKind::NadirDirect, region, tn));
    }
    const auto pack = build(models, gb_params(), 135.0, 15.0);
    REQUIRE(pack.rows.size() == 6);
    CHECK(pack.rows[0].name == "coi_rocof");
    CHECK(pack.rows[1].name == "qss");
    CHECK(pack.rows[2].name == "rocof_r1");
    CHECK(pack.rows[3].name == "rocof_r2");
    CHECK(pack.rows[4].name == "nadir_r1");
    CHECK(pack.rows[5].name == "nadir_r2");
    CHECK(pack.rows[0].rhs == doctest::Approx(45000.0));
    CHECK(pack.models_used.size() == 4);
    CHECK(!pack.models_used[0].hash.empty());

    // missing model family
    std::vector<RegressionModel> incomplete = {models[0], models[1]};
    CHECK_THROWS(build(incomplete, gb_params(), 135.0, 15.0));
}

TEST_CASE("cleared rows agree with the fractional form on random points") {
    rng::Xoshiro256ss gen(9);
    for (int trial = 0; trial < 200; ++trial) {
        linalg::Vec theta(8);
        theta[0] = gen.uniform(-1.0, 0.2);
        theta[1] = gen.uniform(-1.0, 0.2);
        theta[2] = gen.uniform(-0.5, 2.0);
        theta[3] = gen.uniform(-2.0, 2.0);
        theta[4] = gen.uniform(-2.0, 2.0);
        theta[5] = gen.uniform(-1.0, 0.2);
        theta[6] = gen.uniform(-1.0, 0.2);
        theta[7] = gen.uniform(-5000.0, 5000.0);
        auto params = gb_params();
        params.p_loss = gen.uniform(400.0, 1800.0);
        const double dpd1 = gen.uniform(50.0, 250.0);
        const double dpd2 = gen.uniform(5.0, 50.0);
        const auto model = make_model(ModelKind::Rocof, 1, theta);
        const auto row = rocof_row(model, params, dpd1, dpd2, 1);

        const double h1 = gen.uniform(5000.0, 150000.0);
        const double h2 = gen.uniform(5000.0, 150000.0);
        const double r1 = gen.uniform(0.0, 5000.0);
        const double r2 = gen.uniform(0.0, 5000.0);
        const std::vector<double> x{h1, h2, params.p_loss, dpd1, dpd2, r1, r2, 1.0};
        const double fractional = predicted_regional_rocof(model, x, params.f0);
        const bool frac_ok = fractional <= params.rocof_max + 1e-12;
        const bool row_ok = row.satisfied(h1, h2, r1, r2, 1e-9 * std::fabs(row.rhs));
        CHECK(frac_ok == row_ok);
    }
}

TEST_CASE("pack JSON round trip") {
    std::vector<RegressionModel> models;
    linalg::Vec tr(8, 0.0);
    tr[7] = 1000.0;
    linalg::Vec tn(8, 0.0);
    tn[7] = 0.5;
    for (int region : {1, 2}) {
        models.push_back(make_model(ModelKind::Rocof, region, tr));
        models.push_back(make_model(ModelKind::NadirDirect, region, tn));
    }
    const auto pack = build(models, gb_params(), 135.0, 15.0);
    const auto text = pack_to_json(pack);
    const auto back = pack_from_json_text(text);
    REQUIRE(back.rows.size() == pack.rows.size());
    for (std::size_t i = 0; i < pack.rows.size(); ++i) {
        CHECK(back.rows[i].name == pack.rows[i].name);
        CHECK(back.rows[i].coeff_h1 == pack.rows[i].coeff_h1);
        CHECK(back.rows[i].rhs == pack.rows[i].rhs);
    }
    CHECK(back.params.p_loss == 1800.0);
    CHECK(back.params.h_loss == 9000.0);
    CHECK(back.models.size() == 4);
    // re-materialization at a different demand level matches a fresh build
    const auto rows = back.rows_for_demand(200.0, 40.0);
    const auto direct = build(models, gb_params(), 200.0, 40.0);
    for (std::size_t i = 0; i < rows.size(); ++i)
        CHECK(rows[i].rhs == doctest::Approx(direct.rows[i].rhs).epsilon(1e-12));
}
