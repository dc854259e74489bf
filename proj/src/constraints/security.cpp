#include "freqsec/constraints/security.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "freqsec/util/csv.hpp"

namespace freqsec::constraints {

using regression::ModelKind;
using regression::RegressionModel;
using json = nlohmann::json;

void SecurityParams::validate() const {
    auto fail = [](const std::string& what) {
        throw std::invalid_argument("SecurityParams: " + what);
    };
    if (!(rocof_max > 0.0)) fail("rocof_max must be > 0");
    if (!(df_max > df_ss_max && df_ss_max > 0.0)) fail("require df_max > df_ss_max > 0");
    if (!(f0 > 0.0)) fail("f0 must be > 0");
    if (!(p_loss >= 0.0)) fail("p_loss must be >= 0");
    if (faulted_region != 1 && faulted_region != 2) fail("faulted_region must be 1 or 2");
    if (!(h_loss >= 0.0)) fail("h_loss must be >= 0");
}

namespace {

void check_model(const RegressionModel& model, ModelKind expected, int region,
                 const SecurityParams& params, const char* where) {
    if (model.kind != expected)
        throw std::invalid_argument(std::string(where) + ": model kind mismatch (got " +
                                    regression::kind_name(model.kind) + ", expected " +
                                    regression::kind_name(expected) + ")");
    if (model.region != 0 && model.region != region)
        throw std::invalid_argument(std::string(where) + ": model trained for region " +
                                    std::to_string(model.region) + ", requested region " +
                                    std::to_string(region));
    if (model.faulted_region != 0 && model.faulted_region != params.faulted_region)
        throw std::invalid_argument(std::string(where) +
                                    ": model trained for a different fault location");
    if (model.theta.size() != 8)
        throw std::invalid_argument(std::string(where) + ": model must have 8 coefficients");
}

}  // namespace

ConstraintRow rocof_row(const RegressionModel& model, const SecurityParams& params, double dpd1,
                        double dpd2, int region) {
    params.validate();
    check_model(model, ModelKind::Rocof, region, params, "rocof_row");
    const auto& m = model.theta;
    ConstraintRow row;
    row.name = region == 1 ? "rocof_r1" : "rocof_r2";
    row.coeff_h1 = 2.0 * params.rocof_max - m[0];
    row.coeff_h2 = 2.0 * params.rocof_max - m[1];
    row.coeff_r1 = -m[5];
    row.coeff_r2 = -m[6];
    row.rhs = (params.f0 + m[2]) * params.p_loss + m[3] * dpd1 + m[4] * dpd2 + m[7];
    return row;
}

ConstraintRow nadir_row(const RegressionModel& model, const SecurityParams& params, double dpd1,
                        double dpd2, int region) {
    params.validate();
    check_model(model, ModelKind::NadirDirect, region, params, "nadir_row");
    const auto& m = model.theta;
    ConstraintRow row;
    row.name = region == 1 ? "nadir_r1" : "nadir_r2";
    row.coeff_h1 = -m[0];
    row.coeff_h2 = -m[1];
    row.coeff_r1 = -m[5];
    row.coeff_r2 = -m[6];
    row.rhs = m[2] * params.p_loss + m[3] * dpd1 + m[4] * dpd2 + m[7] - params.df_max;
    return row;
}

ConstraintRow qss_row(const SecurityParams& params, double dpd_total) {
    params.validate();
    ConstraintRow row;
    row.name = "qss";
    row.coeff_r1 = 1.0;
    row.coeff_r2 = 1.0;
    row.rhs = params.p_loss - dpd_total * params.df_ss_max;
    return row;
}

ConstraintRow coi_rocof_row(const SecurityParams& params) {
    params.validate();
    ConstraintRow row;
    row.name = "coi_rocof";
    row.coeff_h1 = 1.0;
    row.coeff_h2 = 1.0;
    row.rhs = params.f0 * params.p_loss / (2.0 * params.rocof_max);
    return row;
}

const RegressionModel& SecurityConstraintSet::model(ModelKind kind, int region) const {
    for (const auto& m : models)
        if (m.kind == kind && m.region == region) return m;
    throw std::runtime_error(std::string("constraint pack is missing the ") +
                             regression::kind_name(kind) + " model for region " +
                             std::to_string(region));
}

std::vector<ConstraintRow> SecurityConstraintSet::rows_for_demand(double dpd1,
                                                                  double dpd2) const {
    std::vector<ConstraintRow> out;
    out.push_back(coi_rocof_row(params));
    out.push_back(qss_row(params, dpd1 + dpd2));
    out.push_back(rocof_row(model(ModelKind::Rocof, 1), params, dpd1, dpd2, 1));
    out.push_back(rocof_row(model(ModelKind::Rocof, 2), params, dpd1, dpd2, 2));
    out.push_back(nadir_row(model(ModelKind::NadirDirect, 1), params, dpd1, dpd2, 1));
    out.push_back(nadir_row(model(ModelKind::NadirDirect, 2), params, dpd1, dpd2, 2));
    return out;
}

SecurityConstraintSet build(const std::vector<RegressionModel>& models,
                            const SecurityParams& params, double dpd1, double dpd2) {
    params.validate();
    SecurityConstraintSet pack;
    pack.params = params;
    pack.dpd1_ref = dpd1;
    pack.dpd2_ref = dpd2;

    for (ModelKind kind : {ModelKind::Rocof, ModelKind::NadirDirect}) {
        for (int region : {1, 2}) {
            const RegressionModel* found = nullptr;
            for (const auto& m : models)
                if (m.kind == kind && (m.region == 0 || m.region == region)) {
                    found = &m;
                    break;
                }
            if (!found)
                throw std::invalid_argument(std::string("build: missing ") +
                                            regression::kind_name(kind) + " model for region " +
                                            std::to_string(region));
            RegressionModel copy = *found;
            copy.region = region;
            if (copy.faulted_region == 0) copy.faulted_region = params.faulted_region;
            pack.models.push_back(std::move(copy));
        }
    }
    for (const auto& m : pack.models) {
        if (m.p_loss_max > 0.0 &&
            (params.p_loss < m.p_loss_min - 1e-9 || params.p_loss > m.p_loss_max + 1e-9))
            pack.warnings.push_back("p_loss outside the training range of model " +
                                    std::string(regression::kind_name(m.kind)) + "_r" +
                                    std::to_string(m.region));
        pack.models_used.push_back(
            {std::string(regression::kind_name(m.kind)) + "_r" + std::to_string(m.region),
             regression::model_hash(m)});
    }
    pack.rows = pack.rows_for_demand(dpd1, dpd2);
    return pack;
}

double predicted_regional_rocof(const RegressionModel& model, std::span<const double> features,
                                double f0) {
    if (model.kind != ModelKind::Rocof)
        throw std::invalid_argument("predicted_regional_rocof: model kind mismatch");
    const double h_sum = features[0] + features[1];
    const double p_loss = features[2];
    return (f0 * p_loss + regression::predict(model, features)) / (2.0 * h_sum);
}

double predicted_regional_nadir(const RegressionModel& model, std::span<const double> features) {
    if (model.kind != ModelKind::NadirDirect)
        throw std::invalid_argument("predicted_regional_nadir: model kind mismatch");
    return regression::predict(model, features);
}

std::string pack_to_json(const SecurityConstraintSet& pack) {
    json j;
    j["params"] = {{"rocof_max", pack.params.rocof_max},
                   {"df_max", pack.params.df_max},
                   {"df_ss_max", pack.params.df_ss_max},
                   {"f0", pack.params.f0},
                   {"p_loss", pack.params.p_loss},
                   {"faulted_region", pack.params.faulted_region},
                   {"h_loss", pack.params.h_loss}};
    j["dpd_ref"] = {pack.dpd1_ref, pack.dpd2_ref};
    j["rows"] = json::array();
    for (const auto& r : pack.rows)
        j["rows"].push_back({{"name", r.name},
                             {"coeff_h1", r.coeff_h1},
                             {"coeff_h2", r.coeff_h2},
                             {"coeff_r1", r.coeff_r1},
                             {"coeff_r2", r.coeff_r2},
                             {"rhs", r.rhs}});
    j["models_used"] = json::array();
    for (const auto& m : pack.models_used)
        j["models_used"].push_back({{"id", m.id}, {"hash", m.hash}});
    j["models"] = json::array();
    for (const auto& m : pack.models) j["models"].push_back(json::parse(model_to_json(m)));
    if (!pack.warnings.empty()) j["warnings"] = pack.warnings;
    return j.dump(2) + "\n";
}

SecurityConstraintSet pack_from_json_text(const std::string& text) {
    const json j = json::parse(text);
    SecurityConstraintSet pack;
    const auto& p = j.at("params");
    pack.params.rocof_max = p.at("rocof_max").get<double>();
    pack.params.df_max = p.at("df_max").get<double>();
    pack.params.df_ss_max = p.at("df_ss_max").get<double>();
    pack.params.f0 = p.at("f0").get<double>();
    pack.params.p_loss = p.at("p_loss").get<double>();
    pack.params.faulted_region = p.at("faulted_region").get<int>();
    pack.params.h_loss = p.at("h_loss").get<double>();
    pack.dpd1_ref = j.at("dpd_ref")[0].get<double>();
    pack.dpd2_ref = j.at("dpd_ref")[1].get<double>();
    for (const auto& r : j.at("rows")) {
        ConstraintRow row;
        row.name = r.at("name").get<std::string>();
        row.coeff_h1 = r.at("coeff_h1").get<double>();
        row.coeff_h2 = r.at("coeff_h2").get<double>();
        row.coeff_r1 = r.at("coeff_r1").get<double>();
        row.coeff_r2 = r.at("coeff_r2").get<double>();
        row.rhs = r.at("rhs").get<double>();
        pack.rows.push_back(std::move(row));
    }
    for (const auto& m : j.value("models_used", json::array()))
        pack.models_used.push_back({m.at("id").get<std::string>(), m.at("hash").get<std::string>()});
    for (const auto& m : j.value("models", json::array()))
        pack.models.push_back(regression::model_from_json_text(m.dump()));
    pack.warnings = j.value("warnings", std::vector<std::string>{});
    return pack;
}

void write_pack(const SecurityConstraintSet& pack, const std::string& path) {
    csv::write_file(path, pack_to_json(pack));
}

SecurityConstraintSet read_pack(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open constraint pack '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return pack_from_json_text(buf.str());
}

}  // namespace freqsec::constraints
