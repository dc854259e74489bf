#include "freqsec/regression/conservative.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "freqsec/util/csv.hpp"

namespace freqsec::regression {

using linalg::Mat;
using linalg::Vec;
using json = nlohmann::json;

const char* kind_name(ModelKind k) {
    switch (k) {
        case ModelKind::Rocof: return "rocof";
        case ModelKind::NadirDiff: return "nadir_diff";
        case ModelKind::NadirSelf: return "nadir_self";
        case ModelKind::NadirDirect: return "nadir_direct";
    }
    return "rocof";
}

ModelKind kind_from_name(const std::string& name) {
    if (name == "rocof") return ModelKind::Rocof;
    if (name == "nadir_diff") return ModelKind::NadirDiff;
    if (name == "nadir_self") return ModelKind::NadirSelf;
    if (name == "nadir_direct") return ModelKind::NadirDirect;
    throw std::invalid_argument("unknown model kind '" + name + "'");
}

std::vector<std::string> standard_feature_names() {
    return {"h1", "h2", "p_loss", "dpd1", "dpd2", "r1", "r2", "intercept"};
}

void RegressionProblem::validate() const {
    if (X.rows() == 0 || X.cols() == 0)
        throw std::invalid_argument("RegressionProblem: empty feature matrix");
    if (y.size() != X.rows())
        throw std::invalid_argument("RegressionProblem: label count must match row count");
    for (double v : X.data())
        if (!std::isfinite(v)) throw std::invalid_argument("RegressionProblem: non-finite feature");
    for (double v : y)
        if (!std::isfinite(v)) throw std::invalid_argument("RegressionProblem: non-finite label");
    if (!feature_names.empty() && feature_names.size() != X.cols())
        throw std::invalid_argument("RegressionProblem: feature_names length mismatch");
}

namespace {

constexpr double kFeasTol = 1e-9;  // residual feasibility

// Householder QR of a tall matrix: A = Q R with Q n x p (orthonormal
// columns) and R p x p upper triangular. Near-zero diagonals of R are
// ridged in place and reported so rank deficiency surfaces as a flag.
struct QrResult {
    Mat q;  // n x p
    Mat r;  // p x p
    bool rank_deficient = false;
};

QrResult householder_qr(const Mat& a) {
    const std::size_t n = a.rows();
    const std::size_t p = a.cols();
    Mat work = a;
    std::vector<Vec> reflectors;
    for (std::size_t k = 0; k < p && k < n; ++k) {
        double norm = 0.0;
        for (std::size_t i = k; i < n; ++i) norm += work(i, k) * work(i, k);
        norm = std::sqrt(norm);
        Vec v(n, 0.0);
        if (norm > 0.0) {
            const double alpha = work(k, k) >= 0.0 ? -norm : norm;
            double vnorm2 = 0.0;
            v[k] = work(k, k) - alpha;
            vnorm2 += v[k] * v[k];
            for (std::size_t i = k + 1; i < n; ++i) {
                v[i] = work(i, k);
                vnorm2 += v[i] * v[i];
            }
            if (vnorm2 > 0.0) {
                const double scale = 2.0 / vnorm2;
                for (std::size_t j = k; j < p; ++j) {
                    double dot = 0.0;
                    for (std::size_t i = k; i < n; ++i) dot += v[i] * work(i, j);
                    dot *= scale;
                    for (std::size_t i = k; i < n; ++i) work(i, j) -= dot * v[i];
                }
            }
        }
        reflectors.push_back(std::move(v));
    }

    QrResult out;
    out.r = Mat(p, p, 0.0);
    double rmax = 0.0;
    for (std::size_t i = 0; i < p; ++i)
        for (std::size_t j = i; j < p; ++j) {
            out.r(i, j) = work(i, j);
            rmax = std::max(rmax, std::fabs(work(i, j)));
        }
    for (std::size_t i = 0; i < p; ++i)
        if (std::fabs(out.r(i, i)) < 1e-10 * std::max(1.0, rmax)) {
            out.r(i, i) += (out.r(i, i) >= 0.0 ? 1.0 : -1.0) * 1e-8 * std::max(1.0, rmax);
            out.rank_deficient = true;
        }

    // Q = H_0 ... H_{p-1} applied to the first p identity columns.
    out.q = Mat(n, p, 0.0);
    for (std::size_t j = 0; j < p; ++j) {
        Vec e(n, 0.0);
        e[j] = 1.0;
        for (std::size_t k = reflectors.size(); k-- > 0;) {
            const Vec& v = reflectors[k];
            double vnorm2 = 0.0;
            for (std::size_t i = k; i < n; ++i) vnorm2 += v[i] * v[i];
            if (vnorm2 == 0.0) continue;
            double dot = 0.0;
            for (std::size_t i = k; i < n; ++i) dot += v[i] * e[i];
            dot *= 2.0 / vnorm2;
            for (std::size_t i = k; i < n; ++i) e[i] -= dot * v[i];
        }
        for (std::size_t i = 0; i < n; ++i) out.q(i, j) = e[i];
    }
    return out;
}

// Lawson-Hanson non-negative least squares: min ||E u - f|| with u >= 0.
// Finite termination; passive sets stay tiny because E has few rows.
Vec nnls(const Mat& e, const Vec& f, double tol) {
    const std::size_t rows = e.rows();
    const std::size_t cols = e.cols();
    Vec u(cols, 0.0);
    std::vector<bool> passive(cols, false);
    Vec residual = f;  // f - E u with u = 0

    auto solve_passive = [&](Vec& z) {
        std::vector<std::size_t> idx;
        for (std::size_t j = 0; j < cols; ++j)
            if (passive[j]) idx.push_back(j);
        const std::size_t k = idx.size();
        Mat gram(k, k, 0.0);
        Vec rhs(k, 0.0);
        for (std::size_t a = 0; a < k; ++a) {
            for (std::size_t b = a; b < k; ++b) {
                double s = 0.0;
                for (std::size_t i = 0; i < rows; ++i) s += e(i, idx[a]) * e(i, idx[b]);
                gram(a, b) = s;
                gram(b, a) = s;
            }
            double s = 0.0;
            for (std::size_t i = 0; i < rows; ++i) s += e(i, idx[a]) * f[i];
            rhs[a] = s;
        }
        double tr = 0.0;
        for (std::size_t a = 0; a < k; ++a) tr += gram(a, a);
        for (std::size_t a = 0; a < k; ++a) gram(a, a) += 1e-14 * std::max(1.0, tr);
        Vec sol;
        if (!linalg::lu_solve(gram, rhs, sol)) return false;
        z.assign(cols, 0.0);
        for (std::size_t a = 0; a < k; ++a) z[idx[a]] = sol[a];
        return true;
    };

    const long cap = 30 * static_cast<long>(cols) + 200;
    for (long iter = 0; iter < cap; ++iter) {
        // dual: w = E^T residual
        double best_w = tol;
        std::size_t enter = cols;
        for (std::size_t j = 0; j < cols; ++j) {
            if (passive[j]) continue;
            double w = 0.0;
            for (std::size_t i = 0; i < rows; ++i) w += e(i, j) * residual[i];
            if (w > best_w) {
                best_w = w;
                enter = j;
            }
        }
        if (enter == cols) return u;  // optimal
        passive[enter] = true;

        Vec z;
        while (true) {
            if (!solve_passive(z)) {
                passive[enter] = false;
                return u;
            }
            bool all_positive = true;
            double alpha = 1.0;
            for (std::size_t j = 0; j < cols; ++j) {
                if (!passive[j] || z[j] > tol) continue;
                all_positive = false;
                if (u[j] - z[j] > 0.0) alpha = std::min(alpha, u[j] / (u[j] - z[j]));
            }
            if (all_positive) {
                u = z;
                break;
            }
            for (std::size_t j = 0; j < cols; ++j)
                if (passive[j]) u[j] += alpha * (z[j] - u[j]);
            for (std::size_t j = 0; j < cols; ++j)
                if (passive[j] && u[j] <= tol) {
                    passive[j] = false;
                    u[j] = 0.0;
                }
        }
        residual = f;
        for (std::size_t j = 0; j < cols; ++j) {
            if (u[j] == 0.0) continue;
            for (std::size_t i = 0; i < rows; ++i) residual[i] -= e(i, j) * u[j];
        }
    }
    throw std::runtime_error("solve_conservative_ls: NNLS iteration cap exceeded");
}

}  // namespace

RegressionModel solve_conservative_ls(const RegressionProblem& prob, ModelKind kind) {
    prob.validate();
    const std::size_t n = prob.X.rows();
    const std::size_t p = prob.X.cols();

    RegressionModel model;
    model.kind = kind;
    model.feature_names =
        prob.feature_names.empty() ? std::vector<std::string>() : prob.feature_names;
    if (n < p)
        model.warnings.push_back("fewer samples than features; fit is underdetermined");

    // Column equilibration keeps the transformed problem well conditioned
    // when features mix MW*s magnitudes with unit intercepts.
    Vec col_scale(p, 1.0);
    Mat xs = prob.X;
    for (std::size_t j = 0; j < p; ++j) {
        double m = 0.0;
        for (std::size_t i = 0; i < n; ++i) m = std::max(m, std::fabs(prob.X(i, j)));
        if (m == 0.0) {
            model.warnings.push_back("all-zero feature column " + std::to_string(j));
            m = 1.0;
        }
        col_scale[j] = m;
        for (std::size_t i = 0; i < n; ++i) xs(i, j) = prob.X(i, j) / m;
    }

    for (std::size_t i = 0; i < n; ++i) {
        bool all_zero = true;
        for (std::size_t j = 0; j < p; ++j)
            if (xs(i, j) != 0.0) { all_zero = false; break; }
        if (all_zero && prob.y[i] > 0.0)
            throw std::runtime_error(
                "solve_conservative_ls: infeasible problem (all-zero row with positive label)");
    }

    // Reduce the inequality-constrained least squares to least distance
    // programming: with X = Q R, substituting z = R theta - Q^T y turns the
    // objective into ||z|| and the constraints into Q z >= y - Q Q^T y.
    const QrResult qr = householder_qr(xs);
    bool rank_deficient = qr.rank_deficient;

    Vec qty(p, 0.0);
    for (std::size_t j = 0; j < p; ++j)
        for (std::size_t i = 0; i < n; ++i) qty[j] += qr.q(i, j) * prob.y[i];
    Vec b(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        double proj = 0.0;
        for (std::size_t j = 0; j < p; ++j) proj += qr.q(i, j) * qty[j];
        b[i] = prob.y[i] - proj;
    }

    // Least distance programming via NNLS on E = [Q^T; b^T], f = e_{p+1}.
    Mat e(p + 1, n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < p; ++j) e(j, i) = qr.q(i, j);
        e(p, i) = b[i];
    }
    Vec f(p + 1, 0.0);
    f[p] = 1.0;
    const Vec u = nnls(e, f, 1e-12);
    Vec ldp_residual = f;
    for (std::size_t i = 0; i < n; ++i) {
        if (u[i] == 0.0) continue;
        for (std::size_t j = 0; j <= p; ++j) ldp_residual[j] -= e(j, i) * u[i];
    }
    if (std::fabs(ldp_residual[p]) < 1e-12)
        throw std::runtime_error("solve_conservative_ls: infeasible constraint system");
    Vec z(p, 0.0);
    for (std::size_t j = 0; j < p; ++j) z[j] = -ldp_residual[j] / ldp_residual[p];

    // Back-substitute theta from R theta = z + Q^T y.
    Vec theta(p, 0.0);
    for (std::size_t jk = p; jk-- > 0;) {
        double s = z[jk] + qty[jk];
        for (std::size_t j2 = jk + 1; j2 < p; ++j2) s -= qr.r(jk, j2) * theta[j2];
        theta[jk] = s / qr.r(jk, jk);
    }

    model.rank_deficient = rank_deficient;
    model.theta.assign(p, 0.0);
    for (std::size_t j = 0; j < p; ++j) model.theta[j] = theta[j] / col_scale[j];

    // Exact feasibility polish: raise along a uniformly positive column when
    // numerical round-off leaves a residual slightly negative.
    Vec residual = linalg::mat_vec(prob.X, model.theta);
    for (std::size_t i = 0; i < n; ++i) residual[i] -= prob.y[i];
    double min_res = *std::min_element(residual.begin(), residual.end());
    if (min_res < 0.0) {
        int lift_col = -1;
        double lift_min = 0.0;
        for (std::size_t j = 0; j < p && lift_col < 0; ++j) {
            double lo = std::numeric_limits<double>::infinity();
            for (std::size_t i = 0; i < n; ++i) lo = std::min(lo, prob.X(i, j));
            if (lo > 1e-12) {
                lift_col = static_cast<int>(j);
                lift_min = lo;
            }
        }
        if (lift_col >= 0) {
            model.theta[static_cast<std::size_t>(lift_col)] += (-min_res) / lift_min * (1.0 + 1e-12);
            residual = linalg::mat_vec(prob.X, model.theta);
            for (std::size_t i = 0; i < n; ++i) residual[i] -= prob.y[i];
            min_res = *std::min_element(residual.begin(), residual.end());
        }
        if (min_res < -kFeasTol)
            throw std::runtime_error("solve_conservative_ls: feasibility polish failed");
    }

    double sum = 0.0, mx = -std::numeric_limits<double>::infinity();
    for (double r : residual) {
        sum += r;
        mx = std::max(mx, r);
    }
    model.training_stats.mean_overestimation = sum / static_cast<double>(n);
    model.training_stats.max_overestimation = mx;
    model.training_stats.min_overestimation = min_res;
    return model;
}

double predict(const RegressionModel& model, std::span<const double> features) {
    if (features.size() != model.theta.size())
        throw std::invalid_argument("predict: feature vector length mismatch");
    double s = 0.0;
    for (std::size_t j = 0; j < features.size(); ++j) s += model.theta[j] * features[j];
    return s;
}

std::string model_hash(const RegressionModel& model) {
    std::ostringstream canon;
    canon << kind_name(model.kind) << '|' << model.region << '|' << model.faulted_region;
    for (double t : model.theta) canon << '|' << csv::format_double(t);
    const std::string s = canon.str();
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    std::ostringstream hex;
    hex << std::hex << h;
    return hex.str();
}

std::string model_to_json(const RegressionModel& model) {
    json j;
    j["kind"] = kind_name(model.kind);
    j["theta"] = model.theta;
    j["feature_names"] = model.feature_names;
    j["training_stats"] = {{"mean_overestimation", model.training_stats.mean_overestimation},
                           {"max_overestimation", model.training_stats.max_overestimation},
                           {"min_overestimation", model.training_stats.min_overestimation}};
    if (model.region != 0) j["region"] = model.region;
    if (model.faulted_region != 0) j["faulted_region"] = model.faulted_region;
    if (model.p_loss_max > 0.0) j["p_loss_range"] = {model.p_loss_min, model.p_loss_max};
    j["rank_deficient"] = model.rank_deficient;
    if (!model.warnings.empty()) j["warnings"] = model.warnings;
    return j.dump(2) + "\n";
}

RegressionModel model_from_json_text(const std::string& text) {
    const json j = json::parse(text);
    RegressionModel m;
    m.kind = kind_from_name(j.at("kind").get<std::string>());
    m.theta = j.at("theta").get<Vec>();
    m.feature_names = j.value("feature_names", std::vector<std::string>{});
    const auto& ts = j.at("training_stats");
    m.training_stats.mean_overestimation = ts.at("mean_overestimation").get<double>();
    m.training_stats.max_overestimation = ts.at("max_overestimation").get<double>();
    m.training_stats.min_overestimation = ts.at("min_overestimation").get<double>();
    m.region = j.value("region", 0);
    m.faulted_region = j.value("faulted_region", 0);
    if (j.contains("p_loss_range")) {
        m.p_loss_min = j["p_loss_range"][0].get<double>();
        m.p_loss_max = j["p_loss_range"][1].get<double>();
    }
    m.rank_deficient = j.value("rank_deficient", false);
    m.warnings = j.value("warnings", std::vector<std::string>{});
    return m;
}

void write_model(const RegressionModel& model, const std::string& path) {
    csv::write_file(path, model_to_json(model));
}

RegressionModel read_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open model '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return model_from_json_text(buf.str());
}

}  // namespace freqsec::regression
