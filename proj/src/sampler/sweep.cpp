#include "freqsec/sampler/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "freqsec/dynamics/simulate.hpp"
#include "freqsec/util/csv.hpp"

namespace freqsec::sampler {

using dynamics::LaneResult;
using dynamics::OperatingPoint;
using dynamics::SimParams;
using dynamics::TraceStats;
using json = nlohmann::json;

const char* target_name(SweepTarget t) { return t == SweepTarget::Rocof ? "rocof" : "nadir"; }

SweepTarget target_from_name(const std::string& name) {
    if (name == "rocof") return SweepTarget::Rocof;
    if (name == "nadir") return SweepTarget::Nadir;
    throw std::invalid_argument("unknown sweep target '" + name + "'");
}

void SweepSpec::validate() const {
    auto fail = [](const std::string& what) { throw std::invalid_argument("SweepSpec: " + what); };
    if (p_loss_values.empty()) fail("p_loss_values must be non-empty");
    for (double p : p_loss_values)
        if (!(p > 0.0)) fail("p_loss values must be > 0");
    if (faulted_region != 1 && faulted_region != 2) fail("faulted_region must be 1 or 2");
    auto check_splits = [&](const std::vector<double>& s, const char* name, bool open) {
        if (s.empty()) fail(std::string(name) + " must be non-empty");
        for (double v : s) {
            if (!(v >= 0.0 && v <= 1.0)) fail(std::string(name) + " must lie in [0, 1]");
            if (open && (v <= 0.0 || v >= 1.0))
                fail(std::string(name) + " must lie strictly inside (0, 1)");
        }
    };
    // Inertia and demand must stay positive in both regions.
    check_splits(d_splits, "d_splits", true);
    check_splits(r_splits, "r_splits", false);
    check_splits(h_splits, "h_splits", true);
    if (h_total_factors.empty()) fail("h_total_factors must be non-empty");
    for (double f : h_total_factors)
        if (!(f >= 1.0)) fail("h_total_factors must be >= 1");
    if (r_total_factors.empty()) fail("r_total_factors must be non-empty");
    for (double f : r_total_factors)
        if (!(f > 0.0)) fail("r_total_factors must be > 0");
    if (!(pd_total > 0.0)) fail("pd_total must be > 0");
    if (!(d_total >= 0.0 && d_total <= 0.2)) fail("d_total must be in [0, 0.2]");
    if (!(rocof_max > 0.0)) fail("rocof_max must be > 0");
    if (!(df_max > df_ss_max && df_ss_max > 0.0)) fail("require df_max > df_ss_max > 0");
    if (!(boundary_tol > 0.0)) fail("boundary_tol must be > 0");
    if (!(walk_increment > 0.0)) fail("walk_increment must be > 0");
    if (!(f0 > 0.0) || !(v1 > 0.0) || !(v2 > 0.0) || !(x12 > 0.0)) fail("bad system constants");
    if (!(t_del > 0.0)) fail("t_del must be > 0");
    for (const auto& a : anchor_scales)
        if (!(a[0] > 0.0) || !(a[1] >= 0.0)) fail("anchor scales must be positive");
}

std::size_t SweepSpec::grid_size() const {
    return p_loss_values.size() * h_total_factors.size() * r_total_factors.size() *
           d_splits.size() * r_splits.size() * h_splits.size();
}

namespace {

double quasi_steady_state_floor(double p_loss, double dpd_total, double df_ss_max) {
    return p_loss - dpd_total * df_ss_max;
}

OperatingPoint build_point(double p_loss, const SweepSpec& spec, const GridChoice& g,
                           double h_total, double r_total) {
    OperatingPoint p;
    p.h1 = g.h_split * h_total;
    p.h2 = (1.0 - g.h_split) * h_total;
    p.r1 = g.r_split * r_total;
    p.r2 = (1.0 - g.r_split) * r_total;
    p.p_loss = p_loss;
    p.faulted_region = spec.faulted_region;
    p.pd1 = g.d_split * spec.pd_total;
    p.pd2 = (1.0 - g.d_split) * spec.pd_total;
    p.d1 = spec.d_total;
    p.d2 = spec.d_total;
    p.v1 = spec.v1;
    p.v2 = spec.v2;
    p.x12 = spec.x12;
    p.f0 = spec.f0;
    p.validate();
    return p;
}

double binding_metric(SweepTarget target, const TraceStats& s) {
    return target == SweepTarget::Rocof ? std::max(s.max_rocof_1, s.max_rocof_2)
                                        : std::max(s.nadir_1, s.nadir_2);
}

// One grid point's walk as an explicit state machine so many walks can be
// advanced in lockstep through the batched kernel.
class BoundaryWalker {
public:
    BoundaryWalker(OperatingPoint start, const SweepSpec& spec)
        : spec_(&spec),
          limit_(spec.target == SweepTarget::Rocof ? spec.rocof_max : spec.df_max),
          tol_(spec.boundary_tol),
          increment_(spec.walk_increment),
          candidate_(start) {
        h_split_ = start.h1 / (start.h1 + start.h2);
        r_total_ = start.r1 + start.r2;
        r_split_ = r_total_ > 0.0 ? start.r1 / r_total_ : 0.5;
        walked_ = spec.target == SweepTarget::Rocof ? start.h1 + start.h2 : r_total_;
        const double dpd_total = start.d1 * start.pd1 + start.d2 * start.pd2;
        floor_ = spec.target == SweepTarget::Rocof
                     ? 2.0
                     : std::max(0.0, quasi_steady_state_floor(start.p_loss, dpd_total,
                                                              spec.df_ss_max));
    }

    bool finished() const { return mode_ == Mode::Done || mode_ == Mode::Failed; }
    bool failed() const { return mode_ == Mode::Failed; }
    const std::string& failure() const { return failure_; }
    const OperatingPoint& candidate() const { return candidate_; }
    const OperatingPoint& result_point() const { return result_point_; }
    const TraceStats& result_stats() const { return result_stats_; }
    const std::vector<double>& metric_history() const { return history_; }
    int evaluations() const { return evaluations_; }

    void consume(const LaneResult& lane) {
        if (finished()) return;
        if (!lane.ok) {
            fail(lane.error);
            return;
        }
        ++evaluations_;
        const double metric = binding_metric(spec_->target, lane.stats);
        history_.push_back(metric);
        if (evaluations_ > kMaxEvaluations) {
            fail("iteration cap exceeded; last metric = " + std::to_string(metric));
            return;
        }
        switch (mode_) {
            case Mode::Initial: on_initial(metric, lane.stats); break;
            case Mode::CoarseUp: on_coarse_up(metric, lane.stats); break;
            case Mode::CoarseDown: on_coarse_down(metric, lane.stats); break;
            case Mode::Bisect: on_bisect(metric, lane.stats); break;
            default: break;
        }
    }

private:
    enum class Mode { Initial, CoarseUp, CoarseDown, Bisect, Done, Failed };
    static constexpr int kMaxEvaluations = 10000;

    void fail(const std::string& why) {
        mode_ = Mode::Failed;
        failure_ = why;
    }

    void done(const OperatingPoint& p, const TraceStats& s) {
        result_point_ = p;
        result_stats_ = s;
        mode_ = Mode::Done;
    }

    void move_to(double value) {
        walked_ = value;
        const bool rocof = spec_->target == SweepTarget::Rocof;
        OperatingPoint p = candidate_;
        if (rocof) {
            p.h1 = h_split_ * value;
            p.h2 = (1.0 - h_split_) * value;
        } else {
            p.r1 = r_split_ * value;
            p.r2 = (1.0 - r_split_) * value;
        }
        candidate_ = p;
    }

    void on_initial(double metric, const TraceStats& stats) {
        if (metric > limit_) {
            mode_ = Mode::CoarseUp;
            lo_ = walked_;
            move_to(walked_ + increment_);
        } else if (metric >= limit_ - tol_) {
            done(candidate_, stats);
        } else {
            mode_ = Mode::CoarseDown;
            ok_value_ = walked_;
            ok_point_ = candidate_;
            ok_stats_ = stats;
            step_down();
        }
    }

    void on_coarse_up(double metric, const TraceStats& stats) {
        if (metric > limit_) {
            lo_ = walked_;
            move_to(walked_ + increment_);
        } else if (metric >= limit_ - tol_) {
            done(candidate_, stats);
        } else {
            hi_ = walked_;
            ok_point_ = candidate_;
            ok_stats_ = stats;
            mode_ = Mode::Bisect;
            move_to(0.5 * (lo_ + hi_));
        }
    }

    void on_coarse_down(double metric, const TraceStats& stats) {
        if (metric > limit_) {
            lo_ = walked_;
            hi_ = ok_value_;
            mode_ = Mode::Bisect;
            move_to(0.5 * (lo_ + hi_));
        } else if (metric >= limit_ - tol_) {
            done(candidate_, stats);
        } else {
            if (at_floor_) {
                fail("boundary unreachable: metric still inside the limit at the walk floor");
                return;
            }
            ok_value_ = walked_;
            ok_point_ = candidate_;
            ok_stats_ = stats;
            step_down();
        }
    }

    void step_down() {
        double next = walked_ - increment_;
        if (next <= floor_) {
            next = floor_;
            at_floor_ = true;
        }
        if (next <= 0.0) {
            fail("boundary unreachable: walked quantity would be non-positive");
            return;
        }
        move_to(next);
    }

    void on_bisect(double metric, const TraceStats& stats) {
        if (metric > limit_) {
            lo_ = walked_;
        } else {
            hi_ = walked_;
            ok_point_ = candidate_;
            ok_stats_ = stats;
            if (metric >= limit_ - tol_) {
                done(ok_point_, ok_stats_);
                return;
            }
        }
        if (hi_ - lo_ <= 1e-12 * std::max(1.0, hi_)) {
            fail("bisection stalled before reaching boundary_tol");
            return;
        }
        move_to(0.5 * (lo_ + hi_));
    }

    const SweepSpec* spec_;
    double limit_;
    double tol_;
    double increment_;
    OperatingPoint candidate_;
    double h_split_ = 0.5;
    double r_split_ = 0.5;
    double r_total_ = 0.0;
    double walked_ = 0.0;
    double floor_ = 0.0;
    bool at_floor_ = false;
    double lo_ = 0.0;
    double hi_ = 0.0;
    double ok_value_ = 0.0;
    OperatingPoint ok_point_;
    TraceStats ok_stats_;
    OperatingPoint result_point_;
    TraceStats result_stats_;
    Mode mode_ = Mode::Initial;
    std::string failure_;
    std::vector<double> history_;
    int evaluations_ = 0;
};

// Advances all unfinished walkers by one evaluation using the batch kernel.
void advance_wave(std::vector<BoundaryWalker*>& active, const SimParams& params,
                  dynamics::Backend backend) {
    std::vector<OperatingPoint> pts;
    pts.reserve(active.size());
    for (auto* w : active) pts.push_back(w->candidate());
    const auto results = dynamics::simulate_stats(pts, params, backend);
    for (std::size_t i = 0; i < active.size(); ++i) active[i]->consume(results[i]);
    std::erase_if(active, [](BoundaryWalker* w) { return w->finished(); });
}

}  // namespace

OperatingPoint initial_point(double p_loss, const SweepSpec& spec, const GridChoice& g) {
    spec.validate();
    if (std::find(spec.p_loss_values.begin(), spec.p_loss_values.end(), p_loss) ==
        spec.p_loss_values.end())
        throw std::invalid_argument("initial_point: p_loss is not in spec.p_loss_values");
    const double h_total = p_loss * spec.f0 / (2.0 * spec.rocof_max) * g.h_factor;
    const double kstar =
        dynamics::coi_nadir_threshold(p_loss, spec.f0, spec.t_del, spec.df_max);
    double r_total = g.r_factor * kstar / h_total;
    const double floor =
        quasi_steady_state_floor(p_loss, spec.d_total * spec.pd_total, spec.df_ss_max);
    if (r_total < floor) r_total = floor;
    if (!(r_total > 0.0))
        throw std::runtime_error("initial_point: degenerate sweep parameters (r_total <= 0)");
    return build_point(p_loss, spec, g, h_total, r_total);
}

OperatingPoint initial_point(double p_loss, const SweepSpec& spec) {
    GridChoice g;
    g.d_split = spec.d_splits.front();
    g.r_split = spec.r_splits.front();
    g.h_split = spec.h_splits.front();
    g.h_factor = spec.h_total_factors.front();
    g.r_factor = spec.r_total_factors.front();
    return initial_point(p_loss, spec, g);
}

WalkResult walk_to_boundary(const OperatingPoint& point, const SweepSpec& spec,
                            const SimParams& params, dynamics::Backend backend) {
    spec.validate();
    params.validate();
    BoundaryWalker walker(point, spec);
    while (!walker.finished()) {
        const auto lane = dynamics::simulate_stats_one(walker.candidate(), params, backend);
        walker.consume(lane);
    }
    if (walker.failed()) throw std::runtime_error("walk_to_boundary: " + walker.failure());
    WalkResult r;
    r.point = walker.result_point();
    r.stats = walker.result_stats();
    r.metric_history = walker.metric_history();
    r.evaluations = walker.evaluations();
    return r;
}

SampleSet run_sweep(const SweepSpec& spec, const SimParams& params, dynamics::Backend backend) {
    spec.validate();
    params.validate();
    if (std::fabs(params.t_del - spec.t_del) > 1e-12)
        throw std::invalid_argument("run_sweep: spec.t_del must match params.t_del");

    SampleSet set;
    set.spec = spec;
    set.params = params;

    struct GridEntry {
        std::size_t index;
        double p_loss;
        GridChoice choice;
        std::string description;
    };
    std::vector<GridEntry> grid;
    std::size_t index = 0;
    for (double p_loss : spec.p_loss_values)
        for (double h_factor : spec.h_total_factors)
            for (double r_factor : spec.r_total_factors)
                for (double d_split : spec.d_splits)
                    for (double r_split : spec.r_splits)
                        for (double h_split : spec.h_splits) {
                            GridEntry e;
                            e.index = index++;
                            e.p_loss = p_loss;
                            e.choice = GridChoice{d_split, r_split, h_split, h_factor, r_factor};
                            std::ostringstream d;
                            d << "p_loss=" << p_loss << " h_factor=" << h_factor
                              << " r_factor=" << r_factor << " d_split=" << d_split
                              << " r_split=" << r_split << " h_split=" << h_split;
                            e.description = d.str();
                            grid.push_back(std::move(e));
                        }

    std::vector<BoundaryWalker> walkers;
    walkers.reserve(grid.size());
    std::vector<std::size_t> walker_grid;  // grid index per walker
    for (const auto& e : grid) {
        try {
            walkers.emplace_back(initial_point(e.p_loss, spec, e.choice), set.spec);
            walker_grid.push_back(e.index);
        } catch (const std::exception& ex) {
            set.failures.push_back({e.index, e.description, ex.what()});
        }
    }

    std::vector<BoundaryWalker*> active;
    for (auto& w : walkers) active.push_back(&w);
    while (!active.empty()) advance_wave(active, params, backend);

    auto emit_samples = [&](std::vector<Sample>& into, const OperatingPoint& p,
                            const TraceStats& s) {
        for (int region = 1; region <= 2; ++region) {
            Sample smp;
            smp.features = {p.h1, p.h2, p.p_loss, p.d1 * p.pd1, p.d2 * p.pd2,
                            p.r1, p.r2, 1.0};
            if (spec.target == SweepTarget::Rocof)
                smp.label = std::max(0.0, region == 1 ? s.osc_label_1 : s.osc_label_2);
            else
                smp.label = region == 1 ? s.nadir_1 : s.nadir_2;
            smp.region = region;
            smp.integral_diff = s.integral_diff;
            smp.integral_self = region == 1 ? s.integral_self_1 : s.integral_self_2;
            smp.point = p;
            into.push_back(std::move(smp));
        }
    };

    std::vector<OperatingPoint> anchor_points;
    for (std::size_t i = 0; i < walkers.size(); ++i) {
        const auto& w = walkers[i];
        const auto& e = grid[walker_grid[i]];
        if (w.failed()) {
            set.failures.push_back({e.index, e.description, w.failure()});
            continue;
        }
        const OperatingPoint& p = w.result_point();
        emit_samples(set.samples, p, w.result_stats());
        for (const auto& scale : spec.anchor_scales) {
            OperatingPoint q = p;
            q.h1 *= scale[0];
            q.h2 *= scale[0];
            q.r1 *= scale[1];
            q.r2 *= scale[1];
            anchor_points.push_back(q);
        }
    }
    if (!anchor_points.empty()) {
        const auto results = dynamics::simulate_stats(anchor_points, params, backend);
        for (std::size_t i = 0; i < anchor_points.size(); ++i)
            if (results[i].ok) emit_samples(set.anchor_samples, anchor_points[i], results[i].stats);
    }
    std::sort(set.failures.begin(), set.failures.end(),
              [](const SweepFailure& a, const SweepFailure& b) {
                  return a.grid_index < b.grid_index;
              });
    return set;
}

std::string samples_to_csv(const SampleSet& set) {
    std::ostringstream out;
    out << "region,h1,h2,p_loss,dpd1,dpd2,r1,r2,label\n";
    for (const auto& s : set.samples) {
        out << s.region;
        for (int j = 0; j < 7; ++j) out << ',' << csv::format_double(s.features[j]);
        out << ',' << csv::format_double(s.label) << '\n';
    }
    return out.str();
}

std::string integrals_to_csv(const SampleSet& set) {
    std::ostringstream out;
    out << "region,h1,h2,p_loss,dpd1,dpd2,r1,r2,integral_diff,integral_self\n";
    for (const auto& s : set.samples) {
        out << s.region;
        for (int j = 0; j < 7; ++j) out << ',' << csv::format_double(s.features[j]);
        out << ',' << csv::format_double(s.integral_diff) << ','
            << csv::format_double(s.integral_self) << '\n';
    }
    return out.str();
}

namespace {

json spec_to_json(const SweepSpec& s) {
    return json{{"target", target_name(s.target)},
                {"p_loss_values", s.p_loss_values},
                {"faulted_region", s.faulted_region},
                {"d_splits", s.d_splits},
                {"r_splits", s.r_splits},
                {"h_splits", s.h_splits},
                {"h_total_factors", s.h_total_factors},
                {"r_total_factors", s.r_total_factors},
                {"pd_total", s.pd_total},
                {"d_total", s.d_total},
                {"rocof_max", s.rocof_max},
                {"df_max", s.df_max},
                {"df_ss_max", s.df_ss_max},
                {"boundary_tol", s.boundary_tol},
                {"walk_increment", s.walk_increment},
                {"f0", s.f0},
                {"v1", s.v1},
                {"v2", s.v2},
                {"x12", s.x12},
                {"t_del", s.t_del},
                {"anchor_scales", s.anchor_scales}};
}

SweepSpec spec_from_json(const json& j) {
    SweepSpec s;
    s.target = target_from_name(j.at("target").get<std::string>());
    s.p_loss_values = j.at("p_loss_values").get<std::vector<double>>();
    s.faulted_region = j.at("faulted_region").get<int>();
    s.d_splits = j.at("d_splits").get<std::vector<double>>();
    s.r_splits = j.at("r_splits").get<std::vector<double>>();
    s.h_splits = j.at("h_splits").get<std::vector<double>>();
    s.h_total_factors = j.value("h_total_factors", std::vector<double>{1.0});
    s.r_total_factors = j.value("r_total_factors", std::vector<double>{1.0});
    s.pd_total = j.at("pd_total").get<double>();
    s.d_total = j.at("d_total").get<double>();
    s.rocof_max = j.at("rocof_max").get<double>();
    s.df_max = j.at("df_max").get<double>();
    s.df_ss_max = j.at("df_ss_max").get<double>();
    s.boundary_tol = j.at("boundary_tol").get<double>();
    s.walk_increment = j.at("walk_increment").get<double>();
    s.f0 = j.value("f0", 50.0);
    s.v1 = j.value("v1", 400.0);
    s.v2 = j.value("v2", 400.0);
    s.x12 = j.value("x12", 50.0);
    s.t_del = j.value("t_del", 10.0);
    s.anchor_scales = j.value("anchor_scales", std::vector<std::array<double, 2>>{});
    return s;
}

}  // namespace

std::string sidecar_to_json(const SampleSet& set) {
    json j;
    j["spec"] = spec_to_json(set.spec);
    j["sim"] = {{"dt", set.params.dt}, {"horizon", set.params.horizon},
                {"t_del", set.params.t_del}};
    j["sample_count"] = set.samples.size();
    j["anchor_sample_count"] = set.anchor_samples.size();
    j["failures"] = json::array();
    for (const auto& f : set.failures)
        j["failures"].push_back(
            {{"grid_index", f.grid_index}, {"description", f.description}, {"message", f.message}});
    return j.dump(2) + "\n";
}

namespace {

std::string samples_csv_rows(const std::vector<Sample>& samples) {
    std::ostringstream out;
    out << "region,h1,h2,p_loss,dpd1,dpd2,r1,r2,label\n";
    for (const auto& s : samples) {
        out << s.region;
        for (int j = 0; j < 7; ++j) out << ',' << csv::format_double(s.features[j]);
        out << ',' << csv::format_double(s.label) << '\n';
    }
    return out.str();
}

}  // namespace

void write_sample_set(const SampleSet& set, const std::string& csv_path,
                      const std::string& sidecar_path, const std::string& integrals_path,
                      const std::string& anchors_path) {
    csv::write_file(csv_path, samples_to_csv(set));
    csv::write_file(sidecar_path, sidecar_to_json(set));
    if (!integrals_path.empty()) csv::write_file(integrals_path, integrals_to_csv(set));
    if (!anchors_path.empty()) csv::write_file(anchors_path, samples_csv_rows(set.anchor_samples));
}

SampleSet read_sample_set(const std::string& csv_path, const std::string& sidecar_path,
                          const std::string& anchors_path) {
    SampleSet set;
    {
        std::ifstream in(sidecar_path);
        if (!in) throw std::runtime_error("cannot open sidecar '" + sidecar_path + "'");
        json j = json::parse(in);
        set.spec = spec_from_json(j.at("spec"));
        set.params.dt = j.at("sim").at("dt").get<double>();
        set.params.horizon = j.at("sim").at("horizon").get<double>();
        set.params.t_del = j.at("sim").at("t_del").get<double>();
        for (const auto& f : j.value("failures", json::array()))
            set.failures.push_back({f.at("grid_index").get<std::size_t>(),
                                    f.at("description").get<std::string>(),
                                    f.at("message").get<std::string>()});
    }
    auto load_rows = [&](const std::string& path, std::vector<Sample>& into) {
    const auto table = csv::read_file(path);
    const std::vector<std::string> expected = {"region", "h1",   "h2", "p_loss", "dpd1",
                                               "dpd2",   "r1",   "r2", "label"};
    if (table.header != expected)
        throw std::runtime_error("sample csv '" + path + "' has an unexpected header");
    for (const auto& row : table.rows) {
        Sample s;
        s.region = static_cast<int>(csv::to_double(row[0]));
        for (int j = 0; j < 7; ++j) s.features[j] = csv::to_double(row[1 + j]);
        s.features[7] = 1.0;
        s.label = csv::to_double(row[8]);
        // Reconstruct the operating point from features and spec constants.
        OperatingPoint p;
        p.h1 = s.features[0];
        p.h2 = s.features[1];
        p.p_loss = s.features[2];
        p.r1 = s.features[5];
        p.r2 = s.features[6];
        p.faulted_region = set.spec.faulted_region;
        p.d1 = p.d2 = set.spec.d_total;
        p.pd1 = set.spec.d_total > 0.0 ? s.features[3] / set.spec.d_total
                                       : set.spec.pd_total / 2.0;
        p.pd2 = set.spec.d_total > 0.0 ? s.features[4] / set.spec.d_total
                                       : set.spec.pd_total / 2.0;
        p.v1 = set.spec.v1;
        p.v2 = set.spec.v2;
        p.x12 = set.spec.x12;
        p.f0 = set.spec.f0;
        s.point = p;
        into.push_back(std::move(s));
    }
    };
    load_rows(csv_path, set.samples);
    if (!anchors_path.empty()) load_rows(anchors_path, set.anchor_samples);
    return set;
}

AuditReport audit_boundary_membership(const SampleSet& set, const SimParams& params,
                                      dynamics::Backend backend) {
    AuditReport report;
    // Samples come in per-region pairs over the same point; audit each
    // distinct operating point once.
    std::vector<OperatingPoint> pts;
    for (std::size_t i = 0; i < set.samples.size(); ++i) {
        if (i > 0 && set.samples[i].region == 2 &&
            set.samples[i].features == set.samples[i - 1].features)
            continue;
        pts.push_back(set.samples[i].point);
    }
    const double limit =
        set.spec.target == SweepTarget::Rocof ? set.spec.rocof_max : set.spec.df_max;
    const auto results = dynamics::simulate_stats(pts, params, backend);
    for (const auto& lane : results) {
        ++report.checked;
        if (!lane.ok) {
            ++report.violations;
            report.all_within = false;
            continue;
        }
        const double metric = binding_metric(set.spec.target, lane.stats);
        if (metric > limit) {
            ++report.violations;
            report.all_within = false;
            report.worst_high = std::max(report.worst_high, metric - limit);
        } else if (metric < limit - set.spec.boundary_tol) {
            ++report.violations;
            report.all_within = false;
            report.worst_low = std::max(report.worst_low, limit - set.spec.boundary_tol - metric);
        }
    }
    return report;
}

}  // namespace freqsec::sampler
