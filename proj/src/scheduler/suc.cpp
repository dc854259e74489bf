#include "freqsec/scheduler/suc.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace freqsec::scheduler {

using constraints::ConstraintRow;
using constraints::SecurityConstraintSet;

const char* frequency_mode_name(FrequencyMode m) {
    switch (m) {
        case FrequencyMode::Off: return "off";
        case FrequencyMode::CoiOnly: return "coi";
        case FrequencyMode::Regional: return "regional";
    }
    return "regional";
}

FrequencyMode frequency_mode_from_name(const std::string& name) {
    if (name == "off" || name == "none") return FrequencyMode::Off;
    if (name == "coi" || name == "uniform") return FrequencyMode::CoiOnly;
    if (name == "regional") return FrequencyMode::Regional;
    throw std::invalid_argument("unknown frequency mode '" + name + "'");
}

RollingState RollingState::cold(const std::vector<GeneratorClass>& classes) {
    RollingState s;
    s.n_up.assign(classes.size(), 0);
    s.pipeline.resize(classes.size());
    s.recent_starts.resize(classes.size());
    s.recent_stops.resize(classes.size());
    for (std::size_t g = 0; g < classes.size(); ++g) {
        const auto& cls = classes[g];
        if (cls.must_run) s.n_up[g] = cls.count;
        const int tau = cls.must_run ? 0 : cls.start_up_time;
        s.pipeline[g].assign(static_cast<std::size_t>(std::max(tau, 0)), 0);
        const int window = std::max(cls.min_up, cls.min_down);
        s.recent_starts[g].assign(static_cast<std::size_t>(window), 0);
        s.recent_stops[g].assign(static_cast<std::size_t>(window), 0);
    }
    return s;
}

namespace {

int node_start(const TreeNode& n) { return static_cast<int>(std::llround(n.start_hour)); }
int node_len(const TreeNode& n) { return static_cast<int>(std::llround(n.dt_hours)); }

// Pipeline arrivals falling inside [t, t + len) for a class with start-up
// delay tau (pipeline index k = hours from now, k < tau).
int pipeline_arrivals(const std::vector<int>& pipeline, int t, int len, int tau) {
    int total = 0;
    for (int k = t; k < std::min(t + len, tau); ++k)
        if (k >= 0 && k < static_cast<int>(pipeline.size()))
            total += pipeline[static_cast<std::size_t>(k)];
    return total;
}

// Historical starts still bound by min-up at node start time t.
int history_in_window(const std::vector<int>& history, int window_h, int t) {
    int total = 0;
    for (std::size_t a = 0; a < history.size(); ++a)
        if (static_cast<double>(window_h) - static_cast<double>(a + 1) >
            static_cast<double>(t) + 1e-9)
            total += history[a];
    return total;
}

std::vector<ConstraintRow> frequency_rows(const SecurityConstraintSet& pack,
                                          FrequencyMode mode, double dpd1, double dpd2) {
    auto rows = pack.rows_for_demand(dpd1, dpd2);
    if (mode == FrequencyMode::CoiOnly)
        std::erase_if(rows, [](const ConstraintRow& r) {
            return r.name != "coi_rocof" && r.name != "qss";
        });
    return rows;
}

struct RowRhsAdjust {
    // Adds the lost unit's inertia back to the rhs when a row weights the
    // faulted region's (post-loss) inertia.
    static double adjusted_rhs(const ConstraintRow& row, const SecurityConstraintSet& pack) {
        const double coeff_f =
            pack.params.faulted_region == 1 ? row.coeff_h1 : row.coeff_h2;
        return row.rhs + coeff_f * pack.params.h_loss;
    }
};

}  // namespace

SucModel build_milp(const std::vector<GeneratorClass>& classes, const ScenarioTree& tree,
                    const SecurityConstraintSet* pack, const SucOptions& options,
                    const RollingState& state) {
    validate_fleet(classes);
    tree.validate();
    if (options.mode != FrequencyMode::Off && pack == nullptr)
        throw std::invalid_argument("build_milp: frequency mode requires a constraint pack");
    if (!(options.corridor_limit > 0.0))
        throw std::invalid_argument("build_milp: corridor limit must be > 0");
    if (state.n_up.size() != classes.size())
        throw std::invalid_argument("build_milp: rolling state does not match the fleet");

    const std::size_t num_nodes = tree.nodes.size();
    const std::size_t num_classes = classes.size();

    SucModel model;
    auto& lp = model.instance.lp;
    auto& is_int = model.instance.is_integer;
    auto add_var = [&](double lo, double up, double cost, bool integer) {
        const int idx = lp.add_var(lo, up, cost);
        is_int.push_back(integer);
        return idx;
    };

    model.v_up.assign(num_nodes, std::vector<int>(num_classes, -1));
    model.v_sg = model.v_up;
    model.v_sd = model.v_up;
    model.v_p = model.v_up;
    model.v_r = model.v_up;
    model.v_wind.assign(num_nodes, {-1, -1});
    model.v_pls.assign(num_nodes, {-1, -1});
    model.v_flow.assign(num_nodes, -1);
    model.v_st_root.assign(num_classes, -1);

    for (std::size_t g = 0; g < num_classes; ++g) {
        const auto& cls = classes[g];
        if (!cls.must_run && cls.start_up_time >= 1)
            model.v_st_root[g] = add_var(0.0, cls.count, 0.0, true);
    }

    for (std::size_t n = 0; n < num_nodes; ++n) {
        const auto& node = tree.nodes[n];
        const double w = node.prob;            // probability weight
        const double wd = node.prob * node.dt_hours;  // probability * duration
        for (std::size_t g = 0; g < num_classes; ++g) {
            const auto& cls = classes[g];
            const auto region = static_cast<std::size_t>(cls.region - 1);
            const double cnt = cls.count;
            const double iu_cost =
                wd * (cls.c_nl + options.penalty_h[region] * cls.unit_inertia());
            if (cls.must_run) {
                model.v_up[n][g] = add_var(cnt, cnt, iu_cost, true);
                model.v_sg[n][g] = add_var(0.0, 0.0, 0.0, true);
                model.v_sd[n][g] = add_var(0.0, 0.0, 0.0, true);
                model.v_p[n][g] = add_var(cnt * cls.p_msg, cnt * cls.p_max, wd * cls.c_m, false);
            } else {
                model.v_up[n][g] = add_var(0.0, cnt, iu_cost, true);
                model.v_sg[n][g] = add_var(0.0, cnt, w * cls.c_st, true);
                model.v_sd[n][g] = add_var(0.0, cnt, 0.0, true);
                model.v_p[n][g] = add_var(0.0, cnt * cls.p_max, wd * cls.c_m, false);
            }
            const double r_cost = wd * (options.penalty_r[region] + options.tie_break_r);
            model.v_r[n][g] = add_var(0.0, cnt * cls.r_max, r_cost, false);
        }
        for (int rg = 0; rg < 2; ++rg) {
            const auto r = static_cast<std::size_t>(rg);
            model.v_wind[n][r] =
                add_var(0.0, node.wind[r], wd * options.tie_break_wind[r], false);
            model.v_pls[n][r] = add_var(0.0, node.demand[r], wd * options.c_ls, false);
        }
        const double cap = options.corridor_limit;
        model.v_flow[n] = add_var(std::isfinite(cap) ? -cap : -lp::kInf,
                                  std::isfinite(cap) ? cap : lp::kInf, 0.0, false);
    }

    // Rows.
    for (std::size_t n = 0; n < num_nodes; ++n) {
        const auto& node = tree.nodes[n];
        const int t = node_start(node);
        const int len = node_len(node);

        for (std::size_t g = 0; g < num_classes; ++g) {
            const auto& cls = classes[g];
            if (!cls.must_run) {
                // Dispatch within commitment: p_msg * n_up <= p <= p_max * n_up.
                lp.add_row(0.0,
                           {{model.v_p[n][g], 1.0}, {model.v_up[n][g], -cls.p_msg}}, lp::kInf);
                lp.add_row(0.0,
                           {{model.v_up[n][g], cls.p_max}, {model.v_p[n][g], -1.0}}, lp::kInf);
            }
            if (cls.r_max > 0.0 && cls.r_slope > 0.0) {
                // Response limited by per-unit capability and by headroom:
                // r <= r_max * n_up and r <= slope * (p_max * n_up - p).
                lp.add_row(0.0,
                           {{model.v_up[n][g], cls.r_max}, {model.v_r[n][g], -1.0}}, lp::kInf);
                lp.add_row(0.0,
                           {{model.v_up[n][g], cls.r_slope * cls.p_max},
                            {model.v_p[n][g], -cls.r_slope},
                            {model.v_r[n][g], -1.0}},
                           lp::kInf);
            }

            if (!cls.must_run) {
                // Commitment linking.
                if (n == 0) {
                    const double prev = state.n_up[g];
                    lp.add_row(prev,
                               {{model.v_up[0][g], 1.0},
                                {model.v_sg[0][g], -1.0},
                                {model.v_sd[0][g], 1.0}},
                               prev);
                } else {
                    const auto par = static_cast<std::size_t>(node.parent);
                    lp.add_row(0.0,
                               {{model.v_up[n][g], 1.0},
                                {model.v_up[par][g], -1.0},
                                {model.v_sg[n][g], -1.0},
                                {model.v_sd[n][g], 1.0}},
                               0.0);
                }

                // Start-up delay: arrivals within the pipeline horizon are
                // capped by in-flight starts; the slot fed by a start decided
                // in the root hour couples the scenario branches.
                const int tau = cls.start_up_time;
                if (tau >= 1) {
                    const int arrivals = pipeline_arrivals(state.pipeline[g], t, len, tau);
                    if (t + len <= tau) {
                        lp.add_row(-lp::kInf, {{model.v_sg[n][g], 1.0}}, arrivals);
                    } else if (t + len == tau + 1) {
                        lp.add_row(-lp::kInf,
                                   {{model.v_sg[n][g], 1.0}, {model.v_st_root[g], -1.0}},
                                   arrivals);
                    }
                    // Later nodes can be fed by starts initiated inside the
                    // branch, which carry no explicit variable.
                }

                // Min-up / min-down counting over the ancestor chain.
                if (cls.min_up >= 1) {
                    std::vector<std::pair<int, double>> coeffs{{model.v_up[n][g], 1.0}};
                    int m = static_cast<int>(n);
                    while (m >= 0) {
                        const auto& anc = tree.nodes[static_cast<std::size_t>(m)];
                        if (node_start(anc) + cls.min_up <= t) break;
                        coeffs.emplace_back(model.v_sg[static_cast<std::size_t>(m)][g], -1.0);
                        m = anc.parent;
                    }
                    const int hist = history_in_window(state.recent_starts[g], cls.min_up, t);
                    lp.add_row(hist, std::move(coeffs), lp::kInf);
                }
                if (cls.min_down >= 1) {
                    std::vector<std::pair<int, double>> coeffs{{model.v_up[n][g], 1.0}};
                    int m = static_cast<int>(n);
                    while (m >= 0) {
                        const auto& anc = tree.nodes[static_cast<std::size_t>(m)];
                        if (node_start(anc) + cls.min_down <= t) break;
                        coeffs.emplace_back(model.v_sd[static_cast<std::size_t>(m)][g], 1.0);
                        m = anc.parent;
                    }
                    const int hist = history_in_window(state.recent_stops[g], cls.min_down, t);
                    lp.add_row(-lp::kInf, std::move(coeffs), cls.count - hist);
                }
            }

            // Optional ramp limit between consecutive dispatch decisions.
            if (std::isfinite(cls.ramp_per_hour)) {
                const double band = cls.ramp_per_hour * node.dt_hours * cls.count;
                if (n > 0) {
                    const auto par = static_cast<std::size_t>(node.parent);
                    lp.add_row(-band,
                               {{model.v_p[n][g], 1.0}, {model.v_p[par][g], -1.0}}, band);
                } else if (!state.prev_p.empty()) {
                    const double prev = state.prev_p[g];
                    lp.add_row(prev - band, {{model.v_p[0][g], 1.0}}, prev + band);
                }
            }
        }

        // Regional balance: generation + wind + shed +/- corridor = demand.
        for (int rg = 0; rg < 2; ++rg) {
            const auto r = static_cast<std::size_t>(rg);
            std::vector<std::pair<int, double>> coeffs;
            for (std::size_t g = 0; g < num_classes; ++g)
                if (classes[g].region == rg + 1) coeffs.emplace_back(model.v_p[n][g], 1.0);
            coeffs.emplace_back(model.v_wind[n][r], 1.0);
            coeffs.emplace_back(model.v_pls[n][r], 1.0);
            coeffs.emplace_back(model.v_flow[n], rg == 0 ? 1.0 : -1.0);
            lp.add_row(node.demand[r], std::move(coeffs), node.demand[r]);
        }

        // Frequency security rows with node demand folded into the rhs.
        if (options.mode != FrequencyMode::Off) {
            const double dpd1 = options.d1 * node.demand[0];
            const double dpd2 = options.d2 * node.demand[1];
            for (const auto& row : frequency_rows(*pack, options.mode, dpd1, dpd2)) {
                std::vector<std::pair<int, double>> coeffs;
                for (std::size_t g = 0; g < num_classes; ++g) {
                    const auto& cls = classes[g];
                    const double ch = cls.region == 1 ? row.coeff_h1 : row.coeff_h2;
                    const double cr = cls.region == 1 ? row.coeff_r1 : row.coeff_r2;
                    if (ch != 0.0 && cls.unit_inertia() > 0.0)
                        coeffs.emplace_back(model.v_up[n][g], ch * cls.unit_inertia());
                    if (cr != 0.0 && cls.r_max > 0.0)
                        coeffs.emplace_back(model.v_r[n][g], cr);
                }
                lp.add_row(RowRhsAdjust::adjusted_rhs(row, *pack), std::move(coeffs), lp::kInf);
            }
        }
    }
    return model;
}

namespace {

Schedule decode(const SucModel& model, const milp::Result& mip,
                const std::vector<GeneratorClass>& classes, const ScenarioTree& tree,
                const SecurityConstraintSet* pack, const SucOptions& options) {
    Schedule schedule;
    schedule.status = mip.status;
    schedule.gap = mip.gap;
    schedule.mip_nodes = mip.nodes;
    schedule.objective = mip.obj;

    const std::size_t num_nodes = tree.nodes.size();
    const std::size_t num_classes = classes.size();
    schedule.decisions.resize(num_nodes);
    double cost = 0.0;
    for (std::size_t n = 0; n < num_nodes; ++n) {
        const auto& node = tree.nodes[n];
        NodeDecision& d = schedule.decisions[n];
        d.n_up.resize(num_classes);
        d.n_sg.resize(num_classes);
        d.n_sd.resize(num_classes);
        d.p.resize(num_classes);
        d.r.resize(num_classes);
        for (std::size_t g = 0; g < num_classes; ++g) {
            d.n_up[g] = static_cast<int>(std::llround(mip.x[static_cast<std::size_t>(model.v_up[n][g])]));
            d.n_sg[g] = static_cast<int>(std::llround(mip.x[static_cast<std::size_t>(model.v_sg[n][g])]));
            d.n_sd[g] = static_cast<int>(std::llround(mip.x[static_cast<std::size_t>(model.v_sd[n][g])]));
            d.p[g] = mip.x[static_cast<std::size_t>(model.v_p[n][g])];
            d.r[g] = mip.x[static_cast<std::size_t>(model.v_r[n][g])];
            const auto region = static_cast<std::size_t>(classes[g].region - 1);
            d.h_procured[region] += classes[g].unit_inertia() * d.n_up[g];
            d.r_region[region] += d.r[g];
            d.cost_startup += classes[g].c_st * d.n_sg[g];
            d.cost_noload += node.dt_hours * classes[g].c_nl * d.n_up[g];
            d.cost_marginal += node.dt_hours * classes[g].c_m * d.p[g];
        }
        d.h_region = d.h_procured;
        if (pack) {
            const auto f = static_cast<std::size_t>(pack->params.faulted_region - 1);
            d.h_region[f] -= pack->params.h_loss;
        }
        for (int rg = 0; rg < 2; ++rg) {
            const auto r = static_cast<std::size_t>(rg);
            d.wind_used[r] = mip.x[static_cast<std::size_t>(model.v_wind[n][r])];
            d.p_ls[r] = mip.x[static_cast<std::size_t>(model.v_pls[n][r])];
            d.cost_loadshed += node.dt_hours * options.c_ls * d.p_ls[r];
            d.cost_penalty += node.dt_hours * (options.penalty_h[r] * d.h_procured[r] +
                                               options.penalty_r[r] * d.r_region[r]);
        }
        d.flow = mip.x[static_cast<std::size_t>(model.v_flow[n])];
        cost += node.prob * d.cost();
    }
    schedule.cost = cost;
    return schedule;
}

std::string probe_infeasibility(const std::vector<GeneratorClass>& classes,
                                const ScenarioTree& tree, const SecurityConstraintSet* pack,
                                const SucOptions& options, const RollingState& state) {
    auto lp_feasible = [&](const SucOptions& opts, const RollingState& st) {
        const SucModel m = build_milp(classes, tree, pack, opts, st);
        return lp::solve(m.instance.lp).status != lp::Status::Infeasible;
    };
    if (options.mode != FrequencyMode::Off) {
        SucOptions probe = options;
        probe.mode = FrequencyMode::Off;
        if (lp_feasible(probe, state)) return "frequency rows";
    }
    if (std::isfinite(options.corridor_limit)) {
        SucOptions probe = options;
        probe.corridor_limit = lp::kInf;
        if (lp_feasible(probe, state)) return "corridor limit";
    }
    {
        RollingState relaxed = state;
        for (std::size_t g = 0; g < classes.size(); ++g)
            for (auto& v : relaxed.pipeline[g]) v = classes[g].count;
        if (lp_feasible(options, relaxed)) return "start-up pipeline";
    }
    {
        RollingState relaxed = state;
        for (auto& h : relaxed.recent_starts) std::fill(h.begin(), h.end(), 0);
        for (auto& h : relaxed.recent_stops) std::fill(h.begin(), h.end(), 0);
        if (lp_feasible(options, relaxed)) return "min-up/min-down history";
    }
    return "regional balance or committable capacity";
}

}  // namespace

Schedule solve(const SucModel& model, const std::vector<GeneratorClass>& classes,
               const ScenarioTree& tree, const SecurityConstraintSet* pack,
               const SucOptions& options, const RollingState& state) {
    const milp::Result mip = milp::solve(model.instance, options.mip);
    if (mip.status == milp::Status::Infeasible) {
        Schedule schedule;
        schedule.status = milp::Status::Infeasible;
        schedule.infeasibility_hint = probe_infeasibility(classes, tree, pack, options, state);
        return schedule;
    }
    if (mip.x.empty())
        throw std::runtime_error(std::string("scheduler: ") + milp::status_name(mip.status) +
                                 " with no incumbent solution");
    Schedule schedule = decode(model, mip, classes, tree, pack, options);
    std::vector<std::string> problems;
    if (!audit_schedule(schedule, classes, tree, pack, options, state, &problems)) {
        std::ostringstream msg;
        msg << "scheduler: solution failed the independent audit:";
        for (const auto& p : problems) msg << "\n  - " << p;
        throw std::runtime_error(msg.str());
    }
    return schedule;
}

bool audit_schedule(const Schedule& schedule, const std::vector<GeneratorClass>& classes,
                    const ScenarioTree& tree, const SecurityConstraintSet* pack,
                    const SucOptions& options, const RollingState& state,
                    std::vector<std::string>* messages) {
    bool ok = true;
    auto flag = [&](const std::string& msg) {
        ok = false;
        if (messages) messages->push_back(msg);
    };
    if (schedule.decisions.size() != tree.nodes.size()) {
        flag("decision count does not match the tree");
        return false;
    }
    const double tol = 1e-6;
    double recomputed_objective = 0.0;
    for (std::size_t n = 0; n < tree.nodes.size(); ++n) {
        const auto& node = tree.nodes[n];
        const auto& d = schedule.decisions[n];
        const int t = node_start(node);
        const int len = node_len(node);
        const std::string at = "node " + std::to_string(n);

        std::array<double, 2> gen{0.0, 0.0};
        std::array<double, 2> h{0.0, 0.0};
        std::array<double, 2> r{0.0, 0.0};
        for (std::size_t g = 0; g < classes.size(); ++g) {
            const auto& cls = classes[g];
            const auto region = static_cast<std::size_t>(cls.region - 1);
            if (d.n_up[g] < 0 || d.n_up[g] > cls.count)
                flag(at + ": n_up out of range for " + cls.name);
            if (cls.must_run && d.n_up[g] != cls.count)
                flag(at + ": must-run class " + cls.name + " not fully committed");
            if (d.n_sg[g] < 0 || d.n_sd[g] < 0) flag(at + ": negative start/stop count");
            const double scale = 1.0 + cls.p_max * cls.count;
            if (d.p[g] < cls.p_msg * d.n_up[g] - tol * scale ||
                d.p[g] > cls.p_max * d.n_up[g] + tol * scale)
                flag(at + ": dispatch outside commitment range for " + cls.name);
            if (d.r[g] < -tol * scale || d.r[g] > cls.r_max * d.n_up[g] + tol * scale)
                flag(at + ": response above unit capability for " + cls.name);
            if (d.r[g] > cls.r_slope * (cls.p_max * d.n_up[g] - d.p[g]) + tol * scale &&
                cls.r_max > 0.0)
                flag(at + ": response above headroom for " + cls.name);

            if (!cls.must_run) {
                const int prev = n == 0 ? state.n_up[g]
                                        : schedule.decisions[static_cast<std::size_t>(node.parent)]
                                              .n_up[g];
                if (d.n_up[g] != prev + d.n_sg[g] - d.n_sd[g])
                    flag(at + ": commitment linking violated for " + cls.name);
                const int tau = cls.start_up_time;
                if (tau >= 1 && t + len <= tau) {
                    const int cap = pipeline_arrivals(state.pipeline[g], t, len, tau);
                    if (d.n_sg[g] > cap)
                        flag(at + ": starts exceed the start-up pipeline for " + cls.name);
                }
                if (cls.min_up >= 1) {
                    int started = 0;
                    int m = static_cast<int>(n);
                    while (m >= 0) {
                        const auto& anc = tree.nodes[static_cast<std::size_t>(m)];
                        if (node_start(anc) + cls.min_up <= t) break;
                        started += schedule.decisions[static_cast<std::size_t>(m)].n_sg[g];
                        m = anc.parent;
                    }
                    started += history_in_window(state.recent_starts[g], cls.min_up, t);
                    if (d.n_up[g] < started) flag(at + ": min-up window violated for " + cls.name);
                }
                if (cls.min_down >= 1) {
                    int stopped = 0;
                    int m = static_cast<int>(n);
                    while (m >= 0) {
                        const auto& anc = tree.nodes[static_cast<std::size_t>(m)];
                        if (node_start(anc) + cls.min_down <= t) break;
                        stopped += schedule.decisions[static_cast<std::size_t>(m)].n_sd[g];
                        m = anc.parent;
                    }
                    stopped += history_in_window(state.recent_stops[g], cls.min_down, t);
                    if (d.n_up[g] > cls.count - stopped)
                        flag(at + ": min-down window violated for " + cls.name);
                }
            }
            gen[region] += d.p[g];
            h[region] += cls.unit_inertia() * d.n_up[g];
            r[region] += d.r[g];
        }

        for (int rg = 0; rg < 2; ++rg) {
            const auto reg = static_cast<std::size_t>(rg);
            if (d.wind_used[reg] < -tol || d.wind_used[reg] > node.wind[reg] + tol * (1.0 + node.wind[reg]))
                flag(at + ": wind use outside availability");
            if (d.p_ls[reg] < -tol) flag(at + ": negative load shed");
            const double balance = gen[reg] + d.wind_used[reg] + d.p_ls[reg] +
                                   (rg == 0 ? d.flow : -d.flow) - node.demand[reg];
            if (std::fabs(balance) > tol * (1.0 + node.demand[reg]))
                flag(at + ": regional balance violated");
        }
        if (std::isfinite(options.corridor_limit) &&
            std::fabs(d.flow) > options.corridor_limit + tol * (1.0 + options.corridor_limit))
            flag(at + ": corridor limit violated");

        std::array<double, 2> h_post = h;
        if (pack)
            h_post[static_cast<std::size_t>(pack->params.faulted_region - 1)] -=
                pack->params.h_loss;
        if (options.mode != FrequencyMode::Off) {
            const double dpd1 = options.d1 * node.demand[0];
            const double dpd2 = options.d2 * node.demand[1];
            for (const auto& row : frequency_rows(*pack, options.mode, dpd1, dpd2)) {
                // Rows apply to post-loss inertia; evaluating them there is
                // the same algebra as the procured-terms rows the MILP holds.
                const double lhs = row.lhs(h_post[0], h_post[1], r[0], r[1]);
                if (lhs < row.rhs - tol * (1.0 + std::fabs(row.rhs)))
                    flag(at + ": frequency row '" + row.name + "' violated");
            }
        }

        // Cross-check the decision's derived quantities.
        for (int rg = 0; rg < 2; ++rg) {
            const auto reg = static_cast<std::size_t>(rg);
            if (std::fabs(d.h_procured[reg] - h[reg]) > 1e-6 * (1.0 + h[reg]))
                flag(at + ": stored procured inertia mismatch");
            if (std::fabs(d.h_region[reg] - h_post[reg]) > 1e-6 * (1.0 + std::fabs(h_post[reg])))
                flag(at + ": stored post-loss inertia mismatch");
            if (std::fabs(d.r_region[reg] - r[reg]) > 1e-6 * (1.0 + r[reg]))
                flag(at + ": stored regional response mismatch");
        }

        double node_obj = d.cost();
        node_obj += node.dt_hours * options.tie_break_r * (r[0] + r[1]);
        node_obj += node.dt_hours * (options.tie_break_wind[0] * d.wind_used[0] +
                                     options.tie_break_wind[1] * d.wind_used[1]);
        recomputed_objective += node.prob * node_obj;
    }
    if (std::fabs(recomputed_objective - schedule.objective) >
        1e-6 * (1.0 + std::fabs(schedule.objective)))
        flag("objective does not match the probability-weighted recomputed cost");
    return ok;
}

SecurityAuditResult audit_decision_security(const NodeDecision& decision, double demand1,
                                            double demand2, const SecurityConstraintSet& pack,
                                            double x12, double v1, double v2, double d1,
                                            double d2, const dynamics::SimParams& sim,
                                            dynamics::Backend backend) {
    SecurityAuditResult res;
    if (decision.h_region[0] < 0.0 || decision.h_region[1] < 0.0) {
        res.ok = false;
        res.message = "negative post-loss inertia";
        return res;
    }
    // The swing model degenerates benignly as a region's stored energy goes
    // to zero (it simply tracks the corridor); audit the limit with a small
    // floor instead of rejecting uncommitted regions outright.
    constexpr double kInertiaFloor = 50.0;  // MW*s
    dynamics::OperatingPoint p;
    p.h1 = std::max(decision.h_region[0], kInertiaFloor);
    p.h2 = std::max(decision.h_region[1], kInertiaFloor);
    p.r1 = decision.r_region[0];
    p.r2 = decision.r_region[1];
    p.p_loss = pack.params.p_loss;
    p.faulted_region = pack.params.faulted_region;
    p.pd1 = demand1;
    p.pd2 = demand2;
    p.d1 = d1;
    p.d2 = d2;
    p.v1 = v1;
    p.v2 = v2;
    p.x12 = x12;
    p.f0 = pack.params.f0;
    const auto lane = dynamics::simulate_stats_one(p, sim, backend);
    if (!lane.ok) {
        res.ok = false;
        res.message = lane.error;
        return res;
    }
    res.max_rocof_1 = lane.stats.max_rocof_1;
    res.max_rocof_2 = lane.stats.max_rocof_2;
    res.nadir_1 = lane.stats.nadir_1;
    res.nadir_2 = lane.stats.nadir_2;
    const double rocof_lim = pack.params.rocof_max + 1e-3;
    const double nadir_lim = pack.params.df_max + 1e-3;
    res.ok = res.max_rocof_1 <= rocof_lim && res.max_rocof_2 <= rocof_lim &&
             res.nadir_1 <= nadir_lim && res.nadir_2 <= nadir_lim;
    if (!res.ok) res.message = "post-fault limits violated in simulation";
    return res;
}

}  // namespace freqsec::scheduler
