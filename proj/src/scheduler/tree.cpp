#include "freqsec/scheduler/tree.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "freqsec/util/csv.hpp"

namespace freqsec::scheduler {

void ScenarioTree::validate() const {
    if (nodes.empty()) throw std::invalid_argument("scenario tree: empty");
    if (nodes[0].parent != -1 || std::fabs(nodes[0].prob - 1.0) > 1e-9)
        throw std::invalid_argument("scenario tree: root must have prob 1 and no parent");
    std::vector<double> child_prob(nodes.size(), 0.0);
    std::vector<bool> has_children(nodes.size(), false);
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        const auto& n = nodes[i];
        if (n.id != static_cast<int>(i))
            throw std::invalid_argument("scenario tree: ids must be positional");
        if (!(n.dt_hours > 0.0)) throw std::invalid_argument("scenario tree: dt must be > 0");
        if (!(n.prob > 0.0 && n.prob <= 1.0 + 1e-12))
            throw std::invalid_argument("scenario tree: bad probability");
        if (i > 0) {
            if (n.parent < 0 || n.parent >= static_cast<int>(i))
                throw std::invalid_argument("scenario tree: parent must precede child");
            child_prob[static_cast<std::size_t>(n.parent)] += n.prob;
            has_children[static_cast<std::size_t>(n.parent)] = true;
        }
    }
    for (std::size_t i = 0; i < nodes.size(); ++i)
        if (has_children[i] && std::fabs(child_prob[i] - nodes[i].prob) > 1e-9)
            throw std::invalid_argument(
                "scenario tree: children probabilities must sum to the parent's");
}

double ScenarioTree::lookahead_hours() const {
    double end = 0.0;
    for (const auto& n : nodes) end = std::max(end, n.start_hour + n.dt_hours);
    return end;
}

HourlyProfile read_profile_csv(const std::string& path) {
    const auto table = csv::read_file(path);
    const std::vector<std::string> expected = {"hour", "demand_mw_r1", "demand_mw_r2",
                                               "wind_mw_r1", "wind_mw_r2"};
    if (table.header != expected)
        throw std::runtime_error("profile csv '" + path + "' has an unexpected header");
    HourlyProfile p;
    for (const auto& row : table.rows) {
        p.demand1.push_back(csv::to_double(row[1]));
        p.demand2.push_back(csv::to_double(row[2]));
        p.wind1.push_back(csv::to_double(row[3]));
        p.wind2.push_back(csv::to_double(row[4]));
    }
    return p;
}

std::string profile_to_csv(const HourlyProfile& profile) {
    std::ostringstream out;
    out << "hour,demand_mw_r1,demand_mw_r2,wind_mw_r1,wind_mw_r2\n";
    for (std::size_t h = 0; h < profile.hours(); ++h) {
        out << h << ',' << csv::format_double(profile.demand1[h]) << ','
            << csv::format_double(profile.demand2[h]) << ','
            << csv::format_double(profile.wind1[h]) << ','
            << csv::format_double(profile.wind2[h]) << '\n';
    }
    return out.str();
}

void TreeConfig::validate() const {
    if (branch_probs.empty() || branch_probs.size() != branch_z.size())
        throw std::invalid_argument("tree config: branch probs/z length mismatch");
    double sum = 0.0;
    for (double p : branch_probs) {
        if (!(p > 0.0)) throw std::invalid_argument("tree config: probs must be > 0");
        sum += p;
    }
    if (std::fabs(sum - 1.0) > 1e-9)
        throw std::invalid_argument("tree config: branch probs must sum to 1");
    if (step_hours.empty()) throw std::invalid_argument("tree config: no step_hours");
    for (double s : step_hours)
        if (!(s >= 1.0) || std::fabs(s - std::round(s)) > 1e-9)
            throw std::invalid_argument("tree config: step_hours must be whole hours >= 1");
    if (!(rel_sigma >= 0.0) || !(sigma_saturate_h > 0.0))
        throw std::invalid_argument("tree config: bad sigma settings");
}

double TreeConfig::lookahead_hours() const {
    double s = 1.0;  // root hour
    for (double v : step_hours) s += v;
    return s;
}

ScenarioTree build_tree(const HourlyProfile& profile, std::size_t hour0,
                        const TreeConfig& config) {
    config.validate();
    const auto lookahead = static_cast<std::size_t>(std::llround(config.lookahead_hours()));
    if (hour0 + lookahead > profile.hours())
        throw std::invalid_argument("build_tree: profile too short for the lookahead window");

    ScenarioTree tree;
    TreeNode root;
    root.id = 0;
    root.parent = -1;
    root.prob = 1.0;
    root.dt_hours = 1.0;
    root.start_hour = 0.0;
    root.demand[0] = profile.demand1[hour0];
    root.demand[1] = profile.demand2[hour0];
    root.wind[0] = profile.wind1[hour0];
    root.wind[1] = profile.wind2[hour0];
    tree.nodes.push_back(root);

    for (std::size_t b = 0; b < config.branch_probs.size(); ++b) {
        int parent = 0;
        double t = 1.0;
        for (double step : config.step_hours) {
            TreeNode node;
            node.id = static_cast<int>(tree.nodes.size());
            node.parent = parent;
            node.prob = config.branch_probs[b];
            node.dt_hours = step;
            node.start_hour = t;
            double d1 = 0.0, d2 = 0.0, w1 = 0.0, w2 = 0.0;
            const auto len = static_cast<std::size_t>(std::llround(step));
            for (std::size_t k = 0; k < len; ++k) {
                const std::size_t h = hour0 + static_cast<std::size_t>(std::llround(t)) + k;
                d1 += profile.demand1[h];
                d2 += profile.demand2[h];
                w1 += profile.wind1[h];
                w2 += profile.wind2[h];
            }
            node.demand[0] = d1 / static_cast<double>(len);
            node.demand[1] = d2 / static_cast<double>(len);
            const double mid = t + step / 2.0;
            const double growth = std::min(mid, config.sigma_saturate_h) / config.sigma_saturate_h;
            const double factor = 1.0 + config.branch_z[b] * config.rel_sigma * growth;
            node.wind[0] = std::clamp(w1 / static_cast<double>(len) * factor, 0.0,
                                      config.wind_cap_per_region);
            node.wind[1] = std::clamp(w2 / static_cast<double>(len) * factor, 0.0,
                                      config.wind_cap_per_region);
            parent = node.id;
            t += step;
            tree.nodes.push_back(node);
        }
    }
    tree.validate();
    return tree;
}

}  // namespace freqsec::scheduler
