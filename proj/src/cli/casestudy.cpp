// Case-study recipes: paired scheduling runs over the bundled two-region
// dataset, comparing frequency-security configurations.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "freqsec/cli/commands.hpp"
#include "freqsec/cli/config.hpp"
#include "freqsec/util/csv.hpp"

namespace freqsec::cli {

namespace fs = std::filesystem;
using json = nlohmann::json;
using scheduler::FrequencyMode;

namespace {

json summary_json(const scheduler::RunSummary& s) {
    return json::parse(scheduler::summary_to_json(s));
}

struct StudyRun {
    std::string name;
    ScheduleRunResult result;
};

void write_run(const CommandContext& ctx, const std::string& study, const StudyRun& run,
               const std::vector<scheduler::GeneratorClass>& classes) {
    const fs::path dir = fs::path(ctx.out_dir) / study / run.name;
    fs::create_directories(dir);
    csv::write_file((dir / "decisions.csv").string(),
                    scheduler::decisions_to_csv(run.result.records, classes));
    csv::write_file((dir / "summary.json").string(),
                    scheduler::summary_to_json(run.result.summary));
}

struct StudySetup {
    GbSystem sys;
    std::vector<scheduler::GeneratorClass> classes;
    scheduler::HourlyProfile profile;
    scheduler::TreeConfig tree;
    std::size_t hours = 24;
    double p_loss = 1800.0;
    int faulted_region = 1;
    double h_loss = 9000.0;
    constraints::SecurityConstraintSet pack;
    dynamics::SimParams sim;
};

StudySetup prepare(const json& config, const CommandContext& ctx) {
    StudySetup s;
    s.sys = gb2030_system();
    s.classes = gb2030_fleet();
    s.hours = config.value("horizon_hours", 24);
    if (config.contains("loss")) {
        const auto& loss = config.at("loss");
        s.p_loss = require_number(loss, "size_mw");
        s.faulted_region = static_cast<int>(require_number(loss, "region"));
        s.h_loss = loss.value("h_loss_mws", 0.0);
    }
    const int days =
        static_cast<int>((s.hours + 24 /* lookahead */) / 24) + 2;
    s.profile = gen_profiles(ctx.seed, days, s.sys);
    s.sim = sim_params_from_json(config.value("sim", json::object()));

    if (config.contains("pack")) {
        s.pack = constraints::read_pack(config.at("pack").get<std::string>());
    } else {
        std::cout << "casestudy: training constraint pack for a " << s.p_loss
                  << " MW loss in region " << s.faulted_region << "...\n";
        const auto trained =
            train_gb_pack(s.p_loss, s.faulted_region, s.h_loss, s.sys, s.sim, ctx.backend);
        s.pack = trained.pack;
        std::cout << "casestudy: trained on " << trained.rocof_samples << " rocof + "
                  << trained.nadir_samples << " nadir samples (" << trained.failures
                  << " failed grid points)\n";
        fs::create_directories(ctx.out_dir);
        constraints::write_pack(s.pack, (fs::path(ctx.out_dir) / "pack.json").string());
    }
    return s;
}

scheduler::SucOptions base_options(const StudySetup& s, FrequencyMode mode,
                                   double corridor_limit) {
    scheduler::SucOptions opt;
    opt.mode = mode;
    opt.corridor_limit = corridor_limit;
    opt.c_ls = s.sys.c_ls;
    opt.d1 = s.sys.d;
    opt.d2 = s.sys.d;
    opt.mip.rel_gap = 1e-3;
    opt.mip.time_limit_s = 120.0;
    return opt;
}

StudyRun run_case(const StudySetup& s, const std::string& name,
                  const scheduler::SucOptions& options) {
    ScheduleRunConfig cfg;
    cfg.classes = s.classes;
    cfg.profile = s.profile;
    cfg.start_hour = 0;
    cfg.hours = s.hours;
    cfg.tree = s.tree;
    cfg.options = options;
    cfg.sys = s.sys;
    const constraints::SecurityConstraintSet* pack =
        options.mode == FrequencyMode::Off ? nullptr : &s.pack;
    StudyRun run;
    run.name = name;
    run.result = run_schedule(cfg, pack);
    std::cout << "casestudy: run '" << name << "' cost " << run.result.summary.cost_total
              << ", avg H " << run.result.summary.avg_h1_procured << "/"
              << run.result.summary.avg_h2_procured << " MW*s, avg R "
              << run.result.summary.avg_r1 << "/" << run.result.summary.avg_r2 << " MW\n";
    return run;
}

void verify_regional_runs(const StudySetup& s, const std::vector<const StudyRun*>& runs,
                          const CommandContext& ctx, const scheduler::SucOptions& options) {
    if (!ctx.verify) return;
    std::size_t total = 0;
    for (const auto* run : runs) {
        const auto failures = security_audit_records(run->result.records, s.pack, s.sys, options,
                                                     s.sim, ctx.backend);
        for (const auto& f : failures)
            std::cout << "casestudy audit [" << run->name << "]: " << f << "\n";
        total += failures.size();
    }
    if (total > 0)
        throw AuditFailure("casestudy: " + std::to_string(total) +
                           " decisions failed the security audit");
}

void study_uniform_vs_regional(const json& config, const CommandContext& ctx) {
    StudySetup s = prepare(config, ctx);
    const double corridor = s.sys.corridor_limit;
    const StudyRun none = run_case(s, "no_guarantee", base_options(s, FrequencyMode::Off, corridor));
    const StudyRun coi = run_case(s, "coi_only", base_options(s, FrequencyMode::CoiOnly, corridor));
    const StudyRun regional =
        run_case(s, "regional", base_options(s, FrequencyMode::Regional, corridor));

    for (const auto* run : {&none, &coi, &regional})
        write_run(ctx, "uniform_vs_regional", *run, s.classes);
    json report;
    report["study"] = "uniform_vs_regional";
    report["no_guarantee"] = summary_json(none.result.summary);
    report["coi_only"] = summary_json(coi.result.summary);
    report["regional"] = summary_json(regional.result.summary);
    csv::write_file((fs::path(ctx.out_dir) / "uniform_vs_regional" / "report.json").string(),
                    report.dump(2) + "\n");
    verify_regional_runs(s, {&regional}, ctx, base_options(s, FrequencyMode::Regional, corridor));
}

void study_cost_sensitivity(const json& config, const CommandContext& ctx) {
    StudySetup s = prepare(config, ctx);
    const double corridor = s.sys.corridor_limit;
    const double ph = config.value("penalty_base_h", 5.0);
    const double pr = config.value("penalty_base_r", 250.0);

    auto with_penalties = [&](std::array<double, 2> h, std::array<double, 2> r) {
        auto opt = base_options(s, FrequencyMode::Regional, corridor);
        opt.penalty_h = h;
        opt.penalty_r = r;
        return opt;
    };
    const StudyRun base = run_case(s, "base", with_penalties({ph, ph}, {pr, pr}));
    const StudyRun h_south = run_case(s, "inertia_x2_south", with_penalties({2 * ph, ph}, {pr, pr}));
    const StudyRun h_north = run_case(s, "inertia_x2_north", with_penalties({ph, 2 * ph}, {pr, pr}));
    const StudyRun r_south = run_case(s, "pfr_x2_south", with_penalties({ph, ph}, {2 * pr, pr}));
    const StudyRun r_north = run_case(s, "pfr_x2_north", with_penalties({ph, ph}, {pr, 2 * pr}));

    json report;
    report["study"] = "cost_sensitivity";
    for (const auto* run : {&base, &h_south, &h_north, &r_south, &r_north}) {
        write_run(ctx, "cost_sensitivity", *run, s.classes);
        report[run->name] = summary_json(run->result.summary);
    }
    csv::write_file((fs::path(ctx.out_dir) / "cost_sensitivity" / "report.json").string(),
                    report.dump(2) + "\n");
    verify_regional_runs(s, {&base}, ctx, with_penalties({ph, ph}, {pr, pr}));
}

void study_fault_location(const json& config, const CommandContext& ctx) {
    StudySetup s = prepare(config, ctx);
    const double corridor = config.value("corridor_limit_mw", s.sys.corridor_limit);
    const StudyRun coi = run_case(s, "coi_only", base_options(s, FrequencyMode::CoiOnly, corridor));
    const StudyRun regional =
        run_case(s, "regional", base_options(s, FrequencyMode::Regional, corridor));
    const StudyRun unlimited =
        run_case(s, "regional_unlimited_corridor",
                 base_options(s, FrequencyMode::Regional, lp::kInf));

    json report;
    report["study"] = "fault_location";
    for (const auto* run : {&coi, &regional, &unlimited}) {
        write_run(ctx, "fault_location", *run, s.classes);
        report[run->name] = summary_json(run->result.summary);
    }
    csv::write_file((fs::path(ctx.out_dir) / "fault_location" / "report.json").string(),
                    report.dump(2) + "\n");
    verify_regional_runs(s, {&regional, &unlimited}, ctx,
                         base_options(s, FrequencyMode::Regional, corridor));
}

}  // namespace

void cmd_casestudy(const json& config, const CommandContext& ctx) {
    const std::string study = require_string(config, "study");
    if (study == "uniform_vs_regional")
        study_uniform_vs_regional(config, ctx);
    else if (study == "cost_sensitivity")
        study_cost_sensitivity(config, ctx);
    else if (study == "fault_location")
        study_fault_location(config, ctx);
    else
        throw std::runtime_error("config: unknown study '" + study + "'");
}

}  // namespace freqsec::cli
