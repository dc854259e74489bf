// freqsec: two-region frequency-security toolkit.
//
// Pipeline: simulate post-fault dynamics, sweep operating points to the
// security boundary, fit conservative linear models, assemble security rows,
// and run frequency-secured stochastic unit commitment.

#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "freqsec/cli/commands.hpp"
#include "freqsec/cli/config.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitRuntime = 2;
constexpr int kExitAuditFailure = 3;

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"freqsec: frequency-secured scheduling for a two-region power system"};
    app.require_subcommand(1);

    std::string config_path;
    freqsec::cli::CommandContext ctx;
    std::string backend = "auto";
    app.add_option("--config", config_path, "Path to a JSON or TOML config file");
    app.add_option("--out", ctx.out_dir, "Output directory")->capture_default_str();
    app.add_option("--seed", ctx.seed, "Seed for synthetic data")->capture_default_str();
    app.add_flag("--verify", ctx.verify, "Run the simulation audits after the command");
    app.add_option("--backend", backend, "Simulation kernel: auto, scalar or avx2")
        ->check(CLI::IsMember({"auto", "scalar", "avx2"}))
        ->capture_default_str();

    auto* c_sim = app.add_subcommand("simulate", "Simulate one post-fault operating point");
    auto* c_sweep = app.add_subcommand("sweep", "Sample the frequency-security boundary");
    auto* c_fit = app.add_subcommand("fit", "Fit a conservative model to boundary samples");
    auto* c_pack = app.add_subcommand("pack", "Assemble security rows from trained models");
    auto* c_sched = app.add_subcommand("schedule", "Rolling-horizon frequency-secured commitment");
    auto* c_case = app.add_subcommand("casestudy", "Run a paired-comparison case study");
    int days = 2;
    std::string profile_file;
    auto* c_gen = app.add_subcommand("gen-profiles", "Generate synthetic demand/wind traces");
    c_gen->add_option("--days", days, "Days of hourly data")->capture_default_str();
    c_gen->add_option("--out-file", profile_file, "Output file name (default profiles.csv)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (backend == "scalar") ctx.backend = freqsec::dynamics::Backend::Scalar;
        if (backend == "avx2") ctx.backend = freqsec::dynamics::Backend::Avx2;

        auto need_config = [&]() {
            if (config_path.empty()) {
                std::cerr << "error: this subcommand requires --config\n";
                std::exit(kExitUsage);
            }
            return freqsec::cli::load_config(config_path);
        };

        if (c_sim->parsed()) freqsec::cli::cmd_simulate(need_config(), ctx);
        if (c_sweep->parsed()) freqsec::cli::cmd_sweep(need_config(), ctx);
        if (c_fit->parsed()) freqsec::cli::cmd_fit(need_config(), ctx);
        if (c_pack->parsed()) freqsec::cli::cmd_pack(need_config(), ctx);
        if (c_sched->parsed()) freqsec::cli::cmd_schedule(need_config(), ctx);
        if (c_case->parsed()) freqsec::cli::cmd_casestudy(need_config(), ctx);
        if (c_gen->parsed()) freqsec::cli::cmd_gen_profiles(days, profile_file, ctx);
    } catch (const freqsec::cli::AuditFailure& e) {
        std::cerr << "audit failure: " << e.what() << "\n";
        return kExitAuditFailure;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
    return kExitOk;
}
