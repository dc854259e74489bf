#include "freqsec/cli/gb2030.hpp"

#include <algorithm>
#include <cmath>

#include "freqsec/util/rng.hpp"

namespace freqsec::cli {

GbSystem gb2030_system() { return GbSystem{}; }

std::vector<scheduler::GeneratorClass> gb2030_fleet() {
    using scheduler::GeneratorClass;
    std::vector<GeneratorClass> fleet;

    // 4 x 1800 MW nuclear: must-run baseload in the south; the largest unit
    // sets the N-1 loss. No PFR contribution.
    GeneratorClass nuclear;
    nuclear.name = "nuclear";
    nuclear.region = 1;
    nuclear.count = 4;
    nuclear.p_max = 1800.0;
    nuclear.p_msg = 1800.0;
    nuclear.c_nl = 0.0;
    nuclear.c_m = 10.0;
    nuclear.must_run = true;
    nuclear.h_const = 5.0;
    nuclear.r_max = 0.0;
    nuclear.r_slope = 0.0;
    nuclear.emissions = 0.0;
    fleet.push_back(nuclear);

    // 100 x 500 MW CCGT split 75/25 between the regions.
    GeneratorClass ccgt;
    ccgt.name = "ccgt_south";
    ccgt.region = 1;
    ccgt.count = 75;
    ccgt.p_max = 500.0;
    ccgt.p_msg = 250.0;
    ccgt.c_nl = 4500.0;
    ccgt.c_m = 46.0;
    ccgt.c_st = 10000.0;
    ccgt.start_up_time = 4;
    ccgt.min_up = 4;
    ccgt.min_down = 1;
    ccgt.h_const = 5.0;
    ccgt.r_max = 50.0;
    ccgt.r_slope = 0.5;
    ccgt.emissions = 368.0;
    fleet.push_back(ccgt);
    ccgt.name = "ccgt_north";
    ccgt.region = 2;
    ccgt.count = 25;
    fleet.push_back(ccgt);

    // 30 x 100 MW OCGT split 20/10; fast-start peakers.
    scheduler::GeneratorClass ocgt;
    ocgt.name = "ocgt_south";
    ocgt.region = 1;
    ocgt.count = 20;
    ocgt.p_max = 100.0;
    ocgt.p_msg = 50.0;
    ocgt.c_nl = 3000.0;
    ocgt.c_m = 200.0;
    ocgt.c_st = 0.0;
    ocgt.start_up_time = 0;
    ocgt.min_up = 0;
    ocgt.min_down = 0;
    ocgt.h_const = 5.0;
    ocgt.r_max = 20.0;
    ocgt.r_slope = 0.5;
    ocgt.emissions = 833.0;
    fleet.push_back(ocgt);
    ocgt.name = "ocgt_north";
    ocgt.region = 2;
    ocgt.count = 10;
    fleet.push_back(ocgt);

    return fleet;
}

scheduler::HourlyProfile gen_profiles(std::uint64_t seed, int days, const GbSystem& sys) {
    scheduler::HourlyProfile p;
    const int hours = days * 24;
    rng::Xoshiro256ss gen(seed);
    constexpr double two_pi = 6.283185307179586476925286766559;

    double wind_total = 0.4 * sys.wind_installed;
    const double wind_mean = 0.4 * sys.wind_installed;
    for (int h = 0; h < hours; ++h) {
        // A representative day: the annual envelope spans 20-60 GW, a single
        // day swings between 26 and 58 GW. Low-demand hours must still leave
        // headroom for the minimum-generation budget of the secured fleet.
        const double demand_total =
            42000.0 - 16000.0 * std::cos(two_pi * static_cast<double>(h % 24) / 24.0);
        p.demand1.push_back(sys.demand_share_r1 * demand_total);
        p.demand2.push_back((1.0 - sys.demand_share_r1) * demand_total);

        p.wind1.push_back(sys.wind_share_r1 * wind_total);
        p.wind2.push_back((1.0 - sys.wind_share_r1) * wind_total);
        wind_total = std::clamp(wind_total + 0.25 * (wind_mean - wind_total) +
                                    6000.0 * gen.normal(),
                                0.0, sys.wind_installed);
    }
    return p;
}

std::vector<double> gb_sweep_pd_levels(bool fresh) {
    if (fresh) return {25000.0, 40000.0};
    return {20000.0, 32500.0, 45000.0};
}

sampler::SweepSpec gb_sweep_spec(sampler::SweepTarget target, double pack_p_loss,
                                 int faulted_region, const GbSystem& sys, double pd_total,
                                 bool fresh) {
    sampler::SweepSpec spec;
    spec.target = target;
    spec.faulted_region = faulted_region;
    spec.pd_total = pd_total;
    spec.d_total = sys.d;
    spec.rocof_max = sys.rocof_max;
    spec.df_max = sys.df_max;
    spec.df_ss_max = sys.df_ss_max;
    spec.f0 = sys.f0;
    spec.v1 = sys.v1;
    spec.v2 = sys.v2;
    spec.x12 = sys.x12;
    spec.t_del = sys.t_del;
    spec.boundary_tol = 5e-3;

    // Loss sizes bracket the pack's credible loss so the loss-size
    // coefficient is identified.
    if (fresh)
        spec.p_loss_values = {11.0 / 15.0 * pack_p_loss, 11.0 / 12.0 * pack_p_loss};
    else
        spec.p_loss_values = {2.0 / 3.0 * pack_p_loss, 5.0 / 6.0 * pack_p_loss, pack_p_loss};

    if (target == sampler::SweepTarget::Rocof) {
        spec.walk_increment = 2500.0;
        spec.h_total_factors = {1.0};
        if (!fresh) spec.anchor_scales = {{0.98, 1.0}, {1.05, 1.0}, {1.0, 0.7}, {1.0, 1.3}};
        if (fresh) {
            spec.r_total_factors = {0.35, 0.65};
            spec.d_splits = {0.8};
            spec.r_splits = {0.45, 0.75};
            spec.h_splits = {0.45, 0.65, 0.85};
        } else {
            spec.r_total_factors = {0.25, 0.5, 0.8};
            spec.d_splits = {0.7, 0.9};
            spec.r_splits = {0.35, 0.7};
            spec.h_splits = {0.35, 0.55, 0.75, 0.9};
        }
    } else {
        spec.walk_increment = 200.0;
        if (!fresh) spec.anchor_scales = {{0.97, 1.0}, {1.12, 1.0}, {1.0, 0.95}, {1.0, 1.3}};
        if (fresh) {
            spec.h_total_factors = {1.8, 2.6, 3.4};
            spec.d_splits = {0.85};
            spec.r_splits = {0.4, 0.7};
            spec.h_splits = {0.45, 0.7, 0.88};
        } else {
            spec.h_total_factors = {1.4, 2.1, 2.9, 3.7};
            spec.d_splits = {0.8, 0.9};
            spec.r_splits = {0.25, 0.55, 0.85};
            spec.h_splits = {0.35, 0.5, 0.65, 0.8, 0.9};
        }
    }
    return spec;
}

}  // namespace freqsec::cli
