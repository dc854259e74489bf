#include "freqsec/scheduler/fleet.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

#include "freqsec/util/csv.hpp"

namespace freqsec::scheduler {

void GeneratorClass::validate() const {
    auto fail = [this](const std::string& what) {
        throw std::invalid_argument("GeneratorClass '" + name + "': " + what);
    };
    if (name.empty()) fail("name must not be empty");
    if (region != 1 && region != 2) fail("region must be 1 or 2");
    if (count < 1) fail("count must be >= 1");
    if (!(p_msg > 0.0 && p_msg <= p_max)) fail("require 0 < p_msg <= p_max");
    if (c_nl < 0.0 || c_m < 0.0 || c_st < 0.0) fail("costs must be >= 0");
    if (!must_run && start_up_time < 0) fail("start_up_time must be >= 0");
    if (min_up < 0 || min_down < 0) fail("min up/down must be >= 0");
    if (h_const < 0.0) fail("inertia constant must be >= 0");
    if (r_max < 0.0) fail("PFR capacity must be >= 0");
    if (!(r_slope >= 0.0 && r_slope <= 1.0)) fail("r_slope must be in [0, 1]");
    if (emissions < 0.0) fail("emissions must be >= 0");
}

void validate_fleet(const std::vector<GeneratorClass>& classes) {
    if (classes.empty()) throw std::invalid_argument("fleet: no generator classes");
    for (const auto& g : classes) g.validate();
    for (std::size_t i = 0; i < classes.size(); ++i)
        for (std::size_t j = i + 1; j < classes.size(); ++j)
            if (classes[i].name == classes[j].name)
                throw std::invalid_argument("fleet: duplicate class name '" + classes[i].name +
                                            "'");
}

std::vector<GeneratorClass> read_fleet_csv(const std::string& path) {
    const auto table = csv::read_file(path);
    auto col = [&](const char* name) { return table.column(name); };
    const int c_name = col("name"), c_region = col("region"), c_count = col("count");
    const int c_pmax = col("p_max_mw"), c_pmsg = col("p_msg_mw");
    const int c_nl = col("no_load_cost"), c_m = col("marginal_cost"), c_st = col("startup_cost");
    const int c_sut = col("startup_time_h"), c_up = col("min_up_h"), c_dn = col("min_down_h");
    const int c_h = col("inertia_const_s"), c_rmax = col("pfr_max_mw"), c_slope = col("pfr_slope");
    const int c_em = col("emissions_g_per_kwh");

    std::vector<GeneratorClass> classes;
    for (const auto& row : table.rows) {
        GeneratorClass g;
        g.name = csv::trim(row[static_cast<std::size_t>(c_name)]);
        g.region = static_cast<int>(csv::to_double(row[static_cast<std::size_t>(c_region)]));
        g.count = static_cast<int>(csv::to_double(row[static_cast<std::size_t>(c_count)]));
        g.p_max = csv::to_double(row[static_cast<std::size_t>(c_pmax)]);
        g.p_msg = csv::to_double(row[static_cast<std::size_t>(c_pmsg)]);
        g.c_nl = csv::to_double(row[static_cast<std::size_t>(c_nl)]);
        g.c_m = csv::to_double(row[static_cast<std::size_t>(c_m)]);
        const std::string sut = csv::trim(row[static_cast<std::size_t>(c_sut)]);
        if (sut == "na" || sut == "NA" || sut == "n/a") {
            g.must_run = true;
            g.c_st = 0.0;
            g.start_up_time = 0;
            g.min_up = 0;
            g.min_down = 0;
        } else {
            const std::string st = csv::trim(row[static_cast<std::size_t>(c_st)]);
            g.c_st = (st == "na" || st == "NA") ? 0.0 : csv::to_double(st);
            g.start_up_time = static_cast<int>(csv::to_double(sut));
            g.min_up = static_cast<int>(csv::to_double(row[static_cast<std::size_t>(c_up)]));
            g.min_down = static_cast<int>(csv::to_double(row[static_cast<std::size_t>(c_dn)]));
        }
        g.h_const = csv::to_double(row[static_cast<std::size_t>(c_h)]);
        g.r_max = csv::to_double(row[static_cast<std::size_t>(c_rmax)]);
        g.r_slope = csv::to_double(row[static_cast<std::size_t>(c_slope)]);
        g.emissions = csv::to_double(row[static_cast<std::size_t>(c_em)]);
        classes.push_back(std::move(g));
    }
    validate_fleet(classes);
    return classes;
}

std::string fleet_to_csv(const std::vector<GeneratorClass>& classes) {
    std::ostringstream out;
    out << "name,region,count,p_max_mw,p_msg_mw,no_load_cost,marginal_cost,startup_cost,"
           "startup_time_h,min_up_h,min_down_h,inertia_const_s,pfr_max_mw,pfr_slope,"
           "emissions_g_per_kwh\n";
    for (const auto& g : classes) {
        out << g.name << ',' << g.region << ',' << g.count << ',' << csv::format_double(g.p_max)
            << ',' << csv::format_double(g.p_msg) << ',' << csv::format_double(g.c_nl) << ','
            << csv::format_double(g.c_m) << ',';
        if (g.must_run)
            out << "na,na,na,na,";
        else
            out << csv::format_double(g.c_st) << ',' << g.start_up_time << ',' << g.min_up << ','
                << g.min_down << ',';
        out << csv::format_double(g.h_const) << ',' << csv::format_double(g.r_max) << ','
            << csv::format_double(g.r_slope) << ',' << csv::format_double(g.emissions) << '\n';
    }
    return out.str();
}

}  // namespace freqsec::scheduler
