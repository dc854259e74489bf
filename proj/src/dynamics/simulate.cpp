#include "freqsec/dynamics/simulate.hpp"

#include <sstream>
#include <stdexcept>

#include "freqsec/dynamics/swing_model.hpp"
#include "freqsec/util/csv.hpp"

namespace freqsec::dynamics {

FrequencyTrace simulate(const OperatingPoint& point, const SimParams& params) {
    FrequencyTrace trace;
    const std::size_t n = params.step_count() + 1;
    trace.times.reserve(n);
    trace.df1.reserve(n);
    trace.df2.reserve(n);
    trace.tie_flow.reserve(n);
    trace.df_coi.reserve(n);

    const double w1 = point.h1 / (point.h1 + point.h2);
    const double w2 = point.h2 / (point.h1 + point.h2);

    integrate_swing(point, params,
                    [&](std::size_t, double t, const SwingState& y, double tie) {
                        trace.times.push_back(t);
                        trace.df1.push_back(y.df1);
                        trace.df2.push_back(y.df2);
                        trace.tie_flow.push_back(tie);
                        trace.df_coi.push_back(w1 * y.df1 + w2 * y.df2);
                    });
    return trace;
}

TraceStats analyze(const FrequencyTrace& trace, const OperatingPoint& point) {
    if (trace.size() < 2)
        throw std::invalid_argument("analyze: trace must have at least 2 samples");
    point.validate();
    const double dt = trace.times[1] - trace.times[0];
    StatsAccumulator acc(point, dt);
    for (std::size_t k = 0; k < trace.size(); ++k) acc.add(k, trace.df1[k], trace.df2[k]);
    return acc.finalize();
}

double coi_nadir_threshold(double p_loss, double f0, double t_del, double df_max) {
    if (!(p_loss >= 0.0) || !(f0 > 0.0) || !(t_del > 0.0) || !(df_max > 0.0))
        throw std::invalid_argument("coi_nadir_threshold: arguments must be positive");
    return f0 * p_loss * p_loss * t_del / (4.0 * df_max);
}

std::string trace_to_csv(const FrequencyTrace& trace) {
    std::ostringstream out;
    out << "t,df1,df2,tie_flow,df_coi\n";
    for (std::size_t k = 0; k < trace.size(); ++k) {
        out << csv::format_double(trace.times[k]) << ',' << csv::format_double(trace.df1[k])
            << ',' << csv::format_double(trace.df2[k]) << ','
            << csv::format_double(trace.tie_flow[k]) << ','
            << csv::format_double(trace.df_coi[k]) << '\n';
    }
    return out.str();
}

void write_trace_csv(const FrequencyTrace& trace, const std::string& path) {
    csv::write_file(path, trace_to_csv(trace));
}

}  // namespace freqsec::dynamics
