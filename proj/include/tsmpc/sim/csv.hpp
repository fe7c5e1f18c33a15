#pragma once

#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

#include "tsmpc/sim/compare.hpp"

namespace tsmpc::csv {

inline constexpr const char* kTraceHeader =
    "step,time_s,theta,omega,current,u,err_norm,err_theta,stage_cost,solver_iters,pg_norm";
inline constexpr const char* kComparisonHeader =
    "delta,plant,solver,final_err_theta,rate_per_s,r2,mean_iters,diverged";

/// Shortest text that round-trips the double exactly.
inline std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline double component(const Vector& v, Eigen::Index i) { return i < v.size() ? v[i] : 0.0; }

inline void write_trace(std::ostream& out, const SimTrace& trace) {
  out << kTraceHeader << '\n';
  for (const auto& r : trace.records) {
    out << r.step << ',' << num(r.time_s) << ',' << num(component(r.x, 0)) << ',' << num(component(r.x, 1)) << ','
        << num(component(r.xi, 0)) << ',' << num(component(r.u, 0)) << ',' << num(r.err_norm) << ','
        << num(r.err_theta) << ',' << num(r.stage_cost) << ',' << r.solver_iters << ',' << num(r.pg_norm) << '\n';
  }
}

inline void write_comparison(std::ostream& out, const std::vector<ComparisonRow>& rows) {
  out << kComparisonHeader << '\n';
  for (const auto& r : rows) {
    out << num(r.delta) << ',' << to_string(r.strategy.plant) << ',' << to_string(r.strategy.solver) << ','
        << num(r.final_err_theta) << ',' << num(r.rate_per_s) << ',' << num(r.r2) << ',' << num(r.mean_iters) << ','
        << (r.diverged ? 1 : 0) << '\n';
  }
}

/// gnuplot script: states and semilog angle error for each trace, one page per file.
inline void write_trace_plot(std::ostream& out, const std::vector<std::string>& trace_files,
                             const std::vector<std::string>& titles) {
  out << "set datafile separator ','\n"
         "set key autotitle columnhead\n"
         "set terminal pngcairo size 1200,500\n";
  for (std::size_t i = 0; i < trace_files.size(); ++i) {
    const std::string& f = trace_files[i];
    const std::string title = i < titles.size() ? titles[i] : f;
    out << "set output '" << f.substr(0, f.rfind('.')) << ".png'\n"
        << "set multiplot layout 1,2 title '" << title << "'\n"
        << "unset logscale y\nset xlabel 'time [s]'\n"
        << "plot '" << f << "' using 2:3 with lines title 'theta', '' using 2:4 with lines title 'omega'\n"
        << "set logscale y\nset ylabel '|theta error|'\n"
        << "plot '" << f << "' using 2:($8 > 0 ? $8 : NaN) with lines title 'err theta'\n"
        << "unset multiplot\n";
  }
}

}  // namespace tsmpc::csv
