#pragma once

#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tsmpc/sim/simulate.hpp"

namespace tsmpc {

/// Log-linear fit ln e_t = ln a + r t of an error sequence.
struct RateFit {
  double amplitude = 0.0;
  double rate_per_step = 0.0;
  double rate_per_second = 0.0;
  double r2 = 0.0;
  int samples_used = 0;
};

inline constexpr int kMinFitSamples = 10;

/// Fits over indices t >= floor(skip_fraction * size) with e_t > 0. Throws Error when fewer than
/// kMinFitSamples usable samples remain.
inline RateFit fit_log_linear(std::span<const double> errors, double delta_s, double skip_fraction) {
  if (!(skip_fraction >= 0.0 && skip_fraction < 1.0)) throw ConfigError("skip_fraction must lie in [0, 1)");
  const auto first = static_cast<std::size_t>(std::floor(skip_fraction * static_cast<double>(errors.size())));
  std::vector<double> ts, ys;
  for (std::size_t t = first; t < errors.size(); ++t) {
    if (errors[t] > 0.0 && std::isfinite(errors[t])) {
      ts.push_back(static_cast<double>(t));
      ys.push_back(std::log(errors[t]));
    }
  }
  if (ts.size() < static_cast<std::size_t>(kMinFitSamples)) {
    throw Error("rate fit refused: " + std::to_string(ts.size()) + " positive error samples after skipping, need " +
                std::to_string(kMinFitSamples));
  }
  const double n = static_cast<double>(ts.size());
  double mt = 0.0, my = 0.0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    mt += ts[i];
    my += ys[i];
  }
  mt /= n;
  my /= n;
  double stt = 0.0, sty = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    stt += (ts[i] - mt) * (ts[i] - mt);
    sty += (ts[i] - mt) * (ys[i] - my);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  RateFit fit;
  fit.rate_per_step = sty / stt;
  const double intercept = my - fit.rate_per_step * mt;
  fit.amplitude = std::exp(intercept);
  fit.rate_per_second = fit.rate_per_step / delta_s;
  double ss_res = 0.0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    const double e = ys[i] - (intercept + fit.rate_per_step * ts[i]);
    ss_res += e * e;
  }
  fit.r2 = syy > 0.0 ? 1.0 - ss_res / syy : (ss_res == 0.0 ? 1.0 : 0.0);
  fit.samples_used = static_cast<int>(ts.size());
  return fit;
}

inline std::vector<double> theta_errors(const SimTrace& trace) {
  std::vector<double> e;
  e.reserve(trace.records.size());
  for (const auto& r : trace.records) e.push_back(r.err_theta);
  return e;
}

inline RateFit fit_rate(const SimTrace& trace, double skip_fraction = 0.2) {
  const auto e = theta_errors(trace);
  return fit_log_linear(e, trace.delta.seconds(), skip_fraction);
}

inline std::optional<RateFit> try_fit_rate(const SimTrace& trace, double skip_fraction = 0.2) {
  try {
    return fit_rate(trace, skip_fraction);
  } catch (const ConfigError&) {
    throw;
  } catch (const Error&) {
    return std::nullopt;
  }
}

}  // namespace tsmpc
