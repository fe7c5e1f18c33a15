#pragma once

#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "tsmpc/certify/certificate.hpp"

namespace tsmpc::certify {

namespace detail {

inline std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::vector<std::pair<std::string, const Estimate*>> named_estimates(const ConstantEstimates& E) {
  return {{"L_f", &E.L_f},   {"L_g", &E.L_g},         {"L_xi", &E.L_xi},   {"L_T", &E.L_T},
          {"L_zstar", &E.L_zstar}, {"L_h", &E.L_h}, {"L_G", &E.L_G},     {"L_f_slow", &E.L_f_slow},
          {"a1", &E.a1},     {"a2", &E.a2},           {"a3", &E.a3},       {"a4", &E.a4},
          {"b1", &E.b1},     {"b2", &E.b2},           {"b3", &E.b3},       {"b4", &E.b4},
          {"c1", &E.c1},     {"c2", &E.c2},           {"c3", &E.c3},       {"c4", &E.c4},
          {"c4_centered", &E.c4_centered}};
}

inline nlohmann::json vec_json(const Vector& v) {
  nlohmann::json a = nlohmann::json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

inline nlohmann::json num_or_null(double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(); }

}  // namespace detail

inline void write_text(std::ostream& out, const CertificateReport& r) {
  using detail::g17;
  out << "certificate for model " << r.model << "\n";
  out << "result = " << (r.passed() ? "PASS" : "FAIL") << "\n";
  out << "delta_nominal = " << g17(r.delta_nominal) << "\n";
  out << "horizon_N = " << r.horizon_N << "\n";
  out << "\n[sampling]\n";
  out << "x range = " << fmt(r.plan.x_lo) << " .. " << fmt(r.plan.x_hi) << "\n";
  out << "xi range = " << fmt(r.plan.xi_lo) << " .. " << fmt(r.plan.xi_hi) << "\n";
  out << "u range = " << fmt(r.plan.u_lo) << " .. " << fmt(r.plan.u_hi) << "\n";
  out << "state region = |x - x*| <= " << g17(r.plan.region_radius) << "\n";
  out << "boundary-layer region = |xi~|, |z~| <= " << g17(r.plan.bl_radius) << "\n";
  out << "near region = " << g17(r.plan.near_radius) << "\n";
  out << "safety_factor = " << g17(r.plan.safety_factor) << "\n";
  out << "seed = " << r.plan.seed << "\n";
  out << "\n[constants]\n";
  for (const auto& [name, e] : detail::named_estimates(r.est)) {
    out << name << " = " << g17(e->value) << "  (" << to_string(e->method);
    if (std::isfinite(e->sampled) && e->method != Method::derived) out << ", sampled " << g17(e->sampled);
    if (e->samples > 0) out << ", " << e->samples << " samples";
    out << ")\n";
  }
  if (r.lem1) {
    out << "\n[lemma1]\n";
    out << "lem1.k1 = " << g17(r.lem1->k1) << "\n";
    out << "lem1.k2 = " << g17(r.lem1->k2) << "\n";
    out << "kappa_threshold = " << g17(r.lem1->kappa_threshold) << "\n";
    out << "kappa = " << g17(r.lem1->kappa) << "\n";
    out << "min eig H(kappa) = " << g17(r.lem1->h_min_eig) << "\n";
    out << "d1 = " << g17(r.d1) << "\nd2 = " << g17(r.d2) << "\nd3 (measured) = " << g17(r.d3_measured)
        << "\nd4 = " << g17(r.d4) << "\n";
  }
  if (r.thm2) {
    const auto& t = *r.thm2;
    out << "\n[theorem2]\n";
    const double k[] = {t.k1, t.k2, t.k3, t.k4, t.k5, t.k6, t.k7, t.k8};
    for (int i = 0; i < 8; ++i) out << "thm2.k" << i + 1 << " = " << g17(k[i]) << "\n";
    out << "c3 = " << g17(t.c3) << "\nb3 = " << g17(t.b3) << "\n";
  }
  out << "\n";
  out << "delta_caps =";
  for (double c : r.delta_caps) out << " " << g17(c);
  out << "\n";
  if (r.delta_bar.value) {
    out << "delta_bar = " << g17(*r.delta_bar.value) << " (" << r.delta_bar.diagnostic << ")\n";
  } else {
    out << "delta_bar = none (" << r.delta_bar.diagnostic << ")\n";
  }
  out << "\n[verdicts]\n";
  for (const auto& v : r.verdicts) {
    out << (v.evaluated ? (v.passed ? "PASS" : "FAIL") : "FAIL (not evaluated)") << "  " << v.name << "\n";
    out << "    check: " << v.inequality << "\n";
    out << "    " << v.detail << "\n";
    if (!v.witness.empty()) out << "    witness: " << v.witness << "\n";
  }
}

/// Key schema: model, passed, delta_nominal, horizon_N, sampling{...}, constants{name: {value,
/// sampled, method, samples}}, lemma1{...} | null, theorem2{...} | null, delta_bar (number | null),
/// delta_bar_diagnostic, delta_caps[], verdicts[{name, inequality, evaluated, passed, detail,
/// witness}].
inline nlohmann::json to_json(const CertificateReport& r) {
  using nlohmann::json;
  json j;
  j["model"] = r.model;
  j["passed"] = r.passed();
  j["delta_nominal"] = r.delta_nominal;
  j["horizon_N"] = r.horizon_N;
  const SamplingPlan& p = r.plan;
  j["sampling"] = {{"x_lo", detail::vec_json(p.x_lo)},
                   {"x_hi", detail::vec_json(p.x_hi)},
                   {"xi_lo", detail::vec_json(p.xi_lo)},
                   {"xi_hi", detail::vec_json(p.xi_hi)},
                   {"u_lo", detail::vec_json(p.u_lo)},
                   {"u_hi", detail::vec_json(p.u_hi)},
                   {"region_radius", p.region_radius},
                   {"bl_radius", p.bl_radius},
                   {"near_radius", p.near_radius},
                   {"lipschitz_samples", p.lipschitz_samples},
                   {"bound_samples", p.bound_samples},
                   {"bl_samples", p.bl_samples},
                   {"state_pool", p.state_pool},
                   {"vdecrease_samples", p.vdecrease_samples},
                   {"multistart_states", p.multistart_states},
                   {"multistart", p.multistart},
                   {"decrease_fractions", p.decrease_fractions},
                   {"safety_factor", p.safety_factor},
                   {"seed", p.seed}};
  json c = json::object();
  for (const auto& [name, e] : detail::named_estimates(r.est)) {
    c[name] = {{"value", detail::num_or_null(e->value)},
               {"sampled", detail::num_or_null(e->sampled)},
               {"method", to_string(e->method)},
               {"samples", e->samples}};
  }
  j["constants"] = c;
  if (r.lem1) {
    j["lemma1"] = {{"k1", r.lem1->k1},
                   {"k2", r.lem1->k2},
                   {"kappa_threshold", r.lem1->kappa_threshold},
                   {"kappa", r.lem1->kappa},
                   {"h_min_eig", r.lem1->h_min_eig},
                   {"d1", r.d1},
                   {"d2", r.d2},
                   {"d3_measured", detail::num_or_null(r.d3_measured)},
                   {"d4", r.d4}};
  } else {
    j["lemma1"] = nullptr;
  }
  if (r.thm2) {
    const auto& t = *r.thm2;
    j["theorem2"] = {{"k1", t.k1}, {"k2", t.k2}, {"k3", t.k3}, {"k4", t.k4}, {"k5", t.k5},
                     {"k6", t.k6}, {"k7", t.k7}, {"k8", t.k8}, {"c3", t.c3}, {"b3", t.b3}};
    if (r.sylvester) {
      j["theorem2"]["sylvester"] = {{"delta", r.sylvester->delta},
                                    {"min_eig", r.sylvester->min_eig},
                                    {"det", r.sylvester->det},
                                    {"det_identity", r.sylvester->det_identity},
                                    {"printed_condition", r.sylvester->printed_condition},
                                    {"minors_positive", r.sylvester->minors_positive}};
    }
  } else {
    j["theorem2"] = nullptr;
  }
  j["delta_bar"] = r.delta_bar.value ? json(*r.delta_bar.value) : json();
  j["delta_bar_diagnostic"] = r.delta_bar.diagnostic;
  j["delta_caps"] = r.delta_caps;
  json vs = json::array();
  for (const auto& v : r.verdicts) {
    vs.push_back({{"name", v.name},
                  {"inequality", v.inequality},
                  {"evaluated", v.evaluated},
                  {"passed", v.passed},
                  {"detail", v.detail},
                  {"witness", v.witness}});
  }
  j["verdicts"] = vs;
  return j;
}

inline void write_json(std::ostream& out, const CertificateReport& r) { out << to_json(r).dump(2) << "\n"; }

}  // namespace tsmpc::certify
