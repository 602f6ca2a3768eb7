#pragma once

// JSON and CSV renderings of the harness, decomposition and estimator
// results. Reports never contain timing or worker counts, so identical
// configurations serialize to identical bytes.

#include <cmath>
#include <cstdio>
#include <optional>
#include <sstream>
#include <string>

#include "qmi/squashed.hpp"
#include "qmi/state_io.hpp"
#include "qmi/thales.hpp"
#include "qmi/verify.hpp"

namespace qmi {

inline constexpr const char* report_schema = "qmi-report/1";

namespace detail {

template <class T>
Json opt_json(const std::optional<T>& v) {
  return v ? Json(*v) : Json(nullptr);
}

inline Json finite_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

}  // namespace detail

inline Json to_json(const EnsembleSpec& e) {
  return Json{{"kind", to_string(e.kind)},
              {"dims", e.dims},
              {"ancilla_dim", e.ancilla_dim},
              {"target_epsilon", detail::opt_json(e.target_epsilon)},
              {"seed", e.seed}};
}

inline Json to_json(const TrialConfig& c) {
  return Json{{"harness", to_string(c.harness)},
              {"d1", c.d1},
              {"d2", c.harness == Harness::entropy_continuity ? Json(nullptr) : Json(c.d2)},
              {"trials", c.trials},
              {"seed", c.seed},
              {"tolerance", c.tolerance},
              {"log_base", to_string(c.base)},
              {"span_dimension", c.span == SpanDimension::support_rank ? "support_rank" : "ambient"},
              {"ensemble", to_json(c.resolved_ensemble())}};
}

inline Json to_json(const Witness& w) {
  Json j{{"index", w.index},   {"seed", w.seed},
         {"epsilon", w.epsilon}, {"lhs", w.lhs},
         {"rhs", detail::finite_or_null(w.rhs)}, {"margin", detail::finite_or_null(w.margin)},
         {"ratio", w.ratio}};
  if (w.rho) j["rho"] = state_to_json(*w.rho);
  if (w.sigma) j["sigma"] = state_to_json(*w.sigma);
  return j;
}

inline Json to_json(const TrialReport& r) {
  Json j{{"trials", r.trials},
         {"applicable_trials", r.applicable_trials},
         {"inapplicable_trials", r.inapplicable_trials},
         {"failed_trials", r.failed_trials},
         {"violations", r.violations},
         {"max_lhs", detail::opt_json(r.max_lhs)},
         {"min_margin", detail::opt_json(r.min_margin)},
         {"max_epsilon", detail::opt_json(r.max_epsilon)}};
  if (r.config.harness == Harness::lemma) j["chain_failures"] = r.chain_failures;
  if (r.config.harness == Harness::tightness) {
    j["skipped_trials"] = r.skipped_trials;
    j["max_ratio"] = detail::opt_json(r.max_ratio);
    j["argmax_ratio"] = r.argmax_ratio ? to_json(*r.argmax_ratio) : Json(nullptr);
  }
  j["argmax_lhs"] = r.argmax_lhs ? to_json(*r.argmax_lhs) : Json(nullptr);
  j["argmin_margin"] = r.argmin_margin ? to_json(*r.argmin_margin) : Json(nullptr);
  if (!r.first_error.empty()) j["first_error"] = r.first_error;
  return j;
}

inline Json to_json(const SweepReport& s) {
  Json rows = Json::array();
  for (const SweepRow& r : s.rows) {
    Json ref = Json::array();
    for (const auto& [e, rhs] : r.reference_rhs) ref.push_back(Json{{"epsilon", e}, {"rhs", rhs}});
    rows.push_back(Json{{"d2", r.d2},
                        {"trials", r.trials},
                        {"applicable_trials", r.applicable_trials},
                        {"violations", r.violations},
                        {"failed_trials", r.failed_trials},
                        {"max_lhs", detail::opt_json(r.max_lhs)},
                        {"max_epsilon", detail::opt_json(r.max_epsilon)},
                        {"rhs_at_max_observed_epsilon", detail::opt_json(r.rhs_at_max_observed_epsilon)},
                        {"reference_rhs", std::move(ref)}});
  }
  return Json{{"d1", s.d1},
              {"d2_values", s.d2_values},
              {"d2_free_cap", s.d2_free_cap},
              {"rhs_identical_across_rows", s.rhs_identical_across_rows()},
              {"bounded_by_cap", s.bounded_by_cap()},
              {"violations", s.total_violations()},
              {"rows", std::move(rows)}};
}

inline Json to_json(const ThalesResiduals& r) {
  return Json{{"gamma_via_rho", r.gamma_via_rho},
              {"gamma_via_sigma", r.gamma_via_sigma},
              {"rho_tilde_definition", r.rho_tilde_definition},
              {"sigma_tilde_definition", r.sigma_tilde_definition},
              {"trace_positive_part", r.trace_positive_part},
              {"trace_negative_part", r.trace_negative_part},
              {"min_eigen_rho_tilde", r.min_eigen_rho_tilde},
              {"min_eigen_sigma_tilde", r.min_eigen_sigma_tilde},
              {"trace_rho_tilde", r.trace_rho_tilde},
              {"trace_sigma_tilde", r.trace_sigma_tilde},
              {"holds", r.holds()}};
}

inline Json to_json(const ThalesDecomposition& t) {
  return Json{{"epsilon", t.epsilon},
              {"gamma", state_to_json(t.gamma)},
              {"rho_tilde", state_to_json(t.rho_tilde)},
              {"sigma_tilde", state_to_json(t.sigma_tilde)},
              {"residuals", to_json(residuals(t))}};
}

inline Json to_json(const AssemblyReport& a) {
  return Json{{"epsilon", a.epsilon},     {"lhs", a.lhs},
              {"leg_rho", a.leg_rho},     {"leg_sigma", a.leg_sigma},
              {"triangle", a.triangle},   {"leg_bound", a.leg_bound},
              {"bound", a.bound},         {"margin", a.margin()},
              {"triangle_ok", a.triangle_ok}, {"legs_ok", a.legs_ok},
              {"bound_ok", a.bound_ok}};
}

inline Json to_json(const EsqEstimate& e) {
  Json trace = Json::array();
  for (const RestartTrace& t : e.trace) {
    trace.push_back(Json{{"restart", t.restart},
                         {"start_value", t.start_value},
                         {"best_value", t.best_value},
                         {"iterations", t.iterations},
                         {"evaluations", t.evaluations},
                         {"converged", t.converged},
                         {"history", t.history}});
  }
  return Json{{"best_cmi_half", e.best_cmi_half},
              {"product_baseline", e.product_baseline},
              {"d3", e.shape.d3},
              {"rank", e.shape.rank},
              {"residual", e.shape.residual},
              {"parameters", e.shape.parameter_count()},
              {"restarts", e.restarts},
              {"iterations", e.iterations},
              {"evaluations", e.evaluations},
              {"converged", e.converged},
              {"best_restart", e.best_restart},
              {"log_base", to_string(e.base)},
              {"trace", std::move(trace)}};
}

inline Json to_json(const EsqProbeReport& p) {
  return Json{{"epsilon", p.epsilon},
              {"estimate_rho", p.estimate_rho},
              {"estimate_sigma", p.estimate_sigma},
              {"difference", p.difference},
              {"reference_bound", p.reference_bound},
              {"noise_allowance", p.noise_allowance},
              {"within_reference", p.within_reference}};
}

/// Wraps a payload with the schema tag, command name and resolved config.
inline Json make_report(std::string_view command, Json config, Json payload) {
  Json j{{"schema", report_schema}, {"command", command}, {"config", std::move(config)}};
  for (auto& [k, v] : payload.items()) j[k] = v;
  return j;
}

inline std::string dump_report(const Json& j) { return j.dump(2) + "\n"; }

/// One row per trial: trial_index, epsilon, lhs, rhs, margin. Units follow the
/// report's log base; rhs and margin are empty for inapplicable or failed
/// trials.
inline std::string trials_csv(const TrialReport& r) {
  const std::string unit(to_string(r.config.base));
  std::ostringstream os;
  os.precision(17);
  os << "trial_index,epsilon,lhs_" << unit << ",rhs_" << unit << ",margin_" << unit << "\n";
  for (const TrialRecord& t : r.records) {
    os << t.index << ',' << t.epsilon << ',';
    if (t.failed) {
      os << ",,\n";
      continue;
    }
    os << t.lhs << ',';
    if (t.rhs) os << *t.rhs << ',' << t.margin();
    else os << ',';
    os << "\n";
  }
  return os.str();
}

}  // namespace qmi
