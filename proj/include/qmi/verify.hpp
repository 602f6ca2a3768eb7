#pragma once

// Randomized verification of the continuity bounds.
//
// Every harness draws trial i from an engine keyed by (seed, i), evaluates a
// left-hand side and a bound, and reduces in index order. Reports therefore
// depend only on the configuration, never on how many workers ran it.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "qmi/ensembles.hpp"
#include "qmi/entropy.hpp"
#include "qmi/parallel.hpp"
#include "qmi/qmat.hpp"
#include "qmi/thales.hpp"

namespace qmi {

inline constexpr std::uint64_t default_seed = 3735928559ULL;

enum class Harness { theorem, lemma, entropy_continuity, tightness };

constexpr std::string_view to_string(Harness h) noexcept {
  switch (h) {
    case Harness::theorem: return "theorem";
    case Harness::lemma: return "lemma";
    case Harness::entropy_continuity: return "continuity";
    case Harness::tightness: return "tightness";
  }
  return "unknown";
}

inline Harness parse_harness(std::string_view s) {
  for (auto h : {Harness::theorem, Harness::lemma, Harness::entropy_continuity, Harness::tightness}) {
    if (to_string(h) == s) return h;
  }
  throw Error(ErrorCode::invalid_argument, "unknown harness '" + std::string(s) + "'");
}

struct TrialConfig {
  Harness harness = Harness::theorem;
  Index d1 = 2;
  Index d2 = 2;  // ignored by the entropy-continuity harness
  std::size_t trials = 1000;
  EnsembleSpec ensemble{};  // dims and seed are filled from d1/d2/seed
  std::uint64_t seed = default_seed;
  double tolerance = tol::inequality;
  LogBase base = LogBase::bits;
  SpanDimension span = SpanDimension::support_rank;
  unsigned workers = 1;
  bool keep_records = false;

  Dims dims() const {
    return harness == Harness::entropy_continuity ? Dims{d1} : Dims{d1, d2};
  }
  EnsembleSpec resolved_ensemble() const {
    EnsembleSpec e = ensemble;
    e.dims = dims();
    e.seed = seed;
    return e;
  }
};

/// One evaluated trial. rhs is empty when the bound does not apply (eps > 1)
/// or the trial failed numerically.
struct TrialRecord {
  std::size_t index = 0;
  double epsilon = 0.0;
  double lhs = 0.0;
  std::optional<double> rhs;
  bool failed = false;
  bool chain_ok = true;  // lemma harness: the internal inequalities held
  std::string error;

  bool applicable() const { return !failed && rhs.has_value(); }
  double margin() const { return rhs ? *rhs - lhs : std::numeric_limits<double>::quiet_NaN(); }
};

struct Witness {
  std::size_t index = 0;
  std::uint64_t seed = 0;
  double epsilon = 0.0;
  double lhs = 0.0;
  double rhs = 0.0;
  double margin = 0.0;
  double ratio = 0.0;
  std::optional<DensityMatrix> rho;
  std::optional<DensityMatrix> sigma;
};

struct TrialReport {
  TrialConfig config;
  std::size_t trials = 0;
  std::size_t applicable_trials = 0;
  std::size_t inapplicable_trials = 0;
  std::size_t failed_trials = 0;
  std::size_t violations = 0;
  std::size_t chain_failures = 0;  // lemma harness only
  std::size_t skipped_trials = 0;  // tightness harness: identical pairs
  std::optional<double> max_lhs;
  std::optional<double> min_margin;
  std::optional<double> max_epsilon;
  std::optional<double> max_ratio;  // lhs / rhs, tightness harness
  std::optional<Witness> argmax_lhs;
  std::optional<Witness> argmin_margin;
  std::optional<Witness> argmax_ratio;
  std::string first_error;
  double wall_time_seconds = 0.0;  // not part of the serialized report
  std::vector<TrialRecord> records;
};

namespace detail {

inline StatePair draw_for(const TrialConfig& cfg, std::size_t index) {
  return draw_pair(cfg.resolved_ensemble(), index);
}

// rho, rho_tilde and eps for lemma trials. eps comes from the ensemble's
// target_epsilon when set, uniform on [0,1] otherwise.
struct LemmaDraw {
  DensityMatrix rho;
  DensityMatrix rho_tilde;
  double epsilon;
};

inline LemmaDraw lemma_draw(const TrialConfig& cfg, std::size_t index) {
  const EnsembleSpec spec = cfg.resolved_ensemble();
  Engine rng = make_engine(spec.seed, index);
  const Index k = spec.ancilla_dim == 0 ? dims_product(spec.dims) : spec.ancilla_dim;
  DensityMatrix a = spec.kind == EnsembleKind::haar_pure ? haar_pure(spec.dims, rng)
                                                         : induced_mixed(spec.dims, k, rng);
  DensityMatrix b = spec.kind == EnsembleKind::haar_pure ? haar_pure(spec.dims, rng)
                                                         : induced_mixed(spec.dims, k, rng);
  const double eps = spec.target_epsilon ? *spec.target_epsilon
                                         : std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  return {std::move(a), std::move(b), eps};
}

inline double cond(const DensityMatrix& r, LogBase b) { return conditional_entropy(r, b).value; }

inline TrialRecord evaluate_trial(const TrialConfig& cfg, std::size_t index,
                                  const std::function<StatePair(std::size_t)>& source) {
  TrialRecord rec;
  rec.index = index;
  try {
    switch (cfg.harness) {
      case Harness::theorem:
      case Harness::tightness: {
        const StatePair p = source(index);
        rec.epsilon = trace_distance(p.rho, p.sigma);
        rec.lhs = std::abs(cond(p.rho, cfg.base) - cond(p.sigma, cfg.base));
        if (rec.epsilon <= 1.0 + tol::epsilon_edge) rec.rhs = af_bound(rec.epsilon, cfg.d1, cfg.base);
        break;
      }
      case Harness::lemma: {
        const LemmaDraw dr = lemma_draw(cfg, index);
        const LemmaChainReport c = check_lemma_chain(dr.rho, dr.rho_tilde, dr.epsilon, cfg.base, cfg.tolerance);
        rec.epsilon = dr.epsilon;
        rec.lhs = std::abs(c.difference);
        rec.rhs = c.lemma_bound;
        rec.chain_ok = c.concavity_ok && c.marginal_concavity_ok && c.mixing_ok &&
                       c.upper_chain_ok && c.lower_chain_ok;
        break;
      }
      case Harness::entropy_continuity: {
        const StatePair p = source(index);
        rec.epsilon = trace_distance(p.rho, p.sigma);
        rec.lhs = std::abs(von_neumann_entropy(p.rho, cfg.base).value -
                           von_neumann_entropy(p.sigma, cfg.base).value);
        const Index d = cfg.span == SpanDimension::support_rank ? support_span_rank(p.rho, p.sigma)
                                                                : p.rho.dim();
        if (rec.epsilon <= 1.0 + tol::epsilon_edge) {
          rec.rhs = entropy_continuity_bound(rec.epsilon, std::max<Index>(d, 1), cfg.base);
        }
        break;
      }
    }
  } catch (const std::exception& e) {
    rec.failed = true;
    rec.rhs.reset();
    rec.error = e.what();
  }
  return rec;
}

inline Witness make_witness(const TrialConfig& cfg, const TrialRecord& rec,
                            const std::function<StatePair(std::size_t)>& source) {
  Witness w;
  w.index = rec.index;
  w.seed = cfg.seed;
  w.epsilon = rec.epsilon;
  w.lhs = rec.lhs;
  w.rhs = rec.rhs.value_or(std::numeric_limits<double>::quiet_NaN());
  w.margin = rec.margin();
  w.ratio = (rec.rhs && *rec.rhs > 0.0) ? rec.lhs / *rec.rhs : 0.0;
  if (cfg.harness == Harness::lemma) {
    LemmaDraw dr = lemma_draw(cfg, rec.index);
    w.rho = dr.rho;
    w.sigma = mix(dr.rho, dr.rho_tilde, dr.epsilon);  // gamma
  } else {
    StatePair p = source(rec.index);
    w.rho = std::move(p.rho);
    w.sigma = std::move(p.sigma);
  }
  return w;
}

}  // namespace detail

/// Runs a harness over `cfg.trials` pairs produced by `source` (defaults to the
/// configured ensemble).
inline TrialReport run_trials(const TrialConfig& cfg,
                              std::function<StatePair(std::size_t)> source = {}) {
  if (cfg.trials < 1) throw Error(ErrorCode::invalid_argument, "trials must be >= 1");
  if (cfg.d1 < 2 && cfg.harness != Harness::entropy_continuity) {
    throw Error(ErrorCode::invalid_argument, "d1 must be >= 2");
  }
  if (cfg.d1 < 1 || cfg.d2 < 1) throw Error(ErrorCode::invalid_argument, "dimensions must be >= 1");
  cfg.resolved_ensemble().validate();
  if (!source) source = [&cfg](std::size_t i) { return detail::draw_for(cfg, i); };

  const auto start = std::chrono::steady_clock::now();
  std::vector<TrialRecord> recs(cfg.trials);
  parallel_for(cfg.trials, cfg.workers,
               [&](std::size_t i) { recs[i] = detail::evaluate_trial(cfg, i, source); });

  TrialReport rep;
  rep.config = cfg;
  rep.trials = cfg.trials;
  const TrialRecord* best_lhs = nullptr;
  const TrialRecord* worst_margin = nullptr;
  const TrialRecord* best_ratio = nullptr;
  double best_ratio_value = -1.0;
  for (const TrialRecord& r : recs) {
    if (r.failed) {
      ++rep.failed_trials;
      if (rep.first_error.empty()) rep.first_error = r.error;
      continue;
    }
    if (!r.rhs) {
      ++rep.inapplicable_trials;
      continue;
    }
    ++rep.applicable_trials;
    if (r.lhs > *r.rhs + cfg.tolerance) ++rep.violations;
    if (!r.chain_ok) ++rep.chain_failures;
    if (!best_lhs || r.lhs > best_lhs->lhs) best_lhs = &r;
    if (!worst_margin || r.margin() < worst_margin->margin()) worst_margin = &r;
    rep.max_epsilon = std::max(rep.max_epsilon.value_or(r.epsilon), r.epsilon);
    if (cfg.harness == Harness::tightness) {
      if (r.epsilon == 0.0 || *r.rhs <= 0.0) {
        ++rep.skipped_trials;
      } else if (const double ratio = r.lhs / *r.rhs; ratio > best_ratio_value) {
        best_ratio_value = ratio;
        best_ratio = &r;
      }
    }
  }
  if (best_lhs) {
    rep.max_lhs = best_lhs->lhs;
    rep.argmax_lhs = detail::make_witness(cfg, *best_lhs, source);
  }
  if (worst_margin) {
    rep.min_margin = worst_margin->margin();
    rep.argmin_margin = detail::make_witness(cfg, *worst_margin, source);
  }
  if (best_ratio) {
    rep.max_ratio = best_ratio_value;
    rep.argmax_ratio = detail::make_witness(cfg, *best_ratio, source);
  }
  if (cfg.keep_records) rep.records = std::move(recs);
  rep.wall_time_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rep;
}

inline TrialReport run_theorem_trials(TrialConfig cfg, std::function<StatePair(std::size_t)> source = {}) {
  cfg.harness = Harness::theorem;
  return run_trials(cfg, std::move(source));
}

inline TrialReport run_lemma_trials(TrialConfig cfg) {
  cfg.harness = Harness::lemma;
  return run_trials(cfg);
}

inline TrialReport entropy_continuity_trials(TrialConfig cfg,
                                             std::function<StatePair(std::size_t)> source = {}) {
  cfg.harness = Harness::entropy_continuity;
  return run_trials(cfg, std::move(source));
}

inline TrialReport tightness_probe(TrialConfig cfg, std::function<StatePair(std::size_t)> source = {}) {
  cfg.harness = Harness::tightness;
  return run_trials(cfg, std::move(source));
}

/// Largest value of af_bound over eps in [0,1]. The maximizer is
/// eps* = d1^2 / (d1^2 + 1); nothing here depends on d2.
inline double af_bound_supremum(Index d1, LogBase base = LogBase::bits) {
  const double dd = static_cast<double>(d1 * d1);
  return af_bound(dd / (dd + 1.0), d1, base);
}

struct SweepRow {
  Index d2 = 0;
  std::size_t trials = 0;
  std::size_t applicable_trials = 0;
  std::size_t violations = 0;
  std::size_t failed_trials = 0;
  std::optional<double> max_lhs;
  std::optional<double> max_epsilon;
  std::optional<double> rhs_at_max_observed_epsilon;
  std::vector<std::pair<double, double>> reference_rhs;  // (eps, af_bound(eps, d1))
};

struct SweepReport {
  Index d1 = 2;
  std::vector<Index> d2_values;
  TrialConfig base_config;
  std::vector<double> reference_epsilons;
  double d2_free_cap = 0.0;  // sup over eps of af_bound(eps, d1)
  std::vector<SweepRow> rows;

  std::size_t total_violations() const {
    std::size_t v = 0;
    for (const auto& r : rows) v += r.violations;
    return v;
  }
  bool rhs_identical_across_rows() const {
    for (const auto& r : rows) {
      if (r.reference_rhs != rows.front().reference_rhs) return false;
    }
    return true;
  }
  bool bounded_by_cap() const {
    for (const auto& r : rows) {
      if (r.max_lhs && *r.max_lhs > d2_free_cap + base_config.tolerance) return false;
    }
    return true;
  }
};

/// Theorem trials at fixed d1 for each d2 in turn.
inline SweepReport dim_sweep(const TrialConfig& cfg, const std::vector<Index>& d2_values) {
  if (d2_values.empty()) throw Error(ErrorCode::invalid_argument, "empty d2 list");
  SweepReport rep;
  rep.d1 = cfg.d1;
  rep.d2_values = d2_values;
  rep.base_config = cfg;
  rep.base_config.harness = Harness::theorem;
  rep.reference_epsilons = {0.25, 0.5, 0.75, 1.0};
  rep.d2_free_cap = af_bound_supremum(cfg.d1, cfg.base);
  for (Index d2 : d2_values) {
    if (d2 < 1) throw Error(ErrorCode::invalid_argument, "d2 must be >= 1");
    TrialConfig c = rep.base_config;
    c.d2 = d2;
    c.keep_records = false;
    const TrialReport t = run_trials(c);
    SweepRow row;
    row.d2 = d2;
    row.trials = t.trials;
    row.applicable_trials = t.applicable_trials;
    row.violations = t.violations;
    row.failed_trials = t.failed_trials;
    row.max_lhs = t.max_lhs;
    row.max_epsilon = t.max_epsilon;
    if (t.max_epsilon) row.rhs_at_max_observed_epsilon = af_bound(*t.max_epsilon, cfg.d1, cfg.base);
    for (double e : rep.reference_epsilons) row.reference_rhs.emplace_back(e, af_bound(e, cfg.d1, cfg.base));
    rep.rows.push_back(std::move(row));
  }
  return rep;
}

}  // namespace qmi
