// qmi: command-line front end for the conditional-entropy continuity toolkit.
//
// Exit codes: 0 success, 2 a checked bound or identity was violated, 1 usage,
// I/O or validation errors (reported as a single "qmi-error[Code]: ..." line).

#include <cstdint>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qmi/qmi.hpp"

namespace {

using namespace qmi;

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitViolation = 2;

struct Common {
  std::uint64_t seed = default_seed;
  bool nats = false;
  std::string out;
  unsigned workers = 1;

  LogBase base() const { return nats ? LogBase::nats : LogBase::bits; }
};

void add_common(CLI::App* cmd, Common& c, bool with_seed = true) {
  if (with_seed) cmd->add_option("--seed", c.seed, "Master seed")->capture_default_str();
  cmd->add_flag("--nats", c.nats, "Report entropies and bounds in nats instead of bits");
  cmd->add_option("--out", c.out, "Write the report to this path");
  cmd->add_option("--workers", c.workers, "Worker threads (results do not depend on it)")
      ->capture_default_str();
}

void emit(const Json& report, const Common& c) {
  if (c.out.empty()) return;
  write_file_atomic(c.out, dump_report(report));
  std::cout << "report written to " << c.out << "\n";
}

std::vector<Index> parse_index_list(const std::string& s) {
  std::vector<Index> out;
  std::stringstream ss(s);
  std::string part;
  while (std::getline(ss, part, ',')) {
    std::size_t used = 0;
    long long v = 0;
    try {
      v = std::stoll(part, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (part.empty() || used != part.size() || v < 1) {
      throw Error(ErrorCode::invalid_argument, "bad list entry '" + part + "' in '" + s + "'");
    }
    out.push_back(static_cast<Index>(v));
  }
  if (out.empty()) throw Error(ErrorCode::invalid_argument, "empty list");
  return out;
}

// --- entropy ---------------------------------------------------------------

struct EntropyArgs {
  std::string state;
  Common common;
};

int run_entropy(const EntropyArgs& a) {
  const DensityMatrix rho = resolve_state(a.state);
  const LogBase b = a.common.base();
  const std::string unit(to_string(b));
  Json payload{{"dims", rho.dims()}, {"entropy", von_neumann_entropy(rho, b).value}};
  std::cout << std::setprecision(12);
  std::cout << "dims " << dims_to_string(rho.dims()) << "\n";
  std::cout << "S = " << payload["entropy"].get<double>() << " " << unit << "\n";
  if (rho.parties() == 2) {
    const double ce = conditional_entropy(rho, b).value;
    const double mi = mutual_information(rho, b);
    payload["conditional_entropy"] = ce;
    payload["mutual_information"] = mi;
    std::cout << "S(1|2) = " << ce << " " << unit << "\n";
    std::cout << "I(1;2) = " << mi << " " << unit << "\n";
  }
  if (rho.parties() == 3) {
    const double cmi = conditional_mutual_information(rho, b);
    payload["conditional_mutual_information"] = cmi;
    std::cout << "I(1;2|3) = " << cmi << " " << unit << "\n";
  }
  emit(make_report("entropy", Json{{"state", a.state}, {"log_base", unit}}, std::move(payload)),
       a.common);
  return kExitOk;
}

// --- thales ----------------------------------------------------------------

struct ThalesArgs {
  std::string a;
  std::string b;
  Common common;
};

int run_thales(const ThalesArgs& args) {
  const DensityMatrix rho = resolve_state(args.a);
  const DensityMatrix sigma = resolve_state(args.b);
  const ThalesDecomposition t = decompose(rho, sigma);
  const ThalesResiduals r = residuals(t);
  Json payload = to_json(t);
  std::cout << std::setprecision(6);
  std::cout << "epsilon = " << std::setprecision(12) << t.epsilon << "\n" << std::setprecision(3);
  std::cout << "residuals: gamma-via-rho " << r.gamma_via_rho << ", gamma-via-sigma "
            << r.gamma_via_sigma << ", rho~ " << r.rho_tilde_definition << ", sigma~ "
            << r.sigma_tilde_definition << ", Tr P - eps/2 " << r.trace_positive_part
            << ", Tr N - eps/2 " << r.trace_negative_part << "\n";
  bool ok = r.holds();
  if (rho.parties() == 2 && rho.dims()[0] >= 2) {
    const AssemblyReport asmb = check_theorem_assembly(rho, sigma, args.common.base());
    payload["assembly"] = to_json(asmb);
    std::cout << std::setprecision(9) << "|dS(1|2)| = " << asmb.lhs << " <= " << asmb.leg_rho
              << " + " << asmb.leg_sigma << " <= " << asmb.bound << " "
              << to_string(args.common.base()) << "\n";
    ok = ok && asmb.all_ok();
  }
  std::cout << (ok ? "all identities and inequalities hold" : "VIOLATION") << "\n";
  emit(make_report("thales",
                   Json{{"a", args.a}, {"b", args.b}, {"log_base", to_string(args.common.base())}},
                   std::move(payload)),
       args.common);
  return ok ? kExitOk : kExitViolation;
}

// --- verify / sweep --------------------------------------------------------

struct VerifyArgs {
  std::string harness = "theorem";
  Index d1 = 2;
  Index d2 = 2;
  std::size_t trials = 1000;
  std::string ensemble = "perturbation_pair";
  Index ancilla = 0;
  std::optional<double> target_epsilon;
  double tolerance = tol::inequality;
  bool ambient_span = false;
  std::string format = "json";
  std::string witness_prefix;
  std::string d2_list = "2,4,8,16";
  Common common;

  TrialConfig config() const {
    TrialConfig c;
    c.harness = parse_harness(harness);
    c.d1 = d1;
    c.d2 = d2;
    c.trials = trials;
    c.ensemble.kind = parse_ensemble_kind(ensemble);
    c.ensemble.ancilla_dim = ancilla;
    c.ensemble.target_epsilon = target_epsilon;
    c.seed = common.seed;
    c.tolerance = tolerance;
    c.base = common.base();
    c.span = ambient_span ? SpanDimension::ambient : SpanDimension::support_rank;
    c.workers = common.workers;
    c.keep_records = format == "csv";
    return c;
  }
};

void print_summary(const TrialReport& r) {
  std::cout << std::setprecision(9);
  std::cout << to_string(r.config.harness) << ": " << r.trials << " trials, " << r.applicable_trials
            << " applicable, " << r.inapplicable_trials << " inapplicable (eps > 1), "
            << r.failed_trials << " failed, " << r.violations << " violations";
  if (r.config.harness == Harness::lemma) std::cout << ", " << r.chain_failures << " chain failures";
  std::cout << "\n";
  if (r.max_lhs) std::cout << "max lhs " << *r.max_lhs << ", min margin " << *r.min_margin << "\n";
  if (r.max_ratio) std::cout << "max lhs/rhs " << *r.max_ratio << "\n";
  std::cout << "wall time " << std::setprecision(3) << r.wall_time_seconds << " s\n";
}

int run_verify(const VerifyArgs& a) {
  const TrialConfig cfg = a.config();
  const TrialReport rep = run_trials(cfg);
  print_summary(rep);
  if (!a.common.out.empty()) {
    if (a.format == "csv") {
      write_file_atomic(a.common.out, trials_csv(rep));
      std::cout << "csv written to " << a.common.out << "\n";
    } else {
      emit(make_report("verify", to_json(cfg), to_json(rep)), a.common);
    }
  }
  if (!a.witness_prefix.empty()) {
    const std::optional<Witness>& w = rep.argmax_ratio ? rep.argmax_ratio : rep.argmax_lhs;
    if (w && w->rho && w->sigma) {
      save_state(*w->rho, a.witness_prefix + "rho.json");
      save_state(*w->sigma, a.witness_prefix + "sigma.json");
      std::cout << "extremal pair written to " << a.witness_prefix << "{rho,sigma}.json\n";
    }
  }
  const bool bad = rep.violations > 0 || rep.chain_failures > 0;
  return bad ? kExitViolation : kExitOk;
}

int run_sweep(const VerifyArgs& a) {
  TrialConfig cfg = a.config();
  cfg.harness = Harness::theorem;
  cfg.keep_records = false;
  const std::vector<Index> d2s = parse_index_list(a.d2_list);
  const SweepReport rep = dim_sweep(cfg, d2s);
  std::cout << std::setprecision(6);
  std::cout << "d1 = " << rep.d1 << ", d2-free cap = " << rep.d2_free_cap << " "
            << to_string(cfg.base) << "\n";
  for (const SweepRow& r : rep.rows) {
    std::cout << "  d2 = " << std::setw(3) << r.d2 << ": " << r.violations << " violations / "
              << r.applicable_trials << " applicable, max lhs "
              << (r.max_lhs ? *r.max_lhs : 0.0) << ", rhs at max eps "
              << (r.rhs_at_max_observed_epsilon ? *r.rhs_at_max_observed_epsilon : 0.0) << "\n";
  }
  std::cout << "rhs identical across rows: " << (rep.rhs_identical_across_rows() ? "yes" : "no")
            << "\n";
  Json config = to_json(cfg);
  config["d2"] = d2s;
  config.erase("harness");
  emit(make_report("sweep", std::move(config), to_json(rep)), a.common);
  const bool ok = rep.total_violations() == 0 && rep.rhs_identical_across_rows() && rep.bounded_by_cap();
  return ok ? kExitOk : kExitViolation;
}

// --- esq / probe -----------------------------------------------------------

struct EsqArgs {
  std::string state;
  std::string b;
  std::string d3 = "0";
  Index residual = 0;
  int restarts = 8;
  int max_iterations = 2000;
  double ftol = 1e-8;
  double start_scale = 1.0;
  Common common;

  EsqOptions options() const {
    EsqOptions o;
    o.residual = residual;
    o.restarts = restarts;
    o.optimizer.max_iterations = max_iterations;
    o.optimizer.function_tolerance = ftol;
    o.start_scale = start_scale;
    o.seed = common.seed;
    o.base = common.base();
    o.workers = common.workers;
    return o;
  }

  Json config_json() const {
    return Json{{"d3", d3},
                {"residual", residual},
                {"restarts", restarts},
                {"max_iterations", max_iterations},
                {"function_tolerance", ftol},
                {"start_scale", start_scale},
                {"seed", common.seed},
                {"log_base", to_string(common.base())}};
  }
};

int run_esq(const EsqArgs& a) {
  const DensityMatrix rho = resolve_state(a.state);
  EsqOptions opt = a.options();
  std::vector<Index> schedule{0};
  if (a.d3 != "0") schedule = parse_index_list(a.d3);
  std::vector<EsqEstimate> ests;
  if (schedule.size() == 1) {
    opt.d3 = schedule.front();
    ests.push_back(estimate_esq(rho, opt));
  } else {
    ests = estimate_esq_ladder(rho, schedule, opt);
  }
  std::cout << std::setprecision(9);
  Json list = Json::array();
  for (const EsqEstimate& e : ests) {
    std::cout << "d3 = " << e.shape.d3 << ": E_sq <= " << e.best_cmi_half << " "
              << to_string(e.base) << " (product baseline " << e.product_baseline
              << ", best restart " << e.best_restart << ", converged "
              << (e.converged ? "yes" : "no") << ")\n";
    list.push_back(to_json(e));
  }
  Json config = a.config_json();
  config["state"] = a.state;
  Json payload = ests.size() == 1 ? Json{{"estimate", list.front()}} : Json{{"estimates", list}};
  emit(make_report("esq", std::move(config), std::move(payload)), a.common);
  return kExitOk;
}

int run_probe(const EsqArgs& a) {
  const DensityMatrix rho = resolve_state(a.state);
  const DensityMatrix sigma = resolve_state(a.b);
  EsqOptions opt = a.options();
  opt.d3 = parse_index_list(a.d3 == "0" ? std::string("2") : a.d3).front();
  const EsqProbeReport p = esq_continuity_probe(rho, sigma, opt);
  std::cout << std::setprecision(9) << "eps = " << p.epsilon << ", |E(a) - E(b)| = " << p.difference
            << " vs reference af_bound " << p.reference_bound << " (+" << p.noise_allowance
            << " noise): " << (p.within_reference ? "within" : "outside") << "\n";
  Json config = a.config_json();
  config["a"] = a.state;
  config["b"] = a.b;
  config["d3"] = opt.d3;
  emit(make_report("probe", std::move(config), to_json(p)), a.common);
  return kExitOk;
}

void add_trial_options(CLI::App* cmd, VerifyArgs& v, bool sweep) {
  cmd->add_option("--d1", v.d1, "Dimension of the first subsystem")->capture_default_str();
  if (sweep) {
    cmd->add_option("--d2", v.d2_list, "Comma-separated dimensions of the second subsystem")
        ->capture_default_str();
  } else {
    cmd->add_option("--d2", v.d2, "Dimension of the second subsystem")->capture_default_str();
    cmd->add_option("--harness", v.harness, "theorem | lemma | continuity | tightness")
        ->capture_default_str()
        ->check(CLI::IsMember({"theorem", "lemma", "continuity", "tightness"}));
    cmd->add_option("--format", v.format, "Output format for --out")
        ->capture_default_str()
        ->check(CLI::IsMember({"json", "csv"}));
    cmd->add_option("--witness-prefix", v.witness_prefix,
                    "Save the extremal pair as <prefix>rho.json and <prefix>sigma.json");
    cmd->add_flag("--ambient-span", v.ambient_span,
                  "Continuity harness: use the ambient dimension instead of the support span");
  }
  cmd->add_option("--trials", v.trials, "Number of random trials")->capture_default_str();
  cmd->add_option("--ensemble", v.ensemble,
                  "haar_pure | induced_mixed | rank_limited | perturbation_pair")
      ->capture_default_str()
      ->check(CLI::IsMember({"haar_pure", "induced_mixed", "rank_limited", "perturbation_pair"}));
  cmd->add_option("--ancilla", v.ancilla, "Ancilla dimension for induced states (0 = system dim)")
      ->capture_default_str();
  cmd->add_option("--target-epsilon", v.target_epsilon,
                  "Fixed trace distance for perturbation pairs / mixing weight for lemma trials");
  cmd->add_option("--tol", v.tolerance, "Violation tolerance")->capture_default_str();
  add_common(cmd, v.common);
}

void add_esq_options(CLI::App* cmd, EsqArgs& e) {
  cmd->add_option("--d3", e.d3, "Extension dimension; a comma list runs a warm-started ladder (0 = 2 rank)")
      ->capture_default_str();
  cmd->add_option("--residual", e.residual, "Environment dimension (0 = rank * d3)")->capture_default_str();
  cmd->add_option("--restarts", e.restarts, "Random restarts")->capture_default_str();
  cmd->add_option("--max-iter", e.max_iterations, "Iteration cap per restart")->capture_default_str();
  cmd->add_option("--ftol", e.ftol, "Simplex function-spread tolerance")->capture_default_str();
  cmd->add_option("--start-scale", e.start_scale, "Std-dev of random restart points")
      ->capture_default_str();
  add_common(cmd, e.common);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"qmi: continuity of conditional entropy, checked numerically"};
  app.require_subcommand(1);

  EntropyArgs entropy_args;
  auto* entropy = app.add_subcommand("entropy", "Entropies of a state file or built-in state");
  entropy->add_option("--state", entropy_args.state, "State file or built-in name")->required();
  add_common(entropy, entropy_args.common, false);

  ThalesArgs thales_args;
  auto* thales = app.add_subcommand("thales", "Auxiliary-state decomposition of two states");
  thales->add_option("--a", thales_args.a, "First state (rho)")->required();
  thales->add_option("--b", thales_args.b, "Second state (sigma)")->required();
  add_common(thales, thales_args.common, false);

  VerifyArgs verify_args;
  auto* verify = app.add_subcommand("verify", "Randomized bound verification");
  add_trial_options(verify, verify_args, false);

  VerifyArgs sweep_args;
  sweep_args.trials = 2000;
  auto* sweep = app.add_subcommand("sweep", "Theorem trials across second-subsystem dimensions");
  add_trial_options(sweep, sweep_args, true);

  EsqArgs esq_args;
  auto* esq = app.add_subcommand("esq", "Upper-bound squashed entanglement");
  esq->add_option("--state", esq_args.state, "State file or built-in name")->required();
  add_esq_options(esq, esq_args);

  EsqArgs probe_args;
  auto* probe = app.add_subcommand("probe", "Compare E_sq estimates of two nearby states");
  probe->add_option("--a", probe_args.state, "First state")->required();
  probe->add_option("--b", probe_args.b, "Second state")->required();
  add_esq_options(probe, probe_args);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "qmi-error[Usage]: " << e.what() << "\n";
    return kExitError;
  }

  try {
    if (*entropy) return run_entropy(entropy_args);
    if (*thales) return run_thales(thales_args);
    if (*verify) return run_verify(verify_args);
    if (*sweep) return run_sweep(sweep_args);
    if (*esq) return run_esq(esq_args);
    if (*probe) return run_probe(probe_args);
  } catch (const qmi::Error& e) {
    std::cerr << "qmi-error[" << to_string(e.code()) << "]: " << e.message() << "\n";
    return kExitError;
  } catch (const std::exception& e) {
    std::cerr << "qmi-error[Internal]: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}
