#include <gtest/gtest.h>

#include <filesystem>

#include "qmi/qmi.hpp"
#include "test_util.hpp"

namespace qmi {
namespace {

using testing::binary_entropy;
using testing::diag_state;

TrialConfig config(Harness h, Index d1, Index d2, std::size_t trials, std::uint64_t seed = 7) {
  TrialConfig c;
  c.harness = h;
  c.d1 = d1;
  c.d2 = d2;
  c.trials = trials;
  c.seed = seed;
  return c;
}

TEST(Harness, ParseRoundTrip) {
  for (auto h : {Harness::theorem, Harness::lemma, Harness::entropy_continuity, Harness::tightness}) {
    EXPECT_EQ(parse_harness(to_string(h)), h);
  }
  EXPECT_THROW(parse_harness("proof"), Error);
}

TEST(TheoremTrials, NoViolationsAndConsistentCounts) {
  const TrialReport r = run_theorem_trials(config(Harness::theorem, 2, 2, 2000));
  EXPECT_EQ(r.violations, 0u);
  EXPECT_EQ(r.failed_trials, 0u);
  EXPECT_EQ(r.applicable_trials + r.inapplicable_trials + r.failed_trials, r.trials);
  ASSERT_TRUE(r.min_margin.has_value());
  EXPECT_GE(*r.min_margin, -1e-9);
  ASSERT_TRUE(r.argmax_lhs.has_value());
  EXPECT_EQ(r.argmax_lhs->lhs, *r.max_lhs);
  EXPECT_EQ(r.argmax_lhs->seed, 7u);
  // The witness is the pair that produced the recorded value.
  const auto& w = *r.argmax_lhs;
  EXPECT_NEAR(std::abs(conditional_entropy(*w.rho).value - conditional_entropy(*w.sigma).value), w.lhs, 1e-15);
}

TEST(TheoremTrials, OtherEnsemblesAndDimensions) {
  for (auto kind : {EnsembleKind::haar_pure, EnsembleKind::induced_mixed, EnsembleKind::rank_limited}) {
    TrialConfig c = config(Harness::theorem, 3, 2, 300);
    c.ensemble.kind = kind;
    const TrialReport r = run_trials(c);
    EXPECT_EQ(r.violations, 0u) << to_string(kind);
    EXPECT_EQ(r.failed_trials, 0u);
  }
}

TEST(TheoremTrials, IdenticalPairsHaveZeroMargin) {
  TrialConfig c = config(Harness::theorem, 2, 2, 50);
  c.ensemble.target_epsilon = 0.0;
  c.keep_records = true;
  const TrialReport r = run_trials(c);
  EXPECT_EQ(r.applicable_trials, 50u);
  for (const auto& t : r.records) {
    EXPECT_EQ(t.epsilon, 0.0);
    EXPECT_EQ(t.lhs, 0.0);
    EXPECT_EQ(*t.rhs, 0.0);
    EXPECT_EQ(t.margin(), 0.0);
  }
  EXPECT_EQ(r.violations, 0u);
}

TEST(TheoremTrials, DistanceAboveOneIsInapplicable) {
  // Orthogonal supports: Tr|rho - sigma| = 2 > 1.
  auto source = [](std::size_t) {
    return StatePair{diag_state({1, 0, 0, 0}, {2, 2}), diag_state({0, 0, 0, 1}, {2, 2})};
  };
  const TrialReport r = run_theorem_trials(config(Harness::theorem, 2, 2, 1), source);
  EXPECT_EQ(r.applicable_trials, 0u);
  EXPECT_EQ(r.inapplicable_trials, 1u);
  EXPECT_EQ(r.violations, 0u);
  EXPECT_FALSE(r.max_lhs.has_value());
}

TEST(TheoremTrials, NumericFailuresAreCountedNotThrown) {
  auto source = [](std::size_t i) -> StatePair {
    if (i == 1) throw Error(ErrorCode::eigensolver_failure, "injected");
    return {bell_state(), bell_state()};
  };
  const TrialReport r = run_theorem_trials(config(Harness::theorem, 2, 2, 3), source);
  EXPECT_EQ(r.failed_trials, 1u);
  EXPECT_EQ(r.applicable_trials, 2u);
  EXPECT_NE(r.first_error.find("injected"), std::string::npos);
}

TEST(TheoremTrials, RejectsBadConfig) {
  EXPECT_THROW(run_trials(config(Harness::theorem, 2, 2, 0)), Error);
  EXPECT_THROW(run_trials(config(Harness::theorem, 1, 2, 5)), Error);
}

TEST(LemmaTrials, NoViolationsOrChainFailures) {
  const TrialReport r = run_lemma_trials(config(Harness::lemma, 2, 2, 2000));
  EXPECT_EQ(r.violations, 0u);
  EXPECT_EQ(r.chain_failures, 0u);
  EXPECT_EQ(r.applicable_trials, 2000u);
}

TEST(LemmaTrials, EndpointEpsilons) {
  TrialConfig c = config(Harness::lemma, 2, 2, 30);
  c.keep_records = true;
  c.ensemble.target_epsilon = 0.0;
  for (const auto& t : run_trials(c).records) {
    EXPECT_NEAR(t.lhs, 0.0, 1e-12);
    EXPECT_EQ(*t.rhs, 0.0);
  }
  c.ensemble.target_epsilon = 1.0;
  const TrialReport r = run_trials(c);
  for (const auto& t : r.records) {
    EXPECT_DOUBLE_EQ(*t.rhs, 2.0);
    EXPECT_LE(t.lhs, 2.0 + 1e-9);
  }
  EXPECT_EQ(r.violations, 0u);
}

TEST(ContinuityTrials, NoViolationsAtDimensionFour) {
  const TrialReport r = entropy_continuity_trials(config(Harness::entropy_continuity, 4, 1, 2000));
  EXPECT_EQ(r.violations, 0u);
  EXPECT_EQ(r.failed_trials, 0u);
  TrialConfig amb = config(Harness::entropy_continuity, 4, 1, 500);
  amb.span = SpanDimension::ambient;
  EXPECT_EQ(run_trials(amb).violations, 0u);
}

TEST(ContinuityTrials, PureAgainstItself) {
  auto source = [](std::size_t) {
    Engine rng = make_engine(3);
    const DensityMatrix psi = haar_pure({4}, rng);
    return StatePair{psi, psi};
  };
  TrialConfig c = config(Harness::entropy_continuity, 4, 1, 1);
  c.keep_records = true;
  const TrialReport r = run_trials(c, source);
  EXPECT_EQ(r.records[0].epsilon, 0.0);
  EXPECT_NEAR(r.records[0].lhs, 0.0, 1e-12);
  EXPECT_EQ(*r.records[0].rhs, 0.0);
}

TEST(ContinuityTrials, OneParameterFamilyOnAGrid) {
  // rho = diag(1,0), sigma = diag(1-t, t): eps = 2t, lhs = h(t),
  // rhs = 2 (2t) + eta(2t) + eta(1-2t).
  const std::size_t n = 50;
  auto t_of = [](std::size_t i) { return 0.25 * static_cast<double>(i + 1) / 50.0; };
  auto source = [&](std::size_t i) {
    const double t = t_of(i);
    return StatePair{diag_state({1, 0}, {2}), diag_state({1 - t, t}, {2})};
  };
  TrialConfig c = config(Harness::entropy_continuity, 2, 1, n);
  c.keep_records = true;
  const TrialReport r = run_trials(c, source);
  EXPECT_EQ(r.violations, 0u);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = t_of(i);
    const auto& rec = r.records[i];
    EXPECT_NEAR(rec.epsilon, 2 * t, 1e-15);
    EXPECT_NEAR(rec.lhs, binary_entropy(t), 1e-12);
    EXPECT_NEAR(*rec.rhs, 4 * t + binary_entropy(2 * t), 1e-12);
    EXPECT_LE(rec.lhs, *rec.rhs);
  }
}

TEST(Tightness, RatioBoundedAndWitnessReloads) {
  TrialConfig c = config(Harness::tightness, 2, 2, 1000);
  const TrialReport r = tightness_probe(c);
  ASSERT_TRUE(r.max_ratio.has_value());
  EXPECT_GE(*r.max_ratio, 0.0);
  EXPECT_LE(*r.max_ratio, 1.0 + 1e-9);
  ASSERT_TRUE(r.argmax_ratio.has_value());

  const auto dir = std::filesystem::temp_directory_path() / "qmi_test_verify";
  std::filesystem::create_directories(dir);
  save_state(*r.argmax_ratio->rho, dir / "rho.json");
  save_state(*r.argmax_ratio->sigma, dir / "sigma.json");
  const DensityMatrix rho = load_state(dir / "rho.json");
  const DensityMatrix sigma = load_state(dir / "sigma.json");
  const double eps = trace_distance(rho, sigma);
  const double ratio = std::abs(conditional_entropy(rho).value - conditional_entropy(sigma).value) / af_bound(eps, 2);
  EXPECT_NEAR(ratio, *r.max_ratio, 1e-9);
}

TEST(Tightness, IdenticalPairsAreSkipped) {
  TrialConfig c = config(Harness::tightness, 2, 2, 20);
  c.ensemble.target_epsilon = 0.0;
  const TrialReport r = run_trials(c);
  EXPECT_EQ(r.skipped_trials, 20u);
  EXPECT_FALSE(r.max_ratio.has_value());
}

TEST(Determinism, ReportsIndependentOfWorkerCount) {
  for (auto h : {Harness::theorem, Harness::lemma, Harness::entropy_continuity, Harness::tightness}) {
    TrialConfig a = config(h, 2, 3, 400, 11);
    TrialConfig b = a;
    b.workers = 4;
    const std::string ja = dump_report(make_report("verify", to_json(a), to_json(run_trials(a))));
    const std::string jb = dump_report(make_report("verify", to_json(a), to_json(run_trials(b))));
    EXPECT_EQ(ja, jb) << to_string(h);
  }
}

TEST(Sweep, RowsAreDimensionFreeAndBounded) {
  TrialConfig c = config(Harness::theorem, 2, 2, 300);
  const SweepReport s = dim_sweep(c, {2, 4, 8});
  ASSERT_EQ(s.rows.size(), 3u);
  EXPECT_EQ(s.total_violations(), 0u);
  EXPECT_TRUE(s.rhs_identical_across_rows());
  EXPECT_TRUE(s.bounded_by_cap());
  for (const auto& row : s.rows) {
    EXPECT_LE(*row.max_lhs, 2.0 + 1e-9);  // |S(1|2) difference| <= 2 log d1
    EXPECT_LE(*row.max_lhs, 4.0);
    EXPECT_EQ(*row.rhs_at_max_observed_epsilon, af_bound(*row.max_epsilon, 2));
  }
  EXPECT_THROW(dim_sweep(c, {}), Error);
}

TEST(Sweep, CapIsTheSupremumOfTheBound) {
  // Maximizer of 4 e log d + 2 h(e) at e* = d^2/(d^2+1); grid oracle.
  for (Index d1 : {2, 3, 5}) {
    double best = 0.0;
    for (int i = 0; i <= 100000; ++i) best = std::max(best, af_bound(i / 100000.0, d1));
    EXPECT_NEAR(af_bound_supremum(d1), best, 1e-8);
    EXPECT_GE(af_bound_supremum(d1), best);
  }
  EXPECT_NEAR(af_bound_supremum(2), 3.2 + 2 * binary_entropy(0.8), 1e-12);
}

}  // namespace
}  // namespace qmi
