#include "dhard/error.hpp"
#include "dhard/estimator.hpp"
#include "dhard/rng.hpp"
#include "dhard/solver.hpp"
#include "dhard/unit_propagation.hpp"
#include "fixtures.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <set>

using namespace dhard;
using namespace dhard::testing;

namespace {

CnfFormula cnf(int n, std::initializer_list<std::initializer_list<int>> cls) {
  std::vector<Clause> out;
  for (auto c : cls) {
    Clause k;
    for (int l : c)
      k.emplace_back(l);
    out.push_back(k);
  }
  return CnfFormula(n, std::move(out));
}

SampleStats stats(long double mean, long double variance) {
  SampleStats s;
  s.n = 2;
  s.mean = mean;
  s.variance = variance;
  return s;
}

EstimatorConfig exhaustive_config(std::size_t card) {
  EstimatorConfig c;
  c.initial_n = std::max<std::uint64_t>(2, 1ULL << card);
  c.max_n = c.initial_n;
  return c;
}

/// Independent loop over all beta: fresh solve under assumptions.
long double brute_force_sum(const CnfFormula &f, const DecompositionSet &b) {
  long double sum = 0;
  for (std::uint64_t i = 0; i < (1ULL << b.size()); ++i)
    sum += static_cast<long double>(solve(f, b.assignment(i)).propagations);
  return sum;
}

} // namespace

TEST(DecompositionSet, MaskAndOrder) {
  DecompositionSet b(5, {4, 2});
  EXPECT_EQ(b.to_string(), "2 4");
  EXPECT_EQ(b.mask(), (std::vector<bool>{false, true, false, true, false}));
  EXPECT_EQ(b.assignment(0).bits(), "00");
  EXPECT_EQ(b.assignment(1).bits(), "01");
  EXPECT_EQ(b.assignment(2).bits(), "10");
  EXPECT_EQ(b.assignment(2).value(2), true);
  EXPECT_EQ(DecompositionSet::from_mask(b.mask()), b);
  EXPECT_THROW(DecompositionSet(3, {4}), Error);
  EXPECT_THROW(DecompositionSet(3, {1, 1}), Error);
}

TEST(Sampling, SmallSetsAreEnumerated) {
  DecompositionSet b(4, {1, 3});
  AssignmentSample s = sample_assignments(b, 10, 1);
  EXPECT_TRUE(s.exhaustive);
  ASSERT_EQ(s.assignments.size(), 4u);
  std::vector<std::string> bits;
  for (const auto &a : s.assignments)
    bits.push_back(a.bits());
  EXPECT_EQ(bits, (std::vector<std::string>{"00", "01", "10", "11"}));
  EXPECT_THROW(sample_assignments(DecompositionSet(3, {}), 10, 1), Error);
}

TEST(Sampling, DeterministicAndPrefixStable) {
  std::vector<int> vars;
  for (int v = 1; v <= 20; ++v)
    vars.push_back(v);
  DecompositionSet b(20, vars);
  auto a = sample_assignments(b, 3, 42);
  auto c = sample_assignments(b, 3, 42);
  EXPECT_FALSE(a.exhaustive);
  EXPECT_EQ(a.assignments, c.assignments);
  auto longer = sample_assignments(b, 50, 42);
  for (std::size_t j = 0; j < 3; ++j)
    EXPECT_EQ(longer.assignments[j], a.assignments[j]);
  EXPECT_NE(sample_assignments(b, 3, 43).assignments, a.assignments);
}

TEST(Sampling, BitFrequenciesAreUniform) {
  std::vector<int> vars;
  for (int v = 1; v <= 20; ++v)
    vars.push_back(v);
  DecompositionSet b(20, vars);
  auto s = sample_assignments(b, 10000, 7);
  std::vector<int> ones(20, 0);
  for (const auto &a : s.assignments)
    for (std::size_t i = 0; i < 20; ++i)
      ones[i] += a.lits()[i].positive() ? 1 : 0;
  for (int c : ones) {
    double freq = c / 10000.0;
    EXPECT_NEAR(freq, 0.5, 0.02);
  }
}

TEST(Rng, UniformBelowStaysInRange) {
  Engine rng(5);
  std::vector<int> hist(7, 0);
  for (int i = 0; i < 7000; ++i)
    ++hist[uniform_below(rng, 7)];
  for (int h : hist)
    EXPECT_NEAR(h, 1000, 150);
  for (int i = 0; i < 1000; ++i) {
    double u = uniform_unit(rng);
    EXPECT_GE(u, 0.0);
    EXPECT_LT(u, 1.0);
  }
}

TEST(RequiredSampleSize, HandComputed) {
  // ceil(s^2 / (eps^2 * delta * mean^2)), evaluated by hand.
  struct Case {
    long double var, mean;
    double eps, delta;
    std::uint64_t n;
  } cases[] = {
      {4, 10, 0.1, 0.1, 40},     {1, 1, 0.5, 0.5, 8},
      {0, 5, 0.1, 0.05, 1},      {1, 1, 0.1, 0.05, 2000},
      {9, 3, 0.1, 0.05, 2000},   {2, 1, 0.2, 0.5, 100},
      {1, 2, 0.5, 0.1, 10},      {3, 1, 0.3, 0.3, 112},
      {100, 10, 0.05, 0.2, 2000}, {5, 7, 0.1, 0.25, 41},
      {1, 1000, 0.1, 0.05, 1},   {50, 1, 0.9, 0.9, 69},
  };
  for (const auto &c : cases)
    EXPECT_EQ(required_sample_size(stats(c.mean, c.var), c.eps, c.delta), c.n)
        << c.var << " " << c.mean << " " << c.eps << " " << c.delta;
  EXPECT_EQ(required_sample_size(stats(0, 0), 0.1, 0.05), 1u);
}

TEST(SampleStats, Moments) {
  SampleStats s = SampleStats::from({1, 2, 3, 4});
  EXPECT_EQ(s.n, 4u);
  EXPECT_EQ(s.mean, 2.5L);
  EXPECT_NEAR(static_cast<double>(s.variance), 5.0 / 3.0, 1e-15);
  EXPECT_EQ(SampleStats::from({7, 7, 7}).variance, 0.0L);
  EXPECT_EQ(SampleStats::from({7}).variance, 0.0L);
}

TEST(Estimate, ContradictionSingleVariable) {
  CnfFormula f = cnf(1, {{1}, {-1}});
  DecompositionSet b(1, {1});
  DHardnessEstimate e = estimate_d_hardness(f, b, EstimatorConfig{});
  EXPECT_TRUE(e.exhaustive);
  EXPECT_TRUE(e.converged);
  EXPECT_EQ(e.value, solve(f, Assignment({Lit(-1)})).propagations +
                         solve(f, Assignment({Lit(1)})).propagations);
  EXPECT_EQ(e.value, exact_d_hardness(f, b, WorkloadMeasure::propagations));
}

TEST(Estimate, ZeroVarianceConvergesAfterOneBatch) {
  // Every beta is refuted at the root by the same two units.
  std::vector<Clause> cls = {{Lit(1)}, {Lit(-1)}};
  CnfFormula f(30, cls);
  std::vector<int> vars;
  for (int v = 2; v <= 30; ++v)
    vars.push_back(v);
  DecompositionSet b(30, vars);
  EstimatorConfig cfg;
  cfg.initial_n = 16;
  cfg.max_n = 1 << 12;
  for (bool up : {false, true}) {
    DHardnessEstimate e = up ? estimate_d_hardness_with_up_preprocessing(f, b, cfg)
                             : estimate_d_hardness(f, b, cfg);
    EXPECT_TRUE(e.converged);
    EXPECT_FALSE(e.exhaustive);
    EXPECT_EQ(e.stats.n, 16u);
    EXPECT_EQ(e.stats.variance, 0.0L);
    EXPECT_EQ(e.value, std::ldexp(e.stats.mean, 29));
  }
}

TEST(Estimate, DoublesUntilConvergedOrCapped) {
  CnfFormula f = pigeonhole(5, 4);
  std::vector<int> vars;
  for (int v = 1; v <= 12; ++v)
    vars.push_back(v);
  DecompositionSet b(20, vars);
  EstimatorConfig cfg;
  cfg.initial_n = 8;
  cfg.max_n = 64;
  cfg.epsilon = 0.01;
  cfg.delta = 0.01;
  DHardnessEstimate e = estimate_d_hardness(f, b, cfg);
  EXPECT_FALSE(e.converged);
  EXPECT_EQ(e.stats.n, 64u);
  cfg.epsilon = 0.9;
  cfg.delta = 0.9;
  DHardnessEstimate loose = estimate_d_hardness(f, b, cfg);
  EXPECT_TRUE(loose.converged);
  EXPECT_LE(loose.stats.n, 64u);
  EXPECT_GE(loose.stats.n,
            required_sample_size(loose.stats, cfg.epsilon, cfg.delta));
  // Pooled samples keep their prefix.
  for (std::size_t j = 0; j < loose.stats.n; ++j)
    EXPECT_EQ(loose.stats.observations[j], e.stats.observations[j]);
}

TEST(Estimate, PigeonholeExhaustiveMatchesBruteForce) {
  CnfFormula f = pigeonhole(4, 3);
  DecompositionSet b(12, {1, 2, 3, 4});
  long double oracle = brute_force_sum(f, b);
  DHardnessEstimate plain = estimate_d_hardness(f, b, exhaustive_config(4));
  DHardnessEstimate up =
      estimate_d_hardness_with_up_preprocessing(f, b, exhaustive_config(4));
  EXPECT_TRUE(plain.exhaustive);
  EXPECT_EQ(plain.value, oracle);
  EXPECT_EQ(up.value, oracle);
  EXPECT_EQ(exact_d_hardness(f, b, WorkloadMeasure::propagations), oracle);
  EXPECT_EQ(plain.solver_launches, 16u);
  EXPECT_GT(up.up_decided, 0u);
  EXPECT_LT(up.solver_launches, 16u);
  EXPECT_NEAR(static_cast<double>(plain.log2_value),
              std::log2(static_cast<double>(oracle)), 1e-12);
}

TEST(Estimate, TwoTierMatchesIndependentLoop) {
  // Two-tier rule re-implemented with the naive propagator.
  CnfFormula f = pigeonhole(4, 3);
  DecompositionSet b(12, {1, 5, 9});
  long double props = 0, conflicts = 0;
  for (std::uint64_t i = 0; i < 8; ++i) {
    Assignment beta = b.assignment(i);
    SolveOutcome o = solve(f, beta);
    if (naive_up_decides(f, beta)) {
      EXPECT_EQ(o.conflicts, 0u);
    }
    props += o.propagations;
    conflicts += o.conflicts;
  }
  auto cfg = exhaustive_config(3);
  EXPECT_EQ(estimate_d_hardness_with_up_preprocessing(f, b, cfg).value, props);
  cfg.measure = WorkloadMeasure::conflicts;
  EXPECT_EQ(estimate_d_hardness_with_up_preprocessing(f, b, cfg).value,
            conflicts);
  EXPECT_EQ(estimate_d_hardness(f, b, cfg).value, conflicts);
}

TEST(Estimate, FullStrongBackdoorLaunchesNoSolver) {
  CnfFormula f = xor_miter(4);
  DecompositionSet b(f.num_vars(), {1, 2, 3, 4});
  DHardnessEstimate e =
      estimate_d_hardness_with_up_preprocessing(f, b, EstimatorConfig{});
  EXPECT_EQ(e.solver_launches, 0u);
  EXPECT_EQ(e.up_decided, 16u);
  RhoEstimate r = estimate_rho(f, b, 10000, 1);
  EXPECT_EQ(r.easy_count, r.n);
  EXPECT_EQ(r.rho, 1.0);
}

TEST(Estimate, VariableOutsideClauses) {
  CnfFormula f = cnf(2, {{1}, {-1}});
  DecompositionSet b(2, {2});
  DHardnessEstimate e =
      estimate_d_hardness_with_up_preprocessing(f, b, EstimatorConfig{});
  EXPECT_EQ(e.up_decided, 2u);
  EXPECT_EQ(e.solver_launches, 0u);
}

TEST(Estimate, SatBranchStopsEstimation) {
  CnfFormula f = cnf(3, {{1, 2}, {-1, 3}});
  DecompositionSet b(3, {1});
  for (bool up : {false, true}) {
    DHardnessEstimate e = up ? estimate_d_hardness_with_up_preprocessing(
                                   f, b, EstimatorConfig{})
                             : estimate_d_hardness(f, b, EstimatorConfig{});
    EXPECT_TRUE(e.sat_found);
    ASSERT_TRUE(e.sat_witness);
    EXPECT_TRUE(f.satisfied_by(*e.sat_witness));
  }
}

TEST(Estimate, WorkerCountDoesNotChangeResults) {
  CnfFormula f = pigeonhole(6, 5);
  std::vector<int> vars;
  for (int v = 1; v <= 14; ++v)
    vars.push_back(v);
  DecompositionSet b(30, vars);
  EstimatorConfig cfg;
  cfg.initial_n = 100;
  cfg.max_n = 400;
  cfg.workers = 1;
  DHardnessEstimate one = estimate_d_hardness_with_up_preprocessing(f, b, cfg);
  cfg.workers = 4;
  DHardnessEstimate four = estimate_d_hardness_with_up_preprocessing(f, b, cfg);
  EXPECT_EQ(one.stats.observations, four.stats.observations);
  EXPECT_EQ(one.value, four.value);
}

TEST(Estimate, ConfigValidation) {
  EstimatorConfig c;
  c.epsilon = 0;
  EXPECT_THROW(c.validate(), Error);
  c = {};
  c.delta = 1;
  EXPECT_THROW(c.validate(), Error);
  c = {};
  c.initial_n = 1;
  EXPECT_THROW(c.validate(), Error);
  c = {};
  c.max_n = 10;
  EXPECT_THROW(c.validate(), Error);
}

TEST(Rho, UpInertFormula) {
  CnfFormula f = up_inert_formula();
  RhoEstimate r = estimate_rho(f, DecompositionSet(6, {3}), 100, 1);
  EXPECT_TRUE(r.exhaustive);
  EXPECT_EQ(r.n, 2u);
  EXPECT_EQ(r.rho, 0.0);
}

TEST(Rho, PigeonholeMatchesExhaustiveOracle) {
  CnfFormula f = pigeonhole(4, 3);
  DecompositionSet b(12, {1, 2, 3, 4});
  std::uint64_t easy = 0;
  for (std::uint64_t i = 0; i < 16; ++i)
    easy += naive_up_decides(f, b.assignment(i)) ? 1 : 0;
  RhoEstimate r = estimate_rho(f, b, 10000, 3);
  EXPECT_TRUE(r.exhaustive);
  EXPECT_EQ(r.easy_count, easy);
  EXPECT_EQ(r.rho, static_cast<double>(easy) / 16.0);
}

TEST(ExactDHardness, EmptySetIsPlainSolve) {
  CnfFormula f = pigeonhole(4, 3);
  EXPECT_EQ(exact_d_hardness(f, DecompositionSet(12, {}),
                             WorkloadMeasure::propagations),
            solve(f, {}).propagations);
}

TEST(ExactDHardness, CapExceeded) {
  CnfFormula f = pigeonhole(4, 3);
  try {
    exact_d_hardness(f, DecompositionSet(12, {1, 2, 3}),
                     WorkloadMeasure::propagations, 4);
    FAIL();
  } catch (const Error &e) {
    EXPECT_EQ(e.kind(), ErrorKind::cap_exceeded);
  }
}

TEST(Report, KeyValueLines) {
  CnfFormula f = pigeonhole(3, 2);
  DecompositionSet b(6, {1, 2});
  auto e = estimate_d_hardness(f, b, EstimatorConfig{});
  auto r = estimate_rho(f, b, 100, 1);
  std::string text = format_estimate(b, e, r);
  EXPECT_NE(text.find("backdoor=1 2\n"), std::string::npos);
  EXPECT_NE(text.find("exhaustive=true\n"), std::string::npos);
  EXPECT_NE(text.find("converged=true\n"), std::string::npos);
  EXPECT_NE(text.find("rho="), std::string::npos);
  EXPECT_EQ(text, format_estimate(b, estimate_d_hardness(f, b, EstimatorConfig{}),
                                  r));
}
