#include "dhard/estimator.hpp"

#include "dhard/error.hpp"
#include "dhard/parallel.hpp"
#include "dhard/rng.hpp"
#include "dhard/unit_propagation.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>

namespace dhard {

//===----------------------------------------------------------------------===//
// DecompositionSet
//===----------------------------------------------------------------------===//

DecompositionSet::DecompositionSet(int universe, std::vector<int> vars)
    : mask_(std::max(universe, 0), false), vars_(std::move(vars)) {
  std::sort(vars_.begin(), vars_.end());
  for (std::size_t i = 0; i < vars_.size(); ++i) {
    int v = vars_[i];
    if (v < 1 || v > universe)
      throw Error(ErrorKind::invalid_argument,
                  "variable " + std::to_string(v) + " outside 1.." +
                      std::to_string(universe));
    if (i > 0 && vars_[i - 1] == v)
      throw Error(ErrorKind::invalid_argument,
                  "variable " + std::to_string(v) + " listed twice");
    mask_[v - 1] = true;
  }
}

DecompositionSet DecompositionSet::from_mask(const std::vector<bool> &mask) {
  std::vector<int> vars;
  for (std::size_t i = 0; i < mask.size(); ++i)
    if (mask[i])
      vars.push_back(static_cast<int>(i) + 1);
  return DecompositionSet(static_cast<int>(mask.size()), std::move(vars));
}

Assignment DecompositionSet::assignment(std::uint64_t index) const {
  std::vector<Lit> lits;
  lits.reserve(vars_.size());
  const std::size_t k = vars_.size();
  for (std::size_t i = 0; i < k; ++i) {
    std::size_t shift = k - 1 - i;
    bool bit = shift < 64 && ((index >> shift) & 1U);
    lits.emplace_back(vars_[i], bit);
  }
  return Assignment(std::move(lits));
}

std::string DecompositionSet::to_string() const {
  std::string s;
  for (std::size_t i = 0; i < vars_.size(); ++i) {
    if (i)
      s.push_back(' ');
    s += std::to_string(vars_[i]);
  }
  return s;
}

//===----------------------------------------------------------------------===//
// Sampling and statistics
//===----------------------------------------------------------------------===//

void EstimatorConfig::validate() const {
  if (!(epsilon > 0 && epsilon < 1))
    throw Error(ErrorKind::invalid_argument, "epsilon must lie in (0,1)");
  if (!(delta > 0 && delta < 1))
    throw Error(ErrorKind::invalid_argument, "delta must lie in (0,1)");
  if (initial_n < 2)
    throw Error(ErrorKind::invalid_argument, "initial sample size must be >= 2");
  if (max_n < initial_n)
    throw Error(ErrorKind::invalid_argument,
                "maximum sample size is below the initial sample size");
}

SampleStats SampleStats::from(std::vector<double> observations) {
  SampleStats s;
  s.n = observations.size();
  if (s.n == 0)
    throw Error(ErrorKind::invalid_argument, "empty sample");
  long double sum = 0;
  for (double x : observations)
    sum += x;
  s.mean = sum / static_cast<long double>(s.n);
  if (s.n > 1) {
    long double sq = 0;
    for (double x : observations) {
      long double d = x - s.mean;
      sq += d * d;
    }
    s.variance = sq / static_cast<long double>(s.n - 1);
  }
  s.observations = std::move(observations);
  return s;
}

Assignment sampled_assignment(const DecompositionSet &b, std::uint64_t stream,
                              std::uint64_t seed, std::uint64_t j) {
  auto vars = b.vars();
  std::vector<Lit> lits;
  lits.reserve(vars.size());
  std::uint64_t word = 0;
  for (std::size_t i = 0; i < vars.size(); ++i) {
    if (i % 64 == 0)
      word = counter_word(seed, stream, j, i / 64);
    lits.emplace_back(vars[i], ((word >> (i % 64)) & 1U) != 0);
  }
  return Assignment(std::move(lits));
}

namespace {

bool enumerable(std::size_t card, std::uint64_t n) {
  return card < 63 && (1ULL << card) <= n;
}

} // namespace

AssignmentSample sample_assignments(const DecompositionSet &b, std::uint64_t n,
                                    std::uint64_t seed) {
  if (b.empty())
    throw Error(ErrorKind::invalid_argument,
                "cannot sample assignments of an empty set");
  AssignmentSample out;
  if (enumerable(b.size(), n)) {
    std::uint64_t space = 1ULL << b.size();
    out.exhaustive = true;
    out.assignments.reserve(space);
    for (std::uint64_t i = 0; i < space; ++i)
      out.assignments.push_back(b.assignment(i));
    return out;
  }
  std::uint64_t stream = stream_id(b.vars());
  out.assignments.reserve(n);
  for (std::uint64_t j = 0; j < n; ++j)
    out.assignments.push_back(sampled_assignment(b, stream, seed, j));
  return out;
}

std::uint64_t required_sample_size(const SampleStats &stats, double epsilon,
                                   double delta) {
  if (stats.mean == 0 || stats.variance == 0)
    return 1;
  long double e = epsilon;
  long double bound =
      stats.variance / (e * e * delta * stats.mean * stats.mean);
  // Snap values within rounding noise of an integer so that exact ratios
  // such as 4 / (0.01 * 0.1 * 100) do not round up to 41.
  long double nearest = std::nearbyint(bound);
  if (std::fabs(bound - nearest) <= 1e-9L * std::max(1.0L, bound))
    bound = nearest;
  bound = std::ceil(bound);
  if (bound >= static_cast<long double>(std::numeric_limits<std::uint64_t>::max()))
    return std::numeric_limits<std::uint64_t>::max();
  return std::max<std::uint64_t>(1, static_cast<std::uint64_t>(bound));
}

//===----------------------------------------------------------------------===//
// Estimation
//===----------------------------------------------------------------------===//

SolveOutcome solve_branch(const CnfFormula &formula, const Assignment &beta,
                          WorkloadMeasure measure) {
  SolverConfig cfg;
  cfg.measure = measure;
  return solve(formula, beta, cfg);
}

namespace {

struct Observation {
  double value = 0;
  bool sat = false;
  bool launched = false;
  bool up_decided = false;
  std::optional<Assignment> witness;
};

class BranchEvaluator {
public:
  BranchEvaluator(const CnfFormula &formula, WorkloadMeasure measure,
                  bool use_up)
      : formula_(formula), measure_(measure) {
    if (use_up)
      up_.emplace(formula);
  }

  Observation operator()(const Assignment &beta) {
    Observation obs;
    if (up_) {
      auto start = std::chrono::steady_clock::now();
      UpResult r = up_->run(beta);
      double elapsed = std::chrono::duration<double>(
                           std::chrono::steady_clock::now() - start)
                           .count();
      if (r.status != UpStatus::undecided) {
        obs.up_decided = true;
        switch (measure_) {
        case WorkloadMeasure::propagations:
          obs.value = static_cast<double>(r.propagations);
          break;
        case WorkloadMeasure::conflicts:
          obs.value = 0;
          break;
        case WorkloadMeasure::time:
          obs.value = elapsed;
          break;
        }
        if (r.status == UpStatus::decided_sat) {
          obs.sat = true;
          std::vector<Lit> model;
          for (int v = 1; v <= formula_.num_vars(); ++v)
            model.emplace_back(v, up_->value(v) > 0);
          obs.witness = Assignment(std::move(model));
        }
        return obs;
      }
    }
    SolveOutcome out = solve_branch(formula_, beta, measure_);
    obs.launched = true;
    obs.value = out.workload(measure_);
    if (out.verdict == Verdict::sat) {
      obs.sat = true;
      obs.witness = std::move(out.model);
    }
    return obs;
  }

private:
  const CnfFormula &formula_;
  WorkloadMeasure measure_;
  std::optional<UnitPropagator> up_;
};

void check_backdoor(const CnfFormula &formula, const DecompositionSet &b) {
  if (!b.empty() && b.vars().back() > formula.num_vars())
    throw Error(ErrorKind::invalid_argument,
                "decomposition set references variable " +
                    std::to_string(b.vars().back()) +
                    " beyond the formula's " +
                    std::to_string(formula.num_vars()) + " variables");
}

DHardnessEstimate run_estimate(const CnfFormula &formula,
                               const DecompositionSet &b,
                               const EstimatorConfig &config, bool use_up) {
  config.validate();
  check_backdoor(formula, b);
  unsigned workers = resolve_workers(config.workers);
  std::vector<BranchEvaluator> evaluators;
  evaluators.reserve(workers);
  for (unsigned w = 0; w < workers; ++w)
    evaluators.emplace_back(formula, config.measure, use_up);

  DHardnessEstimate est;
  est.card_b = b.size();
  const std::uint64_t stream = stream_id(b.vars());
  std::vector<Observation> obs;

  auto evaluate = [&](std::size_t from, auto &&beta_of) {
    parallel_for(obs.size() - from, workers, [&](std::size_t i, unsigned w) {
      obs[from + i] = evaluators[w](beta_of(from + i));
    });
  };

  std::uint64_t n = config.initial_n;
  for (;;) {
    if (enumerable(b.size(), n)) {
      obs.assign(1ULL << b.size(), Observation{});
      evaluate(0, [&](std::size_t i) { return b.assignment(i); });
      est.exhaustive = true;
      est.converged = true;
    } else {
      std::size_t from = obs.size();
      obs.resize(n);
      evaluate(from, [&](std::size_t j) {
        return sampled_assignment(b, stream, config.seed, j);
      });
    }

    auto sat = std::find_if(obs.begin(), obs.end(),
                            [](const Observation &o) { return o.sat; });
    if (sat != obs.end()) {
      est.sat_found = true;
      est.sat_witness = sat->witness;
    }

    std::vector<double> values;
    values.reserve(obs.size());
    for (const auto &o : obs)
      values.push_back(o.value);
    est.stats = SampleStats::from(std::move(values));
    if (est.exhaustive || est.sat_found)
      break;
    if (est.stats.n >=
        required_sample_size(est.stats, config.epsilon, config.delta)) {
      est.converged = true;
      break;
    }
    if (n >= config.max_n)
      break;
    n = std::min(2 * n, config.max_n);
  }

  for (const auto &o : obs) {
    est.solver_launches += o.launched ? 1 : 0;
    est.up_decided += o.up_decided ? 1 : 0;
  }
  est.value = std::ldexp(est.stats.mean, static_cast<int>(b.size()));
  est.log2_value =
      est.stats.mean > 0
          ? static_cast<long double>(b.size()) + std::log2(est.stats.mean)
          : -std::numeric_limits<long double>::infinity();
  return est;
}

} // namespace

DHardnessEstimate estimate_d_hardness(const CnfFormula &formula,
                                      const DecompositionSet &b,
                                      const EstimatorConfig &config) {
  return run_estimate(formula, b, config, false);
}

DHardnessEstimate
estimate_d_hardness_with_up_preprocessing(const CnfFormula &formula,
                                          const DecompositionSet &b,
                                          const EstimatorConfig &config) {
  return run_estimate(formula, b, config, true);
}

RhoEstimate estimate_rho(const CnfFormula &formula, const DecompositionSet &b,
                         std::uint64_t n, std::uint64_t seed,
                         unsigned workers) {
  if (b.empty())
    throw Error(ErrorKind::invalid_argument, "rho needs a nonempty set");
  if (n == 0)
    throw Error(ErrorKind::invalid_argument, "rho needs a positive sample size");
  check_backdoor(formula, b);
  workers = resolve_workers(workers);
  std::vector<UnitPropagator> contexts(workers, UnitPropagator(formula));

  RhoEstimate out;
  out.exhaustive = enumerable(b.size(), n);
  out.n = out.exhaustive ? (1ULL << b.size()) : n;
  const std::uint64_t stream = stream_id(b.vars());
  std::vector<char> easy(out.n, 0);
  parallel_for(out.n, workers, [&](std::size_t j, unsigned w) {
    Assignment beta = out.exhaustive
                          ? b.assignment(j)
                          : sampled_assignment(b, stream, seed, j);
    easy[j] = contexts[w].run(beta).status != UpStatus::undecided;
  });
  out.easy_count = static_cast<std::uint64_t>(
      std::count(easy.begin(), easy.end(), 1));
  out.rho = static_cast<double>(out.easy_count) / static_cast<double>(out.n);
  return out;
}

long double exact_d_hardness(const CnfFormula &formula,
                             const DecompositionSet &b,
                             WorkloadMeasure measure, std::uint64_t cap,
                             unsigned workers) {
  check_backdoor(formula, b);
  if (b.size() >= 63 || (1ULL << b.size()) > cap)
    throw Error(ErrorKind::cap_exceeded,
                "2^" + std::to_string(b.size()) +
                    " branches exceed the enumeration cap of " +
                    std::to_string(cap));
  std::uint64_t space = 1ULL << b.size();
  std::vector<double> values(space);
  parallel_for(space, workers, [&](std::size_t i, unsigned) {
    values[i] = solve_branch(formula, b.assignment(i), measure).workload(measure);
  });
  long double total = 0;
  for (double v : values)
    total += v;
  return total;
}

std::string format_estimate(const DecompositionSet &b,
                            const DHardnessEstimate &estimate,
                            const std::optional<RhoEstimate> &rho) {
  char buf[128];
  std::string out;
  auto line = [&](const char *key, const std::string &value) {
    out += key;
    out += '=';
    out += value;
    out += '\n';
  };
  auto num = [&](long double v) {
    std::snprintf(buf, sizeof buf, "%.17Lg", v);
    return std::string(buf);
  };
  line("backdoor", b.to_string());
  line("card_b", std::to_string(estimate.card_b));
  line("n", std::to_string(estimate.stats.n));
  line("mean", num(estimate.stats.mean));
  line("variance", num(estimate.stats.variance));
  line("log2_value", num(estimate.log2_value));
  line("value", num(estimate.value));
  line("converged", estimate.converged ? "true" : "false");
  line("exhaustive", estimate.exhaustive ? "true" : "false");
  line("sat_found", estimate.sat_found ? "true" : "false");
  line("solver_launches", std::to_string(estimate.solver_launches));
  line("up_decided", std::to_string(estimate.up_decided));
  if (rho) {
    line("rho", num(rho->rho));
    line("rho_n", std::to_string(rho->n));
    line("rho_easy", std::to_string(rho->easy_count));
  }
  return out;
}

} // namespace dhard
