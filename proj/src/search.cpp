#include "dhard/search.hpp"

#include "dhard/error.hpp"
#include "dhard/rng.hpp"
#include "dhard/unit_propagation.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>

namespace dhard {

//===----------------------------------------------------------------------===//
// Search-space reduction
//===----------------------------------------------------------------------===//

std::vector<VariableWeight> variable_weights(const CnfFormula &formula) {
  const int n = formula.num_vars();
  UnitPropagator up(formula);
  auto derived = [&](Lit l) -> std::uint64_t {
    Lit seed[] = {l};
    UpResult r = up.run(std::span<const Lit>(seed));
    if (r.status == UpStatus::decided_unsat)
      return static_cast<std::uint64_t>(n);
    return up.trail().size();
  };
  std::vector<VariableWeight> out;
  out.reserve(n);
  for (int v = 1; v <= n; ++v) {
    VariableWeight w;
    w.var = v;
    w.plus = derived(Lit(v, true));
    w.minus = derived(Lit(v, false));
    w.total = w.plus + w.minus;
    out.push_back(w);
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const VariableWeight &a, const VariableWeight &b) {
                     return a.total > b.total;
                   });
  return out;
}

SearchSpace reduce_search_space(const CnfFormula &formula, int m) {
  if (m < 1 || m > formula.num_vars())
    throw Error(ErrorKind::invalid_argument,
                "search space size " + std::to_string(m) +
                    " outside 1.." + std::to_string(formula.num_vars()));
  SearchSpace space;
  space.weights = variable_weights(formula);
  std::vector<int> vars;
  for (int i = 0; i < m; ++i)
    vars.push_back(space.weights[i].var);
  space.b0 = DecompositionSet(formula.num_vars(), std::move(vars));
  return space;
}

//===----------------------------------------------------------------------===//
// Fitness
//===----------------------------------------------------------------------===//

void GaConfig::validate() const {
  if (population < 1 || elite < 0 || crossover < 0 || mutation < 0)
    throw Error(ErrorKind::invalid_argument,
                "population sizes must be nonnegative and R >= 1");
  if (population != elite + crossover + mutation)
    throw Error(ErrorKind::invalid_argument,
                "population size must equal elite + crossover + mutation");
  if (elite > population)
    throw Error(ErrorKind::invalid_argument, "more elites than individuals");
  if (!(time_limit_s > 0))
    throw Error(ErrorKind::invalid_argument, "time limit must be positive");
  if (!(mutation_beta > 1))
    throw Error(ErrorKind::invalid_argument, "mutation beta must exceed 1");
  if (init_size < 1)
    throw Error(ErrorKind::invalid_argument, "initial set size must be >= 1");
  estimator.validate();
}

FitnessEvaluator::FitnessEvaluator(const CnfFormula &formula,
                                   EstimatorConfig config,
                                   bool up_preprocessing)
    : formula_(formula), config_(config), up_(up_preprocessing) {
  config_.validate();
}

bool FitnessEvaluator::cached(const DecompositionSet &b) const {
  return cache_.count(std::vector<int>(b.vars().begin(), b.vars().end())) > 0;
}

const DHardnessEstimate &FitnessEvaluator::evaluate(const DecompositionSet &b) {
  if (b.empty())
    throw Error(ErrorKind::invalid_argument, "fitness of an empty set");
  std::vector<int> key(b.vars().begin(), b.vars().end());
  auto it = cache_.find(key);
  if (it != cache_.end())
    return it->second;
  DHardnessEstimate est =
      up_ ? estimate_d_hardness_with_up_preprocessing(formula_, b, config_)
          : estimate_d_hardness(formula_, b, config_);
  ++evaluations_;
  return cache_.emplace(std::move(key), std::move(est)).first->second;
}

std::vector<double> selection_probabilities(std::span<const long double> log2_f) {
  const std::size_t n = log2_f.size();
  std::vector<double> p(n, 0.0);
  if (n == 0)
    return p;
  long double lo = *std::min_element(log2_f.begin(), log2_f.end());
  if (std::isinf(lo) && lo < 0) {
    auto zeros = static_cast<double>(
        std::count(log2_f.begin(), log2_f.end(), lo));
    for (std::size_t i = 0; i < n; ++i)
      p[i] = log2_f[i] == lo ? 1.0 / zeros : 0.0;
    return p;
  }
  // 1/F_i relative to the best individual: 2^(lo - log2 F_i) <= 1.
  long double total = 0;
  std::vector<long double> w(n);
  for (std::size_t i = 0; i < n; ++i) {
    w[i] = std::exp2(lo - log2_f[i]);
    total += w[i];
  }
  for (std::size_t i = 0; i < n; ++i)
    p[i] = static_cast<double>(w[i] / total);
  return p;
}

//===----------------------------------------------------------------------===//
// Genetic algorithm
//===----------------------------------------------------------------------===//

namespace {

using Genome = std::vector<bool>; // one bit per position of b0

class Ga {
public:
  Ga(const CnfFormula &formula, const SearchSpace &space,
     const GaConfig &config)
      : formula_(formula), space_(space), config_(config),
        fitness_(formula, config.estimator, config.up_preprocessing),
        rng_(config.seed), start_(std::chrono::steady_clock::now()) {}

  GaResult run() {
    const std::size_t width = space_.b0.size();
    std::vector<Genome> population;
    population.reserve(config_.population);
    const std::size_t init =
        std::min<std::size_t>(static_cast<std::size_t>(config_.init_size), width);
    for (int i = 0; i < config_.population; ++i) {
      Genome g(width, false);
      for (std::size_t p : distinct_positions(init))
        g[p] = true;
      population.push_back(std::move(g));
    }

    std::vector<long double> scores;
    if (!evaluate_all(population, scores))
      return finish();
    while (!config_.max_generations ||
           result_.generations < *config_.max_generations) {
      if (out_of_time())
        break;
      population = breed(population, scores);
      if (!evaluate_all(population, scores))
        break;
      ++result_.generations;
    }
    return finish();
  }

private:
  double elapsed() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                         start_)
        .count();
  }
  bool out_of_time() const { return elapsed() >= config_.time_limit_s; }

  DecompositionSet to_set(const Genome &g) const {
    std::vector<int> vars;
    auto b0 = space_.b0.vars();
    for (std::size_t i = 0; i < g.size(); ++i)
      if (g[i])
        vars.push_back(b0[i]);
    return DecompositionSet(space_.b0.universe(), std::move(vars));
  }

  /// Evaluates every individual in index order; false once the search has
  /// to stop (satisfiable branch found or time exhausted).
  bool evaluate_all(const std::vector<Genome> &population,
                    std::vector<long double> &scores) {
    scores.assign(population.size(), 0);
    for (std::size_t i = 0; i < population.size(); ++i) {
      DecompositionSet b = to_set(population[i]);
      bool fresh = !fitness_.cached(b);
      if (fresh && have_best_ && out_of_time())
        return false;
      const DHardnessEstimate &est = fitness_.evaluate(b);
      if (est.sat_found) {
        result_.sat_found = true;
        result_.sat_witness = est.sat_witness;
        return false;
      }
      scores[i] = est.log2_value;
      if (!have_best_ || est.log2_value < result_.best.log2_fitness) {
        have_best_ = true;
        result_.best = {b, est.log2_value};
        result_.best_estimate = est;
      }
      if (fresh)
        result_.history.push_back({elapsed(), fitness_.evaluations(), b.size(),
                                   est.log2_value,
                                   result_.best.log2_fitness});
    }
    return true;
  }

  std::vector<Genome> breed(const std::vector<Genome> &population,
                            const std::vector<long double> &scores) {
    std::vector<Genome> next;
    next.reserve(config_.population);

    std::vector<std::size_t> order(population.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) {
                       return scores[a] < scores[b];
                     });
    for (int e = 0; e < config_.elite; ++e)
      next.push_back(population[order[e]]);

    std::vector<double> p = selection_probabilities(scores);
    for (int k = 0; k < config_.crossover; ++k) {
      const Genome &a = population[pick(p)];
      const Genome &b = population[pick(p)];
      next.push_back(repair(two_point_crossover(a, b)));
    }
    for (int k = 0; k < config_.mutation; ++k)
      next.push_back(repair(heavy_tailed_mutation(population[pick(p)])));
    return next;
  }

  std::size_t pick(const std::vector<double> &p) {
    double u = uniform_unit(rng_);
    double acc = 0;
    for (std::size_t i = 0; i < p.size(); ++i) {
      acc += p[i];
      if (u < acc)
        return i;
    }
    // Rounding left u above the cumulative sum: take the last nonzero entry.
    for (std::size_t i = p.size(); i-- > 0;)
      if (p[i] > 0)
        return i;
    return 0;
  }

  Genome two_point_crossover(const Genome &a, const Genome &b) {
    const std::size_t width = a.size();
    // Two distinct cut points in 0..width; positions [lo, hi) come from b.
    std::size_t c1 = uniform_below(rng_, width + 1);
    std::size_t c2 = uniform_below(rng_, width);
    if (c2 >= c1)
      ++c2;
    std::size_t lo = std::min(c1, c2), hi = std::max(c1, c2);
    Genome child = a;
    for (std::size_t i = lo; i < hi; ++i)
      child[i] = b[i];
    return child;
  }

  Genome heavy_tailed_mutation(const Genome &parent) {
    const std::size_t width = parent.size();
    const std::size_t max_len = std::max<std::size_t>(1, width / 2);
    std::vector<double> cdf(max_len);
    double total = 0;
    for (std::size_t l = 1; l <= max_len; ++l) {
      total += std::pow(static_cast<double>(l), -config_.mutation_beta);
      cdf[l - 1] = total;
    }
    double u = uniform_unit(rng_) * total;
    std::size_t len = max_len;
    for (std::size_t l = 0; l < max_len; ++l)
      if (u < cdf[l]) {
        len = l + 1;
        break;
      }
    Genome child = parent;
    for (std::size_t pos : distinct_positions(len))
      child[pos] = !child[pos];
    return child;
  }

  Genome repair(Genome g) {
    if (std::find(g.begin(), g.end(), true) == g.end())
      g[uniform_below(rng_, g.size())] = true;
    return g;
  }

  /// `k` distinct positions of b0 (partial Fisher-Yates).
  std::vector<std::size_t> distinct_positions(std::size_t k) {
    const std::size_t width = space_.b0.size();
    std::vector<std::size_t> idx(width);
    std::iota(idx.begin(), idx.end(), 0);
    k = std::min(k, width);
    for (std::size_t i = 0; i < k; ++i)
      std::swap(idx[i], idx[i + uniform_below(rng_, width - i)]);
    idx.resize(k);
    return idx;
  }

  GaResult finish() {
    result_.evaluations = fitness_.evaluations();
    return std::move(result_);
  }

  const CnfFormula &formula_;
  const SearchSpace &space_;
  const GaConfig &config_;
  FitnessEvaluator fitness_;
  Engine rng_;
  std::chrono::steady_clock::time_point start_;
  GaResult result_;
  bool have_best_ = false;
};

} // namespace

GaResult ga_minimize(const CnfFormula &formula, const SearchSpace &space,
                     const GaConfig &config) {
  config.validate();
  if (space.b0.empty())
    throw Error(ErrorKind::invalid_argument, "empty search space");
  if (space.b0.universe() > formula.num_vars())
    throw Error(ErrorKind::invalid_argument,
                "search space does not belong to this formula");
  return Ga(formula, space, config).run();
}

std::string history_csv(std::span<const HistoryRecord> history) {
  std::string out = "elapsed_s,evals,card_B,log2_fitness,best_log2_fitness\n";
  char buf[256];
  for (const auto &r : history) {
    std::snprintf(buf, sizeof buf, "%.6f,%llu,%zu,%.17Lg,%.17Lg\n",
                  r.elapsed_s, static_cast<unsigned long long>(r.evals),
                  r.card_b, r.log2_fitness, r.best_log2_fitness);
    out += buf;
  }
  return out;
}

//===----------------------------------------------------------------------===//
// Minimum strong backdoor
//===----------------------------------------------------------------------===//

namespace {

bool decides_all(UnitPropagator &up, const DecompositionSet &b) {
  const std::uint64_t space = 1ULL << b.size();
  for (std::uint64_t i = 0; i < space; ++i)
    if (up.run(b.assignment(i)).status == UpStatus::undecided)
      return false;
  return true;
}

} // namespace

bool is_strong_up_backdoor(const CnfFormula &formula,
                           const DecompositionSet &b) {
  if (b.size() >= 63)
    throw Error(ErrorKind::cap_exceeded, "backdoor too large to enumerate");
  UnitPropagator up(formula);
  return decides_all(up, b);
}

std::optional<DecompositionSet> find_minimum_sbs(const CnfFormula &formula,
                                                 int cap) {
  const int n = formula.num_vars();
  if (n > cap)
    throw Error(ErrorKind::cap_exceeded,
                std::to_string(n) + " variables exceed the cap of " +
                    std::to_string(cap));
  UnitPropagator up(formula);
  for (int k = 0; k <= n; ++k) {
    std::vector<int> cur(k);
    std::iota(cur.begin(), cur.end(), 1);
    for (;;) {
      DecompositionSet b(n, cur);
      if (decides_all(up, b))
        return b;
      int i = k - 1;
      while (i >= 0 && cur[i] == n - k + i + 1)
        --i;
      if (i < 0)
        break;
      ++cur[i];
      for (int j = i + 1; j < k; ++j)
        cur[j] = cur[j - 1] + 1;
    }
  }
  return std::nullopt;
}

} // namespace dhard
