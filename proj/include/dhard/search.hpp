#pragma once

#include "dhard/estimator.hpp"
#include "dhard/formula.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace dhard {

struct VariableWeight {
  int var = 0;
  /// Variables assigned (the asserted one included) by UP after x_var = 1.
  std::uint64_t plus = 0;
  /// Same for x_var = 0.
  std::uint64_t minus = 0;
  std::uint64_t total = 0;
};

/// w_i = w_i^+ + w_i^- for every variable; a literal whose assertion makes
/// UP hit a conflict counts as num_vars. Sorted by total descending, then by
/// variable ascending.
std::vector<VariableWeight> variable_weights(const CnfFormula &formula);

struct SearchSpace {
  DecompositionSet b0;
  std::vector<VariableWeight> weights;
};

inline constexpr int kDefaultSearchSpaceSize = 200;

/// The m heaviest variables. Throws Error(invalid_argument) unless
/// 1 <= m <= num_vars.
SearchSpace reduce_search_space(const CnfFormula &formula,
                                int m = kDefaultSearchSpaceSize);

struct GaConfig {
  int population = 16; // R
  int elite = 2;       // E
  int crossover = 8;   // G
  int mutation = 6;    // H
  double mutation_beta = 3.0;
  double time_limit_s = 60.0;
  /// Stops after this many generations (the initial population is
  /// generation 0). With a generous time limit this makes a run
  /// reproducible regardless of machine speed.
  std::optional<std::uint64_t> max_generations;
  std::uint64_t seed = 1;
  int init_size = 30;
  bool up_preprocessing = true;
  EstimatorConfig estimator;

  /// Throws Error(invalid_argument) when a field is out of range or
  /// R != E + G + H.
  void validate() const;
};

/// Fitness F(B) = estimated d-hardness, memoized by mask.
class FitnessEvaluator {
public:
  FitnessEvaluator(const CnfFormula &formula, EstimatorConfig config,
                   bool up_preprocessing = true);

  /// Throws Error(invalid_argument) for an empty set.
  const DHardnessEstimate &evaluate(const DecompositionSet &b);
  bool cached(const DecompositionSet &b) const;
  /// Number of estimator runs (cache misses) so far.
  std::uint64_t evaluations() const { return evaluations_; }

private:
  const CnfFormula &formula_;
  EstimatorConfig config_;
  bool up_;
  std::map<std::vector<int>, DHardnessEstimate> cache_;
  std::uint64_t evaluations_ = 0;
};

struct Individual {
  DecompositionSet mask;
  /// log2 F; -inf when F = 0.
  long double log2_fitness = 0;
};

struct HistoryRecord {
  double elapsed_s = 0;
  std::uint64_t evals = 0;
  std::size_t card_b = 0;
  long double log2_fitness = 0;
  long double best_log2_fitness = 0;
};

struct GaResult {
  Individual best;
  DHardnessEstimate best_estimate;
  std::vector<HistoryRecord> history;
  std::uint64_t generations = 0;
  std::uint64_t evaluations = 0;
  bool sat_found = false;
  std::optional<Assignment> sat_witness;
};

/// Selection distribution p_i = (1/F_i) / sum_j (1/F_j) from log2 F values.
/// If some F_i = 0 the mass is shared uniformly among those individuals.
std::vector<double> selection_probabilities(std::span<const long double> log2_f);

/// Elitist genetic algorithm over subsets of space.b0 minimizing F.
GaResult ga_minimize(const CnfFormula &formula, const SearchSpace &space,
                     const GaConfig &config);

/// Header "elapsed_s,evals,card_B,log2_fitness,best_log2_fitness" plus one
/// row per record.
std::string history_csv(std::span<const HistoryRecord> history);

inline constexpr int kDefaultSbsCap = 20;

/// Smallest strong unit-propagation backdoor: subsets are tried by
/// increasing cardinality, lexicographically within a cardinality, and the
/// first B whose every assignment UP decides is returned. Throws
/// Error(cap_exceeded) when num_vars > cap.
std::optional<DecompositionSet> find_minimum_sbs(const CnfFormula &formula,
                                                 int cap = kDefaultSbsCap);

/// True if unit propagation decides C under every assignment to B.
bool is_strong_up_backdoor(const CnfFormula &formula,
                           const DecompositionSet &b);

} // namespace dhard
