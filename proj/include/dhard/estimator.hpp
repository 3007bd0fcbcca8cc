#pragma once

#include "dhard/formula.hpp"
#include "dhard/solver.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace dhard {

/// A set B of variables, kept both as the characteristic bit vector over
/// 1..universe and as the sorted member list.
class DecompositionSet {
public:
  DecompositionSet() = default;
  /// Throws Error(invalid_argument) on duplicates or indices outside
  /// 1..universe.
  DecompositionSet(int universe, std::vector<int> vars);
  /// mask[i] refers to variable i + 1.
  static DecompositionSet from_mask(const std::vector<bool> &mask);

  int universe() const { return static_cast<int>(mask_.size()); }
  std::span<const int> vars() const { return vars_; }
  std::size_t size() const { return vars_.size(); }
  bool empty() const { return vars_.empty(); }
  bool contains(int var) const {
    return var >= 1 && var <= universe() && mask_[var - 1];
  }
  const std::vector<bool> &mask() const { return mask_; }

  /// Assignment to B whose bits, read in variable order, spell `index` in
  /// binary with the first variable as the most significant bit. Index order
  /// is therefore lexicographic order over B.
  Assignment assignment(std::uint64_t index) const;

  /// "v1 v2 ..." in increasing order.
  std::string to_string() const;

  bool operator==(const DecompositionSet &) const = default;

private:
  std::vector<bool> mask_;
  std::vector<int> vars_;
};

struct EstimatorConfig {
  double epsilon = 0.1;
  double delta = 0.05;
  std::uint64_t initial_n = 1000;
  std::uint64_t max_n = 1ULL << 16;
  std::uint64_t seed = 1;
  WorkloadMeasure measure = WorkloadMeasure::propagations;
  unsigned workers = 1;

  /// Throws Error(invalid_argument) when a field is out of range.
  void validate() const;
};

struct SampleStats {
  std::uint64_t n = 0;
  long double mean = 0;
  /// Unbiased; 0 when n == 1.
  long double variance = 0;
  std::vector<double> observations;

  static SampleStats from(std::vector<double> observations);
};

struct DHardnessEstimate {
  SampleStats stats;
  std::size_t card_b = 0;
  /// 2^|B| * mean; +inf if it overflows long double (see log2_value).
  long double value = 0;
  /// |B| + log2(mean); -inf when mean == 0.
  long double log2_value = 0;
  bool converged = false;
  bool exhaustive = false;
  bool sat_found = false;
  std::optional<Assignment> sat_witness;
  std::uint64_t solver_launches = 0;
  std::uint64_t up_decided = 0;
};

struct RhoEstimate {
  double rho = 0;
  std::uint64_t n = 0;
  std::uint64_t easy_count = 0;
  bool exhaustive = false;
};

struct AssignmentSample {
  std::vector<Assignment> assignments;
  bool exhaustive = false;
};

/// Draws n assignments to B uniformly with replacement; sample j depends
/// only on (seed, B, j). When 2^|B| <= n the full enumeration in
/// lexicographic order is returned instead.
AssignmentSample sample_assignments(const DecompositionSet &b, std::uint64_t n,
                                    std::uint64_t seed);

/// Assignment number `j` of the random stream for (seed, B).
Assignment sampled_assignment(const DecompositionSet &b, std::uint64_t stream,
                              std::uint64_t seed, std::uint64_t j);

/// ceil(s^2 / (eps^2 * delta * mean^2)); 1 when the mean is zero.
std::uint64_t required_sample_size(const SampleStats &stats, double epsilon,
                                   double delta);

/// Monte Carlo estimate of d-hardness: every observation is a fresh solve of
/// C under assumptions beta; the sample doubles until its size meets
/// required_sample_size() or max_n is reached.
DHardnessEstimate estimate_d_hardness(const CnfFormula &formula,
                                      const DecompositionSet &b,
                                      const EstimatorConfig &config);

/// Same contract; each beta is first tried by a per-worker unit propagation
/// context and only undecided branches launch the CDCL solver.
DHardnessEstimate
estimate_d_hardness_with_up_preprocessing(const CnfFormula &formula,
                                          const DecompositionSet &b,
                                          const EstimatorConfig &config);

/// Fraction of sampled beta for which unit propagation decides C under beta.
RhoEstimate estimate_rho(const CnfFormula &formula, const DecompositionSet &b,
                         std::uint64_t n, std::uint64_t seed,
                         unsigned workers = 1);

inline constexpr std::uint64_t kDefaultEnumerationCap = 1ULL << 20;

/// Sum of the solver workload over all 2^|B| branches.
long double exact_d_hardness(const CnfFormula &formula,
                             const DecompositionSet &b,
                             WorkloadMeasure measure,
                             std::uint64_t cap = kDefaultEnumerationCap,
                             unsigned workers = 1);

/// Workload of a single branch: a fresh solve of C under assumptions beta.
SolveOutcome solve_branch(const CnfFormula &formula, const Assignment &beta,
                          WorkloadMeasure measure);

/// Line-oriented key=value report of an estimate (and rho, if given).
std::string format_estimate(const DecompositionSet &b,
                            const DHardnessEstimate &estimate,
                            const std::optional<RhoEstimate> &rho);

} // namespace dhard
