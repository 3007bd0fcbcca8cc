#pragma once

#include "dhard/estimator.hpp"
#include "dhard/formula.hpp"
#include "dhard/solver.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace dhard {

enum class BranchTier { up_decided, cdcl };

std::string_view to_string(BranchTier t);

struct BranchResult {
  /// 0-based position of the backdoor in the input list; -1 marks a
  /// product branch gamma of the multi-backdoor mode.
  int backdoor_id = 0;
  Assignment beta;
  /// Bits of beta, '|'-joined per backdoor for product branches.
  std::string beta_bits;
  BranchTier tier = BranchTier::cdcl;
  Verdict verdict = Verdict::unsat;
  std::uint64_t propagations = 0;
  std::uint64_t conflicts = 0;
  double elapsed_s = 0;
};

struct DecomposeConfig {
  WorkloadMeasure measure = WorkloadMeasure::propagations;
  unsigned workers = 1;
  std::uint64_t cap = kDefaultEnumerationCap;
};

struct DecomposedVerdict {
  Verdict verdict = Verdict::unsat;
  /// Total assignment satisfying C when verdict == sat.
  std::optional<Assignment> witness;
  std::vector<BranchResult> branches;
  /// Product branches skipped because overlapping backdoors disagree.
  std::uint64_t vacuous = 0;
  /// Per-backdoor number of UP-undecided assignments |Gamma_i| (multi mode).
  std::vector<std::uint64_t> hard_counts;

  std::uint64_t total_propagations() const;
  std::uint64_t total_conflicts() const;
  double total_elapsed_s() const;
};

/// Solves every C[beta/B] in lexicographic order of beta: unit propagation
/// first, a fresh CDCL solve under assumptions beta otherwise. Stops at the
/// first satisfiable branch (in lexicographic order). Throws
/// Error(cap_exceeded) when 2^|B| > cap.
DecomposedVerdict solve_with_backdoor(const CnfFormula &formula,
                                      const DecompositionSet &b,
                                      const DecomposeConfig &config = {});

/// Multi-backdoor mode: each B_i's assignments are split into UP-decided
/// ones and the hard set Gamma_i; then C[gamma] is solved for every gamma in
/// Gamma_1 x ... x Gamma_s. Backdoors may overlap; a gamma whose parts
/// disagree on a shared variable is counted as vacuous; it is not solved and
/// keeps a zero-cost ledger row.
DecomposedVerdict solve_with_backdoors(const CnfFormula &formula,
                                       std::span<const DecompositionSet> bs,
                                       const DecomposeConfig &config = {});

/// Header "backdoor_id,beta_bits,tier,verdict,propagations,conflicts,
/// elapsed_s" plus one row per branch; product rows use id "P".
std::string branch_ledger_csv(std::span<const BranchResult> branches);

/// Greedy list scheduling: jobs in the given order go to the worker that
/// frees up first. Returns the completion time of the last job. Throws
/// Error(invalid_argument) on negative costs or workers == 0.
double simulate_parallel(std::span<const double> costs, unsigned workers);

} // namespace dhard
