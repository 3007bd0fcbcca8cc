#pragma once

#include "dhard/drat.hpp"
#include "dhard/formula.hpp"
#include "dhard/unit_propagation.hpp"

#include <cstdint>
#include <optional>
#include <string_view>

namespace dhard {

enum class Verdict { sat, unsat, limit };

/// Unit in which a solver run is charged.
enum class WorkloadMeasure { propagations, conflicts, time };

std::string_view to_string(Verdict v);
std::string_view to_string(WorkloadMeasure m);
/// Accepts "props"/"propagations", "conflicts", "time".
std::optional<WorkloadMeasure> parse_measure(std::string_view text);

struct SolverConfig {
  bool proof_logging = false;
  WorkloadMeasure measure = WorkloadMeasure::propagations;
  /// Unset means run to completion.
  std::optional<std::uint64_t> conflict_limit;
};

struct SolveOutcome {
  Verdict verdict = Verdict::limit;
  std::uint64_t propagations = 0;
  std::uint64_t conflicts = 0;
  double elapsed_s = 0.0;
  /// Total assignment over 1..num_vars, present when verdict == sat.
  std::optional<Assignment> model;
  /// Present when verdict == unsat and proof logging is on.
  std::optional<DratProof> proof;

  double workload(WorkloadMeasure m) const;
};

/// Deterministic CDCL (two watched literals, first-UIP learning, VSIDS with
/// lowest-index tie-breaking, phase saving, Luby restarts, LBD-based clause
/// database reduction). Assumptions are fixed at the root level before
/// search, so a proof is a refutation of formula AND assumptions. Counters
/// are a pure function of (formula, assumptions, config).
SolveOutcome solve(const CnfFormula &formula, const Assignment &assumptions,
                   const SolverConfig &config = {});

} // namespace dhard
