#pragma once

// Formula generators and brute-force oracles used only by the test suites.

#include "dhard/formula.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace dhard::testing {

/// Pigeonhole formula: `pigeons` pigeons into `holes` holes. Variable
/// p*holes + h + 1 means pigeon p sits in hole h. Unsatisfiable iff
/// pigeons > holes.
CnfFormula pigeonhole(int pigeons, int holes);

/// Uniform random k-CNF (distinct variables per clause, fixed seed).
CnfFormula random_kcnf(int num_vars, int num_clauses, int k,
                       std::uint64_t seed);

/// Miter of two XOR chains over `inputs` inputs (one folds left to right,
/// the other right to left) with the difference asserted. Unsatisfiable;
/// the inputs 1..inputs form a strong unit-propagation backdoor while no
/// proper subset of them does. 3*inputs - 1 variables.
CnfFormula xor_miter(int inputs);

/// Odd-parity constraints over a cycle of `n` variables split into
/// two contradictory halves; every clause has >= 3 literals so unit
/// propagation is inert without assignments.
CnfFormula parity_contradiction(int n);

/// (x1 v x2)(-x1 v -x2) plus 3-literal clauses on x3..x6 that no single
/// assignment of x3 turns into units.
CnfFormula up_inert_formula();

struct NamedFormula {
  std::string name;
  CnfFormula formula;
};

/// Fixture corpus with <= 12 variables each (both SAT and UNSAT members).
std::vector<NamedFormula> small_fixtures();
/// Unsatisfiable members of small_fixtures().
std::vector<NamedFormula> small_unsat_fixtures();

/// Truth-table satisfiability under optional assumptions; returns a model.
std::optional<Assignment> brute_force_model(const CnfFormula &formula,
                                            const Assignment &assumptions = {});
inline bool brute_force_sat(const CnfFormula &formula,
                            const Assignment &assumptions = {}) {
  return brute_force_model(formula, assumptions).has_value();
}

/// Reference unit propagation written independently of UnitPropagator:
/// repeatedly scans all clauses until fixpoint. Returns nullopt on conflict,
/// otherwise the derived assignment (including the assumptions).
std::optional<std::vector<signed char>>
naive_unit_propagation(const CnfFormula &formula, const Assignment &assumptions);

/// Decided by naive_unit_propagation: conflict, or every clause satisfied.
bool naive_up_decides(const CnfFormula &formula, const Assignment &assumptions);

/// All subsets of {1..n} of the given cardinality in lexicographic order.
std::vector<std::vector<int>> subsets_of_size(int n, int k);

} // namespace dhard::testing
