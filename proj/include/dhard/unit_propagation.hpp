#pragma once

#include "dhard/formula.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace dhard {

enum class UpStatus { decided_unsat, decided_sat, undecided };

struct UpResult {
  UpStatus status = UpStatus::undecided;
  /// Literals assigned by unit propagation (assumptions are not counted).
  std::uint64_t propagations = 0;
};

/// Reusable unit-propagation context over one formula.
///
/// Every run() starts from the empty assignment, so the result is a pure
/// function of (formula, assumptions). Propagation is counter based over
/// static occurrence lists processed in trail order: the seed is the
/// assumptions in variable order, then the formula's unit clauses in clause
/// order. The CDCL solver runs the same routine for its root level, so a
/// branch decided here reports exactly the counters a full solve would.
class UnitPropagator {
public:
  explicit UnitPropagator(const CnfFormula &formula);

  UpResult run(const Assignment &assumptions);
  UpResult run(std::span<const Lit> assumptions);

  /// Literals assigned by the last run(), assumptions first.
  std::span<const Lit> trail() const { return trail_; }
  /// Value of `var` after the last run(): 1 true, -1 false, 0 unassigned.
  signed char value(int var) const { return value_[var]; }
  int num_vars() const { return num_vars_; }
  std::size_t num_clauses() const { return offsets_.size() - 1; }

  /// Index (into formula.clauses()) of each clause not satisfied after the
  /// last run(). Only meaningful when the run did not end in a conflict.
  std::vector<std::uint32_t> unsatisfied_clauses() const;

private:
  void reset();
  bool enqueue(Lit l, bool counted);

  int num_vars_;
  bool has_empty_;
  std::vector<std::uint32_t> offsets_;
  std::vector<Lit> lits_;
  std::vector<std::vector<std::uint32_t>> occurrences_;
  std::vector<std::uint32_t> units_;

  std::vector<signed char> value_;
  std::vector<std::uint32_t> num_false_;
  std::vector<std::uint32_t> num_true_;
  std::vector<Lit> trail_;
  std::size_t processed_ = 0;
  std::size_t satisfied_ = 0;
  std::uint64_t propagations_ = 0;
};

/// One-shot UP on `formula` under `assumptions`; never branches.
UpResult propagate_only(const CnfFormula &formula,
                        const Assignment &assumptions);

} // namespace dhard
