#include "dhard/unit_propagation.hpp"

#include "dhard/error.hpp"

namespace dhard {

UnitPropagator::UnitPropagator(const CnfFormula &formula)
    : num_vars_(formula.num_vars()), has_empty_(formula.has_empty_clause()),
      occurrences_(2 * static_cast<std::size_t>(formula.num_vars()) + 2),
      value_(formula.num_vars() + 1, 0) {
  offsets_.reserve(formula.num_clauses() + 1);
  offsets_.push_back(0);
  for (std::uint32_t c = 0; c < formula.num_clauses(); ++c) {
    const auto &clause = formula.clauses()[c];
    for (Lit l : clause) {
      lits_.push_back(l);
      occurrences_[l.index()].push_back(c);
    }
    offsets_.push_back(static_cast<std::uint32_t>(lits_.size()));
    if (clause.size() == 1)
      units_.push_back(c);
  }
  num_false_.assign(formula.num_clauses(), 0);
  num_true_.assign(formula.num_clauses(), 0);
}

void UnitPropagator::reset() {
  for (std::size_t i = 0; i < processed_; ++i) {
    Lit p = trail_[i];
    for (auto c : occurrences_[p.index()])
      --num_true_[c];
    for (auto c : occurrences_[(~p).index()])
      --num_false_[c];
  }
  for (Lit l : trail_)
    value_[l.var()] = 0;
  trail_.clear();
  processed_ = 0;
  satisfied_ = 0;
  propagations_ = 0;
}

bool UnitPropagator::enqueue(Lit l, bool counted) {
  signed char v = value_[l.var()];
  if (v != 0)
    return (v > 0) == l.positive();
  value_[l.var()] = l.positive() ? 1 : -1;
  trail_.push_back(l);
  if (counted)
    ++propagations_;
  return true;
}

UpResult UnitPropagator::run(const Assignment &assumptions) {
  return run(assumptions.lits());
}

UpResult UnitPropagator::run(std::span<const Lit> assumptions) {
  reset();
  for (Lit a : assumptions)
    if (a.var() < 1 || a.var() > num_vars_)
      throw Error(ErrorKind::invalid_argument,
                  "assumption on variable " + std::to_string(a.var()) +
                      " outside 1.." + std::to_string(num_vars_));

  bool conflict = has_empty_;
  for (std::size_t i = 0; !conflict && i < assumptions.size(); ++i)
    conflict = !enqueue(assumptions[i], false);
  for (std::size_t i = 0; !conflict && i < units_.size(); ++i)
    conflict = !enqueue(lits_[offsets_[units_[i]]], true);

  while (!conflict && processed_ < trail_.size()) {
    Lit p = trail_[processed_++];
    for (auto c : occurrences_[p.index()])
      if (num_true_[c]++ == 0)
        ++satisfied_;
    // Counter updates for p always complete so reset() can undo them.
    for (auto c : occurrences_[(~p).index()]) {
      std::uint32_t nf = ++num_false_[c];
      if (conflict || num_true_[c] > 0)
        continue;
      std::uint32_t size = offsets_[c + 1] - offsets_[c];
      if (nf == size) {
        conflict = true;
      } else if (nf + 1 == size) {
        for (std::uint32_t k = offsets_[c]; k < offsets_[c + 1]; ++k) {
          Lit l = lits_[k];
          signed char v = value_[l.var()];
          if (v == 0) {
            enqueue(l, true);
            break;
          }
          if ((v > 0) == l.positive())
            break;
        }
      }
    }
  }

  UpResult result;
  result.propagations = propagations_;
  if (conflict)
    result.status = UpStatus::decided_unsat;
  else if (satisfied_ == num_clauses())
    result.status = UpStatus::decided_sat;
  return result;
}

std::vector<std::uint32_t> UnitPropagator::unsatisfied_clauses() const {
  std::vector<std::uint32_t> out;
  for (std::uint32_t c = 0; c < num_clauses(); ++c)
    if (num_true_[c] == 0)
      out.push_back(c);
  return out;
}

UpResult propagate_only(const CnfFormula &formula,
                        const Assignment &assumptions) {
  UnitPropagator up(formula);
  return up.run(assumptions);
}

} // namespace dhard
