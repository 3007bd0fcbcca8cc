#pragma once

#include <compare>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace dhard {

/// A literal in DIMACS convention: +v is x_v, -v is its negation.
class Lit {
public:
  constexpr Lit() = default;
  constexpr explicit Lit(int dimacs) : value_(dimacs) {}
  constexpr Lit(int var, bool positive) : value_(positive ? var : -var) {}

  constexpr int var() const { return value_ < 0 ? -value_ : value_; }
  constexpr bool positive() const { return value_ > 0; }
  constexpr int dimacs() const { return value_; }
  /// Dense index 2*var + (negative ? 1 : 0), used for watch/occurrence tables.
  constexpr std::size_t index() const {
    return 2 * static_cast<std::size_t>(var()) + (value_ < 0 ? 1 : 0);
  }

  constexpr Lit operator~() const { return Lit(-value_); }
  constexpr auto operator<=>(const Lit &) const = default;

private:
  int value_ = 0;
};

using Clause = std::vector<Lit>;

/// Partial assignment over a subset of variables. Stored as literals sorted by
/// variable index; each variable occurs at most once.
class Assignment {
public:
  Assignment() = default;
  /// Throws Error(invalid_argument) if a variable repeats or is < 1.
  explicit Assignment(std::vector<Lit> lits);

  std::span<const Lit> lits() const { return lits_; }
  std::size_t size() const { return lits_.size(); }
  bool empty() const { return lits_.empty(); }
  int max_var() const { return lits_.empty() ? 0 : lits_.back().var(); }

  std::optional<bool> value(int var) const;

  /// Union of two assignments; nullopt when they disagree on a shared variable.
  std::optional<Assignment> merged(const Assignment &other) const;

  /// Bits in variable order, e.g. "0110".
  std::string bits() const;

  bool operator==(const Assignment &) const = default;

private:
  std::vector<Lit> lits_;
};

/// Conjunction of clauses over variables 1..num_vars. Immutable once built.
///
/// Construction rejects out-of-range literals and tautologies, drops
/// duplicate literals inside a clause and drops repeated clauses (compared
/// after sorting). Literal order of the first occurrence is preserved.
class CnfFormula {
public:
  CnfFormula() = default;
  CnfFormula(int num_vars, std::vector<Clause> clauses);

  /// The canonical trivially-unsatisfiable formula: one empty clause.
  static CnfFormula contradiction(int num_vars);

  int num_vars() const { return num_vars_; }
  const std::vector<Clause> &clauses() const { return clauses_; }
  std::size_t num_clauses() const { return clauses_.size(); }
  bool has_empty_clause() const { return has_empty_; }

  /// True if every clause contains a literal made true by `a`.
  bool satisfied_by(const Assignment &a) const;

  /// Equality modulo clause order and literal order within clauses.
  bool same_clauses(const CnfFormula &other) const;

  bool operator==(const CnfFormula &) const = default;

private:
  int num_vars_ = 0;
  std::vector<Clause> clauses_;
  bool has_empty_ = false;
};

/// Parses DIMACS CNF text. Throws Error(parse) on malformed input.
CnfFormula parse_dimacs(std::string_view text);
/// Emits DIMACS with an exact header, one clause per line, LF endings.
std::string write_dimacs(const CnfFormula &formula);

CnfFormula read_dimacs_file(const std::filesystem::path &path);
void write_dimacs_file(const std::filesystem::path &path,
                       const CnfFormula &formula);

/// C[beta/B]: drops satisfied clauses and falsified literals. Variables keep
/// their indices. A clause emptied by `beta` yields contradiction().
CnfFormula substitute(const CnfFormula &formula, const Assignment &beta);

} // namespace dhard
