#pragma once

#include "dhard/formula.hpp"

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace dhard {

struct DratStep {
  enum class Kind { add, remove };
  Kind kind = Kind::add;
  Clause clause;

  bool operator==(const DratStep &) const = default;
};

/// Clause addition/deletion record. Text form: one step per line, additions
/// as "l1 l2 ... 0", deletions as "d l1 l2 ... 0"; a refutation ends with "0".
struct DratProof {
  std::vector<DratStep> steps;

  void add(Clause c) { steps.push_back({DratStep::Kind::add, std::move(c)}); }
  void remove(Clause c) {
    steps.push_back({DratStep::Kind::remove, std::move(c)});
  }

  bool operator==(const DratProof &) const = default;
};

std::string write_drat(const DratProof &proof);
/// Throws Error(parse), reporting the offending line.
DratProof parse_drat(std::string_view text);

DratProof read_drat_file(const std::filesystem::path &path);
void write_drat_file(const std::filesystem::path &path, const DratProof &proof);

struct DratCheckResult {
  bool ok = false;
  /// Index of the first failing step, if any.
  std::optional<std::size_t> failed_step;
  std::string message;
};

/// Forward RUP checker. Every added clause must be implied by unit
/// propagation from the current clause set; deletions are honored (deleting
/// an absent clause is ignored). Succeeds once the empty clause is added.
DratCheckResult check_drat(const CnfFormula &formula, const DratProof &proof);

} // namespace dhard
