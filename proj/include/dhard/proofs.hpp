#pragma once

#include "dhard/estimator.hpp"
#include "dhard/formula.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace dhard {

struct CubeGroupFormula {
  std::vector<Assignment> cubes;
  /// C plus, for each cube sigma_j = l_1 & ... & l_m with selector
  /// u_j = num_vars + j: (-u_j v l_i) for every i, (u_j v -l_1 v ... v -l_m),
  /// and finally (u_1 v ... v u_r).
  CnfFormula encoded;
};

/// Throws Error(invalid_argument) for an empty group, an empty cube, or
/// cubes over different variable sets.
CubeGroupFormula build_cube_group(const CnfFormula &formula,
                                  std::span<const Assignment> cubes);

/// Units of beta followed by the clauses of C[beta/B].
CnfFormula hard_branch_formula(const CnfFormula &formula,
                               const Assignment &beta);

enum class UnitKind { hard_branch, cube_group };

std::string_view to_string(UnitKind k);

struct ProofUnit {
  UnitKind kind = UnitKind::hard_branch;
  /// Paths relative to the manifest's directory.
  std::string formula_file;
  std::string proof_file;
  /// Bits of beta for hard branches, "g<k>" for groups.
  std::string id;
};

struct ProofBundle {
  std::filesystem::path manifest;
  DecompositionSet backdoor;
  int k_groups = 0;
  std::vector<ProofUnit> units;
};

struct ProofConfig {
  int k_groups = 20;
  unsigned workers = 1;
  std::uint64_t cap = kDefaultEnumerationCap;
};

inline constexpr const char *kManifestName = "manifest.tsv";

/// Writes base.cnf, one formula/proof pair per unit and manifest.tsv into
/// `out_dir` (created if missing). Hard branches (UP-undecided beta) each get
/// a refutation of hard_branch_formula(); UP-decided beta are dealt
/// round-robin in lexicographic order into at most K cube groups. Throws
/// Error(sat_found) if some branch is satisfiable, Error(cap_exceeded) if
/// 2^|B| > cap.
ProofBundle generate_proof_bundle(const CnfFormula &formula,
                                  const DecompositionSet &b,
                                  const std::filesystem::path &out_dir,
                                  const ProofConfig &config = {});

struct UnitStatus {
  std::string id;
  bool ok = false;
  std::string message;
};

struct BundleCheck {
  bool ok = false;
  bool coverage_ok = false;
  std::string coverage_message;
  std::vector<UnitStatus> units;
};

/// Verifies every unit independently: file digests, the unit's formula
/// against the one rebuilt from the base formula, and the DRAT proof by RUP.
/// ok is true iff all units pass and every beta is covered exactly once.
/// Throws Error(io) / Error(parse) when the manifest itself is unusable.
BundleCheck check_proof_bundle(const std::filesystem::path &manifest,
                               unsigned workers = 1);

/// 64-bit FNV-1a of a byte string, printed as 16 hex digits in manifests.
std::uint64_t fnv1a64(std::string_view bytes);

} // namespace dhard
