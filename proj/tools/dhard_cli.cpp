// Command-line front end over the C API.
//
// Exit codes: 0 success, 10 satisfiable, 20 unsatisfiable, 1 error.

#include "dhard/dhard.h"

#include <CLI11.hpp>

#include <cstdio>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

namespace {

constexpr int kExitError = 1;
constexpr int kExitSat = 10;
constexpr int kExitUnsat = 20;

struct Args {
  std::string cnf;
  std::vector<std::string> backdoors;
  std::string out;
  std::string manifest;
  std::string measure = "props";
  bool exhaustive = false;
};

int fail(const char *what) {
  std::fprintf(stderr, "error: %s: %s\n", what, dh_last_error());
  return kExitError;
}

/// "1,2,3" or "1 2 3" -> {1,2,3}.
bool parse_vars(const std::string &text, std::vector<int> &out) {
  std::string s = text;
  for (char &c : s)
    if (c == ',')
      c = ' ';
  std::istringstream in(s);
  int v;
  while (in >> v)
    out.push_back(v);
  return in.eof() && !out.empty();
}

struct FormulaHandle {
  dh_formula *f = nullptr;
  ~FormulaHandle() { dh_formula_free(f); }
};

void emit(char *report) {
  if (report)
    std::fputs(report, stdout);
  dh_string_free(report);
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"Decomposition hardness estimation, backdoor search and "
               "decomposed solving for CNF formulas"};
  app.require_subcommand(1);

  dh_options opt;
  dh_options_init(&opt);
  Args a;

  auto add_common = [&](CLI::App *cmd) {
    cmd->add_option("--workers", opt.workers,
                    "Worker threads (0 = all hardware threads)");
  };
  auto add_estimation = [&](CLI::App *cmd) {
    cmd->add_option("--epsilon", opt.epsilon, "Relative error bound")
        ->check(CLI::Range(0.0, 1.0));
    cmd->add_option("--delta", opt.delta, "Failure probability bound")
        ->check(CLI::Range(0.0, 1.0));
    cmd->add_option("--sample-size", opt.sample_size, "Initial sample size N");
    cmd->add_option("--max-sample-size", opt.max_sample_size,
                    "Cap for the doubling sample size");
    cmd->add_option("--measure", a.measure, "Workload measure")
        ->check(CLI::IsMember({"props", "conflicts", "time"}));
    cmd->add_option("--seed", opt.seed, "Random seed");
  };

  auto *estimate = app.add_subcommand("estimate", "Estimate d-hardness of B");
  estimate->add_option("cnf", a.cnf, "DIMACS file")->required();
  estimate->add_option("--backdoor", a.backdoors, "Variables of B (1,2,3)")
      ->required();
  estimate->add_flag("--exhaustive", a.exhaustive,
                     "Enumerate all 2^|B| assignments");
  add_estimation(estimate);
  add_common(estimate);

  auto *find = app.add_subcommand("find-backdoor",
                                  "Search for a decomposition set");
  find->add_option("cnf", a.cnf, "DIMACS file")->required();
  find->add_option("--b0-size", opt.b0_size, "Reduced search space size");
  find->add_option("--init-size", opt.init_size, "Cardinality of initial sets");
  find->add_option("--elite", opt.elite, "Elite individuals E");
  find->add_option("--crossover", opt.crossover, "Crossover offspring G");
  find->add_option("--mutation", opt.mutation, "Mutation offspring H");
  find->add_option("--time-limit-s", opt.time_limit_s, "Search time budget")
      ->check(CLI::PositiveNumber);
  find->add_option("--max-generations", opt.max_generations,
                   "Stop after this many generations (0 = no limit)");
  find->add_option("--out", a.out, "History CSV path");
  add_estimation(find);
  add_common(find);

  auto *solve_cmd = app.add_subcommand("solve", "Solve by decomposition");
  solve_cmd->add_option("cnf", a.cnf, "DIMACS file")->required();
  solve_cmd
      ->add_option("--backdoor", a.backdoors,
                   "Backdoor variables; repeat for several backdoors")
      ->required();
  solve_cmd->add_option("--measure", a.measure, "Workload measure")
      ->check(CLI::IsMember({"props", "conflicts", "time"}));
  solve_cmd->add_option("--out", a.out, "Branch ledger CSV path");
  add_common(solve_cmd);

  auto *prove = app.add_subcommand("prove", "Write a proof bundle");
  prove->add_option("cnf", a.cnf, "DIMACS file")->required();
  prove->add_option("--backdoor", a.backdoors, "Variables of B")->required();
  prove->add_option("--k-groups", opt.k_groups, "Cube groups K")
      ->check(CLI::PositiveNumber);
  prove->add_option("--out", a.out, "Bundle directory")->required();
  add_common(prove);

  auto *check = app.add_subcommand("check", "Verify a proof bundle");
  check->add_option("manifest", a.manifest, "Bundle manifest")->required();
  add_common(check);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    int code = app.exit(e);
    return code == 0 ? 0 : kExitError;
  }

  opt.measure = a.measure == "conflicts" ? DH_MEASURE_CONFLICTS
                : a.measure == "time"    ? DH_MEASURE_TIME
                                         : DH_MEASURE_PROPAGATIONS;
  opt.exhaustive = a.exhaustive ? 1 : 0;

  if (check->parsed()) {
    dh_check_result *r = nullptr;
    if (dh_check_bundle(a.manifest.c_str(), opt.workers, &r) != DH_OK)
      return fail("check");
    std::unique_ptr<dh_check_result, void (*)(dh_check_result *)> guard(
        r, dh_check_result_free);
    emit(dh_check_result_report(r));
    return dh_check_result_ok(r) ? 0 : kExitError;
  }

  FormulaHandle formula;
  if (dh_formula_read_file(a.cnf.c_str(), &formula.f) != DH_OK)
    return fail(a.cnf.c_str());

  std::vector<std::vector<int>> sets;
  for (const auto &text : a.backdoors) {
    std::vector<int> vars;
    if (!parse_vars(text, vars)) {
      std::fprintf(stderr, "error: invalid variable list '%s'\n", text.c_str());
      return kExitError;
    }
    sets.push_back(std::move(vars));
  }
  if ((estimate->parsed() || prove->parsed()) && sets.size() != 1) {
    std::fprintf(stderr, "error: exactly one --backdoor is required\n");
    return kExitError;
  }

  if (estimate->parsed()) {
    char *report = nullptr;
    dh_status s = dh_estimate_run(formula.f, sets[0].data(), sets[0].size(),
                                  &opt, &report);
    emit(report);
    if (s == DH_ERROR_SAT_FOUND)
      return kExitSat;
    return s == DH_OK ? 0 : fail("estimate");
  }

  if (find->parsed()) {
    dh_search_result *r = nullptr;
    dh_status s = dh_find_backdoor(formula.f, &opt, &r);
    if (s != DH_OK && s != DH_ERROR_SAT_FOUND)
      return fail("find-backdoor");
    std::unique_ptr<dh_search_result, void (*)(dh_search_result *)> guard(
        r, dh_search_result_free);
    emit(dh_search_result_report(r));
    if (!a.out.empty() &&
        dh_search_result_write_history(r, a.out.c_str()) != DH_OK)
      return fail("history");
    return s == DH_ERROR_SAT_FOUND ? kExitSat : 0;
  }

  if (solve_cmd->parsed()) {
    std::vector<int> flat;
    for (const auto &set : sets) {
      flat.insert(flat.end(), set.begin(), set.end());
      flat.push_back(0);
    }
    dh_solve_result *r = nullptr;
    if (dh_solve_decomposed(formula.f, flat.data(), flat.size(), &opt, &r) !=
        DH_OK)
      return fail("solve");
    std::unique_ptr<dh_solve_result, void (*)(dh_solve_result *)> guard(
        r, dh_solve_result_free);
    emit(dh_solve_result_report(r));
    if (!a.out.empty() &&
        dh_solve_result_write_ledger(r, a.out.c_str()) != DH_OK)
      return fail("ledger");
    switch (dh_solve_result_verdict(r)) {
    case DH_VERDICT_SAT:
      return kExitSat;
    case DH_VERDICT_UNSAT:
      return kExitUnsat;
    default:
      return kExitError;
    }
  }

  if (prove->parsed()) {
    char *report = nullptr;
    dh_status s = dh_prove(formula.f, sets[0].data(), sets[0].size(),
                           a.out.c_str(), &opt, &report);
    if (s == DH_ERROR_SAT_FOUND) {
      std::fprintf(stderr, "%s\n", dh_last_error());
      std::puts("verdict=SAT");
      return kExitSat;
    }
    if (s != DH_OK)
      return fail("prove");
    emit(report);
    return 0;
  }
  return kExitError;
}
