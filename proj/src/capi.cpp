#include "dhard/dhard.h"

#include "dhard/decompose.hpp"
#include "dhard/error.hpp"
#include "dhard/estimator.hpp"
#include "dhard/formula.hpp"
#include "dhard/parallel.hpp"
#include "dhard/proofs.hpp"
#include "dhard/search.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <new>

struct dh_formula {
  dhard::CnfFormula formula;
};

struct dh_search_result {
  dhard::GaResult result;
  int b0_size = 0;
};

struct dh_solve_result {
  dhard::DecomposedVerdict verdict;
  std::size_t num_backdoors = 0;
  dhard::WorkloadMeasure measure = dhard::WorkloadMeasure::propagations;
  unsigned workers = 1;
};

struct dh_check_result {
  dhard::BundleCheck check;
};

namespace {

thread_local std::string last_error;

dh_status status_of(dhard::ErrorKind kind) {
  switch (kind) {
  case dhard::ErrorKind::invalid_argument:
    return DH_ERROR_INVALID_ARGUMENT;
  case dhard::ErrorKind::parse:
    return DH_ERROR_PARSE;
  case dhard::ErrorKind::io:
    return DH_ERROR_IO;
  case dhard::ErrorKind::cap_exceeded:
    return DH_ERROR_CAP_EXCEEDED;
  case dhard::ErrorKind::sat_found:
    return DH_ERROR_SAT_FOUND;
  }
  return DH_ERROR_INTERNAL;
}

template <class F> dh_status guarded(F &&body) {
  try {
    last_error.clear();
    return body();
  } catch (const dhard::Error &e) {
    last_error = e.what();
    return status_of(e.kind());
  } catch (const std::bad_alloc &) {
    last_error = "out of memory";
    return DH_ERROR_INTERNAL;
  } catch (const std::exception &e) {
    last_error = e.what();
    return DH_ERROR_INTERNAL;
  }
}

dh_status invalid(const char *msg) {
  last_error = msg;
  return DH_ERROR_INVALID_ARGUMENT;
}

char *dup_string(const std::string &s) {
  char *p = static_cast<char *>(std::malloc(s.size() + 1));
  if (p)
    std::memcpy(p, s.c_str(), s.size() + 1);
  return p;
}

dhard::WorkloadMeasure measure_of(dh_measure m) {
  switch (m) {
  case DH_MEASURE_PROPAGATIONS:
    return dhard::WorkloadMeasure::propagations;
  case DH_MEASURE_CONFLICTS:
    return dhard::WorkloadMeasure::conflicts;
  case DH_MEASURE_TIME:
    return dhard::WorkloadMeasure::time;
  }
  throw dhard::Error(dhard::ErrorKind::invalid_argument, "unknown measure");
}

dhard::EstimatorConfig estimator_config(const dh_options &o) {
  dhard::EstimatorConfig c;
  c.epsilon = o.epsilon;
  c.delta = o.delta;
  c.initial_n = o.sample_size;
  c.max_n = o.max_sample_size;
  c.seed = o.seed;
  c.measure = measure_of(o.measure);
  c.workers = o.workers;
  c.validate();
  return c;
}

dh_options defaults() {
  dh_options o;
  dh_options_init(&o);
  return o;
}

dhard::DecompositionSet make_set(const dhard::CnfFormula &f, const int *vars,
                                 std::size_t n) {
  if (n == 0 || !vars)
    throw dhard::Error(dhard::ErrorKind::invalid_argument, "empty backdoor");
  return dhard::DecompositionSet(f.num_vars(), std::vector<int>(vars, vars + n));
}

void write_text(const char *path, const std::string &text) {
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw dhard::Error(dhard::ErrorKind::io,
                       std::string("cannot write ") + path);
  out << text;
  if (!out)
    throw dhard::Error(dhard::ErrorKind::io,
                       std::string("write failed for ") + path);
}

std::string num(long double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17Lg", v);
  return buf;
}

} // namespace

extern "C" {

void dh_options_init(dh_options *o) {
  if (!o)
    return;
  dhard::EstimatorConfig e;
  dhard::GaConfig g;
  o->epsilon = e.epsilon;
  o->delta = e.delta;
  o->sample_size = e.initial_n;
  o->max_sample_size = e.max_n;
  o->measure = DH_MEASURE_PROPAGATIONS;
  o->seed = e.seed;
  o->workers = 1;
  o->exhaustive = 0;
  o->b0_size = dhard::kDefaultSearchSpaceSize;
  o->init_size = g.init_size;
  o->elite = g.elite;
  o->crossover = g.crossover;
  o->mutation = g.mutation;
  o->time_limit_s = g.time_limit_s;
  o->max_generations = 0;
  o->k_groups = dhard::ProofConfig{}.k_groups;
}

const char *dh_last_error(void) { return last_error.c_str(); }

const char *dh_version(void) { return "0.1.0"; }

dh_status dh_formula_read_file(const char *path, dh_formula **out) {
  if (!path || !out)
    return invalid("null argument");
  return guarded([&] {
    *out = new dh_formula{dhard::read_dimacs_file(path)};
    return DH_OK;
  });
}

dh_status dh_formula_parse(const char *text, size_t length, dh_formula **out) {
  if (!text || !out)
    return invalid("null argument");
  return guarded([&] {
    *out = new dh_formula{dhard::parse_dimacs(std::string_view(text, length))};
    return DH_OK;
  });
}

int dh_formula_num_vars(const dh_formula *f) {
  return f ? f->formula.num_vars() : 0;
}

size_t dh_formula_num_clauses(const dh_formula *f) {
  return f ? f->formula.num_clauses() : 0;
}

void dh_formula_free(dh_formula *f) { delete f; }

void dh_string_free(char *text) { std::free(text); }

dh_status dh_estimate_run(const dh_formula *f, const int *vars, size_t n,
                          const dh_options *options, char **report) {
  if (!f || !report)
    return invalid("null argument");
  return guarded([&] {
    *report = nullptr;
    const dh_options o = options ? *options : defaults();
    dhard::DecompositionSet b = make_set(f->formula, vars, n);
    dhard::EstimatorConfig cfg = estimator_config(o);
    if (o.exhaustive) {
      if (b.size() >= 63 || (1ULL << b.size()) > dhard::kDefaultEnumerationCap)
        throw dhard::Error(dhard::ErrorKind::cap_exceeded,
                           "2^" + std::to_string(b.size()) +
                               " branches exceed the enumeration cap");
      cfg.initial_n = std::max<std::uint64_t>(2, 1ULL << b.size());
      cfg.max_n = cfg.initial_n;
    }
    auto est = dhard::estimate_d_hardness_with_up_preprocessing(f->formula, b,
                                                                cfg);
    auto rho = dhard::estimate_rho(f->formula, b, est.stats.n, cfg.seed,
                                   cfg.workers);
    std::string text = "measure=" + std::string(to_string(cfg.measure)) + "\n" +
                       dhard::format_estimate(b, est, rho);
    *report = dup_string(text);
    if (!*report)
      throw std::bad_alloc();
    if (est.sat_found) {
      last_error = "a sampled branch is satisfiable";
      return DH_ERROR_SAT_FOUND;
    }
    return DH_OK;
  });
}

dh_status dh_find_backdoor(const dh_formula *f, const dh_options *options,
                           dh_search_result **out) {
  if (!f || !out)
    return invalid("null argument");
  return guarded([&] {
    *out = nullptr;
    const dh_options o = options ? *options : defaults();
    if (f->formula.num_vars() < 1)
      throw dhard::Error(dhard::ErrorKind::invalid_argument,
                         "formula has no variables");
    if (o.b0_size < 1)
      throw dhard::Error(dhard::ErrorKind::invalid_argument,
                         "search space size must be >= 1");
    dhard::GaConfig g;
    g.population = o.elite + o.crossover + o.mutation;
    g.elite = o.elite;
    g.crossover = o.crossover;
    g.mutation = o.mutation;
    g.time_limit_s = o.time_limit_s;
    if (o.max_generations > 0)
      g.max_generations = o.max_generations;
    g.seed = o.seed;
    g.init_size = o.init_size;
    g.estimator = estimator_config(o);
    g.validate();
    int m = std::min(o.b0_size, f->formula.num_vars());
    auto space = dhard::reduce_search_space(f->formula, m);
    auto *r = new dh_search_result{dhard::ga_minimize(f->formula, space, g), m};
    *out = r;
    if (r->result.sat_found) {
      last_error = "a satisfiable branch ended the search";
      return DH_ERROR_SAT_FOUND;
    }
    return DH_OK;
  });
}

size_t dh_search_result_size(const dh_search_result *r) {
  return r ? r->result.best.mask.size() : 0;
}

size_t dh_search_result_vars(const dh_search_result *r, int *vars,
                             size_t capacity) {
  if (!r)
    return 0;
  auto v = r->result.best.mask.vars();
  for (std::size_t i = 0; i < v.size() && i < capacity && vars; ++i)
    vars[i] = v[i];
  return v.size();
}

double dh_search_result_log2_fitness(const dh_search_result *r) {
  return r ? static_cast<double>(r->result.best.log2_fitness) : NAN;
}

int dh_search_result_sat_found(const dh_search_result *r) {
  return r && r->result.sat_found ? 1 : 0;
}

char *dh_search_result_report(const dh_search_result *r) {
  if (!r)
    return nullptr;
  const auto &res = r->result;
  std::string out;
  out += "verdict=" + std::string(res.sat_found ? "SAT" : "UNKNOWN") + "\n";
  out += "b0_size=" + std::to_string(r->b0_size) + "\n";
  out += "generations=" + std::to_string(res.generations) + "\n";
  out += "evaluations=" + std::to_string(res.evaluations) + "\n";
  if (res.sat_found) {
    out += "witness=";
    if (res.sat_witness)
      for (auto l : res.sat_witness->lits())
        out += std::to_string(l.dimacs()) + " ";
    out += "0\n";
  } else {
    out += "log2_fitness=" + num(res.best.log2_fitness) + "\n";
    out += dhard::format_estimate(res.best.mask, res.best_estimate,
                                  std::nullopt);
  }
  return dup_string(out);
}

dh_status dh_search_result_write_history(const dh_search_result *r,
                                         const char *path) {
  if (!r || !path)
    return invalid("null argument");
  return guarded([&] {
    write_text(path, dhard::history_csv(r->result.history));
    return DH_OK;
  });
}

void dh_search_result_free(dh_search_result *r) { delete r; }

dh_status dh_solve_decomposed(const dh_formula *f, const int *backdoors,
                              size_t length, const dh_options *options,
                              dh_solve_result **out) {
  if (!f || !backdoors || !out)
    return invalid("null argument");
  return guarded([&] {
    *out = nullptr;
    const dh_options o = options ? *options : defaults();
    std::vector<dhard::DecompositionSet> bs;
    std::vector<int> cur;
    for (std::size_t i = 0; i < length; ++i) {
      if (backdoors[i] != 0) {
        cur.push_back(backdoors[i]);
        continue;
      }
      bs.push_back(make_set(f->formula, cur.data(), cur.size()));
      cur.clear();
    }
    if (!cur.empty())
      throw dhard::Error(dhard::ErrorKind::invalid_argument,
                         "backdoor list must end with 0");
    if (bs.empty())
      throw dhard::Error(dhard::ErrorKind::invalid_argument, "no backdoor");
    dhard::DecomposeConfig cfg;
    cfg.measure = measure_of(o.measure);
    cfg.workers = o.workers;
    auto *r = new dh_solve_result;
    r->num_backdoors = bs.size();
    r->measure = cfg.measure;
    r->workers = dhard::resolve_workers(o.workers);
    try {
      r->verdict = bs.size() == 1
                       ? dhard::solve_with_backdoor(f->formula, bs[0], cfg)
                       : dhard::solve_with_backdoors(f->formula, bs, cfg);
    } catch (...) {
      delete r;
      throw;
    }
    *out = r;
    return DH_OK;
  });
}

dh_verdict dh_solve_result_verdict(const dh_solve_result *r) {
  if (!r)
    return DH_VERDICT_UNKNOWN;
  switch (r->verdict.verdict) {
  case dhard::Verdict::sat:
    return DH_VERDICT_SAT;
  case dhard::Verdict::unsat:
    return DH_VERDICT_UNSAT;
  default:
    return DH_VERDICT_UNKNOWN;
  }
}

size_t dh_solve_result_branches(const dh_solve_result *r) {
  return r ? r->verdict.branches.size() : 0;
}

uint64_t dh_solve_result_propagations(const dh_solve_result *r) {
  return r ? r->verdict.total_propagations() : 0;
}

uint64_t dh_solve_result_conflicts(const dh_solve_result *r) {
  return r ? r->verdict.total_conflicts() : 0;
}

char *dh_solve_result_report(const dh_solve_result *r) {
  if (!r)
    return nullptr;
  const auto &v = r->verdict;
  std::uint64_t up = 0, cdcl = 0;
  std::vector<double> costs;
  for (const auto &b : v.branches) {
    (b.tier == dhard::BranchTier::up_decided ? up : cdcl) += 1;
    switch (r->measure) {
    case dhard::WorkloadMeasure::propagations:
      costs.push_back(static_cast<double>(b.propagations));
      break;
    case dhard::WorkloadMeasure::conflicts:
      costs.push_back(static_cast<double>(b.conflicts));
      break;
    case dhard::WorkloadMeasure::time:
      costs.push_back(b.elapsed_s);
      break;
    }
  }
  std::string out;
  out += "verdict=" + std::string(to_string(v.verdict)) + "\n";
  out += "backdoors=" + std::to_string(r->num_backdoors) + "\n";
  out += "branches=" + std::to_string(v.branches.size()) + "\n";
  out += "up_decided=" + std::to_string(up) + "\n";
  out += "cdcl=" + std::to_string(cdcl) + "\n";
  if (r->num_backdoors > 1) {
    out += "hard_counts=";
    for (std::size_t i = 0; i < v.hard_counts.size(); ++i)
      out += (i ? " " : "") + std::to_string(v.hard_counts[i]);
    out += "\nvacuous=" + std::to_string(v.vacuous) + "\n";
  }
  out += "propagations=" + std::to_string(v.total_propagations()) + "\n";
  out += "conflicts=" + std::to_string(v.total_conflicts()) + "\n";
  out += "measure=" + std::string(to_string(r->measure)) + "\n";
  out += "workers=" + std::to_string(r->workers) + "\n";
  out += "makespan=" + num(dhard::simulate_parallel(costs, r->workers)) + "\n";
  if (v.witness) {
    out += "witness=";
    for (auto l : v.witness->lits())
      out += std::to_string(l.dimacs()) + " ";
    out += "0\n";
  }
  return dup_string(out);
}

dh_status dh_solve_result_write_ledger(const dh_solve_result *r,
                                       const char *path) {
  if (!r || !path)
    return invalid("null argument");
  return guarded([&] {
    write_text(path, dhard::branch_ledger_csv(r->verdict.branches));
    return DH_OK;
  });
}

void dh_solve_result_free(dh_solve_result *r) { delete r; }

dh_status dh_prove(const dh_formula *f, const int *vars, size_t n,
                   const char *out_dir, const dh_options *options,
                   char **report) {
  if (!f || !out_dir || !report)
    return invalid("null argument");
  return guarded([&] {
    *report = nullptr;
    const dh_options o = options ? *options : defaults();
    dhard::DecompositionSet b = make_set(f->formula, vars, n);
    dhard::ProofConfig cfg;
    cfg.k_groups = o.k_groups;
    cfg.workers = o.workers;
    auto bundle = dhard::generate_proof_bundle(f->formula, b, out_dir, cfg);
    std::size_t hard = 0, groups = 0;
    for (const auto &u : bundle.units)
      (u.kind == dhard::UnitKind::hard_branch ? hard : groups) += 1;
    std::string out;
    out += "verdict=UNSAT\n";
    out += "backdoor=" + b.to_string() + "\n";
    out += "units=" + std::to_string(bundle.units.size()) + "\n";
    out += "hard_units=" + std::to_string(hard) + "\n";
    out += "group_units=" + std::to_string(groups) + "\n";
    out += "k_groups=" + std::to_string(bundle.k_groups) + "\n";
    out += "manifest=" + bundle.manifest.string() + "\n";
    *report = dup_string(out);
    if (!*report)
      throw std::bad_alloc();
    return DH_OK;
  });
}

dh_status dh_check_bundle(const char *manifest, unsigned workers,
                          dh_check_result **out) {
  if (!manifest || !out)
    return invalid("null argument");
  return guarded([&] {
    *out = nullptr;
    *out = new dh_check_result{dhard::check_proof_bundle(manifest, workers)};
    return DH_OK;
  });
}

int dh_check_result_ok(const dh_check_result *r) {
  return r && r->check.ok ? 1 : 0;
}

int dh_check_result_coverage_ok(const dh_check_result *r) {
  return r && r->check.coverage_ok ? 1 : 0;
}

size_t dh_check_result_units(const dh_check_result *r) {
  return r ? r->check.units.size() : 0;
}

int dh_check_result_unit_ok(const dh_check_result *r, size_t i) {
  return r && i < r->check.units.size() && r->check.units[i].ok ? 1 : 0;
}

const char *dh_check_result_unit_id(const dh_check_result *r, size_t i) {
  return r && i < r->check.units.size() ? r->check.units[i].id.c_str()
                                        : nullptr;
}

const char *dh_check_result_unit_message(const dh_check_result *r, size_t i) {
  return r && i < r->check.units.size() ? r->check.units[i].message.c_str()
                                        : nullptr;
}

char *dh_check_result_report(const dh_check_result *r) {
  if (!r)
    return nullptr;
  const auto &c = r->check;
  std::size_t failed = 0;
  for (const auto &u : c.units)
    failed += u.ok ? 0 : 1;
  std::string out;
  out += "ok=" + std::string(c.ok ? "true" : "false") + "\n";
  out += "units=" + std::to_string(c.units.size()) + "\n";
  out += "failed_units=" + std::to_string(failed) + "\n";
  out += "coverage_ok=" + std::string(c.coverage_ok ? "true" : "false") + "\n";
  if (!c.coverage_ok)
    out += "coverage_error=" + c.coverage_message + "\n";
  for (std::size_t i = 0; i < c.units.size(); ++i)
    if (!c.units[i].ok)
      out += "failed_unit=" + std::to_string(i) + " " + c.units[i].id + " " +
             c.units[i].message + "\n";
  return dup_string(out);
}

void dh_check_result_free(dh_check_result *r) { delete r; }

dh_status dh_simulate_parallel(const double *costs, size_t count,
                               unsigned workers, double *makespan) {
  if ((!costs && count) || !makespan)
    return invalid("null argument");
  return guarded([&] {
    *makespan = dhard::simulate_parallel(
        std::span<const double>(costs, count), workers);
    return DH_OK;
  });
}

} // extern "C"
