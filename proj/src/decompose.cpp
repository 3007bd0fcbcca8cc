#include "dhard/decompose.hpp"

#include "dhard/error.hpp"
#include "dhard/parallel.hpp"
#include "dhard/unit_propagation.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <queue>

namespace dhard {

std::string_view to_string(BranchTier t) {
  return t == BranchTier::up_decided ? "up" : "cdcl";
}

std::uint64_t DecomposedVerdict::total_propagations() const {
  std::uint64_t s = 0;
  for (const auto &b : branches)
    s += b.propagations;
  return s;
}

std::uint64_t DecomposedVerdict::total_conflicts() const {
  std::uint64_t s = 0;
  for (const auto &b : branches)
    s += b.conflicts;
  return s;
}

double DecomposedVerdict::total_elapsed_s() const {
  double s = 0;
  for (const auto &b : branches)
    s += b.elapsed_s;
  return s;
}

namespace {

using Clock = std::chrono::steady_clock;

struct Evaluated {
  BranchResult result;
  std::optional<Assignment> model;
};

Assignment model_from(const UnitPropagator &up) {
  std::vector<Lit> lits;
  for (int v = 1; v <= up.num_vars(); ++v)
    lits.emplace_back(v, up.value(v) > 0);
  return Assignment(std::move(lits));
}

/// UP tier, then a fresh CDCL solve.
Evaluated evaluate_branch(const CnfFormula &formula, UnitPropagator &up,
                          const Assignment &beta, WorkloadMeasure measure,
                          bool try_cdcl = true) {
  Evaluated e;
  e.result.beta = beta;
  auto start = Clock::now();
  UpResult r = up.run(beta);
  if (r.status != UpStatus::undecided || !try_cdcl) {
    e.result.tier = BranchTier::up_decided;
    e.result.propagations = r.propagations;
    e.result.verdict = r.status == UpStatus::decided_sat     ? Verdict::sat
                       : r.status == UpStatus::decided_unsat ? Verdict::unsat
                                                             : Verdict::limit;
    if (r.status == UpStatus::decided_sat)
      e.model = model_from(up);
    e.result.elapsed_s =
        std::chrono::duration<double>(Clock::now() - start).count();
    return e;
  }
  SolverConfig cfg;
  cfg.measure = measure;
  SolveOutcome out = solve(formula, beta, cfg);
  e.result.tier = BranchTier::cdcl;
  e.result.verdict = out.verdict;
  e.result.propagations = out.propagations;
  e.result.conflicts = out.conflicts;
  e.result.elapsed_s = std::chrono::duration<double>(Clock::now() - start).count();
  e.model = std::move(out.model);
  return e;
}

void check_cap(std::size_t card, std::uint64_t cap) {
  if (card >= 63 || (1ULL << card) > cap)
    throw Error(ErrorKind::cap_exceeded,
                "2^" + std::to_string(card) +
                    " branches exceed the enumeration cap of " +
                    std::to_string(cap));
}

void check_vars(const CnfFormula &formula, const DecompositionSet &b) {
  if (!b.empty() && b.vars().back() > formula.num_vars())
    throw Error(ErrorKind::invalid_argument,
                "backdoor variable " + std::to_string(b.vars().back()) +
                    " exceeds the formula's " +
                    std::to_string(formula.num_vars()) + " variables");
}

/// Evaluates branches 0..count-1 in chunks and appends them to `out` in
/// index order. Stops after the first satisfiable branch, so the recorded
/// prefix is the same for every worker count. Returns the witness, if any.
std::optional<Assignment>
run_branches(const CnfFormula &formula, std::uint64_t count,
             const std::function<Evaluated(std::uint64_t, UnitPropagator &)> &eval,
             unsigned workers, std::vector<BranchResult> &out) {
  workers = resolve_workers(workers);
  std::vector<UnitPropagator> contexts(workers, UnitPropagator(formula));
  const std::uint64_t chunk = std::max<std::uint64_t>(64, 16ULL * workers);
  for (std::uint64_t from = 0; from < count; from += chunk) {
    std::uint64_t len = std::min(chunk, count - from);
    std::vector<Evaluated> batch(len);
    parallel_for(len, workers, [&](std::size_t i, unsigned w) {
      batch[i] = eval(from + i, contexts[w]);
    });
    for (auto &e : batch) {
      out.push_back(std::move(e.result));
      if (out.back().verdict == Verdict::sat)
        return std::move(e.model);
    }
  }
  return std::nullopt;
}

} // namespace

DecomposedVerdict solve_with_backdoor(const CnfFormula &formula,
                                      const DecompositionSet &b,
                                      const DecomposeConfig &config) {
  check_vars(formula, b);
  check_cap(b.size(), config.cap);
  DecomposedVerdict out;
  const std::uint64_t space = 1ULL << b.size();
  auto witness = run_branches(
      formula, space,
      [&](std::uint64_t i, UnitPropagator &up) {
        Evaluated e = evaluate_branch(formula, up, b.assignment(i),
                                      config.measure);
        e.result.backdoor_id = 0;
        e.result.beta_bits = e.result.beta.bits();
        return e;
      },
      config.workers, out.branches);
  if (witness) {
    out.verdict = Verdict::sat;
    out.witness = std::move(witness);
  }
  return out;
}

DecomposedVerdict solve_with_backdoors(const CnfFormula &formula,
                                       std::span<const DecompositionSet> bs,
                                       const DecomposeConfig &config) {
  if (bs.empty())
    throw Error(ErrorKind::invalid_argument, "no backdoor given");
  for (const auto &b : bs) {
    check_vars(formula, b);
    check_cap(b.size(), config.cap);
  }
  DecomposedVerdict out;

  // Classification: easy branches are recorded (and must all be UNSAT),
  // hard ones form Gamma_i.
  std::vector<std::vector<std::uint64_t>> gamma(bs.size());
  for (std::size_t k = 0; k < bs.size(); ++k) {
    const auto &b = bs[k];
    const std::uint64_t space = 1ULL << b.size();
    std::vector<Evaluated> cls(space);
    unsigned workers = resolve_workers(config.workers);
    std::vector<UnitPropagator> contexts(workers, UnitPropagator(formula));
    parallel_for(space, workers, [&](std::size_t i, unsigned w) {
      cls[i] = evaluate_branch(formula, contexts[w], b.assignment(i),
                               config.measure, false);
    });
    for (std::uint64_t i = 0; i < space; ++i) {
      auto &e = cls[i];
      if (e.result.verdict == Verdict::limit) {
        gamma[k].push_back(i);
        continue;
      }
      e.result.backdoor_id = static_cast<int>(k);
      e.result.beta_bits = e.result.beta.bits();
      out.branches.push_back(std::move(e.result));
      if (out.branches.back().verdict == Verdict::sat) {
        out.verdict = Verdict::sat;
        out.witness = std::move(e.model);
        return out;
      }
    }
    out.hard_counts.push_back(gamma[k].size());
  }

  // Product Gamma_1 x ... x Gamma_s in mixed-radix order, first backdoor
  // most significant.
  std::uint64_t total = 1;
  for (const auto &g : gamma) {
    if (g.empty()) {
      total = 0;
      break;
    }
    if (total > config.cap / g.size())
      throw Error(ErrorKind::cap_exceeded,
                  "hard-set product exceeds the enumeration cap of " +
                      std::to_string(config.cap));
    total *= g.size();
  }
  auto gamma_of = [&](std::uint64_t index, std::string &bits)
      -> std::optional<Assignment> {
    std::vector<std::uint64_t> digit(bs.size());
    for (std::size_t k = bs.size(); k-- > 0;) {
      digit[k] = index % gamma[k].size();
      index /= gamma[k].size();
    }
    std::optional<Assignment> acc = Assignment();
    for (std::size_t k = 0; k < bs.size(); ++k) {
      Assignment part = bs[k].assignment(gamma[k][digit[k]]);
      if (k)
        bits.push_back('|');
      bits += part.bits();
      if (acc)
        acc = acc->merged(part);
    }
    return acc;
  };

  std::vector<char> vacuous(total, 0);
  auto witness = run_branches(
      formula, total,
      [&](std::uint64_t i, UnitPropagator &up) {
        std::string bits;
        auto g = gamma_of(i, bits);
        Evaluated e;
        if (!g) {
          vacuous[i] = 1;
          e.result.tier = BranchTier::up_decided;
          e.result.verdict = Verdict::unsat;
        } else {
          e = evaluate_branch(formula, up, *g, config.measure);
        }
        e.result.backdoor_id = -1;
        e.result.beta_bits = std::move(bits);
        return e;
      },
      config.workers, out.branches);
  out.vacuous = static_cast<std::uint64_t>(
      std::count(vacuous.begin(), vacuous.end(), 1));
  if (witness) {
    out.verdict = Verdict::sat;
    out.witness = std::move(witness);
  }
  return out;
}

std::string branch_ledger_csv(std::span<const BranchResult> branches) {
  std::string out =
      "backdoor_id,beta_bits,tier,verdict,propagations,conflicts,elapsed_s\n";
  char buf[64];
  for (const auto &b : branches) {
    out += b.backdoor_id < 0 ? std::string("P") : std::to_string(b.backdoor_id);
    out += ',';
    out += b.beta_bits;
    out += ',';
    out += to_string(b.tier);
    out += ',';
    out += to_string(b.verdict);
    std::snprintf(buf, sizeof buf, ",%llu,%llu,%.6f\n",
                  static_cast<unsigned long long>(b.propagations),
                  static_cast<unsigned long long>(b.conflicts), b.elapsed_s);
    out += buf;
  }
  return out;
}

double simulate_parallel(std::span<const double> costs, unsigned workers) {
  if (workers == 0)
    throw Error(ErrorKind::invalid_argument, "need at least one worker");
  for (double c : costs)
    if (!(c >= 0))
      throw Error(ErrorKind::invalid_argument, "job costs must be nonnegative");
  if (workers == 1) {
    double s = 0;
    for (double c : costs)
      s += c;
    return s;
  }
  std::priority_queue<double, std::vector<double>, std::greater<>> free_at;
  for (unsigned w = 0; w < workers; ++w)
    free_at.push(0.0);
  double makespan = 0;
  for (double c : costs) {
    double t = free_at.top() + c;
    free_at.pop();
    free_at.push(t);
    makespan = std::max(makespan, t);
  }
  return makespan;
}

} // namespace dhard
