#include "dhard/solver.hpp"

#include "dhard/error.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

namespace dhard {

std::string_view to_string(Verdict v) {
  switch (v) {
  case Verdict::sat:
    return "SAT";
  case Verdict::unsat:
    return "UNSAT";
  case Verdict::limit:
    return "LIMIT";
  }
  return "?";
}

std::string_view to_string(WorkloadMeasure m) {
  switch (m) {
  case WorkloadMeasure::propagations:
    return "props";
  case WorkloadMeasure::conflicts:
    return "conflicts";
  case WorkloadMeasure::time:
    return "time";
  }
  return "?";
}

std::optional<WorkloadMeasure> parse_measure(std::string_view text) {
  if (text == "props" || text == "propagations")
    return WorkloadMeasure::propagations;
  if (text == "conflicts")
    return WorkloadMeasure::conflicts;
  if (text == "time")
    return WorkloadMeasure::time;
  return std::nullopt;
}

double SolveOutcome::workload(WorkloadMeasure m) const {
  switch (m) {
  case WorkloadMeasure::propagations:
    return static_cast<double>(propagations);
  case WorkloadMeasure::conflicts:
    return static_cast<double>(conflicts);
  case WorkloadMeasure::time:
    return elapsed_s;
  }
  return 0.0;
}

namespace {

constexpr std::uint32_t kNoReason = std::numeric_limits<std::uint32_t>::max();
constexpr double kVarDecay = 0.95;
constexpr double kClauseDecay = 0.999;
constexpr std::uint64_t kRestartBase = 100;
constexpr std::uint64_t kFirstReduce = 2000;
constexpr std::uint64_t kReduceIncrement = 300;

double luby(double y, std::uint64_t x) {
  std::uint64_t size = 1;
  int seq = 0;
  while (size < x + 1) {
    ++seq;
    size = 2 * size + 1;
  }
  while (size - 1 != x) {
    size = (size - 1) >> 1;
    --seq;
    x = x % size;
  }
  return std::pow(y, seq);
}

/// Max-heap of variables by activity; ties go to the lower index.
class VarOrder {
public:
  explicit VarOrder(const std::vector<double> &activity)
      : activity_(activity), pos_(activity.size(), -1) {}

  bool empty() const { return heap_.empty(); }
  bool contains(int v) const { return pos_[v] >= 0; }

  void insert(int v) {
    if (contains(v))
      return;
    pos_[v] = static_cast<int>(heap_.size());
    heap_.push_back(v);
    sift_up(pos_[v]);
  }

  void increased(int v) {
    if (contains(v))
      sift_up(pos_[v]);
  }

  int pop() {
    int top = heap_.front();
    heap_.front() = heap_.back();
    pos_[heap_.front()] = 0;
    heap_.pop_back();
    pos_[top] = -1;
    if (!heap_.empty())
      sift_down(0);
    return top;
  }

private:
  bool before(int a, int b) const {
    return activity_[a] > activity_[b] ||
           (activity_[a] == activity_[b] && a < b);
  }

  void sift_up(int i) {
    int v = heap_[i];
    while (i > 0) {
      int parent = (i - 1) / 2;
      if (!before(v, heap_[parent]))
        break;
      heap_[i] = heap_[parent];
      pos_[heap_[i]] = i;
      i = parent;
    }
    heap_[i] = v;
    pos_[v] = i;
  }

  void sift_down(int i) {
    int v = heap_[i];
    int n = static_cast<int>(heap_.size());
    while (2 * i + 1 < n) {
      int child = 2 * i + 1;
      if (child + 1 < n && before(heap_[child + 1], heap_[child]))
        ++child;
      if (!before(heap_[child], v))
        break;
      heap_[i] = heap_[child];
      pos_[heap_[i]] = i;
      i = child;
    }
    heap_[i] = v;
    pos_[v] = i;
  }

  const std::vector<double> &activity_;
  std::vector<int> heap_;
  std::vector<int> pos_;
};

struct ClauseRecord {
  std::vector<Lit> lits;
  bool learnt = false;
  bool deleted = false;
  std::uint32_t lbd = 0;
  double activity = 0.0;
};

struct Watcher {
  std::uint32_t cref;
  Lit blocker;
};

class Cdcl {
public:
  Cdcl(const CnfFormula &formula, const SolverConfig &config)
      : formula_(formula), config_(config), n_(formula.num_vars()),
        assigns_(n_ + 1, 0), level_(n_ + 1, 0), reason_(n_ + 1, kNoReason),
        polarity_(n_ + 1, 0), seen_(n_ + 1, 0), activity_(n_ + 1, 0.0),
        order_(activity_), watches_(2 * static_cast<std::size_t>(n_) + 2) {}

  SolveOutcome run(const Assignment &assumptions) {
    SolveOutcome out;
    if (config_.proof_logging)
      proof_.emplace();

    UnitPropagator up(formula_);
    UpResult root = up.run(assumptions);
    propagations_ = root.propagations;
    if (root.status == UpStatus::decided_unsat)
      return finish_unsat(out);
    if (root.status == UpStatus::decided_sat) {
      std::vector<Lit> model;
      model.reserve(n_);
      for (int v = 1; v <= n_; ++v)
        model.emplace_back(v, up.value(v) > 0);
      return finish_sat(out, std::move(model));
    }

    for (Lit l : up.trail()) {
      assigns_[l.var()] = l.positive() ? 1 : -1;
      trail_.push_back(l);
    }
    qhead_ = trail_.size();
    for (auto c : up.unsatisfied_clauses()) {
      ClauseRecord rec;
      for (Lit l : formula_.clauses()[c])
        if (value(l) == 0)
          rec.lits.push_back(l);
      attach(std::move(rec));
    }
    for (int v = 1; v <= n_; ++v)
      if (assigns_[v] == 0)
        order_.insert(v);

    Verdict verdict = search();
    if (verdict == Verdict::unsat)
      return finish_unsat(out);
    if (verdict == Verdict::sat) {
      std::vector<Lit> model;
      model.reserve(n_);
      for (int v = 1; v <= n_; ++v)
        model.emplace_back(v, assigns_[v] > 0);
      return finish_sat(out, std::move(model));
    }
    out.verdict = Verdict::limit;
    out.propagations = propagations_;
    out.conflicts = conflicts_;
    return out;
  }

private:
  signed char value(Lit l) const {
    signed char v = assigns_[l.var()];
    return l.positive() ? v : static_cast<signed char>(-v);
  }

  int decision_level() const { return static_cast<int>(trail_lim_.size()); }

  void enqueue(Lit l, std::uint32_t reason) {
    int v = l.var();
    assigns_[v] = l.positive() ? 1 : -1;
    level_[v] = decision_level();
    reason_[v] = reason;
    trail_.push_back(l);
  }

  std::uint32_t attach(ClauseRecord rec) {
    auto cref = static_cast<std::uint32_t>(clauses_.size());
    watches_[rec.lits[0].index()].push_back({cref, rec.lits[1]});
    watches_[rec.lits[1].index()].push_back({cref, rec.lits[0]});
    clauses_.push_back(std::move(rec));
    return cref;
  }

  std::uint32_t propagate() {
    std::uint32_t conflict = kNoReason;
    while (qhead_ < trail_.size()) {
      Lit false_lit = ~trail_[qhead_++];
      auto &ws = watches_[false_lit.index()];
      std::size_t i = 0, j = 0;
      while (i < ws.size()) {
        Watcher w = ws[i++];
        if (value(w.blocker) > 0) {
          ws[j++] = w;
          continue;
        }
        auto &lits = clauses_[w.cref].lits;
        if (lits[0] == false_lit)
          std::swap(lits[0], lits[1]);
        Lit first = lits[0];
        Watcher kept{w.cref, first};
        if (first != w.blocker && value(first) > 0) {
          ws[j++] = kept;
          continue;
        }
        bool moved = false;
        for (std::size_t k = 2; k < lits.size(); ++k) {
          if (value(lits[k]) >= 0) {
            std::swap(lits[1], lits[k]);
            watches_[lits[1].index()].push_back(kept);
            moved = true;
            break;
          }
        }
        if (moved)
          continue;
        ws[j++] = kept;
        if (value(first) < 0) {
          conflict = w.cref;
          while (i < ws.size())
            ws[j++] = ws[i++];
        } else {
          enqueue(first, w.cref);
          ++propagations_;
        }
      }
      ws.resize(j);
      if (conflict != kNoReason)
        break;
    }
    return conflict;
  }

  void bump_var(int v) {
    activity_[v] += var_inc_;
    if (activity_[v] > 1e100) {
      for (auto &a : activity_)
        a *= 1e-100;
      var_inc_ *= 1e-100;
    }
    order_.increased(v);
  }

  void bump_clause(ClauseRecord &c) {
    c.activity += clause_inc_;
    if (c.activity > 1e20) {
      for (auto &rec : clauses_)
        if (rec.learnt)
          rec.activity *= 1e-20;
      clause_inc_ *= 1e-20;
    }
  }

  // First-UIP learning with local minimization. Returns the backjump level.
  int analyze(std::uint32_t conflict, std::vector<Lit> &learnt) {
    learnt.assign(1, Lit{});
    int path = 0;
    Lit p{};
    std::size_t index = trail_.size();
    std::uint32_t cref = conflict;
    do {
      auto &c = clauses_[cref];
      if (c.learnt)
        bump_clause(c);
      for (std::size_t k = (p == Lit{} ? 0 : 1); k < c.lits.size(); ++k) {
        Lit q = c.lits[k];
        int v = q.var();
        if (seen_[v] || level_[v] == 0)
          continue;
        seen_[v] = 1;
        bump_var(v);
        if (level_[v] >= decision_level())
          ++path;
        else
          learnt.push_back(q);
      }
      while (!seen_[trail_[--index].var()]) {
      }
      p = trail_[index];
      cref = reason_[p.var()];
      seen_[p.var()] = 0;
      --path;
    } while (path > 0);
    learnt[0] = ~p;

    analyze_toclear_ = learnt;
    std::size_t kept = 1;
    for (std::size_t k = 1; k < learnt.size(); ++k) {
      std::uint32_t r = reason_[learnt[k].var()];
      bool redundant = r != kNoReason;
      if (redundant) {
        const auto &lits = clauses_[r].lits;
        for (std::size_t m = 1; m < lits.size(); ++m) {
          int v = lits[m].var();
          if (!seen_[v] && level_[v] > 0) {
            redundant = false;
            break;
          }
        }
      }
      if (!redundant)
        learnt[kept++] = learnt[k];
    }
    learnt.resize(kept);
    for (Lit l : analyze_toclear_)
      seen_[l.var()] = 0;

    int bt = 0;
    if (learnt.size() > 1) {
      std::size_t max_i = 1;
      for (std::size_t k = 2; k < learnt.size(); ++k)
        if (level_[learnt[k].var()] > level_[learnt[max_i].var()])
          max_i = k;
      std::swap(learnt[1], learnt[max_i]);
      bt = level_[learnt[1].var()];
    }
    return bt;
  }

  std::uint32_t lbd(const std::vector<Lit> &lits) {
    ++lbd_stamp_;
    if (level_stamp_.size() < static_cast<std::size_t>(decision_level()) + 1)
      level_stamp_.resize(decision_level() + 1, 0);
    std::uint32_t count = 0;
    for (Lit l : lits) {
      int lv = level_[l.var()];
      if (level_stamp_[lv] != lbd_stamp_) {
        level_stamp_[lv] = lbd_stamp_;
        ++count;
      }
    }
    return count;
  }

  void cancel_until(int level) {
    if (decision_level() <= level)
      return;
    for (std::size_t k = trail_.size(); k-- > trail_lim_[level];) {
      int v = trail_[k].var();
      polarity_[v] = assigns_[v];
      assigns_[v] = 0;
      reason_[v] = kNoReason;
      order_.insert(v);
    }
    trail_.resize(trail_lim_[level]);
    qhead_ = trail_.size();
    trail_lim_.resize(level);
  }

  bool locked(std::uint32_t cref) const {
    const auto &c = clauses_[cref];
    Lit first = c.lits[0];
    return reason_[first.var()] == cref && value(first) > 0;
  }

  void reduce_db() {
    std::vector<std::uint32_t> candidates;
    for (std::uint32_t c = 0; c < clauses_.size(); ++c) {
      const auto &rec = clauses_[c];
      if (rec.learnt && !rec.deleted && rec.lbd > 2 && !locked(c))
        candidates.push_back(c);
    }
    std::sort(candidates.begin(), candidates.end(),
              [&](std::uint32_t a, std::uint32_t b) {
                const auto &x = clauses_[a], &y = clauses_[b];
                if (x.lbd != y.lbd)
                  return x.lbd > y.lbd;
                if (x.activity != y.activity)
                  return x.activity < y.activity;
                return a < b;
              });
    std::size_t drop = candidates.size() / 2;
    for (std::size_t k = 0; k < drop; ++k) {
      auto &rec = clauses_[candidates[k]];
      rec.deleted = true;
      if (proof_)
        proof_->remove(rec.lits);
      rec.lits.clear();
      rec.lits.shrink_to_fit();
    }
    for (auto &ws : watches_)
      std::erase_if(ws, [&](const Watcher &w) { return clauses_[w.cref].deleted; });
  }

  Verdict search() {
    std::vector<Lit> learnt;
    std::uint64_t restarts = 0;
    std::uint64_t budget = kRestartBase;
    std::uint64_t since_restart = 0;
    std::uint64_t next_reduce = kFirstReduce;
    std::uint64_t reductions = 0;

    for (;;) {
      std::uint32_t conflict = propagate();
      if (conflict != kNoReason) {
        if (decision_level() == 0)
          return Verdict::unsat;
        ++conflicts_;
        ++since_restart;
        int bt = analyze(conflict, learnt);
        std::uint32_t glue = lbd(learnt);
        cancel_until(bt);
        if (proof_)
          proof_->add(learnt);
        if (learnt.size() == 1) {
          enqueue(learnt[0], kNoReason);
        } else {
          ClauseRecord rec;
          rec.lits = learnt;
          rec.learnt = true;
          rec.lbd = glue;
          std::uint32_t cref = attach(std::move(rec));
          bump_clause(clauses_[cref]);
          enqueue(learnt[0], cref);
        }
        ++propagations_;
        var_inc_ /= kVarDecay;
        clause_inc_ /= kClauseDecay;

        if (config_.conflict_limit && conflicts_ >= *config_.conflict_limit)
          return Verdict::limit;
        if (conflicts_ >= next_reduce) {
          ++reductions;
          next_reduce = conflicts_ + kFirstReduce + kReduceIncrement * reductions;
          reduce_db();
        }
        continue;
      }

      if (since_restart >= budget) {
        cancel_until(0);
        ++restarts;
        since_restart = 0;
        budget = static_cast<std::uint64_t>(luby(2.0, restarts) * kRestartBase);
        continue;
      }

      int next = 0;
      while (!order_.empty()) {
        int v = order_.pop();
        if (assigns_[v] == 0) {
          next = v;
          break;
        }
      }
      if (next == 0)
        return Verdict::sat;
      trail_lim_.push_back(trail_.size());
      enqueue(Lit(next, polarity_[next] > 0), kNoReason);
    }
  }

  SolveOutcome &finish_unsat(SolveOutcome &out) {
    out.verdict = Verdict::unsat;
    out.propagations = propagations_;
    out.conflicts = conflicts_;
    if (proof_) {
      proof_->add({});
      out.proof = std::move(proof_);
    }
    return out;
  }

  SolveOutcome &finish_sat(SolveOutcome &out, std::vector<Lit> model) {
    out.verdict = Verdict::sat;
    out.propagations = propagations_;
    out.conflicts = conflicts_;
    out.model = Assignment(std::move(model));
    return out;
  }

  const CnfFormula &formula_;
  const SolverConfig &config_;
  int n_;

  std::vector<signed char> assigns_;
  std::vector<int> level_;
  std::vector<std::uint32_t> reason_;
  std::vector<signed char> polarity_;
  std::vector<char> seen_;
  std::vector<double> activity_;
  VarOrder order_;
  std::vector<std::vector<Watcher>> watches_;
  std::vector<ClauseRecord> clauses_;
  std::vector<Lit> trail_;
  std::vector<std::size_t> trail_lim_;
  std::size_t qhead_ = 0;
  std::vector<Lit> analyze_toclear_;
  std::vector<std::uint64_t> level_stamp_;
  std::uint64_t lbd_stamp_ = 0;

  double var_inc_ = 1.0;
  double clause_inc_ = 1.0;
  std::uint64_t propagations_ = 0;
  std::uint64_t conflicts_ = 0;
  std::optional<DratProof> proof_;
};

} // namespace

SolveOutcome solve(const CnfFormula &formula, const Assignment &assumptions,
                   const SolverConfig &config) {
  if (assumptions.max_var() > formula.num_vars())
    throw Error(ErrorKind::invalid_argument,
                "assumption on variable " +
                    std::to_string(assumptions.max_var()) + " outside 1.." +
                    std::to_string(formula.num_vars()));
  auto start = std::chrono::steady_clock::now();
  Cdcl cdcl(formula, config);
  SolveOutcome out = cdcl.run(assumptions);
  out.elapsed_s = std::chrono::duration<double>(
                      std::chrono::steady_clock::now() - start)
                      .count();
  return out;
}

} // namespace dhard
