#include "fixtures.hpp"

#include <algorithm>
#include <random>

namespace dhard::testing {

CnfFormula pigeonhole(int pigeons, int holes) {
  auto var = [&](int p, int h) { return p * holes + h + 1; };
  std::vector<Clause> clauses;
  for (int p = 0; p < pigeons; ++p) {
    Clause c;
    for (int h = 0; h < holes; ++h)
      c.emplace_back(var(p, h));
    clauses.push_back(c);
  }
  for (int h = 0; h < holes; ++h)
    for (int p1 = 0; p1 < pigeons; ++p1)
      for (int p2 = p1 + 1; p2 < pigeons; ++p2)
        clauses.push_back({Lit(-var(p1, h)), Lit(-var(p2, h))});
  return CnfFormula(pigeons * holes, std::move(clauses));
}

CnfFormula random_kcnf(int num_vars, int num_clauses, int k,
                       std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<Clause> clauses;
  for (int i = 0; i < num_clauses; ++i) {
    std::vector<int> vars;
    while (static_cast<int>(vars.size()) < k) {
      int v = static_cast<int>(rng() % num_vars) + 1;
      if (std::find(vars.begin(), vars.end(), v) == vars.end())
        vars.push_back(v);
    }
    Clause c;
    for (int v : vars)
      c.emplace_back(v, (rng() & 1) != 0);
    clauses.push_back(c);
  }
  return CnfFormula(num_vars, std::move(clauses));
}

namespace {

// z = a XOR b as four clauses.
void xor_gate(std::vector<Clause> &out, int z, int a, int b) {
  out.push_back({Lit(-z), Lit(a), Lit(b)});
  out.push_back({Lit(-z), Lit(-a), Lit(-b)});
  out.push_back({Lit(z), Lit(-a), Lit(b)});
  out.push_back({Lit(z), Lit(a), Lit(-b)});
}

} // namespace

CnfFormula xor_miter(int inputs) {
  // Variables: inputs 1..k, left chain k+1..2k-1, right chain 2k..3k-2,
  // miter output 3k-1.
  const int k = inputs;
  std::vector<Clause> clauses;
  int next = k + 1;
  int left = 1;
  for (int i = 2; i <= k; ++i) {
    int z = next++;
    xor_gate(clauses, z, left, i);
    left = z;
  }
  int right = k;
  for (int i = k - 1; i >= 1; --i) {
    int z = next++;
    xor_gate(clauses, z, right, i);
    right = z;
  }
  int out = next++;
  xor_gate(clauses, out, left, right);
  clauses.push_back({Lit(out)});
  return CnfFormula(next - 1, std::move(clauses));
}

CnfFormula parity_contradiction(int n) {
  // x1 ^ ... ^ xh = 1 and x(h+1) ^ ... ^ xn = 1 and x1 ^ ... ^ xn = 1 is
  // contradictory (sum of the first two is 0). Each parity constraint is
  // expanded into all clauses that exclude even-parity assignments.
  auto parity = [](std::vector<Clause> &out, const std::vector<int> &vars,
                   bool odd) {
    const std::size_t m = vars.size();
    for (std::uint32_t bits = 0; bits < (1U << m); ++bits) {
      if ((std::__popcount(bits) % 2 == 1) == odd)
        continue;
      Clause c;
      for (std::size_t i = 0; i < m; ++i)
        c.emplace_back(vars[i], ((bits >> i) & 1U) == 0);
      out.push_back(c);
    }
  };
  std::vector<int> all, first, second;
  for (int v = 1; v <= n; ++v)
    all.push_back(v);
  int h = n / 2;
  first.assign(all.begin(), all.begin() + h);
  second.assign(all.begin() + h, all.end());
  std::vector<Clause> clauses;
  parity(clauses, first, true);
  parity(clauses, second, true);
  parity(clauses, all, true);
  return CnfFormula(n, std::move(clauses));
}

CnfFormula up_inert_formula() {
  std::vector<Clause> clauses = {
      {Lit(1), Lit(2)},
      {Lit(-1), Lit(-2)},
      {Lit(3), Lit(4), Lit(5)},
      {Lit(-3), Lit(4), Lit(6)},
      {Lit(3), Lit(-5), Lit(6)},
      {Lit(-4), Lit(-5), Lit(-6)},
  };
  return CnfFormula(6, std::move(clauses));
}

std::vector<NamedFormula> small_fixtures() {
  std::vector<NamedFormula> out;
  out.push_back({"unit_contradiction", CnfFormula(1, {{Lit(1)}, {Lit(-1)}})});
  out.push_back({"two_var_unsat",
                 CnfFormula(2, {{Lit(1), Lit(2)},
                                {Lit(-1), Lit(2)},
                                {Lit(1), Lit(-2)},
                                {Lit(-1), Lit(-2)}})});
  out.push_back({"php_3_2", pigeonhole(3, 2)});
  out.push_back({"php_4_3", pigeonhole(4, 3)});
  out.push_back({"php_3_3_sat", pigeonhole(3, 3)});
  out.push_back({"miter_3", xor_miter(3)});
  out.push_back({"miter_4", xor_miter(4)});
  out.push_back({"parity_6", parity_contradiction(6)});
  out.push_back({"parity_8", parity_contradiction(8)});
  out.push_back({"up_inert_sat", up_inert_formula()});
  out.push_back({"php_5_2", pigeonhole(5, 2)});
  out.push_back({"miter_2", xor_miter(2)});
  out.push_back({"parity_4", parity_contradiction(4)});
  out.push_back({"parity_10", parity_contradiction(10)});
  // Random 3-CNF around and above the threshold; mixes SAT and UNSAT.
  std::uint64_t seed = 11;
  for (int n = 6; n <= 12; ++n) {
    for (int rep = 0; rep < 3; ++rep) {
      int m = static_cast<int>(n * (rep == 0 ? 4.3 : 6.0));
      out.push_back({"rand3_" + std::to_string(n) + "_" + std::to_string(rep),
                     random_kcnf(n, m, 3, seed++)});
    }
  }
  return out;
}

std::vector<NamedFormula> small_unsat_fixtures() {
  std::vector<NamedFormula> out;
  for (auto &f : small_fixtures())
    if (!brute_force_sat(f.formula))
      out.push_back(std::move(f));
  return out;
}

std::optional<Assignment> brute_force_model(const CnfFormula &formula,
                                            const Assignment &assumptions) {
  const int n = formula.num_vars();
  std::vector<int> free_vars;
  for (int v = 1; v <= n; ++v)
    if (!assumptions.value(v))
      free_vars.push_back(v);
  const std::uint64_t total = 1ULL << free_vars.size();
  std::vector<signed char> value(n + 1, 0);
  for (Lit l : assumptions.lits())
    value[l.var()] = l.positive() ? 1 : -1;
  for (std::uint64_t bits = 0; bits < total; ++bits) {
    for (std::size_t i = 0; i < free_vars.size(); ++i)
      value[free_vars[i]] = ((bits >> i) & 1U) ? 1 : -1;
    bool ok = true;
    for (const auto &clause : formula.clauses()) {
      bool sat = false;
      for (Lit l : clause)
        if ((value[l.var()] > 0) == l.positive()) {
          sat = true;
          break;
        }
      if (!sat) {
        ok = false;
        break;
      }
    }
    if (ok) {
      std::vector<Lit> lits;
      for (int v = 1; v <= n; ++v)
        lits.emplace_back(v, value[v] > 0);
      return Assignment(std::move(lits));
    }
  }
  return std::nullopt;
}

std::optional<std::vector<signed char>>
naive_unit_propagation(const CnfFormula &formula,
                       const Assignment &assumptions) {
  std::vector<signed char> value(formula.num_vars() + 1, 0);
  for (Lit l : assumptions.lits())
    value[l.var()] = l.positive() ? 1 : -1;
  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto &clause : formula.clauses()) {
      int unassigned = 0;
      Lit last{};
      bool sat = false;
      for (Lit l : clause) {
        signed char v = value[l.var()];
        if (v == 0) {
          ++unassigned;
          last = l;
        } else if ((v > 0) == l.positive()) {
          sat = true;
        }
      }
      if (sat)
        continue;
      if (unassigned == 0)
        return std::nullopt;
      if (unassigned == 1) {
        value[last.var()] = last.positive() ? 1 : -1;
        changed = true;
      }
    }
  }
  return value;
}

bool naive_up_decides(const CnfFormula &formula, const Assignment &assumptions) {
  auto value = naive_unit_propagation(formula, assumptions);
  if (!value)
    return true;
  for (const auto &clause : formula.clauses()) {
    bool sat = false;
    for (Lit l : clause)
      if ((*value)[l.var()] != 0 && (((*value)[l.var()] > 0) == l.positive()))
        sat = true;
    if (!sat)
      return false;
  }
  return true;
}

std::vector<std::vector<int>> subsets_of_size(int n, int k) {
  std::vector<std::vector<int>> out;
  if (k > n)
    return out;
  std::vector<int> cur(k);
  for (int i = 0; i < k; ++i)
    cur[i] = i + 1;
  for (;;) {
    out.push_back(cur);
    int i = k - 1;
    while (i >= 0 && cur[i] == n - k + i + 1)
      --i;
    if (i < 0)
      break;
    ++cur[i];
    for (int j = i + 1; j < k; ++j)
      cur[j] = cur[j - 1] + 1;
  }
  return out;
}

} // namespace dhard::testing
