#include "dhard/proofs.hpp"

#include "dhard/drat.hpp"
#include "dhard/error.hpp"
#include "dhard/parallel.hpp"
#include "dhard/solver.hpp"
#include "dhard/unit_propagation.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace dhard {

namespace fs = std::filesystem;

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string_view to_string(UnitKind k) {
  return k == UnitKind::hard_branch ? "hard_branch" : "cube_group";
}

CubeGroupFormula build_cube_group(const CnfFormula &formula,
                                  std::span<const Assignment> cubes) {
  if (cubes.empty())
    throw Error(ErrorKind::invalid_argument, "empty cube group");
  const int n = formula.num_vars();
  auto same_vars = [](const Assignment &a, const Assignment &b) {
    if (a.size() != b.size())
      return false;
    for (std::size_t i = 0; i < a.size(); ++i)
      if (a.lits()[i].var() != b.lits()[i].var())
        return false;
    return true;
  };
  std::vector<Clause> clauses = formula.clauses();
  Clause any;
  for (std::size_t j = 0; j < cubes.size(); ++j) {
    const Assignment &cube = cubes[j];
    if (cube.empty())
      throw Error(ErrorKind::invalid_argument, "empty cube");
    if (!same_vars(cube, cubes[0]))
      throw Error(ErrorKind::invalid_argument,
                  "cubes range over different variables");
    if (cube.max_var() > n)
      throw Error(ErrorKind::invalid_argument,
                  "cube variable outside the formula");
    Lit u(n + static_cast<int>(j) + 1);
    Clause back{u};
    for (Lit l : cube.lits()) {
      clauses.push_back({~u, l});
      back.push_back(~l);
    }
    clauses.push_back(std::move(back));
    any.push_back(u);
  }
  clauses.push_back(std::move(any));
  CubeGroupFormula out;
  out.cubes.assign(cubes.begin(), cubes.end());
  out.encoded = CnfFormula(n + static_cast<int>(cubes.size()), std::move(clauses));
  return out;
}

CnfFormula hard_branch_formula(const CnfFormula &formula,
                               const Assignment &beta) {
  std::vector<Clause> clauses;
  for (Lit l : beta.lits())
    clauses.push_back({l});
  CnfFormula rest = substitute(formula, beta);
  for (const auto &c : rest.clauses())
    clauses.push_back(c);
  return CnfFormula(formula.num_vars(), std::move(clauses));
}

namespace {

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string slurp(const fs::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw Error(ErrorKind::io, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spill(const fs::path &path, const std::string &text) {
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw Error(ErrorKind::io, "cannot write " + path.string());
  out << text;
  if (!out)
    throw Error(ErrorKind::io, "write failed for " + path.string());
}

struct Job {
  UnitKind kind;
  std::string id;
  CnfFormula formula;
};

} // namespace

ProofBundle generate_proof_bundle(const CnfFormula &formula,
                                  const DecompositionSet &b,
                                  const fs::path &out_dir,
                                  const ProofConfig &config) {
  if (config.k_groups < 1)
    throw Error(ErrorKind::invalid_argument, "group count must be >= 1");
  if (b.empty())
    throw Error(ErrorKind::invalid_argument, "empty backdoor");
  if (b.vars().back() > formula.num_vars())
    throw Error(ErrorKind::invalid_argument,
                "backdoor variable outside the formula");
  if (b.size() >= 63 || (1ULL << b.size()) > config.cap)
    throw Error(ErrorKind::cap_exceeded,
                "2^" + std::to_string(b.size()) +
                    " branches exceed the enumeration cap");
  const unsigned workers = resolve_workers(config.workers);
  const std::uint64_t space = 1ULL << b.size();

  // Classify branches by unit propagation.
  std::vector<UnitPropagator> contexts(workers, UnitPropagator(formula));
  std::vector<UpStatus> status(space);
  parallel_for(space, workers, [&](std::size_t i, unsigned w) {
    status[i] = contexts[w].run(b.assignment(i)).status;
  });
  std::vector<Job> jobs;
  std::vector<Assignment> easy;
  for (std::uint64_t i = 0; i < space; ++i) {
    Assignment beta = b.assignment(i);
    if (status[i] == UpStatus::decided_sat)
      throw Error(ErrorKind::sat_found,
                  "branch " + beta.bits() + " is satisfiable");
    if (status[i] == UpStatus::undecided)
      jobs.push_back({UnitKind::hard_branch, beta.bits(),
                      hard_branch_formula(formula, beta)});
    else
      easy.push_back(std::move(beta));
  }
  const std::size_t groups =
      std::min<std::size_t>(static_cast<std::size_t>(config.k_groups), easy.size());
  for (std::size_t g = 0; g < groups; ++g) {
    std::vector<Assignment> cubes;
    for (std::size_t i = g; i < easy.size(); i += groups)
      cubes.push_back(easy[i]);
    jobs.push_back({UnitKind::cube_group, "g" + std::to_string(g),
                    build_cube_group(formula, cubes).encoded});
  }

  std::vector<SolveOutcome> outcomes(jobs.size());
  parallel_for(jobs.size(), workers, [&](std::size_t i, unsigned) {
    SolverConfig cfg;
    cfg.proof_logging = true;
    outcomes[i] = solve(jobs[i].formula, Assignment(), cfg);
  });
  for (std::size_t i = 0; i < jobs.size(); ++i)
    if (outcomes[i].verdict != Verdict::unsat)
      throw Error(ErrorKind::sat_found,
                  "unit " + jobs[i].id + " is satisfiable");

  fs::create_directories(out_dir);
  ProofBundle bundle;
  bundle.manifest = out_dir / kManifestName;
  bundle.backdoor = b;
  bundle.k_groups = config.k_groups;

  std::string header = "# dhard proof bundle\n";
  std::string body;
  const std::string base_text = write_dimacs(formula);
  spill(out_dir / "base.cnf", base_text);
  header += "# base\tbase.cnf\t" + hex64(fnv1a64(base_text)) + "\n";
  header += "# backdoor\t" + b.to_string() + "\n";
  header += "# groups\t" + std::to_string(config.k_groups) + "\n";
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    const Job &job = jobs[i];
    std::string stem = (job.kind == UnitKind::hard_branch ? "hard_" : "group_") +
                       (job.kind == UnitKind::hard_branch ? job.id
                                                          : job.id.substr(1));
    ProofUnit unit{job.kind, stem + ".cnf", stem + ".drat", job.id};
    std::string cnf = write_dimacs(job.formula);
    std::string drat = write_drat(*outcomes[i].proof);
    spill(out_dir / unit.formula_file, cnf);
    spill(out_dir / unit.proof_file, drat);
    header += "# digest\t" + unit.formula_file + "\t" + hex64(fnv1a64(cnf)) + "\n";
    header += "# digest\t" + unit.proof_file + "\t" + hex64(fnv1a64(drat)) + "\n";
    body += std::string(to_string(unit.kind)) + "\t" + unit.formula_file + "\t" +
            unit.proof_file + "\t" + unit.id + "\n";
    bundle.units.push_back(std::move(unit));
  }
  spill(bundle.manifest, header + body);
  return bundle;
}

//===----------------------------------------------------------------------===//
// Checking
//===----------------------------------------------------------------------===//

namespace {

std::vector<std::string> split_tabs(const std::string &line) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  for (;;) {
    std::size_t t = line.find('\t', pos);
    out.push_back(line.substr(pos, t - pos));
    if (t == std::string::npos)
      break;
    pos = t + 1;
  }
  return out;
}

struct Manifest {
  std::string base_file;
  std::string base_digest;
  std::vector<int> backdoor;
  std::map<std::string, std::string> digests;
  std::vector<ProofUnit> units;
};

Manifest parse_manifest(const std::string &text) {
  Manifest m;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  bool have_backdoor = false;
  auto fail = [&](const std::string &msg) {
    throw Error(ErrorKind::parse,
                "manifest line " + std::to_string(line_no) + ": " + msg);
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r')
      line.pop_back();
    if (line.empty())
      continue;
    auto f = split_tabs(line);
    if (line[0] == '#') {
      if (f[0] == "# base" && f.size() == 3) {
        m.base_file = f[1];
        m.base_digest = f[2];
      } else if (f[0] == "# backdoor" && f.size() == 2) {
        std::istringstream vs(f[1]);
        int v;
        while (vs >> v)
          m.backdoor.push_back(v);
        if (!vs.eof())
          fail("bad backdoor list");
        have_backdoor = true;
      } else if (f[0] == "# digest" && f.size() == 3) {
        m.digests[f[1]] = f[2];
      }
      continue;
    }
    if (f.size() != 4)
      fail("expected 4 tab-separated fields");
    ProofUnit u;
    if (f[0] == "hard_branch")
      u.kind = UnitKind::hard_branch;
    else if (f[0] == "cube_group")
      u.kind = UnitKind::cube_group;
    else
      fail("unknown unit kind '" + f[0] + "'");
    u.formula_file = f[1];
    u.proof_file = f[2];
    u.id = f[3];
    m.units.push_back(std::move(u));
  }
  if (m.base_file.empty())
    throw Error(ErrorKind::parse, "manifest names no base formula");
  if (!have_backdoor || m.backdoor.empty())
    throw Error(ErrorKind::parse, "manifest names no backdoor");
  return m;
}

/// Branches covered by one unit, or an error message.
struct UnitOutcome {
  UnitStatus status;
  std::vector<std::string> covered;
};

UnitOutcome check_unit(const fs::path &dir, const Manifest &m,
                       const CnfFormula &base, const DecompositionSet &b,
                       const ProofUnit &unit) {
  UnitOutcome out;
  out.status.id = unit.id;
  auto fail = [&](std::string msg) {
    out.status.ok = false;
    out.status.message = std::move(msg);
    out.covered.clear();
    return out;
  };
  try {
    std::string cnf = slurp(dir / unit.formula_file);
    std::string drat = slurp(dir / unit.proof_file);
    for (const auto &[file, text] :
         {std::pair{unit.formula_file, &cnf}, std::pair{unit.proof_file, &drat}}) {
      auto it = m.digests.find(file);
      if (it == m.digests.end())
        return fail("no digest recorded for " + file);
      if (it->second != hex64(fnv1a64(*text)))
        return fail("digest mismatch for " + file);
    }
    CnfFormula actual = parse_dimacs(cnf);
    CnfFormula expected;
    if (unit.kind == UnitKind::hard_branch) {
      if (unit.id.size() != b.size() ||
          unit.id.find_first_not_of("01") != std::string::npos)
        return fail("branch id does not match the backdoor");
      std::vector<Lit> lits;
      for (std::size_t i = 0; i < b.size(); ++i)
        lits.emplace_back(b.vars()[i], unit.id[i] == '1');
      expected = hard_branch_formula(base, Assignment(std::move(lits)));
      out.covered.push_back(unit.id);
    } else {
      if (unit.id.size() < 2 || unit.id[0] != 'g' ||
          unit.id.find_first_not_of("0123456789", 1) != std::string::npos)
        return fail("malformed group id");
      // Cubes come back from the selector implications (-u_j v l).
      const int n = base.num_vars();
      const int r = actual.num_vars() - n;
      if (r < 1)
        return fail("group formula has no selector variables");
      std::vector<std::vector<Lit>> cubes(r);
      for (const auto &c : actual.clauses()) {
        if (c.size() != 2)
          continue;
        for (int k = 0; k < 2; ++k) {
          Lit s = c[k], l = c[1 - k];
          if (!s.positive() && s.var() > n && l.var() <= n)
            cubes[s.var() - n - 1].push_back(l);
        }
      }
      std::vector<Assignment> parsed;
      for (auto &lits : cubes) {
        Assignment a(std::move(lits));
        if (a.size() != b.size())
          return fail("cube does not assign the backdoor");
        for (std::size_t i = 0; i < b.size(); ++i)
          if (a.lits()[i].var() != b.vars()[i])
            return fail("cube does not assign the backdoor");
        out.covered.push_back(a.bits());
        parsed.push_back(std::move(a));
      }
      expected = build_cube_group(base, parsed).encoded;
    }
    if (actual.num_vars() != expected.num_vars() ||
        !actual.same_clauses(expected))
      return fail("formula does not match the one rebuilt from the base");
    DratCheckResult r = check_drat(actual, parse_drat(drat));
    if (!r.ok)
      return fail(r.message);
  } catch (const Error &e) {
    return fail(e.what());
  }
  out.status.ok = true;
  return out;
}

} // namespace

BundleCheck check_proof_bundle(const fs::path &manifest_path,
                               unsigned workers) {
  const fs::path dir = manifest_path.parent_path();
  Manifest m = parse_manifest(slurp(manifest_path));
  std::string base_text = slurp(dir / m.base_file);
  if (hex64(fnv1a64(base_text)) != m.base_digest)
    throw Error(ErrorKind::parse, "digest mismatch for " + m.base_file);
  CnfFormula base = parse_dimacs(base_text);
  DecompositionSet b(base.num_vars(), m.backdoor);
  if (b.size() >= 63)
    throw Error(ErrorKind::cap_exceeded, "backdoor too large");

  std::vector<UnitOutcome> outcomes(m.units.size());
  parallel_for(m.units.size(), resolve_workers(workers),
               [&](std::size_t i, unsigned) {
                 outcomes[i] = check_unit(dir, m, base, b, m.units[i]);
               });

  BundleCheck result;
  bool all_units = true;
  std::set<std::string> seen, ids;
  std::string dup, dup_id;
  for (auto &o : outcomes) {
    if (!ids.insert(o.status.id).second && dup_id.empty())
      dup_id = o.status.id;
    all_units = all_units && o.status.ok;
    for (auto &bits : o.covered)
      if (!seen.insert(bits).second && dup.empty())
        dup = bits;
    result.units.push_back(std::move(o.status));
  }
  const std::uint64_t space = 1ULL << b.size();
  if (!dup_id.empty()) {
    result.coverage_message = "unit id " + dup_id + " appears twice";
  } else if (!dup.empty()) {
    result.coverage_message = "branch " + dup + " is covered twice";
  } else if (seen.size() != space) {
    for (std::uint64_t i = 0; i < space; ++i) {
      std::string bits = b.assignment(i).bits();
      if (!seen.count(bits)) {
        result.coverage_message = "branch " + bits + " is not covered";
        break;
      }
    }
    if (result.coverage_message.empty())
      result.coverage_message = "coverage count mismatch";
  } else {
    result.coverage_ok = true;
  }
  result.ok = all_units && result.coverage_ok;
  return result;
}

} // namespace dhard
