#include "dhard/drat.hpp"

#include "dhard/error.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>
#include <unordered_map>

namespace dhard {

std::string write_drat(const DratProof &proof) {
  std::string out;
  char buf[16];
  for (const auto &step : proof.steps) {
    if (step.kind == DratStep::Kind::remove)
      out.append("d ");
    for (Lit l : step.clause) {
      auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, l.dimacs());
      out.append(buf, ptr);
      out.push_back(' ');
    }
    out.append("0\n");
  }
  return out;
}

DratProof parse_drat(std::string_view text) {
  DratProof proof;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos)
      end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;

    auto fail = [&](const std::string &msg) -> void {
      throw Error(ErrorKind::parse,
                  "proof line " + std::to_string(line_no) + ": " + msg);
    };

    std::size_t i = 0;
    auto skip_ws = [&] {
      while (i < line.size() &&
             (line[i] == ' ' || line[i] == '\t' || line[i] == '\r'))
        ++i;
    };
    skip_ws();
    if (i == line.size())
      continue;
    if (line[i] == 'c')
      continue;
    DratStep step;
    if (line[i] == 'd') {
      step.kind = DratStep::Kind::remove;
      ++i;
      if (i < line.size() && line[i] != ' ' && line[i] != '\t')
        fail("malformed deletion");
    }
    bool terminated = false;
    for (;;) {
      skip_ws();
      if (i == line.size())
        break;
      if (terminated)
        fail("content after terminating 0");
      std::size_t start = i;
      while (i < line.size() && line[i] != ' ' && line[i] != '\t' &&
             line[i] != '\r')
        ++i;
      std::string_view tok = line.substr(start, i - start);
      int v = 0;
      auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
      if (ec != std::errc() || ptr != tok.data() + tok.size())
        fail("expected an integer, got '" + std::string(tok) + "'");
      if (v == 0)
        terminated = true;
      else
        step.clause.emplace_back(v);
    }
    if (!terminated)
      fail("missing terminating 0");
    proof.steps.push_back(std::move(step));
  }
  return proof;
}

DratProof read_drat_file(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw Error(ErrorKind::io, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_drat(ss.str());
}

void write_drat_file(const std::filesystem::path &path,
                     const DratProof &proof) {
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw Error(ErrorKind::io, "cannot write " + path.string());
  out << write_drat(proof);
  if (!out)
    throw Error(ErrorKind::io, "write failed for " + path.string());
}

//===----------------------------------------------------------------------===//
// RUP checking
//===----------------------------------------------------------------------===//

namespace {

struct KeyHash {
  std::size_t operator()(const std::vector<int> &k) const noexcept {
    std::uint64_t h = 14695981039346656037ULL;
    for (int v : k) {
      h ^= static_cast<std::uint32_t>(v);
      h *= 1099511628211ULL;
    }
    return static_cast<std::size_t>(h);
  }
};

class RupChecker {
public:
  explicit RupChecker(int num_vars) { ensure_var(num_vars); }

  void add(const Clause &raw) {
    // Duplicate literals are harmless for RUP but break two-watch bookkeeping.
    Clause lits;
    for (Lit l : raw)
      if (std::find(lits.begin(), lits.end(), l) == lits.end())
        lits.push_back(l);
    for (Lit l : lits)
      ensure_var(l.var());
    auto id = static_cast<std::uint32_t>(db_.size());
    index_[key(lits)].push_back(id);
    if (lits.empty()) {
      ++live_empty_;
    } else if (lits.size() == 1) {
      units_.push_back(id);
    } else {
      watches_[lits[0].index()].push_back(id);
      watches_[lits[1].index()].push_back(id);
    }
    db_.push_back({std::move(lits), false});
  }

  void remove(const Clause &lits) {
    auto it = index_.find(key(lits));
    if (it == index_.end() || it->second.empty())
      return;
    std::uint32_t id = it->second.back();
    it->second.pop_back();
    db_[id].deleted = true;
    if (db_[id].lits.empty())
      --live_empty_;
  }

  /// True if assigning the negation of `clause` and propagating conflicts.
  bool implied(const Clause &clause) {
    if (live_empty_ > 0)
      return true;
    for (Lit l : clause)
      ensure_var(l.var());
    bool conflict = false;
    for (auto id : units_) {
      if (db_[id].deleted)
        continue;
      if (!assign(db_[id].lits[0])) {
        conflict = true;
        break;
      }
    }
    for (std::size_t k = 0; !conflict && k < clause.size(); ++k)
      conflict = !assign(~clause[k]);
    if (!conflict)
      conflict = propagate();
    for (Lit l : trail_)
      value_[l.var()] = 0;
    trail_.clear();
    head_ = 0;
    return conflict;
  }

private:
  struct Record {
    Clause lits;
    bool deleted;
  };

  static std::vector<int> key(const Clause &c) {
    std::vector<int> k;
    k.reserve(c.size());
    for (Lit l : c)
      k.push_back(l.dimacs());
    std::sort(k.begin(), k.end());
    k.erase(std::unique(k.begin(), k.end()), k.end());
    return k;
  }

  void ensure_var(int v) {
    if (static_cast<int>(value_.size()) > v)
      return;
    value_.resize(v + 1, 0);
    watches_.resize(2 * static_cast<std::size_t>(v) + 2);
  }

  signed char value(Lit l) const {
    signed char v = value_[l.var()];
    return l.positive() ? v : static_cast<signed char>(-v);
  }

  bool assign(Lit l) {
    signed char v = value(l);
    if (v != 0)
      return v > 0;
    value_[l.var()] = l.positive() ? 1 : -1;
    trail_.push_back(l);
    return true;
  }

  bool propagate() {
    while (head_ < trail_.size()) {
      Lit false_lit = ~trail_[head_++];
      auto &ws = watches_[false_lit.index()];
      std::size_t i = 0, j = 0;
      bool conflict = false;
      while (i < ws.size()) {
        std::uint32_t id = ws[i++];
        auto &rec = db_[id];
        if (rec.deleted)
          continue;
        auto &lits = rec.lits;
        if (lits[0] == false_lit)
          std::swap(lits[0], lits[1]);
        if (value(lits[0]) > 0) {
          ws[j++] = id;
          continue;
        }
        bool moved = false;
        for (std::size_t k = 2; k < lits.size(); ++k) {
          if (value(lits[k]) >= 0) {
            std::swap(lits[1], lits[k]);
            watches_[lits[1].index()].push_back(id);
            moved = true;
            break;
          }
        }
        if (moved)
          continue;
        ws[j++] = id;
        if (value(lits[0]) < 0) {
          conflict = true;
          while (i < ws.size())
            ws[j++] = ws[i++];
        } else {
          assign(lits[0]);
        }
      }
      ws.resize(j);
      if (conflict)
        return true;
    }
    return false;
  }

  std::vector<Record> db_;
  std::unordered_map<std::vector<int>, std::vector<std::uint32_t>, KeyHash>
      index_;
  std::vector<std::uint32_t> units_;
  std::size_t live_empty_ = 0;
  std::vector<signed char> value_;
  std::vector<std::vector<std::uint32_t>> watches_;
  std::vector<Lit> trail_;
  std::size_t head_ = 0;
};

} // namespace

DratCheckResult check_drat(const CnfFormula &formula, const DratProof &proof) {
  RupChecker checker(formula.num_vars());
  for (const auto &clause : formula.clauses())
    checker.add(clause);

  DratCheckResult result;
  for (std::size_t i = 0; i < proof.steps.size(); ++i) {
    const auto &step = proof.steps[i];
    if (step.kind == DratStep::Kind::remove) {
      checker.remove(step.clause);
      continue;
    }
    for (Lit l : step.clause) {
      if (l.var() < 1) {
        result.failed_step = i;
        result.message = "step " + std::to_string(i) + ": invalid literal";
        return result;
      }
    }
    if (!checker.implied(step.clause)) {
      result.failed_step = i;
      result.message =
          "step " + std::to_string(i) + ": lemma is not implied by unit "
                                        "propagation";
      return result;
    }
    if (step.clause.empty()) {
      result.ok = true;
      return result;
    }
    checker.add(step.clause);
  }
  result.message = "proof does not derive the empty clause";
  return result;
}

} // namespace dhard
