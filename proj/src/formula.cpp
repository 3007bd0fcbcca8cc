#include "dhard/formula.hpp"

#include "dhard/error.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>
#include <unordered_set>

namespace dhard {

namespace {

struct SortedClauseHash {
  std::size_t operator()(const std::vector<int> &c) const noexcept {
    std::uint64_t h = 14695981039346656037ULL;
    for (int v : c) {
      h ^= static_cast<std::uint32_t>(v);
      h *= 1099511628211ULL;
    }
    return static_cast<std::size_t>(h);
  }
};

std::vector<int> sorted_key(const Clause &c) {
  std::vector<int> key;
  key.reserve(c.size());
  for (Lit l : c)
    key.push_back(l.dimacs());
  std::sort(key.begin(), key.end());
  return key;
}

} // namespace

Assignment::Assignment(std::vector<Lit> lits) : lits_(std::move(lits)) {
  std::sort(lits_.begin(), lits_.end(),
            [](Lit a, Lit b) { return a.var() < b.var(); });
  for (std::size_t i = 0; i < lits_.size(); ++i) {
    if (lits_[i].var() < 1)
      throw Error(ErrorKind::invalid_argument,
                  "assignment literal has variable index < 1");
    if (i > 0 && lits_[i].var() == lits_[i - 1].var())
      throw Error(ErrorKind::invalid_argument,
                  "assignment assigns variable " +
                      std::to_string(lits_[i].var()) + " twice");
  }
}

std::optional<bool> Assignment::value(int var) const {
  auto it = std::lower_bound(lits_.begin(), lits_.end(), var,
                             [](Lit l, int v) { return l.var() < v; });
  if (it == lits_.end() || it->var() != var)
    return std::nullopt;
  return it->positive();
}

std::optional<Assignment> Assignment::merged(const Assignment &other) const {
  std::vector<Lit> out;
  out.reserve(lits_.size() + other.lits_.size());
  std::size_t i = 0, j = 0;
  while (i < lits_.size() || j < other.lits_.size()) {
    if (j == other.lits_.size() ||
        (i < lits_.size() && lits_[i].var() < other.lits_[j].var())) {
      out.push_back(lits_[i++]);
    } else if (i == lits_.size() || other.lits_[j].var() < lits_[i].var()) {
      out.push_back(other.lits_[j++]);
    } else {
      if (lits_[i] != other.lits_[j])
        return std::nullopt;
      out.push_back(lits_[i]);
      ++i;
      ++j;
    }
  }
  Assignment a;
  a.lits_ = std::move(out);
  return a;
}

std::string Assignment::bits() const {
  std::string s;
  s.reserve(lits_.size());
  for (Lit l : lits_)
    s.push_back(l.positive() ? '1' : '0');
  return s;
}

CnfFormula::CnfFormula(int num_vars, std::vector<Clause> clauses)
    : num_vars_(num_vars) {
  if (num_vars < 0)
    throw Error(ErrorKind::invalid_argument, "negative variable count");
  std::unordered_set<std::vector<int>, SortedClauseHash> seen;
  clauses_.reserve(clauses.size());
  for (auto &clause : clauses) {
    Clause kept;
    kept.reserve(clause.size());
    for (Lit l : clause) {
      if (l.var() < 1 || l.var() > num_vars)
        throw Error(ErrorKind::invalid_argument,
                    "literal " + std::to_string(l.dimacs()) +
                        " outside variable range 1.." +
                        std::to_string(num_vars));
      if (std::find(kept.begin(), kept.end(), l) != kept.end())
        continue;
      if (std::find(kept.begin(), kept.end(), ~l) != kept.end())
        throw Error(ErrorKind::invalid_argument,
                    "tautological clause on variable " +
                        std::to_string(l.var()));
      kept.push_back(l);
    }
    if (!seen.insert(sorted_key(kept)).second)
      continue;
    has_empty_ = has_empty_ || kept.empty();
    clauses_.push_back(std::move(kept));
  }
}

CnfFormula CnfFormula::contradiction(int num_vars) {
  return CnfFormula(num_vars, {Clause{}});
}

bool CnfFormula::satisfied_by(const Assignment &a) const {
  for (const auto &clause : clauses_) {
    bool sat = std::any_of(clause.begin(), clause.end(), [&](Lit l) {
      auto v = a.value(l.var());
      return v && *v == l.positive();
    });
    if (!sat)
      return false;
  }
  return true;
}

bool CnfFormula::same_clauses(const CnfFormula &other) const {
  if (num_vars_ != other.num_vars_ || clauses_.size() != other.clauses_.size())
    return false;
  std::vector<std::vector<int>> a, b;
  a.reserve(clauses_.size());
  b.reserve(clauses_.size());
  for (const auto &c : clauses_)
    a.push_back(sorted_key(c));
  for (const auto &c : other.clauses_)
    b.push_back(sorted_key(c));
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  return a == b;
}

//===----------------------------------------------------------------------===//
// DIMACS
//===----------------------------------------------------------------------===//

namespace {

class Tokenizer {
public:
  explicit Tokenizer(std::string_view text) : text_(text) {}

  // Skips whitespace and whole comment lines. Returns false at end of input.
  bool skip_blank() {
    while (pos_ < text_.size()) {
      char ch = text_[pos_];
      if (ch == '\n') {
        ++line_;
        ++pos_;
        at_line_start_ = true;
      } else if (ch == ' ' || ch == '\t' || ch == '\r') {
        ++pos_;
      } else if (at_line_start_ && ch == 'c') {
        skip_line();
      } else {
        return true;
      }
    }
    return false;
  }

  char peek() const { return text_[pos_]; }
  std::size_t line() const { return line_; }

  std::string_view word() {
    std::size_t start = pos_;
    while (pos_ < text_.size() && !is_space(text_[pos_]))
      ++pos_;
    at_line_start_ = false;
    return text_.substr(start, pos_ - start);
  }

  std::string_view rest_of_line() {
    std::size_t start = pos_;
    while (pos_ < text_.size() && text_[pos_] != '\n')
      ++pos_;
    at_line_start_ = false;
    return text_.substr(start, pos_ - start);
  }

  void skip_line() {
    while (pos_ < text_.size() && text_[pos_] != '\n')
      ++pos_;
  }

  void finish() { pos_ = text_.size(); }

private:
  static bool is_space(char ch) {
    return ch == ' ' || ch == '\t' || ch == '\r' || ch == '\n';
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  bool at_line_start_ = true;
};

[[noreturn]] void parse_error(std::size_t line, const std::string &msg) {
  throw Error(ErrorKind::parse, "line " + std::to_string(line) + ": " + msg);
}

long long to_integer(std::string_view tok, std::size_t line) {
  long long v = 0;
  auto first = tok.data();
  if (!tok.empty() && tok.front() == '+')
    ++first;
  auto [ptr, ec] = std::from_chars(first, tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size() || first == ptr)
    parse_error(line, "expected an integer, got '" + std::string(tok) + "'");
  return v;
}

} // namespace

CnfFormula parse_dimacs(std::string_view text) {
  Tokenizer tok(text);
  if (!tok.skip_blank())
    throw Error(ErrorKind::parse, "empty input");
  if (tok.peek() != 'p')
    parse_error(tok.line(), "expected header 'p cnf <vars> <clauses>'");

  std::size_t header_line = tok.line();
  std::istringstream header{std::string(tok.rest_of_line())};
  std::string p, fmt, extra;
  long long declared_vars = -1, declared_clauses = -1;
  if (!(header >> p >> fmt >> declared_vars >> declared_clauses) ||
      p != "p" || fmt != "cnf" || (header >> extra) || declared_vars < 0 ||
      declared_clauses < 0 || declared_vars > (1LL << 30))
    parse_error(header_line, "malformed header");

  std::vector<Clause> clauses;
  clauses.reserve(static_cast<std::size_t>(
      std::min<long long>(declared_clauses, 1 << 24)));
  Clause current;
  bool open = false;
  while (tok.skip_blank()) {
    if (tok.peek() == '%') {
      // SATLIB end marker; everything after it is ignored.
      tok.finish();
      break;
    }
    std::size_t line = tok.line();
    long long v = to_integer(tok.word(), line);
    if (v == 0) {
      clauses.push_back(std::move(current));
      current = Clause{};
      open = false;
      continue;
    }
    if (v > declared_vars || -v > declared_vars)
      parse_error(line, "literal " + std::to_string(v) +
                            " exceeds declared variable count " +
                            std::to_string(declared_vars));
    current.emplace_back(static_cast<int>(v));
    open = true;
  }
  if (open)
    throw Error(ErrorKind::parse, "last clause is missing its terminating 0");
  if (static_cast<long long>(clauses.size()) != declared_clauses)
    throw Error(ErrorKind::parse,
                "header declares " + std::to_string(declared_clauses) +
                    " clauses but " + std::to_string(clauses.size()) +
                    " were read");
  try {
    return CnfFormula(static_cast<int>(declared_vars), std::move(clauses));
  } catch (const Error &e) {
    throw Error(ErrorKind::parse, e.what());
  }
}

std::string write_dimacs(const CnfFormula &formula) {
  std::string out = "p cnf " + std::to_string(formula.num_vars()) + " " +
                    std::to_string(formula.num_clauses()) + "\n";
  char buf[16];
  for (const auto &clause : formula.clauses()) {
    for (Lit l : clause) {
      auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, l.dimacs());
      out.append(buf, ptr);
      out.push_back(' ');
    }
    out.append("0\n");
  }
  return out;
}

CnfFormula read_dimacs_file(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw Error(ErrorKind::io, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_dimacs(ss.str());
}

void write_dimacs_file(const std::filesystem::path &path,
                       const CnfFormula &formula) {
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw Error(ErrorKind::io, "cannot write " + path.string());
  out << write_dimacs(formula);
  if (!out)
    throw Error(ErrorKind::io, "write failed for " + path.string());
}

CnfFormula substitute(const CnfFormula &formula, const Assignment &beta) {
  if (beta.max_var() > formula.num_vars())
    throw Error(ErrorKind::invalid_argument,
                "assignment references variable " +
                    std::to_string(beta.max_var()) + " outside 1.." +
                    std::to_string(formula.num_vars()));
  if (beta.empty())
    return formula;

  // Dense lookup: 0 unassigned, 1 true, -1 false.
  std::vector<signed char> value(formula.num_vars() + 1, 0);
  for (Lit l : beta.lits())
    value[l.var()] = l.positive() ? 1 : -1;

  std::vector<Clause> out;
  out.reserve(formula.num_clauses());
  for (const auto &clause : formula.clauses()) {
    Clause reduced;
    bool satisfied = false;
    for (Lit l : clause) {
      signed char v = value[l.var()];
      if (v == 0) {
        reduced.push_back(l);
      } else if ((v > 0) == l.positive()) {
        satisfied = true;
        break;
      }
    }
    if (satisfied)
      continue;
    if (reduced.empty())
      return CnfFormula::contradiction(formula.num_vars());
    out.push_back(std::move(reduced));
  }
  return CnfFormula(formula.num_vars(), std::move(out));
}

} // namespace dhard
