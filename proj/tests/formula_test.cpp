#include "dhard/error.hpp"
#include "dhard/formula.hpp"
#include "fixtures.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <random>

using namespace dhard;
using dhard::testing::pigeonhole;
using dhard::testing::random_kcnf;
using dhard::testing::small_fixtures;

namespace {

ErrorKind kind_of(auto &&fn) {
  try {
    fn();
  } catch (const Error &e) {
    return e.kind();
  }
  ADD_FAILURE() << "no dhard::Error thrown";
  return ErrorKind::io;
}

Clause clause(std::initializer_list<int> lits) {
  Clause c;
  for (int l : lits)
    c.emplace_back(l);
  return c;
}

} // namespace

TEST(Parse, SmallestUnsatCore) {
  CnfFormula f = parse_dimacs("p cnf 1 2\n1 0\n-1 0\n");
  EXPECT_EQ(f.num_vars(), 1);
  ASSERT_EQ(f.num_clauses(), 2u);
  EXPECT_EQ(f.clauses()[0], clause({1}));
  EXPECT_EQ(f.clauses()[1], clause({-1}));
}

TEST(Parse, CommentsAreSkipped) {
  CnfFormula f = parse_dimacs("p cnf 2 1\nc note\n1 -2 0\n");
  EXPECT_EQ(f.num_vars(), 2);
  ASSERT_EQ(f.num_clauses(), 1u);
  EXPECT_EQ(f.clauses()[0], clause({1, -2}));
}

TEST(Parse, ClausesMaySpanLines) {
  CnfFormula f = parse_dimacs("c head\np cnf 3 2\n1 2\n 3 0 -1\n0\n");
  ASSERT_EQ(f.num_clauses(), 2u);
  EXPECT_EQ(f.clauses()[0], clause({1, 2, 3}));
  EXPECT_EQ(f.clauses()[1], clause({-1}));
}

TEST(Parse, Errors) {
  EXPECT_EQ(kind_of([] { parse_dimacs("p cnf 1 1\n2 0\n"); }), ErrorKind::parse);
  EXPECT_EQ(kind_of([] { parse_dimacs(""); }), ErrorKind::parse);
  EXPECT_EQ(kind_of([] { parse_dimacs("p cnf 2 1\n1 2\n"); }), ErrorKind::parse);
  EXPECT_EQ(kind_of([] { parse_dimacs("p cnf 2 2\n1 2 0\n"); }), ErrorKind::parse);
  EXPECT_EQ(kind_of([] { parse_dimacs("p cnf 2 1\n1 0\n2 0\n"); }),
            ErrorKind::parse);
  EXPECT_EQ(kind_of([] { parse_dimacs("p dnf 2 1\n1 0\n"); }), ErrorKind::parse);
  EXPECT_EQ(kind_of([] { parse_dimacs("p cnf x 1\n1 0\n"); }), ErrorKind::parse);
  EXPECT_EQ(kind_of([] { parse_dimacs("1 0\n"); }), ErrorKind::parse);
  EXPECT_EQ(kind_of([] { parse_dimacs("p cnf 2 1\n1 a 0\n"); }),
            ErrorKind::parse);
  // Tautologies are rejected rather than dropped.
  EXPECT_EQ(kind_of([] { parse_dimacs("p cnf 2 1\n1 -1 0\n"); }),
            ErrorKind::parse);
}

TEST(Formula, DuplicatesRemoved) {
  CnfFormula f(3, {clause({1, 2, 1}), clause({2, 1}), clause({3})});
  ASSERT_EQ(f.num_clauses(), 2u);
  EXPECT_EQ(f.clauses()[0], clause({1, 2}));
  EXPECT_EQ(kind_of([] { CnfFormula(2, {clause({3})}); }),
            ErrorKind::invalid_argument);
  EXPECT_EQ(kind_of([] { CnfFormula(2, {clause({2, -2})}); }),
            ErrorKind::invalid_argument);
}

TEST(Write, ExactText) {
  EXPECT_EQ(write_dimacs(CnfFormula(1, {clause({1}), clause({-1})})),
            "p cnf 1 2\n1 0\n-1 0\n");
  EXPECT_EQ(write_dimacs(CnfFormula(0, {})), "p cnf 0 0\n");
}

TEST(Write, PigeonholeRoundTripIsByteStable) {
  CnfFormula php = pigeonhole(3, 2);
  EXPECT_EQ(php.num_vars(), 6);
  EXPECT_EQ(php.num_clauses(), 3u + 2u * 3u);
  std::string once = write_dimacs(php);
  std::string twice = write_dimacs(parse_dimacs(once));
  EXPECT_EQ(once, twice);
  EXPECT_EQ(parse_dimacs(once), php);
}

TEST(Write, RoundTripAllFixtures) {
  for (const auto &f : small_fixtures()) {
    CnfFormula back = parse_dimacs(write_dimacs(f.formula));
    EXPECT_TRUE(back.same_clauses(f.formula)) << f.name;
    EXPECT_EQ(back.num_vars(), f.formula.num_vars()) << f.name;
  }
}

TEST(Write, FileRoundTrip) {
  auto path = std::filesystem::temp_directory_path() / "dhard_formula_rt.cnf";
  CnfFormula f = random_kcnf(10, 40, 3, 5);
  write_dimacs_file(path, f);
  EXPECT_EQ(read_dimacs_file(path), f);
  std::filesystem::remove(path);
  EXPECT_EQ(kind_of([&] { read_dimacs_file(path); }), ErrorKind::io);
}

TEST(Substitute, Examples) {
  CnfFormula c(3, {clause({1, 2}), clause({-1, 3})});
  CnfFormula r = substitute(c, Assignment({Lit(1)}));
  ASSERT_EQ(r.num_clauses(), 1u);
  EXPECT_EQ(r.clauses()[0], clause({3}));
  EXPECT_EQ(r.num_vars(), 3);

  CnfFormula u(1, {clause({1}), clause({-1})});
  CnfFormula e = substitute(u, Assignment({Lit(1)}));
  EXPECT_TRUE(e.has_empty_clause());
  EXPECT_EQ(e, CnfFormula::contradiction(1));

  CnfFormula id(3, {clause({1, 2}), clause({-2, 3})});
  EXPECT_EQ(substitute(id, Assignment()), id);

  EXPECT_EQ(kind_of([&] { substitute(id, Assignment({Lit(4)})); }),
            ErrorKind::invalid_argument);
}

TEST(Substitute, MonotoneAndComposable) {
  std::mt19937_64 rng(3);
  for (int t = 0; t < 50; ++t) {
    CnfFormula c = random_kcnf(10, 30, 3, 100 + t);
    std::vector<Lit> a, b;
    for (int v = 1; v <= 10; ++v) {
      auto r = rng() % 3;
      if (r == 1)
        a.emplace_back(v, (rng() & 1) != 0);
      else if (r == 2)
        b.emplace_back(v, (rng() & 1) != 0);
    }
    Assignment ba(a), bb(b);
    CnfFormula s = substitute(c, ba);
    EXPECT_LE(s.num_clauses(), c.num_clauses());
    if (!s.has_empty_clause()) {
      for (const auto &cl : s.clauses()) {
        bool subset_of_some = false;
        for (const auto &orig : c.clauses())
          subset_of_some |= std::all_of(cl.begin(), cl.end(), [&](Lit l) {
            return std::find(orig.begin(), orig.end(), l) != orig.end();
          });
        EXPECT_TRUE(subset_of_some);
      }
    }
    auto both = ba.merged(bb);
    ASSERT_TRUE(both.has_value());
    EXPECT_TRUE(substitute(s, bb).same_clauses(substitute(c, *both)));
  }
}

TEST(Assignment, Basics) {
  Assignment a({Lit(3), Lit(-1)});
  EXPECT_EQ(a.bits(), "01");
  EXPECT_EQ(a.value(1), false);
  EXPECT_EQ(a.value(3), true);
  EXPECT_FALSE(a.value(2).has_value());
  EXPECT_EQ(a.max_var(), 3);
  EXPECT_FALSE(a.merged(Assignment({Lit(1)})).has_value());
  EXPECT_EQ(a.merged(Assignment({Lit(2)}))->bits(), "011");
  EXPECT_EQ(kind_of([] { Assignment({Lit(1), Lit(-1)}); }),
            ErrorKind::invalid_argument);
}
