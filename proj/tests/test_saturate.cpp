#include <doctest.h>

#include <random>

#include "blindcopy/classify.hpp"
#include "blindcopy/saturate.hpp"
#include "blindcopy/text.hpp"
#include "testutil.hpp"

using namespace blindcopy;

TEST_CASE("subterm ordering is a stable strict partial order") {
  bctest::SmallSig s;
  World& w = s.w;
  PredId p = w.pred("P", 1), q = w.pred("Q", 1);
  std::mt19937 rng(31337);
  for (int i = 0; i < 500; ++i) {
    AtomId a = w.atom(p, {bctest::random_term(w, rng, {1, 2}, 3)});
    AtomId b = w.atom(q, {bctest::random_term(w, rng, {1, 2}, 3)});
    AtomId c = w.atom(p, {bctest::random_term(w, rng, {1, 2}, 3)});
    CHECK(!atom_less(w, a, a));
    if (atom_less(w, a, b) && atom_less(w, b, c)) CHECK(atom_less(w, a, c));
    if (atom_less(w, a, b)) {
      Subst sigma;
      sigma.bind(1, bctest::random_term(w, rng, {2}, 2));
      CHECK(atom_less(w, sigma.apply_atom(w, a), sigma.apply_atom(w, b)));
    }
  }
}

TEST_CASE("ordered resolution on the displayed flat example") {
  World w;
  auto cs = parse_clauses(
      w,
      "fun f/2. fun g/2. fun h/1.\n"
      "pred P1/1. pred P2/1. pred P3/1. pred P4/1. pred P5/1. pred P6/1.\n"
      "P1(x1) | -P2(x2) | P3(f(x1,x2)) | -P4(g(x2,x1)).\n"
      "P4(g(x1,x1)) | -P5(h(x1)) | P6(x1).\n"
      "P1(x1) | -P2(x1) | P3(f(x1,x1)) | -P5(h(x1)) | P6(x1).\n");
  auto rs = resolve_ordered(w, cs[0], cs[1]);
  REQUIRE(rs.size() == 1);
  CHECK(canon_clause(w, rs[0]) == canon_clause(w, cs[2]));
}

TEST_CASE("ordered resolution of a block against a complex clause") {
  World w;
  auto cs = parse_clauses(w,
                          "fun f/2.\n"
                          "pred P2/1. pred P3/1. pred P4/1.\n"
                          "P2(x3).\n"
                          "-P2(f(x1,x2)) | P3(x1) | P4(x2).\n"
                          "P3(x1) | P4(x2).\n");
  auto rs = resolve_ordered(w, cs[0], cs[1]);
  REQUIRE(rs.size() == 1);
  CHECK(canon_clause(w, rs[0]) == canon_clause(w, cs[2]));
}

TEST_CASE("ground unit conflict derives the empty clause") {
  World w;
  auto cs = parse_clauses(w, "fun a/0. pred P/1. P(a). -P(a).\n");
  auto rs = resolve_ordered(w, cs[0], cs[1]);
  REQUIRE(rs.size() == 1);
  CHECK(rs[0].empty());
}

TEST_CASE("ordered factorization") {
  World w;
  auto cs = parse_clauses(w,
                          "fun f/1. pred P/1. pred Q/1.\n"
                          "P(f(x1)) | P(f(x2)).\n"
                          "P(x1) | Q(f(x1)).\n");
  auto f1 = factor_ordered(w, cs[0]);
  REQUIRE(f1.size() == 1);
  auto expect = parse_clauses(w, "P(f(x1)).\n");
  CHECK(canon_clause(w, f1[0]) == canon_clause(w, expect[0]));

  // P(x1) is not maximal beside Q(f(x1)): nothing to factor.
  CHECK(factor_ordered(w, cs[1]).empty());

  // A ground clause only refactors to itself, which the set form drops.
  auto g = parse_clauses(w, "fun a/0. P(a) | P(f(a)).\n");
  for (const Clause& c : factor_ordered(w, g[0]))
    CHECK(canon_clause(w, c) != canon_clause(w, g[0]));
}

TEST_CASE("one-variable decision procedure") {
  auto run = [](const std::string& text) {
    World w;
    auto cs = parse_clauses(w, text);
    return decide_onevar(w, cs, {});
  };
  CHECK(run("fun a/0. pred P/1. P(a). -P(a).\n") == Verdict::Unsat);
  CHECK(run("fun f/1. fun a/0. pred P/1.\n"
            "P(f(x1)) | -P(x1). P(a). -P(f(f(a))).\n") == Verdict::Unsat);
  CHECK(run("fun f/1. fun a/0. pred P/1.\n"
            "P(f(x1)) | -P(x1). P(a).\n") == Verdict::Sat);
}

TEST_CASE("ground saturation oracle") {
  World w;
  auto cs = parse_clauses(w, "fun a/0. pred P/1. P(a). -P(a).\n");
  CHECK(ground_saturation_oracle(w, cs, 0) == Verdict::Unsat);

  World w2;
  auto cs2 = parse_clauses(w2, "fun a/0. fun f/1. pred P/1. P(x1).\n");
  // P must hold of every term; the bounded check cannot certify a model.
  CHECK(ground_saturation_oracle(w2, cs2, 1) == Verdict::Unknown);

  World w3;
  auto cs3 = parse_clauses(w3, "fun a/0. pred P/1. pred Q/1. P(a). -Q(a).\n");
  CHECK(ground_saturation_oracle(w3, cs3, 1) == Verdict::Sat);

  World w4;
  auto cs4 = parse_clauses(w4,
                           "fun f/1. fun a/0. pred P/1.\n"
                           "P(f(x1)) | -P(x1). P(a). -P(f(f(a))).\n");
  CHECK(ground_saturation_oracle(w4, cs4, 3) == Verdict::Unsat);
}

TEST_CASE("derivation log records premises") {
  World w;
  auto cs = parse_clauses(w, "fun a/0. pred P/1. P(a). -P(a).\n");
  DerivationLog log;
  SaturateOptions opt;
  opt.log = &log;
  CHECK(decide_onevar(w, cs, opt) == Verdict::Unsat);
  REQUIRE(!log.entries.empty());
  CHECK(log.entries.back().clause.empty());
  CHECK(log.entries.back().premises.size() == 2);
  CHECK(log.render(w).find("[resolve]") != std::string::npos);
}
