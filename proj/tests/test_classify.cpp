#include <doctest.h>

#include <random>

#include "blindcopy/classify.hpp"
#include "blindcopy/onevar.hpp"
#include "blindcopy/text.hpp"
#include "testutil.hpp"

using namespace blindcopy;

TEST_CASE("classify worked examples") {
  World w;
  auto cs = parse_clauses(w,
                          "fun f/2. fun g/1. fun a/0. fun h/5.\n"
                          "pred known/1. pred P/1. pred Q/1.\n"
                          "known(f(x1,x2)) | -known(x1) | -known(x2).\n"
                          "P(x6).\n"
                          "P(g(f(x1,x2))) | -Q(x1).\n"
                          "P(a).\n"
                          "P(g(x1)) | -Q(x2).\n");
  CHECK(classify(w, cs[0]) == ClauseClass::Complex);
  CHECK(is_flat(w, cs[0]));
  CHECK(classify(w, cs[1]) == ClauseClass::EpsilonBlock);
  CHECK(classify(w, cs[2]) == ClauseClass::CSecondForm);
  CHECK(classify(w, cs[3]) == ClauseClass::Ground);
  CHECK(classify(w, cs[4]) == ClauseClass::Other);
  CHECK(classify(w, Clause{}) == ClauseClass::EpsilonBlock);
}

TEST_CASE("classify is stable under renaming") {
  bctest::SmallSig s;
  World& w = s.w;
  w.pred("P", 1);
  w.pred("Q", 1);
  std::mt19937 rng(5150);
  std::uniform_int_distribution<int> nlits(1, 3);
  std::uniform_int_distribution<int> coin(0, 1);
  for (int round = 0; round < 300; ++round) {
    Clause c;
    for (int i = nlits(rng); i > 0; --i) {
      TermId t = bctest::random_term(w, rng, {1, 2}, 2);
      PredId p = coin(rng) ? *w.find_pred("P") : *w.find_pred("Q");
      c.push_back(make_lit(w.atom(p, {t}), coin(rng)));
    }
    normalize_clause(c);
    Subst rho;
    rho.bind(1, w.var(8));
    rho.bind(2, w.var(9));
    CHECK(classify(w, c) == classify(w, rho.apply_clause(w, c)));
  }
}

TEST_CASE("nested contexts compile to flat plus one-variable clauses") {
  World w;
  auto cs = parse_clauses(w,
                          "fun f/2. fun g/1. pred P/1. pred Q/1.\n"
                          "P(g(f(x1,x2))) | -Q(x1).\n");
  auto out = c_to_flat_onevar(w, cs);
  REQUIRE(out.size() == 3);
  // The rewritten clause plus the two bridge clauses.
  PredId pg = *w.find_pred("P@g(x3)");
  FunId f = *w.find_fun("f"), g = *w.find_fun("g");
  Clause expect{make_lit(w.atom(pg, {w.app(f, {w.var(1), w.var(2)})}), false),
                make_lit(w.atom(*w.find_pred("Q"), {w.var(1)}), true)};
  normalize_clause(expect);
  CHECK(canon_clause(w, out[0]) == canon_clause(w, expect));
  for (size_t i = 1; i < out.size(); ++i) {
    CHECK(is_onevar_clause(w, out[i]));
    CHECK(out[i].size() == 2);
  }
  // Bridges relate Pg(x) and P(g(x)).
  TermId x = w.var(1);
  Clause b1{make_lit(w.atom(pg, {x}), true),
            make_lit(w.atom(*w.find_pred("P"), {w.app(g, {x})}), false)};
  normalize_clause(b1);
  bool found = false;
  for (auto& c : out)
    if (canon_clause(w, c) == canon_clause(w, b1)) found = true;
  CHECK(found);

  // Already-flat and one-variable sets pass through unchanged.
  World w2;
  auto flat = parse_clauses(w2,
                            "fun f/2. pred P/1. pred Q/1.\n"
                            "P(f(x1,x2)) | -Q(x1) | -Q(x2).\n"
                            "P(x1) | -Q(x1).\n");
  auto out2 = c_to_flat_onevar(w2, flat);
  CHECK(out2 == flat);

  // Clauses outside the class are rejected, naming the literal.
  World w3;
  auto bad = parse_clauses(w3,
                           "fun f/2. fun g/1. pred P/1.\n"
                           "P(f(g(x1),x2)) | P(f(x2,x1)) | P(g(x1)).\n");
  CHECK_THROWS_AS(c_to_flat_onevar(w3, bad), InputError);
}

TEST_CASE("unarize encodes wide atoms") {
  World w;
  auto cs = parse_clauses(w,
                          "fun a/0. fun b/0. pred P/2. pred R/2. pred U/1.\n"
                          "P(a,b).\n"
                          "U(a).\n"
                          "R(x1,x1).\n");
  auto out = unarize(w, cs);
  REQUIRE(out.size() == 3);
  PredId pu = *w.find_pred("P@u");
  FunId tup = *w.find_fun("@tup2");
  Clause expect{make_lit(
      w.atom(pu, {w.app(tup, {w.constant("a"), w.constant("b")})}), false)};
  CHECK(out[0] == expect);
  CHECK(out[1] == cs[1]);  // unary atoms unchanged
  PredId ru = *w.find_pred("R@u");
  Clause expect2{make_lit(
      w.atom(ru, {w.app(tup, {w.var(1), w.var(1)})}), false)};
  CHECK(out[2] == expect2);
}

TEST_CASE("one-variable preprocessing decomposes and splits") {
  World w;
  auto cs = parse_clauses(w,
                          "fun g/1. fun h/1. pred P/1.\n"
                          "P(g(h(x1))).\n");
  auto branches = preprocess_onevar(w, cs);
  REQUIRE(branches.size() == 1);
  const auto& b = branches[0];
  REQUIRE(b.size() == 3);
  PredId pg = *w.find_pred("P@g(x2)");
  FunId g = *w.find_fun("g"), h = *w.find_fun("h");
  TermId x = w.var(1);
  Clause main{make_lit(w.atom(pg, {w.app(h, {x})}), false)};
  CHECK(std::count(b.begin(), b.end(), main) == 1);
  Clause b1{make_lit(w.atom(*w.find_pred("P"), {w.app(g, {x})}), false),
            make_lit(w.atom(pg, {x}), true)};
  normalize_clause(b1);
  Clause b2{make_lit(w.atom(*w.find_pred("P"), {w.app(g, {x})}), true),
            make_lit(w.atom(pg, {x}), false)};
  normalize_clause(b2);
  CHECK(std::count(b.begin(), b.end(), b1) == 1);
  CHECK(std::count(b.begin(), b.end(), b2) == 1);
  // Every non-ground argument in the output is reduced.
  for (const Clause& c : b)
    for (LitId l : c) {
      TermId t = w.atom_arg(lit_atom(l));
      if (!w.ground(t)) CHECK(is_reduced(w, t));
    }
}

TEST_CASE("mixed clauses split into branches") {
  World w;
  auto cs = parse_clauses(w,
                          "fun a/0. pred P/1. pred Q/1.\n"
                          "P(a) | Q(x1).\n");
  auto branches = preprocess_onevar(w, cs);
  REQUIRE(branches.size() == 2);
  auto ground = parse_clauses(w, "P(a).\n")[0];
  auto trivial = parse_clauses(w, "Q(x1).\n")[0];
  CHECK(branches[0] == std::vector<Clause>{ground});
  CHECK(branches[1] == std::vector<Clause>{trivial});

  // All-ground input: one unchanged branch.
  World w2;
  auto cs2 = parse_clauses(w2, "fun a/0. pred P/1. P(a). -P(a).\n");
  auto branches2 = preprocess_onevar(w2, cs2);
  REQUIRE(branches2.size() == 1);
  CHECK(branches2[0] == cs2);
}
