#include <doctest.h>

#include <random>

#include "blindcopy/term.hpp"
#include "blindcopy/text.hpp"
#include "testutil.hpp"

using namespace blindcopy;
using bctest::SmallSig;

TEST_CASE("substitution basics") {
  SmallSig s;
  World& w = s.w;
  TermId x = w.var(1), y = w.var(2);
  Subst sub;
  sub.bind(1, w.app(s.a, {}));
  CHECK(sub.apply(w, x) == w.app(s.a, {}));

  // Simultaneous application, no capture: f(x,y){x -> g(y)} = f(g(y),y).
  Subst sub2;
  sub2.bind(1, w.app(s.g, {y}));
  CHECK(sub2.apply(w, w.app(s.f, {x, y})) ==
        w.app(s.f, {w.app(s.g, {y}), y}));
}

TEST_CASE("clause substitution keeps signed duplicates apart") {
  SmallSig s;
  World& w = s.w;
  PredId p = w.pred("P", 1);
  TermId x = w.var(1), a = w.app(s.a, {});
  Clause c{make_lit(w.atom(p, {x}), false), make_lit(w.atom(p, {a}), true)};
  normalize_clause(c);
  Subst sub;
  sub.bind(1, a);
  Clause r = sub.apply_clause(w, c);
  CHECK(r.size() == 2);  // P(a) and -P(a) stay distinct
}

TEST_CASE("mgu worked example") {
  // f'(x,g(x),a) with f'(h(y),g(h(a)),y) unifies with x -> h(a), y -> a.
  World w;
  FunId f3 = w.fun("fp", 3), g = w.fun("g", 1), h = w.fun("h", 1),
        a = w.fun("a", 0);
  TermId x = w.var(1), y = w.var(2), ca = w.app(a, {});
  TermId s = w.app(f3, {x, w.app(g, {x}), ca});
  TermId t = w.app(f3, {w.app(h, {y}), w.app(g, {w.app(h, {ca})}), y});
  auto sigma = mgu(w, s, t);
  REQUIRE(sigma.has_value());
  CHECK(sigma->apply(w, x) == w.app(h, {ca}));
  CHECK(sigma->apply(w, y) == ca);
  CHECK(sigma->apply(w, s) == sigma->apply(w, t));
}

TEST_CASE("mgu bind and clash") {
  SmallSig s;
  World& w = s.w;
  TermId x = w.var(1), y = w.var(2);
  auto bind = mgu(w, x, w.app(s.f, {y, y}));
  REQUIRE(bind.has_value());
  CHECK(bind->apply(w, x) == w.app(s.f, {y, y}));

  FunId b = w.fun("b", 0);
  auto clash = mgu(w, w.app(s.f, {x, x}),
                   w.app(s.f, {w.app(s.a, {}), w.app(b, {})}));
  CHECK(!clash.has_value());

  // Occurs check.
  CHECK(!mgu(w, x, w.app(s.g, {x})).has_value());
}

TEST_CASE("mgu agrees with the rewrite-system oracle on random pairs") {
  SmallSig s;
  World& w = s.w;
  std::mt19937 rng(20260809);
  int unified = 0;
  for (int i = 0; i < 1000; ++i) {
    TermId t1 = bctest::random_term(w, rng, {1, 2, 3}, 3);
    TermId t2 = bctest::random_term(w, rng, {1, 2, 3}, 3);
    auto ours = mgu(w, t1, t2);
    auto oracle = bctest::mgu_oracle(w, t1, t2);
    REQUIRE(ours.has_value() == oracle.has_value());
    if (ours) {
      ++unified;
      // Both must unify the pair; both must be idempotent.
      CHECK(ours->apply(w, t1) == ours->apply(w, t2));
      CHECK(oracle->apply(w, t1) == oracle->apply(w, t2));
      CHECK(ours->apply(w, ours->apply(w, t1)) == ours->apply(w, t1));
    }
  }
  CHECK(unified > 50);
}

TEST_CASE("mgu generality against brute-force unifiers") {
  // Every unifier found by enumeration factors through the mgu.
  SmallSig s;
  World& w = s.w;
  std::vector<TermId> universe = bctest::enumerate_terms(w, s.f, s.g, s.a,
                                                         {1, 2}, 2);
  std::mt19937 rng(7);
  std::vector<TermId> pool = universe;
  std::shuffle(pool.begin(), pool.end(), rng);
  pool.resize(40);
  int checked = 0;
  for (TermId t1 : pool) {
    for (TermId t2 : pool) {
      auto sigma = mgu(w, t1, t2);
      for (TermId u1 : universe) {
        for (TermId u2 : universe) {
          Subst theta;
          theta.bind(1, u1);
          theta.bind(2, u2);
          if (theta.apply(w, t1) != theta.apply(w, t2)) continue;
          REQUIRE(sigma.has_value());
          // Solve sigma;sigma'' = theta syntactically: match each binding.
          Subst composed;
          bool ok = true;
          for (int v : {1, 2}) {
            TermId image = sigma->apply(w, w.var(v));
            TermId target = theta.apply(w, w.var(v));
            auto m = match_term(w, image, target);
            if (!m) {
              ok = false;
              break;
            }
            for (auto [mv, mt] : m->bindings()) {
              auto prev = composed.lookup(mv);
              if (prev && *prev != mt) {
                ok = false;
                break;
              }
              composed.bind(mv, mt);
            }
            if (!ok) break;
          }
          CHECK(ok);
          ++checked;
        }
      }
    }
  }
  CHECK(checked > 100);
}

TEST_CASE("mgu is renaming invariant") {
  SmallSig s;
  World& w = s.w;
  std::mt19937 rng(99);
  for (int i = 0; i < 300; ++i) {
    TermId t1 = bctest::random_term(w, rng, {1, 2}, 3);
    TermId t2 = bctest::random_term(w, rng, {1, 2}, 3);
    Subst rho;  // a renaming
    rho.bind(1, w.var(5));
    rho.bind(2, w.var(6));
    auto sigma = mgu(w, t1, t2);
    auto sigma_r = mgu(w, rho.apply(w, t1), rho.apply(w, t2));
    REQUIRE(sigma.has_value() == sigma_r.has_value());
    if (sigma) {
      // Compare the unified terms up to renaming via canonical clauses.
      PredId p = w.pred("Peq", 1);
      Clause c1{make_lit(w.atom(p, {sigma->apply(w, t1)}), false)};
      Clause c2{make_lit(w.atom(p, {sigma_r->apply(w, rho.apply(w, t1))}),
                         false)};
      CHECK(canon_clause(w, c1) == canon_clause(w, c2));
    }
  }
}

TEST_CASE("rename_apart") {
  SmallSig s;
  World& w = s.w;
  PredId p = w.pred("P", 1), q = w.pred("Q", 1), r = w.pred("R", 1);
  Clause c1{make_lit(w.atom(p, {w.var(1)}), false)};
  Clause c2{make_lit(w.atom(q, {w.var(1)}), false)};
  auto [r1, r2] = rename_apart(w, c1, c2);
  CHECK(r1 == c1);
  CHECK(r2 == Clause{make_lit(w.atom(q, {w.var(2)}), false)});

  // Ground pair unchanged.
  Clause g1{make_lit(w.atom(p, {w.app(s.a, {})}), false)};
  auto [g1r, g2r] = rename_apart(w, g1, g1);
  CHECK(g1r == g1);
  CHECK(g2r == g1);

  // Only the second clause moves.
  Clause c3{make_lit(w.atom(p, {w.var(1)}), false),
            make_lit(w.atom(q, {w.var(2)}), false)};
  normalize_clause(c3);
  Clause c4{make_lit(w.atom(r, {w.var(2)}), false)};
  auto [r3, r4] = rename_apart(w, c3, c4);
  CHECK(r3 == c3);
  CHECK(clause_fv(w, r4) == std::vector<int>{3});
}

TEST_CASE("subterm queries") {
  SmallSig s;
  World& w = s.w;
  TermId x = w.var(1), a = w.app(s.a, {});
  TermId ga = w.app(s.g, {a});
  TermId t = w.app(s.f, {ga, x});
  auto subs = strict_subterms(w, t);
  CHECK(subs.size() == 3);  // g(a), a, x
  CHECK(is_strict_subterm(w, ga, t));
  CHECK(is_strict_subterm(w, a, t));
  CHECK(!is_strict_subterm(w, t, t));

  TermId fx = w.app(s.f, {x, w.app(s.g, {x})});
  CHECK(w.term_fv(fx) == std::vector<int>{1});
  CHECK(w.trivial_term(x));
  CHECK(!w.trivial_term(a));  // a constant carries a function symbol
}

TEST_CASE("canonical renaming identifies clauses modulo renaming") {
  SmallSig s;
  World& w = s.w;
  PredId p = w.pred("P", 1), q = w.pred("Q", 1);
  Clause c1{make_lit(w.atom(p, {w.var(1)}), false),
            make_lit(w.atom(q, {w.var(2)}), true)};
  Clause c2{make_lit(w.atom(p, {w.var(7)}), false),
            make_lit(w.atom(q, {w.var(3)}), true)};
  normalize_clause(c1);
  normalize_clause(c2);
  CHECK(canon_clause(w, c1) == canon_clause(w, c2));

  Clause c3{make_lit(w.atom(p, {w.var(1)}), false),
            make_lit(w.atom(q, {w.var(1)}), true)};
  normalize_clause(c3);
  CHECK(canon_clause(w, c1) != canon_clause(w, c3));
}

TEST_CASE("clause file round trip and diagnostics") {
  World w;
  std::string text =
      "# sample\n"
      "fun f/2.\nfun a/0.\npred P/1.\npred Q/1.\n"
      "P(f(x1,a)) | -Q(x1).\nfalse.\n";
  auto cs = parse_clauses(w, text);
  REQUIRE(cs.size() == 2);
  CHECK(cs[1].empty());
  CHECK(w.show_clause(cs[0]) == "P(f(x1,a)) | -Q(x1)");

  std::string out = write_clause_file(w, cs);
  World w2;
  auto cs2 = parse_clauses(w2, out);
  CHECK(cs2.size() == 2);

  // Arity violation carries a position.
  World w3;
  try {
    parse_clauses(w3, "fun a/0.\npred P/1.\nP(a,a).\n");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line == 3);
  }
}
