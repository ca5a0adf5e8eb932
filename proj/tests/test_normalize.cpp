#include <doctest.h>

#include "blindcopy/normalize.hpp"
#include "blindcopy/text.hpp"
#include "testutil.hpp"

using namespace blindcopy;

TEST_CASE("the worked normalization example") {
  World w;
  auto cs = parse_clauses(w, read_file(DATA_DIR "/sec71.cls"));
  NormalSet n = normalize(w, cs);

  PredId p = *w.find_pred("P"), q = *w.find_pred("Q"), r = *w.find_pred("R");
  PredId sp = n.state_of(p), sq = n.state_of(q);
  PredId spq = n.state({p, q}), sr = n.state_of(r);
  FunId f = *w.find_fun("f"), g = *w.find_fun("g");
  TermId a = w.constant("a"), b = w.constant("b"), x = w.var(1);

  auto cl = [&](std::initializer_list<LitId> lits) {
    Clause c(lits);
    normalize_clause(c);
    return canon_clause(w, c);
  };
  TermId shell_a =
      w.app(f, {w.app(g, {x, a}), w.app(g, {a, x}), a});
  TermId shell_b =
      w.app(f, {w.app(g, {x, a}), w.app(g, {a, x}), b});
  std::vector<Clause> expect{
      cl({make_lit(w.atom(sp, {a}), false)}),
      cl({make_lit(w.atom(sq, {a}), false)}),
      cl({make_lit(w.atom(sp, {shell_a}), false),
          make_lit(w.atom(sp, {x}), true)}),
      cl({make_lit(w.atom(sp, {shell_b}), false),
          make_lit(w.atom(sp, {x}), true)}),
      cl({make_lit(w.atom(sr, {w.app(g, {a, a})}), false)}),
      cl({make_lit(w.atom(spq, {a}), false)}),
  };
  std::sort(expect.begin(), expect.end());

  std::vector<Clause> got;
  for (const Clause& c : n.clauses) got.push_back(canon_clause(w, c));
  std::sort(got.begin(), got.end());
  CHECK(got == expect);
}

TEST_CASE("membership and emptiness on the worked example") {
  World w;
  auto cs = parse_clauses(w, read_file(DATA_DIR "/sec71.cls"));
  NormalSet n = normalize(w, cs);
  PredId p = *w.find_pred("P"), q = *w.find_pred("Q"), r = *w.find_pred("R");
  FunId g = *w.find_fun("g");
  TermId a = w.constant("a"), b = w.constant("b");

  CHECK(nonempty(w, n, n.state_of(p)));
  CHECK(nonempty(w, n, n.state({p, q})));
  CHECK(accepts(w, n, n.state_of(r), w.app(g, {a, a})));
  CHECK(!accepts(w, n, n.state_of(p), b));
  CHECK(!accepts(w, n, n.state_of(q), b));
  CHECK(accepts(w, n, n.state_of(q), a));

  // Deeper members of P's language.
  FunId f = *w.find_fun("f");
  TermId t = w.app(f, {w.app(g, {a, a}), w.app(g, {a, a}), a});
  CHECK(accepts(w, n, n.state_of(p), t));
}

TEST_CASE("already-normal sets only gain state wrapping") {
  World w;
  auto cs = parse_clauses(w,
                          "fun a/0. fun f/1. pred P/1. pred Q/1.\n"
                          "P(a). Q(f(x1)) | -P(x1).\n");
  NormalSet n = normalize(w, cs);
  PredId sp = n.state_of(*w.find_pred("P"));
  PredId sq = n.state_of(*w.find_pred("Q"));
  CHECK(nonempty(w, n, sp));
  CHECK(nonempty(w, n, sq));
  TermId a = w.constant("a");
  FunId f = *w.find_fun("f");
  CHECK(accepts(w, n, sp, a));
  CHECK(accepts(w, n, sq, w.app(f, {a})));
  CHECK(!accepts(w, n, sq, a));

  // A single fact set.
  World w2;
  auto cs2 = parse_clauses(w2, "fun a/0. pred P/1. P(a).\n");
  NormalSet n2 = normalize(w2, cs2);
  REQUIRE(n2.clauses.size() == 1);
  CHECK(nonempty(w2, n2, n2.state_of(*w2.find_pred("P"))));
}

TEST_CASE("unknown states are rejected") {
  World w;
  auto cs = parse_clauses(w, "fun a/0. pred P/1. P(a).\n");
  NormalSet n = normalize(w, cs);
  PredId stray = w.pred("stray", 1);
  CHECK_THROWS_AS(nonempty(w, n, stray), InternalError);
}

TEST_CASE("intersection semantics on sampled states") {
  World w;
  auto cs = parse_clauses(w, read_file(DATA_DIR "/sec71.cls"));
  NormalSet n = normalize(w, cs);
  PredId p = *w.find_pred("P"), q = *w.find_pred("Q");
  TermId a = w.constant("a"), b = w.constant("b");
  for (TermId t : {a, b}) {
    bool both = accepts(w, n, n.state_of(p), t) &&
                accepts(w, n, n.state_of(q), t);
    CHECK(accepts(w, n, n.state({p, q}), t) == both);
  }
}
