#include <doctest.h>

#include "blindcopy/context.hpp"
#include "blindcopy/onevar.hpp"
#include "blindcopy/text.hpp"
#include "testutil.hpp"

using namespace blindcopy;

TEST_CASE("context sets for a one-clause set") {
  World w;
  auto cs = parse_clauses(w,
                          "fun f/2. fun g/1. fun a/0. pred P/1.\n"
                          "P(f(g(x1),a)) | -P(x1).\n");
  InstantiationContext ctx = build_context(w, cs);
  CHECK(ctx.r == 2);
  CHECK(ctx.cv == 3);

  TermId x = w.var(3);
  TermId a = w.constant("a");
  FunId f = *w.find_fun("f"), g = *w.find_fun("g");
  TermId gx = w.app(g, {x});
  TermId fga = w.app(f, {gx, a});

  CHECK(ctx.onevar_args == std::vector<TermId>({std::min(x, fga),
                                                std::max(x, fga)}));
  CHECK(std::count(ctx.ground_subterms.begin(), ctx.ground_subterms.end(),
                   a) == 1);

  // Reduced units: the trivial term, the outer shell f(x,a), and g(x).
  // f(g(x),a) itself factors and is not reduced.
  TermId fxa = w.app(f, {x, a});
  std::vector<TermId> expect{x, fxa, gx};
  std::sort(expect.begin(), expect.end());
  CHECK(ctx.reduced_units == expect);

  // Prefix compositions include the full argument again.
  CHECK(ctx.in_prefixes(fga));
  CHECK(ctx.in_prefixes(gx));
  CHECK(ctx.in_prefixes(fxa));
  CHECK(ctx.in_prefixes(w.var(9)));  // trivial, modulo renaming

  // Fold rules exist for P at every non-trivial prefix.
  CHECK(ctx.fold_rules.size() == 3);
  CHECK(ctx.fold_clauses.size() == 6);

  // Invariants: every reduced unit passes is_reduced; the trivial term is
  // everywhere; G sits inside the plugged prefixes.
  for (TermId t : ctx.reduced_units)
    if (!w.is_var(t)) CHECK(is_reduced(w, t));
  CHECK(ctx.in_onevar_args(w.var(1)));
  for (TermId t : ctx.ground_subterms) CHECK(ctx.in_prefix_ground(t));
}

TEST_CASE("context of a ground-only set is trivial") {
  World w;
  auto cs = parse_clauses(w, "fun a/0. pred P/1. P(a).\n");
  InstantiationContext ctx = build_context(w, cs);
  CHECK(ctx.onevar_args == std::vector<TermId>{ctx.canon_var()});
  CHECK(ctx.onevar_subterms == std::vector<TermId>{ctx.canon_var()});
}

TEST_CASE("flat patterns enumerate variable tuples") {
  World w;
  w.fun("f", 2);
  InstantiationContext ctx;
  ctx.w = &w;
  ctx.r = 2;
  ctx.cv = 3;
  auto pats = ctx.flat_patterns();
  CHECK(pats.size() == 4);  // f(x1,x1), f(x1,x2), f(x2,x1), f(x2,x2)
}

TEST_CASE("shuffle memberships") {
  World w;
  auto cs = parse_clauses(w,
                          "fun f/2. fun g/1. fun a/0. fun b/0. pred P/1.\n"
                          "P(f(g(x1),x1)) | -P(b).\n");
  InstantiationContext ctx = build_context(w, cs);
  FunId f = *w.find_fun("f"), g = *w.find_fun("g");
  TermId x = ctx.canon_var();
  TermId gx = w.app(g, {x});

  // f(g(x),x) is reduced, so argument shuffles include f(x,g(x)).
  CHECK(ctx.in_arg_shuffles(w.app(f, {gx, x})));
  CHECK(ctx.in_arg_shuffles(w.app(f, {x, gx})));
  CHECK(ctx.in_arg_shuffles(w.var(1)));
  CHECK(!ctx.in_arg_shuffles(w.app(f, {x, x})));

  // Ground shuffles reorder ground argument sets.
  TermId b = w.constant("b");
  CHECK(ctx.in_ground_shuffles(b));
  bool trunc = false;
  auto shuffles = ctx.arg_shuffles(1000, &trunc);
  CHECK(!trunc);
  CHECK(std::count(shuffles.begin(), shuffles.end(), w.app(f, {x, gx})) == 1);
}
