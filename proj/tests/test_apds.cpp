#include <doctest.h>

#include <random>

#include "blindcopy/apds.hpp"
#include "blindcopy/classify.hpp"
#include "blindcopy/engine.hpp"
#include "blindcopy/text.hpp"
#include "testutil.hpp"

using namespace blindcopy;

TEST_CASE("bounded reachability fixpoint") {
  World w;
  auto cs = parse_clauses(w, "fun a/0. pred P/1. P(a).\n");
  Apds a = make_apds(w, cs);
  AtomId goal = parse_atom(w, "P(a)");
  CHECK(apds_reach_fixpoint(w, a, goal, 1) == Reach::Reachable);

  World w2;
  auto cs2 = parse_clauses(w2,
                           "fun a/0. fun s/1. pred P/1. pred Q/1.\n"
                           "P(a). Q(s(x1)) | -P(x1).\n");
  Apds a2 = make_apds(w2, cs2);
  CHECK(apds_reach_fixpoint(w2, a2, parse_atom(w2, "Q(s(a))"), 2) ==
        Reach::Reachable);

  // An unreachable goal stays unknown; the underlying fixpoint is closed
  // and the clause engine confirms unreachability.
  World w3;
  auto cs3 = parse_clauses(w3, "fun a/0. pred P/1. pred Q/1. P(a).\n");
  Apds a3 = make_apds(w3, cs3);
  AtomId goal3 = parse_atom(w3, "Q(a)");
  bool closed = false;
  CHECK(apds_reach_fixpoint(w3, a3, goal3, 4, &closed) == Reach::Unknown);
  CHECK(closed);
  CHECK(decide_c_horn(w3, apds_to_horn(w3, a3, goal3)) == Verdict::Sat);
}

TEST_CASE("shape validation") {
  World w;
  auto ok = parse_clauses(w, read_file(DATA_DIR "/apds_example.cls"));
  CHECK_NOTHROW(make_apds(w, ok));

  World w2;
  auto bad = parse_clauses(w2,
                           "fun f/2. pred P/1. pred Q/1.\n"
                           "P(f(x1,x2)) | -Q(x1).\n");
  CHECK_THROWS_AS(make_apds(w2, bad), InputError);
}

TEST_CASE("translation to clauses appends the goal") {
  World w;
  auto cs = parse_clauses(w, read_file(DATA_DIR "/apds_example.cls"));
  Apds a = make_apds(w, cs);
  AtomId goal = parse_atom(w, "R(a)");
  auto horn = apds_to_horn(w, a, goal);
  REQUIRE(horn.size() == cs.size() + 1);
  for (size_t i = 0; i < cs.size(); ++i) CHECK(horn[i] == cs[i]);
  CHECK(horn.back() == Clause{make_lit(goal, true)});
  for (const Clause& c : horn) {
    CHECK(is_onevar_clause(w, c));
    int pos = 0;
    for (LitId l : c)
      if (!lit_neg(l)) ++pos;
    CHECK(pos <= 1);
  }
}

TEST_CASE("translation to a protocol mirrors the clause shapes") {
  World w;
  auto cs = parse_clauses(w, read_file(DATA_DIR "/apds_example.cls"));
  Apds a = make_apds(w, cs);
  AtomId goal = parse_atom(w, "R(a)");
  auto [spec, secret] = apds_to_protocol(w, a, goal);
  REQUIRE(spec.rules.size() == 3);
  // Fact clause: receive nothing, send the encoded atom.
  CHECK(!spec.rules[0].recv.has_value());
  REQUIRE(spec.rules[0].send.has_value());
  FunId enc = *w.find_fun("enc"), pr = *w.find_fun("pair");
  TermId sent = *spec.rules[0].send;
  CHECK(w.term_fun(sent) == enc);
  CHECK(w.term_fun(w.term_args(sent)[0]) == pr);
  // Join clause: receive the pair of the two encoded premises.
  REQUIRE(spec.rules[2].recv.has_value());
  CHECK(w.term_fun(*spec.rules[2].recv) == pr);
  CHECK(secret == spec.secret);

  // The empty system leaks nothing.
  World w2;
  Apds none;
  w2.pred("P", 1);
  w2.fun("c", 0);
  auto [spec2, secret2] =
      apds_to_protocol(w2, none, w2.atom(*w2.find_pred("P"),
                                         {w2.constant("c")}));
  CHECK(check_secrecy(w2, spec2, secret2) == Secrecy::Secret);
}

namespace {

std::vector<Clause> random_apds(World& w, std::mt19937& rng) {
  FunId a = w.fun("a", 0), s = w.fun("s", 1), t = w.fun("t", 1);
  PredId preds[3] = {w.pred("P", 1), w.pred("Q", 1), w.pred("R", 1)};
  std::uniform_int_distribution<int> n_clauses(2, 8);
  std::uniform_int_distribution<int> kind(0, 2);
  std::uniform_int_distribution<int> pk(0, 2);
  std::uniform_int_distribution<int> dep(0, 2);
  auto spine = [&](int d) {
    TermId out = w.var(1);
    for (int i = 0; i < d; ++i)
      out = w.app(rng() % 2 ? s : t, {out});
    return out;
  };
  std::vector<Clause> cs;
  int n = n_clauses(rng);
  for (int i = 0; i < n; ++i) {
    Clause c;
    switch (kind(rng)) {
      case 0:
        c.push_back(make_lit(w.atom(preds[pk(rng)], {w.app(a, {})}), false));
        break;
      case 1:
        c.push_back(make_lit(w.atom(preds[pk(rng)], {spine(dep(rng))}), false));
        c.push_back(make_lit(w.atom(preds[pk(rng)], {spine(dep(rng))}), true));
        break;
      default:
        c.push_back(make_lit(w.atom(preds[pk(rng)], {w.var(1)}), false));
        c.push_back(make_lit(w.atom(preds[pk(rng)], {w.var(1)}), true));
        c.push_back(make_lit(w.atom(preds[pk(rng)], {w.var(1)}), true));
        break;
    }
    normalize_clause(c);
    if (c.size() == 1 && lit_neg(c[0])) continue;
    cs.push_back(std::move(c));
  }
  return cs;
}

}  // namespace

TEST_CASE("reachability triangle on a small random suite") {
  std::mt19937 rng(2468);
  int checked = 0;
  for (int round = 0; round < 40; ++round) {
    World w;
    auto cs = random_apds(w, rng);
    Apds a;
    try {
      a = make_apds(w, cs);
    } catch (const InputError&) {
      continue;  // deduplication can merge literals out of shape
    }
    AtomId goal = w.atom(*w.find_pred("R"),
                         {w.app(*w.find_fun("s"), {w.constant("a")})});
    bool closed = false;
    Reach r = apds_reach_fixpoint(w, a, goal, 4, &closed);
    if (r != Reach::Reachable && !closed) continue;
    bool reachable = (r == Reach::Reachable);
    ++checked;
    Verdict horn = decide_c_horn(w, apds_to_horn(w, a, goal));
    CAPTURE(round);
    CHECK(horn == (reachable ? Verdict::Unsat : Verdict::Sat));
  }
  CHECK(checked > 10);
}
