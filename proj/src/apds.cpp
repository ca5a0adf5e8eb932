#include "blindcopy/apds.hpp"

#include <algorithm>
#include <map>
#include <queue>
#include <set>

#include "blindcopy/classify.hpp"
#include "blindcopy/onevar.hpp"

namespace blindcopy {

namespace {

bool unary_spine(World& w, TermId t) {
  while (!w.is_var(t)) {
    auto args = w.term_args(t);
    if (args.size() != 1) return false;
    t = args[0];
  }
  return true;
}

bool shape_fact(World& w, const Clause& c) {
  if (c.size() != 1 || lit_neg(c[0])) return false;
  AtomId a = lit_atom(c[0]);
  if (w.atom_args(a).size() != 1) return false;
  TermId t = w.atom_arg(a);
  return !w.is_var(t) && w.term_args(t).empty();
}

bool shape_step(World& w, const Clause& c) {
  if (c.size() != 2) return false;
  LitId pos = -1, neg = -1;
  for (LitId l : c) (lit_neg(l) ? neg : pos) = l;
  if (pos < 0 || neg < 0) return false;
  AtomId pa = lit_atom(pos), na = lit_atom(neg);
  if (w.atom_args(pa).size() != 1 || w.atom_args(na).size() != 1) return false;
  TermId s = w.atom_arg(pa), t = w.atom_arg(na);
  if (w.ground(s) || w.ground(t)) return false;
  if (w.term_fv(s) != w.term_fv(t)) return false;
  return unary_spine(w, s) && unary_spine(w, t);
}

bool shape_join(World& w, const Clause& c) {
  if (c.size() != 3) return false;
  int pos = 0;
  TermId var = kNoTerm;
  for (LitId l : c) {
    AtomId a = lit_atom(l);
    if (w.atom_args(a).size() != 1) return false;
    TermId t = w.atom_arg(a);
    if (!w.is_var(t)) return false;
    if (var == kNoTerm) var = t;
    if (t != var) return false;
    if (!lit_neg(l)) ++pos;
  }
  return pos == 1;
}

}  // namespace

Apds make_apds(World& w, const std::vector<Clause>& clauses) {
  Apds out;
  for (const Clause& c : clauses) {
    if (!shape_fact(w, c) && !shape_step(w, c) && !shape_join(w, c))
      throw InputError("clause fits none of the three system shapes: " +
                       w.show_clause(c));
    out.clauses.push_back(c);
  }
  return out;
}

Reach apds_reach_fixpoint(World& w, const Apds& a, AtomId goal, int depth,
                          bool* closed, const ReachOptions& opt) {
  BC_CHECK(w.atom_ground(goal), "reachability goal must be ground");
  std::set<AtomId> derived;
  bool clipped = false;
  std::vector<AtomId> queue;

  auto push = [&](AtomId atom) {
    if (w.term_depth(w.atom_arg(atom)) > depth) {
      clipped = true;
      return;
    }
    if (derived.size() >= opt.atom_cap) {
      clipped = true;
      return;
    }
    if (derived.insert(atom).second) queue.push_back(atom);
  };

  for (const Clause& c : a.clauses)
    if (shape_fact(w, c)) push(lit_atom(c[0]));

  while (!queue.empty()) {
    AtomId atom = queue.back();
    queue.pop_back();
    TermId arg = w.atom_arg(atom);
    for (const Clause& c : a.clauses) {
      if (shape_step(w, c)) {
        LitId pos = -1, neg = -1;
        for (LitId l : c) (lit_neg(l) ? neg : pos) = l;
        AtomId na = lit_atom(neg);
        if (w.atom_pred(na) != w.atom_pred(atom)) continue;
        auto sub = match_onevar(w, w.atom_arg(na), arg);
        if (!sub) continue;
        AtomId pa = lit_atom(pos);
        push(w.atom(w.atom_pred(pa), {plug(w, w.atom_arg(pa), *sub)}));
      } else if (shape_join(w, c)) {
        // P(x) | -P1(x) | -P2(x): fire when both premises hold of arg.
        PredId head = -1;
        std::vector<PredId> body;
        for (LitId l : c) {
          if (lit_neg(l))
            body.push_back(w.atom_pred(lit_atom(l)));
          else
            head = w.atom_pred(lit_atom(l));
        }
        bool all = true;
        for (PredId p : body)
          if (!derived.count(w.atom(p, {arg}))) all = false;
        if (all) push(w.atom(head, {arg}));
      }
    }
  }
  if (closed) *closed = !clipped;
  return derived.count(goal) ? Reach::Reachable : Reach::Unknown;
}

std::vector<Clause> apds_to_horn(World& w, const Apds& a, AtomId goal) {
  std::vector<Clause> out = a.clauses;
  out.push_back({make_lit(goal, true)});
  return out;
}

std::pair<ProtocolSpec, TermId> apds_to_protocol(World& w, const Apds& a,
                                                 AtomId goal) {
  ProtocolSpec spec;
  FunId enc = enc_fun(w);
  FunId pr = pair_fun(w);
  FunId s1 = w.fun("cpStart", 0);
  FunId s2 = w.fun("cpDone", 0);
  TermId key = w.app(w.fun("sysKey", 0), {});
  TermId from = w.app(s1, {});
  TermId to = w.app(s2, {});
  spec.init_states = {from, to};
  spec.cp_edges.push_back({s1, s2});

  std::map<PredId, TermId> pred_const;
  auto pconst = [&](PredId p) {
    auto it = pred_const.find(p);
    if (it != pred_const.end()) return it->second;
    TermId c = w.app(w.fun("predTag_" + w.pred_name(p), 0), {});
    pred_const.emplace(p, c);
    return c;
  };
  auto encode = [&](PredId p, TermId arg) {
    return w.app(enc, {w.app(pr, {pconst(p), arg}), key});
  };

  for (const Clause& c : a.clauses) {
    ProtocolRule rule;
    rule.from = from;
    rule.to = to;
    if (shape_fact(w, c)) {
      AtomId atom = lit_atom(c[0]);
      rule.send = encode(w.atom_pred(atom), w.atom_arg(atom));
    } else if (shape_step(w, c)) {
      LitId pos = -1, neg = -1;
      for (LitId l : c) (lit_neg(l) ? neg : pos) = l;
      AtomId pa = lit_atom(pos), na = lit_atom(neg);
      rule.recv = encode(w.atom_pred(na), w.atom_arg(na));
      rule.send = encode(w.atom_pred(pa), w.atom_arg(pa));
    } else {
      PredId head = -1;
      std::vector<AtomId> body;
      TermId var = kNoTerm;
      for (LitId l : c) {
        if (lit_neg(l))
          body.push_back(lit_atom(l));
        else {
          head = w.atom_pred(lit_atom(l));
          var = w.atom_arg(lit_atom(l));
        }
      }
      // The adversary pairs the two encoded premises himself.
      rule.recv = w.app(pr, {encode(w.atom_pred(body[0]), var),
                             encode(w.atom_pred(body[1]), var)});
      rule.send = encode(head, var);
    }
    spec.rules.push_back(rule);
  }
  TermId secret = encode(w.atom_pred(goal), w.atom_arg(goal));
  spec.secret = secret;
  return {spec, secret};
}

}  // namespace blindcopy
