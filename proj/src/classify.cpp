#include "blindcopy/classify.hpp"

#include <algorithm>
#include <set>

#include "blindcopy/onevar.hpp"

namespace blindcopy {

const char* clause_class_name(ClauseClass c) {
  switch (c) {
    case ClauseClass::EpsilonBlock: return "eps-block";
    case ClauseClass::Ground: return "ground";
    case ClauseClass::Complex: return "complex";
    case ClauseClass::EpsilonClause: return "eps-clause";
    case ClauseClass::OneVariable: return "one-variable";
    case ClauseClass::CSecondForm: return "nested-context";
    case ClauseClass::Flat: return "flat";
    case ClauseClass::Other: return "other";
  }
  return "?";
}

bool lit_trivial(const World& w, LitId l) {
  for (TermId t : w.atom_args(lit_atom(l)))
    if (!w.is_var(t)) return false;
  return true;
}

bool is_onevar_clause(const World& w, const Clause& c) {
  return clause_fv(w, c).size() <= 1;
}

bool is_block(const World& w, const Clause& c) {
  if (!is_onevar_clause(w, c)) return false;
  for (LitId l : c)
    if (!lit_trivial(w, l)) return false;
  return true;
}

namespace {

// Non-trivial flat literal: unary P(f(x1..xn)) with all-variable arguments
// whose variable set equals `fv`.
bool flat_nontrivial_lit(World& w, LitId l, const std::vector<int>& fv) {
  AtomId a = lit_atom(l);
  auto args = w.atom_args(a);
  if (args.size() != 1 || w.is_var(args[0])) return false;
  std::vector<int> vars;
  for (TermId t : w.term_args(args[0])) {
    if (!w.is_var(t)) return false;
    vars.push_back(w.var_index(t));
  }
  std::sort(vars.begin(), vars.end());
  vars.erase(std::unique(vars.begin(), vars.end()), vars.end());
  return vars == fv;
}

bool flat_trivial_lit(World& w, LitId l) {
  AtomId a = lit_atom(l);
  auto args = w.atom_args(a);
  return args.size() == 1 && w.is_var(args[0]);
}

// Literal of the second class condition: P(u[f(x1..xn)]) with u a
// one-variable context and {x1..xn} = fv.
bool second_form_lit(World& w, LitId l, const std::vector<int>& fv) {
  AtomId a = lit_atom(l);
  auto args = w.atom_args(a);
  if (args.size() != 1) return false;
  TermId t = args[0];
  int hole = 1;
  for (int v : w.term_fv(t)) hole = std::max(hole, v + 1);
  for (TermId piece : subterms(w, t)) {
    if (w.is_var(piece)) continue;
    std::vector<int> vars;
    bool allvars = true;
    for (TermId x : w.term_args(piece)) {
      if (!w.is_var(x)) {
        allvars = false;
        break;
      }
      vars.push_back(w.var_index(x));
    }
    if (!allvars) continue;
    std::sort(vars.begin(), vars.end());
    vars.erase(std::unique(vars.begin(), vars.end()), vars.end());
    if (vars != fv) continue;
    TermId ctxterm = collapse(w, t, piece, hole);
    const auto& cfv = w.term_fv(ctxterm);
    if (cfv.size() == 1 && cfv[0] == hole && plug(w, ctxterm, piece) == t)
      return true;
  }
  return false;
}

}  // namespace

bool is_flat(World& w, const Clause& c) {
  std::vector<int> fv = clause_fv(w, c);
  for (LitId l : c)
    if (!flat_trivial_lit(w, l) && !flat_nontrivial_lit(w, l, fv))
      return false;
  return true;
}

bool is_complex(World& w, const Clause& c) {
  if (!is_flat(w, c)) return false;
  for (LitId l : c)
    if (!lit_trivial(w, l)) return true;
  return false;
}

ClauseClass classify(World& w, const Clause& c) {
  if (is_block(w, c)) return ClauseClass::EpsilonBlock;
  std::vector<int> fv = clause_fv(w, c);
  if (fv.empty()) return ClauseClass::Ground;
  if (is_flat(w, c)) {
    for (LitId l : c)
      if (!lit_trivial(w, l)) return ClauseClass::Complex;
    return ClauseClass::EpsilonClause;
  }
  if (fv.size() <= 1) return ClauseClass::OneVariable;
  bool second = true;
  for (LitId l : c) {
    if (!flat_trivial_lit(w, l) && !second_form_lit(w, l, fv)) {
      second = false;
      break;
    }
  }
  if (second) return ClauseClass::CSecondForm;
  return ClauseClass::Other;
}

std::vector<Clause> c_to_flat_onevar(World& w, const std::vector<Clause>& s) {
  std::vector<Clause> out;
  std::set<Clause> bridges;
  for (const Clause& c : s) {
    if (is_onevar_clause(w, c)) {
      out.push_back(c);
      continue;
    }
    std::vector<int> fv = clause_fv(w, c);
    Clause rewritten;
    for (LitId l : c) {
      if (flat_trivial_lit(w, l)) {
        rewritten.push_back(l);
        continue;
      }
      AtomId a = lit_atom(l);
      auto args = w.atom_args(a);
      if (args.size() == 1 && flat_nontrivial_lit(w, l, fv)) {
        rewritten.push_back(l);
        continue;
      }
      if (args.size() != 1 || !second_form_lit(w, l, fv))
        throw InputError("clause outside the flat/one-variable class; literal " +
                         w.show_lit(l) + " in: " + w.show_clause(c));
      // t = u[f(x...)] with a non-trivial context u: absorb u into the
      // predicate and keep the flat core.
      TermId t = args[0];
      int hole = 1;
      for (int v : w.term_fv(t)) hole = std::max(hole, v + 1);
      TermId piece = -1, ctxterm = -1;
      for (TermId cand : subterms(w, t)) {
        if (w.is_var(cand)) continue;
        std::vector<int> vars;
        bool allvars = true;
        for (TermId x : w.term_args(cand)) {
          if (!w.is_var(x)) {
            allvars = false;
            break;
          }
          vars.push_back(w.var_index(x));
        }
        if (!allvars) continue;
        std::sort(vars.begin(), vars.end());
        vars.erase(std::unique(vars.begin(), vars.end()), vars.end());
        if (vars != fv) continue;
        TermId u = collapse(w, t, cand, hole);
        const auto& cfv = w.term_fv(u);
        if (cfv.size() == 1 && cfv[0] == hole && plug(w, u, cand) == t) {
          piece = cand;
          ctxterm = u;
          break;
        }
      }
      BC_CHECK(piece >= 0, "second-form literal lost its witness");
      PredId p = w.atom_pred(a);
      PredId pu = w.pred_with_prefix(p, ctxterm);
      rewritten.push_back(make_lit(w.atom(pu, {piece}), lit_neg(l)));
      // Bridge clauses tie Pu(x) to P(u[x]).
      TermId x = w.var(1);
      AtomId inner = w.atom(pu, {x});
      AtomId outer = w.atom(p, {plug(w, ctxterm, x)});
      Clause b1{make_lit(inner, true), make_lit(outer, false)};
      Clause b2{make_lit(inner, false), make_lit(outer, true)};
      normalize_clause(b1);
      normalize_clause(b2);
      bridges.insert(b1);
      bridges.insert(b2);
    }
    normalize_clause(rewritten);
    out.push_back(std::move(rewritten));
  }
  out.insert(out.end(), bridges.begin(), bridges.end());
  return out;
}

std::vector<Clause> unarize(World& w, const std::vector<Clause>& s) {
  std::vector<Clause> out;
  for (const Clause& c : s) {
    Clause nc;
    for (LitId l : c) {
      AtomId a = lit_atom(l);
      auto args = w.atom_args(a);
      if (args.size() < 2) {
        nc.push_back(l);
        continue;
      }
      PredId p = w.atom_pred(a);
      FunId tup = w.fun("@tup" + std::to_string(args.size()),
                        static_cast<int>(args.size()));
      PredId pu = w.pred(w.pred_name(p) + "@u", 1);
      nc.push_back(make_lit(
          w.atom(pu, {w.app(tup, std::vector<TermId>(args.begin(), args.end()))}),
          lit_neg(l)));
    }
    normalize_clause(nc);
    out.push_back(std::move(nc));
  }
  return out;
}

std::vector<std::vector<Clause>> preprocess_onevar(World& w,
                                                   const std::vector<Clause>& s,
                                                   const PreprocessOptions& opt) {
  std::vector<Clause> flat;
  std::set<Clause> bridges;
  for (const Clause& c : s) {
    if (!is_onevar_clause(w, c))
      throw InputError("not a one-variable clause: " + w.show_clause(c));
    Clause nc;
    for (LitId l : c) {
      AtomId a = lit_atom(l);
      if (w.atom_args(a).size() != 1)
        throw InputError("preprocessing requires unary predicates; literal " +
                         w.show_lit(l));
      TermId t = w.atom_arg(a);
      if (w.ground(t)) {
        nc.push_back(l);
        continue;
      }
      int var = w.term_fv(t)[0];
      std::vector<TermId> parts = decompose(w, t);
      if (parts.size() < 2) {
        nc.push_back(l);
        continue;
      }
      PredId p = w.atom_pred(a);
      // Absorb all but the innermost part into the predicate name and add
      // the equivalence chain.
      for (size_t i = 0; i + 1 < parts.size(); ++i) {
        TermId prefix_i = compose(w, std::span(parts.data(), i), var);
        TermId prefix_j = compose(w, std::span(parts.data(), i + 1), var);
        PredId pi = w.is_var(prefix_i) ? p : w.pred_with_prefix(p, prefix_i);
        PredId pj = w.pred_with_prefix(p, prefix_j);
        TermId x = w.var(1);
        AtomId up = w.atom(pi, {plug(w, parts[i], x)});
        AtomId down = w.atom(pj, {x});
        Clause b1{make_lit(up, false), make_lit(down, true)};
        Clause b2{make_lit(up, true), make_lit(down, false)};
        normalize_clause(b1);
        normalize_clause(b2);
        bridges.insert(b1);
        bridges.insert(b2);
      }
      TermId whole_prefix =
          compose(w, std::span(parts.data(), parts.size() - 1), var);
      PredId pl = w.pred_with_prefix(p, whole_prefix);
      nc.push_back(make_lit(w.atom(pl, {parts.back()}), lit_neg(l)));
    }
    normalize_clause(nc);
    flat.push_back(std::move(nc));
  }
  flat.insert(flat.end(), bridges.begin(), bridges.end());

  // Split clauses mixing ground and non-ground literals into branch pairs.
  std::vector<std::vector<Clause>> branches{{}};
  for (const Clause& c : flat) {
    Clause grd, non;
    for (LitId l : c)
      (w.atom_ground(lit_atom(l)) ? grd : non).push_back(l);
    if (grd.empty() || non.empty()) {
      for (auto& b : branches) b.push_back(c);
      continue;
    }
    normalize_clause(grd);
    normalize_clause(non);
    std::vector<std::vector<Clause>> next;
    next.reserve(branches.size() * 2);
    for (auto& b : branches) {
      auto b1 = b, b2 = std::move(b);
      b1.push_back(grd);
      b2.push_back(non);
      next.push_back(std::move(b1));
      next.push_back(std::move(b2));
    }
    branches = std::move(next);
    if (branches.size() > opt.branch_cap)
      throw InputError("splitting produced more than " +
                       std::to_string(opt.branch_cap) + " branches");
  }
  return branches;
}

}  // namespace blindcopy
