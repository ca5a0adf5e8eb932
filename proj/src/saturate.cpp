#include "blindcopy/saturate.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

#include "blindcopy/classify.hpp"
#include "blindcopy/onevar.hpp"
#include "blindcopy/prop.hpp"

namespace blindcopy {

const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::Sat: return "sat";
    case Verdict::Unsat: return "unsat";
    case Verdict::Unknown: return "unknown";
  }
  return "?";
}

bool atom_less(World& w, AtomId a, AtomId b) {
  bool sa = w.is_split_pred(w.atom_pred(a));
  bool sb = w.is_split_pred(w.atom_pred(b));
  if (sa || sb) return sa && !sb;
  if (w.atom_args(a).size() != 1 || w.atom_args(b).size() != 1) return false;
  return is_strict_subterm(w, w.atom_arg(a), w.atom_arg(b));
}

bool lit_maximal(World& w, const Clause& c, LitId l) {
  AtomId a = lit_atom(l);
  for (LitId o : c)
    if (atom_less(w, a, lit_atom(o))) return false;
  return true;
}

int DerivationLog::add(Clause c, std::string rule, std::vector<int> premises) {
  entries.push_back({std::move(c), std::move(rule), std::move(premises)});
  return static_cast<int>(entries.size()) - 1;
}

std::string DerivationLog::render(const World& w) const {
  std::ostringstream os;
  for (size_t i = 0; i < entries.size(); ++i) {
    const auto& e = entries[i];
    os << "[" << e.rule << "] #" << i << " " << w.show_clause(e.clause);
    if (!e.premises.empty()) {
      os << " <= ";
      for (size_t j = 0; j < e.premises.size(); ++j) {
        if (j) os << ", ";
        os << "#" << e.premises[j];
      }
    }
    os << "\n";
  }
  return os.str();
}

namespace {

bool has_negative_split(World& w, const Clause& c) {
  for (LitId l : c)
    if (lit_neg(l) && w.is_split_pred(w.atom_pred(lit_atom(l)))) return true;
  return false;
}

// Eligibility of literal `l` as the resolved-upon literal of its premise.
// Negative splitting literals are selected when present; otherwise ordered
// maximality wrt the split-extended ordering decides.
bool eligible(World& w, const Clause& c, LitId l) {
  bool split = w.is_split_pred(w.atom_pred(lit_atom(l)));
  if (has_negative_split(w, c)) return lit_neg(l) && split;
  if (split) {
    // Positive splitting literal: below all non-splitting atoms, so it is
    // maximal only in a clause of splitting literals alone.
    for (LitId o : c)
      if (!w.is_split_pred(w.atom_pred(lit_atom(o)))) return false;
    return true;
  }
  return lit_maximal(w, c, l);
}

void resolve_directed(World& w, const Clause& pos_side, const Clause& neg_side,
                      std::vector<Clause>& out) {
  for (LitId lp : pos_side) {
    if (lit_neg(lp)) continue;
    if (!eligible(w, pos_side, lp)) continue;
    for (LitId ln : neg_side) {
      if (!lit_neg(ln)) continue;
      if (w.atom_pred(lit_atom(ln)) != w.atom_pred(lit_atom(lp))) continue;
      if (!eligible(w, neg_side, ln)) continue;
      auto sigma = mgu_atoms(w, lit_atom(lp), lit_atom(ln));
      if (!sigma) continue;
      Clause res;
      for (LitId l : pos_side)
        if (l != lp) res.push_back(sigma->apply_lit(w, l));
      for (LitId l : neg_side)
        if (l != ln) res.push_back(sigma->apply_lit(w, l));
      normalize_clause(res);
      out.push_back(std::move(res));
    }
  }
}

}  // namespace

std::vector<Clause> resolve_ordered(World& w, const Clause& c1,
                                    const Clause& c2) {
  auto [a, b] = rename_apart(w, c1, c2);
  std::vector<Clause> out;
  resolve_directed(w, a, b, out);
  resolve_directed(w, b, a, out);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<Clause> factor_ordered(World& w, const Clause& c) {
  std::vector<Clause> out;
  for (size_t i = 0; i < c.size(); ++i) {
    for (size_t j = i + 1; j < c.size(); ++j) {
      if (lit_neg(c[i]) != lit_neg(c[j])) continue;
      if (!lit_maximal(w, c, c[i]) || !lit_maximal(w, c, c[j])) continue;
      auto sigma = mgu_atoms(w, lit_atom(c[i]), lit_atom(c[j]));
      if (!sigma) continue;
      Clause res;
      for (size_t k = 0; k < c.size(); ++k)
        if (k != j) res.push_back(sigma->apply_lit(w, c[k]));
      normalize_clause(res);
      out.push_back(std::move(res));
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

// ---------------------------------------------------------------------------
// One-variable decision procedure

namespace {

void check_closure(World& w, const InstantiationContext& ctx, const Clause& c) {
  for (LitId l : c) {
    AtomId a = lit_atom(l);
    BC_CHECK(w.atom_args(a).size() == 1,
             "one-variable engine expects unary atoms");
    TermId t = w.atom_arg(a);
    bool ok = w.ground(t) ? ctx.in_arg_ground(t) : ctx.in_onevar_args(t);
    BC_CHECK(ok, "closure violation: derived literal " + w.show_lit(l) +
                     " leaves the instantiation vocabulary");
  }
}

}  // namespace

Verdict decide_onevar(World& w, const std::vector<Clause>& branch,
                      const SaturateOptions& opt) {
  InstantiationContext ctx = build_context(w, branch);
  std::set<Clause> seen;
  std::vector<Clause> clauses;
  std::vector<int> entry_of;
  DerivationLog* log = opt.log;

  auto add = [&](const Clause& c, const std::string& rule,
                 std::vector<int> premises) -> bool {
    Clause canon = canon_clause(w, c);
    if (seen.count(canon)) return false;
    check_closure(w, ctx, canon);
    seen.insert(canon);
    clauses.push_back(canon);
    entry_of.push_back(log ? log->add(canon, rule, std::move(premises)) : -1);
    return canon.empty();
  };

  for (const Clause& c : branch)
    if (add(c, "input", {})) return Verdict::Unsat;

  size_t steps = 0;
  for (size_t i = 0; i < clauses.size(); ++i) {
    if (past_deadline(opt.deadline)) return Verdict::Unknown;
    for (const Clause& f : factor_ordered(w, clauses[i])) {
      if (++steps > opt.step_cap) return Verdict::Unknown;
      if (add(f, "factor", {entry_of[i]})) return Verdict::Unsat;
    }
    for (size_t j = 0; j <= i; ++j) {
      for (const Clause& r : resolve_ordered(w, clauses[i], clauses[j])) {
        if (++steps > opt.step_cap) return Verdict::Unknown;
        if (add(r, "resolve", {entry_of[i], entry_of[j]}))
          return Verdict::Unsat;
      }
      if (clauses.size() > opt.clause_cap) return Verdict::Unknown;
    }
  }
  return Verdict::Sat;
}

// ---------------------------------------------------------------------------
// Ground saturation oracle

std::vector<TermId> ground_universe(World& w, int depth, size_t cap,
                                    bool* truncated) {
  std::vector<TermId> terms;
  for (int d = 0; d <= depth; ++d) {
    size_t before = terms.size();
    for (FunId f = 0; f < w.fun_count(); ++f) {
      int n = w.fun_arity(f);
      if (n == 0) {
        if (d == 0) terms.push_back(w.app(f, {}));
        continue;
      }
      if (d == 0) continue;
      // All argument tuples over the current universe with max depth d-1.
      std::vector<size_t> idx(n, 0);
      while (true) {
        bool hit = false;
        for (int i = 0; i < n; ++i)
          if (w.term_depth(terms[idx[i]]) == d - 1) hit = true;
        if (hit) {
          std::vector<TermId> args;
          for (int i = 0; i < n; ++i) args.push_back(terms[idx[i]]);
          terms.push_back(w.app(f, args));
          if (terms.size() > cap) {
            if (truncated) *truncated = true;
            std::sort(terms.begin(), terms.end());
            terms.erase(std::unique(terms.begin(), terms.end()), terms.end());
            return terms;
          }
        }
        int pos = n - 1;
        while (pos >= 0 && idx[pos] + 1 == before) idx[pos--] = 0;
        if (pos < 0) break;
        ++idx[pos];
      }
    }
    std::sort(terms.begin(), terms.end());
    terms.erase(std::unique(terms.begin(), terms.end()), terms.end());
    if (terms.size() == before && d > 0) break;  // nothing new at this depth
  }
  return terms;
}

namespace {

// Enumerate substitutions over `pool` (plus an out-of-universe marker when
// `with_out`) for the clause's variables, calling `fn` for each.
void for_each_subst(World& w, const std::vector<int>& fv,
                    const std::vector<TermId>& pool, bool with_out,
                    const std::function<void(const std::vector<TermId>&)>& fn) {
  size_t options = pool.size() + (with_out ? 1 : 0);
  std::vector<size_t> idx(fv.size(), 0);
  if (fv.empty()) {
    fn({});
    return;
  }
  while (true) {
    std::vector<TermId> choice(fv.size());
    for (size_t i = 0; i < fv.size(); ++i)
      choice[i] = idx[i] < pool.size() ? pool[idx[i]] : kNoTerm;
    fn(choice);
    size_t pos = fv.size() - 1;
    while (true) {
      if (++idx[pos] < options) break;
      idx[pos] = 0;
      if (pos == 0) return;
      --pos;
    }
  }
}

}  // namespace

Verdict ground_saturation_oracle(World& w, const std::vector<Clause>& s,
                                 int depth, const OracleOptions& opt) {
  bool truncated = false;
  std::vector<TermId> universe = ground_universe(w, depth, opt.term_cap, &truncated);
  if (universe.empty()) return Verdict::Unknown;

  PropInstance inst;
  size_t instances = 0;
  bool overflow = false;
  for (const Clause& c : s) {
    std::vector<int> fv = clause_fv(w, c);
    for_each_subst(w, fv, universe, /*with_out=*/false,
                   [&](const std::vector<TermId>& choice) {
                     if (overflow) return;
                     Subst sigma;
                     for (size_t i = 0; i < fv.size(); ++i)
                       sigma.bind(fv[i], choice[i]);
                     Clause inst_clause = sigma.apply_clause(w, c);
                     // Keep the assigned-atom universe depth-closed.
                     for (LitId l : inst_clause)
                       for (TermId t : w.atom_args(lit_atom(l)))
                         if (w.term_depth(t) > depth) return;
                     if (++instances > opt.instance_cap) {
                       overflow = true;
                       return;
                     }
                     inst.add_clause(w, inst_clause);
                   });
  }

  std::vector<bool> model;
  if (inst.horn()) {
    std::vector<int> reasons;
    if (horn_sat(inst, &reasons) == SatResult::Unsat) return Verdict::Unsat;
    // The least model: exactly the derived propositions.
    model.assign(inst.prop_count(), false);
    for (int i = 0; i < inst.prop_count(); ++i)
      model[i] = reasons[i] >= 0;
  } else {
    if (sat(inst, &model) == SatResult::Unsat) return Verdict::Unsat;
  }
  if (overflow || truncated || !opt.model_check) return Verdict::Unknown;

  // Verify the model extends to a Herbrand model when every atom outside
  // the instantiated universe reads false. A substitution slot may take the
  // out-of-universe marker; any atom touching it, or producing an argument
  // deeper than the bound, evaluates to false.
  for (const Clause& c : s) {
    std::vector<int> fv = clause_fv(w, c);
    bool failed = false;
    for_each_subst(w, fv, universe, /*with_out=*/true,
                   [&](const std::vector<TermId>& choice) {
                     if (failed) return;
                     Subst sigma;
                     for (size_t i = 0; i < fv.size(); ++i)
                       if (choice[i] != kNoTerm) sigma.bind(fv[i], choice[i]);
                     bool clause_true = false;
                     for (LitId l : c) {
                       AtomId a = lit_atom(l);
                       bool out = false;
                       for (int v : w.atom_fv(a))
                         for (size_t i = 0; i < fv.size(); ++i)
                           if (fv[i] == v && choice[i] == kNoTerm) out = true;
                       bool val = false;
                       if (!out) {
                         AtomId ai = sigma.apply_atom(w, a);
                         for (TermId t : w.atom_args(ai))
                           if (w.term_depth(t) > depth) out = true;
                         if (!out) {
                           auto p = inst.find(ai);
                           val = p && model[*p];
                         }
                       }
                       if (val != lit_neg(l)) {
                         clause_true = true;
                         break;
                       }
                     }
                     if (!clause_true) failed = true;
                   });
    if (failed) return Verdict::Unknown;
  }
  return Verdict::Sat;
}

}  // namespace blindcopy
