#include "blindcopy/context.hpp"

#include <algorithm>
#include <set>

#include "blindcopy/onevar.hpp"

namespace blindcopy {

namespace {

void sort_unique(std::vector<TermId>& v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
}

bool contains(const std::vector<TermId>& v, TermId t) {
  return std::binary_search(v.begin(), v.end(), t);
}

// Tuples over `pool` of length n whose element set is exactly `pool`.
void onto_tuples(const std::vector<TermId>& pool, int n,
                 std::vector<TermId>& cur,
                 std::vector<std::vector<TermId>>& out) {
  if (static_cast<int>(cur.size()) == n) {
    for (TermId p : pool)
      if (std::find(cur.begin(), cur.end(), p) == cur.end()) return;
    out.push_back(cur);
    return;
  }
  for (TermId p : pool) {
    cur.push_back(p);
    onto_tuples(pool, n, cur, out);
    cur.pop_back();
  }
}

}  // namespace

TermId InstantiationContext::at_canon(TermId t) const {
  const auto& fv = w->term_fv(t);
  if (fv.empty()) return t;
  BC_CHECK(fv.size() == 1, "expected a one-variable term");
  if (fv[0] == cv) return t;
  Subst ren;
  ren.bind(fv[0], w->var(cv));
  return ren.apply(*w, t);
}

bool InstantiationContext::in_onevar_args(TermId t) const {
  if (w->ground(t) || w->term_fv(t).size() > 1) return false;
  return contains(onevar_args, at_canon(t));
}

bool InstantiationContext::in_subterm_ground(TermId t) const {
  if (!w->ground(t)) return false;
  return in_plugged_set(*w, t, onevar_subterms, ground_subterms);
}

bool InstantiationContext::in_arg_ground(TermId t) const {
  if (!w->ground(t)) return false;
  for (TermId u : onevar_args) {
    if (w->is_var(u)) {
      if (in_subterm_ground(t)) return true;
      continue;
    }
    auto v = match_onevar(*w, u, t);
    if (v && in_subterm_ground(*v)) return true;
  }
  return false;
}

bool InstantiationContext::in_prefixes(TermId t) const {
  if (w->ground(t) || w->term_fv(t).size() > 1) return false;
  return contains(part_prefixes, at_canon(t));
}

bool InstantiationContext::in_arg_shuffles(TermId t) const {
  if (w->is_var(t)) return true;  // the trivial member, modulo renaming
  if (w->ground(t) || w->term_fv(t).size() > 1) return false;
  t = at_canon(t);
  auto args = w->term_args(t);
  std::vector<TermId> argset(args.begin(), args.end());
  sort_unique(argset);
  for (const auto& s : reduced_argsets_)
    if (s == argset) return true;
  return false;
}

bool InstantiationContext::in_ground_shuffles(TermId t) const {
  if (!w->ground(t)) return false;
  auto args = w->term_args(t);
  std::vector<TermId> argset(args.begin(), args.end());
  sort_unique(argset);
  for (const auto& s : ground_argsets_)
    if (s == argset) return true;
  return false;
}

bool InstantiationContext::in_prefix_ground(TermId t) const {
  if (!w->ground(t)) return false;
  for (TermId v : part_prefixes) {
    if (w->is_var(v)) {
      if (in_ground_shuffles(t)) return true;
      continue;
    }
    auto g = match_onevar(*w, v, t);
    if (g && in_ground_shuffles(*g)) return true;
  }
  return false;
}

bool InstantiationContext::in_shuffle_ground(TermId t) const {
  if (!w->ground(t)) return false;
  auto memo = shuffle_ground_memo_.find(t);
  if (memo != shuffle_ground_memo_.end()) return memo->second;
  shuffle_ground_memo_[t] = false;  // cut accidental cycles
  bool ok = in_prefix_ground(t);   // via the trivial shuffle member
  if (!ok && !w->is_var(t)) {
    auto args = w->term_args(t);
    int n = static_cast<int>(args.size());
    // t = u[g] for a non-trivial shuffle u = f(s1..sn): each argument a_i is
    // s_i[g] for a shared ground g, with {s1..sn} one of the reduced
    // argument sets.
    for (const auto& pool : reduced_argsets_) {
      if (ok) break;
      if (static_cast<int>(pool.size()) > n) continue;
      std::vector<std::vector<TermId>> tuples;
      std::vector<TermId> cur;
      onto_tuples(pool, n, cur, tuples);
      for (const auto& tup : tuples) {
        std::optional<TermId> g;
        bool fits = true;
        for (int i = 0; i < n && fits; ++i) {
          if (w->ground(tup[i])) {
            fits = (tup[i] == args[i]);
          } else {
            auto b = match_onevar(*w, tup[i], args[i]);
            if (!b || (g && *g != *b))
              fits = false;
            else
              g = b;
          }
        }
        if (fits && g && in_prefix_ground(*g)) {
          ok = true;
          break;
        }
      }
    }
  }
  shuffle_ground_memo_[t] = ok;
  return ok;
}

std::vector<TermId> InstantiationContext::flat_patterns() const {
  std::vector<TermId> out;
  for (FunId f = 0; f < w->fun_count(); ++f) {
    int n = w->fun_arity(f);
    std::vector<int> idx(n, 1);
    while (true) {
      std::vector<TermId> args;
      for (int i : idx) args.push_back(w->var(i));
      out.push_back(w->app(f, args));
      int pos = n - 1;
      while (pos >= 0 && idx[pos] == r) idx[pos--] = 1;
      if (pos < 0) break;
      ++idx[pos];
    }
  }
  sort_unique(out);
  return out;
}

std::vector<TermId> InstantiationContext::arg_shuffles(size_t cap,
                                                       bool* truncated) const {
  std::vector<TermId> out{canon_var()};
  for (const auto& pool : reduced_argsets_) {
    for (FunId f = 0; f < w->fun_count(); ++f) {
      int n = w->fun_arity(f);
      if (n < static_cast<int>(pool.size()) || n == 0) continue;
      std::vector<std::vector<TermId>> tuples;
      std::vector<TermId> cur;
      onto_tuples(pool, n, cur, tuples);
      for (const auto& tup : tuples) {
        out.push_back(w->app(f, tup));
        if (out.size() > cap) {
          if (truncated) *truncated = true;
          sort_unique(out);
          return out;
        }
      }
    }
  }
  sort_unique(out);
  return out;
}

std::vector<TermId> InstantiationContext::ground_shuffles(
    size_t cap, bool* truncated) const {
  std::vector<TermId> out;
  for (const auto& pool : ground_argsets_) {
    for (FunId f = 0; f < w->fun_count(); ++f) {
      int n = w->fun_arity(f);
      if (n < static_cast<int>(pool.size())) continue;
      std::vector<std::vector<TermId>> tuples;
      std::vector<TermId> cur;
      onto_tuples(pool, n, cur, tuples);
      for (const auto& tup : tuples) {
        out.push_back(w->app(f, tup));
        if (out.size() > cap) {
          if (truncated) *truncated = true;
          sort_unique(out);
          return out;
        }
      }
    }
  }
  sort_unique(out);
  return out;
}

std::vector<TermId> InstantiationContext::plugged(std::span<const TermId> us,
                                                  std::span<const TermId> vs,
                                                  size_t cap,
                                                  bool* truncated) const {
  std::vector<TermId> out;
  for (TermId u : us) {
    for (TermId v : vs) {
      out.push_back(w->ground(u) ? u : plug(*w, u, v));
      if (out.size() > cap) {
        if (truncated) *truncated = true;
        sort_unique(out);
        return out;
      }
    }
  }
  sort_unique(out);
  return out;
}

PredId InstantiationContext::prefixed_pred(PredId p, TermId prefix) const {
  if (w->is_var(prefix)) return p;
  return w->pred_with_prefix(p, prefix);
}

InstantiationContext build_context(World& w, const std::vector<Clause>& s) {
  InstantiationContext ctx;
  ctx.w = &w;
  ctx.r = w.max_arity();
  ctx.cv = ctx.r + 1;

  std::set<PredId> preds;
  std::vector<TermId> ground_sub;
  for (const Clause& c : s) {
    std::vector<int> fv = clause_fv(w, c);
    for (LitId l : c) {
      AtomId a = lit_atom(l);
      preds.insert(w.atom_pred(a));
      for (TermId t : w.atom_args(a)) {
        for (TermId sub : subterms(w, t))
          if (w.ground(sub)) ground_sub.push_back(sub);
        if (!w.ground(t) && fv.size() == 1) {
          ctx.onevar_args.push_back(ctx.at_canon(t));
        }
      }
    }
  }
  ctx.base_preds.assign(preds.begin(), preds.end());
  ctx.onevar_args.push_back(ctx.canon_var());
  sort_unique(ctx.onevar_args);
  sort_unique(ground_sub);
  ctx.ground_subterms = std::move(ground_sub);

  for (TermId t : ctx.onevar_args)
    for (TermId sub : subterms(w, t))
      if (!w.ground(sub)) ctx.onevar_subterms.push_back(ctx.at_canon(sub));
  sort_unique(ctx.onevar_subterms);

  // Reduced units: outermost decomposition part of every subterm; prefix
  // compositions: every prefix of every decomposition.
  ctx.reduced_units.push_back(ctx.canon_var());
  ctx.part_prefixes.push_back(ctx.canon_var());
  for (TermId t : ctx.onevar_subterms) {
    if (w.is_var(t)) continue;
    std::vector<TermId> parts = decompose(w, t);
    if (!parts.empty()) ctx.reduced_units.push_back(ctx.at_canon(parts[0]));
    for (size_t m = 1; m <= parts.size(); ++m) {
      TermId pref = compose(w, std::span(parts.data(), m), ctx.cv);
      ctx.part_prefixes.push_back(ctx.at_canon(pref));
    }
  }
  sort_unique(ctx.reduced_units);
  sort_unique(ctx.part_prefixes);

  // Fold rules: one per base predicate and non-trivial prefix composition.
  for (PredId p : ctx.base_preds) {
    if (w.pred_arity(p) != 1) continue;
    for (TermId pref : ctx.part_prefixes) {
      if (w.is_var(pref)) continue;
      std::vector<TermId> parts = decompose(w, pref);
      TermId butlast =
          compose(w, std::span(parts.data(), parts.size() - 1), ctx.cv);
      FoldRule rule;
      rule.from = ctx.prefixed_pred(p, butlast);
      rule.part = ctx.at_canon(parts.back());
      rule.to = ctx.prefixed_pred(p, pref);
      TermId lhs_arg = plug(w, rule.part, ctx.canon_var());
      AtomId lhs = w.atom(rule.from, {lhs_arg});
      AtomId rhs = w.atom(rule.to, {ctx.canon_var()});
      Clause c1{make_lit(lhs, false), make_lit(rhs, true)};
      Clause c2{make_lit(lhs, true), make_lit(rhs, false)};
      normalize_clause(c1);
      normalize_clause(c2);
      ctx.fold_clauses.push_back(std::move(c1));
      ctx.fold_clauses.push_back(std::move(c2));
      ctx.fold_rules.push_back(rule);
    }
  }

  for (TermId u : ctx.reduced_units) {
    if (w.is_var(u)) continue;
    auto args = w.term_args(u);
    std::vector<TermId> argset(args.begin(), args.end());
    sort_unique(argset);
    ctx.reduced_argsets_.push_back(std::move(argset));
  }
  {
    std::sort(ctx.reduced_argsets_.begin(), ctx.reduced_argsets_.end());
    ctx.reduced_argsets_.erase(
        std::unique(ctx.reduced_argsets_.begin(), ctx.reduced_argsets_.end()),
        ctx.reduced_argsets_.end());
  }
  for (TermId g : ctx.ground_subterms) {
    auto args = w.term_args(g);
    std::vector<TermId> argset(args.begin(), args.end());
    sort_unique(argset);
    ctx.ground_argsets_.push_back(std::move(argset));
  }
  {
    std::sort(ctx.ground_argsets_.begin(), ctx.ground_argsets_.end());
    ctx.ground_argsets_.erase(
        std::unique(ctx.ground_argsets_.begin(), ctx.ground_argsets_.end()),
        ctx.ground_argsets_.end());
  }
  return ctx;
}

}  // namespace blindcopy
