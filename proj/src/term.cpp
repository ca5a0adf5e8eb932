#include "blindcopy/term.hpp"

#include <algorithm>
#include <cassert>
#include <functional>
#include <map>
#include <sstream>

namespace blindcopy {

namespace {

uint64_t hash_combine(uint64_t h, uint64_t v) {
  h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  return h;
}

std::vector<int> merge_fv(const std::vector<const std::vector<int>*>& parts) {
  std::vector<int> out;
  for (const auto* p : parts) out.insert(out.end(), p->begin(), p->end());
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace

// ----- symbols -----

FunId World::fun(std::string_view name, int arity) {
  auto it = fun_index_.find(std::string(name));
  if (it != fun_index_.end()) {
    if (funs_[it->second].arity != arity)
      throw InputError("function '" + std::string(name) +
                       "' redeclared with different arity");
    return it->second;
  }
  FunId id = static_cast<FunId>(funs_.size());
  funs_.push_back({std::string(name), arity});
  fun_index_.emplace(std::string(name), id);
  max_arity_ = std::max(max_arity_, arity);
  return id;
}

std::optional<FunId> World::find_fun(std::string_view name) const {
  auto it = fun_index_.find(std::string(name));
  if (it == fun_index_.end()) return std::nullopt;
  return it->second;
}

PredId World::intern_pred(PredInfo info) {
  auto it = pred_index_.find(info.name);
  if (it != pred_index_.end()) {
    if (preds_[it->second].arity != info.arity)
      throw InputError("predicate '" + info.name +
                       "' redeclared with different arity");
    return it->second;
  }
  PredId id = static_cast<PredId>(preds_.size());
  pred_index_.emplace(info.name, id);
  preds_.push_back(std::move(info));
  return id;
}

PredId World::pred(std::string_view name, int arity) {
  PredInfo info;
  info.name = std::string(name);
  info.arity = arity;
  return intern_pred(std::move(info));
}

std::optional<PredId> World::find_pred(std::string_view name) const {
  auto it = pred_index_.find(std::string(name));
  if (it == pred_index_.end()) return std::nullopt;
  return it->second;
}

PredId World::pred_with_prefix(PredId base, TermId prefix) {
  BC_CHECK(!ground(prefix) && term_fv(prefix).size() == 1,
           "predicate prefix must be a one-variable term");
  // Canonical variable keeps names invariant under renaming.
  Subst ren;
  ren.bind(term_fv(prefix)[0], var(max_arity() + 1));
  TermId canon = ren.apply(*this, prefix);
  if (is_var(canon)) return base;
  PredInfo info;
  info.name = preds_[base].name + "@" + show(canon);
  info.arity = 1;
  info.kind = PredKind::Prefixed;
  info.base = base;
  info.prefix = canon;
  return intern_pred(std::move(info));
}

PredId World::pred_for_literal(LitId lit) {
  PredInfo info;
  info.name = "<" + show_lit(lit) + ">";
  info.arity = 0;
  info.kind = PredKind::LiteralName;
  info.lit = lit;
  return intern_pred(std::move(info));
}

PredId World::pred_for_block(const Clause& block) {
  Clause canon = canon_clause(*this, block);
  PredInfo info;
  info.name = "<" + show_clause(canon) + ">";
  info.arity = 0;
  info.kind = PredKind::BlockName;
  info.block = static_cast<int>(blocks_.size());
  PredId id = intern_pred(std::move(info));
  if (preds_[id].block == static_cast<int>(blocks_.size()))
    blocks_.push_back(std::move(canon));
  return id;
}

// ----- terms -----

TermId World::var(int index) {
  BC_CHECK(index > 0, "variable indices start at 1");
  uint64_t h = hash_combine(0x517cc1b727220a95ULL, static_cast<uint64_t>(index));
  auto& bucket = term_buckets_[h];
  for (TermId t : bucket)
    if (terms_[t].fn == -index) return t;
  TermData d;
  d.fn = -index;
  d.fv = {index};
  d.depth = 0;
  d.size = 1;
  TermId id = static_cast<TermId>(terms_.size());
  terms_.push_back(std::move(d));
  bucket.push_back(id);
  return id;
}

TermId World::app(FunId f, std::span<const TermId> args) {
  BC_CHECK(static_cast<int>(args.size()) == funs_[f].arity,
           "arity mismatch for function " + funs_[f].name);
  uint64_t h = hash_combine(0xa0761d6478bd642fULL, static_cast<uint64_t>(f));
  for (TermId a : args) h = hash_combine(h, static_cast<uint64_t>(a));
  auto& bucket = term_buckets_[h];
  for (TermId t : bucket) {
    const TermData& d = terms_[t];
    if (d.fn != f || d.args.size() != args.size()) continue;
    if (std::equal(args.begin(), args.end(), d.args.begin())) return t;
  }
  TermData d;
  d.fn = f;
  d.args.assign(args.begin(), args.end());
  // Depth convention: variables and constants are depth 0.
  int depth = 0, size = 1;
  std::vector<const std::vector<int>*> fvs;
  for (TermId a : args) {
    depth = std::max(depth, terms_[a].depth + 1);
    size += terms_[a].size;
    fvs.push_back(&terms_[a].fv);
  }
  d.depth = depth;
  d.size = size;
  d.fv = merge_fv(fvs);
  TermId id = static_cast<TermId>(terms_.size());
  terms_.push_back(std::move(d));
  bucket.push_back(id);
  return id;
}

AtomId World::atom(PredId p, std::span<const TermId> args) {
  BC_CHECK(static_cast<int>(args.size()) == preds_[p].arity,
           "arity mismatch for predicate " + preds_[p].name);
  uint64_t h = hash_combine(0xe7037ed1a0b428dbULL, static_cast<uint64_t>(p));
  for (TermId a : args) h = hash_combine(h, static_cast<uint64_t>(a));
  auto& bucket = atom_buckets_[h];
  for (AtomId x : bucket) {
    const AtomData& d = atoms_[x];
    if (d.pred != p || d.args.size() != args.size()) continue;
    if (std::equal(args.begin(), args.end(), d.args.begin())) return x;
  }
  AtomData d;
  d.pred = p;
  d.args.assign(args.begin(), args.end());
  std::vector<const std::vector<int>*> fvs;
  for (TermId a : args) fvs.push_back(&terms_[a].fv);
  d.fv = merge_fv(fvs);
  AtomId id = static_cast<AtomId>(atoms_.size());
  atoms_.push_back(std::move(d));
  bucket.push_back(id);
  return id;
}

TermId World::atom_arg(AtomId a) const {
  BC_CHECK(atoms_[a].args.size() == 1, "atom is not unary");
  return atoms_[a].args[0];
}

// ----- printing -----

std::string World::show(TermId t) const {
  if (is_var(t)) return "x" + std::to_string(var_index(t));
  std::string out = fun_name(term_fun(t));
  auto args = term_args(t);
  if (!args.empty()) {
    out += "(";
    for (size_t i = 0; i < args.size(); ++i) {
      if (i) out += ",";
      out += show(args[i]);
    }
    out += ")";
  }
  return out;
}

std::string World::show_atom(AtomId a) const {
  std::string out = pred_name(atom_pred(a));
  auto args = atom_args(a);
  if (!args.empty()) {
    out += "(";
    for (size_t i = 0; i < args.size(); ++i) {
      if (i) out += ",";
      out += show(args[i]);
    }
    out += ")";
  }
  return out;
}

std::string World::show_lit(LitId l) const {
  return lit_neg(l) ? "-" + show_atom(lit_atom(l)) : show_atom(lit_atom(l));
}

std::string World::show_clause(const Clause& c) const {
  if (c.empty()) return "false";
  std::string out;
  for (size_t i = 0; i < c.size(); ++i) {
    if (i) out += " | ";
    out += show_lit(c[i]);
  }
  return out;
}

// ----- substitutions -----

void Subst::bind(int var, TermId t) {
  auto it = std::lower_bound(map_.begin(), map_.end(), var,
                             [](const auto& p, int v) { return p.first < v; });
  if (it != map_.end() && it->first == var) {
    it->second = t;
  } else {
    map_.insert(it, {var, t});
  }
}

std::optional<TermId> Subst::lookup(int var) const {
  auto it = std::lower_bound(map_.begin(), map_.end(), var,
                             [](const auto& p, int v) { return p.first < v; });
  if (it != map_.end() && it->first == var) return it->second;
  return std::nullopt;
}

TermId Subst::apply(World& w, TermId t) const {
  if (map_.empty() || w.ground(t)) return t;
  if (w.is_var(t)) {
    auto b = lookup(w.var_index(t));
    return b ? *b : t;
  }
  auto args = w.term_args(t);
  std::vector<TermId> out(args.begin(), args.end());
  bool changed = false;
  for (auto& a : out) {
    TermId n = apply(w, a);
    changed |= (n != a);
    a = n;
  }
  return changed ? w.app(w.term_fun(t), out) : t;
}

AtomId Subst::apply_atom(World& w, AtomId a) const {
  auto args = w.atom_args(a);
  std::vector<TermId> out(args.begin(), args.end());
  bool changed = false;
  for (auto& t : out) {
    TermId n = apply(w, t);
    changed |= (n != t);
    t = n;
  }
  return changed ? w.atom(w.atom_pred(a), out) : a;
}

LitId Subst::apply_lit(World& w, LitId l) const {
  return make_lit(apply_atom(w, lit_atom(l)), lit_neg(l));
}

Clause Subst::apply_clause(World& w, const Clause& c) const {
  Clause out;
  out.reserve(c.size());
  for (LitId l : c) out.push_back(apply_lit(w, l));
  normalize_clause(out);
  return out;
}

// ----- unification -----

namespace {

// Martelli-Montanari on a worklist of equations. Deterministic: equations
// are processed front to back; a variable binds to the other side, and when
// both sides are variables the higher index binds to the lower.
std::optional<Subst> solve(World& w, std::vector<std::pair<TermId, TermId>> eqs) {
  Subst sol;
  while (!eqs.empty()) {
    auto [s, t] = eqs.back();
    eqs.pop_back();
    s = sol.apply(w, s);
    t = sol.apply(w, t);
    if (s == t) continue;  // Delete
    bool sv = w.is_var(s), tv = w.is_var(t);
    if (sv && tv && w.var_index(s) < w.var_index(t)) {
      std::swap(s, t);  // the higher index binds to the lower
    } else if (!sv && tv) {
      std::swap(s, t);
      sv = true;
    }
    if (sv) {
      // Bind, with occurs check (Fail1).
      const auto& fv = w.term_fv(t);
      int vi = w.var_index(s);
      if (std::binary_search(fv.begin(), fv.end(), vi)) return std::nullopt;
      Subst one;
      one.bind(vi, t);
      // Compose into the solution so it stays fully applied.
      Subst next;
      for (auto [v, b] : sol.bindings()) next.bind(v, one.apply(w, b));
      next.bind(vi, t);
      sol = std::move(next);
      continue;
    }
    // Decomp / Fail2
    if (w.term_fun(s) != w.term_fun(t)) return std::nullopt;
    auto as = w.term_args(s), at = w.term_args(t);
    for (size_t i = as.size(); i-- > 0;) eqs.push_back({as[i], at[i]});
  }
  // Drop identity bindings (can arise from composing).
  Subst out;
  for (auto [v, b] : sol.bindings())
    if (!(w.is_var(b) && w.var_index(b) == v)) out.bind(v, b);
  return out;
}

}  // namespace

std::optional<Subst> mgu(World& w, TermId s, TermId t) {
  return solve(w, {{s, t}});
}

namespace {
bool match_into(World& w, TermId pattern, TermId target, Subst& out) {
  if (w.is_var(pattern)) {
    int v = w.var_index(pattern);
    auto bound = out.lookup(v);
    if (bound) return *bound == target;
    out.bind(v, target);
    return true;
  }
  if (w.is_var(target) || w.term_fun(pattern) != w.term_fun(target))
    return false;
  auto pa = w.term_args(pattern), ta = w.term_args(target);
  for (size_t i = 0; i < pa.size(); ++i)
    if (!match_into(w, pa[i], ta[i], out)) return false;
  return true;
}
}  // namespace

std::optional<Subst> match_term(World& w, TermId pattern, TermId target) {
  Subst out;
  if (!match_into(w, pattern, target, out)) return std::nullopt;
  return out;
}

std::optional<Subst> mgu_atoms(World& w, AtomId a, AtomId b) {
  if (w.atom_pred(a) != w.atom_pred(b)) return std::nullopt;
  auto as = w.atom_args(a), bs = w.atom_args(b);
  std::vector<std::pair<TermId, TermId>> eqs;
  for (size_t i = as.size(); i-- > 0;) eqs.push_back({as[i], bs[i]});
  return solve(w, std::move(eqs));
}

// ----- clause utilities -----

void normalize_clause(Clause& c) {
  std::sort(c.begin(), c.end());
  c.erase(std::unique(c.begin(), c.end()), c.end());
}

Clause clause_union(const Clause& a, const Clause& b) {
  Clause out;
  out.reserve(a.size() + b.size());
  std::set_union(a.begin(), a.end(), b.begin(), b.end(),
                 std::back_inserter(out));
  return out;
}

bool clause_has(const Clause& c, LitId l) {
  return std::binary_search(c.begin(), c.end(), l);
}

std::vector<int> clause_fv(const World& w, const Clause& c) {
  std::vector<int> out;
  for (LitId l : c) {
    const auto& fv = w.atom_fv(lit_atom(l));
    out.insert(out.end(), fv.begin(), fv.end());
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

bool clause_ground(const World& w, const Clause& c) {
  for (LitId l : c)
    if (!w.atom_ground(lit_atom(l))) return false;
  return true;
}

std::pair<Clause, Clause> rename_apart(World& w, const Clause& c1,
                                       const Clause& c2) {
  std::vector<int> fv1 = clause_fv(w, c1);
  std::vector<int> fv2 = clause_fv(w, c2);
  if (fv2.empty()) return {c1, c2};
  int base = fv1.empty() ? 0 : fv1.back();
  Subst ren;
  bool overlap = false;
  int next = base + 1;
  for (int v : fv2) {
    if (std::binary_search(fv1.begin(), fv1.end(), v)) overlap = true;
    ren.bind(v, w.var(next++));
  }
  if (!overlap) return {c1, c2};
  return {c1, ren.apply_clause(w, c2)};
}

Clause canon_clause(World& w, const Clause& c) {
  std::vector<int> fv = clause_fv(w, c);
  if (fv.empty()) return c;
  // Minimal literal sequence over all bijections fv -> {1..k}. Clause
  // variable counts here are bounded by the maximal arity plus one, so the
  // factorial blowup stays tiny; guard against pathological inputs anyway.
  BC_CHECK(fv.size() <= 8, "clause with too many variables to canonicalize");
  std::vector<int> perm(fv.size());
  for (size_t i = 0; i < perm.size(); ++i) perm[i] = static_cast<int>(i) + 1;
  std::optional<Clause> best;
  do {
    Subst ren;
    for (size_t i = 0; i < fv.size(); ++i) ren.bind(fv[i], w.var(perm[i]));
    Clause cand = ren.apply_clause(w, c);
    if (!best || cand < *best) best = std::move(cand);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return *best;
}

Clause clause_at_var(World& w, const Clause& c, int var) {
  std::vector<int> fv = clause_fv(w, c);
  if (fv.empty()) return c;
  BC_CHECK(fv.size() == 1, "clause_at_var requires a one-variable clause");
  if (fv[0] == var) return c;
  Subst ren;
  ren.bind(fv[0], w.var(var));
  return ren.apply_clause(w, c);
}

TermId collapse(World& w, TermId t, TermId piece, int var) {
  if (t == piece) return w.var(var);
  if (w.is_var(t)) return t;
  auto args = w.term_args(t);
  if (args.empty()) return t;
  std::vector<TermId> out(args.begin(), args.end());
  bool changed = false;
  for (auto& a : out) {
    TermId n = collapse(w, a, piece, var);
    changed |= (n != a);
    a = n;
  }
  return changed ? w.app(w.term_fun(t), out) : t;
}

TermId plug(World& w, TermId tmpl, TermId piece) {
  const auto& fv = w.term_fv(tmpl);
  if (fv.empty()) return tmpl;
  BC_CHECK(fv.size() == 1, "plug requires a one-variable template");
  Subst s;
  s.bind(fv[0], piece);
  return s.apply(w, tmpl);
}

namespace {
void collect_subterms(World& w, TermId t, std::vector<TermId>& out) {
  out.push_back(t);
  for (TermId a : w.term_args(t)) collect_subterms(w, a, out);
}
}  // namespace

std::vector<TermId> subterms(World& w, TermId t) {
  std::vector<TermId> out;
  collect_subterms(w, t, out);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<TermId> strict_subterms(World& w, TermId t) {
  std::vector<TermId> out;
  for (TermId a : w.term_args(t)) collect_subterms(w, a, out);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

bool is_strict_subterm(World& w, TermId sub, TermId t) {
  for (TermId a : w.term_args(t)) {
    if (a == sub || is_strict_subterm(w, sub, a)) return true;
  }
  return false;
}

}  // namespace blindcopy
