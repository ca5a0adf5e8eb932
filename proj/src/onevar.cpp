#include "blindcopy/onevar.hpp"

#include <algorithm>

namespace blindcopy {

namespace {

void require_onevar(World& w, TermId t) {
  const auto& fv = w.term_fv(t);
  if (fv.empty()) throw InputError("term is ground: " + w.show(t));
  if (fv.size() > 1)
    throw InputError("term has more than one variable: " + w.show(t));
}

// Non-ground strict subterm values u of t such that every occurrence of the
// variable lies inside an occurrence of u. These form a chain under the
// subterm relation.
std::vector<TermId> factor_points(World& w, TermId t, int var) {
  std::vector<TermId> out;
  for (TermId u : strict_subterms(w, t)) {
    if (w.ground(u)) continue;
    if (plug(w, collapse(w, t, u, var), u) == t) out.push_back(u);
  }
  return out;
}

}  // namespace

bool is_reduced(World& w, TermId t) {
  require_onevar(w, t);
  if (w.is_var(t)) return true;
  int var = w.term_fv(t)[0];
  for (TermId u : factor_points(w, t, var))
    if (!w.is_var(u)) return false;
  return true;
}

std::vector<TermId> decompose(World& w, TermId t) {
  require_onevar(w, t);
  std::vector<TermId> parts;
  while (!w.is_var(t)) {
    int var = w.term_fv(t)[0];
    // The factorization point closest to the root is the largest one.
    TermId best = w.var(var);
    for (TermId u : factor_points(w, t, var))
      if (w.term_size(u) > w.term_size(best)) best = u;
    parts.push_back(collapse(w, t, best, var));
    t = best;
  }
  return parts;
}

TermId compose(World& w, std::span<const TermId> parts, int var) {
  TermId t = w.var(var);
  for (size_t i = parts.size(); i-- > 0;) t = plug(w, parts[i], t);
  return t;
}

UnifierShape unify_one_var(World& w, TermId s, TermId t) {
  require_onevar(w, s);
  require_onevar(w, t);
  BC_CHECK(!w.is_var(s) && !w.is_var(t), "inputs must be non-trivial");
  int x = w.term_fv(s)[0], y = w.term_fv(t)[0];
  BC_CHECK(x != y, "inputs must be over distinct variables");

  UnifierShape out;
  if (plug(w, t, w.var(x)) == s) {
    out.kind = UnifyShapeKind::Identical;
    out.sigma.bind(y, w.var(x));
    return out;
  }
  auto sigma = mgu(w, s, t);
  if (!sigma) {
    out.kind = UnifyShapeKind::Fail;
    return out;
  }
  out.sigma = *sigma;
  TermId xs = sigma->apply(w, w.var(x));
  TermId ys = sigma->apply(w, w.var(y));
  if (w.ground(xs) && w.ground(ys)) {
    out.kind = UnifyShapeKind::BothGround;
  } else if (xs != w.var(x)) {
    out.kind = UnifyShapeKind::XtoU;
    BC_CHECK(ys == w.var(y) || w.is_var(ys),
             "unexpected unifier shape for one-variable terms");
  } else {
    out.kind = UnifyShapeKind::YtoU;
  }
  return out;
}

SameVarResult unify_same_var(World& w, TermId s, TermId t) {
  require_onevar(w, s);
  require_onevar(w, t);
  BC_CHECK(!w.is_var(s) && !w.is_var(t), "inputs must be non-trivial");
  BC_CHECK(w.term_fv(s)[0] == w.term_fv(t)[0],
           "inputs must share their variable");
  SameVarResult out;
  if (s == t) {
    out.kind = SameVarResult::Identical;
    return out;
  }
  auto sigma = mgu(w, s, t);
  if (!sigma) {
    out.kind = SameVarResult::Fail;
    return out;
  }
  int x = w.term_fv(s)[0];
  TermId xs = sigma->apply(w, w.var(x));
  BC_CHECK(w.ground(xs), "same-variable unifier must ground the variable");
  BC_CHECK(is_strict_subterm(w, xs, s) || is_strict_subterm(w, xs, t),
           "binding must be a ground strict subterm of an input");
  out.kind = SameVarResult::Unifies;
  out.sigma = *sigma;
  return out;
}

std::optional<TermId> match_onevar(World& w, TermId pattern, TermId target) {
  if (w.is_var(pattern)) return target;
  if (w.ground(pattern)) return std::nullopt;  // no variable to bind
  if (w.is_var(target)) return std::nullopt;
  if (w.term_fun(pattern) != w.term_fun(target)) return std::nullopt;
  auto pa = w.term_args(pattern), ta = w.term_args(target);
  std::optional<TermId> binding;
  for (size_t i = 0; i < pa.size(); ++i) {
    if (w.ground(pa[i])) {
      if (pa[i] != ta[i]) return std::nullopt;
      continue;
    }
    auto b = match_onevar(w, pa[i], ta[i]);
    if (!b) return std::nullopt;
    if (binding && *binding != *b) return std::nullopt;
    binding = b;
  }
  return binding;
}

bool in_plugged_set(World& w, TermId t, std::span<const TermId> us,
                    std::span<const TermId> vs) {
  for (TermId u : us) {
    if (w.is_var(u)) {
      if (std::find(vs.begin(), vs.end(), t) != vs.end()) return true;
      continue;
    }
    auto v = match_onevar(w, u, t);
    if (v && std::find(vs.begin(), vs.end(), *v) != vs.end()) return true;
  }
  return false;
}

}  // namespace blindcopy
