#include "blindcopy/normalize.hpp"

#include <algorithm>
#include <set>

#include "blindcopy/classify.hpp"

namespace blindcopy {

PredId NormalSet::state(const std::vector<PredId>& base) {
  std::vector<PredId> key = base;
  std::sort(key.begin(), key.end());
  key.erase(std::unique(key.begin(), key.end()), key.end());
  auto it = state_by_set_.find(key);
  if (it != state_by_set_.end()) return it->second;
  std::string name = "{";
  for (size_t i = 0; i < key.size(); ++i) {
    if (i) name += ",";
    name += w->pred_name(key[i]);
  }
  name += "}";
  PredId p = w->pred(name, 1);
  state_by_set_.emplace(key, p);
  set_by_state_.emplace(p, key);
  return p;
}

bool NormalSet::has_state(PredId p) const { return set_by_state_.count(p); }

const std::vector<PredId>& NormalSet::members(PredId state) const {
  auto it = set_by_state_.find(state);
  BC_CHECK(it != set_by_state_.end(), "unknown state");
  return it->second;
}

std::vector<PredId> NormalSet::states() const {
  std::vector<PredId> out;
  for (auto& [p, set] : set_by_state_) out.push_back(p);
  return out;
}

namespace {

struct SplitDefinite {
  LitId head = -1;
  std::vector<LitId> body;
};

std::optional<SplitDefinite> split_definite(const Clause& c) {
  SplitDefinite out;
  for (LitId l : c) {
    if (lit_neg(l)) {
      out.body.push_back(l);
    } else {
      if (out.head >= 0) return std::nullopt;
      out.head = l;
    }
  }
  if (out.head < 0) return std::nullopt;
  return out;
}

class Normalizer {
 public:
  Normalizer(World& w, const NormalizeOptions& opt) : w_(w), opt_(opt) {
    result_.w = &w;
  }

  NormalSet run(const std::vector<Clause>& input) {
    for (const Clause& c : input) {
      auto def = split_definite(c);
      if (!def) continue;  // goals and negative clauses play no role here
      Clause wrapped;
      for (LitId l : c) {
        AtomId a = lit_atom(l);
        BC_CHECK(w_.atom_args(a).size() == 1,
                 "normalization requires unary predicates");
        PredId st = result_.state_of(w_.atom_pred(a));
        wrapped.push_back(
            make_lit(w_.atom(st, {w_.atom_arg(a)}), lit_neg(l)));
      }
      normalize_clause(wrapped);
      ingest(wrapped);
    }
    // Saturate: retry pending simplifications, combine and propagate over
    // the growing normal set, until nothing new appears.
    bool progress = true;
    while (progress) {
      progress = false;
      size_t before = seen_.size();
      std::vector<Clause> snapshot = pending_;
      for (const Clause& c : snapshot) simplify_pending(c);
      combine_normals();
      epsilon_propagate();
      progress = seen_.size() > before;
    }
    result_.clauses = normal_;
    return std::move(result_);
  }

 private:
  void budget() {
    if (++steps_ > opt_.round_cap ||
        normal_.size() + pending_.size() > opt_.clause_cap)
      throw BudgetExceeded("normalization budget exhausted");
    if (result_.states().size() > opt_.state_cap)
      throw BudgetExceeded("state cap exhausted");
  }

  bool is_normal(const Clause& c) {
    auto def = split_definite(c);
    if (!def) return false;
    std::vector<int> head_fv = w_.atom_fv(lit_atom(def->head));
    std::set<int> used;
    for (LitId l : def->body) {
      AtomId a = lit_atom(l);
      TermId t = w_.atom_arg(a);
      if (!w_.is_var(t)) return false;
      int v = w_.var_index(t);
      if (!used.insert(v).second) return false;  // repeated body variable
      if (!std::binary_search(head_fv.begin(), head_fv.end(), v)) return false;
    }
    return true;
  }

  // Collapse same-variable trivial body pairs into intersection states.
  Clause intersect_body(Clause c) {
    for (;;) {
      auto def = split_definite(c);
      if (!def) return c;
      std::map<int, std::vector<LitId>> trivial_by_var;
      for (LitId l : def->body) {
        TermId t = w_.atom_arg(lit_atom(l));
        if (w_.is_var(t)) trivial_by_var[w_.var_index(t)].push_back(l);
      }
      bool changed = false;
      for (auto& [v, lits] : trivial_by_var) {
        if (lits.size() < 2) continue;
        std::vector<PredId> merged;
        for (LitId l : lits) {
          PredId st = w_.atom_pred(lit_atom(l));
          const auto& mem = result_.members(st);
          merged.insert(merged.end(), mem.begin(), mem.end());
        }
        PredId st = result_.state(merged);
        Clause next;
        for (LitId l : c)
          if (std::find(lits.begin(), lits.end(), l) == lits.end())
            next.push_back(l);
        next.push_back(make_lit(w_.atom(st, {w_.var(v)}), true));
        normalize_clause(next);
        c = std::move(next);
        changed = true;
        break;
      }
      if (!changed) return c;
    }
  }

  void ingest(const Clause& raw) {
    budget();
    Clause c = canon_clause(w_, intersect_body(raw));
    if (!seen_.insert(c).second) return;
    if (is_normal(c))
      normal_.push_back(c);
    else
      pending_.push_back(c);
  }

  // The simplification and resolution steps applicable to a non-normal
  // clause under the current normal set.
  void simplify_pending(const Clause& c) {
    auto def = split_definite(c);
    if (!def) return;
    std::vector<int> head_fv = w_.atom_fv(lit_atom(def->head));
    for (LitId l : def->body) {
      AtomId a = lit_atom(l);
      TermId t = w_.atom_arg(a);
      PredId st = w_.atom_pred(a);
      if (w_.ground(t)) {
        // Ground body atom: drop it once the term is accepted.
        if (accepts(w_, current_view(), st, t)) {
          Clause next;
          for (LitId o : c)
            if (o != l) next.push_back(o);
          ingest(next);
        }
        continue;
      }
      if (w_.is_var(t)) {
        int v = w_.var_index(t);
        bool in_head = std::binary_search(head_fv.begin(), head_fv.end(), v);
        int occurrences = 0;
        for (LitId o : def->body) {
          TermId ot = w_.atom_arg(lit_atom(o));
          const auto& fv = w_.term_fv(ot);
          if (std::binary_search(fv.begin(), fv.end(), v)) ++occurrences;
        }
        // A variable used once, off the head: the literal only asks the
        // state to be nonempty.
        if (!in_head && occurrences == 1 && nonempty(w_, current_view(), st)) {
          Clause next;
          for (LitId o : c)
            if (o != l) next.push_back(o);
          ingest(next);
        }
        continue;
      }
      // Function-headed body atom: resolve against normal clauses.
      for (const Clause& nc : normal_) {
        auto ndef = split_definite(nc);
        if (w_.atom_pred(lit_atom(ndef->head)) != st) continue;
        auto [renamed_c, renamed_n] = rename_apart(w_, c, nc);
        // Recover the corresponding literals after renaming.
        auto rdef = split_definite(renamed_c);
        auto rndef = split_definite(renamed_n);
        LitId rl = -1;
        for (LitId o : rdef->body)
          if (w_.atom_pred(lit_atom(o)) == st &&
              !w_.is_var(w_.atom_arg(lit_atom(o))) &&
              !w_.ground(w_.atom_arg(lit_atom(o))))
            rl = o;  // deterministic: the last matching deep literal
        if (rl < 0) continue;
        auto sigma = mgu(w_, w_.atom_arg(lit_atom(rl)),
                         w_.atom_arg(lit_atom(rndef->head)));
        if (!sigma) continue;
        Clause next;
        for (LitId o : renamed_c)
          if (o != rl) next.push_back(sigma->apply_lit(w_, o));
        for (LitId o : rndef->body) next.push_back(sigma->apply_lit(w_, o));
        normalize_clause(next);
        ingest(next);
      }
    }
  }

  // Intersection of two normal clauses with distinct states.
  void combine_normals() {
    size_t n = normal_.size();
    for (size_t i = 0; i < n; ++i) {
      for (size_t j = 0; j < n; ++j) {
        if (i == j) continue;
        auto di = split_definite(normal_[i]);
        auto dj = split_definite(normal_[j]);
        PredId pi = w_.atom_pred(lit_atom(di->head));
        PredId pj = w_.atom_pred(lit_atom(dj->head));
        if (pi >= pj) continue;  // unordered pairs once
        auto [ci, cj] = rename_apart(w_, normal_[i], normal_[j]);
        auto rdi = split_definite(ci);
        auto rdj = split_definite(cj);
        auto sigma = mgu(w_, w_.atom_arg(lit_atom(rdi->head)),
                         w_.atom_arg(lit_atom(rdj->head)));
        if (!sigma) continue;
        std::vector<PredId> merged = result_.members(pi);
        const auto& mj = result_.members(pj);
        merged.insert(merged.end(), mj.begin(), mj.end());
        PredId st = result_.state(merged);
        Clause next;
        next.push_back(make_lit(
            w_.atom(st, {sigma->apply(
                        w_, w_.atom_arg(lit_atom(rdi->head)))}),
            false));
        for (LitId o : rdi->body) next.push_back(sigma->apply_lit(w_, o));
        for (LitId o : rdj->body) next.push_back(sigma->apply_lit(w_, o));
        normalize_clause(next);
        ingest(next);
      }
    }
  }

  // Normal clauses p(x) | -q(x) instantiate the heads of q-clauses.
  void epsilon_propagate() {
    size_t n = normal_.size();
    for (size_t i = 0; i < n; ++i) {
      auto di = split_definite(normal_[i]);
      if (di->body.size() != 1) continue;
      TermId ht = w_.atom_arg(lit_atom(di->head));
      TermId bt = w_.atom_arg(lit_atom(di->body[0]));
      if (!w_.is_var(ht) || !w_.is_var(bt) || ht != bt) continue;
      PredId from = w_.atom_pred(lit_atom(di->body[0]));
      PredId to = w_.atom_pred(lit_atom(di->head));
      if (from == to) continue;
      for (size_t j = 0; j < n; ++j) {
        auto dj = split_definite(normal_[j]);
        if (w_.atom_pred(lit_atom(dj->head)) != from) continue;
        Clause next;
        next.push_back(make_lit(
            w_.atom(to, {w_.atom_arg(lit_atom(dj->head))}), false));
        for (LitId o : dj->body) next.push_back(o);
        normalize_clause(next);
        ingest(next);
      }
    }
  }

  // The evolving normal set as seen by the acceptance helpers.
  NormalSet current_view() {
    NormalSet view = result_;
    view.clauses = normal_;
    return view;
  }

  World& w_;
  NormalizeOptions opt_;
  NormalSet result_;
  std::vector<Clause> normal_;
  std::vector<Clause> pending_;
  std::set<Clause> seen_;
  size_t steps_ = 0;
};

}  // namespace

NormalSet normalize(World& w, const std::vector<Clause>& s,
                    const NormalizeOptions& opt) {
  Normalizer n(w, opt);
  return n.run(s);
}

bool nonempty(World& w, const NormalSet& n, PredId state) {
  BC_CHECK(n.has_state(state), "unknown state");
  // Drop the arguments and saturate the propositional projection.
  std::set<PredId> live;
  bool progress = true;
  while (progress) {
    progress = false;
    for (const Clause& c : n.clauses) {
      PredId head = -1;
      bool all = true;
      for (LitId l : c) {
        PredId p = w.atom_pred(lit_atom(l));
        if (lit_neg(l)) {
          if (!live.count(p)) all = false;
        } else {
          head = p;
        }
      }
      if (all && head >= 0 && live.insert(head).second) progress = true;
    }
  }
  return live.count(state) > 0;
}

bool accepts(World& w, const NormalSet& n, PredId state, TermId t) {
  BC_CHECK(w.ground(t), "membership requires a ground term");
  std::vector<TermId> subs = subterms(w, t);
  // Instantiate heads over the subterms of t and saturate the resulting
  // ground clauses.
  std::set<AtomId> truth;
  bool progress = true;
  while (progress) {
    progress = false;
    for (const Clause& c : n.clauses) {
      LitId head = -1;
      std::vector<LitId> body;
      for (LitId l : c) (lit_neg(l) ? body : (head = l, body)).size();
      for (LitId l : c) {
        if (!lit_neg(l)) head = l;
      }
      if (head < 0) continue;
      AtomId ha = lit_atom(head);
      for (TermId u : subs) {
        auto sigma = match_term(w, w.atom_arg(ha), u);
        if (!sigma) continue;
        bool all = true;
        for (LitId l : c) {
          if (!lit_neg(l)) continue;
          AtomId ba = sigma->apply_atom(w, lit_atom(l));
          if (!truth.count(ba)) all = false;
        }
        if (all) {
          AtomId got = w.atom(w.atom_pred(ha), {u});
          if (truth.insert(got).second) progress = true;
        }
      }
    }
  }
  return truth.count(w.atom(state, {t})) > 0;
}

}  // namespace blindcopy
