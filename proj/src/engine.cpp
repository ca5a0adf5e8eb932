#include "blindcopy/engine.hpp"
#include <cstdlib>
#include <iostream>

#include <algorithm>
#include <functional>
#include <map>
#include <set>

#include "blindcopy/classify.hpp"
#include "blindcopy/onevar.hpp"
#include "blindcopy/prop.hpp"

namespace blindcopy {

Clause erase_literal_names(World& w, const Clause& c) {
  Clause out;
  for (LitId l : c) {
    PredId p = w.atom_pred(lit_atom(l));
    if (w.pred_kind(p) == PredKind::LiteralName) {
      LitId named = w.pred_literal(p);
      out.push_back(lit_neg(l) ? named : lit_flip(named));
    } else {
      out.push_back(l);
    }
  }
  normalize_clause(out);
  return out;
}

namespace {

bool is_split_lit(World& w, LitId l) {
  return w.is_split_pred(w.atom_pred(lit_atom(l)));
}

// Split a working clause into its core and its splitting-literal part.
std::pair<Clause, Clause> split_tags(World& w, const Clause& c) {
  Clause core, tags;
  for (LitId l : c) (is_split_lit(w, l) ? tags : core).push_back(l);
  return {core, tags};
}

int count_positives_erased(World& w, const Clause& c) {
  Clause e = erase_literal_names(w, c);
  int n = 0;
  for (LitId l : e)
    if (!lit_neg(l)) ++n;
  return n;
}

int count_negative_names(World& w, const Clause& c) {
  int n = 0;
  for (LitId l : c)
    if (lit_neg(l) &&
        w.pred_kind(w.atom_pred(lit_atom(l))) == PredKind::BlockName)
      ++n;
  return n;
}

}  // namespace

std::optional<TypedClause> classify_work(World& w,
                                         const InstantiationContext& ctx,
                                         const Clause& c, bool horn_names) {
  auto [core, tags] = split_tags(w, c);
  if (horn_names) {
    if (count_positives_erased(w, c) > 1) return std::nullopt;
    if (count_negative_names(w, c) > ctx.r) return std::nullopt;
  }
  TypedClause out;
  out.core = core;
  out.tags = tags;

  // Block: one-variable core with only function-free literals.
  if (is_block(w, core)) {
    out.type = WorkType::Block;
    return out;
  }
  std::vector<int> fv = clause_fv(w, core);
  if (fv.empty() && !core.empty()) {
    // Ground: every argument a plugged shuffle term.
    for (LitId l : core) {
      AtomId a = lit_atom(l);
      if (w.atom_args(a).size() != 1 || !ctx.in_shuffle_ground(w.atom_arg(a)))
        return std::nullopt;
    }
    out.type = WorkType::Ground;
    return out;
  }
  if (fv.size() == 1) {
    bool nontrivial = false;
    for (LitId l : core) {
      AtomId a = lit_atom(l);
      if (w.atom_args(a).size() != 1) return std::nullopt;
      TermId t = w.atom_arg(a);
      if (w.is_var(t)) continue;
      nontrivial = true;
      if (!ctx.in_arg_shuffles(t)) return std::nullopt;
    }
    if (!nontrivial) return std::nullopt;
    out.type = WorkType::OneVar;
    return out;
  }
  // Complex: flat, every non-trivial literal of arity >= 2, trivial
  // literals over the base alphabet.
  if (!is_complex(w, core)) return std::nullopt;
  for (LitId l : core) {
    AtomId a = lit_atom(l);
    if (lit_trivial(w, l)) {
      PredId p = w.atom_pred(a);
      if (w.pred_kind(p) != PredKind::Plain) return std::nullopt;
    } else {
      if (w.term_args(w.atom_arg(a)).size() < 2) return std::nullopt;
    }
  }
  out.type = WorkType::Complex;
  return out;
}

namespace {

// ---------------------------------------------------------------------------
// Incremental Horn propagation with assumption undo.

class HornProp {
 public:
  explicit HornProp(World& w) : w_(w) {}

  int prop_count() const { return static_cast<int>(atoms_.size()); }
  std::optional<int> find_prop(AtomId a) const {
    auto it = index_.find(a);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  int intern(AtomId a) {
    auto it = index_.find(a);
    if (it != index_.end()) return it->second;
    int i = static_cast<int>(atoms_.size());
    atoms_.push_back(a);
    index_.emplace(a, i);
    truth_.push_back(0);
    reason_.push_back(-1);
    pos_occ_.emplace_back();
    neg_occ_.emplace_back();
    return i;
  }
  AtomId prop_atom(int i) const { return atoms_[i]; }
  bool has_atom(AtomId a) const { return index_.count(a) > 0; }

  // Adds an erased instance clause; must be Horn.
  void add_clause(const Clause& c, int origin) {
    std::vector<int> lits;
    int head = 0, negs = 0;
    for (LitId l : c) {
      int p = intern(lit_atom(l)) + 1;
      if (lit_neg(l)) {
        lits.push_back(-p);
        ++negs;
      } else {
        BC_CHECK(head == 0, "instance set must be Horn");
        head = p;
        lits.push_back(p);
      }
    }
    std::sort(lits.begin(), lits.end());
    lits.erase(std::unique(lits.begin(), lits.end()), lits.end());
    // Recount after dedup; a tautology {p, -p} keeps both.
    int idx = static_cast<int>(clauses_.size());
    clauses_.push_back(std::move(lits));
    origins_.push_back(origin);
    head_.push_back(head);
    pending_.push_back(0);
    for (int lit : clauses_[idx]) {
      if (lit < 0) {
        ++pending_[idx];
        neg_occ_[-lit - 1].push_back(idx);
      }
    }
    if (head) pos_occ_[head - 1].push_back(idx);
    fresh_.push_back(idx);
  }

  // Propagate clauses added since the last commit into the base state.
  // Returns false when the base is already contradictory; in that case
  // `conflict_origins` (if given) receives the contributing clause origins.
  bool commit(std::vector<int>* conflict_origins = nullptr,
              std::vector<int>* derived_out = nullptr) {
    derived_out_ = derived_out;
    bool ok = true;
    // First account for base facts from earlier commits (the queue is empty
    // here, so nothing else decrements for those), then fire; propagation
    // handles everything set true from now on.
    for (int idx : fresh_) {
      int done = 0;
      for (int lit : clauses_[idx])
        if (lit < 0 && truth_[-lit - 1] == 1) ++done;
      pending_[idx] -= done;
    }
    for (int idx : fresh_) {
      if (pending_[idx] == 0 && fire(idx)) {
        ok = false;
        break;
      }
    }
    fresh_.clear();
    if (ok) ok = propagate();
    if (!ok && conflict_origins) collect_origins(conflict_origins);
    trail_.clear();  // base facts are permanent
    applied_.clear();
    queue_.clear();
    conflict_ = -1;
    conflict_prop_ = -1;
    derived_out_ = nullptr;
    return ok;
  }

  // True when the assumptions make the instance set contradictory.
  // Assumptions: (prop, sign); sign true = assume the atom holds.
  bool query_unsat(const std::vector<std::pair<int, bool>>& units,
                   std::vector<int>* origins_out = nullptr) {
    BC_CHECK(fresh_.empty(), "commit before querying");
    bool conflict = false;
    for (auto [p, sign] : units) {
      if (truth_[p] == (sign ? -1 : 1)) {
        conflict = true;
        break;
      }
      if (truth_[p] != 0) continue;
      if (sign) {
        if (set_true(p, -2)) {
          conflict = true;
          break;
        }
      } else {
        truth_[p] = -1;
        trail_.push_back(p);
      }
    }
    if (!conflict) conflict = !propagate();
    if (conflict && origins_out) collect_origins(origins_out);
    undo();
    return conflict;
  }

  bool base_true(int p) const { return truth_[p] == 1; }

 private:
  bool fire(int idx) {
    int h = head_[idx];
    if (h == 0) {
      conflict_ = idx;
      return true;
    }
    return set_true(h - 1, idx);
  }

  bool set_true(int p, int reason) {
    if (truth_[p] == 1) return false;
    if (truth_[p] == -1) {
      conflict_ = reason >= 0 ? reason : -2;
      conflict_prop_ = p;
      return true;
    }
    truth_[p] = 1;
    reason_[p] = reason;
    trail_.push_back(p);
    queue_.push_back(p);
    if (derived_out_) derived_out_->push_back(p);
    return false;
  }

  bool propagate() {
    while (!queue_.empty()) {
      int p = queue_.back();
      queue_.pop_back();
      if (truth_[p] != 1) continue;
      applied_.push_back(p);
      bool bad = false;
      for (int idx : neg_occ_[p]) {
        if (--pending_[idx] == 0 && !bad && fire(idx)) bad = true;
      }
      if (bad) {
        queue_.clear();
        return false;
      }
    }
    return true;
  }

  void undo() {
    // Reverse only the decrements that actually ran.
    for (int p : applied_)
      for (int idx : neg_occ_[p]) ++pending_[idx];
    for (int p : trail_) {
      truth_[p] = 0;
      reason_[p] = -1;
    }
    applied_.clear();
    trail_.clear();
    queue_.clear();
    conflict_ = -1;
    conflict_prop_ = -1;
  }

  void collect_origins(std::vector<int>* out) {
    bool dump = std::getenv("BC_DEBUG_INSTANCES") != nullptr;
    std::set<int> seen_props;
    std::set<int> origins;
    std::vector<int> work;
    auto push_clause = [&](int idx) {
      if (idx < 0) return;
      if (origins_[idx] >= 0) origins.insert(origins_[idx]);
      if (dump) {
        std::cerr << "used[" << origins_[idx] << "]";
        for (int lit : clauses_[idx])
          std::cerr << " " << (lit < 0 ? "-" : "")
                    << w_.show_atom(atoms_[std::abs(lit) - 1]);
        std::cerr << "\n";
      }
      for (int lit : clauses_[idx])
        if (lit < 0) work.push_back(-lit - 1);
    };
    if (conflict_ >= 0) push_clause(conflict_);
    if (conflict_prop_ >= 0) work.push_back(conflict_prop_);
    while (!work.empty()) {
      int p = work.back();
      work.pop_back();
      if (!seen_props.insert(p).second) continue;
      if (truth_[p] == 1 && reason_[p] >= 0) push_clause(reason_[p]);
    }
    out->assign(origins.begin(), origins.end());
  }

  World& w_;
  std::vector<AtomId> atoms_;
  std::unordered_map<AtomId, int> index_;
  std::vector<int8_t> truth_;  // 0 unset, 1 true, -1 assumed false
  std::vector<int> reason_;
  std::vector<std::vector<int>> clauses_;
  std::vector<int> origins_;
  std::vector<int> head_;
  std::vector<int> pending_;
  std::vector<std::vector<int>> pos_occ_, neg_occ_;
  std::vector<int> fresh_;
  std::vector<int> trail_;
  std::vector<int>* derived_out_ = nullptr;
  std::vector<int> applied_;
  std::vector<int> queue_;
  int conflict_ = -1;
  int conflict_prop_ = -1;
};

// ---------------------------------------------------------------------------
// Instantiation pools

void sort_by_size(World& w, std::vector<TermId>& ts) {
  std::sort(ts.begin(), ts.end(), [&](TermId a, TermId b) {
    int sa = w.term_size(a), sb = w.term_size(b);
    return sa != sb ? sa < sb : a < b;
  });
  ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
}

// Tier-aware membership in the derived term sets. Tier 0 uses the plain
// ground subterms and reduced units; tier 1 the argument-shuffle closures.
struct Domains {
  World& w;
  const InstantiationContext& ctx;
  int tier;

  bool in_ground1(TermId t) const {
    if (!w.ground(t)) return false;
    if (tier == 0)
      return std::binary_search(ctx.ground_subterms.begin(),
                                ctx.ground_subterms.end(), t);
    return ctx.in_ground_shuffles(t);
  }
  // Ngrr[G1]: a prefix composition plugged with a ground shuffle.
  bool in_prefix_ground(TermId t) const {
    if (!w.ground(t)) return false;
    for (TermId v : ctx.part_prefixes) {
      if (w.is_var(v)) {
        if (in_ground1(t)) return true;
        continue;
      }
      auto g = match_onevar(w, v, t);
      if (g && in_ground1(*g)) return true;
    }
    return false;
  }
  bool in_shuffles(TermId t) const {
    if (w.is_var(t)) return true;
    if (tier == 0) {
      if (w.ground(t) || w.term_fv(t).size() > 1) return false;
      return std::binary_search(ctx.reduced_units.begin(),
                                ctx.reduced_units.end(), ctx.at_canon(t));
    }
    return ctx.in_arg_shuffles(t);
  }
  // Ngr1[Ngrr[G1]].
  bool in_shuffle_ground(TermId t) const {
    if (!w.ground(t)) return false;
    if (in_prefix_ground(t)) return true;
    if (w.is_var(t)) return false;
    auto args = w.term_args(t);
    if (args.empty()) return false;
    // t = u[g] for a non-trivial shuffle u; enumerate candidate splits by
    // matching reduced units (tier 0) or via the context (tier 1).
    if (tier == 1) return ctx.in_shuffle_ground(t);
    for (TermId v : ctx.reduced_units) {
      if (w.is_var(v)) continue;
      auto g = match_onevar(w, v, t);
      if (g && in_prefix_ground(*g)) return true;
    }
    return false;
  }
  // N' = Ngrr plus doubly plugged prefixes; the instantiation domain of
  // complex clauses and of the fold bridges.
  bool in_nprime(TermId t) const {
    if (ctx.in_prefixes(t) || w.is_var(t)) return true;
    if (!w.ground(t)) return false;
    for (TermId v : ctx.part_prefixes) {
      if (w.is_var(v)) {
        if (in_prefix_ground(t)) return true;
        continue;
      }
      auto g = match_onevar(w, v, t);
      if (g && in_prefix_ground(*g)) return true;
    }
    return false;
  }
  // Instantiation domain of blocks: flat patterns (bare or plugged with
  // N'-members), shuffles, and plugged shuffles.
  bool in_block_domain(TermId t) const {
    if (w.is_var(t)) return true;
    if (in_shuffles(t) || in_shuffle_ground(t)) return true;
    auto args = w.term_args(t);
    if (args.empty()) return false;
    for (TermId a : args) {
      bool slot_var = w.is_var(a) && w.var_index(a) <= ctx.r;
      if (!slot_var && !in_nprime(a)) return false;
    }
    return true;
  }
};

// Substitute the single variable of `c` by every term in `dom`.
void inst_onevar(World& w, const Clause& c, const std::vector<TermId>& dom,
                 const std::function<void(Clause)>& sink) {
  std::vector<int> fv = clause_fv(w, c);
  if (fv.empty()) {
    sink(c);
    return;
  }
  for (TermId t : dom) {
    Subst sigma;
    sigma.bind(fv[0], t);
    sink(sigma.apply_clause(w, c));
  }
}

// Substitute every variable of `c` independently over `dom`.
void inst_multi(World& w, const Clause& c, const std::vector<TermId>& dom,
                size_t cap, const std::function<void(Clause)>& sink) {
  std::vector<int> fv = clause_fv(w, c);
  if (fv.empty()) {
    sink(c);
    return;
  }
  if (dom.empty()) return;
  std::vector<size_t> idx(fv.size(), 0);
  size_t count = 0;
  while (true) {
    Subst sigma;
    for (size_t i = 0; i < fv.size(); ++i) sigma.bind(fv[i], dom[idx[i]]);
    sink(sigma.apply_clause(w, c));
    if (++count > cap) return;
    size_t pos = 0;
    while (pos < fv.size() && ++idx[pos] == dom.size()) idx[pos++] = 0;
    if (pos == fv.size()) break;
  }
}

// ---------------------------------------------------------------------------
// Working set of the combined procedures

struct WorkingSet {
  World& w;
  InstantiationContext& ctx;
  const EngineOptions& opt;
  bool horn_names;
  std::vector<Clause> clauses;  // canonical
  std::vector<TypedClause> types;
  std::set<Clause> seen;
  std::vector<int> log_ids;

  WorkingSet(World& w, InstantiationContext& ctx, const EngineOptions& opt,
             bool horn)
      : w(w), ctx(ctx), opt(opt), horn_names(horn) {}

  // Returns the index of the clause, or -1 when already present.
  int add(const Clause& c, const std::string& rule, std::vector<int> premises) {
    Clause canon = canon_clause(w, c);
    if (seen.count(canon)) return -1;
    auto typed = classify_work(w, ctx, canon, horn_names);
    BC_CHECK(typed.has_value(), "derived clause leaves the working types: " +
                                    w.show_clause(canon));
    seen.insert(canon);
    clauses.push_back(canon);
    types.push_back(*typed);
    int id = -1;
    if (opt.log) {
      std::vector<int> mapped;
      for (int p : premises)
        if (p >= 0 && p < static_cast<int>(log_ids.size()))
          mapped.push_back(log_ids[p]);
      id = opt.log->add(canon, rule, mapped);
    }
    log_ids.push_back(id);
    return static_cast<int>(clauses.size()) - 1;
  }

  bool has_empty() const {
    return !clauses.empty() && seen.count(Clause{}) > 0;
  }
};

struct InstanceBuild {
  std::vector<std::pair<Clause, int>> instances;  // erased, origin index
  bool truncated = false;
};

// Incremental, derivability-driven generator of the propositional instances
// of a growing working set. A clause instance is generated only when each
// of its body atoms is derivable under the most generous assumptions (every
// assumable atom taken true); instances failing that can never fire in any
// entailment query, so omitting them is sound. Universal block clauses are
// tracked as per-predicate coverage flags instead of being materialized.
class InstanceEngine {
 public:
  InstanceEngine(WorkingSet& ws, int tier)
      : ws_(ws), w_(ws.w), ctx_(ws.ctx), dom_{ws.w, ws.ctx, tier}, gen_(ws.w) {
    for (int i = 1; i <= ctx_.r; ++i) slot_vars_.push_back(w_.var(i));
    bare_patterns_ = ctx_.flat_patterns();
    for (const Clause& c : ctx_.fold_clauses) add_schema(c, -1, Family::Bridge);
  }

  bool truncated() const { return truncated_; }

  // Ingest clauses added to the working set, then run generation to a
  // fixpoint, streaming fresh query instances into `fresh_out`.
  void refresh(std::vector<std::pair<Clause, int>>* fresh_out) {
    fresh_out_ = fresh_out;
    for (; ingested_ < ws_.clauses.size(); ++ingested_) seed(ingested_);
    drain();
    fresh_out_ = nullptr;
  }

 private:
  enum class Family { Block, OneVar, Bridge, Complex };

  struct Schema {
    Family family;
    Clause clause;  // erased, at the canonical variable (one-var families)
    int origin;
    std::vector<std::pair<PredId, TermId>> patterns;  // its unary atoms
    std::vector<AtomId> body;                         // negative atoms
    std::vector<AtomId> zero_body;                    // zero-ary negatives
    bool definite = false;
    PredId head_pred = -1;   // for pattern flags on blocks
    bool head_zero = false;  // zero-ary head
  };

  void add_schema(const Clause& erased, int origin, Family family) {
    Schema sch;
    sch.family = family;
    sch.clause = family == Family::Complex
                     ? erased
                     : clause_at_var(w_, erased, ctx_.cv);
    sch.origin = origin;
    for (LitId l : sch.clause) {
      AtomId a = lit_atom(l);
      if (w_.atom_args(a).size() == 1) {
        sch.patterns.push_back({w_.atom_pred(a), w_.atom_arg(a)});
        if (lit_neg(l)) sch.body.push_back(a);
      } else if (w_.atom_args(a).empty()) {
        if (lit_neg(l))
          sch.zero_body.push_back(a);
        else
          sch.head_zero = true;
      }
      if (!lit_neg(l)) {
        sch.definite = true;
        if (w_.atom_args(a).size() == 1 &&
            w_.is_var(w_.atom_arg(a)))
          sch.head_pred = w_.atom_pred(a);
      }
    }
    int id = static_cast<int>(schemas_.size());
    schemas_.push_back(std::move(sch));
    if (family == Family::Block) block_schemas_.push_back(id);
    if (family == Family::Complex) complex_schemas_.push_back(id);
    // Seed instantiation points.
    switch (family) {
      case Family::Block:
        try_onevar(id, w_.var(ctx_.cv));
        for (TermId u : bare_patterns_) try_onevar(id, u);
        for (TermId u : terms_) try_onevar(id, u);
        break;
      case Family::OneVar:
      case Family::Bridge:
        try_onevar(id, w_.var(ctx_.cv));
        for (TermId u : terms_) try_onevar(id, u);
        break;
      case Family::Complex: {
        const Clause& c = schemas_[id].clause;
        inst_multi(w_, c, slot_vars_, ws_.opt.instance_cap, [&](Clause inst) {
          emit(std::move(inst), schemas_[id].origin);
        });
        // Existing admitted terms may already fill its argument slots.
        retry_complex(id);
        break;
      }
    }
  }

  void seed(size_t i) {
    Clause erased = erase_literal_names(w_, ws_.clauses[i]);
    switch (ws_.types[i].type) {
      case WorkType::Block:
        add_schema(erased, static_cast<int>(i), Family::Block);
        break;
      case WorkType::OneVar:
        add_schema(erased, static_cast<int>(i), Family::OneVar);
        break;
      case WorkType::Ground:
        emit(erased, static_cast<int>(i));
        break;
      case WorkType::Complex:
        add_schema(erased, static_cast<int>(i), Family::Complex);
        break;
    }
  }

  // ----- truth of the generous closure -----

  bool max_true(AtomId a) {
    auto p = gen_.find_prop(a);
    if (p && gen_.base_true(*p)) return true;
    PredId pred = w_.atom_pred(a);
    if (w_.atom_args(a).size() == 1 && covered_.count(pred))
      return dom_.in_block_domain(w_.atom_arg(a)) ||
             (w_.is_var(w_.atom_arg(a)));
    return false;
  }

  // ----- instantiation attempts -----

  bool in_family_domain(Family f, TermId u) const {
    if (w_.is_var(u)) return true;
    switch (f) {
      case Family::Block: return dom_.in_block_domain(u);
      case Family::OneVar: return dom_.in_prefix_ground(u);
      case Family::Bridge: return dom_.in_nprime(u);
      case Family::Complex: return dom_.in_nprime(u);
    }
    return false;
  }

  void try_onevar(int sid, TermId u) {
    if (!done_points_.insert({sid, u}).second) return;
    const Schema& sch = schemas_[sid];
    if (!in_family_domain(sch.family, u)) return;
    // All body atoms must be derivable under the generous closure.
    Subst sigma;
    std::vector<int> fv = clause_fv(w_, sch.clause);
    if (!fv.empty()) sigma.bind(fv[0], u);
    for (AtomId b : sch.body) {
      AtomId at = sigma.apply_atom(w_, b);
      if (!max_true(at)) {
        blocked_[at].push_back({sid, u});
        return;
      }
    }
    for (AtomId b : sch.zero_body) {
      if (!max_true(b)) {
        blocked_[b].push_back({sid, u});
        return;
      }
    }
    emit(sigma.apply_clause(w_, sch.clause), sch.origin);
  }

  void try_complex(int sid, const Subst& sigma) {
    const Schema& sch = schemas_[sid];
    Clause inst = sigma.apply_clause(w_, sch.clause);
    if (!done_complex_.insert(inst).second) return;
    std::vector<int> fv = clause_fv(w_, sch.clause);
    for (int v : fv) {
      auto b = sigma.lookup(v);
      if (!b || !in_family_domain(Family::Complex, *b)) return;
    }
    for (LitId l : inst) {
      if (!lit_neg(l)) continue;
      AtomId a = lit_atom(l);
      if (!max_true(a)) {
        blocked_[a].push_back({sid, kNoTerm});  // retried via retry_complex
        return;
      }
    }
    emit(inst, sch.origin);
  }

  // Tuples over admitted terms for the schema's variables.
  void retry_complex(int sid) {
    const Schema& sch = schemas_[sid];
    std::vector<int> fv = clause_fv(w_, sch.clause);
    if (fv.empty()) return;
    std::vector<std::vector<TermId>> cand(fv.size());
    for (size_t i = 0; i < fv.size(); ++i) {
      // Admitted terms for this variable: every trivial body literal at it
      // must be coverable.
      for (TermId u : nprime_) {
        bool ok = true;
        for (LitId l : sch.clause) {
          if (!lit_neg(l)) continue;
          AtomId a = lit_atom(l);
          if (w_.atom_args(a).size() != 1) continue;
          TermId arg = w_.atom_arg(a);
          if (!w_.is_var(arg) || w_.var_index(arg) != fv[i]) continue;
          if (!max_true(w_.atom(w_.atom_pred(a), {u}))) ok = false;
        }
        if (ok) cand[i].push_back(u);
      }
      if (cand[i].empty()) return;
    }
    std::vector<size_t> idx(fv.size(), 0);
    while (true) {
      Subst sigma;
      for (size_t i = 0; i < fv.size(); ++i) sigma.bind(fv[i], cand[i][idx[i]]);
      try_complex(sid, sigma);
      size_t pos = 0;
      while (pos < fv.size() && ++idx[pos] == cand[pos].size()) idx[pos++] = 0;
      if (pos == fv.size()) break;
      if (truncated_) return;
    }
  }

  // ----- event pumps -----

  void note_instance_atoms(const Clause& inst) {
    for (LitId l : inst) {
      AtomId a = lit_atom(l);
      if (!occurring_.insert(a).second) continue;
      atom_queue_.push_back(a);
      for (TermId t : w_.atom_args(a)) note_term(t);
    }
  }

  void note_term(TermId t) {
    std::vector<TermId> stack{t};
    while (!stack.empty()) {
      TermId u = stack.back();
      stack.pop_back();
      if (!terms_seen_.insert(u).second) continue;
      bool slot_free = true;
      for (int v : w_.term_fv(u))
        if (v != ctx_.cv) slot_free = false;
      if (slot_free) {
        terms_.push_back(u);
        term_queue_.push_back(u);
        if (dom_.in_nprime(u)) nprime_.push_back(u);
      }
      for (TermId a : w_.term_args(u)) stack.push_back(a);
    }
  }

  void emit(Clause inst, int origin) {
    if (count_ > ws_.opt.instance_cap) {
      truncated_ = true;
      return;
    }
    if (!inst_seen_.insert(inst).second) return;
    ++count_;
    note_instance_atoms(inst);
    if (fresh_out_) fresh_out_->push_back({inst, origin});
    else pending_out_.push_back({inst, origin});
    // Feed the generous closure: definite clauses only.
    int positives = 0;
    for (LitId l : inst)
      if (!lit_neg(l)) ++positives;
    if (positives == 1) gen_.add_clause(inst, origin);
  }

  void pump_assumptions(AtomId a) {
    // Assumable atoms read true in the generous closure: function-free
    // atoms at slot variables, ground base atoms over the ground
    // vocabulary, and block names.
    PredId p = w_.atom_pred(a);
    bool assumable = false;
    if (w_.pred_kind(p) == PredKind::BlockName) assumable = true;
    if (w_.pred_arity(p) == 1 && !w_.atom_ground(a)) {
      TermId t = w_.atom_arg(a);
      if (w_.is_var(t) && w_.var_index(t) <= ctx_.r) assumable = true;
    }
    if (w_.atom_ground(a) && w_.pred_kind(p) == PredKind::Plain &&
        w_.pred_arity(p) == 1 &&
        std::binary_search(ctx_.base_preds.begin(), ctx_.base_preds.end(),
                           p) &&
        std::binary_search(ctx_.ground_subterms.begin(),
                           ctx_.ground_subterms.end(), w_.atom_arg(a)))
      assumable = true;
    if (assumable) gen_.add_clause({make_lit(a, false)}, -1);
  }

  void update_flags() {
    bool changed = true;
    while (changed) {
      changed = false;
      for (int sid : block_schemas_) {
        const Schema& sch = schemas_[sid];
        if (!sch.definite) continue;
        bool all = true;
        for (AtomId b : sch.body) {
          PredId bp = w_.atom_pred(b);
          if (!covered_.count(bp)) all = false;
        }
        for (AtomId b : sch.zero_body)
          if (!max_true(b)) all = false;
        if (!all) continue;
        if (sch.head_pred >= 0 && covered_.insert(sch.head_pred).second)
          changed = true;
        if (sch.head_zero) {
          for (LitId l : sch.clause) {
            if (lit_neg(l)) continue;
            if (w_.atom_args(lit_atom(l)).empty())
              gen_.add_clause({l}, sch.origin);
          }
        }
      }
      if (changed) flags_dirty_ = true;
    }
  }

  void drain() {
    size_t steps = 0;
    for (;;) {
      if (++steps > ws_.opt.instance_cap || truncated_) {
        truncated_ = true;
        break;
      }
      // Settle the generous closure and wake blocked attempts.
      std::vector<int> derived;
      gen_.commit(nullptr, &derived);
      bool woke = false;
      for (int pr : derived) {
        AtomId a = gen_.prop_atom(pr);
        auto it = blocked_.find(a);
        if (it == blocked_.end()) continue;
        auto waiting = std::move(it->second);
        blocked_.erase(it);
        for (auto [sid, u] : waiting) {
          woke = true;
          if (u == kNoTerm)
            retry_complex(sid);
          else {
            done_points_.erase({sid, u});
            try_onevar(sid, u);
          }
        }
      }
      update_flags();
      if (flags_dirty_) {
        flags_dirty_ = false;
        woke = true;
        auto blocked = std::move(blocked_);
        blocked_.clear();
        for (auto& [atom, waiting] : blocked) {
          for (auto [sid, u] : waiting) {
            if (u == kNoTerm)
              retry_complex(sid);
            else {
              done_points_.erase({sid, u});
              try_onevar(sid, u);
            }
          }
        }
      }
      if (!atom_queue_.empty()) {
        AtomId a = atom_queue_.back();
        atom_queue_.pop_back();
        pump_assumptions(a);
        // Match the atom against every schema pattern.
        if (w_.atom_args(a).size() == 1) {
          TermId t = w_.atom_arg(a);
          PredId p = w_.atom_pred(a);
          for (size_t sid = 0; sid < schemas_.size(); ++sid) {
            const Schema& sch = schemas_[sid];
            for (auto [pp, pat] : sch.patterns) {
              if (pp != p) continue;
              if (sch.family == Family::Complex) {
                auto sigma = match_term(w_, pat, t);
                if (sigma) try_complex(static_cast<int>(sid), *sigma);
              } else if (!w_.ground(pat)) {
                auto u = match_onevar(w_, pat, t);
                if (u) try_onevar(static_cast<int>(sid), *u);
              }
            }
          }
        }
        continue;
      }
      if (!term_queue_.empty()) {
        TermId u = term_queue_.back();
        term_queue_.pop_back();
        for (size_t sid = 0; sid < schemas_.size(); ++sid)
          if (schemas_[sid].family != Family::Complex)
            try_onevar(static_cast<int>(sid), u);
        for (int sid : complex_schemas_) retry_complex(sid);
        continue;
      }
      if (!woke) break;
    }
    if (fresh_out_ && !pending_out_.empty()) {
      for (auto& e : pending_out_) fresh_out_->push_back(std::move(e));
      pending_out_.clear();
    }
  }

  WorkingSet& ws_;
  World& w_;
  const InstantiationContext& ctx_;
  Domains dom_;
  HornProp gen_;
  std::vector<TermId> slot_vars_, bare_patterns_;
  std::vector<Schema> schemas_;
  std::vector<int> block_schemas_, complex_schemas_;
  std::set<std::pair<int, TermId>> done_points_;
  std::set<Clause> done_complex_;
  std::set<Clause> inst_seen_;
  std::set<AtomId> occurring_;
  std::set<TermId> terms_seen_;
  std::vector<TermId> terms_, nprime_;
  std::vector<AtomId> atom_queue_;
  std::vector<TermId> term_queue_;
  std::map<AtomId, std::vector<std::pair<int, TermId>>> blocked_;
  std::set<PredId> covered_;
  bool flags_dirty_ = false;
  std::vector<std::pair<Clause, int>>* fresh_out_ = nullptr;
  std::vector<std::pair<Clause, int>> pending_out_;
  size_t ingested_ = 0;
  size_t count_ = 0;
  bool truncated_ = false;
};

// One-shot build for the backtracking procedure.
InstanceBuild build_relevant_instances(WorkingSet& ws, int tier) {
  InstanceBuild out;
  InstanceEngine eng(ws, tier);
  eng.refresh(&out.instances);
  out.truncated = eng.truncated();
  return out;
}

// Instance pool for the flat procedure: projections of complex clauses,
// blocks at the canonical variable and over the flat patterns.
InstanceBuild build_flat_instances(World& w, int r,
                                   const std::vector<Clause>& clauses,
                                   const EngineOptions& opt) {
  InstanceBuild out;
  size_t budget = opt.instance_cap;
  auto sink_for = [&](int origin) {
    return [&out, origin, &budget](Clause c) {
      if (out.instances.size() >= budget) {
        out.truncated = true;
        return;
      }
      out.instances.push_back({std::move(c), origin});
    };
  };
  std::vector<TermId> slot_vars;
  for (int i = 1; i <= r; ++i) slot_vars.push_back(w.var(i));
  std::vector<TermId> pats;
  {
    InstantiationContext tmp;
    tmp.w = &w;
    tmp.r = r;
    tmp.cv = r + 1;
    pats = tmp.flat_patterns();
  }
  for (size_t i = 0; i < clauses.size(); ++i) {
    const Clause& c = clauses[i];
    auto sink = sink_for(static_cast<int>(i));
    if (is_block(w, c)) {
      Clause canon = clause_at_var(w, c, r + 1);
      sink(canon);
      inst_onevar(w, canon, pats, sink);
    } else {
      inst_multi(w, c, slot_vars, opt.instance_cap, sink);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Candidate blocks and the saturation search

enum class EntryKind { Slot, GroundTag, Name };

struct AsmEntry {
  EntryKind kind;
  AtomId atom;
  bool neg;   // sign of the literal inside the candidate clause
  int slot;   // variable index for Slot entries
};

struct CandidateUniverse {
  std::vector<AsmEntry> entries;
};

// Atoms available for candidate clauses: function-free atoms at slot
// variables, plus (for the combined procedures) ground atoms over the base
// alphabet and block names.
CandidateUniverse build_universe(World& w, const InstantiationContext* ctx,
                                 int max_slot,
                                 const std::vector<std::pair<Clause, int>>& insts,
                                 bool with_ground, bool with_names) {
  std::set<AtomId> atoms;
  for (const auto& [c, origin] : insts)
    for (LitId l : c) atoms.insert(lit_atom(l));
  CandidateUniverse out;
  for (AtomId a : atoms) {
    PredId p = w.atom_pred(a);
    if (w.pred_kind(p) == PredKind::BlockName) {
      if (!with_names) continue;
      out.entries.push_back({EntryKind::Name, a, false, 0});
      out.entries.push_back({EntryKind::Name, a, true, 0});
      continue;
    }
    if (w.pred_arity(p) == 1 && !w.atom_ground(a)) {
      TermId t = w.atom_arg(a);
      if (w.is_var(t) && w.var_index(t) <= max_slot) {
        out.entries.push_back({EntryKind::Slot, a, false, w.var_index(t)});
        out.entries.push_back({EntryKind::Slot, a, true, w.var_index(t)});
      }
      continue;
    }
    if (with_ground && w.atom_ground(a) && w.pred_kind(p) == PredKind::Plain &&
        ctx) {
      bool base = std::binary_search(ctx->base_preds.begin(),
                                     ctx->base_preds.end(), p);
      if (base && w.pred_arity(p) == 1 &&
          std::binary_search(ctx->ground_subterms.begin(),
                             ctx->ground_subterms.end(), w.atom_arg(a))) {
        out.entries.push_back({EntryKind::GroundTag, a, false, 0});
        out.entries.push_back({EntryKind::GroundTag, a, true, 0});
      }
    }
  }
  return out;
}

CandidateUniverse build_universe(World& w, const InstantiationContext& ctx,
                                 int max_slot, const HornProp& hp) {
  CandidateUniverse out;
  for (int i = 0; i < hp.prop_count(); ++i) {
    AtomId a = hp.prop_atom(i);
    PredId p = w.atom_pred(a);
    if (w.pred_kind(p) == PredKind::BlockName) {
      out.entries.push_back({EntryKind::Name, a, false, 0});
      out.entries.push_back({EntryKind::Name, a, true, 0});
      continue;
    }
    if (w.pred_arity(p) == 1 && !w.atom_ground(a)) {
      TermId t = w.atom_arg(a);
      if (w.is_var(t) && w.var_index(t) <= max_slot) {
        out.entries.push_back({EntryKind::Slot, a, false, w.var_index(t)});
        out.entries.push_back({EntryKind::Slot, a, true, w.var_index(t)});
      }
      continue;
    }
    if (w.atom_ground(a) && w.pred_kind(p) == PredKind::Plain &&
        w.pred_arity(p) == 1 &&
        std::binary_search(ctx.base_preds.begin(), ctx.base_preds.end(), p) &&
        std::binary_search(ctx.ground_subterms.begin(),
                           ctx.ground_subterms.end(), w.atom_arg(a))) {
      out.entries.push_back({EntryKind::GroundTag, a, false, 0});
      out.entries.push_back({EntryKind::GroundTag, a, true, 0});
    }
  }
  return out;
}

struct Candidate {
  std::vector<AsmEntry> lits;
  // Blocks grouped per slot, canonicalized at the engine's block variable.
  std::vector<Clause> blocks;
  std::vector<int> slots;
  Clause ground_tags;  // literal-name literals for the conclusion
  Clause name_lits;    // block-name literals
};

// Enumerate consistent candidate literal sets by increasing size, calling
// `try_candidate` for each; stops when it returns true. The slot part is
// mandatory; tag/name extensions are bounded by `ext_cap` literals.
struct CandidateSearch {
  World& w;
  const CandidateUniverse& uni;
  size_t node_budget;
  size_t ext_cap = 2;

  std::vector<int> slot_entries, ext_entries;

  explicit CandidateSearch(World& w, const CandidateUniverse& uni,
                           size_t budget)
      : w(w), uni(uni), node_budget(budget) {
    for (size_t i = 0; i < uni.entries.size(); ++i) {
      if (uni.entries[i].kind == EntryKind::Slot)
        slot_entries.push_back(static_cast<int>(i));
      else
        ext_entries.push_back(static_cast<int>(i));
    }
  }

  bool consistent(const std::vector<int>& picked, int next) const {
    for (int e : picked) {
      if (uni.entries[e].atom == uni.entries[next].atom &&
          uni.entries[e].neg != uni.entries[next].neg)
        return false;
    }
    return true;
  }

  // Runs fn over candidate entry sets (slot part non-empty); fn returns
  // 0 to continue, 1 to stop, 2 to prune the extension subtree below the
  // current set. Returns {stopped, budget_exhausted}.
  std::pair<bool, bool> run(const std::function<int(const std::vector<int>&)>& fn) {
    size_t nodes = 0;
    bool exhausted = false;
    size_t max_size = slot_entries.size();
    for (size_t size = 1; size <= max_size; ++size) {
      std::vector<int> picked;
      bool stop = false;
      std::function<void(size_t, size_t)> rec_slot = [&](size_t start,
                                                         size_t remaining) {
        if (stop || exhausted) return;
        if (remaining == 0) {
          // Extend with tag/name literals, sizes 0..ext_cap.
          std::function<void(size_t, size_t)> extend = [&](size_t estart,
                                                           size_t eleft) {
            if (stop || exhausted) return;
            if (++nodes > node_budget) {
              exhausted = true;
              return;
            }
            int r = fn(picked);
            if (r == 1) {
              stop = true;
              return;
            }
            if (r == 2 || eleft == 0) return;
            for (size_t k = estart; k < ext_entries.size(); ++k) {
              if (!consistent(picked, ext_entries[k])) continue;
              picked.push_back(ext_entries[k]);
              extend(k + 1, eleft - 1);
              picked.pop_back();
              if (stop || exhausted) return;
            }
          };
          extend(0, ext_cap);
          return;
        }
        for (size_t k = start; k < slot_entries.size(); ++k) {
          if (!consistent(picked, slot_entries[k])) continue;
          picked.push_back(slot_entries[k]);
          rec_slot(k + 1, remaining - 1);
          picked.pop_back();
          if (stop || exhausted) return;
        }
      };
      rec_slot(0, size);
      if (stop) return {true, exhausted};
      if (exhausted) return {false, true};
    }
    return {false, exhausted};
  }
};

Candidate make_candidate(World& w, const std::vector<AsmEntry>& lits, int bv) {
  Candidate cand;
  cand.lits = lits;
  std::map<int, Clause> per_slot;
  for (const AsmEntry& e : lits) {
    switch (e.kind) {
      case EntryKind::Slot:
        per_slot[e.slot].push_back(make_lit(e.atom, e.neg));
        break;
      case EntryKind::GroundTag: {
        // The conclusion carries the negative name of the ground literal.
        LitId payload = make_lit(e.atom, e.neg);
        PredId name = w.pred_for_literal(payload);
        cand.ground_tags.push_back(make_lit(w.atom(name, {}), true));
        break;
      }
      case EntryKind::Name:
        cand.name_lits.push_back(make_lit(e.atom, e.neg));
        break;
    }
  }
  for (auto& [slot, blk] : per_slot) {
    normalize_clause(blk);
    cand.blocks.push_back(clause_at_var(w, blk, bv));
    cand.slots.push_back(slot);
  }
  normalize_clause(cand.ground_tags);
  normalize_clause(cand.name_lits);
  return cand;
}

std::vector<std::pair<int, bool>> assumptions_for(
    HornProp& hp, const std::vector<AsmEntry>& lits) {
  std::vector<std::pair<int, bool>> units;
  for (const AsmEntry& e : lits)
    units.push_back({hp.intern(e.atom), e.neg});  // complement of the literal
  return units;
}

// ---------------------------------------------------------------------------
// Flat procedure

struct FlatSearch {
  World& w;
  const EngineOptions& opt;
  int r;
  std::vector<Clause> complexes;
  std::set<std::vector<Clause>> visited;
  bool incomplete = false;
  size_t nodes = 0;

  FlatSearch(World& w, const EngineOptions& opt, int r) : w(w), opt(opt), r(r) {}

  Verdict search(std::vector<Clause> blocks) {
    std::sort(blocks.begin(), blocks.end());
    blocks.erase(std::unique(blocks.begin(), blocks.end()), blocks.end());
    if (visited.count(blocks)) return Verdict::Unsat;  // explored and failed
    if (++nodes > opt.node_cap || past_deadline(opt.deadline)) {
      incomplete = true;
      return Verdict::Unknown;
    }
    for (const Clause& b : blocks)
      if (b.empty()) return Verdict::Unsat;

    std::vector<Clause> all = complexes;
    all.insert(all.end(), blocks.begin(), blocks.end());
    InstanceBuild inst = build_flat_instances(w, r, all, opt);
    if (inst.truncated) incomplete = true;

    PropInstance pi;
    for (auto& [c, origin] : inst.instances) pi.add_clause(w, c);
    bool horn = pi.horn();

    auto unsat_with = [&](const std::vector<AsmEntry>& lits) {
      PropInstance q = pi;
      for (const AsmEntry& e : lits)
        q.add_unit(q.intern(e.atom), e.neg);  // complement unit
      if (q.horn()) return horn_sat(q) == SatResult::Unsat;
      return sat(q) == SatResult::Unsat;
    };
    (void)horn;

    // An inconsistent instance set closes the branch.
    if (unsat_with({})) return Verdict::Unsat;

    CandidateUniverse uni =
        build_universe(w, nullptr, r + 1, inst.instances, false, false);
    CandidateSearch cs(w, uni, opt.core_cap);
    cs.ext_cap = 0;

    std::optional<Candidate> found;
    auto [stopped, exhausted] = cs.run([&](const std::vector<int>& picked) {
      std::vector<AsmEntry> lits;
      for (int e : picked) lits.push_back(uni.entries[e]);
      Candidate cand = make_candidate(w, lits, r + 1);
      // Every block must be absent (no present block subsumes it).
      for (const Clause& b : cand.blocks) {
        for (const Clause& have : blocks) {
          if (std::includes(b.begin(), b.end(), have.begin(), have.end()))
            return 0;
        }
      }
      if (!unsat_with(lits)) return 0;
      found = std::move(cand);
      return 1;
    });
    if (exhausted) incomplete = true;
    if (!found) return incomplete ? Verdict::Unknown : Verdict::Sat;
    bool unknown = false;
    for (const Clause& b : found->blocks) {
      auto next = blocks;
      next.push_back(b);
      Verdict v = search(std::move(next));
      if (v == Verdict::Sat) return Verdict::Sat;
      if (v == Verdict::Unknown) unknown = true;
    }
    if (!unknown) visited.insert(blocks);
    return unknown ? Verdict::Unknown : Verdict::Unsat;
  }
};

std::vector<std::vector<Clause>> eps_split(World& w,
                                           const std::vector<Clause>& s,
                                           size_t cap) {
  std::vector<std::vector<Clause>> branches{{}};
  for (const Clause& c : s) {
    // Group function-free multi-variable clauses by variable.
    std::vector<int> fv = clause_fv(w, c);
    bool allq = true;
    for (LitId l : c)
      if (!lit_trivial(w, l)) allq = false;
    if (!allq || fv.size() <= 1) {
      for (auto& b : branches) b.push_back(c);
      continue;
    }
    std::map<int, Clause> per_var;
    for (LitId l : c) {
      const auto& afv = w.atom_fv(lit_atom(l));
      per_var[afv.empty() ? 0 : afv[0]].push_back(l);
    }
    std::vector<std::vector<Clause>> next;
    for (auto& b : branches) {
      for (auto& [v, blk] : per_var) {
        Clause nb = blk;
        normalize_clause(nb);
        auto copy = b;
        copy.push_back(nb);
        next.push_back(std::move(copy));
      }
    }
    branches = std::move(next);
    if (branches.size() > cap)
      throw InputError("splitting produced too many branches");
  }
  return branches;
}

}  // namespace

Verdict decide_flat(World& w, const std::vector<Clause>& s,
                    const EngineOptions& opt) {
  for (const Clause& c : s) {
    ClauseClass cc = classify(w, c);
    if (cc != ClauseClass::Complex && cc != ClauseClass::EpsilonBlock &&
        cc != ClauseClass::EpsilonClause && cc != ClauseClass::Ground &&
        !c.empty())
      throw InputError("not a flat clause: " + w.show_clause(c));
    if (cc == ClauseClass::Ground && !is_flat(w, c))
      throw InputError("not a flat clause: " + w.show_clause(c));
  }
  int r = w.max_arity();
  bool unknown = false;
  for (auto& branch : eps_split(w, s, opt.node_cap)) {
    FlatSearch fs(w, opt, r);
    std::vector<Clause> blocks;
    for (const Clause& c : branch) {
      if (is_block(w, c))
        blocks.push_back(clause_at_var(w, c, r + 1));
      else
        fs.complexes.push_back(canon_clause(w, c));
    }
    Verdict v = fs.search(std::move(blocks));
    if (v == Verdict::Sat) return Verdict::Sat;
    if (v == Verdict::Unknown) unknown = true;
  }
  return unknown ? Verdict::Unknown : Verdict::Unsat;
}

// ---------------------------------------------------------------------------
// Combined procedure machinery

namespace {

// Fold one-variable literal arguments into prefixed predicates, so every
// non-trivial argument is a reduced unit.
Clause fold_literals(World& w, InstantiationContext& ctx, const Clause& c) {
  Clause out;
  for (LitId l : c) {
    AtomId a = lit_atom(l);
    PredId p = w.atom_pred(a);
    if (w.atom_args(a).size() != 1 || w.pred_kind(p) != PredKind::Plain) {
      out.push_back(l);
      continue;
    }
    TermId t = w.atom_arg(a);
    if (w.ground(t) || w.is_var(t) || w.term_fv(t).size() > 1) {
      out.push_back(l);
      continue;
    }
    int var = w.term_fv(t)[0];
    std::vector<TermId> parts = decompose(w, t);
    if (parts.size() < 2) {
      out.push_back(l);
      continue;
    }
    TermId prefix =
        compose(w, std::span(parts.data(), parts.size() - 1), ctx.cv);
    BC_CHECK(ctx.in_prefixes(prefix),
             "fold prefix outside the context vocabulary");
    PredId q = ctx.prefixed_pred(p, prefix);
    out.push_back(
        make_lit(w.atom(q, {plug(w, parts.back(), w.var(var))}), lit_neg(l)));
  }
  normalize_clause(out);
  return out;
}

// Peel ground base-alphabet literals out of non-ground clauses, naming them
// with zero-ary tags; emits the companion tag clauses.
void q0_split(World& w, const Clause& c, std::vector<Clause>& out) {
  std::vector<int> fv = clause_fv(w, c);
  if (fv.empty()) {
    out.push_back(c);
    return;
  }
  Clause main;
  for (LitId l : c) {
    AtomId a = lit_atom(l);
    if (w.atom_ground(a) && !w.is_split_pred(w.atom_pred(a))) {
      PredId name = w.pred_for_literal(l);
      main.push_back(make_lit(w.atom(name, {}), true));
      Clause companion{make_lit(w.atom(name, {}), false), l};
      normalize_clause(companion);
      out.push_back(companion);
    } else {
      main.push_back(l);
    }
  }
  normalize_clause(main);
  out.push_back(main);
}

// Name variable-disjoint negative blocks out of a function-free
// multi-variable Horn clause; blocks sharing variables with the remainder
// stay in place.
Clause q1_name(World& w, const Clause& c, std::vector<Clause>& extra) {
  std::map<int, Clause> per_var;
  Clause rest;
  for (LitId l : c) {
    if (lit_trivial(w, l) && !w.atom_fv(lit_atom(l)).empty())
      per_var[w.atom_fv(lit_atom(l))[0]].push_back(l);
    else
      rest.push_back(l);
  }
  if (per_var.size() <= 1) return c;
  std::vector<int> rest_fv = clause_fv(w, rest);
  // Keep one block in place: prefer a variable shared with the remainder,
  // then a block holding the positive literal, then the first.
  int keep = -1;
  for (auto& [v, blk] : per_var) {
    if (std::binary_search(rest_fv.begin(), rest_fv.end(), v)) keep = v;
    for (LitId l : blk)
      if (!lit_neg(l) && keep == -1) keep = v;
  }
  if (keep == -1) keep = per_var.begin()->first;
  Clause main = rest;
  for (auto& [v, blk] : per_var) {
    Clause b = blk;
    normalize_clause(b);
    bool shared = std::binary_search(rest_fv.begin(), rest_fv.end(), v);
    bool negative = true;
    for (LitId l : b)
      if (!lit_neg(l)) negative = false;
    if (v == keep || shared || !negative) {
      for (LitId l : b) main.push_back(l);
      continue;
    }
    PredId name = w.pred_for_block(b);
    main.push_back(make_lit(w.atom(name, {}), true));
    Clause companion = b;
    companion.push_back(make_lit(w.atom(name, {}), false));
    normalize_clause(companion);
    extra.push_back(companion);
  }
  normalize_clause(main);
  return main;
}

struct CombinedEngine {
  World& w;
  EngineOptions opt;
  bool horn;
  InstantiationContext ctx;
  bool incomplete = false;

  CombinedEngine(World& w, const EngineOptions& opt, bool horn)
      : w(w), opt(opt), horn(horn) {}

  // Normalization pass applied to inputs.
  std::vector<Clause> preprocess(const std::vector<Clause>& branch) {
    std::vector<Clause> folded;
    for (const Clause& c : branch) folded.push_back(fold_literals(w, ctx, c));
    std::vector<Clause> split;
    for (const Clause& c : folded) q0_split(w, c, split);
    if (!horn) return split;
    std::vector<Clause> named;
    for (const Clause& c : split) {
      std::vector<Clause> extra;
      Clause main = q1_name(w, c, extra);
      named.push_back(main);
      named.insert(named.end(), extra.begin(), extra.end());
    }
    return named;
  }

  // The Horn fixpoint. Returns Unsat when the empty clause is derived.
  Verdict run_horn(const std::vector<Clause>& start) {
    WorkingSet ws(w, ctx, opt, /*horn=*/true);
    for (const Clause& c : start) ws.add(c, "input", {});
    if (ws.seen.count(Clause{})) return Verdict::Unsat;

    for (int tier = 0; tier <= 1; ++tier) {
      bool tier_incomplete = false;
      InstanceEngine inst_eng(ws, tier);
      HornProp hp(w);
      bool progress = true;
      size_t rounds = 0;
      while (progress) {
        progress = false;
        if (++rounds > opt.node_cap || past_deadline(opt.deadline)) {
          tier_incomplete = true;
          break;
        }
        std::vector<std::pair<Clause, int>> fresh;
        inst_eng.refresh(&fresh);
        if (inst_eng.truncated()) tier_incomplete = true;
        for (auto& [c, origin] : fresh) hp.add_clause(c, origin);
        std::vector<int> why;
        if (!hp.commit(&why)) {
          ws.add(Clause{}, "extend", why);
          return Verdict::Unsat;
        }
        // The empty candidate was handled by commit; sweep the block
        // candidates over the atoms of the instance set, adding every
        // conclusion the entailment check supports.
        CandidateUniverse uni = build_universe(w, ctx, ctx.r, hp);
        CandidateSearch cs(w, uni, opt.core_cap);
        bool added_any = false;
        auto [stopped, exhausted] = cs.run([&](const std::vector<int>& picked) {
          std::vector<AsmEntry> lits;
          for (int e : picked) lits.push_back(uni.entries[e]);
          // Horn shape: at most one positive among blocks and tags.
          int pos = 0;
          for (const AsmEntry& e : lits)
            if (!e.neg) ++pos;
          if (pos > 1) return 2;
          Candidate cand = make_candidate(w, lits, ctx.cv);
          if (cand.blocks.empty()) return 0;
          // The name budget must fit the engine bound.
          int k = static_cast<int>(cand.blocks.size());
          int neg_names = 0;
          for (LitId l : cand.name_lits)
            if (lit_neg(l)) ++neg_names;
          if (k == 1 && neg_names > ctx.r) return 0;
          if (k > 1 && neg_names > 0) return 0;
          // Build the conclusion first: skip the entailment query when it
          // is already present.
          int first = 0;
          for (int i = 0; i < k; ++i) {
            for (LitId l : cand.blocks[i])
              if (!lit_neg(l)) first = i;
          }
          Clause conclusion = cand.blocks[first];
          std::vector<Clause> companions;
          for (int i = 0; i < k; ++i) {
            if (i == first) continue;
            PredId name = w.pred_for_block(cand.blocks[i]);
            conclusion.push_back(make_lit(w.atom(name, {}), true));
            Clause companion = cand.blocks[i];
            companion.push_back(make_lit(w.atom(name, {}), false));
            normalize_clause(companion);
            companions.push_back(std::move(companion));
          }
          for (LitId l : cand.ground_tags) conclusion.push_back(l);
          for (LitId l : cand.name_lits) conclusion.push_back(l);
          normalize_clause(conclusion);
          bool fresh = !ws.seen.count(canon_clause(w, conclusion));
          for (const Clause& c : companions)
            if (!ws.seen.count(canon_clause(w, c))) fresh = true;
          if (!fresh) return 2;  // extensions are subsumed
          std::vector<std::pair<int, bool>> units = assumptions_for(hp, lits);
          std::vector<int> why;
          if (!hp.query_unsat(units, &why)) return 0;
          if (ws.add(conclusion, "extend", why) >= 0) added_any = true;
          for (const Clause& c : companions)
            if (ws.add(c, "name", why) >= 0) added_any = true;
          return 2;  // sweep on, but skip weaker extensions
        });
        (void)stopped;
        if (exhausted) tier_incomplete = true;
        progress = added_any;
      }
      if (std::getenv("BC_DEBUG_STATS"))
        std::cerr << "tier " << tier << ": rounds=" << rounds
                  << " ws=" << ws.clauses.size() << " props="
                  << hp.prop_count() << " inc=" << tier_incomplete << "\n";
      // Tier 0 under-approximates the instance sets; its fixpoint cannot
      // certify satisfiability, so rerun at the full tier. Only the final
      // tier's truncation state matters for the verdict.
      if (tier == 1) incomplete = tier_incomplete;
    }
    if (ws.seen.count(Clause{})) return Verdict::Unsat;
    return incomplete ? Verdict::Unknown : Verdict::Sat;
  }

  // Backtracking search for the non-Horn combined procedure.
  std::set<std::vector<Clause>> visited;
  size_t nodes = 0;

  Verdict run_search(std::vector<Clause> clauses) {
    std::vector<Clause> key = clauses;
    std::sort(key.begin(), key.end());
    key.erase(std::unique(key.begin(), key.end()), key.end());
    if (visited.count(key)) return Verdict::Unsat;
    if (++nodes > opt.node_cap || past_deadline(opt.deadline)) {
      incomplete = true;
      return Verdict::Unknown;
    }
    WorkingSet ws(w, ctx, opt, /*horn=*/false);
    for (const Clause& c : clauses)
      ws.add(c, "input", {});
    if (ws.seen.count(Clause{})) {
      visited.insert(key);
      return Verdict::Unsat;
    }

    InstanceBuild inst = build_relevant_instances(ws, /*tier=*/1);
    if (inst.truncated) incomplete = true;
    PropInstance pi;
    for (auto& [c, origin] : inst.instances) pi.add_clause(w, c);
    auto unsat_with = [&](const std::vector<AsmEntry>& lits) {
      PropInstance q = pi;
      for (const AsmEntry& e : lits) q.add_unit(q.intern(e.atom), e.neg);
      if (q.horn()) return horn_sat(q) == SatResult::Unsat;
      return sat(q) == SatResult::Unsat;
    };
    if (unsat_with({})) {
      visited.insert(key);
      return Verdict::Unsat;
    }

    CandidateUniverse uni =
        build_universe(w, &ctx, ctx.r, inst.instances, true, false);
    CandidateSearch cs(w, uni, opt.core_cap);
    std::optional<Candidate> found;
    auto [stopped, exhausted] = cs.run([&](const std::vector<int>& picked) {
      std::vector<AsmEntry> lits;
      for (int e : picked) lits.push_back(uni.entries[e]);
      Candidate cand = make_candidate(w, lits, ctx.cv);
      if (cand.blocks.empty()) return 0;
      for (const Clause& b : cand.blocks) {
        for (const Clause& have : clauses) {
          if (!is_block(w, have)) continue;
          Clause hc = clause_at_var(w, have, ctx.cv);
          if (std::includes(b.begin(), b.end(), hc.begin(), hc.end()))
            return 0;
        }
      }
      if (!unsat_with(lits)) return 0;
      found = std::move(cand);
      return 1;
    });
    if (exhausted) incomplete = true;
    if (!found) return incomplete ? Verdict::Unknown : Verdict::Sat;
    bool unknown = false;
    for (size_t i = 0; i < found->blocks.size(); ++i) {
      // The splitting-literal part rides along on the first branch only.
      Clause add = found->blocks[i];
      if (i == 0) {
        for (LitId l : found->ground_tags) add.push_back(l);
        normalize_clause(add);
      }
      auto next = clauses;
      next.push_back(canon_clause(w, add));
      Verdict v = run_search(std::move(next));
      if (v == Verdict::Sat) return Verdict::Sat;
      if (v == Verdict::Unknown) unknown = true;
    }
    if (!unknown) visited.insert(key);
    return unknown ? Verdict::Unknown : Verdict::Unsat;
  }
};

std::vector<Clause> check_combined_inputs(World& w,
                                          const std::vector<Clause>& s,
                                          bool horn) {
  for (const Clause& c : s) {
    if (horn) {
      int pos = 0;
      for (LitId l : c)
        if (!lit_neg(l)) ++pos;
      if (pos > 1)
        throw InputError("clause is not Horn: " + w.show_clause(c));
    }
    if (!is_onevar_clause(w, c) && !is_flat(w, c))
      throw InputError("clause is neither one-variable nor flat: " +
                       w.show_clause(c));
  }
  return s;
}

}  // namespace

Verdict decide_c(World& w, const std::vector<Clause>& s,
                 const EngineOptions& opt) {
  check_combined_inputs(w, s, false);
  bool unknown = false;
  for (auto& branch : eps_split(w, s, opt.node_cap)) {
    CombinedEngine eng(w, opt, /*horn=*/false);
    eng.ctx = build_context(w, branch);
    std::vector<Clause> start = eng.preprocess(branch);
    std::vector<Clause> canon;
    for (const Clause& c : start) canon.push_back(canon_clause(w, c));
    Verdict v = eng.run_search(std::move(canon));
    if (v == Verdict::Sat) return Verdict::Sat;
    if (v == Verdict::Unknown) unknown = true;
  }
  return unknown ? Verdict::Unknown : Verdict::Unsat;
}

Verdict decide_c_horn(World& w, const std::vector<Clause>& s,
                      const EngineOptions& opt) {
  check_combined_inputs(w, s, true);
  CombinedEngine eng(w, opt, /*horn=*/true);
  eng.ctx = build_context(w, s);
  std::vector<Clause> start = eng.preprocess(s);
  return eng.run_horn(start);
}

}  // namespace blindcopy
