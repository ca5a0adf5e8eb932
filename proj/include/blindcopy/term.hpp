#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace blindcopy {

using FunId = int32_t;
using PredId = int32_t;
using TermId = int32_t;
using AtomId = int32_t;

/// Literal = atom id with a sign packed into the low bit.
using LitId = int32_t;

constexpr TermId kNoTerm = -1;

inline LitId make_lit(AtomId a, bool neg) { return (a << 1) | (neg ? 1 : 0); }
inline AtomId lit_atom(LitId l) { return l >> 1; }
inline bool lit_neg(LitId l) { return l & 1; }
inline LitId lit_flip(LitId l) { return l ^ 1; }

/// A clause is a sorted, duplicate-free vector of literals. The empty
/// vector is the empty clause.
using Clause = std::vector<LitId>;

struct InternalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

#define BC_CHECK(cond, msg)                                           \
  do {                                                                \
    if (!(cond)) throw ::blindcopy::InternalError(std::string(msg));  \
  } while (0)

/// How a predicate symbol came to exist.
enum class PredKind : uint8_t {
  Plain,        // declared by the user or a transformation
  Prefixed,     // base predicate that absorbed a one-variable term prefix
  LiteralName,  // zero-ary name standing for a ground literal
  BlockName,    // zero-ary name standing for a one-variable block
};

/// Problem instance: symbol tables plus hash-consed terms and atoms.
///
/// All stored values are immutable once interned; the arenas only grow.
/// Sharing a World across threads requires external synchronization of the
/// interning calls; reads of already-interned data are safe.
class World {
 public:
  // ----- function symbols -----
  FunId fun(std::string_view name, int arity);
  std::optional<FunId> find_fun(std::string_view name) const;
  const std::string& fun_name(FunId f) const { return funs_[f].name; }
  int fun_arity(FunId f) const { return funs_[f].arity; }
  int fun_count() const { return static_cast<int>(funs_.size()); }
  /// Maximal declared function arity (the r of the instance).
  int max_arity() const { return max_arity_; }

  // ----- predicate symbols -----
  PredId pred(std::string_view name, int arity);
  std::optional<PredId> find_pred(std::string_view name) const;
  /// Predicate that stands for `base` with an absorbed term prefix.
  /// `prefix` must be a non-ground one-variable term; the id is interned
  /// modulo renaming of the prefix.
  PredId pred_with_prefix(PredId base, TermId prefix);
  /// Zero-ary name for a ground literal (splitting tag).
  PredId pred_for_literal(LitId lit);
  /// Zero-ary name for a one-variable block (splitting tag); the block is
  /// canonicalized, so names agree modulo renaming.
  PredId pred_for_block(const Clause& block);

  const std::string& pred_name(PredId p) const { return preds_[p].name; }
  int pred_arity(PredId p) const { return preds_[p].arity; }
  PredKind pred_kind(PredId p) const { return preds_[p].kind; }
  PredId pred_base(PredId p) const { return preds_[p].base; }
  TermId pred_prefix(PredId p) const { return preds_[p].prefix; }
  LitId pred_literal(PredId p) const { return preds_[p].lit; }
  const Clause& pred_block(PredId p) const { return blocks_[preds_[p].block]; }
  bool is_split_pred(PredId p) const {
    PredKind k = preds_[p].kind;
    return k == PredKind::LiteralName || k == PredKind::BlockName;
  }
  int pred_count() const { return static_cast<int>(preds_.size()); }

  // ----- terms -----
  TermId var(int index);
  TermId app(FunId f, std::span<const TermId> args);
  TermId app(FunId f, std::initializer_list<TermId> args) {
    return app(f, std::span<const TermId>(args.begin(), args.size()));
  }
  TermId constant(std::string_view name) { return app(fun(name, 0), {}); }

  bool is_var(TermId t) const { return terms_[t].fn < 0; }
  int var_index(TermId t) const { return -terms_[t].fn; }
  FunId term_fun(TermId t) const { return terms_[t].fn; }
  // Node storage is reference-stable: spans and references stay valid while
  // new terms are interned.
  std::span<const TermId> term_args(TermId t) const {
    const TermData& d = terms_[t];
    return {d.args.data(), d.args.size()};
  }
  bool ground(TermId t) const { return terms_[t].fv.empty(); }
  bool trivial_term(TermId t) const { return is_var(t); }
  int term_depth(TermId t) const { return terms_[t].depth; }
  int term_size(TermId t) const { return terms_[t].size; }
  /// Sorted distinct variable indices of the term.
  const std::vector<int>& term_fv(TermId t) const { return terms_[t].fv; }

  // ----- atoms -----
  AtomId atom(PredId p, std::span<const TermId> args);
  AtomId atom(PredId p, std::initializer_list<TermId> args) {
    return atom(p, std::span<const TermId>(args.begin(), args.size()));
  }
  PredId atom_pred(AtomId a) const { return atoms_[a].pred; }
  std::span<const TermId> atom_args(AtomId a) const {
    const AtomData& d = atoms_[a];
    return {d.args.data(), d.args.size()};
  }
  const std::vector<int>& atom_fv(AtomId a) const { return atoms_[a].fv; }
  bool atom_ground(AtomId a) const { return atoms_[a].fv.empty(); }
  /// Argument of a unary atom.
  TermId atom_arg(AtomId a) const;

  // ----- printing -----
  std::string show(TermId t) const;
  std::string show_atom(AtomId a) const;
  std::string show_lit(LitId l) const;
  std::string show_clause(const Clause& c) const;

 private:
  struct FunInfo {
    std::string name;
    int arity;
  };
  struct PredInfo {
    std::string name;
    int arity;
    PredKind kind = PredKind::Plain;
    PredId base = -1;
    TermId prefix = -1;
    LitId lit = -1;
    int block = -1;
  };
  struct TermData {
    FunId fn;  // negative: variable with index -fn
    std::vector<TermId> args;
    int32_t depth = 0;
    int32_t size = 1;
    std::vector<int> fv;
  };
  struct AtomData {
    PredId pred;
    std::vector<TermId> args;
    std::vector<int> fv;
  };

  PredId intern_pred(PredInfo info);

  std::vector<FunInfo> funs_;
  std::unordered_map<std::string, FunId> fun_index_;
  int max_arity_ = 0;

  std::vector<PredInfo> preds_;
  std::unordered_map<std::string, PredId> pred_index_;

  std::deque<TermData> terms_;
  std::deque<AtomData> atoms_;
  std::unordered_map<uint64_t, std::vector<TermId>> term_buckets_;
  std::unordered_map<uint64_t, std::vector<AtomId>> atom_buckets_;
  std::vector<Clause> blocks_;
};

// ---------------------------------------------------------------------------
// Substitutions

/// Finite map from variable indices to terms. Identity bindings are never
/// stored. Most general unifiers produced here are idempotent: applying one
/// twice equals applying it once.
class Subst {
 public:
  Subst() = default;

  bool empty() const { return map_.empty(); }
  size_t size() const { return map_.size(); }
  void bind(int var, TermId t);
  std::optional<TermId> lookup(int var) const;
  const std::vector<std::pair<int, TermId>>& bindings() const { return map_; }

  TermId apply(World& w, TermId t) const;
  AtomId apply_atom(World& w, AtomId a) const;
  LitId apply_lit(World& w, LitId l) const;
  Clause apply_clause(World& w, const Clause& c) const;

 private:
  std::vector<std::pair<int, TermId>> map_;  // sorted by variable index
};

/// Most general unifier of two terms, or nullopt when none exists.
/// Deterministic: the rewrite steps are applied in a fixed order and the
/// output is fully composed out (idempotent).
std::optional<Subst> mgu(World& w, TermId s, TermId t);

/// One-sided matching: sigma with pattern*sigma == target, binding only
/// the pattern's variables.
std::optional<Subst> match_term(World& w, TermId pattern, TermId target);

/// As above, for atoms; fails on distinct predicates.
std::optional<Subst> mgu_atoms(World& w, AtomId a, AtomId b);

// ---------------------------------------------------------------------------
// Clause utilities

/// Sort + dedup literal vector in place.
void normalize_clause(Clause& c);
Clause clause_union(const Clause& a, const Clause& b);
bool clause_has(const Clause& c, LitId l);

/// Sorted distinct variable indices of a clause.
std::vector<int> clause_fv(const World& w, const Clause& c);
bool clause_ground(const World& w, const Clause& c);

/// Rename the second clause apart from the first; each output is a renaming
/// of its input and the two share no variables.
std::pair<Clause, Clause> rename_apart(World& w, const Clause& c1,
                                       const Clause& c2);

/// Canonical variant of a clause: variables renumbered 1..k, literals
/// sorted, minimal over all bijections. Two clauses are equal modulo
/// renaming iff their canonical variants are identical.
Clause canon_clause(World& w, const Clause& c);

/// Canonical variant of a one-variable clause placed at the given variable.
Clause clause_at_var(World& w, const Clause& c, int var);

/// Term with every occurrence of `piece` replaced by variable `var`.
TermId collapse(World& w, TermId t, TermId piece, int var);

/// Substitute `piece` for the single variable of a one-variable term.
TermId plug(World& w, TermId tmpl, TermId piece);

/// All strict subterms (proper, deduplicated, any depth).
std::vector<TermId> strict_subterms(World& w, TermId t);
/// All subterms including the term itself.
std::vector<TermId> subterms(World& w, TermId t);

bool is_strict_subterm(World& w, TermId sub, TermId t);

}  // namespace blindcopy
