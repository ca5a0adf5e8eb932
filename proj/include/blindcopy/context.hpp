#pragma once

#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "blindcopy/term.hpp"

namespace blindcopy {

/// One literal-rewriting rule: from(part[x]) may be rewritten to to(x),
/// where `to` is `from` with `part` absorbed into the predicate name. The
/// right side is smaller in the subterm ordering by construction.
struct FoldRule {
  PredId from;
  TermId part;  // non-trivial reduced one-variable term, canonical variable
  PredId to;
};

/// Precomputed term vocabulary of a clause set: the argument terms of its
/// one-variable clauses, their subterms, the reduced building blocks, the
/// prefix compositions, the ground subterms, and the derived (lazily
/// tested) shuffle sets. All stored terms use the canonical variable.
class InstantiationContext {
 public:
  World* w = nullptr;
  int r = 0;        // maximal function arity when the context was built
  int cv = 0;       // canonical variable index (r + 1)

  std::vector<TermId> onevar_args;      // non-ground literal arguments
  std::vector<TermId> onevar_subterms;  // their non-ground subterms
  std::vector<TermId> reduced_units;    // outermost decomposition parts
  std::vector<TermId> part_prefixes;    // prefix compositions of parts
  std::vector<TermId> ground_subterms;  // ground subterms of literal args
  std::vector<PredId> base_preds;       // predicate alphabet of the input

  std::vector<FoldRule> fold_rules;
  /// Bridge clauses making each fold rule's sides equivalent.
  std::vector<Clause> fold_clauses;

  TermId canon_var() const { return w->var(cv); }

  /// Rename a term's single variable (if any) to the canonical one.
  TermId at_canon(TermId t) const;

  // ----- membership tests (sets closed under renaming) -----
  bool in_onevar_args(TermId t) const;     // Ng
  bool in_subterm_ground(TermId t) const;  // Ngs[G]
  bool in_arg_ground(TermId t) const;      // Ng[Ngs[G]]
  bool in_prefixes(TermId t) const;        // Ngrr
  bool in_arg_shuffles(TermId t) const;    // Ngr1: arity-preserving arg shuffles
  bool in_ground_shuffles(TermId t) const; // G1
  bool in_prefix_ground(TermId t) const;   // Ngrr[G1]
  bool in_shuffle_ground(TermId t) const;  // Ngr1[Ngrr[G1]]

  // ----- bounded enumerations (deterministic order) -----
  /// Flat patterns f(xi1,...,xin) with variables from x1..xr.
  std::vector<TermId> flat_patterns() const;
  /// Arg-shuffle closure of the reduced units (full set; may be large).
  std::vector<TermId> arg_shuffles(size_t cap, bool* truncated) const;
  /// Arg-shuffle closure of the ground subterms.
  std::vector<TermId> ground_shuffles(size_t cap, bool* truncated) const;
  /// {u[v] : u in us, v in vs} with caps.
  std::vector<TermId> plugged(std::span<const TermId> us,
                              std::span<const TermId> vs, size_t cap,
                              bool* truncated) const;

  /// Predicate for base predicate `p` with absorbed prefix (a part_prefixes
  /// member); the trivial prefix returns `p` itself.
  PredId prefixed_pred(PredId p, TermId prefix) const;

 private:
  friend InstantiationContext build_context(World& w,
                                            const std::vector<Clause>& s);
  std::vector<std::vector<TermId>> reduced_argsets_;  // from reduced_units
  std::vector<std::vector<TermId>> ground_argsets_;   // from ground_subterms
  mutable std::unordered_map<TermId, bool> shuffle_ground_memo_;
};

/// Build the context for a clause set of one-variable and complex clauses.
InstantiationContext build_context(World& w, const std::vector<Clause>& s);

}  // namespace blindcopy
