#pragma once

#include <optional>
#include <span>
#include <vector>

#include "blindcopy/term.hpp"

namespace blindcopy {

/// True iff the non-ground one-variable term cannot be written as u[v[x]]
/// with both parts non-ground and non-trivial. Computed via the dominator
/// criterion on the shared-subterm DAG: a factorization point is a subterm
/// value covering every occurrence of the variable. Rejects ground or
/// multi-variable input.
bool is_reduced(World& w, TermId t);

/// Ordered factorization [t1,...,tn] of a non-ground one-variable term into
/// non-trivial, non-ground, reduced parts; plugging them back around the
/// variable reproduces the input. Unique; empty for the bare variable.
std::vector<TermId> decompose(World& w, TermId t);

/// Recompose parts around the variable `var`.
TermId compose(World& w, std::span<const TermId> parts, int var);

enum class UnifyShapeKind {
  Identical,   // terms equal up to renaming of their variables
  XtoU,        // sigma = {x -> u[y]}, u a non-ground strict subterm
  YtoU,        // sigma = {y -> u[x]}
  BothGround,  // sigma maps both variables to ground terms
  Fail,
};

struct UnifierShape {
  UnifyShapeKind kind = UnifyShapeKind::Fail;
  Subst sigma;
};

/// Unify two non-ground, non-trivial one-variable terms over distinct
/// variables and classify the unifier. When both inputs are reduced and not
/// equal up to renaming, the result is Identical or BothGround with both
/// values built from a non-ground strict subterm plugged with a ground one.
UnifierShape unify_one_var(World& w, TermId s, TermId t);

struct SameVarResult {
  enum Kind { Identical, Unifies, Fail } kind = Fail;
  Subst sigma;  // for Unifies: binds the shared variable to a ground strict
                // subterm of one of the inputs
};

/// Unify two non-trivial, non-ground one-variable terms over the same
/// variable.
SameVarResult unify_same_var(World& w, TermId s, TermId t);

/// Match a one-variable pattern against a target: the term bound to the
/// pattern's variable such that plugging reproduces the target, if any.
std::optional<TermId> match_onevar(World& w, TermId pattern, TermId target);

/// Membership in {u[v] : u in us, v in vs}; a trivial u accepts vs members.
bool in_plugged_set(World& w, TermId t, std::span<const TermId> us,
                    std::span<const TermId> vs);

}  // namespace blindcopy
