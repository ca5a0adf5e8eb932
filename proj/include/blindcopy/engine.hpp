#pragma once

#include <optional>
#include <vector>

#include "blindcopy/context.hpp"
#include "blindcopy/saturate.hpp"
#include "blindcopy/term.hpp"

namespace blindcopy {

/// Working-clause types of the combined procedure. Every clause in the
/// engine's working set is one of these, up to a part of splitting
/// literals: a block of function-free literals over one variable, a
/// one-variable clause over shuffle terms, a ground clause over plugged
/// shuffle terms, or a complex clause.
enum class WorkType { Block, OneVar, Ground, Complex };

/// The splitting-literal part is separated from the core.
struct TypedClause {
  WorkType type;
  Clause core;
  Clause tags;  // splitting literals
};

/// Type-check a working clause against the context vocabulary; nullopt when
/// it fits no type. `horn_names` additionally enforces the Horn variant:
/// the name-erased clause is Horn and carries at most r negative block-name
/// literals.
std::optional<TypedClause> classify_work(World& w,
                                         const InstantiationContext& ctx,
                                         const Clause& c, bool horn_names);

/// Replace every signed literal-name atom by the literal it stands for,
/// with the opposite sign; block-name atoms are kept.
Clause erase_literal_names(World& w, const Clause& c);

struct EngineOptions {
  size_t set_cap = 40000;        // per generated term set
  size_t instance_cap = 2000000; // generated propositional instances
  size_t node_cap = 20000;       // search nodes / fixpoint additions
  size_t core_cap = 50000;       // assumption-core enumeration nodes
  std::optional<std::chrono::steady_clock::time_point> deadline;
  DerivationLog* log = nullptr;
};

/// Decide a set of flat clauses by searching for a saturated extension of
/// each split branch, checking propositional entailment of block clauses
/// over the instantiated working set.
Verdict decide_flat(World& w, const std::vector<Clause>& s,
                    const EngineOptions& opt = {});

/// Decide a set of flat and one-variable clauses (the combined class).
Verdict decide_c(World& w, const std::vector<Clause>& s,
                 const EngineOptions& opt = {});

/// Decide a Horn set of flat and one-variable clauses by the deterministic
/// naming fixpoint; derived block clauses are tagged with fresh zero-ary
/// names instead of branching.
Verdict decide_c_horn(World& w, const std::vector<Clause>& s,
                      const EngineOptions& opt = {});

}  // namespace blindcopy
