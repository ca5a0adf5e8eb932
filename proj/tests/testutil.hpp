#pragma once

#include <functional>
#include <optional>
#include <random>
#include <vector>

#include "blindcopy/term.hpp"

namespace bctest {

using namespace blindcopy;

/// Small fixed signature: f/2, g/1, a/0.
struct SmallSig {
  World w;
  FunId f, g, a;
  SmallSig() : f(w.fun("f", 2)), g(w.fun("g", 1)), a(w.fun("a", 0)) {}
};

/// All terms of depth <= d over f/2, g/1, a/0 and the given variables.
std::vector<TermId> enumerate_terms(World& w, FunId f, FunId g, FunId a,
                                    const std::vector<int>& vars, int depth);

/// Random term over the declared signature; variables drawn from `vars`
/// (empty for ground terms).
TermId random_term(World& w, std::mt19937& rng, const std::vector<int>& vars,
                   int depth);

/// Random one-variable term over the given variable, guaranteed non-ground.
TermId random_onevar_term(World& w, std::mt19937& rng, int var, int depth);

/// Independent most-general-unifier oracle: the textbook multiset rewrite
/// system (Delete / Decomp / Bind / Fail1 / Fail2) run to solved form.
std::optional<Subst> mgu_oracle(World& w, TermId s, TermId t);

}  // namespace bctest
