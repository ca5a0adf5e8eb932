#pragma once

#include <string>
#include <vector>

#include "blindcopy/term.hpp"

namespace blindcopy {

/// Syntactic clause classes, most specific first. Flat never wins over
/// Complex/EpsilonClause (those two exhaust the flat clauses); it is kept
/// for completeness of the vocabulary.
enum class ClauseClass {
  EpsilonBlock,   // at most one variable, every literal function-free
  Ground,         // no variables
  Complex,        // flat with at least one non-trivial literal
  EpsilonClause,  // flat, all literals function-free, several variables
  OneVariable,    // at most one distinct variable
  CSecondForm,    // P(u[f(x...)]) literals, u a one-variable context
  Flat,
  Other,
};

const char* clause_class_name(ClauseClass c);

bool lit_trivial(const World& w, LitId l);
bool is_onevar_clause(const World& w, const Clause& c);
/// One-variable clause with only function-free literals.
bool is_block(const World& w, const Clause& c);
bool is_flat(World& w, const Clause& c);
bool is_complex(World& w, const Clause& c);

ClauseClass classify(World& w, const Clause& c);

/// Replace nested-context literals P(u[f(x1..xn)]) by Pu(f(x1..xn)) with
/// bridge clauses, leaving a set of flat and one-variable clauses.
/// Clauses outside the class are rejected with a diagnostic naming the
/// offending literal.
std::vector<Clause> c_to_flat_onevar(World& w, const std::vector<Clause>& s);

/// Encode n-ary atoms P(t1..tn), n >= 2, as P'(fn(t1..tn)) over fresh
/// unary predicates and tupling symbols.
std::vector<Clause> unarize(World& w, const std::vector<Clause>& s);

struct PreprocessOptions {
  size_t branch_cap = 1 << 16;
};

/// Decompose literal arguments of one-variable clauses using fresh
/// predicates, then split clauses mixing ground and non-ground literals.
/// Each output branch contains only ground clauses and clauses whose
/// literal arguments are non-ground and reduced.
std::vector<std::vector<Clause>> preprocess_onevar(
    World& w, const std::vector<Clause>& s, const PreprocessOptions& opt = {});

}  // namespace blindcopy
