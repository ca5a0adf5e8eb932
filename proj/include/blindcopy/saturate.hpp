#pragma once

#include <chrono>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "blindcopy/context.hpp"
#include "blindcopy/term.hpp"

namespace blindcopy {

enum class Verdict { Sat, Unsat, Unknown };
const char* verdict_name(Verdict v);

/// Strict subterm ordering on atoms: P(s) before Q(t) iff s is a strict
/// subterm of t. Only unary non-splitting atoms are comparable; splitting
/// atoms sit below every non-splitting atom.
bool atom_less(World& w, AtomId a, AtomId b);

/// No literal in `c` is strictly greater than `l`.
bool lit_maximal(World& w, const Clause& c, LitId l);

/// One derivation step for the trace.
struct DerivationEntry {
  Clause clause;
  std::string rule;
  std::vector<int> premises;  // indices of earlier entries
};

struct DerivationLog {
  std::vector<DerivationEntry> entries;
  int add(Clause c, std::string rule, std::vector<int> premises = {});
  std::string render(const World& w) const;
};

/// Binary ordered resolution with the splitting-literal selection rule:
/// a clause with a negative splitting literal must resolve on one, and a
/// positive splitting literal is eligible only when the clause consists of
/// splitting literals alone. With no splitting literals present this is
/// plain binary ordered resolution. Premises are renamed apart; both
/// orientations are produced.
std::vector<Clause> resolve_ordered(World& w, const Clause& c1,
                                    const Clause& c2);

/// Ordered factorization: one clause per unifiable same-sign pair of
/// maximal literals.
std::vector<Clause> factor_ordered(World& w, const Clause& c);

struct SaturateOptions {
  size_t clause_cap = 200000;
  size_t step_cap = 2000000;
  std::optional<std::chrono::steady_clock::time_point> deadline;
  DerivationLog* log = nullptr;
};

inline bool past_deadline(
    const std::optional<std::chrono::steady_clock::time_point>& d) {
  return d && std::chrono::steady_clock::now() > *d;
}

/// Decide satisfiability of one branch of ground / reduced one-variable
/// clauses by saturation under ordered resolution and factorization.
/// Every derived clause is checked against the closure vocabulary of the
/// input (argument in Ng or Ng[Ngs[G]]); a violation aborts, since it
/// indicates an engine bug.
Verdict decide_onevar(World& w, const std::vector<Clause>& branch,
                      const SaturateOptions& opt = {});

struct OracleOptions {
  size_t term_cap = 4000;
  size_t instance_cap = 400000;
  bool model_check = true;
};

/// Instantiate all clauses with ground terms up to `depth` and decide the
/// propositional instance set. Unsat is definitive. Sat is definitive only
/// when the found model provably extends to a full Herbrand model (checked
/// with an out-of-universe marker); otherwise Unknown.
Verdict ground_saturation_oracle(World& w, const std::vector<Clause>& s,
                                 int depth, const OracleOptions& opt = {});

/// Ground terms of depth <= depth over the declared signature, capped.
std::vector<TermId> ground_universe(World& w, int depth, size_t cap,
                                    bool* truncated = nullptr);

}  // namespace blindcopy
