#pragma once

#include <map>
#include <vector>

#include "blindcopy/term.hpp"

namespace blindcopy {

/// Budget exhaustion during normalization; distinct from input errors.
struct BudgetExceeded : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A set of normal definite clauses over power-set states: heads p(s),
/// bodies function-free, repetition-free, over head variables only. Viewed
/// as a generalized tree automaton: term t is accepted at state p iff p(t)
/// is derivable.
class NormalSet {
 public:
  World* w = nullptr;
  std::vector<Clause> clauses;

  /// State standing for the intersection of the given base predicates.
  PredId state(const std::vector<PredId>& base);
  /// The singleton state of a base predicate.
  PredId state_of(PredId base) { return state({base}); }
  bool has_state(PredId p) const;
  const std::vector<PredId>& members(PredId state) const;
  std::vector<PredId> states() const;

 private:
  friend class Normalizer;
  std::map<std::vector<PredId>, PredId> state_by_set_;
  std::map<PredId, std::vector<PredId>> set_by_state_;
};

struct NormalizeOptions {
  size_t state_cap = 4096;
  size_t clause_cap = 100000;
  size_t round_cap = 10000000;
};

/// Saturate the definite part of a Horn set of flat and one-variable
/// clauses into normal clauses. Each resulting state accepts exactly the
/// terms accepted by each of its member predicates in the input.
NormalSet normalize(World& w, const std::vector<Clause>& s,
                    const NormalizeOptions& opt = {});

/// True iff some ground term is accepted at the state.
bool nonempty(World& w, const NormalSet& n, PredId state);

/// True iff the ground term t is accepted at the state.
bool accepts(World& w, const NormalSet& n, PredId state, TermId t);

}  // namespace blindcopy
