#pragma once

#include <optional>
#include <unordered_map>
#include <vector>

#include "blindcopy/term.hpp"

namespace blindcopy {

enum class SatResult { Sat, Unsat };

/// Clause set over opaque propositions. Every distinct atom id (ground or
/// not) is one proposition; comparison is syntactic, which is exactly the
/// interning the propositional entailment relation wants.
class PropInstance {
 public:
  int intern(AtomId a);
  /// Add a clause; returns its index.
  int add_clause(const World& w, const Clause& c);
  /// Add a single-literal clause for an already-interned proposition.
  int add_unit(int prop, bool neg);

  int prop_count() const { return static_cast<int>(atoms_.size()); }
  int clause_count() const { return static_cast<int>(clauses_.size()); }
  AtomId prop_atom(int i) const { return atoms_[i]; }
  std::optional<int> find(AtomId a) const;
  bool horn() const { return horn_; }
  /// Signed props: +(i+1) positive, -(i+1) negative.
  const std::vector<std::vector<int>>& clauses() const { return clauses_; }

 private:
  std::vector<AtomId> atoms_;
  std::unordered_map<AtomId, int> index_;
  std::vector<std::vector<int>> clauses_;
  bool horn_ = true;
};

/// Unit propagation for Horn instances. Rejects non-Horn input.
/// When `reasons` is given, it receives for each derived proposition the
/// clause index that fired (size = prop_count, -1 when underived), and
/// `conflict` the clause that became empty on Unsat.
SatResult horn_sat(const PropInstance& inst, std::vector<int>* reasons = nullptr,
                   int* conflict = nullptr);

/// Complete DPLL search with unit propagation; deterministic branching
/// (lowest proposition index first, positive before negative). On Sat,
/// `model` (if given) receives one satisfying assignment.
SatResult sat(const PropInstance& inst, std::vector<bool>* model = nullptr);

/// Propositional entailment: S entails C iff S together with the negations
/// of C's literals is unsatisfiable. Uses horn_sat when possible.
bool entails_p(World& w, const std::vector<Clause>& s, const Clause& c);

}  // namespace blindcopy
