#pragma once

#include <vector>

#include "blindcopy/protocol.hpp"
#include "blindcopy/term.hpp"

namespace blindcopy {

/// An alternating pushdown system as Horn clauses of three shapes:
///   (i)   P(a)                      with a a constant
///   (ii)  P(s[x]) | -Q(t[x])        with s, t spines of unary symbols
///   (iii) P(x) | -P1(x) | -P2(x)
struct Apds {
  std::vector<Clause> clauses;
};

/// Validate the three shapes; rejects anything else with a diagnostic.
Apds make_apds(World& w, const std::vector<Clause>& clauses);

enum class Reach { Reachable, Unknown };

struct ReachOptions {
  size_t atom_cap = 200000;
};

/// Bounded least-fixpoint reachability over ground atoms whose argument
/// depth stays within `depth`. Reachable is definitive. When the fixpoint
/// closes without hitting the bound, `closed` (if given) is set, making a
/// negative answer definitive as well.
Reach apds_reach_fixpoint(World& w, const Apds& a, AtomId goal, int depth,
                          bool* closed = nullptr,
                          const ReachOptions& opt = {});

/// The system's clauses plus the negated goal.
std::vector<Clause> apds_to_horn(World& w, const Apds& a, AtomId goal);

/// Encode reachability as protocol secrecy: atoms P(t) become messages
/// enc(pair(P, t), K) for a key the adversary never learns; each clause
/// becomes one rule between two control points, and the secret is the
/// encoded goal.
std::pair<ProtocolSpec, TermId> apds_to_protocol(World& w, const Apds& a,
                                                 AtomId goal);

}  // namespace blindcopy
