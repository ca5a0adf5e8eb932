#include "blindcopy/prop.hpp"

#include <algorithm>

namespace blindcopy {

int PropInstance::intern(AtomId a) {
  auto it = index_.find(a);
  if (it != index_.end()) return it->second;
  int i = static_cast<int>(atoms_.size());
  atoms_.push_back(a);
  index_.emplace(a, i);
  return i;
}

std::optional<int> PropInstance::find(AtomId a) const {
  auto it = index_.find(a);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

int PropInstance::add_clause(const World&, const Clause& c) {
  std::vector<int> lits;
  int pos = 0;
  for (LitId l : c) {
    int p = intern(lit_atom(l)) + 1;
    if (!lit_neg(l)) ++pos;
    lits.push_back(lit_neg(l) ? -p : p);
  }
  std::sort(lits.begin(), lits.end());
  lits.erase(std::unique(lits.begin(), lits.end()), lits.end());
  if (pos > 1) horn_ = false;
  clauses_.push_back(std::move(lits));
  return static_cast<int>(clauses_.size()) - 1;
}

int PropInstance::add_unit(int prop, bool neg) {
  clauses_.push_back({neg ? -(prop + 1) : (prop + 1)});
  return static_cast<int>(clauses_.size()) - 1;
}

SatResult horn_sat(const PropInstance& inst, std::vector<int>* reasons,
                   int* conflict) {
  BC_CHECK(inst.horn(), "horn_sat requires Horn input");
  const auto& clauses = inst.clauses();
  int n = inst.prop_count();
  std::vector<bool> truth(n, false);
  if (reasons) reasons->assign(n, -1);

  // For each clause: number of unsatisfied negative literals, its positive
  // literal (0 when none), and per-atom occurrence lists.
  std::vector<int> pending(clauses.size(), 0);
  std::vector<int> head(clauses.size(), 0);
  std::vector<std::vector<int>> occ(n);
  std::vector<int> queue;

  auto derive = [&](int prop, int cls) {
    if (truth[prop]) return;
    truth[prop] = true;
    if (reasons) (*reasons)[prop] = cls;
    queue.push_back(prop);
  };

  for (size_t i = 0; i < clauses.size(); ++i) {
    for (int lit : clauses[i]) {
      if (lit > 0) {
        head[i] = lit;
      } else {
        ++pending[i];
        occ[-lit - 1].push_back(static_cast<int>(i));
      }
    }
    if (pending[i] == 0) {
      if (head[i] == 0) {
        if (conflict) *conflict = static_cast<int>(i);
        return SatResult::Unsat;  // the empty clause
      }
      derive(head[i] - 1, static_cast<int>(i));
    }
  }
  while (!queue.empty()) {
    int prop = queue.back();
    queue.pop_back();
    for (int ci : occ[prop]) {
      if (--pending[ci] == 0) {
        if (head[ci] == 0) {
          if (conflict) *conflict = ci;
          return SatResult::Unsat;
        }
        derive(head[ci] - 1, ci);
      }
    }
  }
  return SatResult::Sat;
}

namespace {

enum : int8_t { kUnset = 0, kTrue = 1, kFalse = -1 };

bool dpll(const std::vector<std::vector<int>>& clauses,
          std::vector<int8_t>& assign) {
  // Unit propagation by full scans; instances here are small.
  for (;;) {
    bool changed = false;
    for (const auto& c : clauses) {
      int unassigned = 0, last = 0;
      bool satisfied = false;
      for (int lit : c) {
        int8_t v = assign[std::abs(lit) - 1];
        if (v == kUnset) {
          ++unassigned;
          last = lit;
        } else if ((v == kTrue) == (lit > 0)) {
          satisfied = true;
          break;
        }
      }
      if (satisfied) continue;
      if (unassigned == 0) return false;
      if (unassigned == 1) {
        assign[std::abs(last) - 1] = last > 0 ? kTrue : kFalse;
        changed = true;
      }
    }
    if (!changed) break;
  }
  int branch = -1;
  for (size_t i = 0; i < assign.size(); ++i) {
    if (assign[i] == kUnset) {
      branch = static_cast<int>(i);
      break;
    }
  }
  if (branch < 0) return true;
  auto saved = assign;
  assign[branch] = kTrue;
  if (dpll(clauses, assign)) return true;
  assign = saved;
  assign[branch] = kFalse;
  if (dpll(clauses, assign)) return true;
  assign = saved;
  return false;
}

}  // namespace

SatResult sat(const PropInstance& inst, std::vector<bool>* model) {
  std::vector<int8_t> assign(inst.prop_count(), kUnset);
  for (const auto& c : inst.clauses())
    if (c.empty()) return SatResult::Unsat;
  if (!dpll(inst.clauses(), assign)) return SatResult::Unsat;
  if (model) {
    model->assign(inst.prop_count(), false);
    for (int i = 0; i < inst.prop_count(); ++i)
      (*model)[i] = (assign[i] == kTrue);
  }
  return SatResult::Sat;
}

bool entails_p(World& w, const std::vector<Clause>& s, const Clause& c) {
  PropInstance inst;
  for (const Clause& cl : s) inst.add_clause(w, cl);
  for (LitId l : c) inst.add_unit(inst.intern(lit_atom(l)), !lit_neg(l));
  if (inst.horn()) return horn_sat(inst) == SatResult::Unsat;
  return sat(inst) == SatResult::Unsat;
}

}  // namespace blindcopy
