#ifndef DYNCALC_CUTELIM_HPP
#define DYNCALC_CUTELIM_HPP

#include <stdexcept>
#include <string>
#include <vector>

#include "dyncalc/checker.hpp"

// Belnap-style cut elimination: principal-stage rewrites on matching
// introductions, parametric-stage history-tree substitution, and the driver
// that alternates them under a well-founded (complexity, height) measure.

namespace dyncalc {

struct CutRank {
  int complexity = 0; // operational size of the cut term
  int height = 0;     // sum of the premise subtree heights
};
bool rank_less(const CutRank& a, const CutRank& b);

struct ReduceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// True when the rule application concluding `t` introduces the whole lhs/rhs
// as a principal operational term.
bool principal_on_left(const ProofRef& t, Base base);
bool principal_on_right(const ProofRef& t, Base base);

CutRank cut_rank_at(const ProofRef& t, const std::vector<int>& cut_path);

// Rewrites the cut node at cut_path, whose cut term is principal in both
// premises (or which is one of the degenerate axiom/identity shapes), into
// the corresponding reduction; introduced cuts are strongly type-uniform and
// strictly smaller in cut-term complexity. Throws ReduceError.
ProofRef principal_reduce(const ProofRef& t, const std::vector<int>& cut_path,
                          Base base = Base::Intuitionistic);

// Pushes the cut at cut_path through the history tree of one parametric
// cut-term occurrence. Throws ReduceError (HistoryUntraceable and friends).
ProofRef parametric_reduce(const ProofRef& t, const std::vector<int>& cut_path,
                           Base base = Base::Intuitionistic);

struct EliminationResult {
  bool ok = false;
  ProofRef proof; // cut-free on success, residual tree on failure
  int steps = 0;
  std::string error;
};

EliminationResult eliminate_cuts(const ProofRef& t, int fuel = 100000,
                                 Base base = Base::Intuitionistic);

} // namespace dyncalc

#endif
