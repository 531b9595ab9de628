#ifndef DYNCALC_DISPLAY_HPP
#define DYNCALC_DISPLAY_HPP

#include <optional>
#include <string>
#include <vector>

#include "dyncalc/rules.hpp"
#include "dyncalc/syntax.hpp"

// The relativized display property as bounded search: isolate a substructure
// occurrence on one side of the turnstile using display postulates only.

namespace dyncalc {

enum class PostDirection { Down, Up };

struct PostulateStep {
  std::string name;
  PostDirection direction;
  Sequent result;
};

// All display postulates whose pattern matches s at the root, each with the
// resulting sequent; both directions of each double-line rule are tried.
std::vector<PostulateStep> applicable_postulates(const Sequent& s);

struct DisplayResult {
  bool ok = false;
  std::vector<PostulateStep> steps; // empty when already displayed
  std::vector<OccPath> trail;       // target position after each step
  Side side = Side::Precedent;      // side the target ends up on
  Sequent final;                    // equals s when steps is empty
  std::string error;
};

// Breadth-first search over the display-postulate rewrite graph with
// visited-sequent memoization; shortest witness first.
DisplayResult display_search(const Sequent& s, const OccPath& target,
                             int max_depth = 30);

} // namespace dyncalc

#endif
