#ifndef DYNCALC_CHECKER_HPP
#define DYNCALC_CHECKER_HPP

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "dyncalc/rules.hpp"
#include "dyncalc/syntax.hpp"

// Proof-tree validation against the catalog: every node must be a rule
// instance, every sequent type-uniform; reduce/comp nodes are derived-rule
// macros that expand into primitive derivations.

namespace dyncalc {

struct ProofTree;
using ProofRef = std::shared_ptr<const ProofTree>;

struct ProofTree {
  std::string rule;
  Sequent conclusion;
  std::vector<ProofRef> children;
  // Substitution recorded at construction; validation never needs it, cut
  // elimination uses it to trace histories without re-deriving them.
  std::optional<Substitution> annotation;
};

ProofRef node(std::string rule, Sequent conclusion, std::vector<ProofRef> children,
              std::optional<Substitution> annotation = std::nullopt);

int tree_size(const ProofRef& t);
int tree_height(const ProofRef& t);
ProofRef subtree_at(const ProofRef& t, const std::vector<int>& path);
ProofRef replace_subtree(const ProofRef& t, const std::vector<int>& path,
                         const ProofRef& repl);

struct CheckOptions {
  Base base = Base::Intuitionistic;
  bool allow_cut = false;
  bool allow_macros = true;
};

struct CheckFailure {
  std::vector<int> path; // child indices from the root
  std::string rule;
  std::string reason;
};

struct CheckStats {
  int nodes = 0;
  int cuts = 0;
  int max_cut_complexity = 0; // operational size of the largest cut term
  int max_cut_height = 0;     // premise-height sum of that cut
};

struct CheckReport {
  bool ok = false;
  std::vector<CheckFailure> failures;
  CheckStats stats;
};

CheckReport check_proof(const ProofRef& t, const CheckOptions& opts = {});

bool check_type_uniformity(const Sequent& s);

struct MacroMismatch : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Replaces each reduce/comp node by its primitive derivation; the endsequent
// is unchanged and the output contains no macro nodes. Throws MacroMismatch.
ProofRef expand_macros(const ProofRef& t);

// ---------------------------------------------------------------------------
// Proof scripts (.dcp): a declaration header, then one s-expression
//   (rule NAME (seq "...") CHILD...)   |   (ax NAME (seq "..."))

struct ProofScript {
  Decls decls;
  ProofRef proof;
};

ProofScript parse_proof_script(const std::string& text);
ProofScript load_proof_script(const std::string& filename);
std::string write_proof_script(const ProofRef& t, const Decls& decls);

} // namespace dyncalc

#endif
