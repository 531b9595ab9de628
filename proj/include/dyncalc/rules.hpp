#ifndef DYNCALC_RULES_HPP
#define DYNCALC_RULES_HPP

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dyncalc/syntax.hpp"

// The full rule catalog as data: schematic premises and conclusion over
// metavariables, typing constraints, congruence classes, principality
// flags, plus matching and instantiation.

namespace dyncalc {

enum class Base { Intuitionistic, Classical };

// Declared sort of one schema metavariable.
struct VarInfo {
  std::string name;
  bool operational = false; // ranges over operational terms
  bool atom_only = false;   // operational atoms only
  Type type = Type::Fm;
};

// One occurrence site of a metavariable inside a schema:
// premise index (-1 for the conclusion), then a sequent-relative path.
struct VarSite {
  int premise = -1;
  OccPath at;
};

// Occurrences identified as "the same parameter" across a rule instance.
struct CongruenceClass {
  std::string var;
  std::vector<VarSite> sites;
};

struct SchemaSeq {
  StRef lhs, rhs;
};

struct RuleSchema {
  std::string name;
  std::vector<SchemaSeq> premises;
  SchemaSeq conclusion;
  std::vector<VarInfo> vars;
  std::vector<CongruenceClass> congruence;
  bool invertible = false;        // double-line rule
  bool axiom = false;             // zero premises
  bool atom_axiom = false;        // the generalized identity Phi p |- Psi p
  bool cut = false;
  Type cut_type = Type::Fm;       // when cut
  bool macro = false;             // expanded by the checker, not a primitive
  bool display_postulate = false;
  bool grishin = false;           // classical base only
  // Whether the conclusion's lhs/rhs root is an operational term introduced
  // principally by this rule (atom axiom handled separately).
  bool principal_left = false;
  bool principal_right = false;

  const VarInfo* var_info(const std::string& n) const;
};

struct Substitution {
  std::map<std::string, StRef> st;
  std::map<std::string, OpRef> op;

  bool operator==(const Substitution& o) const;
};

struct RuleInstance {
  std::string schema;
  std::vector<Sequent> premises;
  Sequent conclusion;
  Substitution sub;
  bool reversed = false; // invertible schema matched in the upward direction
};

struct MatchError {
  std::string reason;
};

// The fixed catalog. Stable order; names are the public identifiers.
const std::vector<RuleSchema>& catalog(Base base);
const RuleSchema* find_schema(const std::string& name, Base base);

// Decomposition of a matched atom-axiom instance.
struct AtomShape {
  std::vector<std::pair<StKind, StRef>> phi; // (Stri0 | Sbtri0, Fnc structure)
  std::vector<std::pair<StKind, StRef>> psi; // (Srarr0 | Sbrarr0, Fnc structure)
  OpRef atom;
};
std::optional<AtomShape> match_atom_axiom(const Sequent& s);

// The unique type-respecting substitution making the schema equal the given
// sequents; for invertible schemas the upward direction is also tried.
std::optional<RuleInstance> match_instance(const RuleSchema& schema,
                                           const std::vector<Sequent>& premises,
                                           const Sequent& conclusion,
                                           MatchError* err = nullptr);

// Matches an operational/structural pattern against a concrete value,
// extending `sub`; used by the checker for macro recognition as well.
bool match_structure(const StRef& pattern, const StRef& value, Substitution& sub,
                     std::string* err = nullptr);

// Instantiates every metavariable; throws TypeError if the substitution is
// not total or not type-respecting.
StRef apply_substitution(const StRef& pattern, const Substitution& sub);
Sequent apply_substitution(const SchemaSeq& pattern, const Substitution& sub);
RuleInstance apply_schema(const RuleSchema& schema, const Substitution& sub);

} // namespace dyncalc

#endif
