#ifndef DYNCALC_SYNTAX_HPP
#define DYNCALC_SYNTAX_HPP

#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

// Typed term and structure languages of the multi-type calculus:
// four pairwise disjoint types at both the operational and the
// structural layer, parsing, printing, type inference, and
// precedent/succedent position computation.

namespace dyncalc {

enum class Type { Fm, Fnc, Act, Ag };

const char* type_name(Type t);           // "Fm" etc.
const char* structural_type_name(Type t); // "FM" etc.

// ---------------------------------------------------------------------------
// Operational layer

enum class OpKind {
  Atom,
  Top,
  Bot,
  And,
  Or,
  Imp,
  Limp,
  Lsub,
  Rsub,
  Tri0,
  Tri1,
  Tri2,
  Tri3,
  Btri0,
  Btri1,
  Btri2,
  Btri3,
  Rarr0,
  Rarr1,
  Rarr2,
  Brarr0,
  Brarr1,
  Brarr2,
  Var, // schema metavariable ranging over operational terms
};

struct OpTerm;
using OpRef = std::shared_ptr<const OpTerm>;

struct OpTerm {
  OpKind kind;
  // Atom and Var
  std::string name;
  Type atom_type = Type::Fm;
  bool atom_only = false; // Var: ranges over atoms only
  // binary connectives
  OpRef lhs, rhs;
};

OpRef op_atom(Type t, std::string name);
OpRef op_nullary(OpKind k);
OpRef op_binary(OpKind k, OpRef l, OpRef r);
OpRef op_var(std::string name, Type t, bool atom_only = false);

bool is_op_binary(OpKind k);
// (first argument type, second argument type, result type); Atom/Var excluded
struct OpSignature {
  Type first, second, result;
};
OpSignature op_signature(OpKind k);

// ---------------------------------------------------------------------------
// Structural layer

enum class StKind {
  Leaf,    // embedded operational term
  Neutral, // I
  Semi,
  Lt,
  Gt,
  Stri0,
  Stri1,
  Stri2,
  Stri3,
  Sbtri0,
  Sbtri1,
  Sbtri2,
  Sbtri3,
  Srarr0,
  Srarr1,
  Srarr2,
  Sbrarr0,
  Sbrarr1,
  Sbrarr2,
  Slarr1,
  Sblarr1,
  Sactl1,
  Sactbl1,
  Vlarr0,
  Vlarr2,
  Vlarr3,
  Vblarr0,
  Vblarr2,
  Vblarr3,
  Vrarr3,
  Vbrarr3,
  Var, // schema metavariable ranging over structures of a fixed type
};

struct Structure;
using StRef = std::shared_ptr<const Structure>;

struct Structure {
  StKind kind;
  OpRef term;   // Leaf
  StRef lhs, rhs; // binary
  // Var
  std::string name;
  Type var_type = Type::Fm;
};

StRef st_leaf(OpRef term);
StRef st_neutral();
StRef st_binary(StKind k, StRef l, StRef r);
StRef st_var(std::string name, Type t);

bool is_st_binary(StKind k);
struct StSignature {
  Type first, second, result;
};
StSignature st_signature(StKind k);

// Connective families used by the display and conservativity modules.
bool is_triangle_kind(StKind k); // Stri*, Sbtri*
bool is_arrow_kind(StKind k);    // every left/right arrow, real or virtual
bool is_virtual_adjoint(StKind k);

// Coordinate polarity (+1 or -1); k must be binary.
int polarity(StKind k, int coord);

// ---------------------------------------------------------------------------
// Sequents and positions

struct Sequent {
  StRef lhs, rhs;
};

enum class Side { Precedent, Succedent };

// A substructure occurrence inside a sequent: side 0 = lhs, 1 = rhs,
// then coordinate indices from the root of that side.
struct OccPath {
  int side = 0;
  std::vector<int> path;
};
bool operator==(const OccPath& a, const OccPath& b);
std::string occ_to_string(const OccPath& p); // "L.0.1"
std::optional<OccPath> occ_from_string(const std::string& s);

struct TypeError : std::runtime_error {
  std::string path; // coordinate path of the offending node
  TypeError(const std::string& msg, std::string path_)
      : std::runtime_error(msg), path(std::move(path_)) {}
};

struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Type inference; throws TypeError on signature violation.
Type infer_type(const OpRef& t);
Type infer_type(const StRef& s);
bool well_formed(const StRef& s);
std::optional<Type> sequent_type(const Sequent& s); // nullopt if ill-formed
bool type_uniform(const Sequent& s);

bool equal(const OpRef& a, const OpRef& b);
bool equal(const StRef& a, const StRef& b);
bool equal(const Sequent& a, const Sequent& b);
size_t hash_value(const StRef& s);
size_t hash_value(const Sequent& s);

bool is_ground(const OpRef& t); // no metavariables
bool is_ground(const StRef& s);

int op_size(const OpRef& t);         // node count of an operational term
bool is_subterm(const OpRef& sub, const OpRef& sup);

StRef subterm_at(const StRef& root, const std::vector<int>& path);
StRef subterm_at(const Sequent& s, const OccPath& p);
// Replace the substructure at `p` (must exist and be type-compatible).
Sequent replace_at(const Sequent& s, const OccPath& p, const StRef& repl);

// Every substructure occurrence with its computed side.
std::vector<std::pair<OccPath, Side>> positions(const Sequent& s);
Side side_of(const Sequent& s, const OccPath& p);

// ---------------------------------------------------------------------------
// Declarations, parsing, printing

class Decls {
public:
  void declare(const std::string& name, Type t); // throws on clash/keyword
  std::optional<Type> lookup(const std::string& name) const;
  // Parses one header line ("prop p q.", "agent a b.", "fnc alpha beta.");
  // returns false if the line is not a declaration.
  bool parse_line(const std::string& line);
  const std::map<std::string, Type>& table() const { return table_; }

private:
  std::map<std::string, Type> table_;
};

StRef parse_structure(const std::string& text, const Decls& decls);
Sequent parse_sequent(const std::string& text, const Decls& decls);

enum class Format { Ascii, Latex };
std::string render(const OpRef& t, Format f = Format::Ascii);
std::string render(const StRef& s, Format f = Format::Ascii);
std::string render(const Sequent& s, Format f = Format::Ascii);

} // namespace dyncalc

#endif
