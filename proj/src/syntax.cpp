#include "dyncalc/syntax.hpp"

#include <algorithm>
#include <array>
#include <cassert>
#include <functional>
#include <sstream>

namespace dyncalc {

const char* type_name(Type t) {
  switch (t) {
  case Type::Fm: return "Fm";
  case Type::Fnc: return "Fnc";
  case Type::Act: return "Act";
  case Type::Ag: return "Ag";
  }
  return "?";
}

const char* structural_type_name(Type t) {
  switch (t) {
  case Type::Fm: return "FM";
  case Type::Fnc: return "FNC";
  case Type::Act: return "ACT";
  case Type::Ag: return "AG";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Operational layer

OpRef op_atom(Type t, std::string name) {
  auto n = std::make_shared<OpTerm>();
  n->kind = OpKind::Atom;
  n->name = std::move(name);
  n->atom_type = t;
  return n;
}

OpRef op_nullary(OpKind k) {
  assert(k == OpKind::Top || k == OpKind::Bot);
  auto n = std::make_shared<OpTerm>();
  n->kind = k;
  return n;
}

OpRef op_binary(OpKind k, OpRef l, OpRef r) {
  assert(is_op_binary(k));
  auto n = std::make_shared<OpTerm>();
  n->kind = k;
  n->lhs = std::move(l);
  n->rhs = std::move(r);
  return n;
}

OpRef op_var(std::string name, Type t, bool atom_only) {
  auto n = std::make_shared<OpTerm>();
  n->kind = OpKind::Var;
  n->name = std::move(name);
  n->atom_type = t;
  n->atom_only = atom_only;
  return n;
}

bool is_op_binary(OpKind k) {
  switch (k) {
  case OpKind::Atom:
  case OpKind::Top:
  case OpKind::Bot:
  case OpKind::Var:
    return false;
  default:
    return true;
  }
}

OpSignature op_signature(OpKind k) {
  using T = Type;
  switch (k) {
  case OpKind::And:
  case OpKind::Or:
  case OpKind::Imp:
  case OpKind::Limp:
  case OpKind::Lsub:
  case OpKind::Rsub:
    return {T::Fm, T::Fm, T::Fm};
  case OpKind::Tri0:
  case OpKind::Btri0:
  case OpKind::Rarr0:
  case OpKind::Brarr0:
    return {T::Fnc, T::Fm, T::Fm};
  case OpKind::Tri1:
  case OpKind::Btri1:
  case OpKind::Rarr1:
  case OpKind::Brarr1:
    return {T::Act, T::Fm, T::Fm};
  case OpKind::Tri2:
  case OpKind::Btri2:
  case OpKind::Rarr2:
  case OpKind::Brarr2:
    return {T::Ag, T::Fm, T::Fm};
  case OpKind::Tri3:
  case OpKind::Btri3:
    return {T::Ag, T::Fnc, T::Act};
  default:
    assert(false && "no signature for nullary kinds");
    return {T::Fm, T::Fm, T::Fm};
  }
}

// ---------------------------------------------------------------------------
// Structural layer

StRef st_leaf(OpRef term) {
  auto n = std::make_shared<Structure>();
  n->kind = StKind::Leaf;
  n->term = std::move(term);
  return n;
}

StRef st_neutral() {
  auto n = std::make_shared<Structure>();
  n->kind = StKind::Neutral;
  return n;
}

StRef st_binary(StKind k, StRef l, StRef r) {
  assert(is_st_binary(k));
  auto n = std::make_shared<Structure>();
  n->kind = k;
  n->lhs = std::move(l);
  n->rhs = std::move(r);
  return n;
}

StRef st_var(std::string name, Type t) {
  auto n = std::make_shared<Structure>();
  n->kind = StKind::Var;
  n->name = std::move(name);
  n->var_type = t;
  return n;
}

bool is_st_binary(StKind k) {
  switch (k) {
  case StKind::Leaf:
  case StKind::Neutral:
  case StKind::Var:
    return false;
  default:
    return true;
  }
}

StSignature st_signature(StKind k) {
  using T = Type;
  switch (k) {
  case StKind::Semi:
  case StKind::Lt:
  case StKind::Gt:
    return {T::Fm, T::Fm, T::Fm};
  case StKind::Stri0:
  case StKind::Sbtri0:
  case StKind::Srarr0:
  case StKind::Sbrarr0:
    return {T::Fnc, T::Fm, T::Fm};
  case StKind::Stri1:
  case StKind::Sbtri1:
  case StKind::Srarr1:
  case StKind::Sbrarr1:
    return {T::Act, T::Fm, T::Fm};
  case StKind::Stri2:
  case StKind::Sbtri2:
  case StKind::Srarr2:
  case StKind::Sbrarr2:
    return {T::Ag, T::Fm, T::Fm};
  case StKind::Stri3:
  case StKind::Sbtri3:
    return {T::Ag, T::Fnc, T::Act};
  case StKind::Slarr1:
  case StKind::Sblarr1:
  case StKind::Sactl1:
  case StKind::Sactbl1:
    return {T::Fm, T::Fm, T::Act};
  case StKind::Vlarr0:
  case StKind::Vblarr0:
    return {T::Fm, T::Fm, T::Fnc};
  case StKind::Vlarr2:
  case StKind::Vblarr2:
    return {T::Fm, T::Fm, T::Ag};
  case StKind::Vlarr3:
  case StKind::Vblarr3:
    return {T::Act, T::Fnc, T::Ag};
  case StKind::Vrarr3:
  case StKind::Vbrarr3:
    return {T::Ag, T::Act, T::Fnc};
  default:
    assert(false && "no signature for leaf kinds");
    return {T::Fm, T::Fm, T::Fm};
  }
}

bool is_triangle_kind(StKind k) {
  switch (k) {
  case StKind::Stri0:
  case StKind::Stri1:
  case StKind::Stri2:
  case StKind::Stri3:
  case StKind::Sbtri0:
  case StKind::Sbtri1:
  case StKind::Sbtri2:
  case StKind::Sbtri3:
    return true;
  default:
    return false;
  }
}

bool is_arrow_kind(StKind k) {
  switch (k) {
  case StKind::Srarr0:
  case StKind::Srarr1:
  case StKind::Srarr2:
  case StKind::Sbrarr0:
  case StKind::Sbrarr1:
  case StKind::Sbrarr2:
  case StKind::Slarr1:
  case StKind::Sblarr1:
  case StKind::Sactl1:
  case StKind::Sactbl1:
  case StKind::Vlarr0:
  case StKind::Vlarr2:
  case StKind::Vlarr3:
  case StKind::Vblarr0:
  case StKind::Vblarr2:
  case StKind::Vblarr3:
  case StKind::Vrarr3:
  case StKind::Vbrarr3:
    return true;
  default:
    return false;
  }
}

bool is_virtual_adjoint(StKind k) {
  switch (k) {
  case StKind::Vlarr0:
  case StKind::Vlarr2:
  case StKind::Vlarr3:
  case StKind::Vblarr0:
  case StKind::Vblarr2:
  case StKind::Vblarr3:
  case StKind::Vrarr3:
  case StKind::Vbrarr3:
    return true;
  default:
    return false;
  }
}

int polarity(StKind k, int coord) {
  assert(is_st_binary(k) && (coord == 0 || coord == 1));
  switch (k) {
  case StKind::Semi:
    return +1;
  case StKind::Lt:
    return coord == 0 ? +1 : -1;
  case StKind::Gt:
    return coord == 0 ? -1 : +1;
  case StKind::Stri0:
  case StKind::Stri1:
  case StKind::Stri2:
  case StKind::Stri3:
  case StKind::Sbtri0:
  case StKind::Sbtri1:
  case StKind::Sbtri2:
  case StKind::Sbtri3:
    return +1;
  case StKind::Srarr0:
  case StKind::Srarr1:
  case StKind::Srarr2:
  case StKind::Sbrarr0:
  case StKind::Sbrarr1:
  case StKind::Sbrarr2:
  case StKind::Vrarr3:
  case StKind::Vbrarr3:
    return coord == 0 ? -1 : +1;
  case StKind::Slarr1:
  case StKind::Sblarr1:
  case StKind::Sactl1:
  case StKind::Sactbl1:
  case StKind::Vlarr0:
  case StKind::Vlarr2:
  case StKind::Vlarr3:
  case StKind::Vblarr0:
  case StKind::Vblarr2:
  case StKind::Vblarr3:
    return coord == 0 ? +1 : -1;
  default:
    return +1;
  }
}

// ---------------------------------------------------------------------------
// Paths

bool operator==(const OccPath& a, const OccPath& b) {
  return a.side == b.side && a.path == b.path;
}

std::string occ_to_string(const OccPath& p) {
  std::string s = p.side == 0 ? "L" : "R";
  for (int c : p.path) s += "." + std::to_string(c);
  return s;
}

std::optional<OccPath> occ_from_string(const std::string& s) {
  if (s.empty()) return std::nullopt;
  OccPath p;
  if (s[0] == 'L')
    p.side = 0;
  else if (s[0] == 'R')
    p.side = 1;
  else
    return std::nullopt;
  size_t i = 1;
  while (i < s.size()) {
    if (s[i] != '.') return std::nullopt;
    size_t j = ++i;
    while (j < s.size() && isdigit((unsigned char)s[j])) j++;
    if (j == i) return std::nullopt;
    p.path.push_back(std::stoi(s.substr(i, j - i)));
    i = j;
  }
  return p;
}

// ---------------------------------------------------------------------------
// Type inference

static std::string path_str(const std::vector<int>& path) {
  std::string s;
  for (int c : path) {
    if (!s.empty()) s += ".";
    s += std::to_string(c);
  }
  return s;
}

static Type infer_op(const OpRef& t, std::vector<int>& path) {
  if (!t) throw TypeError("null operational term", path_str(path));
  switch (t->kind) {
  case OpKind::Atom:
  case OpKind::Var:
    return t->atom_type;
  case OpKind::Top:
  case OpKind::Bot:
    return Type::Fm;
  default: {
    OpSignature sig = op_signature(t->kind);
    path.push_back(0);
    Type l = infer_op(t->lhs, path);
    if (l != sig.first)
      throw TypeError(std::string("operational argument of type ") + type_name(l) +
                          " where " + type_name(sig.first) + " expected",
                      path_str(path));
    path.pop_back();
    path.push_back(1);
    Type r = infer_op(t->rhs, path);
    if (r != sig.second)
      throw TypeError(std::string("operational argument of type ") + type_name(r) +
                          " where " + type_name(sig.second) + " expected",
                      path_str(path));
    path.pop_back();
    return sig.result;
  }
  }
}

static Type infer_st(const StRef& s, std::vector<int>& path) {
  if (!s) throw TypeError("null structure", path_str(path));
  switch (s->kind) {
  case StKind::Leaf:
    return infer_op(s->term, path);
  case StKind::Neutral:
    return Type::Fm;
  case StKind::Var:
    return s->var_type;
  default: {
    StSignature sig = st_signature(s->kind);
    path.push_back(0);
    Type l = infer_st(s->lhs, path);
    if (l != sig.first)
      throw TypeError(std::string("structural argument of type ") +
                          structural_type_name(l) + " where " +
                          structural_type_name(sig.first) + " expected",
                      path_str(path));
    path.pop_back();
    path.push_back(1);
    Type r = infer_st(s->rhs, path);
    if (r != sig.second)
      throw TypeError(std::string("structural argument of type ") +
                          structural_type_name(r) + " where " +
                          structural_type_name(sig.second) + " expected",
                      path_str(path));
    path.pop_back();
    return sig.result;
  }
  }
}

Type infer_type(const OpRef& t) {
  std::vector<int> path;
  return infer_op(t, path);
}

Type infer_type(const StRef& s) {
  std::vector<int> path;
  return infer_st(s, path);
}

bool well_formed(const StRef& s) {
  try {
    infer_type(s);
    return true;
  } catch (const TypeError&) {
    return false;
  }
}

std::optional<Type> sequent_type(const Sequent& s) {
  try {
    Type l = infer_type(s.lhs);
    Type r = infer_type(s.rhs);
    if (l != r) return std::nullopt;
    return l;
  } catch (const TypeError&) {
    return std::nullopt;
  }
}

bool type_uniform(const Sequent& s) { return sequent_type(s).has_value(); }

// ---------------------------------------------------------------------------
// Equality and hashing

bool equal(const OpRef& a, const OpRef& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  if (a->kind != b->kind) return false;
  switch (a->kind) {
  case OpKind::Atom:
    return a->atom_type == b->atom_type && a->name == b->name;
  case OpKind::Var:
    return a->atom_type == b->atom_type && a->name == b->name &&
           a->atom_only == b->atom_only;
  case OpKind::Top:
  case OpKind::Bot:
    return true;
  default:
    return equal(a->lhs, b->lhs) && equal(a->rhs, b->rhs);
  }
}

bool equal(const StRef& a, const StRef& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  if (a->kind != b->kind) return false;
  switch (a->kind) {
  case StKind::Leaf:
    return equal(a->term, b->term);
  case StKind::Neutral:
    return true;
  case StKind::Var:
    return a->name == b->name && a->var_type == b->var_type;
  default:
    return equal(a->lhs, b->lhs) && equal(a->rhs, b->rhs);
  }
}

bool equal(const Sequent& a, const Sequent& b) {
  return equal(a.lhs, b.lhs) && equal(a.rhs, b.rhs);
}

static void hash_mix(size_t& h, size_t v) {
  h ^= v + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
}

static size_t hash_op(const OpRef& t) {
  size_t h = static_cast<size_t>(t->kind) * 1315423911u;
  switch (t->kind) {
  case OpKind::Atom:
  case OpKind::Var:
    hash_mix(h, std::hash<std::string>{}(t->name));
    hash_mix(h, static_cast<size_t>(t->atom_type));
    break;
  case OpKind::Top:
  case OpKind::Bot:
    break;
  default:
    hash_mix(h, hash_op(t->lhs));
    hash_mix(h, hash_op(t->rhs));
  }
  return h;
}

size_t hash_value(const StRef& s) {
  size_t h = static_cast<size_t>(s->kind) * 2654435761u;
  switch (s->kind) {
  case StKind::Leaf:
    hash_mix(h, hash_op(s->term));
    break;
  case StKind::Neutral:
    break;
  case StKind::Var:
    hash_mix(h, std::hash<std::string>{}(s->name));
    break;
  default:
    hash_mix(h, hash_value(s->lhs));
    hash_mix(h, hash_value(s->rhs));
  }
  return h;
}

size_t hash_value(const Sequent& s) {
  size_t h = hash_value(s.lhs);
  hash_mix(h, hash_value(s.rhs));
  return h;
}

bool is_ground(const OpRef& t) {
  if (!t) return false;
  if (t->kind == OpKind::Var) return false;
  if (is_op_binary(t->kind)) return is_ground(t->lhs) && is_ground(t->rhs);
  return true;
}

bool is_ground(const StRef& s) {
  if (!s) return false;
  switch (s->kind) {
  case StKind::Var:
    return false;
  case StKind::Leaf:
    return is_ground(s->term);
  case StKind::Neutral:
    return true;
  default:
    return is_ground(s->lhs) && is_ground(s->rhs);
  }
}

int op_size(const OpRef& t) {
  if (!t) return 0;
  if (is_op_binary(t->kind)) return 1 + op_size(t->lhs) + op_size(t->rhs);
  return 1;
}

bool is_subterm(const OpRef& sub, const OpRef& sup) {
  if (!sup) return false;
  if (equal(sub, sup)) return true;
  if (is_op_binary(sup->kind))
    return is_subterm(sub, sup->lhs) || is_subterm(sub, sup->rhs);
  return false;
}

StRef subterm_at(const StRef& root, const std::vector<int>& path) {
  StRef cur = root;
  for (int c : path) {
    if (!cur || !is_st_binary(cur->kind)) return nullptr;
    cur = c == 0 ? cur->lhs : cur->rhs;
  }
  return cur;
}

StRef subterm_at(const Sequent& s, const OccPath& p) {
  return subterm_at(p.side == 0 ? s.lhs : s.rhs, p.path);
}

static StRef replace_in(const StRef& root, const std::vector<int>& path, size_t i,
                        const StRef& repl) {
  if (i == path.size()) return repl;
  if (!root || !is_st_binary(root->kind))
    throw std::runtime_error("replace_at: path leaves the structure");
  if (path[i] == 0)
    return st_binary(root->kind, replace_in(root->lhs, path, i + 1, repl), root->rhs);
  return st_binary(root->kind, root->lhs, replace_in(root->rhs, path, i + 1, repl));
}

Sequent replace_at(const Sequent& s, const OccPath& p, const StRef& repl) {
  if (p.side == 0) return {replace_in(s.lhs, p.path, 0, repl), s.rhs};
  return {s.lhs, replace_in(s.rhs, p.path, 0, repl)};
}

// ---------------------------------------------------------------------------
// Positions

static void walk_positions(const StRef& s, int side, std::vector<int>& path,
                           int negatives, std::vector<std::pair<OccPath, Side>>& out) {
  // side 0: even negatives => precedent; side 1: even negatives => succedent
  Side pos;
  if (side == 0)
    pos = (negatives % 2 == 0) ? Side::Precedent : Side::Succedent;
  else
    pos = (negatives % 2 == 0) ? Side::Succedent : Side::Precedent;
  out.push_back({OccPath{side, path}, pos});
  if (is_st_binary(s->kind)) {
    for (int c = 0; c < 2; c++) {
      path.push_back(c);
      walk_positions(c == 0 ? s->lhs : s->rhs, side, path,
                     negatives + (polarity(s->kind, c) < 0 ? 1 : 0), out);
      path.pop_back();
    }
  }
}

std::vector<std::pair<OccPath, Side>> positions(const Sequent& s) {
  std::vector<std::pair<OccPath, Side>> out;
  std::vector<int> path;
  walk_positions(s.lhs, 0, path, 0, out);
  walk_positions(s.rhs, 1, path, 0, out);
  return out;
}

Side side_of(const Sequent& s, const OccPath& p) {
  StRef cur = p.side == 0 ? s.lhs : s.rhs;
  int negatives = 0;
  for (int c : p.path) {
    if (!cur || !is_st_binary(cur->kind))
      throw std::runtime_error("side_of: path leaves the structure");
    if (polarity(cur->kind, c) < 0) negatives++;
    cur = c == 0 ? cur->lhs : cur->rhs;
  }
  if (p.side == 0)
    return (negatives % 2 == 0) ? Side::Precedent : Side::Succedent;
  return (negatives % 2 == 0) ? Side::Succedent : Side::Precedent;
}

// ---------------------------------------------------------------------------
// Tokens

namespace {

struct ConnToken {
  const char* ascii;
  const char* latex;
};

const std::map<OpKind, ConnToken>& op_tokens() {
  static const std::map<OpKind, ConnToken> m = {
      {OpKind::And, {"/\\", "\\wedge"}},
      {OpKind::Or, {"\\/", "\\vee"}},
      {OpKind::Imp, {"->", "\\rightarrow"}},
      {OpKind::Limp, {"<-", "\\leftarrow"}},
      {OpKind::Lsub, {"lsub", "\\lsub"}},
      {OpKind::Rsub, {"rsub", "\\rsub"}},
      {OpKind::Tri0, {"tri0", "\\vartriangle_0"}},
      {OpKind::Tri1, {"tri1", "\\vartriangle_1"}},
      {OpKind::Tri2, {"tri2", "\\vartriangle_2"}},
      {OpKind::Tri3, {"tri3", "\\vartriangle_3"}},
      {OpKind::Btri0, {"btri0", "\\blacktriangle_0"}},
      {OpKind::Btri1, {"btri1", "\\blacktriangle_1"}},
      {OpKind::Btri2, {"btri2", "\\blacktriangle_2"}},
      {OpKind::Btri3, {"btri3", "\\blacktriangle_3"}},
      {OpKind::Rarr0, {"rarr0", "\\oprarr_0"}},
      {OpKind::Rarr1, {"rarr1", "\\oprarr_1"}},
      {OpKind::Rarr2, {"rarr2", "\\oprarr_2"}},
      {OpKind::Brarr0, {"brarr0", "\\opbrarr_0"}},
      {OpKind::Brarr1, {"brarr1", "\\opbrarr_1"}},
      {OpKind::Brarr2, {"brarr2", "\\opbrarr_2"}},
  };
  return m;
}

const std::map<StKind, ConnToken>& st_tokens() {
  static const std::map<StKind, ConnToken> m = {
      {StKind::Semi, {";", "\\,;\\,"}},
      {StKind::Lt, {"<", "<"}},
      {StKind::Gt, {">", ">"}},
      {StKind::Stri0, {"STRI0", "\\stri_0"}},
      {StKind::Stri1, {"STRI1", "\\stri_1"}},
      {StKind::Stri2, {"STRI2", "\\stri_2"}},
      {StKind::Stri3, {"STRI3", "\\stri_3"}},
      {StKind::Sbtri0, {"SBTRI0", "\\sbtri_0"}},
      {StKind::Sbtri1, {"SBTRI1", "\\sbtri_1"}},
      {StKind::Sbtri2, {"SBTRI2", "\\sbtri_2"}},
      {StKind::Sbtri3, {"SBTRI3", "\\sbtri_3"}},
      {StKind::Srarr0, {"SRARR0", "\\srarr_0"}},
      {StKind::Srarr1, {"SRARR1", "\\srarr_1"}},
      {StKind::Srarr2, {"SRARR2", "\\srarr_2"}},
      {StKind::Sbrarr0, {"SBRARR0", "\\sbrarr_0"}},
      {StKind::Sbrarr1, {"SBRARR1", "\\sbrarr_1"}},
      {StKind::Sbrarr2, {"SBRARR2", "\\sbrarr_2"}},
      {StKind::Slarr1, {"SLARR1", "\\slarr_1"}},
      {StKind::Sblarr1, {"SBLARR1", "\\sblarr_1"}},
      {StKind::Sactl1, {"SACTL1", "\\sactl_1"}},
      {StKind::Sactbl1, {"SACTBL1", "\\sactbl_1"}},
      {StKind::Vlarr0, {"VLARR0", "\\vlarr_0"}},
      {StKind::Vlarr2, {"VLARR2", "\\vlarr_2"}},
      {StKind::Vlarr3, {"VLARR3", "\\vlarr_3"}},
      {StKind::Vblarr0, {"VBLARR0", "\\vblarr_0"}},
      {StKind::Vblarr2, {"VBLARR2", "\\vblarr_2"}},
      {StKind::Vblarr3, {"VBLARR3", "\\vblarr_3"}},
      {StKind::Vrarr3, {"VRARR3", "\\vrarr_3"}},
      {StKind::Vbrarr3, {"VBRARR3", "\\vbrarr_3"}},
  };
  return m;
}

const std::map<std::string, OpKind>& op_keyword_map() {
  static const std::map<std::string, OpKind> m = [] {
    std::map<std::string, OpKind> r;
    for (auto& [k, tok] : op_tokens()) r[tok.ascii] = k;
    return r;
  }();
  return m;
}

const std::map<std::string, StKind>& st_keyword_map() {
  static const std::map<std::string, StKind> m = [] {
    std::map<std::string, StKind> r;
    for (auto& [k, tok] : st_tokens()) r[tok.ascii] = k;
    return r;
  }();
  return m;
}

bool is_reserved_word(const std::string& w) {
  if (w == "I" || w == "top" || w == "bot" || w == "lsub" || w == "rsub")
    return true;
  if (op_keyword_map().count(w)) return true;
  if (st_keyword_map().count(w)) return true;
  return false;
}

// Greek letters commonly used for functional actions get proper latex names.
std::string latex_atom(const std::string& name) {
  static const std::map<std::string, std::string> greek = {
      {"alpha", "\\alpha"}, {"beta", "\\beta"},   {"gamma", "\\gamma"},
      {"delta", "\\delta"}, {"sigma", "\\sigma"}, {"tau", "\\tau"},
  };
  auto it = greek.find(name);
  if (it != greek.end()) return it->second;
  if (name.size() == 1) return name;
  return "\\mathit{" + name + "}";
}

} // namespace

// ---------------------------------------------------------------------------
// Parsing

namespace {

struct Token {
  enum Kind { Ident, OpConn, StConn, LParen, RParen, Turnstile, NeutralI, Top, Bot, End };
  Kind kind;
  std::string text;
  OpKind op;
  StKind st;
};

class Lexer {
public:
  explicit Lexer(const std::string& text) : s_(text) { advance(); }
  const Token& peek() const { return tok_; }
  Token next() {
    Token t = tok_;
    advance();
    return t;
  }

private:
  void advance() {
    while (i_ < s_.size() && isspace((unsigned char)s_[i_])) i_++;
    if (i_ >= s_.size()) {
      tok_ = {Token::End, "", OpKind::Atom, StKind::Leaf};
      return;
    }
    char c = s_[i_];
    auto two = s_.substr(i_, 2);
    if (two == "|-") {
      i_ += 2;
      tok_ = {Token::Turnstile, "|-", OpKind::Atom, StKind::Leaf};
      return;
    }
    if (two == "/\\" || two == "\\/" || two == "->" || two == "<-") {
      i_ += 2;
      tok_ = {Token::OpConn, two, op_keyword_map().at(two), StKind::Leaf};
      return;
    }
    if (c == '(') {
      i_++;
      tok_ = {Token::LParen, "(", OpKind::Atom, StKind::Leaf};
      return;
    }
    if (c == ')') {
      i_++;
      tok_ = {Token::RParen, ")", OpKind::Atom, StKind::Leaf};
      return;
    }
    if (c == ';' || c == '<' || c == '>') {
      i_++;
      std::string w(1, c);
      tok_ = {Token::StConn, w, OpKind::Atom, st_keyword_map().at(w)};
      return;
    }
    if (isalnum((unsigned char)c) || c == '_') {
      size_t j = i_;
      while (j < s_.size() && (isalnum((unsigned char)s_[j]) || s_[j] == '_')) j++;
      std::string w = s_.substr(i_, j - i_);
      i_ = j;
      if (w == "I") {
        tok_ = {Token::NeutralI, w, OpKind::Atom, StKind::Leaf};
      } else if (w == "top") {
        tok_ = {Token::Top, w, OpKind::Atom, StKind::Leaf};
      } else if (w == "bot") {
        tok_ = {Token::Bot, w, OpKind::Atom, StKind::Leaf};
      } else if (auto it = op_keyword_map().find(w); it != op_keyword_map().end()) {
        tok_ = {Token::OpConn, w, it->second, StKind::Leaf};
      } else if (auto it2 = st_keyword_map().find(w); it2 != st_keyword_map().end()) {
        tok_ = {Token::StConn, w, OpKind::Atom, it2->second};
      } else {
        tok_ = {Token::Ident, w, OpKind::Atom, StKind::Leaf};
      }
      return;
    }
    throw ParseError(std::string("unexpected character '") + c + "' at offset " +
                     std::to_string(i_));
  }

  std::string s_;
  size_t i_ = 0;
  Token tok_;
};

// Surface value: either a pure operational term or a structure.
struct Surface {
  OpRef op; // set when the subtree is purely operational
  StRef st; // set otherwise
};

StRef to_structure(const Surface& v) { return v.st ? v.st : st_leaf(v.op); }

class Parser {
public:
  Parser(const std::string& text, const Decls& decls) : lex_(text), decls_(decls) {}

  Surface parse_struct() {
    Surface left = parse_unit();
    const Token& t = lex_.peek();
    if (t.kind == Token::OpConn) {
      Token conn = lex_.next();
      Surface right = parse_unit();
      if (!left.op)
        throw ParseError("operational connective '" + conn.text +
                         "' applied to a structural operand");
      if (!right.op)
        throw ParseError("operational connective '" + conn.text +
                         "' applied to a structural operand");
      OpRef n = op_binary(conn.op, left.op, right.op);
      try {
        infer_type(n);
      } catch (const TypeError& e) {
        throw ParseError("type error under '" + conn.text + "': " + e.what());
      }
      return {n, nullptr};
    }
    if (t.kind == Token::StConn) {
      Token conn = lex_.next();
      Surface right = parse_unit();
      StRef n = st_binary(conn.st, to_structure(left), to_structure(right));
      try {
        infer_type(n);
      } catch (const TypeError& e) {
        throw ParseError("type error under '" + conn.text + "': " + e.what());
      }
      return {nullptr, n};
    }
    return left;
  }

  Surface parse_unit() {
    Token t = lex_.next();
    switch (t.kind) {
    case Token::LParen: {
      Surface inner = parse_struct();
      Token close = lex_.next();
      if (close.kind != Token::RParen)
        throw ParseError("expected ')' but found '" + close.text + "'");
      return inner;
    }
    case Token::NeutralI:
      return {nullptr, st_neutral()};
    case Token::Top:
      return {op_nullary(OpKind::Top), nullptr};
    case Token::Bot:
      return {op_nullary(OpKind::Bot), nullptr};
    case Token::Ident: {
      auto ty = decls_.lookup(t.text);
      if (!ty) throw ParseError("undeclared identifier '" + t.text + "'");
      return {op_atom(*ty, t.text), nullptr};
    }
    default:
      throw ParseError("unexpected token '" + t.text + "'");
    }
  }

  void expect_end() {
    if (lex_.peek().kind != Token::End)
      throw ParseError("trailing input after '" + lex_.peek().text + "'");
  }

  bool at_turnstile() { return lex_.peek().kind == Token::Turnstile; }
  void eat_turnstile() { lex_.next(); }

private:
  Lexer lex_;
  const Decls& decls_;
};

} // namespace

void Decls::declare(const std::string& name, Type t) {
  if (name.empty() || !(isalpha((unsigned char)name[0]) || name[0] == '_'))
    throw ParseError("bad identifier '" + name + "'");
  if (is_reserved_word(name))
    throw ParseError("'" + name + "' is a reserved word");
  auto it = table_.find(name);
  if (it != table_.end() && it->second != t)
    throw ParseError("'" + name + "' already declared with a different type");
  table_[name] = t;
}

std::optional<Type> Decls::lookup(const std::string& name) const {
  auto it = table_.find(name);
  if (it == table_.end()) return std::nullopt;
  return it->second;
}

bool Decls::parse_line(const std::string& line) {
  std::istringstream in(line);
  std::string head;
  in >> head;
  Type t;
  if (head == "prop")
    t = Type::Fm;
  else if (head == "agent")
    t = Type::Ag;
  else if (head == "fnc")
    t = Type::Fnc;
  else
    return false;
  std::string w;
  bool closed = false;
  while (in >> w) {
    if (closed) throw ParseError("declaration continues after '.'");
    if (!w.empty() && w.back() == '.') {
      w.pop_back();
      closed = true;
    }
    if (!w.empty()) declare(w, t);
  }
  if (!closed) throw ParseError("declaration line missing final '.'");
  return true;
}

StRef parse_structure(const std::string& text, const Decls& decls) {
  Parser p(text, decls);
  Surface v = p.parse_struct();
  p.expect_end();
  StRef s = to_structure(v);
  infer_type(s);
  return s;
}

Sequent parse_sequent(const std::string& text, const Decls& decls) {
  Parser p(text, decls);
  Surface l = p.parse_struct();
  if (!p.at_turnstile()) throw ParseError("expected '|-'");
  p.eat_turnstile();
  Surface r = p.parse_struct();
  p.expect_end();
  Sequent s{to_structure(l), to_structure(r)};
  infer_type(s.lhs);
  infer_type(s.rhs);
  return s;
}

// ---------------------------------------------------------------------------
// Rendering

static std::string render_op(const OpRef& t, Format f, bool parens) {
  switch (t->kind) {
  case OpKind::Atom:
    return f == Format::Ascii ? t->name : latex_atom(t->name);
  case OpKind::Var:
    return t->name;
  case OpKind::Top:
    return f == Format::Ascii ? "top" : "\\top";
  case OpKind::Bot:
    return f == Format::Ascii ? "bot" : "\\bot";
  default: {
    const ConnToken& tok = op_tokens().at(t->kind);
    std::string body = render_op(t->lhs, f, true) + " " +
                       (f == Format::Ascii ? tok.ascii : tok.latex) + " " +
                       render_op(t->rhs, f, true);
    return parens ? "(" + body + ")" : body;
  }
  }
}

static std::string render_st(const StRef& s, Format f, bool parens) {
  switch (s->kind) {
  case StKind::Leaf:
    return render_op(s->term, f, parens && is_op_binary(s->term->kind));
  case StKind::Neutral:
    return f == Format::Ascii ? "I" : "\\textrm{I}";
  case StKind::Var:
    return s->name;
  default: {
    const ConnToken& tok = st_tokens().at(s->kind);
    std::string body = render_st(s->lhs, f, true) + " " +
                       (f == Format::Ascii ? tok.ascii : tok.latex) + " " +
                       render_st(s->rhs, f, true);
    return parens ? "(" + body + ")" : body;
  }
  }
}

std::string render(const OpRef& t, Format f) { return render_op(t, f, false); }

std::string render(const StRef& s, Format f) { return render_st(s, f, false); }

std::string render(const Sequent& s, Format f) {
  return render_st(s.lhs, f, false) + (f == Format::Ascii ? " |- " : " \\vdash ") +
         render_st(s.rhs, f, false);
}

} // namespace dyncalc
