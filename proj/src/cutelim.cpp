#include "dyncalc/cutelim.hpp"

#include <algorithm>
#include <functional>

#include "dyncalc/display.hpp"

namespace dyncalc {

bool rank_less(const CutRank& a, const CutRank& b) {
  if (a.complexity != b.complexity) return a.complexity < b.complexity;
  return a.height < b.height;
}

namespace {

bool is_cut_node(const ProofRef& t) { return t->rule.rfind("Cut_", 0) == 0; }

const char* cut_rule_for(Type t) {
  switch (t) {
  case Type::Fm: return "Cut_FM";
  case Type::Fnc: return "Cut_FNC";
  case Type::Act: return "Cut_ACT";
  case Type::Ag: return "Cut_AG";
  }
  return "Cut_FM";
}

StKind stri_k(int i) {
  static const StKind k[4] = {StKind::Stri0, StKind::Stri1, StKind::Stri2,
                              StKind::Stri3};
  return k[i];
}
StKind sbtri_k(int i) {
  static const StKind k[4] = {StKind::Sbtri0, StKind::Sbtri1, StKind::Sbtri2,
                              StKind::Sbtri3};
  return k[i];
}

// Structural kind and postulate name displaying the first coordinate of the
// (b)triangle of index i: the real adjoints for i = 1, virtual otherwise.
struct FirstCoordDisplay {
  StKind kind;      // z <adj> y
  std::string name; // postulate name
};
FirstCoordDisplay first_coord_tri(int i) {
  switch (i) {
  case 0: return {StKind::Vblarr0, "(tri0,vblarr0)"};
  case 1: return {StKind::Sblarr1, "(tri1,blarr1)"};
  case 2: return {StKind::Vblarr2, "(tri2,vblarr2)"};
  default: return {StKind::Vblarr3, "(tri3,vblarr3)"};
  }
}
FirstCoordDisplay first_coord_btri(int i) {
  switch (i) {
  case 0: return {StKind::Vlarr0, "(btri0,vlarr0)"};
  case 1: return {StKind::Slarr1, "(btri1,larr1)"};
  case 2: return {StKind::Vlarr2, "(btri2,vlarr2)"};
  default: return {StKind::Vlarr3, "(btri3,vlarr3)"};
  }
}
// Structural kind and postulate for the second coordinate: the right
// adjoints, virtual for i = 3.
struct SecondCoordDisplay {
  StKind kind; // x <arr> z
  std::string name;
};
SecondCoordDisplay second_coord_tri(int i) {
  switch (i) {
  case 0: return {StKind::Sbrarr0, "(tri0,brarr0)"};
  case 1: return {StKind::Sbrarr1, "(tri1,brarr1)"};
  case 2: return {StKind::Sbrarr2, "(tri2,brarr2)"};
  default: return {StKind::Vbrarr3, "(tri3,vbrarr3)"};
  }
}
SecondCoordDisplay second_coord_btri(int i) {
  switch (i) {
  case 0: return {StKind::Srarr0, "(btri0,rarr0)"};
  case 1: return {StKind::Srarr1, "(btri1,rarr1)"};
  case 2: return {StKind::Srarr2, "(btri2,rarr2)"};
  default: return {StKind::Vrarr3, "(btri3,vrarr3)"};
  }
}

} // namespace

bool principal_on_left(const ProofRef& t, Base base) {
  const RuleSchema* s = find_schema(t->rule, base);
  if (!s) return false;
  if (s->atom_axiom) {
    auto shape = match_atom_axiom(t->conclusion);
    return shape && shape->phi.empty();
  }
  return s->principal_left;
}

bool principal_on_right(const ProofRef& t, Base base) {
  const RuleSchema* s = find_schema(t->rule, base);
  if (!s) return false;
  if (s->atom_axiom) {
    auto shape = match_atom_axiom(t->conclusion);
    return shape && shape->psi.empty();
  }
  return s->principal_right;
}

CutRank cut_rank_at(const ProofRef& t, const std::vector<int>& cut_path) {
  ProofRef n = subtree_at(t, cut_path);
  if (!n || n->children.size() != 2)
    throw ReduceError("cut_rank_at: not a cut node");
  CutRank r;
  const StRef& ct = n->children[0]->conclusion.rhs;
  r.complexity = ct->kind == StKind::Leaf ? op_size(ct->term) : 0;
  r.height = tree_height(n->children[0]) + tree_height(n->children[1]);
  return r;
}

// ---------------------------------------------------------------------------
// Principal stage

namespace {

// Triangle-family reduction: cut on a (b)tri_i term built by the matching R
// and L rules. S is the structural triangle kind.
ProofRef reduce_triangle(int i, bool black, const ProofRef& pi1,
                         const ProofRef& pi2) {
  ProofRef pi_x = pi1->children[0];   // x |- a
  ProofRef pi_y = pi1->children[1];   // y |- b
  ProofRef pi_body = pi2->children[0]; // a S b |- z
  StKind S = black ? sbtri_k(i) : stri_k(i);
  FirstCoordDisplay fc = black ? first_coord_btri(i) : first_coord_tri(i);
  SecondCoordDisplay sc = black ? second_coord_btri(i) : second_coord_tri(i);
  StRef a = pi_x->conclusion.rhs; // leaf
  StRef b = pi_y->conclusion.rhs;
  StRef x = pi_x->conclusion.lhs;
  StRef y = pi_y->conclusion.lhs;
  StRef z = pi_body->conclusion.rhs;
  Type t1 = infer_type(a), t2 = infer_type(b);
  StRef adj_b = st_binary(fc.kind, z, b);
  auto n1 = node(fc.name, {a, adj_b}, {pi_body});
  auto n2 = node(cut_rule_for(t1), {x, adj_b}, {pi_x, n1});
  auto n3 = node(fc.name, {st_binary(S, x, b), z}, {n2});
  StRef arr = st_binary(sc.kind, x, z);
  auto n4 = node(sc.name, {b, arr}, {n3});
  auto n5 = node(cut_rule_for(t2), {y, arr}, {pi_y, n4});
  return node(sc.name, {st_binary(S, x, y), z}, {n5});
}

// Arrow-family reduction: cut on a (b)rarr_i term. Displays go through the
// adjoint triangle of the opposite colour.
ProofRef reduce_arrow(int i, bool black, const ProofRef& pi1,
                      const ProofRef& pi2) {
  ProofRef pi_body = pi1->children[0]; // y |- a ARR b
  ProofRef pi_x = pi2->children[0];    // x |- a
  ProofRef pi_b = pi2->children[1];    // b |- z
  // the adjoint triangle of rarr is btri; of brarr it is tri
  StKind Tri = black ? stri_k(i) : sbtri_k(i);
  FirstCoordDisplay fc = black ? first_coord_tri(i) : first_coord_btri(i);
  SecondCoordDisplay sc = black ? second_coord_tri(i) : second_coord_btri(i);
  StRef y = pi_body->conclusion.lhs;
  StRef a = pi_x->conclusion.rhs;
  StRef x = pi_x->conclusion.lhs;
  StRef b = pi_b->conclusion.lhs;
  StRef z = pi_b->conclusion.rhs;
  Type t1 = infer_type(a);
  auto n1 = node(sc.name, {st_binary(Tri, a, y), b}, {pi_body});
  StRef adj = st_binary(fc.kind, b, y);
  auto n2 = node(fc.name, {a, adj}, {n1});
  auto n3 = node(cut_rule_for(t1), {x, adj}, {pi_x, n2});
  auto n4 = node(fc.name, {st_binary(Tri, x, y), b}, {n3});
  auto n5 = node("Cut_FM", {st_binary(Tri, x, y), z}, {n4, pi_b});
  return node(sc.name, {y, st_binary(sc.kind == StKind::Vrarr3 ||
                                             sc.kind == StKind::Vbrarr3
                                         ? sc.kind
                                         : sc.kind,
                                     x, z)},
              {n5});
}

StRef semi_(StRef a, StRef b) { return st_binary(StKind::Semi, a, b); }
StRef lt_(StRef a, StRef b) { return st_binary(StKind::Lt, a, b); }
StRef gt_(StRef a, StRef b) { return st_binary(StKind::Gt, a, b); }

// conjunction: and_R over (X|-A, Y|-B) against and_L over (A;B |- Z)
ProofRef reduce_and(const ProofRef& pi1, const ProofRef& pi2) {
  ProofRef pi_x = pi1->children[0], pi_y = pi1->children[1];
  ProofRef body = pi2->children[0];
  StRef A = pi_x->conclusion.rhs, B = pi_y->conclusion.rhs;
  StRef X = pi_x->conclusion.lhs, Y = pi_y->conclusion.lhs;
  StRef Z = body->conclusion.rhs;
  auto n1 = node("(;,<)", {A, lt_(Z, B)}, {body});
  auto n2 = node("Cut_FM", {X, lt_(Z, B)}, {pi_x, n1});
  auto n3 = node("(;,<)", {semi_(X, B), Z}, {n2});
  auto n4 = node("(;,>)", {B, gt_(X, Z)}, {n3});
  auto n5 = node("Cut_FM", {Y, gt_(X, Z)}, {pi_y, n4});
  return node("(;,>)", {semi_(X, Y), Z}, {n5});
}

// disjunction: or_R over (Z |- A;B) against or_L over (A|-X, B|-Y)
ProofRef reduce_or(const ProofRef& pi1, const ProofRef& pi2) {
  ProofRef body = pi1->children[0];
  ProofRef pi_a = pi2->children[0], pi_b = pi2->children[1];
  StRef A = pi_a->conclusion.lhs, B = pi_b->conclusion.lhs;
  StRef X = pi_a->conclusion.rhs, Y = pi_b->conclusion.rhs;
  StRef Z = body->conclusion.lhs;
  auto n1 = node("(<,;)", {lt_(Z, B), A}, {body});
  auto n2 = node("Cut_FM", {lt_(Z, B), X}, {n1, pi_a});
  auto n3 = node("(<,;)", {Z, semi_(X, B)}, {n2});
  auto n4 = node("(>,;)", {gt_(X, Z), B}, {n3});
  auto n5 = node("Cut_FM", {gt_(X, Z), Y}, {n4, pi_b});
  return node("(>,;)", {Z, semi_(X, Y)}, {n5});
}

// implication: imp_R over (Z |- A>B) against imp_L over (X|-A, B|-Y)
ProofRef reduce_imp(const ProofRef& pi1, const ProofRef& pi2) {
  ProofRef body = pi1->children[0];
  ProofRef pi_a = pi2->children[0], pi_b = pi2->children[1];
  StRef A = pi_a->conclusion.rhs, B = pi_b->conclusion.lhs;
  StRef X = pi_a->conclusion.lhs, Y = pi_b->conclusion.rhs;
  StRef Z = body->conclusion.lhs;
  auto n1 = node("(;,>)", {semi_(A, Z), B}, {body});
  auto n2 = node("(;,<)", {A, lt_(B, Z)}, {n1});
  auto n3 = node("Cut_FM", {X, lt_(B, Z)}, {pi_a, n2});
  auto n4 = node("(;,<)", {semi_(X, Z), B}, {n3});
  auto n5 = node("Cut_FM", {semi_(X, Z), Y}, {n4, pi_b});
  return node("(;,>)", {Z, gt_(X, Y)}, {n5});
}

// left implication: limp_R over (Z |- B<A) against limp_L over (B|-Y, X|-A)
ProofRef reduce_limp(const ProofRef& pi1, const ProofRef& pi2) {
  ProofRef body = pi1->children[0];
  ProofRef pi_b = pi2->children[0], pi_a = pi2->children[1];
  StRef B = pi_b->conclusion.lhs, A = pi_a->conclusion.rhs;
  StRef Y = pi_b->conclusion.rhs, X = pi_a->conclusion.lhs;
  StRef Z = body->conclusion.lhs;
  auto n1 = node("(;,<)", {semi_(Z, A), B}, {body});
  auto n2 = node("(;,>)", {A, gt_(Z, B)}, {n1});
  auto n3 = node("Cut_FM", {X, gt_(Z, B)}, {pi_a, n2});
  auto n4 = node("(;,>)", {semi_(Z, X), B}, {n3});
  auto n5 = node("Cut_FM", {semi_(Z, X), Y}, {n4, pi_b});
  return node("(;,<)", {Z, lt_(Y, X)}, {n5});
}

// left subtraction: lsub_R over (Y|-B, A|-X) against lsub_L over (B<A |- Z)
ProofRef reduce_lsub(const ProofRef& pi1, const ProofRef& pi2) {
  ProofRef pi_b = pi1->children[0], pi_a = pi1->children[1];
  ProofRef body = pi2->children[0];
  StRef B = pi_b->conclusion.rhs, A = pi_a->conclusion.lhs;
  StRef Y = pi_b->conclusion.lhs, X = pi_a->conclusion.rhs;
  StRef Z = body->conclusion.rhs;
  auto n1 = node("(<,;)", {B, semi_(Z, A)}, {body});
  auto n2 = node("Cut_FM", {Y, semi_(Z, A)}, {pi_b, n1});
  auto n3 = node("(>,;)", {gt_(Z, Y), A}, {n2});
  auto n4 = node("Cut_FM", {gt_(Z, Y), X}, {n3, pi_a});
  auto n5 = node("(>,;)", {Y, semi_(Z, X)}, {n4});
  return node("(<,;)", {lt_(Y, X), Z}, {n5});
}

// right subtraction: rsub_R over (A|-X, Y|-B) against rsub_L over (A>B |- Z)
ProofRef reduce_rsub(const ProofRef& pi1, const ProofRef& pi2) {
  ProofRef pi_a = pi1->children[0], pi_b = pi1->children[1];
  ProofRef body = pi2->children[0];
  StRef A = pi_a->conclusion.lhs, B = pi_b->conclusion.rhs;
  StRef X = pi_a->conclusion.rhs, Y = pi_b->conclusion.lhs;
  StRef Z = body->conclusion.rhs;
  auto n1 = node("(>,;)", {B, semi_(A, Z)}, {body});
  auto n2 = node("Cut_FM", {Y, semi_(A, Z)}, {pi_b, n1});
  auto n3 = node("(<,;)", {lt_(Y, Z), A}, {n2});
  auto n4 = node("Cut_FM", {lt_(Y, Z), X}, {n3, pi_a});
  auto n5 = node("(<,;)", {Y, semi_(X, Z)}, {n4});
  return node("(>,;)", {gt_(X, Y), Z}, {n5});
}

int hetero_index(OpKind k) {
  switch (k) {
  case OpKind::Tri0: case OpKind::Btri0: case OpKind::Rarr0: case OpKind::Brarr0:
    return 0;
  case OpKind::Tri1: case OpKind::Btri1: case OpKind::Rarr1: case OpKind::Brarr1:
    return 1;
  case OpKind::Tri2: case OpKind::Btri2: case OpKind::Rarr2: case OpKind::Brarr2:
    return 2;
  default:
    return 3;
  }
}

} // namespace

ProofRef principal_reduce(const ProofRef& t, const std::vector<int>& cut_path,
                          Base base) {
  ProofRef cut = subtree_at(t, cut_path);
  if (!cut || !is_cut_node(cut) || cut->children.size() != 2)
    throw ReduceError("principal_reduce: not a cut node");
  ProofRef pi1 = cut->children[0], pi2 = cut->children[1];

  // degenerate identity shapes
  if (equal(cut->conclusion, pi1->conclusion))
    return replace_subtree(t, cut_path, pi1);
  if (equal(cut->conclusion, pi2->conclusion))
    return replace_subtree(t, cut_path, pi2);

  if (!principal_on_right(pi1, base) || !principal_on_left(pi2, base))
    throw ReduceError("principal_reduce: cut term is parametric in a premise");

  const StRef& ct = pi1->conclusion.rhs;
  if (ct->kind != StKind::Leaf)
    throw ReduceError("principal_reduce: cut term is not operational");
  const OpRef& term = ct->term;

  ProofRef out;
  switch (term->kind) {
  case OpKind::Atom: {
    // axiom against axiom; C''8 closes axioms under cut
    Type ty = term->atom_type;
    if (ty == Type::Ag || ty == Type::Fnc) {
      out = pi1; // a |- a against a |- a
      break;
    }
    auto l = match_atom_axiom(pi1->conclusion);
    auto r = match_atom_axiom(pi2->conclusion);
    if (!l || !r)
      throw ReduceError("principal_reduce: atom cut premises are not axioms");
    Sequent combined{pi1->conclusion.lhs, pi2->conclusion.rhs};
    bool plain = l->phi.empty() && r->psi.empty();
    out = node(plain ? "Id" : "atom", combined, {});
    break;
  }
  case OpKind::Top:
    // TopR against top_L over I |- X
    if (pi2->rule != "top_L")
      throw ReduceError("principal_reduce: expected top_L on the right");
    out = pi2->children[0];
    break;
  case OpKind::Bot:
    if (pi1->rule != "bot_R")
      throw ReduceError("principal_reduce: expected bot_R on the left");
    out = pi1->children[0];
    break;
  case OpKind::And:
    out = reduce_and(pi1, pi2);
    break;
  case OpKind::Or:
    out = reduce_or(pi1, pi2);
    break;
  case OpKind::Imp:
    out = reduce_imp(pi1, pi2);
    break;
  case OpKind::Limp:
    out = reduce_limp(pi1, pi2);
    break;
  case OpKind::Lsub:
    out = reduce_lsub(pi1, pi2);
    break;
  case OpKind::Rsub:
    out = reduce_rsub(pi1, pi2);
    break;
  case OpKind::Tri0:
  case OpKind::Tri1:
  case OpKind::Tri2:
  case OpKind::Tri3:
    out = reduce_triangle(hetero_index(term->kind), false, pi1, pi2);
    break;
  case OpKind::Btri0:
  case OpKind::Btri1:
  case OpKind::Btri2:
  case OpKind::Btri3:
    out = reduce_triangle(hetero_index(term->kind), true, pi1, pi2);
    break;
  case OpKind::Rarr0:
  case OpKind::Rarr1:
  case OpKind::Rarr2:
    out = reduce_arrow(hetero_index(term->kind), false, pi1, pi2);
    break;
  case OpKind::Brarr0:
  case OpKind::Brarr1:
  case OpKind::Brarr2:
    out = reduce_arrow(hetero_index(term->kind), true, pi1, pi2);
    break;
  default:
    throw ReduceError("principal_reduce: no reduction schema for this cut term");
  }
  if (!equal(out->conclusion, cut->conclusion))
    throw ReduceError("principal_reduce: endsequent changed");
  return replace_subtree(t, cut_path, out);
}

// ---------------------------------------------------------------------------
// Parametric stage

namespace {

struct TraceCtx {
  OpRef cut_term;
  StRef replacement;   // substituted for the traced occurrences
  ProofRef other;      // the untouched cut premise
  bool precedent;      // true: tracing the right premise (occurrences in lhs)
  Base base;
};

std::vector<std::pair<std::string, OccPath>> pattern_var_sites(const SchemaSeq& p) {
  std::vector<std::pair<std::string, OccPath>> out;
  std::function<void(const StRef&, int, std::vector<int>&)> go =
      [&](const StRef& s, int side, std::vector<int>& path) {
        if (s->kind == StKind::Var) {
          out.push_back({s->name, {side, path}});
        } else if (is_st_binary(s->kind)) {
          path.push_back(0);
          go(s->lhs, side, path);
          path.pop_back();
          path.push_back(1);
          go(s->rhs, side, path);
          path.pop_back();
        }
      };
  std::vector<int> path;
  go(p.lhs, 0, path);
  go(p.rhs, 1, path);
  return out;
}

bool path_is_prefix(const OccPath& pre, const OccPath& full,
                    std::vector<int>* residual) {
  if (pre.side != full.side || pre.path.size() > full.path.size()) return false;
  for (size_t i = 0; i < pre.path.size(); i++)
    if (pre.path[i] != full.path[i]) return false;
  if (residual)
    residual->assign(full.path.begin() + (long)pre.path.size(), full.path.end());
  return true;
}

// p as the nth nested tail of an atom-axiom side.
OccPath atom_p_path(int side, size_t chain_len) {
  OccPath p;
  p.side = side;
  p.path.assign(chain_len, 1);
  return p;
}

ProofRef make_cut(const TraceCtx& ctx, const ProofRef& displayed_leaf) {
  Type ty = infer_type(ctx.cut_term);
  if (ctx.precedent) {
    Sequent concl{ctx.replacement, displayed_leaf->conclusion.rhs};
    return node(cut_rule_for(ty), concl, {ctx.other, displayed_leaf});
  }
  Sequent concl{displayed_leaf->conclusion.lhs, ctx.replacement};
  return node(cut_rule_for(ty), concl, {displayed_leaf, ctx.other});
}

ProofRef transform(const ProofRef& n, const OccPath& occ, const TraceCtx& ctx);

// Undisplayed principal occurrence inside an atom axiom: pick the shortest
// display-equivalent axiom with the atom isolated, cut against it, then
// replay the display steps with the replacement substituted through.
ProofRef atom_display_equivalence(const ProofRef& n, const OccPath& occ,
                                  const TraceCtx& ctx) {
  DisplayResult d = display_search(n->conclusion, occ);
  if (!d.ok)
    throw ReduceError("atom axiom occurrence cannot be displayed: " + d.error);
  if (!match_atom_axiom(d.final))
    throw ReduceError("display-equivalent sequent is not an atom axiom");
  ProofRef leaf = node("atom", d.final, {});
  ProofRef cur = make_cut(ctx, leaf);
  // replay the postulate chain downward, substituting at the traced spot
  for (size_t k = d.steps.size(); k-- > 0;) {
    Sequent before = k == 0 ? n->conclusion : d.steps[k - 1].result;
    OccPath at = k == 0 ? occ : d.trail[k - 1];
    Sequent substituted = replace_at(before, at, ctx.replacement);
    cur = node(d.steps[k].name, substituted, {cur});
  }
  return cur;
}

struct ResolvedInstance {
  const RuleSchema* schema;
  bool reversed;
  const SchemaSeq* concl_pattern;
};

ResolvedInstance resolve_instance(const ProofRef& n, Base base) {
  const RuleSchema* schema = find_schema(n->rule, base);
  if (!schema) throw ReduceError("unknown rule " + n->rule);
  std::vector<Sequent> premises;
  for (auto& c : n->children) premises.push_back(c->conclusion);
  MatchError err;
  auto inst = match_instance(*schema, premises, n->conclusion, &err);
  if (!inst)
    throw ReduceError("history tracing cannot re-match " + n->rule + ": " +
                      err.reason);
  ResolvedInstance r;
  r.schema = schema;
  r.reversed = inst->reversed;
  r.concl_pattern = r.reversed ? &schema->premises[0] : &schema->conclusion;
  return r;
}

ProofRef transform(const ProofRef& n, const OccPath& occ, const TraceCtx& ctx) {
  // sanity: the occurrence really is the cut term
  StRef at = subterm_at(n->conclusion, occ);
  if (!at || at->kind != StKind::Leaf || !equal(at->term, ctx.cut_term))
    throw ReduceError("history tracing lost the cut term");

  bool whole_side = occ.path.empty();
  if (whole_side) {
    bool principal = occ.side == 0 ? principal_on_left(n, ctx.base)
                                   : principal_on_right(n, ctx.base);
    if (principal) return make_cut(ctx, n);
  }

  const RuleSchema* schema = find_schema(n->rule, ctx.base);
  if (schema && schema->atom_axiom) {
    auto shape = match_atom_axiom(n->conclusion);
    if (!shape) throw ReduceError("invalid atom axiom in history");
    size_t chain = occ.side == 0 ? shape->phi.size() : shape->psi.size();
    if (occ == atom_p_path(occ.side, chain))
      return atom_display_equivalence(n, occ, ctx);
    // otherwise the occurrence sits inside one of the parametric Fnc
    // structures; substitute in place and re-validate the axiom shape
    Sequent substituted = replace_at(n->conclusion, occ, ctx.replacement);
    if (!match_atom_axiom(substituted))
      throw ReduceError("substitution breaks the atom axiom shape");
    return node(n->rule, substituted, {});
  }
  if (schema && schema->axiom)
    throw ReduceError("parametric occurrence in axiom " + n->rule);

  ResolvedInstance inst = resolve_instance(n, ctx.base);
  auto sites = pattern_var_sites(*inst.concl_pattern);
  const std::string* var = nullptr;
  OccPath var_site;
  std::vector<int> residual;
  for (auto& [v, site] : sites) {
    if (path_is_prefix(site, occ, &residual)) {
      var = &v;
      var_site = site;
      break;
    }
  }
  if (!var)
    throw ReduceError("undisplayed principal occurrence outside an axiom (C'5)");

  // locate the congruence class owning this conclusion site
  int concl_tag = inst.reversed ? 0 : -1;
  const CongruenceClass* cls = nullptr;
  for (auto& c : inst.schema->congruence) {
    if (c.var != *var) continue;
    for (auto& s : c.sites) {
      if (s.premise == concl_tag && s.at == var_site) {
        cls = &c;
        break;
      }
    }
    if (cls) break;
  }
  if (!cls)
    throw ReduceError("missing congruence data for " + *var + " in " + n->rule);

  auto children = n->children;
  for (auto& s : cls->sites) {
    if (s.premise == concl_tag && s.at == var_site) continue;
    if (s.premise == concl_tag)
      throw ReduceError("parameter " + *var +
                        " proliferates in the conclusion; untraceable");
    int child_idx = inst.reversed ? 0 : s.premise;
    if (inst.reversed && s.premise != -1)
      throw ReduceError("inconsistent congruence orientation");
    OccPath child_occ{s.at.side, s.at.path};
    child_occ.path.insert(child_occ.path.end(), residual.begin(), residual.end());
    children[child_idx] = transform(children[child_idx], child_occ, ctx);
  }
  Sequent substituted = replace_at(n->conclusion, occ, ctx.replacement);
  ProofRef out = node(n->rule, substituted, children);
  // the rebuilt node must still be an instance of the same rule (C'6/C'7)
  std::vector<Sequent> premises;
  for (auto& c : out->children) premises.push_back(c->conclusion);
  MatchError err;
  if (!match_instance(*inst.schema, premises, out->conclusion, &err))
    throw ReduceError("substitution breaks " + n->rule + ": " + err.reason);
  return out;
}

} // namespace

ProofRef parametric_reduce(const ProofRef& t, const std::vector<int>& cut_path,
                           Base base) {
  ProofRef cut = subtree_at(t, cut_path);
  if (!cut || !is_cut_node(cut) || cut->children.size() != 2)
    throw ReduceError("parametric_reduce: not a cut node");
  ProofRef pi1 = cut->children[0], pi2 = cut->children[1];

  if (equal(cut->conclusion, pi1->conclusion))
    return replace_subtree(t, cut_path, pi1);
  if (equal(cut->conclusion, pi2->conclusion))
    return replace_subtree(t, cut_path, pi2);

  bool left_principal = principal_on_right(pi1, base);
  bool right_principal = principal_on_left(pi2, base);
  if (left_principal && right_principal)
    throw ReduceError("parametric_reduce: both cut terms are principal");

  const StRef& ct = pi1->conclusion.rhs;
  if (ct->kind != StKind::Leaf)
    throw ReduceError("parametric_reduce: cut term is not operational");

  TraceCtx ctx;
  ctx.cut_term = ct->term;
  ctx.base = base;
  // trace the premise whose occurrence is parametric; with both parametric,
  // trace the right premise first
  if (!right_principal) {
    ctx.precedent = true;
    ctx.replacement = pi1->conclusion.lhs;
    ctx.other = pi1;
    ProofRef replaced = transform(pi2, OccPath{0, {}}, ctx);
    if (!equal(replaced->conclusion, cut->conclusion))
      throw ReduceError("parametric_reduce: endsequent changed");
    return replace_subtree(t, cut_path, replaced);
  }
  ctx.precedent = false;
  ctx.replacement = pi2->conclusion.rhs;
  ctx.other = pi2;
  ProofRef replaced = transform(pi1, OccPath{1, {}}, ctx);
  if (!equal(replaced->conclusion, cut->conclusion))
    throw ReduceError("parametric_reduce: endsequent changed");
  return replace_subtree(t, cut_path, replaced);
}

// ---------------------------------------------------------------------------
// Driver

namespace {

bool find_topmost_cut(const ProofRef& t, std::vector<int>& path) {
  // a cut with no cut among its descendants; first such in preorder
  std::function<bool(const ProofRef&, std::vector<int>&)> has_cut =
      [&](const ProofRef& n, std::vector<int>& p) -> bool {
    for (size_t i = 0; i < n->children.size(); i++) {
      p.push_back((int)i);
      if (has_cut(n->children[i], p)) return true;
      p.pop_back();
    }
    if (is_cut_node(n)) return true;
    return false;
  };
  // has_cut returns with `path` pointing at the deepest-first cut found in
  // preorder; since children are explored before the node itself, the first
  // hit has cut-free premises
  return has_cut(t, path);
}

void collect_cuts(const ProofRef& t, std::vector<int>& path,
                  std::vector<std::vector<int>>& out) {
  if (is_cut_node(t)) out.push_back(path);
  for (size_t i = 0; i < t->children.size(); i++) {
    path.push_back((int)i);
    collect_cuts(t->children[i], path, out);
    path.pop_back();
  }
}

} // namespace

EliminationResult eliminate_cuts(const ProofRef& t, int fuel, Base base) {
  EliminationResult res;
  CheckOptions opts;
  opts.base = base;
  opts.allow_cut = true;
  CheckReport pre = check_proof(t, opts);
  if (!pre.ok) {
    res.proof = t;
    res.error = "input proof does not check";
    return res;
  }
  ProofRef cur;
  try {
    cur = expand_macros(t);
  } catch (const MacroMismatch& e) {
    res.proof = t;
    res.error = e.what();
    return res;
  }
  Sequent endseq = cur->conclusion;

  while (true) {
    std::vector<int> path;
    if (!find_topmost_cut(cur, path)) break;
    if (res.steps >= fuel) {
      res.proof = cur;
      res.error = "fuel exhausted after " + std::to_string(res.steps) + " steps";
      return res;
    }
    ProofRef cut = subtree_at(cur, path);
    CutRank before = cut_rank_at(cur, path);
    ProofRef next;
    bool principal_step = false;
    try {
      ProofRef pi1 = cut->children[0], pi2 = cut->children[1];
      if (equal(cut->conclusion, pi1->conclusion)) {
        next = replace_subtree(cur, path, pi1);
      } else if (equal(cut->conclusion, pi2->conclusion)) {
        next = replace_subtree(cur, path, pi2);
      } else if (principal_on_right(pi1, base) && principal_on_left(pi2, base)) {
        principal_step = true;
        next = principal_reduce(cur, path, base);
      } else {
        next = parametric_reduce(cur, path, base);
      }
    } catch (const ReduceError& e) {
      res.proof = cur;
      res.error = e.what();
      return res;
    }
    res.steps++;
    // per-step guarantees: same endsequent, still a valid proof, and the
    // lexicographic (complexity, height) measure behaves as promised
    if (!equal(next->conclusion, endseq)) {
      res.proof = cur;
      res.error = "endsequent changed during reduction";
      return res;
    }
    ProofRef new_site = subtree_at(next, path);
    if (new_site) {
      std::vector<int> p2;
      std::vector<std::vector<int>> new_cuts;
      collect_cuts(new_site, p2, new_cuts);
      for (auto& cp : new_cuts) {
        CutRank r = cut_rank_at(new_site, cp);
        bool ok_measure;
        if (principal_step) {
          ok_measure = r.complexity < before.complexity;
        } else {
          ProofRef c = subtree_at(new_site, cp);
          bool both_principal = principal_on_right(c->children[0], base) &&
                                principal_on_left(c->children[1], base);
          ok_measure = r.complexity == before.complexity &&
                       (both_principal || r.height < before.height);
          ok_measure = ok_measure || r.complexity < before.complexity;
        }
        if (!ok_measure) {
          res.proof = next;
          res.error = "cut rank failed to decrease";
          return res;
        }
      }
    }
    CheckReport mid = check_proof(next, opts);
    if (!mid.ok) {
      res.proof = next;
      res.error = "intermediate proof failed validation: " +
                  mid.failures.front().reason + " at rule " +
                  mid.failures.front().rule;
      return res;
    }
    cur = next;
  }
  CheckOptions final_opts;
  final_opts.base = base;
  final_opts.allow_cut = false;
  CheckReport fin = check_proof(cur, final_opts);
  if (!fin.ok) {
    res.proof = cur;
    res.error = "cut-free result failed validation";
    return res;
  }
  res.ok = true;
  res.proof = cur;
  return res;
}

} // namespace dyncalc
