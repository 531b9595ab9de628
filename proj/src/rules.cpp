#include "dyncalc/rules.hpp"

#include <algorithm>
#include <cassert>
#include <functional>

namespace dyncalc {

const VarInfo* RuleSchema::var_info(const std::string& n) const {
  for (auto& v : vars)
    if (v.name == n) return &v;
  return nullptr;
}

bool Substitution::operator==(const Substitution& o) const {
  if (st.size() != o.st.size() || op.size() != o.op.size()) return false;
  for (auto& [k, v] : st) {
    auto it = o.st.find(k);
    if (it == o.st.end() || !equal(v, it->second)) return false;
  }
  for (auto& [k, v] : op) {
    auto it = o.op.find(k);
    if (it == o.op.end() || !equal(v, it->second)) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Catalog construction

namespace {

// Shorthand builders for schematic sequents.
StRef sv(const char* n, Type t) { return st_var(n, t); }
OpRef ov(const char* n, Type t) { return op_var(n, t, false); }
OpRef av(const char* n, Type t) { return op_var(n, t, true); }
StRef lf(OpRef t) { return st_leaf(std::move(t)); }
StRef neutral() { return st_neutral(); }
StRef semi(StRef a, StRef b) { return st_binary(StKind::Semi, a, b); }
StRef lt(StRef a, StRef b) { return st_binary(StKind::Lt, a, b); }
StRef gt(StRef a, StRef b) { return st_binary(StKind::Gt, a, b); }

StKind stri(int i) {
  static const StKind k[4] = {StKind::Stri0, StKind::Stri1, StKind::Stri2,
                              StKind::Stri3};
  return k[i];
}
StKind sbtri(int i) {
  static const StKind k[4] = {StKind::Sbtri0, StKind::Sbtri1, StKind::Sbtri2,
                              StKind::Sbtri3};
  return k[i];
}
StKind srarr(int i) {
  static const StKind k[3] = {StKind::Srarr0, StKind::Srarr1, StKind::Srarr2};
  return k[i];
}
StKind sbrarr(int i) {
  static const StKind k[3] = {StKind::Sbrarr0, StKind::Sbrarr1, StKind::Sbrarr2};
  return k[i];
}
OpKind otri(int i) {
  static const OpKind k[4] = {OpKind::Tri0, OpKind::Tri1, OpKind::Tri2,
                              OpKind::Tri3};
  return k[i];
}
OpKind obtri(int i) {
  static const OpKind k[4] = {OpKind::Btri0, OpKind::Btri1, OpKind::Btri2,
                              OpKind::Btri3};
  return k[i];
}
OpKind orarr(int i) {
  static const OpKind k[3] = {OpKind::Rarr0, OpKind::Rarr1, OpKind::Rarr2};
  return k[i];
}
OpKind obrarr(int i) {
  static const OpKind k[3] = {OpKind::Brarr0, OpKind::Brarr1, OpKind::Brarr2};
  return k[i];
}

// First-coordinate type of the heterogeneous connectives, per index.
Type coord1_type(int i) {
  switch (i) {
  case 0: return Type::Fnc;
  case 1: return Type::Act;
  case 2: return Type::Ag;
  default: return Type::Ag;
  }
}
Type coord2_type(int i) { return i == 3 ? Type::Fnc : Type::Fm; }

class SchemaBuilder {
public:
  explicit SchemaBuilder(std::string name) { s_.name = std::move(name); }

  SchemaBuilder& prem(StRef l, StRef r) {
    s_.premises.push_back({std::move(l), std::move(r)});
    return *this;
  }
  SchemaBuilder& concl(StRef l, StRef r) {
    s_.conclusion = {std::move(l), std::move(r)};
    return *this;
  }
  SchemaBuilder& invertible() {
    s_.invertible = true;
    return *this;
  }
  SchemaBuilder& display() {
    s_.display_postulate = true;
    s_.invertible = true;
    return *this;
  }
  SchemaBuilder& axiom() {
    s_.axiom = true;
    return *this;
  }
  SchemaBuilder& cut(Type t) {
    s_.cut = true;
    s_.cut_type = t;
    return *this;
  }
  SchemaBuilder& macro() {
    s_.macro = true;
    return *this;
  }
  SchemaBuilder& grishin() {
    s_.grishin = true;
    return *this;
  }
  SchemaBuilder& principal(bool left, bool right) {
    s_.principal_left = left;
    s_.principal_right = right;
    return *this;
  }
  // Splits every occurrence of `var` into its own congruence class.
  SchemaBuilder& split_congruence(std::string var) {
    split_.push_back(std::move(var));
    return *this;
  }

  RuleSchema build() {
    collect_vars();
    derive_congruence();
    return s_;
  }

private:
  void collect_from_op(const OpRef& t) {
    if (!t) return;
    if (t->kind == OpKind::Var) {
      add_var({t->name, true, t->atom_only, t->atom_type});
      return;
    }
    if (is_op_binary(t->kind)) {
      collect_from_op(t->lhs);
      collect_from_op(t->rhs);
    }
  }
  void collect_from_st(const StRef& s) {
    if (!s) return;
    switch (s->kind) {
    case StKind::Var:
      add_var({s->name, false, false, s->var_type});
      break;
    case StKind::Leaf:
      collect_from_op(s->term);
      break;
    case StKind::Neutral:
      break;
    default:
      collect_from_st(s->lhs);
      collect_from_st(s->rhs);
    }
  }
  void add_var(VarInfo v) {
    for (auto& w : s_.vars) {
      if (w.name == v.name) {
        assert(w.operational == v.operational && w.type == v.type &&
               w.atom_only == v.atom_only && "inconsistent metavariable sorts");
        return;
      }
    }
    s_.vars.push_back(std::move(v));
  }
  void collect_vars() {
    for (auto& p : s_.premises) {
      collect_from_st(p.lhs);
      collect_from_st(p.rhs);
    }
    collect_from_st(s_.conclusion.lhs);
    collect_from_st(s_.conclusion.rhs);
  }

  // Congruence concerns parameters only: structural metavariable sites.
  // Operational metavariables are principal or auxiliary constituents of
  // introduction rules, never parameters.
  void sites_in_st(const StRef& s, int premise, int side, std::vector<int>& path,
                   std::map<std::string, std::vector<VarSite>>& out) {
    if (!s) return;
    switch (s->kind) {
    case StKind::Var:
      out[s->name].push_back({premise, {side, path}});
      break;
    case StKind::Leaf:
    case StKind::Neutral:
      break;
    default:
      path.push_back(0);
      sites_in_st(s->lhs, premise, side, path, out);
      path.pop_back();
      path.push_back(1);
      sites_in_st(s->rhs, premise, side, path, out);
      path.pop_back();
    }
  }

  void derive_congruence() {
    std::map<std::string, std::vector<VarSite>> sites;
    std::vector<int> path;
    for (size_t i = 0; i < s_.premises.size(); i++) {
      sites_in_st(s_.premises[i].lhs, (int)i, 0, path, sites);
      sites_in_st(s_.premises[i].rhs, (int)i, 1, path, sites);
    }
    sites_in_st(s_.conclusion.lhs, -1, 0, path, sites);
    sites_in_st(s_.conclusion.rhs, -1, 1, path, sites);
    for (auto& v : s_.vars) {
      if (v.operational) continue;
      auto& ss = sites[v.name];
      bool split = std::find(split_.begin(), split_.end(), v.name) != split_.end();
      if (split) {
        for (auto& site : ss) s_.congruence.push_back({v.name, {site}});
      } else {
        s_.congruence.push_back({v.name, ss});
      }
    }
  }

  RuleSchema s_;
  std::vector<std::string> split_;
};

std::vector<RuleSchema> make_catalog(Base base) {
  std::vector<RuleSchema> out;
  auto add = [&](SchemaBuilder b) { out.push_back(b.build()); };

  // ---- axioms
  add(SchemaBuilder("Id").axiom().principal(true, true).concl(lf(av("p", Type::Fm)),
                                                              lf(av("p", Type::Fm))));
  add(SchemaBuilder("AgId").axiom().principal(true, true).concl(
      lf(av("a", Type::Ag)), lf(av("a", Type::Ag))));
  add(SchemaBuilder("FncId").axiom().principal(true, true).concl(
      lf(av("f", Type::Fnc)), lf(av("f", Type::Fnc))));
  add(SchemaBuilder("BotL").axiom().principal(true, false).concl(
      lf(op_nullary(OpKind::Bot)), neutral()));
  add(SchemaBuilder("TopR").axiom().principal(false, true).concl(
      neutral(), lf(op_nullary(OpKind::Top))));
  {
    // Generalized identity Phi p |- Psi p; matching is special-cased, the
    // schema entry records the name and the base shape p |- p.
    SchemaBuilder b("atom");
    b.axiom().concl(lf(av("p", Type::Fm)), lf(av("p", Type::Fm)));
    RuleSchema s = b.build();
    s.atom_axiom = true;
    out.push_back(std::move(s));
  }

  // ---- cut rules, one per type
  add(SchemaBuilder("Cut_FM")
          .cut(Type::Fm)
          .prem(sv("X", Type::Fm), lf(ov("A", Type::Fm)))
          .prem(lf(ov("A", Type::Fm)), sv("Y", Type::Fm))
          .concl(sv("X", Type::Fm), sv("Y", Type::Fm)));
  add(SchemaBuilder("Cut_FNC")
          .cut(Type::Fnc)
          .prem(sv("F", Type::Fnc), lf(ov("f", Type::Fnc)))
          .prem(lf(ov("f", Type::Fnc)), sv("G", Type::Fnc))
          .concl(sv("F", Type::Fnc), sv("G", Type::Fnc)));
  add(SchemaBuilder("Cut_ACT")
          .cut(Type::Act)
          .prem(sv("C", Type::Act), lf(ov("g", Type::Act)))
          .prem(lf(ov("g", Type::Act)), sv("D", Type::Act))
          .concl(sv("C", Type::Act), sv("D", Type::Act)));
  add(SchemaBuilder("Cut_AG")
          .cut(Type::Ag)
          .prem(sv("A", Type::Ag), lf(ov("a", Type::Ag)))
          .prem(lf(ov("a", Type::Ag)), sv("B", Type::Ag))
          .concl(sv("A", Type::Ag), sv("B", Type::Ag)));

  auto X = [] { return sv("X", Type::Fm); };
  auto Y = [] { return sv("Y", Type::Fm); };
  auto Z = [] { return sv("Z", Type::Fm); };
  auto W = [] { return sv("W", Type::Fm); };
  auto A = [] { return ov("A", Type::Fm); };
  auto B = [] { return ov("B", Type::Fm); };

  // ---- FM structural rules
  add(SchemaBuilder("I1_L").invertible().prem(X(), Y()).concl(neutral(),
                                                              lt(Y(), X())));
  add(SchemaBuilder("I1_R").invertible().prem(X(), Y()).concl(lt(X(), Y()),
                                                              neutral()));
  add(SchemaBuilder("I2_L").invertible().prem(X(), Y()).concl(neutral(),
                                                              gt(X(), Y())));
  add(SchemaBuilder("I2_R").invertible().prem(X(), Y()).concl(gt(Y(), X()),
                                                              neutral()));
  add(SchemaBuilder("IW_L").prem(neutral(), X()).concl(Y(), X()));
  add(SchemaBuilder("IW_R").prem(X(), neutral()).concl(X(), Y()));
  add(SchemaBuilder("W1_L").prem(X(), Z()).concl(Y(), lt(Z(), X())));
  add(SchemaBuilder("W1_R").prem(X(), Z()).concl(lt(X(), Z()), Y()));
  add(SchemaBuilder("W2_L").prem(X(), Z()).concl(Y(), gt(X(), Z())));
  add(SchemaBuilder("W2_R").prem(X(), Z()).concl(gt(Z(), X()), Y()));
  add(SchemaBuilder("C_L").prem(semi(X(), X()), Y()).concl(X(), Y()));
  add(SchemaBuilder("C_R").prem(Y(), semi(X(), X())).concl(Y(), X()));
  add(SchemaBuilder("E_L").prem(semi(Y(), X()), Z()).concl(semi(X(), Y()), Z()));
  add(SchemaBuilder("E_R").prem(Z(), semi(X(), Y())).concl(Z(), semi(Y(), X())));
  add(SchemaBuilder("A_L")
          .prem(semi(X(), semi(Y(), Z())), W())
          .concl(semi(semi(X(), Y()), Z()), W()));
  add(SchemaBuilder("A_R")
          .prem(W(), semi(semi(Z(), Y()), X()))
          .concl(W(), semi(Z(), semi(Y(), X()))));

  // ---- FM display postulates
  add(SchemaBuilder("(;,<)").display().prem(semi(X(), Y()), Z()).concl(
      X(), lt(Z(), Y())));
  add(SchemaBuilder("(<,;)").display().prem(Z(), semi(X(), Y())).concl(
      lt(Z(), Y()), X()));
  add(SchemaBuilder("(;,>)").display().prem(semi(X(), Y()), Z()).concl(
      Y(), gt(X(), Z())));
  add(SchemaBuilder("(>,;)").display().prem(Z(), semi(X(), Y())).concl(
      gt(X(), Z()), Y()));

  // ---- Grishin rules (classical base only)
  if (base == Base::Classical) {
    add(SchemaBuilder("Gri_L").grishin().invertible().prem(
        gt(X(), semi(Y(), Z())), W()).concl(semi(gt(X(), Y()), Z()), W()));
    add(SchemaBuilder("Gri_R").grishin().invertible().prem(
        W(), gt(X(), semi(Y(), Z()))).concl(W(), semi(gt(X(), Y()), Z())));
  }

  // ---- FM operational rules
  add(SchemaBuilder("bot_R").principal(false, true).prem(X(), neutral()).concl(
      X(), lf(op_nullary(OpKind::Bot))));
  add(SchemaBuilder("top_L").principal(true, false).prem(neutral(), X()).concl(
      lf(op_nullary(OpKind::Top)), X()));
  add(SchemaBuilder("and_L").principal(true, false).prem(
      semi(lf(A()), lf(B())), Z()).concl(lf(op_binary(OpKind::And, A(), B())), Z()));
  add(SchemaBuilder("and_R")
          .principal(false, true)
          .prem(X(), lf(A()))
          .prem(Y(), lf(B()))
          .concl(semi(X(), Y()), lf(op_binary(OpKind::And, A(), B()))));
  add(SchemaBuilder("or_L")
          .principal(true, false)
          .prem(lf(A()), X())
          .prem(lf(B()), Y())
          .concl(lf(op_binary(OpKind::Or, A(), B())), semi(X(), Y())));
  add(SchemaBuilder("or_R").principal(false, true).prem(
      Z(), semi(lf(A()), lf(B()))).concl(Z(), lf(op_binary(OpKind::Or, A(), B()))));
  add(SchemaBuilder("limp_L")
          .principal(true, false)
          .prem(lf(B()), Y())
          .prem(X(), lf(A()))
          .concl(lf(op_binary(OpKind::Limp, B(), A())), lt(Y(), X())));
  add(SchemaBuilder("limp_R").principal(false, true).prem(
      Z(), lt(lf(B()), lf(A()))).concl(Z(), lf(op_binary(OpKind::Limp, B(), A()))));
  add(SchemaBuilder("lsub_L").principal(true, false).prem(
      lt(lf(B()), lf(A())), Z()).concl(lf(op_binary(OpKind::Lsub, B(), A())), Z()));
  add(SchemaBuilder("lsub_R")
          .principal(false, true)
          .prem(Y(), lf(B()))
          .prem(lf(A()), X())
          .concl(lt(Y(), X()), lf(op_binary(OpKind::Lsub, B(), A()))));
  add(SchemaBuilder("imp_L")
          .principal(true, false)
          .prem(X(), lf(A()))
          .prem(lf(B()), Y())
          .concl(lf(op_binary(OpKind::Imp, A(), B())), gt(X(), Y())));
  add(SchemaBuilder("imp_R").principal(false, true).prem(
      Z(), gt(lf(A()), lf(B()))).concl(Z(), lf(op_binary(OpKind::Imp, A(), B()))));
  add(SchemaBuilder("rsub_L").principal(true, false).prem(
      gt(lf(A()), lf(B())), Z()).concl(lf(op_binary(OpKind::Rsub, A(), B())), Z()));
  add(SchemaBuilder("rsub_R")
          .principal(false, true)
          .prem(lf(A()), X())
          .prem(Y(), lf(B()))
          .concl(gt(X(), Y()), lf(op_binary(OpKind::Rsub, A(), B()))));

  // ---- heterogeneous operational rules
  for (int i = 0; i <= 3; i++) {
    Type t1 = coord1_type(i), t2 = coord2_type(i);
    Type tr = i == 3 ? Type::Act : Type::Fm;
    auto a = [&] { return ov("a", t1); };
    auto b = [&] { return ov("b", t2); };
    auto x = [&] { return sv("x", t1); };
    auto y = [&] { return sv("y", t2); };
    auto z = [&] { return sv("z", tr); };
    std::string si = std::to_string(i);
    add(SchemaBuilder("tri" + si + "_L").principal(true, false).prem(
        st_binary(stri(i), lf(a()), lf(b())), z()).concl(
        lf(op_binary(otri(i), a(), b())), z()));
    add(SchemaBuilder("tri" + si + "_R")
            .principal(false, true)
            .prem(x(), lf(a()))
            .prem(y(), lf(b()))
            .concl(st_binary(stri(i), x(), y()), lf(op_binary(otri(i), a(), b()))));
    add(SchemaBuilder("btri" + si + "_L").principal(true, false).prem(
        st_binary(sbtri(i), lf(a()), lf(b())), z()).concl(
        lf(op_binary(obtri(i), a(), b())), z()));
    add(SchemaBuilder("btri" + si + "_R")
            .principal(false, true)
            .prem(x(), lf(a()))
            .prem(y(), lf(b()))
            .concl(st_binary(sbtri(i), x(), y()),
                   lf(op_binary(obtri(i), a(), b()))));
  }
  for (int i = 0; i <= 2; i++) {
    Type t1 = coord1_type(i);
    auto a = [&] { return ov("a", t1); };
    auto x = [&] { return sv("x", t1); };
    std::string si = std::to_string(i);
    add(SchemaBuilder("rarr" + si + "_L")
            .principal(true, false)
            .prem(x(), lf(a()))
            .prem(lf(B()), Y())
            .concl(lf(op_binary(orarr(i), a(), B())),
                   st_binary(srarr(i), x(), Y())));
    add(SchemaBuilder("rarr" + si + "_R").principal(false, true).prem(
        Z(), st_binary(srarr(i), lf(a()), lf(B()))).concl(
        Z(), lf(op_binary(orarr(i), a(), B()))));
    add(SchemaBuilder("brarr" + si + "_L")
            .principal(true, false)
            .prem(x(), lf(a()))
            .prem(lf(B()), Y())
            .concl(lf(op_binary(obrarr(i), a(), B())),
                   st_binary(sbrarr(i), x(), Y())));
    add(SchemaBuilder("brarr" + si + "_R").principal(false, true).prem(
        Z(), st_binary(sbrarr(i), lf(a()), lf(B()))).concl(
        Z(), lf(op_binary(obrarr(i), a(), B()))));
  }

  // ---- heterogeneous display postulates
  for (int i = 0; i <= 2; i++) {
    Type t1 = coord1_type(i);
    auto x = [&] { return sv("x", t1); };
    std::string si = std::to_string(i);
    add(SchemaBuilder("(tri" + si + ",brarr" + si + ")").display().prem(
        st_binary(stri(i), x(), Y()), Z()).concl(
        Y(), st_binary(sbrarr(i), x(), Z())));
    add(SchemaBuilder("(btri" + si + ",rarr" + si + ")").display().prem(
        st_binary(sbtri(i), x(), Y()), Z()).concl(
        Y(), st_binary(srarr(i), x(), Z())));
  }
  {
    auto x = [] { return sv("x", Type::Act); };
    add(SchemaBuilder("(tri1,blarr1)").display().prem(
        st_binary(stri(1), x(), Y()), Z()).concl(
        x(), st_binary(StKind::Sblarr1, Z(), Y())));
    add(SchemaBuilder("(btri1,larr1)").display().prem(
        st_binary(sbtri(1), x(), Y()), Z()).concl(
        x(), st_binary(StKind::Slarr1, Z(), Y())));
  }
  for (int i : {0, 2, 3}) {
    Type t1 = coord1_type(i), t2 = coord2_type(i);
    Type tr = i == 3 ? Type::Act : Type::Fm;
    StKind vl = i == 0 ? StKind::Vlarr0 : i == 2 ? StKind::Vlarr2 : StKind::Vlarr3;
    StKind vbl =
        i == 0 ? StKind::Vblarr0 : i == 2 ? StKind::Vblarr2 : StKind::Vblarr3;
    auto x = [&] { return sv("x", t1); };
    auto y = [&] { return sv("y", t2); };
    auto z = [&] { return sv("z", tr); };
    std::string si = std::to_string(i);
    add(SchemaBuilder("(tri" + si + ",vblarr" + si + ")").display().prem(
        st_binary(stri(i), x(), y()), z()).concl(x(), st_binary(vbl, z(), y())));
    add(SchemaBuilder("(btri" + si + ",vlarr" + si + ")").display().prem(
        st_binary(sbtri(i), x(), y()), z()).concl(x(), st_binary(vl, z(), y())));
  }
  {
    auto x = [] { return sv("x", Type::Ag); };
    auto y = [] { return sv("y", Type::Fnc); };
    auto z = [] { return sv("z", Type::Act); };
    add(SchemaBuilder("(tri3,vbrarr3)").display().prem(
        st_binary(stri(3), x(), y()), z()).concl(
        y(), st_binary(StKind::Vbrarr3, x(), z())));
    add(SchemaBuilder("(btri3,vrarr3)").display().prem(
        st_binary(sbtri(3), x(), y()), z()).concl(
        y(), st_binary(StKind::Vrarr3, x(), z())));
  }

  // ---- necessitation, conjugation, Fischer Servi, monotonicity
  for (int i = 0; i <= 2; i++) {
    Type t1 = coord1_type(i);
    auto x = [&] { return sv("x", t1); };
    std::string si = std::to_string(i);
    add(SchemaBuilder("nec" + si + "_tri").prem(neutral(), W()).concl(
        st_binary(stri(i), x(), neutral()), W()));
    add(SchemaBuilder("nec" + si + "_btri").prem(neutral(), W()).concl(
        st_binary(sbtri(i), x(), neutral()), W()));
    add(SchemaBuilder("nec" + si + "_rarr").prem(W(), neutral()).concl(
        W(), st_binary(srarr(i), x(), neutral())));
    add(SchemaBuilder("nec" + si + "_brarr").prem(W(), neutral()).concl(
        W(), st_binary(sbrarr(i), x(), neutral())));

    add(SchemaBuilder("conj" + si + "_tri").prem(
        st_binary(stri(i), x(), semi(st_binary(sbtri(i), x(), Y()), Z())), W())
            .concl(semi(Y(), st_binary(stri(i), x(), Z())), W()));
    add(SchemaBuilder("conj" + si + "_btri").prem(
        st_binary(sbtri(i), x(), semi(st_binary(stri(i), x(), Y()), Z())), W())
            .concl(semi(Y(), st_binary(sbtri(i), x(), Z())), W()));
    add(SchemaBuilder("conj" + si + "_rarr").prem(
        W(), st_binary(srarr(i), x(), semi(st_binary(sbrarr(i), x(), Y()), Z())))
            .concl(W(), semi(Y(), st_binary(srarr(i), x(), Z()))));
    add(SchemaBuilder("conj" + si + "_brarr").prem(
        W(), st_binary(sbrarr(i), x(), semi(st_binary(srarr(i), x(), Y()), Z())))
            .concl(W(), semi(Y(), st_binary(sbrarr(i), x(), Z()))));

    add(SchemaBuilder("FS" + si + "_tri").prem(
        gt(st_binary(srarr(i), x(), Y()), st_binary(stri(i), x(), Z())), W())
            .concl(st_binary(stri(i), x(), gt(Y(), Z())), W()));
    add(SchemaBuilder("FS" + si + "_btri").prem(
        gt(st_binary(sbrarr(i), x(), Y()), st_binary(sbtri(i), x(), Z())), W())
            .concl(st_binary(sbtri(i), x(), gt(Y(), Z())), W()));
    add(SchemaBuilder("FS" + si + "_rarr").prem(
        W(), gt(st_binary(stri(i), x(), Y()), st_binary(srarr(i), x(), Z())))
            .concl(W(), st_binary(srarr(i), x(), gt(Y(), Z()))));
    add(SchemaBuilder("FS" + si + "_brarr").prem(
        W(), gt(st_binary(sbtri(i), x(), Y()), st_binary(sbrarr(i), x(), Z())))
            .concl(W(), st_binary(sbrarr(i), x(), gt(Y(), Z()))));

    add(SchemaBuilder("mon" + si + "_tri").prem(
        semi(st_binary(stri(i), x(), Y()), st_binary(stri(i), x(), Z())), W())
            .concl(st_binary(stri(i), x(), semi(Y(), Z())), W()));
    add(SchemaBuilder("mon" + si + "_btri").prem(
        semi(st_binary(sbtri(i), x(), Y()), st_binary(sbtri(i), x(), Z())), W())
            .concl(st_binary(sbtri(i), x(), semi(Y(), Z())), W()));
    add(SchemaBuilder("mon" + si + "_rarr").prem(
        W(), semi(st_binary(srarr(i), x(), Y()), st_binary(srarr(i), x(), Z())))
            .concl(W(), st_binary(srarr(i), x(), semi(Y(), Z()))));
    add(SchemaBuilder("mon" + si + "_brarr").prem(
        W(), semi(st_binary(sbrarr(i), x(), Y()), st_binary(sbrarr(i), x(), Z())))
            .concl(W(), st_binary(sbrarr(i), x(), semi(Y(), Z()))));
  }

  // ---- swap rules (interaction of dynamic and epistemic modalities)
  {
    auto a = [] { return sv("a", Type::Ag); };
    auto F = [] { return sv("F", Type::Fnc); };
    auto actF = [&] { return st_binary(StKind::Sbtri3, a(), F()); };
    add(SchemaBuilder("swap-out_L")
            .prem(st_binary(StKind::Sbtri1, actF(),
                            st_binary(StKind::Sbtri2, a(), X())),
                  Y())
            .concl(st_binary(StKind::Sbtri2, a(),
                             st_binary(StKind::Sbtri0, F(), X())),
                   Y()));
    add(SchemaBuilder("swap-out_R")
            .prem(X(), st_binary(StKind::Sbrarr1, actF(),
                                 st_binary(StKind::Sbrarr2, a(), Y())))
            .concl(X(), st_binary(StKind::Sbrarr2, a(),
                                  st_binary(StKind::Sbrarr0, F(), Y()))));
    add(SchemaBuilder("swap-in_L")
            .prem(st_binary(StKind::Sbtri2, a(),
                            st_binary(StKind::Sbtri0, F(), X())),
                  Y())
            .concl(st_binary(
                       StKind::Sbtri1, actF(),
                       st_binary(StKind::Sbtri2, a(),
                                 semi(st_binary(StKind::Stri0, F(), neutral()),
                                      X()))),
                   Y()));
    add(SchemaBuilder("swap-in_R")
            .prem(X(), st_binary(StKind::Sbrarr2, a(),
                                 st_binary(StKind::Sbrarr0, F(), Y())))
            .concl(X(),
                   st_binary(StKind::Sbrarr1, actF(),
                             st_binary(StKind::Sbrarr2, a(),
                                       gt(st_binary(StKind::Stri0, F(), neutral()),
                                          Y())))));
  }

  // ---- balance (sound for functional actions only; both occurrences of F
  // are parametric and congruent only to themselves)
  add(SchemaBuilder("balance")
          .split_congruence("F")
          .prem(X(), Y())
          .concl(st_binary(StKind::Stri0, sv("F", Type::Fnc), X()),
                 st_binary(StKind::Srarr0, sv("F", Type::Fnc), Y())));

  // ---- derived-rule macros, expanded by the checker
  {
    auto F = [] { return sv("F", Type::Fnc); };
    auto pre = [&] { return st_binary(StKind::Stri0, F(), neutral()); };
    add(SchemaBuilder("reduce_L").macro().prem(
        semi(pre(), st_binary(StKind::Stri0, F(), X())), Y()).concl(
        st_binary(StKind::Stri0, F(), X()), Y()));
    add(SchemaBuilder("reduce_R").macro().prem(
        Y(), gt(pre(), st_binary(StKind::Srarr0, F(), X()))).concl(
        Y(), st_binary(StKind::Srarr0, F(), X())));
    add(SchemaBuilder("comp_L").macro().prem(
        st_binary(StKind::Stri0, F(), st_binary(StKind::Sbtri0, F(), X())), Y())
            .concl(semi(pre(), X()), Y()));
    add(SchemaBuilder("comp_R").macro().prem(
        X(), st_binary(StKind::Srarr0, F(), st_binary(StKind::Sbrarr0, F(), Y())))
            .concl(X(), gt(pre(), Y())));
  }

  return out;
}

} // namespace

const std::vector<RuleSchema>& catalog(Base base) {
  static const std::vector<RuleSchema> intu = make_catalog(Base::Intuitionistic);
  static const std::vector<RuleSchema> cls = make_catalog(Base::Classical);
  return base == Base::Classical ? cls : intu;
}

const RuleSchema* find_schema(const std::string& name, Base base) {
  for (auto& s : catalog(base))
    if (s.name == name) return &s;
  return nullptr;
}

// ---------------------------------------------------------------------------
// Atom axiom

std::optional<AtomShape> match_atom_axiom(const Sequent& s) {
  AtomShape shape;
  StRef l = s.lhs;
  while (l && (l->kind == StKind::Stri0 || l->kind == StKind::Sbtri0)) {
    shape.phi.push_back({l->kind, l->lhs});
    l = l->rhs;
  }
  if (!l || l->kind != StKind::Leaf || l->term->kind != OpKind::Atom ||
      l->term->atom_type != Type::Fm)
    return std::nullopt;
  shape.atom = l->term;
  StRef r = s.rhs;
  while (r && (r->kind == StKind::Srarr0 || r->kind == StKind::Sbrarr0)) {
    shape.psi.push_back({r->kind, r->lhs});
    r = r->rhs;
  }
  if (!r || r->kind != StKind::Leaf || !equal(r->term, shape.atom))
    return std::nullopt;
  for (auto& [k, f] : shape.phi) {
    (void)k;
    try {
      if (infer_type(f) != Type::Fnc) return std::nullopt;
    } catch (const TypeError&) {
      return std::nullopt;
    }
  }
  for (auto& [k, g] : shape.psi) {
    (void)k;
    try {
      if (infer_type(g) != Type::Fnc) return std::nullopt;
    } catch (const TypeError&) {
      return std::nullopt;
    }
  }
  return shape;
}

// ---------------------------------------------------------------------------
// Matching

namespace {

bool match_op(const OpRef& pattern, const OpRef& value, Substitution& sub,
              std::string* err) {
  if (!pattern || !value) return false;
  if (pattern->kind == OpKind::Var) {
    try {
      if (infer_type(value) != pattern->atom_type) {
        if (err) *err = "metavariable " + pattern->name + " bound at wrong type";
        return false;
      }
    } catch (const TypeError& e) {
      if (err) *err = e.what();
      return false;
    }
    if (pattern->atom_only && value->kind != OpKind::Atom) {
      if (err)
        *err = "metavariable " + pattern->name + " ranges over atoms only";
      return false;
    }
    auto it = sub.op.find(pattern->name);
    if (it != sub.op.end()) {
      if (!equal(it->second, value)) {
        if (err) *err = "conflicting bindings for " + pattern->name;
        return false;
      }
      return true;
    }
    sub.op[pattern->name] = value;
    return true;
  }
  if (pattern->kind != value->kind) {
    if (err) *err = "operational mismatch at " + render(value);
    return false;
  }
  switch (pattern->kind) {
  case OpKind::Atom:
    return pattern->name == value->name && pattern->atom_type == value->atom_type;
  case OpKind::Top:
  case OpKind::Bot:
    return true;
  default:
    return match_op(pattern->lhs, value->lhs, sub, err) &&
           match_op(pattern->rhs, value->rhs, sub, err);
  }
}

} // namespace

bool match_structure(const StRef& pattern, const StRef& value, Substitution& sub,
                     std::string* err) {
  if (!pattern || !value) return false;
  if (pattern->kind == StKind::Var) {
    try {
      if (infer_type(value) != pattern->var_type) {
        if (err) *err = "metavariable " + pattern->name + " bound at wrong type";
        return false;
      }
    } catch (const TypeError& e) {
      if (err) *err = e.what();
      return false;
    }
    auto it = sub.st.find(pattern->name);
    if (it != sub.st.end()) {
      if (!equal(it->second, value)) {
        if (err) *err = "conflicting bindings for " + pattern->name;
        return false;
      }
      return true;
    }
    sub.st[pattern->name] = value;
    return true;
  }
  if (pattern->kind == StKind::Leaf) {
    if (value->kind != StKind::Leaf) {
      if (err) *err = "operational position holds structure " + render(value);
      return false;
    }
    return match_op(pattern->term, value->term, sub, err);
  }
  if (pattern->kind != value->kind) {
    if (err) *err = "structural mismatch at " + render(value);
    return false;
  }
  if (is_st_binary(pattern->kind))
    return match_structure(pattern->lhs, value->lhs, sub, err) &&
           match_structure(pattern->rhs, value->rhs, sub, err);
  return true; // Neutral
}

static bool match_seq(const SchemaSeq& pattern, const Sequent& value,
                      Substitution& sub, std::string* err) {
  return match_structure(pattern.lhs, value.lhs, sub, err) &&
         match_structure(pattern.rhs, value.rhs, sub, err);
}

std::optional<RuleInstance> match_instance(const RuleSchema& schema,
                                           const std::vector<Sequent>& premises,
                                           const Sequent& conclusion,
                                           MatchError* err) {
  auto fail = [&](const std::string& r) -> std::optional<RuleInstance> {
    if (err) err->reason = r;
    return std::nullopt;
  };
  if (schema.atom_axiom) {
    if (!premises.empty()) return fail("atom axiom takes no premises");
    if (!match_atom_axiom(conclusion))
      return fail("not an instance of the atom axiom");
    RuleInstance inst;
    inst.schema = schema.name;
    inst.conclusion = conclusion;
    return inst;
  }
  if (premises.size() != schema.premises.size())
    return fail("expected " + std::to_string(schema.premises.size()) +
                " premises, got " + std::to_string(premises.size()));
  {
    Substitution sub;
    std::string why;
    bool ok = match_seq(schema.conclusion, conclusion, sub, &why);
    for (size_t i = 0; ok && i < premises.size(); i++)
      ok = match_seq(schema.premises[i], premises[i], sub, &why);
    if (ok) {
      RuleInstance inst;
      inst.schema = schema.name;
      inst.premises = premises;
      inst.conclusion = conclusion;
      inst.sub = std::move(sub);
      return inst;
    }
    if (!schema.invertible) return fail(why.empty() ? "no match" : why);
  }
  // invertible rules may be applied upward
  Substitution sub;
  std::string why;
  bool ok = premises.size() == 1 && match_seq(schema.conclusion, premises[0], sub, &why) &&
            match_seq(schema.premises[0], conclusion, sub, &why);
  if (!ok) return fail(why.empty() ? "no match in either direction" : why);
  RuleInstance inst;
  inst.schema = schema.name;
  inst.premises = premises;
  inst.conclusion = conclusion;
  inst.sub = std::move(sub);
  inst.reversed = true;
  return inst;
}

// ---------------------------------------------------------------------------
// Instantiation

namespace {

OpRef apply_op(const OpRef& pattern, const Substitution& sub) {
  if (pattern->kind == OpKind::Var) {
    auto it = sub.op.find(pattern->name);
    if (it == sub.op.end())
      throw TypeError("substitution not total: " + pattern->name, "");
    return it->second;
  }
  if (is_op_binary(pattern->kind))
    return op_binary(pattern->kind, apply_op(pattern->lhs, sub),
                     apply_op(pattern->rhs, sub));
  return pattern;
}

} // namespace

StRef apply_substitution(const StRef& pattern, const Substitution& sub) {
  switch (pattern->kind) {
  case StKind::Var: {
    auto it = sub.st.find(pattern->name);
    if (it == sub.st.end())
      throw TypeError("substitution not total: " + pattern->name, "");
    return it->second;
  }
  case StKind::Leaf:
    return st_leaf(apply_op(pattern->term, sub));
  case StKind::Neutral:
    return pattern;
  default:
    return st_binary(pattern->kind, apply_substitution(pattern->lhs, sub),
                     apply_substitution(pattern->rhs, sub));
  }
}

Sequent apply_substitution(const SchemaSeq& pattern, const Substitution& sub) {
  return {apply_substitution(pattern.lhs, sub),
          apply_substitution(pattern.rhs, sub)};
}

RuleInstance apply_schema(const RuleSchema& schema, const Substitution& sub) {
  if (schema.atom_axiom)
    throw TypeError("atom axiom instances are built directly, not by schema", "");
  // type-check the bindings against the declared sorts
  for (auto& v : schema.vars) {
    if (v.operational) {
      auto it = sub.op.find(v.name);
      if (it == sub.op.end()) throw TypeError("missing binding: " + v.name, "");
      if (infer_type(it->second) != v.type)
        throw TypeError("binding for " + v.name + " has wrong type", "");
      if (v.atom_only && it->second->kind != OpKind::Atom)
        throw TypeError("binding for " + v.name + " must be an atom", "");
    } else {
      auto it = sub.st.find(v.name);
      if (it == sub.st.end()) throw TypeError("missing binding: " + v.name, "");
      if (infer_type(it->second) != v.type)
        throw TypeError("binding for " + v.name + " has wrong type", "");
    }
  }
  RuleInstance inst;
  inst.schema = schema.name;
  inst.sub = sub;
  for (auto& p : schema.premises) inst.premises.push_back(apply_substitution(p, sub));
  inst.conclusion = apply_substitution(schema.conclusion, sub);
  return inst;
}

} // namespace dyncalc
