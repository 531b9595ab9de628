#include "dyncalc/checker.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <sstream>

namespace dyncalc {

ProofRef node(std::string rule, Sequent conclusion, std::vector<ProofRef> children,
              std::optional<Substitution> annotation) {
  auto n = std::make_shared<ProofTree>();
  n->rule = std::move(rule);
  n->conclusion = std::move(conclusion);
  n->children = std::move(children);
  n->annotation = std::move(annotation);
  return n;
}

int tree_size(const ProofRef& t) {
  int n = 1;
  for (auto& c : t->children) n += tree_size(c);
  return n;
}

int tree_height(const ProofRef& t) {
  int h = 0;
  for (auto& c : t->children) h = std::max(h, tree_height(c));
  return h + 1;
}

ProofRef subtree_at(const ProofRef& t, const std::vector<int>& path) {
  ProofRef cur = t;
  for (int c : path) {
    if (!cur || c < 0 || c >= (int)cur->children.size()) return nullptr;
    cur = cur->children[c];
  }
  return cur;
}

ProofRef replace_subtree(const ProofRef& t, const std::vector<int>& path,
                         const ProofRef& repl) {
  std::function<ProofRef(const ProofRef&, size_t)> go =
      [&](const ProofRef& cur, size_t i) -> ProofRef {
    if (i == path.size()) return repl;
    if (path[i] < 0 || path[i] >= (int)cur->children.size())
      throw std::runtime_error("replace_subtree: bad path");
    auto children = cur->children;
    children[path[i]] = go(children[path[i]], i + 1);
    return node(cur->rule, cur->conclusion, std::move(children), cur->annotation);
  };
  return go(t, 0);
}

bool check_type_uniformity(const Sequent& s) { return type_uniform(s); }

// ---------------------------------------------------------------------------
// Validation

namespace {

void check_node(const ProofRef& t, const CheckOptions& opts, std::vector<int>& path,
                CheckReport& rep) {
  rep.stats.nodes++;
  auto fail = [&](const std::string& reason) {
    rep.failures.push_back({path, t->rule, reason});
  };
  const RuleSchema* schema = find_schema(t->rule, opts.base);
  if (!schema) {
    fail("unknown rule");
  } else {
    if (schema->macro && !opts.allow_macros) {
      fail("macro rule is not a kernel primitive");
    } else if (schema->cut && !opts.allow_cut) {
      fail("cut forbidden");
    } else {
      std::vector<Sequent> premises;
      premises.reserve(t->children.size());
      for (auto& c : t->children) premises.push_back(c->conclusion);
      MatchError err;
      auto inst = match_instance(*schema, premises, t->conclusion, &err);
      if (!inst) fail(err.reason);
    }
    if (schema->cut) {
      rep.stats.cuts++;
      // rank of this cut: (complexity of the cut term, premise height sum)
      if (t->children.size() == 2) {
        const StRef& ct = t->children[0]->conclusion.rhs;
        int complexity = ct->kind == StKind::Leaf ? op_size(ct->term) : 0;
        int height =
            tree_height(t->children[0]) + tree_height(t->children[1]);
        if (complexity > rep.stats.max_cut_complexity ||
            (complexity == rep.stats.max_cut_complexity &&
             height > rep.stats.max_cut_height)) {
          rep.stats.max_cut_complexity = complexity;
          rep.stats.max_cut_height = height;
        }
      }
    }
  }
  if (!type_uniform(t->conclusion)) fail("sequent is not type-uniform");
  for (size_t i = 0; i < t->children.size(); i++) {
    path.push_back((int)i);
    check_node(t->children[i], opts, path, rep);
    path.pop_back();
  }
}

} // namespace

CheckReport check_proof(const ProofRef& t, const CheckOptions& opts) {
  CheckReport rep;
  if (!t) {
    rep.failures.push_back({{}, "", "empty proof"});
    return rep;
  }
  std::vector<int> path;
  check_node(t, opts, path, rep);
  rep.ok = rep.failures.empty();
  return rep;
}

// ---------------------------------------------------------------------------
// Macro expansion

namespace {

StRef semi_(StRef a, StRef b) { return st_binary(StKind::Semi, a, b); }

StRef need(const Substitution& sub, const char* v) {
  auto it = sub.st.find(v);
  if (it == sub.st.end()) throw MacroMismatch(std::string("unbound ") + v);
  return it->second;
}

ProofRef expand_reduce_l(const Substitution& sub, ProofRef pi) {
  StRef F = need(sub, "F"), X = need(sub, "X"), Y = need(sub, "Y");
  auto FX = st_binary(StKind::Stri0, F, X);
  auto FbY = st_binary(StKind::Sbrarr0, F, Y);
  auto n1 = node("mon0_tri",
                 {st_binary(StKind::Stri0, F, semi_(st_neutral(), X)), Y}, {pi});
  auto n2 = node("(tri0,brarr0)", {semi_(st_neutral(), X), FbY}, {n1});
  auto n3 = node("(;,<)", {st_neutral(), st_binary(StKind::Lt, FbY, X)}, {n2});
  auto n4 = node("I1_L", {X, FbY}, {n3});
  return node("(tri0,brarr0)", {FX, Y}, {n4});
}

ProofRef expand_reduce_r(const Substitution& sub, ProofRef pi) {
  StRef F = need(sub, "F"), X = need(sub, "X"), Y = need(sub, "Y");
  auto FbtY = st_binary(StKind::Sbtri0, F, Y);
  auto n1 = node("FS0_rarr",
                 {Y, st_binary(StKind::Srarr0, F,
                               st_binary(StKind::Gt, st_neutral(), X))},
                 {pi});
  auto n2 = node("(btri0,rarr0)", {FbtY, st_binary(StKind::Gt, st_neutral(), X)},
                 {n1});
  auto n3 = node("(;,>)", {semi_(st_neutral(), FbtY), X}, {n2});
  auto n4 = node("(;,<)", {st_neutral(), st_binary(StKind::Lt, X, FbtY)}, {n3});
  auto n5 = node("I1_L", {FbtY, X}, {n4});
  return node("(btri0,rarr0)", {Y, st_binary(StKind::Srarr0, F, X)}, {n5});
}

ProofRef expand_comp_common(const StRef& F, const StRef& X, const StRef& Y,
                            ProofRef first) {
  // from F (sbtri0) X |- F (sbrarr0) Y down to (F stri0 I) ; X |- Y
  auto FbtX = st_binary(StKind::Sbtri0, F, X);
  auto FbY = st_binary(StKind::Sbrarr0, F, Y);
  auto FI = st_binary(StKind::Stri0, F, st_neutral());
  auto n2 = node("I2_L", {st_neutral(), st_binary(StKind::Gt, FbtX, FbY)}, {first});
  auto n3 = node("(;,>)", {semi_(FbtX, st_neutral()), FbY}, {n2});
  auto n4 = node("(tri0,brarr0)",
                 {st_binary(StKind::Stri0, F, semi_(FbtX, st_neutral())), Y}, {n3});
  auto n5 = node("conj0_tri", {semi_(X, FI), Y}, {n4});
  return node("E_L", {semi_(FI, X), Y}, {n5});
}

ProofRef expand_comp_l(const Substitution& sub, ProofRef pi) {
  StRef F = need(sub, "F"), X = need(sub, "X"), Y = need(sub, "Y");
  auto n1 = node("(tri0,brarr0)",
                 {st_binary(StKind::Sbtri0, F, X), st_binary(StKind::Sbrarr0, F, Y)},
                 {pi});
  return expand_comp_common(F, X, Y, n1);
}

ProofRef expand_comp_r(const Substitution& sub, ProofRef pi) {
  StRef F = need(sub, "F"), X = need(sub, "X"), Y = need(sub, "Y");
  auto n1 = node("(btri0,rarr0)",
                 {st_binary(StKind::Sbtri0, F, X), st_binary(StKind::Sbrarr0, F, Y)},
                 {pi});
  auto n6 = expand_comp_common(F, X, Y, n1);
  auto FI = st_binary(StKind::Stri0, F, st_neutral());
  return node("(;,>)", {X, st_binary(StKind::Gt, FI, Y)}, {n6});
}

} // namespace

ProofRef expand_macros(const ProofRef& t) {
  std::vector<ProofRef> children;
  children.reserve(t->children.size());
  for (auto& c : t->children) children.push_back(expand_macros(c));
  const RuleSchema* schema = find_schema(t->rule, Base::Classical);
  if (!schema || !schema->macro) {
    bool same = true;
    for (size_t i = 0; i < children.size(); i++)
      if (children[i] != t->children[i]) same = false;
    if (same) return t;
    return node(t->rule, t->conclusion, std::move(children), t->annotation);
  }
  if (children.size() != 1)
    throw MacroMismatch("macro " + t->rule + " takes exactly one premise");
  std::vector<Sequent> premises = {children[0]->conclusion};
  MatchError err;
  auto inst = match_instance(*schema, premises, t->conclusion, &err);
  if (!inst)
    throw MacroMismatch("macro " + t->rule + " does not fit: " + err.reason);
  if (t->rule == "reduce_L") return expand_reduce_l(inst->sub, children[0]);
  if (t->rule == "reduce_R") return expand_reduce_r(inst->sub, children[0]);
  if (t->rule == "comp_L") return expand_comp_l(inst->sub, children[0]);
  if (t->rule == "comp_R") return expand_comp_r(inst->sub, children[0]);
  throw MacroMismatch("no expansion template for " + t->rule);
}

// ---------------------------------------------------------------------------
// Proof scripts

namespace {

struct ScriptLexer {
  explicit ScriptLexer(const std::string& s) : s_(s) {}

  void skip_space() {
    while (i_ < s_.size()) {
      if (isspace((unsigned char)s_[i_])) {
        i_++;
      } else if (s_[i_] == '#') {
        while (i_ < s_.size() && s_[i_] != '\n') i_++;
      } else {
        break;
      }
    }
  }
  bool eof() {
    skip_space();
    return i_ >= s_.size();
  }
  char peek() {
    skip_space();
    return i_ < s_.size() ? s_[i_] : '\0';
  }
  void expect(char c) {
    skip_space();
    if (i_ >= s_.size() || s_[i_] != c)
      throw ParseError(std::string("expected '") + c + "' in proof script");
    i_++;
  }
  std::string word() {
    skip_space();
    size_t j = i_;
    while (j < s_.size() && !isspace((unsigned char)s_[j]) && s_[j] != '(' &&
           s_[j] != ')' && s_[j] != '"')
      j++;
    std::string w = s_.substr(i_, j - i_);
    i_ = j;
    return w;
  }
  // A rule name: either a bare word or a balanced "(...)" token.
  std::string rule_name() {
    skip_space();
    if (i_ < s_.size() && s_[i_] == '(') {
      size_t j = i_;
      int depth = 0;
      do {
        if (s_[j] == '(') depth++;
        if (s_[j] == ')') depth--;
        j++;
      } while (j < s_.size() && depth > 0);
      if (depth != 0) throw ParseError("unbalanced rule name");
      std::string w = s_.substr(i_, j - i_);
      i_ = j;
      return w;
    }
    std::string w = word();
    if (w.empty()) throw ParseError("missing rule name");
    return w;
  }
  std::string quoted() {
    skip_space();
    if (i_ >= s_.size() || s_[i_] != '"')
      throw ParseError("expected quoted sequent");
    size_t j = ++i_;
    while (j < s_.size() && s_[j] != '"') j++;
    if (j >= s_.size()) throw ParseError("unterminated string");
    std::string w = s_.substr(i_, j - i_);
    i_ = j + 1;
    return w;
  }

  const std::string& s_;
  size_t i_ = 0;
};

ProofRef parse_node(ScriptLexer& lex, const Decls& decls) {
  lex.expect('(');
  std::string head = lex.word();
  if (head != "rule" && head != "ax")
    throw ParseError("expected 'rule' or 'ax', found '" + head + "'");
  std::string name = lex.rule_name();
  lex.expect('(');
  std::string seqw = lex.word();
  if (seqw != "seq") throw ParseError("expected '(seq \"...\")'");
  Sequent concl = parse_sequent(lex.quoted(), decls);
  lex.expect(')');
  std::vector<ProofRef> children;
  while (lex.peek() == '(') children.push_back(parse_node(lex, decls));
  lex.expect(')');
  if (head == "ax" && !children.empty())
    throw ParseError("axiom node '" + name + "' has premises");
  return node(name, concl, std::move(children));
}

} // namespace

ProofScript parse_proof_script(const std::string& text) {
  ProofScript out;
  // header: declaration lines until the first '('
  std::istringstream in(text);
  std::string line;
  std::ostringstream rest;
  bool in_tree = false;
  while (std::getline(in, line)) {
    if (!in_tree) {
      std::string trimmed = line;
      size_t h = trimmed.find('#');
      if (h != std::string::npos) trimmed = trimmed.substr(0, h);
      size_t b = trimmed.find_first_not_of(" \t\r");
      if (b == std::string::npos) continue;
      if (trimmed[b] == '(') {
        in_tree = true;
      } else {
        if (!out.decls.parse_line(trimmed))
          throw ParseError("bad header line: " + line);
        continue;
      }
    }
    rest << line << "\n";
  }
  std::string tree_text = rest.str();
  ScriptLexer lex(tree_text);
  out.proof = parse_node(lex, out.decls);
  if (!lex.eof()) throw ParseError("trailing content after proof term");
  return out;
}

ProofScript load_proof_script(const std::string& filename) {
  std::ifstream f(filename);
  if (!f) throw ParseError("cannot open " + filename);
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_proof_script(ss.str());
}

namespace {

void write_node(std::ostream& os, const ProofRef& t, int indent) {
  std::string pad(indent, ' ');
  os << pad << "(" << (t->children.empty() ? "ax " : "rule ") << t->rule
     << " (seq \"" << render(t->conclusion) << "\")";
  if (t->children.empty()) {
    os << ")";
    return;
  }
  for (auto& c : t->children) {
    os << "\n";
    write_node(os, c, indent + 2);
  }
  os << ")";
}

} // namespace

std::string write_proof_script(const ProofRef& t, const Decls& decls) {
  std::ostringstream os;
  std::string props, agents, fncs;
  for (auto& [name, ty] : decls.table()) {
    std::string& dst = ty == Type::Fm ? props : ty == Type::Ag ? agents : fncs;
    dst += " " + name;
  }
  if (!props.empty()) os << "prop" << props << ".\n";
  if (!agents.empty()) os << "agent" << agents << ".\n";
  if (!fncs.empty()) os << "fnc" << fncs << ".\n";
  write_node(os, t, 0);
  os << "\n";
  return os.str();
}

} // namespace dyncalc
