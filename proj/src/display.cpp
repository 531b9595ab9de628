#include "dyncalc/display.hpp"

#include <deque>
#include <functional>
#include <unordered_map>
#include <unordered_set>

namespace dyncalc {

namespace {

// Occurrence sites of each metavariable in one schematic sequent.
std::vector<std::pair<std::string, OccPath>> var_sites(const SchemaSeq& seq) {
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
  go(seq.lhs, 0, path);
  go(seq.rhs, 1, path);
  return out;
}

bool is_prefix(const OccPath& pre, const OccPath& full, std::vector<int>* residual) {
  if (pre.side != full.side || pre.path.size() > full.path.size()) return false;
  for (size_t i = 0; i < pre.path.size(); i++)
    if (pre.path[i] != full.path[i]) return false;
  if (residual)
    residual->assign(full.path.begin() + (long)pre.path.size(), full.path.end());
  return true;
}

struct Move {
  PostulateStep step;
  OccPath new_target; // where the tracked occurrence lands
};

// Applies one display postulate at the root of s in the given direction,
// tracking where `target` moves. Returns nothing if the pattern does not fit
// or the target sits on the rearranged skeleton itself.
std::optional<Move> try_postulate(const RuleSchema& schema, PostDirection dir,
                                  const Sequent& s, const OccPath& target) {
  const SchemaSeq& from = dir == PostDirection::Down ? schema.premises[0]
                                                     : schema.conclusion;
  const SchemaSeq& to = dir == PostDirection::Down ? schema.conclusion
                                                   : schema.premises[0];
  Substitution sub;
  if (!match_structure(from.lhs, s.lhs, sub)) return std::nullopt;
  if (!match_structure(from.rhs, s.rhs, sub)) return std::nullopt;
  Sequent result = apply_substitution(to, sub);
  // locate the target inside a metavariable image
  std::optional<OccPath> moved;
  for (auto& [v, site] : var_sites(from)) {
    std::vector<int> residual;
    if (is_prefix(site, target, &residual)) {
      for (auto& [v2, site2] : var_sites(to)) {
        if (v2 == v) {
          OccPath np = site2;
          np.path.insert(np.path.end(), residual.begin(), residual.end());
          moved = np;
          break;
        }
      }
      break;
    }
  }
  if (!moved) return std::nullopt;
  return Move{{schema.name, dir, result}, *moved};
}

const std::vector<const RuleSchema*>& display_postulates() {
  static const std::vector<const RuleSchema*> ps = [] {
    std::vector<const RuleSchema*> v;
    for (auto& s : catalog(Base::Intuitionistic))
      if (s.display_postulate) v.push_back(&s);
    return v;
  }();
  return ps;
}

} // namespace

std::vector<PostulateStep> applicable_postulates(const Sequent& s) {
  std::vector<PostulateStep> out;
  for (const RuleSchema* schema : display_postulates()) {
    for (PostDirection dir : {PostDirection::Down, PostDirection::Up}) {
      const SchemaSeq& from = dir == PostDirection::Down ? schema->premises[0]
                                                         : schema->conclusion;
      const SchemaSeq& to = dir == PostDirection::Down ? schema->conclusion
                                                       : schema->premises[0];
      Substitution sub;
      if (!match_structure(from.lhs, s.lhs, sub)) continue;
      if (!match_structure(from.rhs, s.rhs, sub)) continue;
      out.push_back({schema->name, dir, apply_substitution(to, sub)});
    }
  }
  return out;
}

DisplayResult display_search(const Sequent& s, const OccPath& target, int max_depth) {
  DisplayResult res;
  if (!subterm_at(s, target)) {
    res.error = "target path does not exist in the sequent";
    return res;
  }
  Side want = side_of(s, target);

  struct State {
    Sequent seq;
    OccPath target;
    std::vector<PostulateStep> steps;
    std::vector<OccPath> trail;
  };
  auto displayed = [](const State& st) { return st.target.path.empty(); };

  std::deque<State> queue;
  std::unordered_set<size_t> seen; // hash of (sequent, target)
  auto key = [](const State& st) {
    size_t h = hash_value(st.seq);
    h ^= std::hash<int>{}(st.target.side) + 0x9e3779b9 + (h << 6) + (h >> 2);
    for (int c : st.target.path) h ^= std::hash<int>{}(c) + 0x9e3779b9 + (h << 6) + (h >> 2);
    return h;
  };
  State init{s, target, {}};
  queue.push_back(init);
  seen.insert(key(init));
  while (!queue.empty()) {
    State cur = std::move(queue.front());
    queue.pop_front();
    if (displayed(cur)) {
      res.ok = true;
      res.steps = cur.steps;
      res.trail = cur.trail;
      res.final = cur.seq;
      res.side = cur.target.side == 0 ? Side::Precedent : Side::Succedent;
      // the display side always agrees with the position computed up front
      if (res.side != want) {
        res.ok = false;
        res.error = "displayed on the unexpected side";
      }
      return res;
    }
    if ((int)cur.steps.size() >= max_depth) continue;
    for (const RuleSchema* schema : display_postulates()) {
      for (PostDirection dir : {PostDirection::Down, PostDirection::Up}) {
        auto mv = try_postulate(*schema, dir, cur.seq, cur.target);
        if (!mv) continue;
        State next{mv->step.result, mv->new_target, cur.steps, cur.trail};
        next.steps.push_back(mv->step);
        next.trail.push_back(mv->new_target);
        if (seen.insert(key(next)).second) queue.push_back(std::move(next));
      }
    }
  }
  res.error = "search exhausted at depth " + std::to_string(max_depth);
  return res;
}

} // namespace dyncalc
