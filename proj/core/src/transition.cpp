#include "hptr/transition.hpp"

#include <algorithm>
#include <cstdlib>

#include "hptr/error.hpp"

namespace hptr {

std::string_view to_string(SystemKind kind) {
  switch (kind) {
    case SystemKind::kL2R: return "l2r";
    case SystemKind::kR2L: return "r2l";
    case SystemKind::kOI: return "oi";
  }
  return "?";
}

SystemKind parse_system_kind(std::string_view s) {
  if (s == "l2r" || s == "L2R") return SystemKind::kL2R;
  if (s == "r2l" || s == "R2L") return SystemKind::kR2L;
  if (s == "oi" || s == "OI" || s == "outside-in") return SystemKind::kOI;
  throw UsageError("unknown transition system '" + std::string(s) + "' (expected l2r, r2l or oi)");
}

std::vector<int> focus_order(SystemKind kind, int n) {
  if (n < 1) throw UsageError("focus order needs n >= 1");
  std::vector<int> order;
  order.reserve(n);
  switch (kind) {
    case SystemKind::kL2R:
      for (int i = 1; i <= n; ++i) order.push_back(i);
      break;
    case SystemKind::kR2L:
      for (int i = n; i >= 1; --i) order.push_back(i);
      break;
    case SystemKind::kOI: {
      int lo = 1, hi = n;
      bool left = true;
      while (lo <= hi) order.push_back(left ? lo++ : hi--), left = !left;
      break;
    }
  }
  return order;
}

std::vector<int> oracle_sequence(SystemKind kind, std::span<const int> gold_heads) {
  if (auto v = validate_tree(gold_heads); !v.ok()) throw DataError("invalid gold tree: " + v.message());
  std::vector<int> seq;
  for (int w : focus_order(kind, static_cast<int>(gold_heads.size()))) seq.push_back(gold_heads[w - 1]);
  return seq;
}

ParserState::ParserState(SystemKind kind, int n)
    : kind_(kind),
      n_(n),
      order_(focus_order(kind, n)),
      heads_(n, kUnattached),
      attach_step_(n, -1),
      tracker_(n + 1) {}

int ParserState::focus() const {
  if (done()) throw UsageError("parse finished: no focus word");
  return order_[step_];
}

DependentRecord ParserState::dependent_snapshot() const {
  DependentRecord r = tracker_[focus()];
  if (kind_ == SystemKind::kL2R) r.rm.reset(), r.ra.reset();
  if (kind_ == SystemKind::kR2L) r.lm.reset(), r.la.reset();
  return r;
}

bool ParserState::creates_cycle(int parent) const {
  const int f = order_[step_];
  for (int v = parent; v != 0 && v != kUnattached; v = heads_[v - 1])
    if (v == f) return true;
  return false;
}

bool ParserState::crosses_built_arc(int parent) const {
  const int f = order_[step_];
  for (int d = 1; d <= n_; ++d) {
    const int h = heads_[d - 1];
    if (h != kUnattached && arcs_cross(parent, f, h, d)) return true;
  }
  return false;
}

bool ParserState::is_legal(int parent, const LegalityOptions& opts) const {
  if (done()) return false;
  const int f = order_[step_];
  if (parent < 0 || parent > n_ || parent == f) return false;
  if (creates_cycle(parent)) return false;
  if (opts.single_root && parent == 0 && root_children_ > 0) return false;
  if (opts.projective_only) {
    if (crosses_built_arc(parent)) return false;
    if (!projective_feasible_parents(heads_, f, opts.single_root)[static_cast<std::size_t>(parent)]) return false;
  }
  return true;
}

std::vector<int> ParserState::legal_parents(const LegalityOptions& opts) const {
  if (done()) throw UsageError("parse finished: no legal parents");
  const int f = order_[step_];
  std::vector<char> feasible;
  if (opts.projective_only) feasible = projective_feasible_parents(heads_, f, opts.single_root);
  std::vector<int> out;
  for (int p = 0; p <= n_; ++p) {
    if (p == f || creates_cycle(p)) continue;
    if (opts.single_root && p == 0 && root_children_ > 0) continue;
    if (opts.projective_only && !feasible[static_cast<std::size_t>(p)]) continue;
    out.push_back(p);
  }
  return out;
}

std::string ParserState::illegal_reason(int parent, const LegalityOptions& opts) const {
  const int f = order_[step_];
  if (parent < 0 || parent > n_) return "parent " + std::to_string(parent) + " out of range";
  if (parent == f) return "self attachment of word " + std::to_string(f);
  if (creates_cycle(parent)) return "arc " + std::to_string(parent) + "->" + std::to_string(f) + " creates a cycle";
  if (opts.single_root && parent == 0 && root_children_ > 0) return "root already has a child";
  if (opts.projective_only && crosses_built_arc(parent))
    return "arc " + std::to_string(parent) + "->" + std::to_string(f) + " crosses a built arc";
  return "arc " + std::to_string(parent) + "->" + std::to_string(f) +
         " cannot be completed to a projective tree";
}

void ParserState::apply_attach(int parent, const LegalityOptions& opts) {
  if (done()) throw UsageError("parse finished: cannot attach");
  if (!is_legal(parent, opts)) throw UsageError("illegal attachment: " + illegal_reason(parent, opts));
  const int f = order_[step_];
  heads_[f - 1] = parent;
  attach_step_[f - 1] = step_;
  if (parent == 0) ++root_children_;
  const AttachedDependent dep{f, step_};
  auto& rec = tracker_[parent];
  if (f < parent) {
    rec.la = dep;
    if (!rec.lm || f < rec.lm->position) rec.lm = dep;
  } else {
    rec.ra = dep;
    if (!rec.rm || f > rec.rm->position) rec.rm = dep;
  }
  ++step_;
}

namespace {

// Boolean Eisner chart over arcs consistent with the fixed heads. Items are
// complete/incomplete spans [s, t]; dir 0 = head at t, dir 1 = head at s.
struct ProjectiveChart {
  int n, size;
  std::span<const int> heads;
  std::vector<char> comp, inc;

  ProjectiveChart(std::span<const int> h) : n(static_cast<int>(h.size())), size(n + 1), heads(h) {
    comp.assign(2 * static_cast<std::size_t>(size) * size, 0);
    inc = comp;
    for (int s = 0; s < size; ++s) comp[at(s, s, 0)] = comp[at(s, s, 1)] = 1;
    for (int len = 1; len < size; ++len) {
      for (int s = 0; s + len < size; ++s) {
        const int t = s + len;
        bool split = false;
        for (int r = s; r < t && !split; ++r) split = comp[at(s, r, 1)] && comp[at(r + 1, t, 0)];
        inc[at(s, t, 0)] = split && allowed(t, s);
        inc[at(s, t, 1)] = split && allowed(s, t);
        bool left = false;
        for (int r = s; r < t && !left; ++r) left = comp[at(s, r, 0)] && inc[at(r, t, 0)];
        comp[at(s, t, 0)] = left;
        bool right = false;
        for (int r = s + 1; r <= t && !right; ++r) right = inc[at(s, r, 1)] && comp[at(r, t, 1)];
        comp[at(s, t, 1)] = right;
      }
    }
  }

  std::size_t at(int s, int t, int dir) const { return (static_cast<std::size_t>(s) * size + t) * 2 + dir; }

  bool allowed(int h, int d) const {
    if (d == 0 || h == d) return false;
    const int fixed = heads[d - 1];
    return fixed == ParserState::kUnattached || fixed == h;
  }

  // Single root: the root's only arc 0 -> r splits the words into [1, r] and [r, n].
  bool single_root_via(int r) const { return allowed(0, r) && comp[at(1, r, 0)] && comp[at(r, n, 1)]; }

  bool goal(bool single_root) const {
    if (!single_root) return comp[at(0, n, 1)];
    for (int r = 1; r <= n; ++r)
      if (single_root_via(r)) return true;
    return false;
  }
};

}  // namespace

bool projective_completion_exists(std::span<const int> heads, bool single_root) {
  if (heads.empty()) return true;
  return ProjectiveChart(heads).goal(single_root);
}

std::vector<char> projective_feasible_parents(std::span<const int> heads, int dep, bool single_root) {
  const int n = static_cast<int>(heads.size());
  if (dep < 1 || dep > n || heads[dep - 1] != ParserState::kUnattached)
    throw UsageError("feasible parents asked for an attached or out-of-range word");
  const ProjectiveChart ch(heads);
  const auto& comp = ch.comp;
  const auto& inc = ch.inc;
  auto at = [&](int s, int t, int dir) { return ch.at(s, t, dir); };

  // Outside pass: an item is marked when it is derivable and some derivation
  // of the goal uses it.
  std::vector<char> oc(comp.size(), 0), oi(inc.size(), 0);
  if (!single_root) {
    oc[at(0, n, 1)] = comp[at(0, n, 1)];
  } else {
    for (int r = 1; r <= n; ++r)
      if (ch.single_root_via(r)) oc[at(1, r, 0)] = oc[at(r, n, 1)] = 1;
  }
  for (int len = n; len >= 1; --len) {
    for (int s = 0; s + len <= n; ++s) {
      const int t = s + len;
      if (oc[at(s, t, 0)])
        for (int r = s; r < t; ++r)
          if (comp[at(s, r, 0)] && inc[at(r, t, 0)]) oc[at(s, r, 0)] = oi[at(r, t, 0)] = 1;
      if (oc[at(s, t, 1)])
        for (int r = s + 1; r <= t; ++r)
          if (inc[at(s, r, 1)] && comp[at(r, t, 1)]) oi[at(s, r, 1)] = oc[at(r, t, 1)] = 1;
      for (int dir = 0; dir < 2; ++dir) {
        if (!oi[at(s, t, dir)]) continue;
        for (int r = s; r < t; ++r)
          if (comp[at(s, r, 1)] && comp[at(r + 1, t, 0)]) oc[at(s, r, 1)] = oc[at(r + 1, t, 0)] = 1;
      }
    }
  }

  // Each arc p -> dep of a projective tree is exactly one incomplete item.
  std::vector<char> out(static_cast<std::size_t>(n) + 1, 0);
  for (int p = 0; p <= n; ++p) {
    if (p == dep) continue;
    if (p == 0 && single_root) {
      out[0] = ch.single_root_via(dep);
      continue;
    }
    const int s = std::min(p, dep), t = std::max(p, dep), dir = p < dep ? 1 : 0;
    out[static_cast<std::size_t>(p)] = inc[at(s, t, dir)] && oi[at(s, t, dir)];
  }
  return out;
}

AvailabilityStats availability_stats(SystemKind kind, std::span<const Sentence> tb, bool count_both_sides) {
  if (tb.empty()) throw DataError("availability statistics of an empty treebank");
  double all = 0.0, lng = 0.0;
  for (const auto& s : tb) {
    const auto tree = tree_of(s);
    if (auto v = validate_tree(tree.heads); !v.ok())
      throw DataError("invalid tree" + (s.id ? " in " + *s.id : std::string()) + ": " + v.message());
    const int n = static_cast<int>(s.size());
    const auto order = focus_order(kind, n);
    std::vector<int> step_of(n + 1, 0);
    for (int t = 0; t < n; ++t) step_of[order[t]] = t;
    for (int d = 1; d <= n; ++d) {
      const int h = tree.heads[d - 1];
      if (h == 0 || step_of[d] >= step_of[h]) continue;
      const bool left = d < h;
      bool exposed = count_both_sides || kind == SystemKind::kOI ||
                     (kind == SystemKind::kL2R && left) || (kind == SystemKind::kR2L && !left);
      if (!exposed) continue;
      all += 1.0;
      if (std::abs(h - d) > kLongArcThreshold) lng += 1.0;
    }
  }
  const double count = static_cast<double>(tb.size());
  return {all / count, lng / count};
}

}  // namespace hptr
