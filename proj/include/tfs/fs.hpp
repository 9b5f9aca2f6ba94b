// Feature structures: rooted, connected, typed, feature-labeled graphs in
// canonical form (root first, breadth-first numbering, feature-sorted
// arcs).  Keeping every value canonical makes equality-up-to-renaming plain
// operator==, so structures work as set members and map keys directly.

#pragma once

#include <algorithm>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "tfs/graph.hpp"
#include "tfs/types.hpp"

namespace tfs {

struct Fs {
  std::vector<Node> nodes; // canonical; node 0 is the root
  friend bool operator==(const Fs&, const Fs&) = default;
};

// A single node of the least type is the natural "no information" value.
inline Fs bottom_fs() { return Fs{{Node{kBot, {}}}}; }

// ---- construction -------------------------------------------------------

struct Disconnected {
  std::size_t unreachable; // how many of the given nodes the root misses
};

// Renumbers an arbitrary node vector into canonical form.  Fails (rather
// than silently pruning) when some node is unreachable from the root:
// feature structures are connected by definition.
inline std::variant<Fs, Disconnected> canonicalize(
    const TypeHierarchy& hier, const std::vector<Node>& nodes, NodeId root) {
  detail::Scratch s(hier);
  NodeId base = s.import(nodes);
  NodeId r[1] = {base + root};
  auto [out, roots] = s.extract(r);
  if (out.size() != nodes.size())
    return Disconnected{nodes.size() - out.size()};
  return Fs{std::move(out)};
}

// ---- path access --------------------------------------------------------

inline std::optional<NodeId> resolve(const Fs& fs,
                                     std::span<const FeatId> path) {
  NodeId q = 0;
  for (FeatId f : path) {
    const auto& arcs = fs.nodes[q].arcs;
    auto it = std::lower_bound(
        arcs.begin(), arcs.end(), f,
        [](const Arc& a, FeatId ff) { return a.feat < ff; });
    if (it == arcs.end() || it->feat != f) return std::nullopt;
    q = it->target;
  }
  return q;
}

// ---- subsumption --------------------------------------------------------

// a subsumes b (a is at most as specific).  A feature structure's arcs are
// functional, so a morphism is fixed by where it sends the root; we just
// propagate that choice and look for a conflict.
inline bool subsumes(const TypeHierarchy& hier, const Fs& a, const Fs& b) {
  constexpr NodeId kUnset = static_cast<NodeId>(-1);
  std::vector<NodeId> h(a.nodes.size(), kUnset);
  std::vector<NodeId> stack;
  h[0] = 0;
  stack.push_back(0);
  while (!stack.empty()) {
    NodeId q = stack.back();
    stack.pop_back();
    const Node& na = a.nodes[q];
    const Node& nb = b.nodes[h[q]];
    if (!hier.leq(na.type, nb.type)) return false;
    for (const Arc& arc : na.arcs) {
      auto it = std::lower_bound(
          nb.arcs.begin(), nb.arcs.end(), arc.feat,
          [](const Arc& x, FeatId f) { return x.feat < f; });
      if (it == nb.arcs.end() || it->feat != arc.feat) return false;
      if (h[arc.target] == kUnset) {
        h[arc.target] = it->target;
        stack.push_back(arc.target);
      } else if (h[arc.target] != it->target) {
        return false; // a shares where b does not
      }
    }
  }
  return true;
}

// ---- unification --------------------------------------------------------

struct UnifyResult {
  std::optional<Fs> value;
  // On failure: lexicographically least feature path from the root to the
  // node pair whose types have no join.
  std::vector<FeatId> failure_path;
  explicit operator bool() const { return value.has_value(); }
};

inline UnifyResult unify(const TypeHierarchy& hier, const Fs& a, const Fs& b) {
  detail::Scratch s(hier);
  NodeId ra = s.import(a.nodes);
  NodeId rb = s.import(b.nodes);
  s.merge(ra, rb);
  NodeId roots[1] = {ra};
  if (s.failed()) {
    auto w = s.witness(roots);
    return {std::nullopt, w ? std::move(w->second) : std::vector<FeatId>{}};
  }
  auto [out, oroots] = s.extract(roots);
  return {Fs{std::move(out)}, {}};
}

// ---- typing -------------------------------------------------------------

struct TypingIssue {
  NodeId node;
  FeatId feat;
  std::string message;
};

// Well-typed: every arc is licensed by appropriateness and its value's type
// refines the declared value type.
inline std::vector<TypingIssue> typing_issues(const TypeHierarchy& hier,
                                              const std::vector<Node>& nodes) {
  std::vector<TypingIssue> out;
  for (NodeId q = 0; q < nodes.size(); ++q) {
    for (const Arc& a : nodes[q].arcs) {
      auto v = hier.approp(a.feat, nodes[q].type);
      if (!v) {
        out.push_back({q, a.feat,
                       "feature '" + hier.feature_name(a.feat) +
                           "' is not appropriate for type '" +
                           hier.type_name(nodes[q].type) + "'"});
      } else if (!hier.leq(*v, nodes[a.target].type)) {
        out.push_back({q, a.feat,
                       "value of '" + hier.feature_name(a.feat) + "' at '" +
                           hier.type_name(nodes[q].type) + "' has type '" +
                           hier.type_name(nodes[a.target].type) +
                           "', not a subtype of '" + hier.type_name(*v) +
                           "'"});
      }
    }
  }
  return out;
}

inline bool well_typed(const TypeHierarchy& hier, const Fs& fs) {
  return typing_issues(hier, fs.nodes).empty();
}

// Totally well-typed: well-typed and every appropriate feature is present.
inline bool totally_well_typed(const TypeHierarchy& hier, const Fs& fs) {
  if (!well_typed(hier, fs)) return false;
  for (const Node& n : fs.nodes) {
    for (auto [f, v] : hier.approp_features(n.type)) {
      bool present = false;
      for (const Arc& a : n.arcs)
        if (a.feat == f) { present = true; break; }
      if (!present) return false;
    }
  }
  return true;
}

// ---- path enumeration ---------------------------------------------------

struct PathSet {
  // (path, type at path), paths in lexicographic order, length <= depth.
  std::vector<std::pair<std::vector<FeatId>, TypeId>> typed_paths;
  // Index pairs (i, j), i < j, of paths landing on the same node.
  std::vector<std::pair<std::size_t, std::size_t>> reentrant;
};

namespace detail {
inline void enumerate_paths_walk(const std::vector<Node>& nodes, NodeId q,
                                 std::size_t depth_left,
                                 std::vector<FeatId>& path, PathSet& out,
                                 std::vector<std::vector<std::size_t>>& at) {
  at[q].push_back(out.typed_paths.size());
  out.typed_paths.push_back({path, nodes[q].type});
  if (depth_left == 0) return;
  for (const Arc& a : nodes[q].arcs) {
    path.push_back(a.feat);
    enumerate_paths_walk(nodes, a.target, depth_left - 1, path, out, at);
    path.pop_back();
  }
}
} // namespace detail

// All paths of length <= depth with their types, plus which of them meet at
// one node.  Intended for bounded checks and diagnostics; the number of
// paths can grow exponentially with depth on heavily reentrant structures.
inline PathSet enumerate_paths(const Fs& fs, std::size_t depth) {
  PathSet out;
  std::vector<std::vector<std::size_t>> at(fs.nodes.size());
  std::vector<FeatId> path;
  detail::enumerate_paths_walk(fs.nodes, 0, depth, path, out, at);
  for (const auto& group : at)
    for (std::size_t i = 0; i < group.size(); ++i)
      for (std::size_t j = i + 1; j < group.size(); ++j)
        out.reentrant.push_back({group[i], group[j]});
  std::sort(out.reentrant.begin(), out.reentrant.end());
  return out;
}

} // namespace tfs
