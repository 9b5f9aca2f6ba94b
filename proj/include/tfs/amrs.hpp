// Multi-rooted structures: an ordered sequence of feature structures that
// may share nodes.  The node vector is canonical with respect to the root
// sequence (roots processed in order, breadth-first within each, arcs in
// feature order), so equality is again plain operator==.
//
// Two distinct root slots may name the same node: unification is free to
// fuse roots, and keeping the slots distinct preserves the sequence length.

#pragma once

#include <algorithm>
#include <optional>
#include <string>
#include <vector>

#include "tfs/fs.hpp"
#include "tfs/graph.hpp"
#include "tfs/types.hpp"

namespace tfs {

struct Amrs {
  std::vector<Node> nodes;
  std::vector<NodeId> roots; // 0-based node ids; slots may alias one node
  std::size_t len() const { return roots.size(); }
  friend bool operator==(const Amrs&, const Amrs&) = default;
};

inline Amrs from_fs(const Fs& fs) { return Amrs{fs.nodes, {0}}; }

// Renumbers arbitrary nodes + roots into canonical form, keeping every
// given node (connectedness check as for feature structures).
inline std::variant<Amrs, Disconnected> canonicalize_amrs(
    const TypeHierarchy& hier, const std::vector<Node>& nodes,
    const std::vector<NodeId>& roots) {
  detail::Scratch s(hier);
  NodeId base = s.import(nodes);
  std::vector<NodeId> rs(roots);
  for (NodeId& r : rs) r += base;
  auto [out, oroots] = s.extract(rs);
  if (out.size() != nodes.size()) return Disconnected{nodes.size() - out.size()};
  return Amrs{std::move(out), std::move(oroots)};
}

// i is 1-based, following the convention that AMRS elements are numbered
// from 1.  The projection re-canonicalizes because dropping the other
// elements can drop nodes.
inline Fs project(const TypeHierarchy& hier, const Amrs& a, std::size_t i) {
  detail::Scratch s(hier);
  NodeId base = s.import(a.nodes);
  NodeId r[1] = {base + a.roots[i - 1]};
  auto [out, oroots] = s.extract(r);
  return Fs{std::move(out)};
}

// Contiguous sub-sequence j..k (1-based, inclusive); sharing among the kept
// elements survives, sharing with dropped elements just loses those paths.
inline Amrs sub_structure(const TypeHierarchy& hier, const Amrs& a,
                          std::size_t j, std::size_t k) {
  detail::Scratch s(hier);
  NodeId base = s.import(a.nodes);
  std::vector<NodeId> rs;
  for (std::size_t t = j; t <= k; ++t) rs.push_back(base + a.roots[t - 1]);
  auto [out, oroots] = s.extract(rs);
  return Amrs{std::move(out), std::move(oroots)};
}

// The operands stay disjoint, so the canonical form of the result is the
// two canonical node vectors laid side by side.
inline Amrs concatenate(const Amrs& a, const Amrs& b) {
  Amrs out;
  out.nodes = a.nodes;
  out.roots = a.roots;
  NodeId base = static_cast<NodeId>(a.nodes.size());
  for (Node n : b.nodes) {
    for (Arc& arc : n.arcs) arc.target += base;
    out.nodes.push_back(std::move(n));
  }
  for (NodeId r : b.roots) out.roots.push_back(r + base);
  return out;
}

struct AmrsUnifyResult {
  std::optional<Amrs> value;
  // On failure: 1-based element index and feature path of the least
  // witness, ordered by element first, then path lexicographically.
  std::size_t failure_element = 0;
  std::vector<FeatId> failure_path;
  explicit operator bool() const { return value.has_value(); }
};

// Unifies element j (1-based) with b in the context of the whole structure:
// the closure runs over all of a, so information reaches the other elements
// through shared nodes.  Length is preserved.
inline AmrsUnifyResult unify_in_context(const TypeHierarchy& hier,
                                        const Amrs& a, std::size_t j,
                                        const Fs& b) {
  detail::Scratch s(hier);
  NodeId base = s.import(a.nodes);
  NodeId bbase = s.import(b.nodes);
  s.merge(base + a.roots[j - 1], bbase);
  std::vector<NodeId> rs;
  rs.reserve(a.roots.size());
  for (NodeId r : a.roots) rs.push_back(base + r);
  if (s.failed()) {
    auto w = s.witness(rs);
    AmrsUnifyResult res;
    if (w) {
      res.failure_element = w->first;
      res.failure_path = std::move(w->second);
    }
    return res;
  }
  auto [out, oroots] = s.extract(rs);
  return {Amrs{std::move(out), std::move(oroots)}, 0, {}};
}

// a subsumes b: same length and a single morphism sending root slot t of a
// to root slot t of b, type-respecting and arc-commuting.  Sharing in a
// must be matched in b; the converse need not hold.
inline bool amrs_subsumes(const TypeHierarchy& hier, const Amrs& a,
                          const Amrs& b) {
  if (a.len() != b.len()) return false;
  constexpr NodeId kUnset = static_cast<NodeId>(-1);
  std::vector<NodeId> h(a.nodes.size(), kUnset);
  std::vector<NodeId> stack;
  for (std::size_t t = 0; t < a.roots.size(); ++t) {
    NodeId qa = a.roots[t], qb = b.roots[t];
    if (h[qa] == kUnset) {
      h[qa] = qb;
      stack.push_back(qa);
    } else if (h[qa] != qb) {
      return false; // a aliases two slots that b keeps apart
    }
  }
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
        return false;
      }
    }
  }
  return true;
}

inline bool amrs_well_typed(const TypeHierarchy& hier, const Amrs& a) {
  return typing_issues(hier, a.nodes).empty();
}

// Finite-range abstraction of an AMRS: every path of length <= depth from
// every root with its type, plus which truncated paths meet at one node.
// Serialized to a string so signatures can be compared and hashed; two
// structures with equal signatures are indistinguishable down to `depth`.
inline std::string path_quotient(const Amrs& a, std::size_t depth) {
  std::vector<std::pair<std::vector<FeatId>, TypeId>> paths;
  std::vector<std::vector<std::pair<std::size_t, std::size_t>>> at(
      a.nodes.size()); // node -> list of (element, path index)
  std::string sig;
  for (std::size_t t = 0; t < a.roots.size(); ++t) {
    paths.clear();
    // Depth-first in feature order enumerates paths lexicographically.
    std::vector<FeatId> path;
    struct Frame { NodeId node; std::size_t arc; };
    std::vector<Frame> frames{{a.roots[t], 0}};
    at[a.roots[t]].push_back({t, paths.size()});
    paths.push_back({path, a.nodes[a.roots[t]].type});
    while (!frames.empty()) {
      Frame& fr = frames.back();
      const Node& n = a.nodes[fr.node];
      if (path.size() == depth || fr.arc == n.arcs.size()) {
        frames.pop_back();
        if (!path.empty()) path.pop_back();
        continue;
      }
      const Arc& arc = n.arcs[fr.arc++];
      path.push_back(arc.feat);
      at[arc.target].push_back({t, paths.size()});
      paths.push_back({path, a.nodes[arc.target].type});
      frames.push_back({arc.target, 0});
    }
    for (const auto& [p, ty] : paths) {
      sig += 'e';
      sig += std::to_string(t + 1);
      sig += ':';
      for (std::size_t i = 0; i < p.size(); ++i) {
        if (i) sig += '.';
        sig += std::to_string(p[i]);
      }
      sig += '=';
      sig += std::to_string(ty);
      sig += '\n';
    }
  }
  // Reentrancy part: pairs of (element, path ordinal) landing on one node.
  // Path ordinals restart per element, so pair entries carry both.
  std::vector<std::string> pairs;
  for (const auto& group : at) {
    for (std::size_t i = 0; i < group.size(); ++i)
      for (std::size_t j = i + 1; j < group.size(); ++j)
        pairs.push_back(std::to_string(group[i].first) + "." +
                        std::to_string(group[i].second) + "~" +
                        std::to_string(group[j].first) + "." +
                        std::to_string(group[j].second));
  }
  std::sort(pairs.begin(), pairs.end());
  for (const auto& p : pairs) {
    sig += p;
    sig += '\n';
  }
  return sig;
}

} // namespace tfs
