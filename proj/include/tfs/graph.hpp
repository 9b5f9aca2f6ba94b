// Shared graph representation and the union-find machinery behind
// unification.  A feature structure or multi-rooted structure is a vector
// of nodes; each node has a type and a feature-sorted arc list.  All
// destructive work happens in a Scratch: structures are imported, root
// classes merged, the congruence closure run to completion with classwise
// type joins, and the result read back in canonical form.
//
// Canonical form: for each root in order, breadth-first over not yet
// visited nodes with arcs taken in feature order.  Two structures are
// alphabetic variants iff their canonical forms are equal, which is what
// lets the rest of the code use plain equality.

#pragma once

#include <algorithm>
#include <cassert>
#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "tfs/types.hpp"

namespace tfs {

using NodeId = std::uint32_t;

struct Arc {
  FeatId feat;
  NodeId target;
  friend bool operator==(const Arc&, const Arc&) = default;
};

struct Node {
  TypeId type;
  std::vector<Arc> arcs; // sorted by feat, at most one arc per feature
  friend bool operator==(const Node&, const Node&) = default;
};

namespace detail {

// Type joins during closure fail softly: the class is poisoned and the
// closure keeps running so that the full congruence is available for the
// failure-path search afterwards.
inline constexpr TypeId kTypePoison = static_cast<TypeId>(-1);

class Scratch {
 public:
  explicit Scratch(const TypeHierarchy& hier) : hier_(&hier) {}

  NodeId add_node(TypeId t) {
    parent_.push_back(static_cast<NodeId>(parent_.size()));
    type_.push_back(t);
    arcs_.emplace_back();
    return static_cast<NodeId>(parent_.size() - 1);
  }

  // Copies a node vector in; returns the offset added to its node ids.
  NodeId import(std::span<const Node> nodes) {
    NodeId base = static_cast<NodeId>(parent_.size());
    for (const Node& n : nodes) {
      NodeId id = add_node(n.type);
      arcs_[id] = n.arcs;
      for (Arc& a : arcs_[id]) a.target += base;
    }
    return base;
  }

  NodeId find(NodeId x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]]; // path halving
      x = parent_[x];
    }
    return x;
  }

  bool failed() const { return failed_; }

  // Merges the classes of a and b and runs the congruence closure: whenever
  // two merged nodes carry the same feature, their targets are merged too.
  // Class types are joined as classes fuse; a failed join poisons the class
  // but does not stop the closure.
  void merge(NodeId a, NodeId b) {
    pending_.push_back({a, b});
    while (!pending_.empty()) {
      auto [x, y] = pending_.back();
      pending_.pop_back();
      NodeId rx = find(x), ry = find(y);
      if (rx == ry) continue;
      // Keep the class with the longer arc list as representative so arc
      // merging copies the shorter one.
      if (arcs_[rx].size() < arcs_[ry].size()) std::swap(rx, ry);
      parent_[ry] = rx;
      if (type_[rx] == kTypePoison || type_[ry] == kTypePoison) {
        type_[rx] = kTypePoison;
        failed_ = true;
      } else {
        auto j = hier_->join(type_[rx], type_[ry]);
        if (j) {
          type_[rx] = *j;
        } else {
          type_[rx] = kTypePoison;
          failed_ = true;
        }
      }
      for (const Arc& a2 : arcs_[ry]) {
        auto it = std::lower_bound(
            arcs_[rx].begin(), arcs_[rx].end(), a2.feat,
            [](const Arc& lhs, FeatId f) { return lhs.feat < f; });
        if (it != arcs_[rx].end() && it->feat == a2.feat) {
          pending_.push_back({it->target, a2.target});
        } else {
          arcs_[rx].insert(it, a2);
        }
      }
      arcs_[ry].clear();
    }
  }

  // Reads back the canonical structure reachable from the given roots.
  // Root slots pointing into one class come out aliased, not duplicated.
  // Unreachable classes are dropped (that is how rule application splices
  // elements out).
  std::pair<std::vector<Node>, std::vector<NodeId>> extract(
      std::span<const NodeId> roots) {
    std::vector<Node> out;
    std::vector<NodeId> out_roots(roots.size());
    std::vector<NodeId> number(parent_.size(), kUnvisited);
    std::vector<NodeId> queue;
    for (std::size_t r = 0; r < roots.size(); ++r) {
      NodeId rep = find(roots[r]);
      if (number[rep] == kUnvisited) {
        std::size_t head = queue.size();
        number[rep] = static_cast<NodeId>(out.size());
        out.push_back({type_[rep], {}});
        queue.push_back(rep);
        while (head < queue.size()) {
          NodeId q = queue[head++];
          for (const Arc& a : arcs_[q]) {
            NodeId t = find(a.target);
            if (number[t] == kUnvisited) {
              number[t] = static_cast<NodeId>(out.size());
              out.push_back({type_[t], {}});
              queue.push_back(t);
            }
          }
        }
      }
      out_roots[r] = number[rep];
    }
    for (NodeId q : queue) {
      Node& n = out[number[q]];
      n.arcs.reserve(arcs_[q].size());
      for (const Arc& a : arcs_[q]) n.arcs.push_back({a.feat, number[find(a.target)]});
    }
    return {std::move(out), std::move(out_roots)};
  }

  // Locates the first poisoned class in depth-first preorder from the
  // roots, arcs in ascending feature order.  Preorder enumerates paths in
  // lexicographic order, so the first hit is the least witness: the result
  // is the 1-based root index and the feature path leading to the clash.
  std::optional<std::pair<std::size_t, std::vector<FeatId>>> witness(
      std::span<const NodeId> roots) {
    std::vector<char> seen(parent_.size(), 0);
    std::vector<FeatId> path;
    for (std::size_t r = 0; r < roots.size(); ++r) {
      path.clear();
      if (witness_dfs(find(roots[r]), seen, path))
        return std::make_pair(r + 1, path);
    }
    return std::nullopt;
  }

 private:
  static constexpr NodeId kUnvisited = static_cast<NodeId>(-1);

  bool witness_dfs(NodeId rep, std::vector<char>& seen,
                   std::vector<FeatId>& path) {
    if (type_[rep] == kTypePoison) return true;
    if (seen[rep]) return false;
    seen[rep] = 1;
    for (const Arc& a : arcs_[rep]) {
      path.push_back(a.feat);
      if (witness_dfs(find(a.target), seen, path)) return true;
      path.pop_back();
    }
    return false;
  }

  const TypeHierarchy* hier_;
  std::vector<NodeId> parent_;
  std::vector<TypeId> type_;
  std::vector<std::vector<Arc>> arcs_;
  std::vector<std::pair<NodeId, NodeId>> pending_;
  bool failed_ = false;
};

} // namespace detail
} // namespace tfs
