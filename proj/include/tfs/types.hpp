// Type hierarchy: a finite partial order of type symbols with least element
// `bot`, required to be bounded complete (every pair of types with a common
// upper bound has a least one), plus appropriateness declarations saying
// which features a type may carry and the minimum type of each value.
//
// The hierarchy is built incrementally, then frozen by validate(), which
// either reports a list of problems or precomputes the join table and the
// effective (inherited) appropriateness map used by everything else.

#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace tfs {

using TypeId = std::uint32_t;
using FeatId = std::uint32_t;

inline constexpr TypeId kBot = 0;

struct HierarchyIssue {
  enum Kind {
    CycleInOrder,           // subtype declarations form a cycle
    NotBoundedComplete,     // two types with upper bounds but no least one
    ApproprietyNotMonotone, // value override less specific than inherited,
                            // or incomparable values inherited from parents
    FeatureOnBot,           // feature declared appropriate for bot
    UnknownType,            // declaration references an unregistered id
  };
  Kind kind;
  std::string message;
  TypeId a = 0, b = 0; // offending pair where meaningful (NotBoundedComplete)
};

class TypeHierarchy {
 public:
  TypeHierarchy() {
    names_.push_back("bot");
    index_.emplace("bot", kBot);
    parents_.emplace_back();
  }

  // Registration is idempotent: mentioning a name again returns its id.
  TypeId add_type(std::string_view name) {
    auto it = index_.find(std::string(name));
    if (it != index_.end()) return it->second;
    TypeId id = static_cast<TypeId>(names_.size());
    names_.emplace_back(name);
    index_.emplace(names_.back(), id);
    parents_.emplace_back();
    return id;
  }

  FeatId add_feature(std::string_view name) {
    auto it = feat_index_.find(std::string(name));
    if (it != feat_index_.end()) return it->second;
    FeatId id = static_cast<FeatId>(feat_names_.size());
    feat_names_.emplace_back(name);
    feat_index_.emplace(feat_names_.back(), id);
    return id;
  }

  void declare_subtype(TypeId child, TypeId parent) {
    decls_.push_back({child, parent});
  }

  void declare_approp(FeatId f, TypeId holder, TypeId value) {
    approp_decls_.push_back({f, holder, value});
  }

  std::optional<TypeId> find_type(std::string_view name) const {
    auto it = index_.find(std::string(name));
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  std::optional<FeatId> find_feature(std::string_view name) const {
    auto it = feat_index_.find(std::string(name));
    if (it == feat_index_.end()) return std::nullopt;
    return it->second;
  }

  std::size_t type_count() const { return names_.size(); }
  std::size_t feature_count() const { return feat_names_.size(); }
  const std::string& type_name(TypeId t) const { return names_[t]; }
  const std::string& feature_name(FeatId f) const { return feat_names_[f]; }
  bool frozen() const { return frozen_; }

  // Checks the declarations and, when they are in order, precomputes the
  // reachability and join tables.  Returns every problem found; the
  // hierarchy is usable iff the list is empty.
  std::vector<HierarchyIssue> validate() {
    std::vector<HierarchyIssue> issues;
    const std::size_t n = names_.size();

    children_.assign(n, {});
    for (auto& p : parents_) p.clear();
    for (auto [child, parent] : decls_) {
      if (child >= n || parent >= n) {
        issues.push_back({HierarchyIssue::UnknownType,
                          "subtype declaration references unknown type"});
        continue;
      }
      parents_[child].push_back(parent);
      children_[parent].push_back(child);
    }
    // Types declared without a parent hang directly below bot so that bot
    // stays the least element.
    for (TypeId t = 1; t < n; ++t) {
      if (parents_[t].empty()) {
        parents_[t].push_back(kBot);
        children_[kBot].push_back(t);
      }
    }
    if (!issues.empty()) return issues;

    // Topological order over the declared edges; a leftover node means a
    // cycle through it.
    std::vector<std::size_t> indeg(n, 0);
    for (TypeId t = 0; t < n; ++t) indeg[t] = parents_[t].size();
    std::vector<TypeId> topo;
    topo.reserve(n);
    for (TypeId t = 0; t < n; ++t)
      if (indeg[t] == 0) topo.push_back(t);
    for (std::size_t q = 0; q < topo.size(); ++q)
      for (TypeId c : children_[topo[q]])
        if (--indeg[c] == 0) topo.push_back(c);
    if (topo.size() != n) {
      std::string cyc;
      for (TypeId t = 0; t < n; ++t)
        if (indeg[t] > 0) cyc += cyc.empty() ? names_[t] : ", " + names_[t];
      issues.push_back({HierarchyIssue::CycleInOrder,
                        "subtype declarations form a cycle through: " + cyc});
      return issues;
    }
    topo_ = topo;

    // leq_[a][b] — is a <= b, i.e. b lies at or below a in the hierarchy
    // (b is at least as specific).  bot is <= everything by construction.
    leq_.assign(n, std::vector<char>(n, 0));
    for (TypeId t = 0; t < n; ++t) leq_[t][t] = 1;
    for (auto it = topo.rbegin(); it != topo.rend(); ++it) {
      TypeId t = *it;
      for (TypeId c : children_[t])
        for (TypeId b = 0; b < n; ++b)
          if (leq_[c][b]) leq_[t][b] = 1;
    }

    // Join table: join(a,b) = the least c with a <= c and b <= c, absent
    // when a and b have no common upper bound at all, and a bounded
    // completeness violation when they have bounds but no least one.
    joins_.assign(n, std::vector<TypeId>(n, kNoType));
    std::vector<TypeId> ubs;
    for (TypeId a = 0; a < n; ++a) {
      for (TypeId b = a; b < n; ++b) {
        if (leq_[a][b]) { joins_[a][b] = joins_[b][a] = b; continue; }
        if (leq_[b][a]) { joins_[a][b] = joins_[b][a] = a; continue; }
        ubs.clear();
        for (TypeId c = 0; c < n; ++c)
          if (leq_[a][c] && leq_[b][c]) ubs.push_back(c);
        if (ubs.empty()) continue; // no bound: join fails, not an error
        TypeId least = ubs[0];
        for (TypeId c : ubs)
          if (leq_[c][least]) least = c;
        bool is_least = true;
        for (TypeId c : ubs)
          if (!leq_[least][c]) { is_least = false; break; }
        if (!is_least) {
          issues.push_back({HierarchyIssue::NotBoundedComplete,
                            "types '" + names_[a] + "' and '" + names_[b] +
                                "' have upper bounds but no least one",
                            a, b});
          continue;
        }
        joins_[a][b] = joins_[b][a] = least;
      }
    }
    if (!issues.empty()) return issues;

    // Effective appropriateness: declarations inherit downward; overrides
    // must refine what is inherited.  approp_[f][t] = value type or kNoType.
    const std::size_t nf = feat_names_.size();
    approp_.assign(nf, std::vector<TypeId>(n, kNoType));
    std::vector<std::vector<char>> declared(nf, std::vector<char>(n, 0));
    for (auto [f, holder, value] : approp_decls_) {
      if (holder >= n || value >= n || f >= nf) {
        issues.push_back({HierarchyIssue::UnknownType,
                          "appropriateness declaration references unknown "
                          "type or feature"});
        continue;
      }
      if (holder == kBot) {
        issues.push_back({HierarchyIssue::FeatureOnBot,
                          "feature '" + feat_names_[f] +
                              "' declared appropriate for bot"});
        continue;
      }
      approp_[f][holder] = value;
      declared[f][holder] = 1;
    }
    if (!issues.empty()) return issues;

    for (FeatId f = 0; f < nf; ++f) {
      for (TypeId t : topo) {
        TypeId inherited = kNoType;
        for (TypeId p : parents_[t]) {
          TypeId pv = approp_[f][p];
          if (pv == kNoType) continue;
          if (inherited == kNoType) { inherited = pv; continue; }
          TypeId j = joins_[inherited][pv];
          if (j == kNoType) {
            issues.push_back(
                {HierarchyIssue::ApproprietyNotMonotone,
                 "feature '" + feat_names_[f] + "' at type '" + names_[t] +
                     "' inherits incompatible value types '" +
                     names_[inherited] + "' and '" + names_[pv] + "'"});
            j = inherited;
          }
          inherited = j;
        }
        if (declared[f][t]) {
          if (inherited != kNoType && !leq_[inherited][approp_[f][t]])
            issues.push_back(
                {HierarchyIssue::ApproprietyNotMonotone,
                 "feature '" + feat_names_[f] + "' at type '" + names_[t] +
                     "' overrides inherited value '" + names_[inherited] +
                     "' with non-refining '" + names_[approp_[f][t]] + "'"});
        } else if (inherited != kNoType) {
          approp_[f][t] = inherited;
        }
      }
    }
    if (!issues.empty()) return issues;

    // Per-type feature lists (feature order) for total well-typedness and
    // introspection.
    features_of_.assign(n, {});
    for (TypeId t = 0; t < n; ++t)
      for (FeatId f = 0; f < nf; ++f)
        if (approp_[f][t] != kNoType) features_of_[t].push_back({f, approp_[f][t]});

    frozen_ = true;
    return issues;
  }

  // a <= b: b is at least as specific as a.  bot <= t for all t.
  bool leq(TypeId a, TypeId b) const { return leq_[a][b] != 0; }

  std::optional<TypeId> join(TypeId a, TypeId b) const {
    TypeId j = joins_[a][b];
    if (j == kNoType) return std::nullopt;
    return j;
  }

  std::optional<TypeId> approp(FeatId f, TypeId t) const {
    if (f >= approp_.size()) return std::nullopt;
    TypeId v = approp_[f][t];
    if (v == kNoType) return std::nullopt;
    return v;
  }

  // Appropriate features of t with their value types, in feature order.
  const std::vector<std::pair<FeatId, TypeId>>& approp_features(TypeId t) const {
    return features_of_[t];
  }

 private:
  static constexpr TypeId kNoType = static_cast<TypeId>(-1);

  std::vector<std::string> names_;
  std::unordered_map<std::string, TypeId> index_;
  std::vector<std::string> feat_names_;
  std::unordered_map<std::string, FeatId> feat_index_;
  std::vector<std::pair<TypeId, TypeId>> decls_;       // (child, parent)
  std::vector<std::vector<TypeId>> parents_, children_;
  std::vector<std::tuple<FeatId, TypeId, TypeId>> approp_decls_;
  std::vector<TypeId> topo_;
  std::vector<std::vector<char>> leq_;
  std::vector<std::vector<TypeId>> joins_;
  std::vector<std::vector<TypeId>> approp_;
  std::vector<std::vector<std::pair<FeatId, TypeId>>> features_of_;
  bool frozen_ = false;
};

} // namespace tfs
