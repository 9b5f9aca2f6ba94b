// Bottom-up chart parser.  Items are spanned dotted rule instances
// [i, <A, k>, j]; the initial state holds one item per lexical category
// plus one unstarted instance of every rule at every position.  The only
// inference is dot movement: an active item meeting a complete item at its
// right edge absorbs the complete item's head into the element after the
// dot.  New items are refused when an already committed item with the same
// span and dot subsumes them.
//
// Transitions run in rounds that reproduce the naive all-pairs definition
// exactly: a round pairs the previous round's new items against the
// committed set, filters candidates against committed items only, and
// deduplicates pending candidates by equality.  Filtering against the
// growing intra-round set would be a different (stricter) relation; see the
// equivalence suite.  The transition count includes the final empty round
// that detects the fix-point.

#pragma once

#include <algorithm>
#include <cassert>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <tuple>
#include <unordered_map>
#include <variant>
#include <vector>

#include "tfs/amrs.hpp"
#include "tfs/format.hpp"
#include "tfs/grammar.hpp"

namespace tfs {

struct Guards {
  std::size_t max_transitions = 64;
  std::size_t max_items = 100000;
  std::size_t quotient_depth = 3;
};

struct Item {
  std::size_t i = 0, j = 0;
  Amrs amrs;
  std::size_t dot = 0;
  std::string rule_id; // "lex:<word>" for lexical items
  int rule_index = -1; // into Grammar::rules; -1 for lexical
  enum Prov { Lex, Predict, Dm } prov = Predict;
  std::size_t parent = 0, child = 0; // Dm: indexes into Chart::items()
  std::size_t word_pos = 0;          // Lex: 1-based sentence position

  bool complete() const { return dot + 1 == amrs.len(); }
  bool same_fact(const Item& o) const {
    // Item identity for the subsumption filter and set comparisons; rule
    // and provenance are reporting metadata.
    return i == o.i && j == o.j && dot == o.dot && amrs == o.amrs;
  }
};

// ---- dot movement -------------------------------------------------------

struct DotMove {
  enum Reason { Ok, SpanMismatch, LeftComplete, RightActive, UnifyFailure };
  std::optional<Item> item;
  Reason reason = Ok;
  explicit operator bool() const { return item.has_value(); }
};

inline DotMove dot_move(const Grammar& g, const Item& x, const Item& y) {
  if (x.j != y.i) return {std::nullopt, DotMove::SpanMismatch};
  if (x.complete()) return {std::nullopt, DotMove::LeftComplete};
  if (!y.complete()) return {std::nullopt, DotMove::RightActive};
  Fs head = project(g.hier, y.amrs, y.amrs.len());
  auto u = unify_in_context(g.hier, x.amrs, x.dot + 1, head);
  if (!u) return {std::nullopt, DotMove::UnifyFailure};
  Item z;
  z.i = x.i;
  z.j = y.j;
  z.amrs = std::move(*u.value);
  z.dot = x.dot + 1;
  z.rule_id = x.rule_id;
  z.rule_index = x.rule_index;
  z.prov = Item::Dm;
  return {std::move(z), DotMove::Ok};
}

inline bool item_subsumes(const TypeHierarchy& hier, const Item& x,
                          const Item& y) {
  return x.i == y.i && x.j == y.j && x.dot == y.dot &&
         amrs_subsumes(hier, x.amrs, y.amrs);
}

// ---- the chart ----------------------------------------------------------

class Chart {
 public:
  Chart(const Grammar& g, const std::vector<std::string>& words,
        Guards guards = {})
      : g_(&g), n_(words.size()), guards_(guards) {
    for (std::size_t t = 1; t <= words.size(); ++t) {
      const auto* cats = g.categories(words[t - 1]);
      assert(cats && !cats->empty()); // caller checks the lexicon first
      for (const Fs& c : *cats) {
        Item it;
        it.i = t - 1;
        it.j = t;
        it.amrs = from_fs(c);
        it.dot = 0;
        it.rule_id = "lex:" + words[t - 1];
        it.prov = Item::Lex;
        it.word_pos = t;
        commit(std::move(it));
      }
    }
    for (std::size_t i = 0; i <= words.size(); ++i) {
      for (std::size_t ri = 0; ri < g.rules.size(); ++ri) {
        Item it;
        it.i = i;
        it.j = i;
        it.amrs = g.rules[ri].amrs;
        it.dot = 0;
        it.rule_id = g.rules[ri].id;
        it.rule_index = static_cast<int>(ri);
        it.prov = Item::Predict;
        commit(std::move(it));
      }
    }
    newest_.resize(items_.size());
    for (std::size_t t = 0; t < items_.size(); ++t) newest_[t] = t;
  }

  const std::vector<Item>& items() const { return items_; }
  std::size_t word_count() const { return n_; }
  const Guards& guards() const { return guards_; }
  std::size_t transitions() const { return transitions_; }
  const char* tripped() const { return tripped_; }
  std::size_t invariant_violations() const { return violations_; }

  // One transition: commits Delta(S) for the current state.  Returns true
  // when new items were committed.  Counts itself, including the empty
  // fix-point round.
  bool step() {
    ++transitions_;
    std::vector<Item> pending;
    std::vector<char> is_new(items_.size(), 0);
    for (std::size_t u : newest_) is_new[u] = 1;
    auto consider = [&](std::size_t xi, std::size_t yi) {
      auto dm = dot_move(*g_, items_[xi], items_[yi]);
      if (!dm) return;
      Item z = std::move(*dm.item);
      // Lemma 4.11-style growth: same left index, dot advanced, left
      // argument's AMRS below the result.  Violations would mean dot
      // movement is broken; counted, never fixed up.
      if (z.i != items_[xi].i || z.dot != items_[xi].dot + 1 ||
          !amrs_subsumes(g_->hier, items_[xi].amrs, z.amrs))
        ++violations_;
      z.parent = xi;
      z.child = yi;
      for (std::size_t c : bucket(z.i, z.j, z.dot))
        if (amrs_subsumes(g_->hier, items_[c].amrs, z.amrs)) return;
      for (const Item& p : pending)
        if (p.same_fact(z)) return;
      pending.push_back(std::move(z));
    };
    for (std::size_t u : newest_) {
      const Item& iu = items_[u];
      if (!iu.complete()) {
        auto it = completes_by_i_.find(iu.j);
        if (it != completes_by_i_.end())
          for (std::size_t y : it->second) consider(u, y);
      } else {
        auto it = actives_by_j_.find(iu.i);
        if (it != actives_by_j_.end())
          for (std::size_t x : it->second)
            if (!is_new[x]) consider(x, u);
      }
    }
    newest_.clear();
    for (Item& z : pending) {
      if (items_.size() >= guards_.max_items) {
        tripped_ = "max_items";
        break;
      }
      newest_.push_back(items_.size());
      commit(std::move(z));
    }
    return !newest_.empty();
  }

  // Spanning complete items whose head is at or above the start structure,
  // sorted by canonical rendering for reporting determinism.
  std::vector<std::size_t> accepting() const {
    std::vector<std::size_t> out;
    for (std::size_t t = 0; t < items_.size(); ++t) {
      const Item& it = items_[t];
      if (it.i != 0 || it.j != n_ || !it.complete()) continue;
      if (subsumes(g_->hier, g_->start,
                   project(g_->hier, it.amrs, it.amrs.len())))
        out.push_back(t);
    }
    std::sort(out.begin(), out.end(), [this](std::size_t a, std::size_t b) {
      return render(g_->hier, items_[a].amrs) < render(g_->hier, items_[b].amrs);
    });
    return out;
  }

 private:
  void commit(Item&& it) {
    // Shape invariant: an empty span holds only unstarted rule instances.
    if (it.i == it.j && (it.complete() || it.dot != 0)) ++violations_;
    // Every phrasal item stays above its rule's skeleton.
    if (it.rule_index >= 0 &&
        !amrs_subsumes(g_->hier, g_->rules[it.rule_index].amrs, it.amrs))
      ++violations_;
    std::size_t idx = items_.size();
    buckets_[key(it.i, it.j, it.dot)].push_back(idx);
    if (it.complete())
      completes_by_i_[it.i].push_back(idx);
    else
      actives_by_j_[it.j].push_back(idx);
    items_.push_back(std::move(it));
  }

  static std::uint64_t key(std::size_t i, std::size_t j, std::size_t dot) {
    return (static_cast<std::uint64_t>(i) << 40) |
           (static_cast<std::uint64_t>(j) << 16) |
           static_cast<std::uint64_t>(dot);
  }

  std::span<const std::size_t> bucket(std::size_t i, std::size_t j,
                                      std::size_t dot) {
    auto it = buckets_.find(key(i, j, dot));
    if (it == buckets_.end()) return {};
    return it->second;
  }

  const Grammar* g_;
  std::size_t n_;
  Guards guards_;
  std::vector<Item> items_;
  std::vector<std::size_t> newest_;
  std::unordered_map<std::uint64_t, std::vector<std::size_t>> buckets_;
  std::map<std::size_t, std::vector<std::size_t>> completes_by_i_;
  std::map<std::size_t, std::vector<std::size_t>> actives_by_j_;
  std::size_t transitions_ = 0;
  std::size_t violations_ = 0;
  const char* tripped_ = nullptr;
};

// ---- whole runs ---------------------------------------------------------

struct ParseResult {
  enum Status { Accept, Reject, Guard } status = Reject;
  std::string guard_name; // "max_transitions" | "max_items"
  Chart chart;
  std::size_t transitions = 0;
  std::vector<std::size_t> accepting; // indexes into chart.items()
};

inline std::optional<UnknownWord> check_words(
    const Grammar& g, const std::vector<std::string>& words) {
  for (std::size_t t = 0; t < words.size(); ++t) {
    const auto* cats = g.categories(words[t]);
    if (!cats || cats->empty()) return UnknownWord{words[t], t + 1};
  }
  return std::nullopt;
}

inline std::variant<ParseResult, UnknownWord> run(
    const Grammar& g, const std::vector<std::string>& words,
    Guards guards = {}) {
  if (auto uw = check_words(g, words)) return *uw;
  Chart chart(g, words, guards);
  bool fixed = false;
  while (true) {
    bool changed = chart.step();
    if (chart.tripped()) break;
    if (!changed) {
      fixed = true;
      break;
    }
    if (chart.transitions() >= guards.max_transitions) break;
  }
  ParseResult res{ParseResult::Reject, "", std::move(chart), 0, {}};
  res.transitions = res.chart.transitions();
  res.accepting = res.chart.accepting();
  if (res.chart.tripped()) {
    res.status = ParseResult::Guard;
    res.guard_name = res.chart.tripped();
  } else if (!fixed) {
    res.status = ParseResult::Guard;
    res.guard_name = "max_transitions";
  } else if (!res.accepting.empty()) {
    res.status = ParseResult::Accept;
  }
  return res;
}

// ---- derivation extraction ----------------------------------------------

namespace detail {
inline DerivTree provenance_tree(const std::vector<Item>& items,
                                 std::size_t idx) {
  const Item& it = items[idx];
  switch (it.prov) {
    case Item::Lex:
      return DerivTree{};
    case Item::Predict:
      return DerivTree{it.rule_index, {}};
    case Item::Dm: {
      assert(it.parent < idx && it.child < idx && "provenance must replay");
      DerivTree t = provenance_tree(items, it.parent);
      t.kids.push_back(provenance_tree(items, it.child));
      return t;
    }
  }
  return DerivTree{};
}
} // namespace detail

// Leftmost derivation for an accepting (or any complete) item: provenance
// gives the analysis tree, which is then replayed top-down from the item's
// head until the structure has one element per covered word.
inline std::vector<DerivationStep> extract_derivation(const Grammar& g,
                                                      const Chart& chart,
                                                      std::size_t item_index) {
  const Item& it = chart.items()[item_index];
  assert(it.complete());
  DerivTree tree = detail::provenance_tree(chart.items(), item_index);
  Fs top = project(g.hier, it.amrs, it.amrs.len());
  return linearize_derivation(g, top, tree, it.j - it.i);
}

// ---- diagnostics and dumps ----------------------------------------------

struct QuotientReport {
  struct Bucket {
    std::size_t i, j;
    std::string rule_id;
    std::size_t dot;
    std::size_t incomparable_pairs; // same signature, neither subsumes
  };
  std::vector<Bucket> buckets; // only buckets with a nonzero count
  std::size_t total_pairs() const {
    std::size_t s = 0;
    for (const auto& b : buckets) s += b.incomparable_pairs;
    return s;
  }
};

// Counts, per (i, j, rule, dot) bucket, pairs of items whose depth-d path
// signatures coincide although neither subsumes the other.  Nonzero counts
// mean the depth-d abstraction cannot separate genuinely different items —
// the situation that makes termination arguments fail.
inline QuotientReport quotient_report(const Grammar& g, const Chart& chart,
                                      std::size_t depth) {
  std::map<std::tuple<std::size_t, std::size_t, std::string, std::size_t>,
           std::vector<std::size_t>>
      groups;
  for (std::size_t t = 0; t < chart.items().size(); ++t) {
    const Item& it = chart.items()[t];
    groups[{it.i, it.j, it.rule_id, it.dot}].push_back(t);
  }
  QuotientReport rep;
  for (const auto& [k, members] : groups) {
    if (members.size() < 2) continue;
    std::unordered_map<std::string, std::vector<std::size_t>> by_sig;
    for (std::size_t t : members)
      by_sig[path_quotient(chart.items()[t].amrs, depth)].push_back(t);
    std::size_t pairs = 0;
    for (const auto& [sig, group] : by_sig) {
      for (std::size_t a = 0; a < group.size(); ++a) {
        for (std::size_t b = a + 1; b < group.size(); ++b) {
          const Amrs& x = chart.items()[group[a]].amrs;
          const Amrs& y = chart.items()[group[b]].amrs;
          if (!amrs_subsumes(g.hier, x, y) && !amrs_subsumes(g.hier, y, x))
            ++pairs;
        }
      }
    }
    if (pairs)
      rep.buckets.push_back({std::get<0>(k), std::get<1>(k), std::get<2>(k),
                             std::get<3>(k), pairs});
  }
  return rep;
}

inline std::string chart_dump(const Grammar& g, const ParseResult& res) {
  struct Line {
    std::size_t i, j;
    std::string rule;
    std::size_t dot;
    bool complete;
    std::string rendering;
  };
  std::vector<Line> lines;
  for (const Item& it : res.chart.items())
    lines.push_back({it.i, it.j, it.rule_id, it.dot, it.complete(),
                     render(g.hier, it.amrs)});
  std::sort(lines.begin(), lines.end(), [](const Line& a, const Line& b) {
    return std::tie(a.i, a.j, a.rule, a.dot, a.rendering) <
           std::tie(b.i, b.j, b.rule, b.dot, b.rendering);
  });
  std::string out;
  for (const Line& l : lines) {
    out += "ITEM i=" + std::to_string(l.i) + " j=" + std::to_string(l.j) +
           " rule=" + l.rule + " dot=" + std::to_string(l.dot) +
           " complete=" + (l.complete ? "1" : "0") + " :: " + l.rendering +
           "\n";
  }
  out += "RESULT ";
  switch (res.status) {
    case ParseResult::Accept: out += "accept"; break;
    case ParseResult::Reject: out += "reject"; break;
    case ParseResult::Guard: out += "guard=" + res.guard_name; break;
  }
  out += "\nTRANSITIONS " + std::to_string(res.transitions) + "\n";
  return out;
}

inline std::string derivation_dump(const Grammar& g,
                                   const std::vector<DerivationStep>& steps) {
  std::string out;
  for (std::size_t t = 0; t < steps.size(); ++t) {
    out += "STEP " + std::to_string(t + 1) + " rule=" + steps[t].rule_id +
           " at=" + std::to_string(steps[t].position) + " :: " +
           render(g.hier, steps[t].target) + "\n";
  }
  return out;
}

} // namespace tfs
