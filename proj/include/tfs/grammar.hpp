// Grammars: phrasal rules (multi-rooted structures whose last element is
// the head), a lexicon mapping words to category feature structures, and a
// start structure.  Also home to the derivation relation (rule application
// by head unification and body splicing) and a bounded brute-force oracle
// for the generated language, used to cross-check the chart parser.

#pragma once

#include <cassert>
#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <variant>
#include <vector>

#include "tfs/amrs.hpp"
#include "tfs/fs.hpp"
#include "tfs/graph.hpp"
#include "tfs/types.hpp"

namespace tfs {

struct Rule {
  std::string id;
  Amrs amrs; // length >= 2; elements 1..n-1 are the body, element n the head
  std::size_t len() const { return amrs.len(); }
};

struct Grammar {
  TypeHierarchy hier;
  std::vector<Rule> rules;
  // Declaration-ordered lexicon; a word may list several categories.
  std::vector<std::pair<std::string, std::vector<Fs>>> lexicon;
  Fs start;

  const std::vector<Fs>* categories(const std::string& word) const {
    for (const auto& [w, cats] : lexicon)
      if (w == word) return &cats;
    return nullptr;
  }
  const Rule* rule_by_id(const std::string& id) const {
    for (const Rule& r : rules)
      if (r.id == id) return &r;
    return nullptr;
  }
};

struct UnknownWord {
  std::string word;
  std::size_t position; // 1-based index into the sentence
};

// ---- pre-terminals ------------------------------------------------------

// The lexical AMRS for words j..k (1-based, inclusive): one category per
// word, elements mutually disjoint.  `choices`, when given, selects one
// category per sentence position (0-based into `words`) for ambiguous
// entries; by default every word contributes its first category.
inline std::variant<Amrs, UnknownWord> pre_terminals(
    const Grammar& g, const std::vector<std::string>& words, std::size_t j,
    std::size_t k, const std::vector<std::size_t>* choices = nullptr) {
  assert(1 <= j && j <= k && k <= words.size());
  Amrs out;
  for (std::size_t t = j; t <= k; ++t) {
    const auto* cats = g.categories(words[t - 1]);
    if (!cats || cats->empty()) return UnknownWord{words[t - 1], t};
    std::size_t pick = choices ? (*choices)[t - 1] : 0;
    Amrs one = from_fs((*cats)[pick]);
    out = (t == j) ? std::move(one) : concatenate(out, one);
  }
  return out;
}

// ---- rule application ---------------------------------------------------

// Applies `rule` at element j of `a` (1-based): the rule head and the
// element are merged in one shared closure over both structures, then the
// element is replaced by the rule's body.  Resulting length is
// len(a) + len(rule) - 2.  Returns nothing when the head does not unify.
inline std::optional<Amrs> derive_step(const Grammar& g, const Amrs& a,
                                       std::size_t j, const Rule& rule) {
  assert(1 <= j && j <= a.len());
  assert(rule.len() >= 2);
  detail::Scratch s(g.hier);
  NodeId abase = s.import(a.nodes);
  NodeId rbase = s.import(rule.amrs.nodes);
  s.merge(abase + a.roots[j - 1], rbase + rule.amrs.roots[rule.len() - 1]);
  if (s.failed()) return std::nullopt;
  std::vector<NodeId> roots;
  roots.reserve(a.len() + rule.len() - 2);
  for (std::size_t t = 0; t + 1 < j; ++t) roots.push_back(abase + a.roots[t]);
  for (std::size_t t = 0; t + 1 < rule.len(); ++t)
    roots.push_back(rbase + rule.amrs.roots[t]);
  for (std::size_t t = j; t < a.len(); ++t) roots.push_back(abase + a.roots[t]);
  auto [nodes, oroots] = s.extract(roots);
  return Amrs{std::move(nodes), std::move(oroots)};
}

struct DerivationStep {
  Amrs source;
  Amrs target;
  std::string rule_id;
  std::size_t position; // 1-based element the rule expanded
};

// ---- derivation trees ---------------------------------------------------

// Shape of a completed analysis: rule nodes over lexical leaves.  Used to
// serialize an analysis into a leftmost top-down step list.
struct DerivTree {
  int rule = -1; // index into Grammar::rules; -1 marks a lexical leaf
  std::vector<DerivTree> kids;
};

// Expands `top` leftmost-first along `tree`, recording one step per rule
// application, and stops as soon as the structure has one element per
// word.  Deeper unary chains below that point stay folded; their content
// is already present in `top` because it was produced bottom-up.
inline std::vector<DerivationStep> linearize_derivation(const Grammar& g,
                                                        const Fs& top,
                                                        const DerivTree& tree,
                                                        std::size_t n_words) {
  std::vector<DerivationStep> steps;
  Amrs d = from_fs(top);
  std::vector<const DerivTree*> frontier{&tree};
  while (d.len() < n_words) {
    std::size_t j = 0;
    const DerivTree* pick = nullptr;
    for (std::size_t t = 0; t < frontier.size(); ++t) {
      if (frontier[t]->rule >= 0) {
        j = t + 1;
        pick = frontier[t];
        break;
      }
    }
    if (!pick) break; // only leaves left; nothing more to expand
    const Rule& rule = g.rules[pick->rule];
    auto next = derive_step(g, d, j, rule);
    assert(next && "derivation tree must replay");
    if (!next) break;
    steps.push_back({d, *next, rule.id, j});
    d = *next;
    frontier.erase(frontier.begin() + (j - 1));
    for (std::size_t t = 0; t < pick->kids.size(); ++t)
      frontier.insert(frontier.begin() + (j - 1) + t, &pick->kids[t]);
  }
  return steps;
}

// ---- bounded oracle: directed derivation search -------------------------

struct OracleOutcome {
  enum Status { Found, NotFound, BudgetExceeded } status;
  std::vector<DerivationStep> steps; // meaningful for Found
};

struct AmrsHash {
  std::size_t operator()(const Amrs& a) const noexcept {
    std::uint64_t h = 1469598103934665603ull;
    auto mix = [&h](std::uint64_t v) {
      h ^= v;
      h *= 1099511628211ull;
    };
    mix(a.roots.size());
    for (NodeId r : a.roots) mix(r);
    mix(a.nodes.size());
    for (const Node& n : a.nodes) {
      mix(n.type);
      for (const Arc& arc : n.arcs) {
        mix(arc.feat);
        mix(arc.target);
      }
    }
    return static_cast<std::size_t>(h);
  }
};

// Breadth-first search for a derivation a ->* b with target <= b (same
// length, subsumption as AMRSs).  Deterministic expansion order: elements
// left to right, rules in declaration order.  States longer than the
// target are pruned since derivation steps never shrink a structure.
inline OracleOutcome oracle_derives(const Grammar& g, const Amrs& a,
                                    const Amrs& target,
                                    std::size_t max_steps) {
  struct Rec {
    Amrs value;
    std::ptrdiff_t parent;
    int rule;
    std::size_t pos;
    std::size_t depth;
  };
  std::vector<Rec> recs;
  std::unordered_set<Amrs, AmrsHash> seen;
  auto emit = [&](std::size_t idx) {
    std::vector<DerivationStep> steps;
    for (std::ptrdiff_t i = static_cast<std::ptrdiff_t>(idx);
         recs[i].parent >= 0; i = recs[i].parent)
      steps.push_back({recs[recs[i].parent].value, recs[i].value,
                       g.rules[recs[i].rule].id, recs[i].pos});
    std::reverse(steps.begin(), steps.end());
    return steps;
  };
  recs.push_back({a, -1, -1, 0, 0});
  seen.insert(a);
  if (target.len() == a.len() && amrs_subsumes(g.hier, target, a))
    return {OracleOutcome::Found, emit(0)};
  bool truncated = false;
  for (std::size_t head = 0; head < recs.size(); ++head) {
    Rec cur = recs[head]; // copy: recs reallocates while we expand
    if (cur.depth == max_steps) {
      truncated = true;
      continue;
    }
    for (std::size_t j = 1; j <= cur.value.len(); ++j) {
      for (std::size_t ri = 0; ri < g.rules.size(); ++ri) {
        auto next = derive_step(g, cur.value, j, g.rules[ri]);
        if (!next) continue;
        if (next->len() > target.len()) continue;
        if (!seen.insert(*next).second) continue;
        recs.push_back({std::move(*next), static_cast<std::ptrdiff_t>(head),
                        static_cast<int>(ri), j, cur.depth + 1});
        if (target.len() == recs.back().value.len() &&
            amrs_subsumes(g.hier, target, recs.back().value))
          return {OracleOutcome::Found, emit(recs.size() - 1)};
      }
    }
  }
  return {truncated ? OracleOutcome::BudgetExceeded : OracleOutcome::NotFound,
          {}};
}

// ---- bounded oracle: language membership --------------------------------

struct LanguageOutcome {
  enum Verdict { Yes, NoWithinBound, BudgetExceeded } verdict;
  std::vector<DerivationStep> witness; // leftmost steps, for Yes
};

// Decides w ∈ L(G) up to a reduction budget by searching bottom-up from
// the exact lexical sequence: contiguous windows are folded through rule
// bodies (one shared closure per fold) until a single element above the
// start structure remains.  Mirrors what derivations can produce top-down
// — every top-down derivation which covers the words corresponds to such
// a reduction sequence with the lexical material folded in — while keeping
// the state space finite per depth and independent of the chart machinery.
inline std::variant<LanguageOutcome, UnknownWord> in_language(
    const Grammar& g, const std::vector<std::string>& words,
    std::size_t max_steps) {
  assert(!words.empty());
  const std::size_t n = words.size();

  // Enumerate lexical category choices (ambiguity: one state per choice).
  std::vector<std::size_t> counts(n);
  for (std::size_t t = 0; t < n; ++t) {
    const auto* cats = g.categories(words[t]);
    if (!cats || cats->empty()) return UnknownWord{words[t], t + 1};
    counts[t] = cats->size();
  }

  struct State {
    Amrs value;
    std::vector<DerivTree> trees; // one per element
    std::size_t depth;
  };
  std::vector<State> queue;
  std::unordered_set<Amrs, AmrsHash> seen;

  std::vector<std::size_t> choice(n, 0);
  while (true) {
    auto pt = pre_terminals(g, words, 1, n, &choice);
    Amrs start_state = std::get<Amrs>(std::move(pt));
    if (seen.insert(start_state).second) {
      std::vector<DerivTree> leaves(n);
      queue.push_back({std::move(start_state), std::move(leaves), 0});
    }
    std::size_t t = 0;
    for (; t < n; ++t) {
      if (++choice[t] < counts[t]) break;
      choice[t] = 0;
    }
    if (t == n) break;
  }

  auto accepted = [&](const State& st) {
    return st.value.len() == 1 &&
           subsumes(g.hier, g.start, project(g.hier, st.value, 1));
  };
  auto to_witness = [&](const State& st) {
    return linearize_derivation(g, project(g.hier, st.value, 1), st.trees[0],
                                n);
  };

  for (const State& st : queue)
    if (accepted(st)) return LanguageOutcome{LanguageOutcome::Yes, to_witness(st)};

  bool truncated = false;
  for (std::size_t head = 0; head < queue.size(); ++head) {
    if (queue[head].depth == max_steps) {
      truncated = true;
      continue;
    }
    const std::size_t len = queue[head].value.len();
    for (std::size_t ri = 0; ri < g.rules.size(); ++ri) {
      const Rule& rule = g.rules[ri];
      const std::size_t r = rule.len() - 1; // body width
      if (r > len) continue;
      for (std::size_t p = 1; p + r - 1 <= len; ++p) {
        // Fold window p..p+r-1 through the rule body: merge each window
        // element with the matching body element in one closure, then the
        // window collapses to the rule's head.
        const State& cur = queue[head]; // reacquire: queue may reallocate
        detail::Scratch s(g.hier);
        NodeId sbase = s.import(cur.value.nodes);
        NodeId rbase = s.import(rule.amrs.nodes);
        for (std::size_t t = 0; t < r; ++t)
          s.merge(sbase + cur.value.roots[p - 1 + t],
                  rbase + rule.amrs.roots[t]);
        if (s.failed()) continue;
        std::vector<NodeId> roots;
        for (std::size_t t = 0; t + 1 < p; ++t)
          roots.push_back(sbase + cur.value.roots[t]);
        roots.push_back(rbase + rule.amrs.roots[rule.len() - 1]);
        for (std::size_t t = p - 1 + r; t < len; ++t)
          roots.push_back(sbase + cur.value.roots[t]);
        auto [nodes, oroots] = s.extract(roots);
        Amrs next{std::move(nodes), std::move(oroots)};
        if (!seen.insert(next).second) continue;
        DerivTree folded;
        folded.rule = static_cast<int>(ri);
        folded.kids.assign(cur.trees.begin() + (p - 1),
                           cur.trees.begin() + (p - 1 + r));
        std::vector<DerivTree> trees(cur.trees.begin(),
                                     cur.trees.begin() + (p - 1));
        trees.push_back(std::move(folded));
        trees.insert(trees.end(), cur.trees.begin() + (p - 1 + r),
                     cur.trees.end());
        State st{std::move(next), std::move(trees), cur.depth + 1};
        if (accepted(st))
          return LanguageOutcome{LanguageOutcome::Yes, to_witness(st)};
        queue.push_back(std::move(st));
      }
    }
  }
  return LanguageOutcome{truncated ? LanguageOutcome::BudgetExceeded
                                   : LanguageOutcome::NoWithinBound,
                         {}};
}

// ---- validation ---------------------------------------------------------

struct GrammarIssue {
  enum Severity { Error, Warning } severity;
  std::string locus; // "rule r1", "word loves", "start"
  std::string message;
};

inline std::vector<GrammarIssue> validate_grammar(const Grammar& g) {
  std::vector<GrammarIssue> out;
  std::unordered_set<std::string> ids;
  for (const Rule& r : g.rules) {
    std::string locus = "rule " + r.id;
    if (!ids.insert(r.id).second)
      out.push_back({GrammarIssue::Error, locus, "duplicate rule id"});
    if (r.len() < 2) {
      out.push_back({GrammarIssue::Error, locus,
                     "a phrasal rule needs a body and a head (length >= 2)"});
      continue;
    }
    for (std::size_t j = 1; j <= r.len(); ++j) {
      Fs el = project(g.hier, r.amrs, j);
      if (!well_typed(g.hier, el))
        out.push_back({GrammarIssue::Error, locus,
                       "element " + std::to_string(j) + " is not well-typed"});
    }
  }
  if (g.lexicon.empty())
    out.push_back({GrammarIssue::Error, "lexicon", "lexicon is empty"});
  for (const auto& [word, cats] : g.lexicon) {
    std::string locus = "word " + word;
    if (cats.empty())
      out.push_back({GrammarIssue::Error, locus, "no category"});
    for (const Fs& c : cats) {
      if (!well_typed(g.hier, c))
        out.push_back(
            {GrammarIssue::Error, locus, "category is not well-typed"});
      // The parser assumes lexical categories never head phrasal rules; a
      // category unifiable with some head can complete rules invisibly to
      // the derivation order and deserves a warning.
      for (const Rule& r : g.rules) {
        if (r.len() < 2) continue;
        Fs head = project(g.hier, r.amrs, r.len());
        if (unify(g.hier, c, head))
          out.push_back({GrammarIssue::Warning, locus,
                         "category unifies with the head of rule " + r.id});
      }
    }
  }
  if (!well_typed(g.hier, g.start))
    out.push_back({GrammarIssue::Error, "start", "start structure is not well-typed"});
  return out;
}

} // namespace tfs
