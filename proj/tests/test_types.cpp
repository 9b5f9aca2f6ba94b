// Type hierarchy: order axioms, joins, bounded completeness,
// appropriateness inheritance and its validation diagnostics.

#include <catch2/catch_amalgamated.hpp>

#include "support/generators.hpp"
#include "support/test_util.hpp"
#include "tfs/types.hpp"

using namespace tfs;
using tfs_test::demo_grammar;

namespace {

TypeId tid(const TypeHierarchy& h, const std::string& name) {
  auto t = h.find_type(name);
  REQUIRE(t.has_value());
  return *t;
}

FeatId fid(const TypeHierarchy& h, const std::string& name) {
  auto f = h.find_feature(name);
  REQUIRE(f.has_value());
  return *f;
}

} // namespace

TEST_CASE("minimal hierarchy: just the least type") {
  TypeHierarchy h;
  REQUIRE(h.validate().empty());
  REQUIRE(h.type_count() == 1);
  REQUIRE(h.leq(kBot, kBot));
  REQUIRE(h.join(kBot, kBot) == kBot);
}

TEST_CASE("add_type is idempotent") {
  TypeHierarchy h;
  TypeId a = h.add_type("a");
  REQUIRE(h.add_type("a") == a);
  REQUIRE(h.type_count() == 2);
}

TEST_CASE("demo hierarchy validates and orders as declared") {
  const TypeHierarchy& h = demo_grammar().hier;
  TypeId caset = tid(h, "case"), nom = tid(h, "nom"), acc = tid(h, "acc");
  TypeId phrase = tid(h, "phrase"), word = tid(h, "word");

  REQUIRE(h.leq(kBot, nom));
  REQUIRE(h.leq(caset, nom));
  REQUIRE(!h.leq(nom, caset));
  REQUIRE(!h.leq(nom, acc));
  REQUIRE(!h.leq(phrase, word));

  SECTION("pinned joins") {
    REQUIRE(h.join(caset, nom) == nom);
    REQUIRE(h.join(nom, caset) == nom);
    REQUIRE(!h.join(nom, acc).has_value());
    REQUIRE(!h.join(phrase, word).has_value());
    REQUIRE(h.join(kBot, phrase) == phrase);
    REQUIRE(h.join(nom, nom) == nom);
  }

  SECTION("pinned appropriateness") {
    TypeId head = tid(h, "head"), agr = tid(h, "agr");
    REQUIRE(h.approp(fid(h, "AGR"), head) == agr);
    REQUIRE(!h.approp(fid(h, "AGR"), caset).has_value());
    for (FeatId f = 0; f < h.feature_count(); ++f)
      REQUIRE(!h.approp(f, kBot).has_value());
    // Inherited downward: nelist takes 1ST/RST, elist takes neither.
    TypeId nelist = tid(h, "nelist"), elist = tid(h, "elist");
    REQUIRE(h.approp(fid(h, "1ST"), nelist) == phrase);
    REQUIRE(h.approp(fid(h, "RST"), nelist) == tid(h, "list"));
    REQUIRE(!h.approp(fid(h, "1ST"), elist).has_value());
  }

  SECTION("feature order follows declaration order") {
    REQUIRE(fid(h, "SYN") < fid(h, "SUBJ"));
    REQUIRE(fid(h, "SUBJ") < fid(h, "HEAD"));
    REQUIRE(fid(h, "HEAD") < fid(h, "AGR"));
    REQUIRE(fid(h, "1ST") < fid(h, "RST"));
  }
}

TEST_CASE("order axioms and join laws hold over whole hierarchies") {
  auto check = [](const TypeHierarchy& h) {
    std::size_t n = h.type_count();
    for (TypeId a = 0; a < n; ++a) {
      REQUIRE(h.leq(kBot, a));
      REQUIRE(h.leq(a, a));
      for (TypeId b = 0; b < n; ++b) {
        if (h.leq(a, b) && h.leq(b, a)) REQUIRE(a == b);
        REQUIRE(h.join(a, b) == h.join(b, a));
        for (TypeId c = 0; c < n; ++c) {
          if (h.leq(a, b) && h.leq(b, c)) REQUIRE(h.leq(a, c));
          // Associativity with failure absorbing.
          auto ab = h.join(a, b);
          auto bc = h.join(b, c);
          auto left = ab ? h.join(*ab, c) : std::optional<TypeId>{};
          auto right = bc ? h.join(a, *bc) : std::optional<TypeId>{};
          REQUIRE(left == right);
        }
        // Join really is the least upper bound.
        if (auto u = h.join(a, b)) {
          REQUIRE(h.leq(a, *u));
          REQUIRE(h.leq(b, *u));
          for (TypeId v = 0; v < n; ++v)
            if (h.leq(a, v) && h.leq(b, v)) REQUIRE(h.leq(*u, v));
        } else {
          for (TypeId v = 0; v < n; ++v)
            REQUIRE(!(h.leq(a, v) && h.leq(b, v)));
        }
      }
    }
  };
  check(demo_grammar().hier);
  for (std::uint32_t seed = 0; seed < 10; ++seed) {
    tfs_test::Rng rng(1000 + seed);
    TypeHierarchy h = tfs_test::random_hierarchy(rng, 9, 3);
    check(h);
  }
}

TEST_CASE("bounded completeness violation names the offending pair") {
  TypeHierarchy h;
  TypeId a = h.add_type("a"), b = h.add_type("b");
  TypeId c = h.add_type("c"), d = h.add_type("d");
  h.declare_subtype(a, kBot);
  h.declare_subtype(b, kBot);
  h.declare_subtype(c, a);
  h.declare_subtype(c, b);
  h.declare_subtype(d, a);
  h.declare_subtype(d, b);
  auto issues = h.validate();
  REQUIRE(!issues.empty());
  bool found = false;
  for (const auto& iss : issues) {
    if (iss.kind != HierarchyIssue::NotBoundedComplete) continue;
    found = true;
    // The incomparable pair with two minimal upper bounds is (a, b).
    REQUIRE(((iss.a == a && iss.b == b) || (iss.a == b && iss.b == a)));
    REQUIRE(iss.message.find("a") != std::string::npos);
    REQUIRE(iss.message.find("b") != std::string::npos);
  }
  REQUIRE(found);
}

TEST_CASE("subtype cycles are rejected") {
  TypeHierarchy h;
  TypeId a = h.add_type("a"), b = h.add_type("b");
  h.declare_subtype(a, b);
  h.declare_subtype(b, a);
  auto issues = h.validate();
  REQUIRE(!issues.empty());
  REQUIRE(issues[0].kind == HierarchyIssue::CycleInOrder);
  REQUIRE(issues[0].message.find("a") != std::string::npos);
  REQUIRE(issues[0].message.find("b") != std::string::npos);
}

TEST_CASE("appropriateness must be monotone under overrides") {
  TypeHierarchy h;
  TypeId a = h.add_type("a"), sub = h.add_type("suba");
  TypeId x = h.add_type("x"), y = h.add_type("y");
  h.declare_subtype(a, kBot);
  h.declare_subtype(sub, a);
  h.declare_subtype(x, kBot);
  h.declare_subtype(y, kBot);
  FeatId f = h.add_feature("F");
  h.declare_approp(f, a, x);
  h.declare_approp(f, sub, y); // y is not above x
  auto issues = h.validate();
  REQUIRE(issues.size() == 1);
  REQUIRE(issues[0].kind == HierarchyIssue::ApproprietyNotMonotone);
}

TEST_CASE("monotone overrides are accepted and inherited") {
  TypeHierarchy h;
  TypeId a = h.add_type("a"), sub = h.add_type("suba");
  TypeId x = h.add_type("x"), x2 = h.add_type("x2");
  h.declare_subtype(a, kBot);
  h.declare_subtype(sub, a);
  h.declare_subtype(x, kBot);
  h.declare_subtype(x2, x);
  FeatId f = h.add_feature("F");
  h.declare_approp(f, a, x);
  h.declare_approp(f, sub, x2);
  REQUIRE(h.validate().empty());
  REQUIRE(h.approp(f, a) == x);
  REQUIRE(h.approp(f, sub) == x2);
}

TEST_CASE("features on the least type are rejected") {
  TypeHierarchy h;
  TypeId t = h.add_type("t");
  h.declare_subtype(t, kBot);
  FeatId f = h.add_feature("F");
  h.declare_approp(f, kBot, t);
  auto issues = h.validate();
  REQUIRE(issues.size() == 1);
  REQUIRE(issues[0].kind == HierarchyIssue::FeatureOnBot);
}

TEST_CASE("approp_features lists features in feature order") {
  const TypeHierarchy& h = demo_grammar().hier;
  TypeId word = tid(h, "word");
  const auto& feats = h.approp_features(word);
  REQUIRE(feats.size() == 4); // SYN, HEAD, CASE, SBCT
  REQUIRE(feats[0].first == fid(h, "SYN"));
  REQUIRE(feats[1].first == fid(h, "HEAD"));
  REQUIRE(feats[2].first == fid(h, "CASE"));
  REQUIRE(feats[3].first == fid(h, "SBCT"));
  for (std::size_t i = 1; i < feats.size(); ++i)
    REQUIRE(feats[i - 1].first < feats[i].first);
}
