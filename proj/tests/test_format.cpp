// Textual format: lexer and parser diagnostics, grammar file section
// handling, rendering conventions, and the render/parse round-trip.

#include <catch2/catch_amalgamated.hpp>

#include "support/test_util.hpp"
#include "tfs/chart.hpp"
#include "tfs/format.hpp"

using namespace tfs;
using tfs_test::amrs_of;
using tfs_test::demo_grammar;
using tfs_test::fs_of;
using tfs_test::growing_grammar;
using tfs_test::read_file;
using tfs_test::roundtrips;
using tfs_test::source_path;

namespace {

bool any_message(const std::vector<Diagnostic>& ds, const std::string& needle,
                 int line = -1, int col = -1) {
  for (const auto& d : ds) {
    if (d.message.find(needle) == std::string::npos) continue;
    if (line >= 0 && d.line != line) continue;
    if (col >= 0 && d.col != col) continue;
    return true;
  }
  return false;
}

std::vector<Diagnostic> load_failure(const std::string& text) {
  auto res = load_grammar(text);
  REQUIRE(!res);
  REQUIRE(has_errors(res.diagnostics));
  return res.diagnostics;
}

} // namespace

TEST_CASE("lexer reports positions for malformed input") {
  const auto& h = demo_grammar().hier;

  auto bad_char = parse_avm_text(h, "[phrase @");
  REQUIRE(!bad_char);
  REQUIRE(any_message(bad_char.diagnostics, "unexpected character '@'", 1, 9));

  auto bare_hash = parse_avm_text(h, "[phrase SUBJ:# ]");
  REQUIRE(!bare_hash);
  REQUIRE(any_message(bare_hash.diagnostics, "'#' needs a tag number", 1, 14));

  auto bare_dash = parse_avm_text(h, "- [phrase]");
  REQUIRE(!bare_dash);
  REQUIRE(any_message(bare_dash.diagnostics, "stray '-'", 1, 1));

  auto bare_percent = parse_avm_text(h, "% [phrase]");
  REQUIRE(!bare_percent);
  REQUIRE(any_message(bare_percent.diagnostics, "stray '%'", 1, 1));

  // Positions track newlines.
  auto second_line = parse_avm_text(h, "[phrase\n  SUBJ:&]");
  REQUIRE(any_message(second_line.diagnostics, "unexpected character '&'", 2, 8));

  // %% comments are skipped entirely.
  auto commented = parse_avm_text(h, "%% nothing to see\n[phrase]");
  REQUIRE(commented);
}

TEST_CASE("tag discipline: one binding per tag, references must resolve") {
  const auto& h = demo_grammar().hier;

  auto shared = parse_avm_text(h, "#1=[head AGR:[agr]] , #1");
  REQUIRE(shared);
  REQUIRE(shared.value->len() == 2);
  REQUIRE(shared.value->roots[0] == shared.value->roots[1]);

  auto twice = parse_avm_text(h, "#1=[head] , #1=[agr]");
  REQUIRE(!twice);
  REQUIRE(any_message(twice.diagnostics, "tag #1 is bound more than once"));

  auto unbound = parse_avm_text(h, "[phrase SUBJ:#2]");
  REQUIRE(!unbound);
  REQUIRE(any_message(unbound.diagnostics, "tag #2 is never bound"));
}

TEST_CASE("AVM parsing rejects unknown names and repeated features") {
  const auto& h = demo_grammar().hier;

  auto bad_type = parse_avm_text(h, "[zzz]");
  REQUIRE(!bad_type);
  REQUIRE(any_message(bad_type.diagnostics, "unknown type 'zzz'"));

  auto bad_feat = parse_avm_text(h, "[phrase ZZZ:[head]]");
  REQUIRE(!bad_feat);
  REQUIRE(any_message(bad_feat.diagnostics, "unknown feature 'ZZZ'", 1, 9));

  auto dup_feat = parse_avm_text(h, "[phrase SUBJ:[head] SUBJ:[head]]");
  REQUIRE(!dup_feat);
  REQUIRE(any_message(dup_feat.diagnostics, "feature 'SUBJ' given twice"));
}

TEST_CASE("AVM syntax errors mention what was expected and what was found") {
  const auto& h = demo_grammar().hier;

  auto unclosed = parse_avm_text(h, "[phrase");
  REQUIRE(any_message(unclosed.diagnostics,
                      "expected a feature name or ']' but found end of input"));

  auto untyped = parse_avm_text(h, "[]");
  REQUIRE(any_message(untyped.diagnostics, "expected a type name"));

  auto no_colon = parse_avm_text(h, "[phrase SUBJ [head]]");
  REQUIRE(any_message(no_colon.diagnostics,
                      "expected ':' after feature name but found '['"));

  auto empty = parse_avm_text(h, "");
  REQUIRE(any_message(empty.diagnostics, "expected an AVM but found end of input"));

  auto trailing = parse_avm_text(h, "[phrase] extra");
  REQUIRE(any_message(trailing.diagnostics,
                      "expected ',' or end of input but found 'extra'"));
}

TEST_CASE("grammar files: section errors") {
  auto unknown = load_failure("%types\na sub bot .\n%start\n[a] .\n%rules\n"
                              "r1 : [a] , [a] => [a] .\n%lexicon\nw : [a] .\n"
                              "%foo\n");
  REQUIRE(any_message(unknown, "unknown section '%foo'", 9, 1));

  auto dup = load_failure("%types\na sub bot .\n%types\nb sub a .\n%start\n"
                          "[a] .\n%rules\nr1 : [a] , [a] => [a] .\n"
                          "%lexicon\nw : [a] .\n");
  REQUIRE(any_message(dup, "section '%types' appears twice", 3, 1));

  auto missing = load_failure("%types\na sub bot .\n%start\n[a] .\n%rules\n"
                              "r1 : [a] , [a] => [a] .\n");
  REQUIRE(any_message(missing, "missing section '%lexicon'"));

  auto outside = load_failure("a sub bot .\n%types\na sub bot .\n%start\n"
                              "[a] .\n%rules\nr1 : [a] , [a] => [a] .\n"
                              "%lexicon\nw : [a] .\n");
  REQUIRE(any_message(outside, "statement outside any section", 1, 1));

  auto no_dot = load_failure("%types\na sub bot .\n%start\n[a] .\n%rules\n"
                             "r1 : [a] , [a] => [a] .\n%lexicon\nw : [a]\n");
  REQUIRE(any_message(no_dot, "statement is missing its closing '.'", 8, 1));

  // %approp is the one optional section.
  auto minimal = load_grammar("%types\na sub bot .\n%start\n[a] .\n%rules\n"
                              "r1 : [a] , [a] => [a] .\n%lexicon\nw : [a] .\n");
  REQUIRE(minimal);
  REQUIRE(minimal.grammar->hier.feature_count() == 0);
}

TEST_CASE("grammar files: type declaration errors") {
  auto dup = load_failure("%types\na sub bot .\na sub bot .\n%start\n[a] .\n"
                          "%rules\nr1 : [a] , [a] => [a] .\n%lexicon\n"
                          "w : [a] .\n");
  REQUIRE(any_message(dup, "type 'a' declared twice", 3, 1));

  auto ghost = load_failure("%types\nb sub q .\n%start\n[b] .\n%rules\n"
                            "r1 : [b] , [b] => [b] .\n%lexicon\nw : [b] .\n");
  REQUIRE(any_message(ghost, "type 'q' is used as a parent but never declared"));

  auto orphan = load_failure("%types\na sub .\n%start\n[a] .\n%rules\n"
                             "r1 : [a] , [a] => [a] .\n%lexicon\nw : [a] .\n");
  REQUIRE(any_message(orphan, "expected at least one parent type"));

  auto bc = load_grammar(read_file(source_path("tests/data/notbounded.tfs")));
  REQUIRE(!bc);
  REQUIRE(any_message(bc.diagnostics,
                      "types 'a' and 'b' have upper bounds but no least one"));
}

TEST_CASE("grammar files: start and rule statement errors") {
  auto multi = load_failure("%types\na sub bot .\n%start\n[a] , [a] .\n"
                            "%rules\nr1 : [a] , [a] => [a] .\n%lexicon\n"
                            "w : [a] .\n");
  REQUIRE(any_message(multi, "start must be a single structure"));

  auto twice = load_failure("%types\na sub bot .\n%start\n[a] .\n[a] .\n"
                            "%rules\nr1 : [a] , [a] => [a] .\n%lexicon\n"
                            "w : [a] .\n");
  REQUIRE(any_message(twice, "start declared twice"));

  auto none = load_failure("%types\na sub bot .\n%start\n%rules\n"
                           "r1 : [a] , [a] => [a] .\n%lexicon\nw : [a] .\n");
  REQUIRE(any_message(none, "section '%start' declares no structure"));

  auto dup_rule = load_failure("%types\na sub bot .\n%start\n[a] .\n%rules\n"
                               "r1 : [a] , [a] => [a] .\n"
                               "r1 : [a] , [a] => [a] .\n%lexicon\n"
                               "w : [a] .\n");
  REQUIRE(any_message(dup_rule, "rule id 'r1' already used", 7, 1));

  auto no_head = load_failure("%types\na sub bot .\n%start\n[a] .\n%rules\n"
                              "r1 : [a] , [a] .\n%lexicon\nw : [a] .\n");
  REQUIRE(any_message(no_head, "expected '=>' but found '.'"));

  auto fat_entry = load_failure("%types\na sub bot .\n%start\n[a] .\n%rules\n"
                                "r1 : [a] , [a] => [a] .\n%lexicon\n"
                                "w : [a] , [a] .\n");
  REQUIRE(any_message(fat_entry, "a lexical entry is a single structure"));

  auto no_colon = load_failure("%types\na sub bot .\n%start\n[a] .\n%rules\n"
                               "r1 : [a] , [a] => [a] .\n%lexicon\n"
                               "w [a] .\n");
  REQUIRE(any_message(no_colon, "expected ':' after the word but found '['"));
}

TEST_CASE("rendering: tags appear exactly on shared nodes") {
  const auto& g = demo_grammar();

  REQUIRE(render(g.hier, bottom_fs()) == "[bot]");

  // No sharing, no tags.
  REQUIRE(render(g.hier, *g.categories("John")->begin()) ==
          "[word SYN:[pn] HEAD:[head AGR:[agr PERS:[3rd] NUM:[sg]]] CASE:[case]]");
  REQUIRE(render(g.hier,
                 fs_of(g.hier, "[phrase SUBJ:[head] HEAD:[head]]")) ==
          "[phrase SUBJ:[head] HEAD:[head]]");

  // Shared nodes get tags in first-visit order.
  REQUIRE(render(g.hier, g.rule_by_id("r2")->amrs) ==
          "[word SYN:[pn] HEAD:#1=[head] CASE:#2=[case]], "
          "[phrase SYN:[n] HEAD:#1 CASE:#2]");

  // A cycle renders as a tag reference back into its own body.
  Amrs loop = amrs_of(g.hier, "#1=[phrase SUBJ:#1]");
  REQUIRE(render(g.hier, loop) == "#1=[phrase SUBJ:#1]");
}

TEST_CASE("render and parse are mutually inverse") {
  const auto& g = demo_grammar();
  const auto& gg = growing_grammar();

  for (const Rule& r : g.rules) REQUIRE(roundtrips(g.hier, r.amrs));
  for (const Rule& r : gg.rules) REQUIRE(roundtrips(gg.hier, r.amrs));
  for (const auto& [w, cats] : g.lexicon)
    for (const Fs& c : cats) REQUIRE(roundtrips(g.hier, c));
  REQUIRE(roundtrips(g.hier, g.start));
  REQUIRE(roundtrips(gg.hier, gg.start));

  // Every item a parse run produces round-trips too.
  auto out = run(g, {"John", "loves", "fish"});
  const auto& res = std::get<ParseResult>(out);
  for (const Item& it : res.chart.items())
    REQUIRE(roundtrips(g.hier, it.amrs));

  // Rendering normalizes: render(parse(render(parse(x)))) changes nothing.
  Amrs messy = amrs_of(g.hier, "  [ word SYN : [ pn ] ]  ");
  std::string once = render(g.hier, messy);
  REQUIRE(once == "[word SYN:[pn]]");
  REQUIRE(render(g.hier, amrs_of(g.hier, once)) == once);
}

TEST_CASE("parse_fs_text insists on a single element") {
  const auto& h = demo_grammar().hier;
  auto one = parse_fs_text(h, "[head AGR:[agr]]");
  REQUIRE(one);
  REQUIRE(h.type_name(one->nodes[0].type) == "head");
  REQUIRE(!parse_fs_text(h, "[head] , [head]"));
  REQUIRE(!parse_fs_text(h, "[nonsense]"));
}

TEST_CASE("shipped grammars load with the expected shape") {
  const auto& g = demo_grammar();
  REQUIRE(g.rules.size() == 3);
  REQUIRE(g.lexicon.size() == 3);
  REQUIRE(render(g.hier, g.start) == "[phrase SYN:[s]]");

  const auto& gg = growing_grammar();
  REQUIRE(gg.rules.size() == 1);
  REQUIRE(gg.lexicon.size() == 1);
  REQUIRE(render(gg.hier, gg.start) == "[a]");

  // Loads cleanly; its lexical-head overlap is a validation warning, not a
  // format problem.
  auto warn = load_grammar(read_file(source_path("tests/data/warnhead.tfs")));
  REQUIRE(warn);
  REQUIRE(!has_errors(warn.diagnostics));
}

TEST_CASE("diagnostic formatting") {
  Diagnostic err{Diagnostic::Error, 3, 7, "boom"};
  REQUIRE(format_diagnostic(err, false) == "error: boom (line 3, col 7)");

  Diagnostic bare{Diagnostic::Error, 0, 0, "boom"};
  REQUIRE(format_diagnostic(bare, false) == "error: boom");

  Diagnostic warn{Diagnostic::Warning, 1, 2, "hmm"};
  REQUIRE(format_diagnostic(warn, false) == "warning: hmm (line 1, col 2)");

  std::string colored = format_diagnostic(err, true);
  REQUIRE(colored.find("\x1b[31m") != std::string::npos);
  REQUIRE(colored.find("error") != std::string::npos);
  REQUIRE(format_diagnostic(warn, true).find("\x1b[33m") != std::string::npos);
}
