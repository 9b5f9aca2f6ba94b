// Command-line front end: loads a textual grammar and checks it, parses
// sentences (optionally dumping the chart or the derivation), or compares
// the parser against the bounded derivation oracle.
//
// Exit codes: 0 accept / no errors, 1 reject / validation errors, 2 guard
// tripped, 3 unknown word, 4 grammar failed to load.  Batch runs exit with
// the worst severity seen.  oracle-compare exits 0 iff no row disagrees.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "tfs/chart.hpp"
#include "tfs/format.hpp"
#include "tfs/grammar.hpp"

namespace {

bool color_enabled() {
  const char* v = std::getenv("TFS_COLOR");
  return v && std::string(v) == "1";
}

std::vector<std::string> split_words(const std::string& line) {
  std::istringstream in(line);
  std::vector<std::string> words;
  std::string w;
  while (in >> w) words.push_back(w);
  return words;
}

// Sentences come from argv, or from stdin one per line when none are given.
std::vector<std::vector<std::string>> gather_sentences(
    const std::vector<std::string>& args) {
  std::vector<std::vector<std::string>> out;
  if (!args.empty()) {
    for (const auto& a : args) out.push_back(split_words(a));
    return out;
  }
  std::string line;
  while (std::getline(std::cin, line)) out.push_back(split_words(line));
  return out;
}

void print_diagnostics(const std::vector<tfs::Diagnostic>& diags) {
  bool color = color_enabled();
  for (const auto& d : diags)
    std::cerr << tfs::format_diagnostic(d, color) << "\n";
}

std::optional<tfs::Grammar> load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    std::cerr << "error: cannot open grammar file: " << path << "\n";
    return std::nullopt;
  }
  std::stringstream buf;
  buf << in.rdbuf();
  auto result = tfs::load_grammar(buf.str());
  print_diagnostics(result.diagnostics);
  if (!result) return std::nullopt;
  return std::move(result.grammar);
}

struct ParseFlags {
  bool dump_chart = false;
  bool derivation = false;
  bool quotient = false; // print the quotient report after the dump
};

// Runs one sentence and prints its record; returns the exit severity.
int parse_one(const tfs::Grammar& g, const std::vector<std::string>& words,
              tfs::Guards guards, const ParseFlags& flags) {
  auto outcome = tfs::run(g, words, guards);
  if (auto* uw = std::get_if<tfs::UnknownWord>(&outcome)) {
    std::cout << "unknown-word " << uw->word << "\n";
    return 3;
  }
  auto& res = std::get<tfs::ParseResult>(outcome);
  if (flags.dump_chart) {
    std::cout << tfs::chart_dump(g, res);
    if (flags.quotient) {
      auto rep = tfs::quotient_report(g, res.chart, guards.quotient_depth);
      for (const auto& b : rep.buckets)
        std::cout << "QUOTIENT bucket i=" << b.i << " j=" << b.j
                  << " rule=" << b.rule_id << " dot=" << b.dot
                  << " pairs=" << b.incomparable_pairs << "\n";
      std::cout << "QUOTIENT total=" << rep.total_pairs() << "\n";
    }
  } else if (flags.derivation) {
    if (res.status == tfs::ParseResult::Accept) {
      auto steps = tfs::extract_derivation(g, res.chart, res.accepting[0]);
      std::cout << tfs::derivation_dump(g, steps);
    } else if (res.status == tfs::ParseResult::Guard) {
      std::cout << "guard\n";
    } else {
      std::cout << "reject\n";
    }
  } else {
    switch (res.status) {
      case tfs::ParseResult::Accept: std::cout << "accept\n"; break;
      case tfs::ParseResult::Reject: std::cout << "reject\n"; break;
      case tfs::ParseResult::Guard: std::cout << "guard\n"; break;
    }
  }
  switch (res.status) {
    case tfs::ParseResult::Accept: return 0;
    case tfs::ParseResult::Reject: return 1;
    case tfs::ParseResult::Guard: return 2;
  }
  return 1;
}

int cmd_check(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    std::cerr << "error: cannot open grammar file: " << path << "\n";
    return 1;
  }
  std::stringstream buf;
  buf << in.rdbuf();
  auto result = tfs::load_grammar(buf.str());
  print_diagnostics(result.diagnostics);
  if (!result) return 1;
  auto issues = tfs::validate_grammar(*result.grammar);
  bool errors = false;
  bool color = color_enabled();
  for (const auto& gi : issues) {
    bool err = gi.severity == tfs::GrammarIssue::Error;
    errors |= err;
    const char* tag = err ? "error" : "warning";
    if (color)
      std::cerr << (err ? "\x1b[31m" : "\x1b[33m") << tag << "\x1b[0m";
    else
      std::cerr << tag;
    std::cerr << ": " << gi.message;
    if (!gi.locus.empty()) std::cerr << " (" << gi.locus << ")";
    std::cerr << "\n";
  }
  return errors ? 1 : 0;
}

const char* verdict_name(const tfs::ParseResult& res) {
  switch (res.status) {
    case tfs::ParseResult::Accept: return "accept";
    case tfs::ParseResult::Reject: return "reject";
    case tfs::ParseResult::Guard: return "guard";
  }
  return "reject";
}

int cmd_oracle_compare(const tfs::Grammar& g,
                       const std::vector<std::vector<std::string>>& sentences,
                       tfs::Guards guards, std::size_t budget) {
  bool disagreed = false;
  for (const auto& words : sentences) {
    std::string text;
    for (std::size_t t = 0; t < words.size(); ++t) {
      if (t) text += ' ';
      text += words[t];
    }
    if (words.empty()) {
      std::cout << "\tparser=reject\toracle=no\tagree\n";
      continue;
    }
    auto oracle = tfs::in_language(g, words, budget);
    if (std::holds_alternative<tfs::UnknownWord>(oracle)) {
      std::cout << text << "\tparser=unknown-word\toracle=unknown-word\tagree\n";
      continue;
    }
    auto parser = tfs::run(g, words, guards);
    auto& res = std::get<tfs::ParseResult>(parser);
    auto& lang = std::get<tfs::LanguageOutcome>(oracle);
    const char* pv = verdict_name(res);
    const char* ov = "no";
    if (lang.verdict == tfs::LanguageOutcome::Yes) ov = "yes";
    if (lang.verdict == tfs::LanguageOutcome::BudgetExceeded)
      ov = "budget-exceeded";
    // Rows count as comparisons only when both engines are conclusive.
    const char* flag;
    if (lang.verdict == tfs::LanguageOutcome::BudgetExceeded ||
        res.status == tfs::ParseResult::Guard) {
      flag = "inconclusive";
    } else {
      bool p_yes = res.status == tfs::ParseResult::Accept;
      bool o_yes = lang.verdict == tfs::LanguageOutcome::Yes;
      flag = (p_yes == o_yes) ? "agree" : "disagree";
      if (p_yes != o_yes) disagreed = true;
    }
    std::cout << text << "\tparser=" << pv << "\toracle=" << ov << "\t" << flag
              << "\n";
  }
  return disagreed ? 1 : 0;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"typed-feature-structure grammar tool"};
  app.require_subcommand(1);

  std::string grammar_path;
  std::vector<std::string> sentence_args;
  tfs::Guards guards;
  std::size_t oracle_budget = 10;
  ParseFlags flags;

  auto add_common = [&](CLI::App* sub, bool with_sentences) {
    sub->add_option("grammar", grammar_path, "grammar file")->required();
    if (with_sentences)
      sub->add_option("sentences", sentence_args,
                      "sentences (default: stdin, one per line)");
    sub->add_option("--max-transitions", guards.max_transitions,
                    "transition guard");
    sub->add_option("--max-items", guards.max_items, "chart size guard");
    return sub;
  };

  auto* check = app.add_subcommand("check", "load and validate a grammar");
  check->add_option("grammar", grammar_path, "grammar file")->required();

  auto* parse = add_common(
      app.add_subcommand("parse", "parse sentences against a grammar"), true);
  parse->add_flag("--dump-chart", flags.dump_chart, "emit the full chart");
  parse->add_flag("--derivation", flags.derivation,
                  "emit the leftmost derivation on accept");
  auto* qd = parse->add_option("--quotient-depth", guards.quotient_depth,
                               "also report path-quotient collisions");

  auto* chart = add_common(
      app.add_subcommand("chart", "parse and dump the chart"), true);
  auto* qd2 = chart->add_option("--quotient-depth", guards.quotient_depth,
                                "also report path-quotient collisions");

  auto* derive = add_common(
      app.add_subcommand("derive", "parse and emit the derivation"), true);

  auto* compare = add_common(
      app.add_subcommand("oracle-compare",
                         "compare parser and derivation oracle"),
      true);
  compare->add_option("--oracle-budget", oracle_budget,
                      "derivation step budget");

  CLI11_PARSE(app, argc, argv);

  if (check->parsed()) return cmd_check(grammar_path);

  auto g = load_file(grammar_path);
  if (!g) return 4;

  auto sentences = gather_sentences(sentence_args);

  if (compare->parsed())
    return cmd_oracle_compare(*g, sentences, guards, oracle_budget);

  if (chart->parsed()) flags.dump_chart = true;
  if (derive->parsed()) flags.derivation = true;
  flags.quotient = qd->count() > 0 || qd2->count() > 0;

  int worst = 0;
  for (const auto& words : sentences)
    worst = std::max(worst, parse_one(*g, words, guards, flags));
  return worst;
}
