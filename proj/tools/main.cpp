// sessiontypo: session features, annotation agreement and behaviour typology.
//
// Exit status: 0 success, 1 domain error, 2 usage error.

#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "sessiontypo/commands.hpp"

namespace {

using sessiontypo::commands::RunConfig;

std::optional<int> parse_components(const std::string& value) {
  if (value == "all") return std::nullopt;
  std::size_t used = 0;
  int n = 0;
  try {
    n = std::stoi(value, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != value.size())
    throw CLI::ValidationError("--components", "expected 'all' or a positive integer, got '" + value + "'");
  return n;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Search-session behaviour features, annotation agreement and typology"};
  app.require_subcommand(1);
  RunConfig cfg;
  std::string components = "all";
  std::uint64_t seed = 0;
  int count = 0;
  std::vector<std::string> annotations;

  auto add_scheme = [&](CLI::App* sub) { sub->add_option("--scheme", cfg.scheme, "Proposition scheme (scheme.json)")->required(); };
  auto add_out = [&](CLI::App* sub, const char* what, bool required = true) {
    auto* opt = sub->add_option("--out", cfg.out, what);
    if (required) opt->required();
  };

  auto* features = app.add_subcommand("features", "Compute the eight session variables");
  add_scheme(features);
  features->add_option("--sessions", cfg.sessions, "sessions.jsonl")->required();
  features->add_option("--annotations", annotations, "annotations.csv")->required()->expected(1);
  features->add_option("--include-autre-in-flags", cfg.include_autre_in_flags,
                       "Let PAutre take part in persistence/intermittence detection")
      ->default_val(true);
  add_out(features, "features.csv to write");

  auto* kappa = app.add_subcommand("kappa", "Cohen's kappa between two annotation files");
  add_scheme(kappa);
  kappa->add_option("--annotations", annotations, "Two annotations.csv files")->required()->expected(2);
  add_out(kappa, "Agreement JSON to write", false);

  auto* analyze = app.add_subcommand("analyze", "Standardize, PCA, Ward clustering and profiles");
  analyze->add_option("--features", cfg.features, "features.csv")->required();
  analyze->add_option("--k", cfg.k, "Number of clusters")->default_val(5)->check(CLI::PositiveNumber);
  analyze->add_option("--components", components, "Principal components used for clustering ('all' or n)")
      ->default_val("all");
  analyze->add_option("--level", cfg.level, "Ellipse probability level")->default_val(0.95)->check(CLI::Range(0.0, 1.0));
  add_out(analyze, "report.json to write");

  auto* plot = app.add_subcommand("plot", "SVG of the first principal plane");
  plot->add_option("--report", cfg.report, "report.json")->required();
  add_out(plot, "plot.svg to write");

  auto* generate = app.add_subcommand("generate", "Seeded synthetic corpus");
  add_scheme(generate);
  generate->add_option("--spec", cfg.spec, "Archetype spec file");
  generate->add_flag("--default-archetypes", cfg.default_archetypes, "Use the five bundled archetypes");
  generate->add_option("--count", count, "Sessions per archetype");
  generate->add_option("--seed", seed, "Random seed")->required();
  add_out(generate, "Output directory");

  auto* autolabel = app.add_subcommand("autolabel", "Lexical proposition annotation");
  add_scheme(autolabel);
  autolabel->add_option("--sessions", cfg.sessions, "sessions.jsonl")->required();
  autolabel->add_option("--fuzzy-distance", cfg.fuzzy_distance, "Max edit distance for long lexicon words")
      ->default_val(1);
  autolabel->add_option("--stopwords", cfg.stopwords, "Stopword file (whitespace separated)");
  add_out(autolabel, "annotations.csv to write");

  auto* stats = app.add_subcommand("stats", "Descriptive statistics of features.csv");
  stats->add_option("--features", cfg.features, "features.csv")->required();
  add_out(stats, "Statistics JSON to write", false);

  try {
    app.parse(argc, argv);
    cfg.components = parse_components(components);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }
  for (const auto& a : annotations) cfg.annotations.emplace_back(a);
  if (generate->parsed()) {
    cfg.seed = seed;
    if (generate->count("--count")) cfg.count = count;
  }

  namespace cmd = sessiontypo::commands;
  try {
    if (features->parsed()) cmd::cmd_features(cfg, std::cerr);
    if (kappa->parsed()) cmd::cmd_kappa(cfg, std::cout);
    if (analyze->parsed()) cmd::cmd_analyze(cfg);
    if (plot->parsed()) cmd::cmd_plot(cfg, std::cerr);
    if (generate->parsed()) cmd::cmd_generate(cfg);
    if (autolabel->parsed()) cmd::cmd_autolabel(cfg);
    if (stats->parsed()) cmd::cmd_stats(cfg, std::cout);
  } catch (const sessiontypo::Error& e) {
    std::cerr << "error: " << sessiontypo::to_string(e.code()) << ": " << e.what() << "\n";
    return 1;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: IoError: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
