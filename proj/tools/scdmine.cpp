// Batch front end: one subcommand per invocation, driven by a key = value config file.
//
//   scdmine <synth|ingest|regularity|extreme|cluster|classify|transitions|report>
//           [--config PATH] [--out DIR] [--seed N] [--epsilon F] [--window N] [--k F]
//           [--set key=value ...]

#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "scd/error.hpp"
#include "scd/pipeline.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Temporal travel-pattern mining for smart-card transaction logs"};
  app.require_subcommand(1, 1);

  std::string config_path, out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<double> epsilon, k;
  std::optional<int> window;
  std::vector<std::string> settings;

  const std::map<std::string_view, std::string> about = {
      {"synth", "Generate labelled synthetic records for both periods"},
      {"ingest", "Parse records and build weekly profiles"},
      {"regularity", "Score regularity and stability per card"},
      {"extreme", "Label extreme travelers"},
      {"cluster", "Learn centroids from a sample of the early period"},
      {"classify", "Assign every non-extreme profile to a centroid"},
      {"transitions", "Build transition matrices between the periods"},
      {"report", "Summarise cluster statistics and transition rates"}};
  for (auto name : scd::kSubcommands) {
    auto* sub = app.add_subcommand(std::string(name), about.at(name));
    sub->add_option("--config", config_path, "Pipeline config file");
    sub->add_option("--out", out_dir, "Output directory");
    sub->add_option("--seed", seed, "Random seed");
    sub->add_option("--epsilon", epsilon, "Neighbourhood radius");
    sub->add_option("--window", window, "Smoothing window S (odd)");
    sub->add_option("--k", k, "Transaction Distance weight in [0, 3]");
    sub->add_option("--set", settings, "Extra key=value overrides");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  scd::PipelineConfig cfg;
  try {
    if (!config_path.empty()) cfg = scd::load_config(config_path);
    if (!out_dir.empty()) scd::apply_setting(cfg, "out", out_dir);
    if (seed) cfg.seed = *seed;
    if (epsilon) cfg.clustering.epsilon = *epsilon;
    if (window) cfg.clustering.window = *window;
    if (k) cfg.distance.k = *k;
    for (const auto& kv : settings) {
      auto eq = kv.find('=');
      if (eq == std::string::npos) throw scd::ConfigError("--set expects key=value, got " + kv);
      scd::apply_setting(cfg, kv.substr(0, eq), kv.substr(eq + 1));
    }
  } catch (const scd::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }

  return scd::run_subcommand(app.get_subcommands().front()->get_name(), cfg, std::cerr);
}
