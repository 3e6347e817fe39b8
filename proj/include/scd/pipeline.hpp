#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "scd/classify.hpp"
#include "scd/clustering.hpp"
#include "scd/extreme.hpp"
#include "scd/metrics.hpp"
#include "scd/synth.hpp"

namespace scd {

struct PeriodConfig {
  std::string label;
  std::optional<std::chrono::year_month_day> week_start;
  std::filesystem::path input;  // empty: <out>/records_<label>.csv
};

/// Everything a subcommand needs. Loaded from a `key = value` file; flags override.
struct PipelineConfig {
  PeriodConfig early{"early", std::nullopt, {}};
  PeriodConfig late{"late", std::nullopt, {}};
  TransactionDistanceParams distance;
  SsOpticsParams clustering;
  ExtremeRuleConfig extreme;
  CategoryRules categories;
  std::size_t sample_size = 20000;
  std::uint64_t seed = 42;
  bool classify_update = false;
  std::filesystem::path out_dir = "out";
  std::map<Archetype, int> synth_counts;
  double synth_jitter_hours = 0.25;

  std::filesystem::path input_for(const PeriodConfig& p) const;
};

/// Applies one `key = value` setting; throws ConfigError for unknown keys or bad values.
/// Relative paths are resolved against `base_dir`.
void apply_setting(PipelineConfig& cfg, std::string_view key, std::string_view value,
                   const std::filesystem::path& base_dir = {});

PipelineConfig load_config(const std::filesystem::path& path);
PipelineConfig parse_config(std::istream& in, const std::filesystem::path& base_dir = {});

inline constexpr std::string_view kSubcommands[] = {"synth",    "ingest",   "regularity",  "extreme",
                                                    "cluster",  "classify", "transitions", "report"};

/// Runs one subcommand. Returns 0 on success, 1 on data errors, 2 on invalid
/// configuration; messages go to `log`.
int run_subcommand(std::string_view name, const PipelineConfig& cfg, std::ostream& log);

/// Hex SHA-256 of a byte string.
std::string sha256_hex(std::string_view bytes);

/// One spec per non-zero count, in archetype order, each with its own seed derived from
/// (seed, period_index, archetype).
std::vector<ArchetypeSpec> archetype_specs(const std::map<Archetype, int>& counts, double jitter_hours,
                                           std::uint64_t seed, int period_index);

}  // namespace scd
