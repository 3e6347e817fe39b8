#include "scd/pipeline.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <fstream>
#include <functional>
#include <iomanip>
#include <istream>
#include <memory>
#include <ostream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "scd/analysis.hpp"
#include "scd/csv.hpp"
#include "scd/error.hpp"

namespace scd {

namespace fs = std::filesystem;
using json = nlohmann::json;

// ---------------------------------------------------------------------------
// configuration

fs::path PipelineConfig::input_for(const PeriodConfig& p) const {
  if (!p.input.empty()) return p.input;
  return out_dir / ("records_" + p.label + ".csv");
}

namespace {

template <typename T>
T number_or_throw(std::string_view key, std::string_view value) {
  auto v = csv::parse_number<T>(value);
  if (!v) throw ConfigError("config: bad value '" + std::string(value) + "' for " + std::string(key));
  return *v;
}

bool bool_or_throw(std::string_view key, std::string_view value) {
  if (value == "1" || value == "true" || value == "yes" || value == "on") return true;
  if (value == "0" || value == "false" || value == "no" || value == "off") return false;
  throw ConfigError("config: bad boolean '" + std::string(value) + "' for " + std::string(key));
}

fs::path resolve(const fs::path& base, std::string_view value) {
  fs::path p{std::string(value)};
  return (p.is_absolute() || base.empty()) ? p : base / p;
}

void apply_period(PeriodConfig& period, std::string_view field, std::string_view key, std::string_view value,
                  const fs::path& base) {
  if (field == "label") {
    if (value.empty() || value.find_first_of(",/\\ ") != std::string_view::npos)
      throw ConfigError("config: " + std::string(key) + " must be a plain non-empty word");
    period.label = std::string(value);
  } else if (field == "week_start") {
    try {
      period.week_start = parse_date(value);
    } catch (const DataError& e) {
      throw ConfigError(std::string("config: ") + e.what());
    }
  } else if (field == "input") {
    period.input = resolve(base, value);
  } else {
    throw ConfigError("config: unknown key " + std::string(key));
  }
}

}  // namespace

void apply_setting(PipelineConfig& cfg, std::string_view key, std::string_view value, const fs::path& base) {
  key = csv::trim(key);
  value = csv::trim(value);
  const auto dot = key.find('.');
  const auto section = key.substr(0, dot);
  const auto field = dot == std::string_view::npos ? std::string_view{} : key.substr(dot + 1);

  if (section == "early" && dot != std::string_view::npos) return apply_period(cfg.early, field, key, value, base);
  if (section == "late" && dot != std::string_view::npos) return apply_period(cfg.late, field, key, value, base);

  if (key == "k") cfg.distance.k = number_or_throw<double>(key, value);
  else if (key == "epsilon") cfg.clustering.epsilon = number_or_throw<double>(key, value);
  else if (key == "window") cfg.clustering.window = number_or_throw<int>(key, value);
  else if (key == "tau") cfg.clustering.tau = number_or_throw<double>(key, value);
  else if (key == "tau_factor") cfg.clustering.tau_factor = number_or_throw<double>(key, value);
  else if (key == "sample_size") cfg.sample_size = number_or_throw<std::size_t>(key, value);
  else if (key == "seed") cfg.seed = number_or_throw<std::uint64_t>(key, value);
  else if (key == "out") cfg.out_dir = resolve(base, value);
  else if (key == "classify.update") cfg.classify_update = bool_or_throw(key, value);
  else if (key == "extreme.eb_cutoff_hour") cfg.extreme.eb_cutoff_hour = number_or_throw<int>(key, value);
  else if (key == "extreme.no_cutoff_hour") cfg.extreme.no_cutoff_hour = number_or_throw<int>(key, value);
  else if (key == "extreme.min_days") cfg.extreme.min_days = number_or_throw<int>(key, value);
  else if (key == "extreme.ti_min_duration_minutes") cfg.extreme.ti_min_duration_minutes = number_or_throw<int>(key, value);
  else if (key == "extreme.ri_min_weekday_trips") cfg.extreme.ri_min_weekday_trips = number_or_throw<int>(key, value);
  else if (key == "extreme.chain_gap_minutes") cfg.extreme.chain_gap_minutes = number_or_throw<int>(key, value);
  else if (key == "category.active_day_fraction") cfg.categories.active_day_fraction = number_or_throw<double>(key, value);
  else if (key == "category.min_active_weekdays") cfg.categories.min_active_weekdays = number_or_throw<int>(key, value);
  else if (key == "category.weekend_max_fraction") cfg.categories.weekend_max_fraction = number_or_throw<double>(key, value);
  else if (key == "category.peak_separation_hours") cfg.categories.peak_separation_hours = number_or_throw<int>(key, value);
  else if (key == "category.mode_min_fraction") cfg.categories.mode_min_fraction = number_or_throw<double>(key, value);
  else if (key == "synth.jitter_hours") cfg.synth_jitter_hours = number_or_throw<double>(key, value);
  else if (section == "synth") {
    auto a = parse_archetype(field);
    if (!a) throw ConfigError("config: unknown archetype in " + std::string(key));
    const int count = number_or_throw<int>(key, value);
    if (count < 0) throw ConfigError("config: negative count for " + std::string(key));
    cfg.synth_counts[*a] = count;
  } else {
    throw ConfigError("config: unknown key " + std::string(key));
  }
}

PipelineConfig parse_config(std::istream& in, const fs::path& base_dir) {
  PipelineConfig cfg;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto view = csv::trim(line);
    if (view.empty() || view.front() == '#') continue;
    const auto eq = view.find('=');
    if (eq == std::string_view::npos)
      throw ConfigError("config line " + std::to_string(line_no) + ": expected key = value");
    apply_setting(cfg, view.substr(0, eq), view.substr(eq + 1), base_dir);
  }
  return cfg;
}

PipelineConfig load_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  return parse_config(in, path.parent_path());
}

std::string sha256_hex(std::string_view bytes) {
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), &EVP_MD_CTX_free);
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
      EVP_DigestUpdate(ctx.get(), bytes.data(), bytes.size()) != 1 ||
      EVP_DigestFinal_ex(ctx.get(), digest, &len) != 1)
    throw std::runtime_error("sha256 failed");
  std::ostringstream hex;
  for (unsigned i = 0; i < len; ++i) hex << std::hex << std::setw(2) << std::setfill('0') << int(digest[i]);
  return hex.str();
}

std::vector<ArchetypeSpec> archetype_specs(const std::map<Archetype, int>& counts, double jitter_hours,
                                           std::uint64_t seed, int period_index) {
  std::vector<ArchetypeSpec> specs;
  for (const auto& [a, n] : counts) {
    if (n <= 0) continue;
    // splitmix64 finaliser over (seed, period, archetype)
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (static_cast<std::uint64_t>(period_index) * 16 +
                                                     static_cast<std::uint64_t>(a) + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    z ^= z >> 31;
    specs.push_back({a, n, jitter_hours, z});
  }
  return specs;
}

// ---------------------------------------------------------------------------
// subcommands

namespace {

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::size_t data_rows(std::string_view text) {
  std::size_t lines = 0;
  bool header_seen = false;
  std::size_t start = 0;
  while (start < text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    auto line = text.substr(start, end - start);
    if (!line.empty() && line.front() != '#') {
      if (header_seen) ++lines;
      header_seen = true;
    }
    start = end + 1;
  }
  return lines;
}

/// Collects the inputs read and the files written by one subcommand, then writes the
/// JSON run manifest next to them.
class RunContext {
 public:
  RunContext(std::string_view name, const PipelineConfig& cfg, std::ostream& log)
      : name_(name), cfg_(cfg), log_(log) {
    fs::create_directories(cfg.out_dir);
  }

  const PipelineConfig& cfg() const { return cfg_; }
  std::ostream& log() { return log_; }

  std::string read_input(const fs::path& path) {
    auto text = read_file(path);
    inputs_[path.filename().string()] = {{"sha256", sha256_hex(text)}, {"rows", data_rows(text)}};
    return text;
  }

  void write(const std::string& file, const std::string& text) {
    const auto path = cfg_.out_dir / file;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write " + path.string());
    out << text;
    if (!out) throw DataError("failed writing " + path.string());
    outputs_[file] = {{"sha256", sha256_hex(text)}, {"rows", data_rows(text)}};
    log_ << "wrote " << path.string() << '\n';
  }

  json& extra() { return extra_; }

  void finish() {
    json m;
    m["subcommand"] = name_;
    m["parameters"] = parameters();
    m["inputs"] = inputs_;
    m["outputs"] = outputs_;
    if (!extra_.is_null()) m["summary"] = extra_;
    std::string text = m.dump(2) + "\n";
    const auto path = cfg_.out_dir / ("manifest_" + name_ + ".json");
    std::ofstream out(path, std::ios::binary);
    out << text;
    log_ << "wrote " << path.string() << '\n';
  }

 private:
  json parameters() const {
    json p;
    auto period = [](const PeriodConfig& pc) {
      json j;
      j["label"] = pc.label;
      j["week_start"] = pc.week_start ? [&] {
        std::ostringstream s;
        s << static_cast<int>(pc.week_start->year()) << '-' << std::setw(2) << std::setfill('0')
          << static_cast<unsigned>(pc.week_start->month()) << '-' << std::setw(2) << std::setfill('0')
          << static_cast<unsigned>(pc.week_start->day());
        return s.str();
      }() : std::string{};
      return j;
    };
    p["early"] = period(cfg_.early);
    p["late"] = period(cfg_.late);
    p["k"] = cfg_.distance.k;
    p["epsilon"] = cfg_.clustering.epsilon;
    p["window"] = cfg_.clustering.window;
    p["tau"] = cfg_.clustering.tau ? json(*cfg_.clustering.tau) : json(nullptr);
    p["tau_factor"] = cfg_.clustering.tau_factor;
    p["sample_size"] = cfg_.sample_size;
    p["seed"] = cfg_.seed;
    p["classify_update"] = cfg_.classify_update;
    p["extreme"] = {{"eb_cutoff_hour", cfg_.extreme.eb_cutoff_hour},
                    {"no_cutoff_hour", cfg_.extreme.no_cutoff_hour},
                    {"min_days", cfg_.extreme.min_days},
                    {"ti_min_duration_minutes", cfg_.extreme.ti_min_duration_minutes},
                    {"ri_min_weekday_trips", cfg_.extreme.ri_min_weekday_trips},
                    {"chain_gap_minutes", cfg_.extreme.chain_gap_minutes}};
    p["category"] = {{"active_day_fraction", cfg_.categories.active_day_fraction},
                     {"min_active_weekdays", cfg_.categories.min_active_weekdays},
                     {"weekend_max_fraction", cfg_.categories.weekend_max_fraction},
                     {"peak_separation_hours", cfg_.categories.peak_separation_hours},
                     {"mode_min_fraction", cfg_.categories.mode_min_fraction}};
    json synth = json::object();
    for (const auto& [a, n] : cfg_.synth_counts) synth[std::string(to_string(a))] = n;
    p["synth"] = {{"counts", synth}, {"jitter_hours", cfg_.synth_jitter_hours}};
    return p;
  }

  std::string name_;
  const PipelineConfig& cfg_;
  std::ostream& log_;
  json inputs_ = json::object();
  json outputs_ = json::object();
  json extra_;
};

void validate(const PipelineConfig& cfg, std::string_view name) {
  try {
    cfg.distance.validate();
    cfg.clustering.validate();
    cfg.extreme.validate();
  } catch (const ContractViolation& e) {
    throw ConfigError(e.what());
  }
  for (const auto* p : {&cfg.early, &cfg.late})
    if (!p->week_start) throw ConfigError("config: " + p->label + " period needs week_start");
  if (cfg.early.label == cfg.late.label) throw ConfigError("config: period labels must differ");
  if (cfg.sample_size < static_cast<std::size_t>(cfg.clustering.window))
    throw ConfigError("config: sample_size must be at least the window");
  if (name == "synth") {
    if (cfg.synth_counts.empty()) throw ConfigError("config: synth needs at least one synth.<Archetype> count");
    if (!(cfg.synth_jitter_hours >= 0.0)) throw ConfigError("config: synth.jitter_hours must be >= 0");
  } else if (name == "ingest" || name == "regularity" || name == "extreme" || name == "cluster" ||
             name == "classify" || name == "report") {
    for (const auto* p : {&cfg.early, &cfg.late}) {
      const auto in = cfg.input_for(*p);
      if (!fs::exists(in)) throw ConfigError("config: input " + in.string() + " does not exist");
    }
  }
}

ObservationPeriod period_of(const PeriodConfig& p) {
  try {
    return ObservationPeriod(p.label, *p.week_start);
  } catch (const ContractViolation& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
}

struct PeriodData {
  std::string label;
  ParseResult parsed;
  ProfileMap profiles;
  std::map<std::string, std::vector<ScdRecord>> by_card;
};

PeriodData load_period(RunContext& ctx, const PeriodConfig& pc) {
  PeriodData d;
  d.label = pc.label;
  std::istringstream in(ctx.read_input(ctx.cfg().input_for(pc)));
  d.parsed = parse_records(in, period_of(pc));
  d.profiles = build_profiles(d.parsed.records);
  d.by_card = group_by_card(d.parsed.records);
  return d;
}

std::map<std::string, ExtremeClass> extreme_classes(const PeriodData& d, const ExtremeRuleConfig& rules) {
  static const std::vector<ScdRecord> kNone;
  std::map<std::string, ExtremeClass> out;
  for (const auto& [card, profile] : d.profiles) {
    auto it = d.by_card.find(card);
    out.emplace_hint(out.end(), card, classify_extreme(profile, it == d.by_card.end() ? kNone : it->second, rules));
  }
  return out;
}

ProfileMap non_extreme(const PeriodData& d, const std::map<std::string, ExtremeClass>& classes) {
  ProfileMap out;
  for (const auto& [card, p] : d.profiles)
    if (classes.at(card) == ExtremeClass::NE) out.emplace_hint(out.end(), card, p);
  return out;
}

std::string render(const std::function<void(std::ostream&)>& fn) {
  std::ostringstream s;
  fn(s);
  return s.str();
}

json matrix_json(const TransitionMatrix& m) {
  json j;
  j["labels"] = m.labels;
  j["counts"] = m.counts;
  j["total"] = m.total();
  j["excluded"] = m.excluded;
  return j;
}

json optional_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

void cmd_synth(RunContext& ctx) {
  const auto& cfg = ctx.cfg();
  int index = 0;
  std::size_t cards = 0;
  for (const auto* pc : {&cfg.early, &cfg.late}) {
    auto out = generate(archetype_specs(cfg.synth_counts, cfg.synth_jitter_hours, cfg.seed, index++), period_of(*pc));
    cards = out.labels.size();
    ctx.write("records_" + pc->label + ".csv",
              render([&](std::ostream& s) { write_records_csv(s, out.records, out.header_comment); }));
    ctx.write("labels_" + pc->label + ".csv", render([&](std::ostream& s) { write_labels_csv(s, out.labels); }));
  }
  ctx.extra() = {{"cards", cards}};
}

void cmd_ingest(RunContext& ctx) {
  json summary;
  for (const auto* pc : {&ctx.cfg().early, &ctx.cfg().late}) {
    auto d = load_period(ctx, *pc);
    ctx.write("profiles_" + d.label + ".csv", render([&](std::ostream& s) { write_profiles_csv(s, d.profiles); }));
    ctx.write("diagnostics_" + d.label + ".csv", render([&](std::ostream& s) {
                s << "line,kind,message\n";
                for (const auto& diag : d.parsed.diagnostics)
                  s << diag.line << ',' << (diag.kind == Diagnostic::Kind::Malformed ? "malformed" : "out_of_window")
                    << ',' << diag.message << '\n';
              }));
    summary[d.label] = {{"records", d.parsed.records.size()},
                        {"diagnostics", d.parsed.diagnostics.size()},
                        {"duplicates", d.parsed.duplicates},
                        {"cards", d.profiles.size()}};
  }
  ctx.extra() = summary;
}

void cmd_regularity(RunContext& ctx) {
  const auto& cfg = ctx.cfg();
  auto early = load_period(ctx, cfg.early);
  auto late = load_period(ctx, cfg.late);
  std::map<std::string, RegularityScore> re_early, re_late;
  for (const auto& card : shared_cards(early.profiles, late.profiles)) {
    re_early[card] = regularity(early.profiles.at(card), cfg.distance);
    re_late[card] = regularity(late.profiles.at(card), cfg.distance);
  }
  ctx.write("regularity.csv", render([&](std::ostream& s) {
              s << "card_id,W,D_sd,DIST_sd,RE_early,RE_late,Sta\n";
              for (const auto& [card, e] : re_early) {
                const auto& l = re_late.at(card);
                s << card << ',' << csv::format_double(e.W) << ',' << csv::format_double(e.D_sd) << ','
                  << csv::format_double(e.DIST_sd) << ',' << csv::format_double(e.RE) << ','
                  << csv::format_double(l.RE) << ',' << csv::format_double(stability(e, l).sta) << '\n';
              }
            }));
  json summary = {{"cards", re_early.size()}};
  if (re_early.size() >= 2) {
    auto sc = regularity_scatter(re_early, re_late);
    summary["corr_re_early_re_late"] = optional_json(sc.corr_re);
    summary["corr_re_early_sta"] = optional_json(sc.corr_sta);
  }
  ctx.extra() = summary;
}

void cmd_extreme(RunContext& ctx) {
  const auto& cfg = ctx.cfg();
  json summary;
  std::ostringstream s;
  s << "card_id,period,extreme_class\n";
  for (const auto* pc : {&cfg.early, &cfg.late}) {
    auto d = load_period(ctx, *pc);
    std::map<std::string, std::size_t> tally;
    for (const auto& [card, cls] : extreme_classes(d, cfg.extreme)) {
      s << card << ',' << d.label << ',' << to_string(cls) << '\n';
      ++tally[std::string(to_string(cls))];
    }
    summary[d.label] = tally;
  }
  ctx.write("extreme.csv", s.str());
  ctx.extra() = summary;
}

void cmd_cluster(RunContext& ctx) {
  const auto& cfg = ctx.cfg();
  auto early = load_period(ctx, cfg.early);
  auto pool = non_extreme(early, extreme_classes(early, cfg.extreme));

  std::vector<WeeklyProfile> sample;
  sample.reserve(std::min(pool.size(), cfg.sample_size));
  if (pool.size() <= cfg.sample_size) {
    for (const auto& [card, p] : pool) sample.push_back(p);
  } else {
    std::vector<const WeeklyProfile*> all;
    for (const auto& [card, p] : pool) all.push_back(&p);
    SeededRandom rng(cfg.seed);
    for (std::size_t i = 0; i < cfg.sample_size; ++i)
      std::swap(all[i], all[i + rng.below(all.size() - i)]);
    all.resize(cfg.sample_size);
    std::sort(all.begin(), all.end(), [](auto* a, auto* b) { return a->card_id < b->card_id; });
    for (auto* p : all) sample.push_back(*p);
  }
  if (sample.size() < static_cast<std::size_t>(cfg.clustering.window))
    throw DataError("cluster: only " + std::to_string(sample.size()) + " non-extreme profiles, fewer than the window");

  auto result = cluster_sample(sample, cfg.clustering, cfg.distance);
  auto model = result.centroids;
  model.push_back(make_noise_centroid());

  ctx.write("centroids.csv", render([&](std::ostream& s) { write_centroids_csv(s, model); }));
  ctx.write("reachability.csv", render([&](std::ostream& s) { write_reachability_csv(s, result.plot); }));
  ctx.write("sample_members.csv", render([&](std::ostream& s) {
              s << "card_id,cluster_id\n";
              std::vector<int> label(sample.size(), kNoiseClusterId);
              for (std::size_t c = 0; c < result.members.size(); ++c)
                for (auto i : result.members[c]) label[i] = result.centroids[c].id;
              for (std::size_t i = 0; i < sample.size(); ++i) s << sample[i].card_id << ',' << label[i] << '\n';
            }));
  json clusters = json::array();
  for (std::size_t c = 0; c < result.centroids.size(); ++c)
    clusters.push_back({{"id", result.centroids[c].id},
                        {"size", result.members[c].size()},
                        {"category", to_string(categorize(result.centroids[c], cfg.categories))}});
  ctx.extra() = {{"sample_size", sample.size()},
                 {"tau", result.extraction.tau},
                 {"noise_points", result.extraction.noise.size()},
                 {"dropped_clusters", result.dropped_clusters},
                 {"clusters", clusters}};
}

ClusterModel read_model(RunContext& ctx) {
  std::istringstream in(ctx.read_input(ctx.cfg().out_dir / "centroids.csv"));
  auto model = read_centroids_csv(in);
  if (std::none_of(model.begin(), model.end(), [](const ClusterCentroid& c) { return c.is_noise(); }))
    model.push_back(make_noise_centroid());
  return model;
}

void cmd_classify(RunContext& ctx) {
  const auto& cfg = ctx.cfg();
  if (!fs::exists(cfg.out_dir / "centroids.csv")) throw ConfigError("classify: run `cluster` first (no centroids.csv)");
  const auto model = read_model(ctx);
  std::map<int, TripCategory> category;
  for (const auto& c : model) category[c.id] = categorize(c, cfg.categories);

  json summary;
  std::ostringstream s;
  s << "card_id,period,cluster_id,category\n";
  for (const auto* pc : {&cfg.early, &cfg.late}) {
    auto d = load_period(ctx, *pc);
    auto pool = non_extreme(d, extreme_classes(d, cfg.extreme));
    auto result = classify_all(pool, model, cfg.classify_update);
    std::map<std::string, std::size_t> tally;
    for (const auto& [card, id] : result.assignments) {
      const auto cat = to_string(category.at(id));
      s << card << ',' << d.label << ',' << id << ',' << cat << '\n';
      ++tally[std::string(cat)];
    }
    if (cfg.classify_update)
      ctx.write("centroids_updated_" + d.label + ".csv",
                render([&](std::ostream& o) { write_centroids_csv(o, result.model); }));
    summary[d.label] = {{"classified", result.assignments.size()}, {"categories", tally}};
  }
  ctx.write("assignments.csv", s.str());
  ctx.extra() = summary;
}

struct Classes {
  std::map<std::string, ClassMap> extreme;   // period -> card -> class
  std::map<std::string, ClassMap> cluster;   // period -> card -> cluster id
  std::map<std::string, ClassMap> category;  // period -> card -> category
};

Classes read_classes(RunContext& ctx) {
  const auto& cfg = ctx.cfg();
  for (const char* f : {"extreme.csv", "assignments.csv"})
    if (!fs::exists(cfg.out_dir / f)) throw ConfigError(std::string("missing ") + f + "; run extreme and classify first");
  Classes c;
  auto parse = [&](const std::string& text, std::size_t columns, auto&& on_row) {
    std::istringstream in(text);
    std::string line;
    std::getline(in, line);
    while (std::getline(in, line)) {
      auto view = csv::trim(line);
      if (view.empty()) continue;
      auto f = csv::split(view);
      if (f.size() != columns) throw DataError("malformed row: " + line);
      on_row(f);
    }
  };
  parse(ctx.read_input(cfg.out_dir / "extreme.csv"), 3, [&](const auto& f) {
    c.extreme[std::string(f[1])][std::string(f[0])] = std::string(f[2]);
  });
  parse(ctx.read_input(cfg.out_dir / "assignments.csv"), 4, [&](const auto& f) {
    c.cluster[std::string(f[1])][std::string(f[0])] = std::string(f[2]);
    c.category[std::string(f[1])][std::string(f[0])] = std::string(f[3]);
  });
  return c;
}

std::vector<std::string> extreme_labels() {
  std::vector<std::string> out;
  for (auto c : kExtremeClasses) out.emplace_back(to_string(c));
  return out;
}

std::vector<std::string> category_labels() {
  return {"OneDay", "TwoDay", "MultiDay", "Commuting", "Noise"};
}

struct Matrices {
  TransitionMatrix extreme, cluster, category;
};

Matrices build_matrices(RunContext& ctx, const Classes& c, const ClusterModel& model) {
  const auto& cfg = ctx.cfg();
  const auto& e = cfg.early.label;
  const auto& l = cfg.late.label;
  Matrices m;
  m.extreme = transition_matrix(c.extreme.count(e) ? c.extreme.at(e) : ClassMap{},
                                c.extreme.count(l) ? c.extreme.at(l) : ClassMap{}, extreme_labels());
  std::vector<std::string> cluster_labels;
  std::map<std::string, std::string> coarse;
  for (const auto& cc : model) {
    cluster_labels.push_back(std::to_string(cc.id));
    coarse[std::to_string(cc.id)] = std::string(to_string(categorize(cc, cfg.categories)));
  }
  const ClassMap empty;
  m.cluster = transition_matrix(c.cluster.count(e) ? c.cluster.at(e) : empty,
                                c.cluster.count(l) ? c.cluster.at(l) : empty, cluster_labels);
  m.category = aggregate(m.cluster, [&](const std::string& id) { return coarse.at(id); }, category_labels());
  return m;
}

void cmd_transitions(RunContext& ctx) {
  const auto& cfg = ctx.cfg();
  auto classes = read_classes(ctx);
  auto model = read_model(ctx);
  auto m = build_matrices(ctx, classes, model);
  const std::string corner = cfg.early.label + "\\" + cfg.late.label;
  ctx.write("transitions_extreme.csv", render([&](std::ostream& s) { write_matrix_csv(s, m.extreme, corner); }));
  ctx.write("transitions_cluster.csv", render([&](std::ostream& s) { write_matrix_csv(s, m.cluster, corner); }));
  ctx.write("transitions_category.csv", render([&](std::ostream& s) { write_matrix_csv(s, m.category, corner); }));
  ctx.write("heatmap_cluster.csv", render([&](std::ostream& s) { write_heatmap_csv(s, m.cluster); }));
  ctx.extra() = {{"extreme", matrix_json(m.extreme)},
                 {"cluster_total", m.cluster.total()},
                 {"cluster_excluded", m.cluster.excluded},
                 {"category", matrix_json(m.category)}};
}

void cmd_report(RunContext& ctx) {
  const auto& cfg = ctx.cfg();
  auto classes = read_classes(ctx);
  auto model = read_model(ctx);
  auto m = build_matrices(ctx, classes, model);

  std::vector<int> ids;
  for (const auto& c : model) ids.push_back(c.id);

  json report;
  report["extreme_transitions"] = matrix_json(m.extreme);
  report["category_transitions"] = matrix_json(m.category);
  json rates = json::object();
  for (const auto& label : m.extreme.labels) {
    try {
      rates[label] = {{"retention", retention_rate(m.extreme, label)},
                      {"to_NE", conversion_rate(m.extreme, label, "NE")}};
    } catch (const UndefinedStatistic&) {
      rates[label] = nullptr;
    }
  }
  report["extreme_rates"] = rates;

  std::ostringstream stats;
  stats << "period,cluster_id,category,cards,metro_riders,metro_ratio,empty\n";
  std::map<std::string, std::map<std::string, RegularityScore>> scores;
  for (const auto* pc : {&cfg.early, &cfg.late}) {
    auto d = load_period(ctx, *pc);
    std::map<std::string, int> assignments;
    if (classes.cluster.count(d.label))
      for (const auto& [card, id] : classes.cluster.at(d.label)) {
        auto v = csv::parse_number<int>(id);
        if (!v) throw DataError("bad cluster id " + id);
        assignments[card] = *v;
      }
    auto st = cluster_statistics(d.label, assignments, d.profiles, ids);
    json rows = json::array();
    for (const auto& r : st.rows) {
      const auto it = std::find_if(model.begin(), model.end(), [&](const auto& c) { return c.id == r.cluster_id; });
      const auto cat = it == model.end() ? std::string("unknown") : std::string(to_string(categorize(*it, cfg.categories)));
      stats << d.label << ',' << r.cluster_id << ',' << cat << ',' << r.cards << ',' << r.metro_riders << ','
            << csv::format_double(r.metro_ratio) << ',' << (r.empty ? 1 : 0) << '\n';
      rows.push_back({{"cluster_id", r.cluster_id}, {"cards", r.cards}, {"metro_ratio", r.metro_ratio}});
    }
    report["cluster_stats"][d.label] = {{"population", st.population}, {"clusters", rows}};
    for (const auto& [card, p] : d.profiles) scores[d.label][card] = regularity(p, cfg.distance);
  }
  try {
    auto sc = regularity_scatter(scores[cfg.early.label], scores[cfg.late.label]);
    report["regularity"] = {{"pairs", sc.cards.size()},
                            {"corr_re_early_re_late", optional_json(sc.corr_re)},
                            {"corr_re_early_sta", optional_json(sc.corr_sta)}};
  } catch (const UndefinedStatistic&) {
    report["regularity"] = nullptr;
  }

  ctx.write("cluster_stats.csv", stats.str());
  ctx.write("report.json", report.dump(2) + "\n");

  std::ostringstream txt;
  txt << "Extreme-traveler transitions (" << cfg.early.label << " rows, " << cfg.late.label << " columns)\n";
  write_matrix_csv(txt, m.extreme, cfg.early.label + "\\" + cfg.late.label);
  txt << "\nTrip-category transitions\n";
  write_matrix_csv(txt, m.category, cfg.early.label + "\\" + cfg.late.label);
  txt << "\nRetention by extreme class\n";
  for (const auto& label : m.extreme.labels) {
    txt << label << ": ";
    if (rates[label].is_null())
      txt << "n/a\n";
    else
      txt << csv::format_double(rates[label]["retention"].get<double>()) << '\n';
  }
  ctx.write("report.txt", txt.str());
}

}  // namespace

int run_subcommand(std::string_view name, const PipelineConfig& cfg, std::ostream& log) {
  static const std::map<std::string_view, void (*)(RunContext&)> kTable = {
      {"synth", cmd_synth},       {"ingest", cmd_ingest},     {"regularity", cmd_regularity},
      {"extreme", cmd_extreme},   {"cluster", cmd_cluster},   {"classify", cmd_classify},
      {"transitions", cmd_transitions}, {"report", cmd_report}};
  try {
    auto it = kTable.find(name);
    if (it == kTable.end()) throw ConfigError("unknown subcommand " + std::string(name));
    validate(cfg, name);
    RunContext ctx(name, cfg, log);
    it->second(ctx);
    ctx.finish();
    return 0;
  } catch (const ConfigError& e) {
    log << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    log << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace scd
