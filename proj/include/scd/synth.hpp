#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "scd/ingest.hpp"

namespace scd {

enum class Archetype {
  Commuter,
  OneDayRider,
  TwoDayRider,
  MultiDayRider,
  EarlyBird,
  NightOwl,
  TirelessItinerant,
  RecurringItinerant,
};

std::string_view to_string(Archetype a);
std::optional<Archetype> parse_archetype(std::string_view s);

struct ArchetypeSpec {
  Archetype archetype = Archetype::Commuter;
  int count = 0;
  double jitter_hours = 0.0;  // each card's taps shift by one offset drawn uniformly in +-jitter_hours
  std::uint64_t seed = 1;
};

/// Identifier written into every generated file so fixtures can be reproduced elsewhere.
inline constexpr std::string_view kGeneratorId = "mt19937_64";

struct SynthOutput {
  std::vector<ScdRecord> records;             // grouped by card, time-ordered within a card
  std::map<std::string, Archetype> labels;
  std::string header_comment;                 // "# generator=... seeds=..."
};

/// Cards are numbered card000001, card000002, ... across the specs in order, so two
/// periods generated from specs with the same counts share their card ids.
///
/// Tap plans at zero jitter (weekdays are Mon-Fri):
///   Commuter            08:00 and 18:00 every weekday
///   OneDayRider         10:30 and 14:30 on one random day
///   TwoDayRider         12:30 and 20:30 on two random days
///   MultiDayRider       11:30 and 15:30 on three or four random days
///   EarlyBird           05:30 and 15:30 every weekday
///   NightOwl            13:30 and 22:30 every weekday
///   TirelessItinerant   metro 07:00-08:45 and 17:00-18:45 every weekday
///   RecurringItinerant  metro 07:00-07:20, 12:00-12:20, 18:00-18:20 every weekday
/// Bare taps are `transaction` events; metro trips are boarding/alighting pairs.
SynthOutput generate(const std::vector<ArchetypeSpec>& specs, const ObservationPeriod& period);

void write_records_csv(std::ostream& out, const std::vector<ScdRecord>& records,
                       std::string_view header_comment = {});
void write_labels_csv(std::ostream& out, const std::map<std::string, Archetype>& labels);

/// Seeded source with a fixed algorithm for every draw, independent of the standard
/// library's distribution implementations.
class SeededRandom {
 public:
  explicit SeededRandom(std::uint64_t seed) : engine_(seed) {}
  std::uint64_t next() { return engine_(); }
  /// Uniform in [0, 1) from the top 53 bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  /// Uniform in [0, n) by multiply-shift.
  std::uint64_t below(std::uint64_t n);
  /// Uniform in [-a, a].
  double symmetric(double a) { return a * (2.0 * uniform() - 1.0); }
  /// Standard normal by Box-Muller.
  double normal();

 private:
  std::mt19937_64 engine_;
};

}  // namespace scd
