#include "scd/synth.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <ostream>

#include "scd/error.hpp"

namespace scd {

namespace chr = std::chrono;

namespace {

constexpr std::array<Archetype, 8> kArchetypes = {
    Archetype::Commuter,  Archetype::OneDayRider, Archetype::TwoDayRider,       Archetype::MultiDayRider,
    Archetype::EarlyBird, Archetype::NightOwl,    Archetype::TirelessItinerant, Archetype::RecurringItinerant,
};

constexpr int kDaySeconds = 24 * 3600;

struct Trip {
  int day = 0;
  int second = 0;    // seconds after midnight of the start tap
  int duration = 0;  // > 0 for metro boarding/alighting pairs
};

int at(int hour, int minute) { return hour * 3600 + minute * 60; }

std::vector<int> pick_days(SeededRandom& rng, int k) {
  std::vector<int> days = {0, 1, 2, 3, 4, 5, 6};
  // partial Fisher-Yates
  for (int i = 0; i < k; ++i) {
    const auto j = i + static_cast<int>(rng.below(static_cast<std::uint64_t>(kDaysPerWeek - i)));
    std::swap(days[static_cast<std::size_t>(i)], days[static_cast<std::size_t>(j)]);
  }
  days.resize(static_cast<std::size_t>(k));
  std::sort(days.begin(), days.end());
  return days;
}

std::vector<Trip> plan(Archetype a, SeededRandom& rng) {
  std::vector<Trip> trips;
  auto every_weekday = [&](std::initializer_list<Trip> day_trips) {
    for (int d = 0; d < 5; ++d)
      for (auto t : day_trips) trips.push_back({d, t.second, t.duration});
  };
  auto on_days = [&](const std::vector<int>& days, int first, int second) {
    for (int d : days) {
      trips.push_back({d, first, 0});
      trips.push_back({d, second, 0});
    }
  };
  switch (a) {
    case Archetype::Commuter: every_weekday({{0, at(8, 0), 0}, {0, at(18, 0), 0}}); break;
    case Archetype::OneDayRider: on_days(pick_days(rng, 1), at(10, 30), at(14, 30)); break;
    case Archetype::TwoDayRider: on_days(pick_days(rng, 2), at(12, 30), at(20, 30)); break;
    case Archetype::MultiDayRider:
      on_days(pick_days(rng, 3 + static_cast<int>(rng.below(2))), at(11, 30), at(15, 30));
      break;
    case Archetype::EarlyBird: every_weekday({{0, at(5, 30), 0}, {0, at(15, 30), 0}}); break;
    case Archetype::NightOwl: every_weekday({{0, at(13, 30), 0}, {0, at(22, 30), 0}}); break;
    case Archetype::TirelessItinerant:
      every_weekday({{0, at(7, 0), 105 * 60}, {0, at(17, 0), 105 * 60}});
      break;
    case Archetype::RecurringItinerant:
      every_weekday({{0, at(7, 0), 20 * 60}, {0, at(12, 0), 20 * 60}, {0, at(18, 0), 20 * 60}});
      break;
  }
  return trips;
}

std::string card_name(std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "card%06zu", index);
  return buf;
}

}  // namespace

std::string_view to_string(Archetype a) {
  switch (a) {
    case Archetype::Commuter: return "Commuter";
    case Archetype::OneDayRider: return "OneDayRider";
    case Archetype::TwoDayRider: return "TwoDayRider";
    case Archetype::MultiDayRider: return "MultiDayRider";
    case Archetype::EarlyBird: return "EarlyBird";
    case Archetype::NightOwl: return "NightOwl";
    case Archetype::TirelessItinerant: return "TirelessItinerant";
    case Archetype::RecurringItinerant: return "RecurringItinerant";
  }
  return "Commuter";
}

std::optional<Archetype> parse_archetype(std::string_view s) {
  for (auto a : kArchetypes)
    if (to_string(a) == s) return a;
  return std::nullopt;
}

std::uint64_t SeededRandom::below(std::uint64_t n) {
  if (n == 0) throw ContractViolation("SeededRandom::below: empty range");
  return static_cast<std::uint64_t>((static_cast<unsigned __int128>(engine_()) * n) >> 64);
}

double SeededRandom::normal() {
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

SynthOutput generate(const std::vector<ArchetypeSpec>& specs, const ObservationPeriod& period) {
  SynthOutput out;
  out.header_comment = "# generator=" + std::string(kGeneratorId) + " period=" + period.label() + " seeds=";
  std::size_t card_index = 0;
  for (std::size_t s = 0; s < specs.size(); ++s) {
    const auto& spec = specs[s];
    if (spec.count < 0) throw ContractViolation("synth: negative archetype count");
    if (!(spec.jitter_hours >= 0.0)) throw ContractViolation("synth: negative jitter");
    if (s > 0) out.header_comment += ';';
    out.header_comment += std::string(to_string(spec.archetype)) + ':' + std::to_string(spec.seed);

    SeededRandom rng(spec.seed);
    for (int c = 0; c < spec.count; ++c) {
      const std::string card = card_name(++card_index);
      out.labels.emplace(card, spec.archetype);
      const bool metro_card = rng.below(2) == 1;
      const std::string station = "S" + std::to_string(rng.below(500));
      // A card keeps one habitual offset for the whole week.
      const int jitter = static_cast<int>(std::lround(rng.symmetric(spec.jitter_hours) * 3600.0));

      std::vector<ScdRecord> recs;
      for (const auto& trip : plan(spec.archetype, rng)) {
        const int latest = kDaySeconds - 1 - trip.duration;
        const int start = std::clamp(trip.second + jitter, 0, latest);
        const auto day_start = period.begin() + chr::days{trip.day};
        ScdRecord r;
        r.card_id = card;
        r.station_id = station;
        r.timestamp = day_start + chr::seconds{start};
        if (trip.duration > 0) {
          r.mode = Mode::Metro;
          r.event = EventKind::Boarding;
          recs.push_back(r);
          r.event = EventKind::Alighting;
          r.timestamp = day_start + chr::seconds{start + trip.duration};
          recs.push_back(r);
        } else {
          r.mode = metro_card ? Mode::Metro : Mode::Bus;
          r.event = EventKind::Transaction;
          recs.push_back(r);
        }
      }
      std::stable_sort(recs.begin(), recs.end(),
                       [](const ScdRecord& a, const ScdRecord& b) { return a.timestamp < b.timestamp; });
      out.records.insert(out.records.end(), recs.begin(), recs.end());
    }
  }
  return out;
}

void write_records_csv(std::ostream& out, const std::vector<ScdRecord>& records, std::string_view header_comment) {
  if (!header_comment.empty()) out << header_comment << '\n';
  out << kRecordHeader << '\n';
  for (const auto& r : records)
    out << r.card_id << ',' << format_timestamp(r.timestamp) << ',' << to_string(r.mode) << ','
        << r.station_id << ',' << to_string(r.event) << '\n';
}

void write_labels_csv(std::ostream& out, const std::map<std::string, Archetype>& labels) {
  out << "card_id,archetype\n";
  for (const auto& [card, a] : labels) out << card << ',' << to_string(a) << '\n';
}

}  // namespace scd
