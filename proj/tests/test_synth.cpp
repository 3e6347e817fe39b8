#include <set>
#include <sstream>

#include "doctest.h"
#include "scd/extreme.hpp"
#include "scd/synth.hpp"

using namespace scd;
using namespace std::chrono;

namespace {

const ObservationPeriod kWeek("w", year{2014} / April / 7);

std::string render(const SynthOutput& out) {
  std::ostringstream s;
  write_records_csv(s, out.records, out.header_comment);
  return s.str();
}

}  // namespace

TEST_CASE("one commuter at zero jitter") {
  auto out = generate({{Archetype::Commuter, 1, 0.0, 1}}, kWeek);
  REQUIRE(out.records.size() == 10);
  for (std::size_t i = 0; i < 10; ++i) {
    const auto& r = out.records[i];
    CHECK(r.day_of_week() == static_cast<int>(i / 2));
    CHECK(r.hour() == (i % 2 == 0 ? 8 : 18));
    CHECK(r.minute_of_day() % 60 == 0);
    CHECK(r.event == EventKind::Transaction);
  }
  CHECK(out.labels.at("card000001") == Archetype::Commuter);
}

TEST_CASE("determinism and seed sensitivity") {
  const std::vector<ArchetypeSpec> specs = {{Archetype::OneDayRider, 50, 0.3, 7}, {Archetype::NightOwl, 20, 0.2, 8}};
  CHECK(render(generate(specs, kWeek)) == render(generate(specs, kWeek)));
  auto other = specs;
  other[0].seed = 70;
  CHECK(render(generate(specs, kWeek)) != render(generate(other, kWeek)));
}

TEST_CASE("header and round trip through ingest") {
  auto out = generate({{Archetype::TwoDayRider, 30, 0.5, 3}, {Archetype::TirelessItinerant, 10, 0.0, 4}}, kWeek);
  CHECK(out.header_comment == "# generator=mt19937_64 period=w seeds=TwoDayRider:3;TirelessItinerant:4");
  std::istringstream in(render(out));
  auto parsed = parse_records(in, kWeek);
  CHECK(parsed.diagnostics.empty());
  CHECK(parsed.records.size() == out.records.size());

  std::set<std::string> stream_ids, label_ids;
  for (const auto& r : out.records) stream_ids.insert(r.card_id);
  for (const auto& [id, a] : out.labels) label_ids.insert(id);
  CHECK(stream_ids == label_ids);
  CHECK(label_ids.size() == 40);
}

TEST_CASE("taps stay inside the week and the jitter bound") {
  auto out = generate({{Archetype::Commuter, 200, 0.5, 9}, {Archetype::MultiDayRider, 200, 0.5, 10}}, kWeek);
  for (const auto& r : out.records) {
    CHECK(kWeek.contains(r.timestamp));
    const int m = r.minute_of_day();
    if (out.labels.at(r.card_id) == Archetype::Commuter)
      CHECK((std::abs(m - 8 * 60) <= 30 || std::abs(m - 18 * 60) <= 30));
  }
  auto profiles = build_profiles(out.records);
  for (const auto& [id, p] : profiles) {
    int days = 0;
    for (int d = 0; d < 7; ++d) {
      bool any = false;
      for (int h = 0; h < 24; ++h) any = any || p.slots[static_cast<std::size_t>(d * 24 + h)] > 0;
      days += any;
    }
    if (out.labels.at(id) == Archetype::MultiDayRider) CHECK(days >= 3);
    if (out.labels.at(id) == Archetype::Commuter) CHECK(days == 5);
  }
}

TEST_CASE("extreme archetypes at zero jitter are recovered") {
  const std::pair<Archetype, ExtremeClass> cases[] = {{Archetype::EarlyBird, ExtremeClass::EB},
                                                       {Archetype::NightOwl, ExtremeClass::NO},
                                                       {Archetype::TirelessItinerant, ExtremeClass::TI},
                                                       {Archetype::RecurringItinerant, ExtremeClass::RI}};
  for (auto [archetype, expected] : cases) {
    auto out = generate({{archetype, 100, 0.0, 21}}, kWeek);
    auto profiles = build_profiles(out.records);
    auto records = group_by_card(out.records);
    int hits = 0;
    for (const auto& [id, p] : profiles) hits += classify_extreme(p, records.at(id)) == expected;
    CHECK(hits == 100);
  }
  SUBCASE("ordinary riders are not extreme") {
    auto out = generate({{Archetype::Commuter, 50, 0.0, 1},
                         {Archetype::OneDayRider, 50, 0.0, 2},
                         {Archetype::TwoDayRider, 50, 0.0, 3},
                         {Archetype::MultiDayRider, 50, 0.0, 4}},
                        kWeek);
    auto profiles = build_profiles(out.records);
    auto records = group_by_card(out.records);
    for (const auto& [id, p] : profiles) CHECK(classify_extreme(p, records.at(id)) == ExtremeClass::NE);
  }
}

TEST_CASE("seeded random") {
  SeededRandom a(5), b(5);
  for (int i = 0; i < 100; ++i) CHECK(a.next() == b.next());
  SeededRandom r(6);
  for (int i = 0; i < 1000; ++i) {
    const double u = r.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    CHECK(r.below(7) < 7);
    CHECK(std::abs(r.symmetric(0.5)) <= 0.5);
  }
  CHECK(parse_archetype("NightOwl") == Archetype::NightOwl);
  CHECK_FALSE(parse_archetype("Owl").has_value());
}
