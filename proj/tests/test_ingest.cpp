#include <algorithm>
#include <random>
#include <sstream>

#include "doctest.h"
#include "scd/error.hpp"
#include "scd/ingest.hpp"

using namespace scd;
using namespace std::chrono;

namespace {

ObservationPeriod week() { return ObservationPeriod("w", year{2014} / April / 7); }  // a Monday

std::string header() { return std::string(kRecordHeader) + "\n"; }

ScdRecord rec(std::string card, std::string ts, Mode mode = Mode::Bus) {
  ScdRecord r;
  r.card_id = std::move(card);
  REQUIRE(parse_timestamp(ts, r.timestamp));
  r.mode = mode;
  r.station_id = "S1";
  return r;
}

}  // namespace

TEST_CASE("observation period must start on a Monday") {
  CHECK_NOTHROW(ObservationPeriod("ok", year{2014} / April / 7));
  CHECK_THROWS_AS(ObservationPeriod("bad", year{2014} / April / 8), ContractViolation);
  auto p = week();
  Timestamp t;
  REQUIRE(parse_timestamp("2014-04-14 00:00:00", t));
  CHECK_FALSE(p.contains(t));  // week_start + 7d is outside
  REQUIRE(parse_timestamp("2014-04-13 23:59:59", t));
  CHECK(p.contains(t));
}

TEST_CASE("parse_records: header plus one valid line") {
  std::istringstream in(header() + "A,2014-04-07 08:30:00,bus,S1,transaction\n");
  auto r = parse_records(in, week());
  REQUIRE(r.records.size() == 1);
  CHECK(r.diagnostics.empty());
  CHECK(r.records[0].card_id == "A");
  CHECK(r.records[0].slot() == 8);
}

TEST_CASE("parse_records: out-of-window line becomes a diagnostic") {
  std::istringstream in(header() + "A,2014-04-14 08:30:00,bus,S1,transaction\n");
  auto r = parse_records(in, week());
  CHECK(r.records.empty());
  REQUIRE(r.diagnostics.size() == 1);
  CHECK(r.diagnostics[0].kind == Diagnostic::Kind::OutOfWindow);
  CHECK(r.diagnostics[0].line == 2);
}

TEST_CASE("parse_records: 10 lines with 3 bad timestamps") {
  std::istringstream in(header() +
                        "C0,2014-04-07 09:00:00,metro,S,boarding\n"
                        "C1,2014-04-07 25:00:00,metro,S,boarding\n"
                        "C2,2014-04-09 09:00:00,metro,S,alighting\n"
                        "C3,2014-04-08 09:00:00,bus,S,transaction\n"
                        "C4,2014-04-07 12:61:00,bus,S,transaction\n"
                        "C5,2014-04-10 09:00:00,bus,S,transaction\n"
                        "C6,2014-04-11 09:00:00,bus,S,transaction\n"
                        "C7,2014-04-12 09:00:00,bus,S,transaction\n"
                        "C8,2014-04-13 09:00:00,bus,S,transaction\n"
                        "C9,garbage,bus,S,transaction\n");
  auto r = parse_records(in, week());
  CHECK(r.records.size() == 7);
  CHECK(r.diagnostics.size() == 3);
  CHECK(std::all_of(r.diagnostics.begin(), r.diagnostics.end(),
                    [](const Diagnostic& d) { return d.kind == Diagnostic::Kind::Malformed; }));
}

TEST_CASE("parse_records: fatal errors") {
  SUBCASE("missing header") {
    std::istringstream in("A,2014-04-07 08:30:00,bus,S1,transaction\n");
    CHECK_THROWS_AS(parse_records(in, week()), DataError);
  }
  SUBCASE("mostly malformed") {
    std::istringstream in(header() + "x\ny\nA,2014-04-07 08:30:00,bus,S1,transaction\n");
    CHECK_THROWS_AS(parse_records(in, week()), DataError);
  }
  SUBCASE("exactly half malformed is tolerated") {
    std::istringstream in(header() + "x\nA,2014-04-07 08:30:00,bus,S1,transaction\n");
    CHECK(parse_records(in, week()).records.size() == 1);
  }
  SUBCASE("unreadable file") { CHECK_THROWS_AS(parse_records_file("/nonexistent/file.csv", week()), DataError); }
}

TEST_CASE("parse_records: comments skipped, duplicates kept and counted, bad enums rejected") {
  std::istringstream in("# generator=test\n" + header() +
                        "A,2014-04-07 08:30:00,bus,S1,transaction\n"
                        "A,2014-04-07 08:30:00,bus,S1,transaction\n"
                        "A,2014-04-07 08:30:00,tram,S1,transaction\n"
                        "A,2014-04-07 08:30:00,bus,S1,tapout\n"
                        ",2014-04-07 08:30:00,bus,S1,transaction\n"
                        "A,2014-04-08 08:30:00,bus,S1,transaction\n"
                        "A,2014-04-09 08:30:00,bus,S1,transaction\n");
  auto r = parse_records(in, week());
  CHECK(r.records.size() == 4);
  CHECK(r.duplicates == 1);
  CHECK(r.diagnostics.size() == 3);
}

TEST_CASE("build_profiles: slot indexing") {
  SUBCASE("single tap Monday 08:30") {
    auto m = build_profiles({rec("A", "2014-04-07 08:30:00")});
    REQUIRE(m.size() == 1);
    const auto& p = m.at("A");
    CHECK(p.slots[8] == 1);
    CHECK(p.total_taps() == 1);
  }
  SUBCASE("two taps Tuesday 09:05 and 09:40") {
    auto m = build_profiles({rec("A", "2014-04-08 09:05:00"), rec("A", "2014-04-08 09:40:00")});
    CHECK(m.at("A").slots[1 * 24 + 9] == 2);
    CHECK(m.at("A").total_taps() == 2);
  }
  SUBCASE("two cards, metro counted") {
    auto m = build_profiles({rec("A", "2014-04-07 08:30:00", Mode::Metro), rec("B", "2014-04-13 23:10:00"),
                             rec("A", "2014-04-09 18:00:00")});
    REQUIRE(m.size() == 2);
    CHECK(m.at("A").total_taps() == 2);
    CHECK(m.at("A").metro_taps == 1);
    CHECK(m.at("B").slots[167] == 1);
  }
  CHECK(build_profiles({}).empty());
}

TEST_CASE("build_profiles: conservation and order independence") {
  std::mt19937 rng(7);
  std::vector<ScdRecord> records;
  const auto start = week().begin();
  for (int i = 0; i < 2000; ++i) {
    ScdRecord r;
    r.card_id = "C" + std::to_string(rng() % 50);
    r.timestamp = start + seconds{static_cast<long>(rng() % (7 * 86400))};
    r.mode = rng() % 2 ? Mode::Bus : Mode::Metro;
    records.push_back(r);
  }
  auto a = build_profiles(records);
  std::uint64_t mass = 0;
  for (const auto& [id, p] : a) mass += p.total_taps();
  CHECK(mass == records.size());
  for (const auto& r : records) CHECK(a.at(r.card_id).slots[static_cast<std::size_t>(r.slot())] >= 1);

  std::shuffle(records.begin(), records.end(), rng);
  auto b = build_profiles(records);
  std::ostringstream sa, sb;
  write_profiles_csv(sa, a);
  write_profiles_csv(sb, b);
  CHECK(sa.str() == sb.str());

  std::istringstream back(sa.str());
  CHECK(read_profiles_csv(back) == a);
}

TEST_CASE("shared_cards") {
  auto m = [](std::initializer_list<const char*> ids) {
    ProfileMap out;
    for (auto id : ids) out[id].card_id = id;
    return out;
  };
  CHECK(shared_cards(m({"A", "B"}), m({"A", "B"})) == std::set<std::string>{"A", "B"});
  CHECK(shared_cards(m({"A"}), m({"B"})).empty());
  CHECK(shared_cards(m({"A", "B", "C"}), m({"B", "C", "D"})) == std::set<std::string>{"B", "C"});
}

TEST_CASE("timestamp round trip") {
  Timestamp t;
  REQUIRE(parse_timestamp("2010-12-31 23:59:07", t));
  CHECK(format_timestamp(t) == "2010-12-31 23:59:07");
  CHECK_FALSE(parse_timestamp("2010-02-30 10:00:00", t));
  CHECK_FALSE(parse_timestamp("2010-01-01T10:00:00", t));
  CHECK_FALSE(parse_timestamp("2010-01-01 10:60:00", t));
}
