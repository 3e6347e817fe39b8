#include "scd/ingest.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <unordered_set>

#include "scd/csv.hpp"
#include "scd/error.hpp"

namespace scd {

namespace chr = std::chrono;

std::string_view to_string(Mode m) { return m == Mode::Bus ? "bus" : "metro"; }

std::string_view to_string(EventKind e) {
  switch (e) {
    case EventKind::Boarding: return "boarding";
    case EventKind::Alighting: return "alighting";
    case EventKind::Transaction: return "transaction";
  }
  return "transaction";
}

int ScdRecord::day_of_week() const {
  auto day = chr::floor<chr::days>(timestamp);
  // iso_encoding: Monday = 1 ... Sunday = 7
  return static_cast<int>(chr::weekday{day}.iso_encoding()) - 1;
}

int ScdRecord::minute_of_day() const {
  auto day = chr::floor<chr::days>(timestamp);
  return static_cast<int>(chr::duration_cast<chr::minutes>(timestamp - day).count());
}

int ScdRecord::hour() const { return minute_of_day() / 60; }

int ScdRecord::slot() const { return day_of_week() * kHoursPerDay + hour(); }

std::uint64_t WeeklyProfile::total_taps() const {
  std::uint64_t sum = 0;
  for (auto v : slots) sum += v;
  return sum;
}

ObservationPeriod::ObservationPeriod(std::string label, chr::year_month_day week_start)
    : label_(std::move(label)), week_start_(week_start) {
  if (!week_start_.ok()) throw ContractViolation("observation period: invalid week_start date");
  if (chr::weekday{chr::sys_days{week_start_}} != chr::Monday)
    throw ContractViolation("observation period: week_start must be a Monday");
}

Timestamp ObservationPeriod::begin() const {
  return chr::time_point_cast<chr::seconds>(chr::sys_days{week_start_});
}

Timestamp ObservationPeriod::end() const { return begin() + chr::days{kDaysPerWeek}; }

namespace {

bool parse_fixed_int(std::string_view s, int& out) {
  if (s.empty()) return false;
  for (char c : s)
    if (c < '0' || c > '9') return false;
  auto v = csv::parse_number<int>(s);
  if (!v) return false;
  out = *v;
  return true;
}

bool parse_ymd(std::string_view s, chr::year_month_day& out) {
  if (s.size() != 10 || s[4] != '-' || s[7] != '-') return false;
  int y = 0, m = 0, d = 0;
  if (!parse_fixed_int(s.substr(0, 4), y) || !parse_fixed_int(s.substr(5, 2), m) ||
      !parse_fixed_int(s.substr(8, 2), d))
    return false;
  out = chr::year{y} / chr::month{static_cast<unsigned>(m)} / chr::day{static_cast<unsigned>(d)};
  return out.ok();
}

std::optional<Mode> parse_mode(std::string_view s) {
  if (s == "bus") return Mode::Bus;
  if (s == "metro") return Mode::Metro;
  return std::nullopt;
}

std::optional<EventKind> parse_event(std::string_view s) {
  if (s == "boarding") return EventKind::Boarding;
  if (s == "alighting") return EventKind::Alighting;
  if (s == "transaction") return EventKind::Transaction;
  return std::nullopt;
}

}  // namespace

chr::year_month_day parse_date(std::string_view text) {
  chr::year_month_day ymd;
  if (!parse_ymd(csv::trim(text), ymd)) throw DataError("invalid date '" + std::string(text) + "'");
  return ymd;
}

bool parse_timestamp(std::string_view text, Timestamp& out) {
  if (text.size() != 19 || text[10] != ' ' || text[13] != ':' || text[16] != ':') return false;
  chr::year_month_day ymd;
  if (!parse_ymd(text.substr(0, 10), ymd)) return false;
  int h = 0, m = 0, s = 0;
  if (!parse_fixed_int(text.substr(11, 2), h) || !parse_fixed_int(text.substr(14, 2), m) ||
      !parse_fixed_int(text.substr(17, 2), s))
    return false;
  if (h > 23 || m > 59 || s > 59) return false;
  out = chr::time_point_cast<chr::seconds>(chr::sys_days{ymd}) + chr::hours{h} + chr::minutes{m} +
        chr::seconds{s};
  return true;
}

std::string format_timestamp(Timestamp t) {
  auto day = chr::floor<chr::days>(t);
  chr::year_month_day ymd{day};
  chr::hh_mm_ss hms{t - day};
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%04d-%02u-%02u %02d:%02d:%02d", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                static_cast<int>(hms.hours().count()), static_cast<int>(hms.minutes().count()),
                static_cast<int>(hms.seconds().count()));
  return buf;
}

ParseResult parse_records(std::istream& in, const ObservationPeriod& period) {
  if (!in) throw DataError("record stream is not readable");

  ParseResult result;
  std::unordered_set<std::string> seen;
  std::size_t malformed = 0;
  bool have_header = false;
  std::size_t line_no = 0;
  std::string line;

  auto reject = [&](Diagnostic::Kind kind, std::string msg) {
    if (kind == Diagnostic::Kind::Malformed) ++malformed;
    result.diagnostics.push_back({line_no, kind, std::move(msg)});
  };

  while (std::getline(in, line)) {
    ++line_no;
    auto view = csv::trim(line);
    if (view.empty() || view.front() == '#') continue;
    if (!have_header) {
      if (view != kRecordHeader) throw DataError("missing or unexpected header: '" + line + "'");
      have_header = true;
      continue;
    }
    ++result.data_lines;

    auto f = csv::split(view);
    if (f.size() != 5) {
      reject(Diagnostic::Kind::Malformed, "expected 5 fields, got " + std::to_string(f.size()));
      continue;
    }
    ScdRecord rec;
    rec.card_id = std::string(csv::trim(f[0]));
    if (rec.card_id.empty()) {
      reject(Diagnostic::Kind::Malformed, "empty card_id");
      continue;
    }
    if (!parse_timestamp(csv::trim(f[1]), rec.timestamp)) {
      reject(Diagnostic::Kind::Malformed, "bad timestamp '" + std::string(f[1]) + "'");
      continue;
    }
    auto mode = parse_mode(csv::trim(f[2]));
    if (!mode) {
      reject(Diagnostic::Kind::Malformed, "bad mode '" + std::string(f[2]) + "'");
      continue;
    }
    rec.mode = *mode;
    rec.station_id = std::string(csv::trim(f[3]));
    auto event = parse_event(csv::trim(f[4]));
    if (!event) {
      reject(Diagnostic::Kind::Malformed, "bad event '" + std::string(f[4]) + "'");
      continue;
    }
    rec.event = *event;
    if (!period.contains(rec.timestamp)) {
      reject(Diagnostic::Kind::OutOfWindow,
             "timestamp " + std::string(f[1]) + " outside period " + period.label());
      continue;
    }
    if (!seen.insert(std::string(view)).second) ++result.duplicates;
    result.records.push_back(std::move(rec));
  }
  if (in.bad()) throw DataError("I/O error while reading records");
  if (!have_header) throw DataError("record stream has no header");
  if (result.data_lines > 0 && 2 * malformed > result.data_lines)
    throw DataError("wrong file: " + std::to_string(malformed) + " of " +
                    std::to_string(result.data_lines) + " lines are malformed");
  return result;
}

ParseResult parse_records_file(const std::string& path, const ObservationPeriod& period) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open record file " + path);
  return parse_records(in, period);
}

ProfileMap build_profiles(const std::vector<ScdRecord>& records) {
  ProfileMap profiles;
  for (const auto& r : records) {
    auto& p = profiles[r.card_id];
    p.card_id = r.card_id;
    ++p.slots[static_cast<std::size_t>(r.slot())];
    if (r.mode == Mode::Metro) ++p.metro_taps;
  }
  return profiles;
}

std::set<std::string> shared_cards(const ProfileMap& a, const ProfileMap& b) {
  std::set<std::string> out;
  auto ia = a.begin();
  auto ib = b.begin();
  while (ia != a.end() && ib != b.end()) {
    if (ia->first < ib->first) {
      ++ia;
    } else if (ib->first < ia->first) {
      ++ib;
    } else {
      out.insert(out.end(), ia->first);
      ++ia;
      ++ib;
    }
  }
  return out;
}

void write_profiles_csv(std::ostream& out, const ProfileMap& profiles) {
  out << "card_id";
  for (int j = 0; j < kSlotsPerWeek; ++j) out << ",v" << j;
  out << ",metro_taps\n";
  for (const auto& [id, p] : profiles) {
    out << id;
    for (auto v : p.slots) out << ',' << v;
    out << ',' << p.metro_taps << '\n';
  }
}

ProfileMap read_profiles_csv(std::istream& in) {
  ProfileMap profiles;
  std::string line;
  if (!std::getline(in, line)) throw DataError("profile CSV is empty");
  if (csv::split(csv::trim(line)).size() != kSlotsPerWeek + 2)
    throw DataError("profile CSV header has the wrong column count");
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    auto view = csv::trim(line);
    if (view.empty()) continue;
    auto f = csv::split(view);
    if (f.size() != kSlotsPerWeek + 2)
      throw DataError("profile CSV line " + std::to_string(line_no) + ": wrong column count");
    WeeklyProfile p;
    p.card_id = std::string(f[0]);
    for (int j = 0; j < kSlotsPerWeek; ++j) {
      auto v = csv::parse_number<std::uint32_t>(f[static_cast<std::size_t>(j) + 1]);
      if (!v) throw DataError("profile CSV line " + std::to_string(line_no) + ": bad slot value");
      p.slots[static_cast<std::size_t>(j)] = *v;
    }
    auto m = csv::parse_number<std::uint32_t>(f.back());
    if (!m) throw DataError("profile CSV line " + std::to_string(line_no) + ": bad metro_taps");
    p.metro_taps = *m;
    profiles.emplace(p.card_id, std::move(p));
  }
  return profiles;
}

std::map<std::string, std::vector<ScdRecord>> group_by_card(const std::vector<ScdRecord>& records) {
  std::map<std::string, std::vector<ScdRecord>> groups;
  for (const auto& r : records) groups[r.card_id].push_back(r);
  for (auto& [id, recs] : groups)
    std::stable_sort(recs.begin(), recs.end(),
                     [](const ScdRecord& a, const ScdRecord& b) { return a.timestamp < b.timestamp; });
  return groups;
}

}  // namespace scd
