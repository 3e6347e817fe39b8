#pragma once

#include <array>
#include <chrono>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace scd {

inline constexpr int kHoursPerDay = 24;
inline constexpr int kDaysPerWeek = 7;
inline constexpr int kSlotsPerWeek = kHoursPerDay * kDaysPerWeek;  // 168

enum class Mode { Bus, Metro };
enum class EventKind { Boarding, Alighting, Transaction };

std::string_view to_string(Mode m);
std::string_view to_string(EventKind e);

// Local wall-clock time; no time zone is attached to the source data.
using Timestamp = std::chrono::sys_seconds;

/// One anonymized tap event.
struct ScdRecord {
  std::string card_id;
  Timestamp timestamp;
  Mode mode = Mode::Bus;
  std::string station_id;
  EventKind event = EventKind::Transaction;

  /// Day of week with Monday = 0.
  int day_of_week() const;
  int hour() const;
  int minute_of_day() const;
  /// day_of_week() * 24 + hour()
  int slot() const;

  friend bool operator==(const ScdRecord&, const ScdRecord&) = default;
};

using Slots = std::array<std::uint32_t, kSlotsPerWeek>;

/// Per-hour tap counts of one card over one week.
struct WeeklyProfile {
  std::string card_id;
  Slots slots{};
  std::uint32_t metro_taps = 0;

  std::uint64_t total_taps() const;
  bool empty() const { return total_taps() == 0; }

  friend bool operator==(const WeeklyProfile&, const WeeklyProfile&) = default;
};

/// A labelled one-week observation window [week_start, week_start + 7d).
class ObservationPeriod {
 public:
  /// Throws ContractViolation if week_start is not a Monday.
  ObservationPeriod(std::string label, std::chrono::year_month_day week_start);

  const std::string& label() const { return label_; }
  std::chrono::year_month_day week_start() const { return week_start_; }
  Timestamp begin() const;
  Timestamp end() const;
  bool contains(Timestamp t) const { return t >= begin() && t < end(); }

 private:
  std::string label_;
  std::chrono::year_month_day week_start_;
};

/// Parses "YYYY-MM-DD". Throws DataError on malformed input.
std::chrono::year_month_day parse_date(std::string_view text);
/// Parses "YYYY-MM-DD HH:MM:SS". Returns false on malformed input.
bool parse_timestamp(std::string_view text, Timestamp& out);
std::string format_timestamp(Timestamp t);

struct Diagnostic {
  enum class Kind { Malformed, OutOfWindow };
  std::size_t line = 0;  // 1-based, header is line 1
  Kind kind = Kind::Malformed;
  std::string message;
};

struct ParseResult {
  std::vector<ScdRecord> records;
  std::vector<Diagnostic> diagnostics;
  /// Accepted records that exactly repeat an earlier accepted line. They are kept.
  std::size_t duplicates = 0;
  std::size_t data_lines = 0;
};

inline constexpr std::string_view kRecordHeader = "card_id,timestamp,mode,station_id,event";

/// Reads the record CSV. Lines starting with '#' and blank lines are skipped.
/// Bad lines become diagnostics; throws DataError when the stream is unreadable,
/// the header is missing, or more than half of the data lines are malformed.
ParseResult parse_records(std::istream& in, const ObservationPeriod& period);
ParseResult parse_records_file(const std::string& path, const ObservationPeriod& period);

using ProfileMap = std::map<std::string, WeeklyProfile>;

ProfileMap build_profiles(const std::vector<ScdRecord>& records);

std::set<std::string> shared_cards(const ProfileMap& a, const ProfileMap& b);

/// card_id,v0,...,v167,metro_taps
void write_profiles_csv(std::ostream& out, const ProfileMap& profiles);
ProfileMap read_profiles_csv(std::istream& in);

/// Records grouped by card, each group sorted by timestamp.
std::map<std::string, std::vector<ScdRecord>> group_by_card(const std::vector<ScdRecord>& records);

}  // namespace scd
