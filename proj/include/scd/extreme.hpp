#pragma once

#include <array>
#include <optional>
#include <string_view>
#include <vector>

#include "scd/ingest.hpp"

namespace scd {

/// Early Bird, Night Owl, Tireless Itinerant, Recurring Itinerant, Non-Extreme.
enum class ExtremeClass { EB, NO, TI, RI, NE };

inline constexpr std::array<ExtremeClass, 5> kExtremeClasses = {
    ExtremeClass::EB, ExtremeClass::NO, ExtremeClass::TI, ExtremeClass::RI, ExtremeClass::NE};

std::string_view to_string(ExtremeClass c);
std::optional<ExtremeClass> parse_extreme_class(std::string_view s);

struct ExtremeRuleConfig {
  int eb_cutoff_hour = 6;       // first weekday tap strictly before this hour
  int no_cutoff_hour = 22;      // last weekday tap at or after this hour
  int min_days = 3;             // "more than two" of the qualifying days
  int ti_min_duration_minutes = 90;
  int ri_min_weekday_trips = 30;
  int chain_gap_minutes = 180;  // max gap between chained bare transactions

  void validate() const;
};

struct TripDuration {
  Timestamp start;
  int minutes = 0;
};

/// Boarding/alighting pairs on the same day give alight - board. Bare transactions on
/// the same day no more than chain_gap_minutes apart are chained, and a chain of two or
/// more taps gives its span. Records must be sorted by timestamp.
std::vector<TripDuration> trip_duration_estimates(const std::vector<ScdRecord>& records,
                                                  int chain_gap_minutes = 180);

/// Rules are checked in the order EB, NO, TI, RI; the first that fires wins.
ExtremeClass classify_extreme(const WeeklyProfile& profile, const std::vector<ScdRecord>& records,
                              const ExtremeRuleConfig& cfg = {});

}  // namespace scd
