#include "scd/extreme.hpp"

#include <algorithm>
#include <chrono>
#include <set>

#include "scd/error.hpp"

namespace scd {

namespace chr = std::chrono;

namespace {

constexpr int kWeekdays = 5;

bool same_day(Timestamp a, Timestamp b) {
  return chr::floor<chr::days>(a) == chr::floor<chr::days>(b);
}

int minutes_between(Timestamp a, Timestamp b) {
  return static_cast<int>(chr::duration_cast<chr::minutes>(b - a).count());
}

}  // namespace

std::string_view to_string(ExtremeClass c) {
  switch (c) {
    case ExtremeClass::EB: return "EB";
    case ExtremeClass::NO: return "NO";
    case ExtremeClass::TI: return "TI";
    case ExtremeClass::RI: return "RI";
    case ExtremeClass::NE: return "NE";
  }
  return "NE";
}

std::optional<ExtremeClass> parse_extreme_class(std::string_view s) {
  for (auto c : kExtremeClasses)
    if (to_string(c) == s) return c;
  return std::nullopt;
}

void ExtremeRuleConfig::validate() const {
  if (eb_cutoff_hour < 0 || eb_cutoff_hour >= 24 || no_cutoff_hour < 0 || no_cutoff_hour >= 24)
    throw ContractViolation("extreme rules: cutoff hours must lie in [0, 24)");
  if (min_days <= 0 || ti_min_duration_minutes <= 0 || ri_min_weekday_trips <= 0 ||
      chain_gap_minutes <= 0)
    throw ContractViolation("extreme rules: thresholds must be positive");
}

std::vector<TripDuration> trip_duration_estimates(const std::vector<ScdRecord>& records,
                                                  int chain_gap_minutes) {
  std::vector<TripDuration> out;
  const ScdRecord* boarding = nullptr;
  const ScdRecord* chain_first = nullptr;
  const ScdRecord* chain_last = nullptr;
  int chain_len = 0;

  auto flush_chain = [&] {
    if (chain_len >= 2)
      out.push_back({chain_first->timestamp, minutes_between(chain_first->timestamp, chain_last->timestamp)});
    chain_first = chain_last = nullptr;
    chain_len = 0;
  };

  for (const auto& r : records) {
    switch (r.event) {
      case EventKind::Boarding:
        boarding = &r;
        break;
      case EventKind::Alighting:
        if (boarding && same_day(boarding->timestamp, r.timestamp))
          out.push_back({boarding->timestamp, minutes_between(boarding->timestamp, r.timestamp)});
        boarding = nullptr;
        break;
      case EventKind::Transaction:
        if (chain_last && same_day(chain_last->timestamp, r.timestamp) &&
            minutes_between(chain_last->timestamp, r.timestamp) <= chain_gap_minutes) {
          chain_last = &r;
          ++chain_len;
        } else {
          flush_chain();
          chain_first = chain_last = &r;
          chain_len = 1;
        }
        break;
    }
  }
  flush_chain();
  std::stable_sort(out.begin(), out.end(),
                   [](const TripDuration& a, const TripDuration& b) { return a.start < b.start; });
  return out;
}

ExtremeClass classify_extreme(const WeeklyProfile& profile, const std::vector<ScdRecord>& records,
                              const ExtremeRuleConfig& cfg) {
  cfg.validate();

  int early_days = 0, late_days = 0;
  std::uint64_t weekday_taps = 0;
  for (int d = 0; d < kWeekdays; ++d) {
    bool early = false, late = false;
    for (int h = 0; h < kHoursPerDay; ++h) {
      const auto c = profile.slots[static_cast<std::size_t>(d * kHoursPerDay + h)];
      if (c == 0) continue;
      weekday_taps += c;
      if (h < cfg.eb_cutoff_hour) early = true;
      if (h >= cfg.no_cutoff_hour) late = true;
    }
    early_days += early;
    late_days += late;
  }
  if (early_days >= cfg.min_days) return ExtremeClass::EB;
  if (late_days >= cfg.min_days) return ExtremeClass::NO;

  auto sorted = records;
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const ScdRecord& a, const ScdRecord& b) { return a.timestamp < b.timestamp; });
  std::set<chr::sys_days> long_days;
  for (const auto& trip : trip_duration_estimates(sorted, cfg.chain_gap_minutes))
    if (trip.minutes >= cfg.ti_min_duration_minutes) long_days.insert(chr::floor<chr::days>(trip.start));
  if (static_cast<int>(long_days.size()) >= cfg.min_days) return ExtremeClass::TI;

  if (weekday_taps >= static_cast<std::uint64_t>(cfg.ri_min_weekday_trips)) return ExtremeClass::RI;
  return ExtremeClass::NE;
}

}  // namespace scd
