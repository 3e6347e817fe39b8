#include "scd/classify.hpp"

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdlib>
#include <vector>

#include "scd/error.hpp"

namespace scd {

std::string_view to_string(TripCategory c) {
  switch (c) {
    case TripCategory::OneDay: return "OneDay";
    case TripCategory::TwoDay: return "TwoDay";
    case TripCategory::MultiDay: return "MultiDay";
    case TripCategory::Commuting: return "Commuting";
    case TripCategory::Noise: return "Noise";
  }
  return "Noise";
}

std::optional<TripCategory> parse_trip_category(std::string_view s) {
  for (auto c : {TripCategory::OneDay, TripCategory::TwoDay, TripCategory::MultiDay,
                 TripCategory::Commuting, TripCategory::Noise})
    if (to_string(c) == s) return c;
  return std::nullopt;
}

double similarity(const WeeklyProfile& profile, const ClusterCentroid& centroid) {
  double s = 0.0;
  for (std::size_t j = 0; j < kSlotsPerWeek; ++j)
    if (profile.slots[j] != 0) s += profile.slots[j] * centroid.weights[j];
  return s;
}

int assign(const WeeklyProfile& profile, const ClusterModel& model) {
  bool has_noise = false;
  int best_id = kNoiseClusterId;
  double best = 0.0;
  for (const auto& c : model) {
    if (c.is_noise()) {
      has_noise = true;
      continue;
    }
    const double s = similarity(profile, c);
    if (s > best || (s == best && s > 0.0 && c.id < best_id)) {
      best = s;
      best_id = c.id;
    }
  }
  if (!has_noise) throw ContractViolation("assign: model lacks the noise cluster");
  return best > 0.0 ? best_id : kNoiseClusterId;
}

void update_centroid(ClusterModel& model, int id, const WeeklyProfile& profile) {
  if (id == kNoiseClusterId) throw ContractViolation("update_centroid: the noise cluster is never updated");
  auto it = std::find_if(model.begin(), model.end(), [id](const ClusterCentroid& c) { return c.id == id; });
  if (it == model.end()) throw ContractViolation("update_centroid: unknown cluster id " + std::to_string(id));

  const auto nnz = static_cast<double>(
      std::count_if(profile.slots.begin(), profile.slots.end(), [](auto v) { return v != 0; }));
  if (nnz == 0.0) return;
  const double n = it->n;
  const double denom = n + nnz;
  for (std::size_t j = 0; j < kSlotsPerWeek; ++j)
    it->weights[j] = (n * it->weights[j] + profile.slots[j]) / denom;
  it->n = denom;
}

Classification classify_all(const ProfileMap& profiles, ClusterModel model, bool update, Execution exec) {
  Classification out;
  if (update) {
    for (const auto& [id, p] : profiles) {
      const int c = assign(p, model);
      out.assignments.emplace_hint(out.assignments.end(), id, c);
      if (c != kNoiseClusterId) update_centroid(model, c, p);
    }
    out.model = std::move(model);
    return out;
  }

  std::vector<const WeeklyProfile*> items;
  items.reserve(profiles.size());
  for (const auto& [id, p] : profiles) items.push_back(&p);
  std::vector<int> ids(items.size());
  const auto n = static_cast<std::ptrdiff_t>(items.size());
  if (exec == Execution::Parallel) {
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) ids[static_cast<std::size_t>(i)] = assign(*items[static_cast<std::size_t>(i)], model);
  } else {
    for (std::ptrdiff_t i = 0; i < n; ++i) ids[static_cast<std::size_t>(i)] = assign(*items[static_cast<std::size_t>(i)], model);
  }
  for (std::size_t i = 0; i < items.size(); ++i)
    out.assignments.emplace_hint(out.assignments.end(), items[i]->card_id, ids[i]);
  out.model = std::move(model);
  return out;
}

TripCategory categorize(const ClusterCentroid& centroid, const CategoryRules& rules) {
  std::array<double, kDaysPerWeek> day{};
  std::array<double, kHoursPerDay> hour{};
  double total = 0.0;
  for (int d = 0; d < kDaysPerWeek; ++d)
    for (int h = 0; h < kHoursPerDay; ++h) {
      const double w = centroid.weights[static_cast<std::size_t>(d * kHoursPerDay + h)];
      day[static_cast<std::size_t>(d)] += w;
      hour[static_cast<std::size_t>(h)] += w;
      total += w;
    }
  if (centroid.is_noise() || !(total > 0.0)) return TripCategory::Noise;

  int active = 0, active_weekdays = 0;
  for (int d = 0; d < kDaysPerWeek; ++d) {
    if (day[static_cast<std::size_t>(d)] >= rules.active_day_fraction * total) {
      ++active;
      if (d < 5) ++active_weekdays;
    }
  }
  const double weekend = (day[5] + day[6]) / total;

  std::vector<int> modes;
  for (int h = 0; h < kHoursPerDay; ++h) {
    const double v = hour[static_cast<std::size_t>(h)];
    const double left = h > 0 ? hour[static_cast<std::size_t>(h - 1)] : 0.0;
    const double right = h + 1 < kHoursPerDay ? hour[static_cast<std::size_t>(h + 1)] : 0.0;
    if (v >= rules.mode_min_fraction * total && v >= left && v >= right) modes.push_back(h);
  }
  bool two_peaks = false;
  for (std::size_t a = 0; a < modes.size() && !two_peaks; ++a)
    for (std::size_t b = a + 1; b < modes.size(); ++b)
      if (modes[b] - modes[a] >= rules.peak_separation_hours) {
        two_peaks = true;
        break;
      }

  if (active_weekdays >= rules.min_active_weekdays && weekend < rules.weekend_max_fraction && two_peaks)
    return TripCategory::Commuting;
  if (active == 1) return TripCategory::OneDay;
  if (active == 2) return TripCategory::TwoDay;
  return TripCategory::MultiDay;
}

}  // namespace scd
