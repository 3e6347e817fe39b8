#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>

#include "scd/kernels.hpp"
#include "scd/model.hpp"

namespace scd {

enum class TripCategory { OneDay, TwoDay, MultiDay, Commuting, Noise };

std::string_view to_string(TripCategory c);
std::optional<TripCategory> parse_trip_category(std::string_view s);

/// Thresholds that turn a centroid's weekly heatmap into one of the four trip categories.
struct CategoryRules {
  double active_day_fraction = 0.1;   // a day is active when it holds this share of mass
  int min_active_weekdays = 4;
  double weekend_max_fraction = 0.2;  // commuting clusters keep weekend mass below this
  int peak_separation_hours = 6;      // morning and evening modes at least this far apart
  double mode_min_fraction = 0.1;     // a local maximum of the hour marginal counts as a mode
                                      // when it holds this share of mass
};

/// sum_j v_j * c_ij
double similarity(const WeeklyProfile& profile, const ClusterCentroid& centroid);

/// Id of the most similar centroid; ties go to the lowest id and a best similarity of
/// zero goes to the noise cluster. Throws ContractViolation if the model has no noise centroid.
int assign(const WeeklyProfile& profile, const ClusterModel& model);

/// Folds one profile into centroid `id`:
///   c_j <- (n c_j + v_j) / (n + |V|_0)  where v_j != 0
///   c_j <- n c_j / (n + |V|_0)          elsewhere
/// then n <- n + |V|_0. An all-zero profile leaves the model unchanged.
void update_centroid(ClusterModel& model, int id, const WeeklyProfile& profile);

struct Classification {
  std::map<std::string, int> assignments;
  ClusterModel model;  // final model; equals the input when updates are off
};

/// One assignment pass over all profiles. With `update` set, each assignment is followed by
/// update_centroid, in ascending card_id order; without it, assignments run in parallel.
Classification classify_all(const ProfileMap& profiles, ClusterModel model, bool update,
                            Execution exec = Execution::Parallel);

TripCategory categorize(const ClusterCentroid& centroid, const CategoryRules& rules = {});

}  // namespace scd
