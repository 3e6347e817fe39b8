#pragma once

#include <array>
#include <iosfwd>
#include <vector>

#include "scd/ingest.hpp"

namespace scd {

/// Id reserved for the all-zero centroid that absorbs profiles overlapping nothing.
inline constexpr int kNoiseClusterId = 34;
/// Learned clusters take ids 1..kMaxLearnedClusters.
inline constexpr int kMaxLearnedClusters = kNoiseClusterId - 1;

/// Per-slot transaction incidence rates of one cluster plus its accumulated mass.
struct ClusterCentroid {
  int id = 0;
  std::array<double, kSlotsPerWeek> weights{};
  double n = 0.0;

  bool is_noise() const { return id == kNoiseClusterId; }
};

/// Learned centroids followed by the noise centroid.
using ClusterModel = std::vector<ClusterCentroid>;

ClusterCentroid make_noise_centroid();

/// Centroid of a set of member profiles: weight j is the members' tap count at slot j
/// over their total tap count; n is the members' total count of non-zero slots.
ClusterCentroid centroid_from_members(int id, const std::vector<const WeeklyProfile*>& members);

/// cluster_id,c0,...,c167,n
void write_centroids_csv(std::ostream& out, const ClusterModel& model);
ClusterModel read_centroids_csv(std::istream& in);

}  // namespace scd
