#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "scd/kernels.hpp"
#include "scd/model.hpp"

namespace scd {

/// Parameters of the simplified, smoothed OPTICS variant.
struct SsOpticsParams {
  double epsilon = 100.0;  // neighbourhood radius
  int window = 41;         // mean-filter width S, odd
  /// Explicit valley threshold on the smoothed curve. When unset see default_tau.
  std::optional<double> tau;
  double tau_factor = 0.75;

  void validate() const;
  int half_window() const { return (window - 1) / 2; }
};

struct OpticsParams {
  double epsilon = 100.0;
  int min_pts = 4;

  void validate() const;
};

/// Emission order with per-point reachability. rd[i] and rd_smoothed[i] refer to the
/// point at order[i]; an empty optional is UNDEFINED (start of a new region).
struct ReachabilityPlot {
  std::vector<std::size_t> order;
  std::vector<std::optional<double>> rd;
  std::vector<double> rd_smoothed;

  std::size_t size() const { return order.size(); }
};

/// Receives every emission of the ordering loop. `seed_rds` holds the reachability of the
/// seeds still waiting after this one was popped (empty when the point started a region).
class OrderingObserver {
 public:
  virtual ~OrderingObserver() = default;
  virtual void on_emit(std::size_t point, std::optional<double> rd, std::span<const double> seed_rds) = 0;
};

/// Simplified OPTICS ordering. A point's reachability is lowered to its plain distance from
/// each emitted point within epsilon; the lowest seed (ties: lowest index) is emitted next,
/// and when no seed is waiting the lowest unprocessed index starts a new region.
/// Each emission evaluates one distance row against the unprocessed points, so the oracle
/// sees exactly n(n-1)/2 calls.
ReachabilityPlot ss_optics_order(const DistanceOracle& oracle, const SsOpticsParams& params,
                                 Execution exec = Execution::Parallel,
                                 OrderingObserver* observer = nullptr);

/// Classical OPTICS with core distances; the comparison baseline. The MinPts-th neighbour
/// counts the point itself. Uses a cached pairwise matrix, so keep n moderate.
ReachabilityPlot optics_order(const DistanceOracle& oracle, const OpticsParams& params,
                              Execution exec = Execution::Parallel);

/// Truncated centred mean filter of width `window`; UNDEFINED values count as epsilon.
void smooth_rd(ReachabilityPlot& plot, int window, double epsilon);

/// Half-open range of ordering positions.
struct PositionRange {
  std::size_t begin = 0;
  std::size_t end = 0;
  std::size_t size() const { return end - begin; }
  friend bool operator==(const PositionRange&, const PositionRange&) = default;
};

struct ClusterExtraction {
  std::vector<PositionRange> clusters;
  std::vector<std::size_t> noise;  // point indices, ascending
  double tau = 0.0;
};

double median(std::vector<double> values);

/// Maximal runs with rd_smoothed < tau, shifted right by (S-1)/2 and clipped to the
/// ordering; runs no longer than (S-1)/2 are dropped.
ClusterExtraction extract_clusters(const ReachabilityPlot& plot, const SsOpticsParams& params);

/// factor * median(curve). When the median is zero the factor applies to the smallest
/// positive value instead (or to 1 for an all-zero curve), so zero plateaus still count
/// as valleys.
double default_tau(std::span<const double> curve, double factor);

/// Number of maximal runs below tau, without shift or size floor. Used to compare the
/// shape of two reachability curves.
std::size_t count_valleys(std::span<const double> curve, double tau);

struct SampleClustering {
  ReachabilityPlot plot;
  ClusterExtraction extraction;
  /// Learned centroids with ids 1..m (m <= 33), in ordering position. Does not include
  /// the noise centroid.
  ClusterModel centroids;
  /// Member point indices of each centroid, parallel to `centroids`.
  std::vector<std::vector<std::size_t>> members;
  /// Extracted clusters beyond the 33 largest, folded into noise.
  std::size_t dropped_clusters = 0;
};

/// Orders, smooths and extracts a sample under the Transaction Distance, then turns
/// each extracted cluster into a centroid. Throws ContractViolation when the sample is
/// smaller than the window.
SampleClustering cluster_sample(std::span<const WeeklyProfile> sample, const SsOpticsParams& params,
                                const TransactionDistanceParams& distance,
                                Execution exec = Execution::Parallel);

/// position,point_index,rd,rd_smoothed with UNDEFINED written as an empty field.
void write_reachability_csv(std::ostream& out, const ReachabilityPlot& plot);

}  // namespace scd
