#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "scd/ingest.hpp"

namespace scd {

/// Weight k balancing index gaps against magnitude differences, k in [0, 3].
struct TransactionDistanceParams {
  double k = 1.0;

  /// Throws ContractViolation when k is outside [0, 3].
  void validate() const;
};

/// Non-zero entries of a weekly profile, sorted by slot.
struct SparseProfile {
  std::vector<std::uint8_t> slots;
  std::vector<std::uint32_t> counts;

  static SparseProfile from_dense(std::span<const std::uint32_t> dense);
  static SparseProfile from_profile(const WeeklyProfile& p) { return from_dense(p.slots); }
  std::size_t nnz() const { return slots.size(); }
};

/// Transaction Distance over two 168-slot count vectors, evaluated position by
/// position. Serial reference; throws ContractViolation unless both have 168 entries.
double transaction_distance(std::span<const std::uint32_t> u, std::span<const std::uint32_t> v,
                            const TransactionDistanceParams& params);

/// Same quantity computed by merging the two supports; O(nnz(u) + nnz(v)).
double transaction_distance(const SparseProfile& u, const SparseProfile& v, double k);

struct RegularityScore {
  double W = 0.0;        // travel days / 7
  double D_sd = 0.0;     // population std of per-day tap counts
  double DIST_sd = 0.0;  // population std of pairwise distances between travel days
  double RE = 0.0;       // W * exp(-D_sd) * exp(-DIST_sd)
};

/// Each travel day's 24 hourly counts are laid into slots 0..23 of a weekly vector and
/// compared pairwise with the Transaction Distance; identical days are at distance 0.
/// Throws ContractViolation for a profile without taps.
RegularityScore regularity(const WeeklyProfile& profile, const TransactionDistanceParams& params);

struct StabilityScore {
  double re_early = 0.0;
  double re_late = 0.0;
  double sta = 0.0;
};

StabilityScore stability(const RegularityScore& early, const RegularityScore& late);

/// Pearson product-moment correlation. Throws ContractViolation on size mismatch or
/// fewer than two samples, UndefinedStatistic when either side has zero variance.
double pearson(std::span<const double> xs, std::span<const double> ys);

/// Divide-by-N standard deviation; 0 for an empty input.
double population_stddev(std::span<const double> values);

}  // namespace scd
