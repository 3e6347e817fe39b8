#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "scd/ingest.hpp"
#include "scd/metrics.hpp"

namespace scd {

/// Counts of cards moving from an early-period class (row) to a late-period class (column).
struct TransitionMatrix {
  std::vector<std::string> labels;
  std::vector<std::vector<std::uint64_t>> counts;
  /// Cards present in only one period, or carrying a label outside `labels`.
  std::size_t excluded = 0;

  std::vector<std::uint64_t> row_sums() const;
  std::vector<std::uint64_t> col_sums() const;
  std::uint64_t total() const;
  /// Throws ContractViolation for an unknown label.
  std::size_t index_of(const std::string& label) const;
};

using ClassMap = std::map<std::string, std::string>;

TransitionMatrix transition_matrix(const ClassMap& early, const ClassMap& late,
                                   const std::vector<std::string>& labels);

/// counts[a][a] / row_sum(a); UndefinedStatistic for an empty row.
double retention_rate(const TransitionMatrix& m, const std::string& label);
/// counts[from][to] / row_sum(from); UndefinedStatistic for an empty row.
double conversion_rate(const TransitionMatrix& m, const std::string& from, const std::string& to);

/// Re-buckets a matrix through a label map (e.g. cluster -> trip category).
TransitionMatrix aggregate(const TransitionMatrix& m, const std::function<std::string(const std::string&)>& coarsen,
                           const std::vector<std::string>& coarse_labels);

/// Label header row and column plus SUM marginals, e.g.
///   2010\2014,EB,NO,TI,RI,NE,SUM
void write_matrix_csv(std::ostream& out, const TransitionMatrix& m, const std::string& corner = "from\\to");
/// from,to,count in long form, one line per cell.
void write_heatmap_csv(std::ostream& out, const TransitionMatrix& m);

struct ClusterRow {
  int cluster_id = 0;
  std::size_t cards = 0;
  std::size_t metro_riders = 0;  // cards with at least one metro tap
  double metro_ratio = 0.0;
  bool empty = false;            // ratio reported as 0
};

struct PeriodClusterStats {
  std::string period;
  std::size_t population = 0;
  std::vector<ClusterRow> rows;  // ascending cluster id
};

/// Card counts and metro-rider ratio per cluster. Every id in `cluster_ids` gets a row,
/// as does every id that appears in `assignments`.
PeriodClusterStats cluster_statistics(const std::string& period, const std::map<std::string, int>& assignments,
                                      const ProfileMap& profiles, std::span<const int> cluster_ids);

struct RegularityScatter {
  std::vector<std::string> cards;
  std::vector<double> re_early, re_late, sta;
  std::optional<double> corr_re;   // corr(RE_early, RE_late); empty when undefined
  std::optional<double> corr_sta;  // corr(RE_early, Sta); empty when undefined
};

/// Pairs the scores of cards scored in both periods. Throws UndefinedStatistic with fewer
/// than two pairs.
RegularityScatter regularity_scatter(const std::map<std::string, RegularityScore>& early,
                                     const std::map<std::string, RegularityScore>& late);

}  // namespace scd
