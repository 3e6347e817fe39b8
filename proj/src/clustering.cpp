#include "scd/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>
#include <set>

#include "scd/csv.hpp"
#include "scd/error.hpp"

namespace scd {

namespace {

constexpr double kUnreached = std::numeric_limits<double>::infinity();

}  // namespace

void SsOpticsParams::validate() const {
  if (!(epsilon > 0.0)) throw ContractViolation("ss-optics: epsilon must be positive");
  if (window < 3 || window % 2 == 0) throw ContractViolation("ss-optics: window must be odd and >= 3");
  if (tau && !(*tau > 0.0)) throw ContractViolation("ss-optics: tau must be positive");
  if (!(tau_factor > 0.0)) throw ContractViolation("ss-optics: tau_factor must be positive");
}

void OpticsParams::validate() const {
  if (!(epsilon > 0.0)) throw ContractViolation("optics: epsilon must be positive");
  if (min_pts < 2) throw ContractViolation("optics: min_pts must be >= 2");
}

ReachabilityPlot ss_optics_order(const DistanceOracle& oracle, const SsOpticsParams& params,
                                 Execution exec, OrderingObserver* observer) {
  params.validate();
  const std::size_t n = oracle.size();
  ReachabilityPlot plot;
  plot.order.reserve(n);
  plot.rd.reserve(n);

  std::vector<double> reach(n, kUnreached);
  std::vector<char> seeded(n, 0), done(n, 0);
  std::vector<std::size_t> remaining(n), where(n);
  std::iota(remaining.begin(), remaining.end(), std::size_t{0});
  std::iota(where.begin(), where.end(), std::size_t{0});
  std::vector<double> row;
  std::vector<double> seed_rds;
  std::size_t seeds = 0;
  std::size_t cursor = 0;

  while (!remaining.empty()) {
    std::size_t p = 0;
    std::optional<double> rd;
    if (seeds == 0) {
      while (done[cursor]) ++cursor;
      p = cursor;
    } else {
      std::size_t best = n;
      for (auto j : remaining) {
        if (!seeded[j]) continue;
        if (best == n || reach[j] < reach[best] || (reach[j] == reach[best] && j < best)) best = j;
      }
      p = best;
      rd = reach[p];
      --seeds;
    }

    done[p] = 1;
    const std::size_t slot = where[p];
    remaining[slot] = remaining.back();
    where[remaining[slot]] = slot;
    remaining.pop_back();

    plot.order.push_back(p);
    plot.rd.push_back(rd);
    if (observer) {
      seed_rds.clear();
      for (auto j : remaining)
        if (seeded[j]) seed_rds.push_back(reach[j]);
      observer->on_emit(p, rd, seed_rds);
    }

    row.resize(remaining.size());
    distance_row(oracle, p, remaining, row, exec);
    for (std::size_t t = 0; t < remaining.size(); ++t) {
      const double d = row[t];
      if (d > params.epsilon) continue;
      const auto j = remaining[t];
      if (d < reach[j]) reach[j] = d;
      if (!seeded[j]) {
        seeded[j] = 1;
        ++seeds;
      }
    }
  }
  return plot;
}

ReachabilityPlot optics_order(const DistanceOracle& oracle, const OpticsParams& params, Execution exec) {
  params.validate();
  const std::size_t n = oracle.size();
  const auto dist = pairwise_condensed(oracle, exec);
  auto D = [&](std::size_t i, std::size_t j) { return i == j ? 0.0 : dist[condensed_index(n, i, j)]; };

  std::vector<std::optional<double>> core(n);
  std::vector<double> near;
  for (std::size_t i = 0; i < n; ++i) {
    near.clear();
    for (std::size_t j = 0; j < n; ++j) {
      const double d = D(i, j);
      if (d <= params.epsilon) near.push_back(d);
    }
    const auto m = static_cast<std::size_t>(params.min_pts);
    if (near.size() >= m) {
      std::nth_element(near.begin(), near.begin() + static_cast<std::ptrdiff_t>(m - 1), near.end());
      core[i] = near[m - 1];
    }
  }

  ReachabilityPlot plot;
  std::vector<double> reach(n, kUnreached);
  std::vector<char> done(n, 0);
  std::set<std::pair<double, std::size_t>> seeds;

  auto expand = [&](std::size_t o) {
    if (!core[o]) return;
    for (std::size_t q = 0; q < n; ++q) {
      if (done[q]) continue;
      const double d = D(o, q);
      if (d > params.epsilon) continue;
      const double r = std::max(*core[o], d);
      if (r < reach[q]) {
        if (reach[q] != kUnreached) seeds.erase({reach[q], q});
        reach[q] = r;
        seeds.insert({r, q});
      }
    }
  };

  for (std::size_t start = 0; start < n; ++start) {
    if (done[start]) continue;
    done[start] = 1;
    plot.order.push_back(start);
    plot.rd.push_back(std::nullopt);
    expand(start);
    while (!seeds.empty()) {
      auto [r, q] = *seeds.begin();
      seeds.erase(seeds.begin());
      done[q] = 1;
      plot.order.push_back(q);
      plot.rd.push_back(r);
      expand(q);
    }
  }
  return plot;
}

void smooth_rd(ReachabilityPlot& plot, int window, double epsilon) {
  if (window < 1 || window % 2 == 0) throw ContractViolation("smooth_rd: window must be odd");
  const std::size_t n = plot.rd.size();
  const auto h = static_cast<std::size_t>((window - 1) / 2);
  std::vector<double> raw(n);
  for (std::size_t i = 0; i < n; ++i) raw[i] = plot.rd[i].value_or(epsilon);

  plot.rd_smoothed.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t lo = i >= h ? i - h : 0;
    const std::size_t hi = std::min(n - 1, i + h);
    double sum = 0.0;
    for (std::size_t j = lo; j <= hi; ++j) sum += raw[j];
    plot.rd_smoothed[i] = sum / static_cast<double>(hi - lo + 1);
  }
}

double median(std::vector<double> values) {
  if (values.empty()) return 0.0;
  const std::size_t mid = values.size() / 2;
  std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid), values.end());
  const double upper = values[mid];
  if (values.size() % 2 == 1) return upper;
  const double lower = *std::max_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lower + upper);
}

namespace {

std::vector<PositionRange> runs_below(std::span<const double> curve, double tau) {
  std::vector<PositionRange> runs;
  std::size_t i = 0;
  while (i < curve.size()) {
    if (!(curve[i] < tau)) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < curve.size() && curve[j] < tau) ++j;
    runs.push_back({i, j});
    i = j;
  }
  return runs;
}

}  // namespace

double default_tau(std::span<const double> curve, double factor) {
  const double m = median(std::vector<double>(curve.begin(), curve.end()));
  if (m > 0.0) return factor * m;
  // More than half the curve sits at exactly zero: the valleys are the zero plateaus.
  double floor = std::numeric_limits<double>::infinity();
  for (double v : curve)
    if (v > 0.0) floor = std::min(floor, v);
  return std::isinf(floor) ? factor : factor * floor;
}

std::size_t count_valleys(std::span<const double> curve, double tau) { return runs_below(curve, tau).size(); }

ClusterExtraction extract_clusters(const ReachabilityPlot& plot, const SsOpticsParams& params) {
  params.validate();
  const std::size_t n = plot.size();
  if (plot.rd_smoothed.size() != n) throw ContractViolation("extract_clusters: plot is not smoothed");

  ClusterExtraction out;
  out.tau = params.tau ? *params.tau : default_tau(plot.rd_smoothed, params.tau_factor);
  const auto shift = static_cast<std::size_t>(params.half_window());

  std::vector<char> member(n, 0);
  for (auto run : runs_below(plot.rd_smoothed, out.tau)) {
    PositionRange r{std::min(n, run.begin + shift), std::min(n, run.end + shift)};
    if (r.size() <= shift) continue;
    out.clusters.push_back(r);
    for (std::size_t pos = r.begin; pos < r.end; ++pos) member[pos] = 1;
  }
  for (std::size_t pos = 0; pos < n; ++pos)
    if (!member[pos]) out.noise.push_back(plot.order[pos]);
  std::sort(out.noise.begin(), out.noise.end());
  return out;
}

SampleClustering cluster_sample(std::span<const WeeklyProfile> sample, const SsOpticsParams& params,
                                const TransactionDistanceParams& distance, Execution exec) {
  params.validate();
  distance.validate();
  if (sample.size() < static_cast<std::size_t>(params.window))
    throw ContractViolation("cluster_sample: sample is smaller than the smoothing window");

  TransactionDistanceOracle oracle(sample, distance);
  SampleClustering result;
  result.plot = ss_optics_order(oracle, params, exec);
  smooth_rd(result.plot, params.window, params.epsilon);
  result.extraction = extract_clusters(result.plot, params);

  auto ranges = result.extraction.clusters;
  if (ranges.size() > static_cast<std::size_t>(kMaxLearnedClusters)) {
    std::stable_sort(ranges.begin(), ranges.end(),
                     [](const PositionRange& a, const PositionRange& b) { return a.size() > b.size(); });
    result.dropped_clusters = ranges.size() - kMaxLearnedClusters;
    ranges.resize(kMaxLearnedClusters);
    std::sort(ranges.begin(), ranges.end(),
              [](const PositionRange& a, const PositionRange& b) { return a.begin < b.begin; });
  }

  int id = 1;
  for (const auto& r : ranges) {
    std::vector<std::size_t> idx;
    for (std::size_t pos = r.begin; pos < r.end; ++pos) idx.push_back(result.plot.order[pos]);
    std::sort(idx.begin(), idx.end());
    std::vector<const WeeklyProfile*> members;
    members.reserve(idx.size());
    for (auto i : idx) members.push_back(&sample[i]);
    result.centroids.push_back(centroid_from_members(id++, members));
    result.members.push_back(std::move(idx));
  }
  return result;
}

void write_reachability_csv(std::ostream& out, const ReachabilityPlot& plot) {
  out << "position,point_index,rd,rd_smoothed\n";
  for (std::size_t pos = 0; pos < plot.size(); ++pos) {
    out << pos << ',' << plot.order[pos] << ',';
    if (plot.rd[pos]) out << csv::format_double(*plot.rd[pos]);
    out << ',';
    if (pos < plot.rd_smoothed.size()) out << csv::format_double(plot.rd_smoothed[pos]);
    out << '\n';
  }
}

}  // namespace scd
