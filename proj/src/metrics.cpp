#include "scd/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

#include "scd/error.hpp"

namespace scd {

namespace {

constexpr int kLast = kSlotsPerWeek - 1;  // 167

// Gap charged when no non-zero component exists on one side of position i.
constexpr int boundary_gap(int i) { return std::min(i, kLast - i); }

}  // namespace

void TransactionDistanceParams::validate() const {
  if (!(k >= 0.0 && k <= 3.0)) throw ContractViolation("transaction distance: k must lie in [0, 3]");
}

SparseProfile SparseProfile::from_dense(std::span<const std::uint32_t> dense) {
  if (dense.size() != kSlotsPerWeek) throw ContractViolation("profile must have 168 slots");
  SparseProfile s;
  for (std::size_t j = 0; j < dense.size(); ++j) {
    if (dense[j] != 0) {
      s.slots.push_back(static_cast<std::uint8_t>(j));
      s.counts.push_back(dense[j]);
    }
  }
  return s;
}

double transaction_distance(std::span<const std::uint32_t> u, std::span<const std::uint32_t> v,
                            const TransactionDistanceParams& params) {
  if (u.size() != kSlotsPerWeek || v.size() != kSlotsPerWeek)
    throw ContractViolation("transaction distance: both vectors must have 168 slots");
  params.validate();

  double total = 0.0;
  for (int i = 0; i < kSlotsPerWeek; ++i) {
    const auto ui = u[static_cast<std::size_t>(i)];
    const auto vi = v[static_cast<std::size_t>(i)];
    if (ui == vi) continue;

    int gap = 0;
    if (ui == 0 || vi == 0) {
      // Gaps are measured to the non-zero components of the vector that is zero here.
      auto other = (ui == 0) ? u : v;
      int prev = boundary_gap(i);
      for (int j = i - 1; j >= 0; --j) {
        if (other[static_cast<std::size_t>(j)] != 0) {
          prev = i - j;
          break;
        }
      }
      int next = boundary_gap(i);
      for (int j = i + 1; j < kSlotsPerWeek; ++j) {
        if (other[static_cast<std::size_t>(j)] != 0) {
          next = j - i;
          break;
        }
      }
      gap = std::min(prev, next);
    }
    const double diff = ui > vi ? double(ui - vi) : double(vi - ui);
    total += gap + params.k * diff;
  }
  return total;
}

double transaction_distance(const SparseProfile& u, const SparseProfile& v, double k) {
  const std::size_t nu = u.nnz();
  const std::size_t nv = v.nnz();
  std::size_t a = 0, b = 0;
  int last_u = -1, last_v = -1;  // most recent non-zero slot already passed in each vector
  double total = 0.0;

  while (a < nu || b < nv) {
    const int su = a < nu ? u.slots[a] : kSlotsPerWeek;
    const int sv = b < nv ? v.slots[b] : kSlotsPerWeek;
    if (su == sv) {
      const auto cu = u.counts[a], cv = v.counts[b];
      if (cu != cv) total += k * (cu > cv ? double(cu - cv) : double(cv - cu));
      last_u = su;
      last_v = sv;
      ++a;
      ++b;
    } else if (su < sv) {
      // v is zero at su; its neighbours are last_v and sv.
      const int prev = last_v >= 0 ? su - last_v : boundary_gap(su);
      const int next = sv < kSlotsPerWeek ? sv - su : boundary_gap(su);
      total += std::min(prev, next) + k * double(u.counts[a]);
      last_u = su;
      ++a;
    } else {
      const int prev = last_u >= 0 ? sv - last_u : boundary_gap(sv);
      const int next = su < kSlotsPerWeek ? su - sv : boundary_gap(sv);
      total += std::min(prev, next) + k * double(v.counts[b]);
      last_v = sv;
      ++b;
    }
  }
  return total;
}

double population_stddev(std::span<const double> values) {
  if (values.empty()) return 0.0;
  const double n = static_cast<double>(values.size());
  double mean = 0.0;
  for (double x : values) mean += x;
  mean /= n;
  double ss = 0.0;
  for (double x : values) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / n);
}

RegularityScore regularity(const WeeklyProfile& profile, const TransactionDistanceParams& params) {
  params.validate();
  if (profile.empty()) throw ContractViolation("regularity: profile has no taps");

  std::vector<double> per_day(kDaysPerWeek, 0.0);
  std::vector<SparseProfile> days;
  for (int d = 0; d < kDaysPerWeek; ++d) {
    Slots day_vec{};
    for (int h = 0; h < kHoursPerDay; ++h) {
      const auto c = profile.slots[static_cast<std::size_t>(d * kHoursPerDay + h)];
      day_vec[static_cast<std::size_t>(h)] = c;
      per_day[static_cast<std::size_t>(d)] += c;
    }
    if (per_day[static_cast<std::size_t>(d)] > 0) days.push_back(SparseProfile::from_dense(day_vec));
  }

  RegularityScore s;
  s.W = static_cast<double>(days.size()) / kDaysPerWeek;
  s.D_sd = population_stddev(per_day);

  std::vector<double> dist;
  dist.reserve(days.size() * (days.size() - 1) / 2);
  for (std::size_t i = 0; i < days.size(); ++i)
    for (std::size_t j = i + 1; j < days.size(); ++j)
      dist.push_back(transaction_distance(days[i], days[j], params.k));
  s.DIST_sd = dist.size() < 1 ? 0.0 : population_stddev(dist);

  s.RE = s.W * std::exp(-s.D_sd) * std::exp(-s.DIST_sd);
  return s;
}

StabilityScore stability(const RegularityScore& early, const RegularityScore& late) {
  if (!(early.RE > 0.0)) throw ContractViolation("stability: early regularity must be positive");
  return {early.RE, late.RE, late.RE / early.RE};
}

double pearson(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) throw ContractViolation("pearson: length mismatch");
  if (xs.size() < 2) throw ContractViolation("pearson: need at least two samples");
  const double n = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double dx = xs[i] - mx, dy = ys[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) throw UndefinedStatistic("pearson: zero variance");
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

}  // namespace scd
