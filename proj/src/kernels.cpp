#include "scd/kernels.hpp"

#include <cstddef>

#include "scd/error.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace scd {

TransactionDistanceOracle::TransactionDistanceOracle(std::span<const WeeklyProfile> profiles,
                                                     TransactionDistanceParams params)
    : k_(params.k) {
  params.validate();
  points_.reserve(profiles.size());
  for (const auto& p : profiles) points_.push_back(SparseProfile::from_profile(p));
}

int parallel_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

void distance_row(const DistanceOracle& oracle, std::size_t from, std::span<const std::size_t> targets,
                  std::span<double> out, Execution exec) {
  if (out.size() != targets.size()) throw ContractViolation("distance_row: output size mismatch");
  const auto n = static_cast<std::ptrdiff_t>(targets.size());
  if (exec == Execution::Serial) {
    for (std::ptrdiff_t t = 0; t < n; ++t) out[t] = oracle.distance(from, targets[t]);
    return;
  }
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t t = 0; t < n; ++t) out[t] = oracle.distance(from, targets[t]);
}

std::vector<double> pairwise_condensed(const DistanceOracle& oracle, Execution exec) {
  const std::size_t n = oracle.size();
  std::vector<double> out(n < 2 ? 0 : n * (n - 1) / 2);
  const auto rows = static_cast<std::ptrdiff_t>(n);
  if (exec == Execution::Serial) {
    for (std::ptrdiff_t i = 0; i < rows; ++i)
      for (std::size_t j = static_cast<std::size_t>(i) + 1; j < n; ++j)
        out[condensed_index(n, static_cast<std::size_t>(i), j)] = oracle.distance(static_cast<std::size_t>(i), j);
    return out;
  }
  // Rows shrink with i; dynamic scheduling keeps threads balanced.
#pragma omp parallel for schedule(dynamic, 16)
  for (std::ptrdiff_t i = 0; i < rows; ++i) {
    const auto ui = static_cast<std::size_t>(i);
    const std::size_t base = condensed_index(n, ui, ui + 1);
    for (std::size_t j = ui + 1; j < n; ++j) out[base + (j - ui - 1)] = oracle.distance(ui, j);
  }
  return out;
}

}  // namespace scd
