#pragma once

#include <atomic>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "scd/metrics.hpp"

namespace scd {

enum class Execution { Serial, Parallel };

/// Symmetric, non-negative dissimilarity over a fixed set of points.
/// distance() must be safe to call concurrently.
class DistanceOracle {
 public:
  virtual ~DistanceOracle() = default;
  virtual std::size_t size() const = 0;
  virtual double distance(std::size_t i, std::size_t j) const = 0;
};

/// Transaction Distance over a sample of weekly profiles.
class TransactionDistanceOracle final : public DistanceOracle {
 public:
  TransactionDistanceOracle(std::span<const WeeklyProfile> profiles, TransactionDistanceParams params);

  std::size_t size() const override { return points_.size(); }
  double distance(std::size_t i, std::size_t j) const override {
    return transaction_distance(points_[i], points_[j], k_);
  }

 private:
  std::vector<SparseProfile> points_;
  double k_;
};

/// Wraps a plain callable; convenient for synthetic geometric data.
class CallbackOracle final : public DistanceOracle {
 public:
  CallbackOracle(std::size_t n, std::function<double(std::size_t, std::size_t)> fn)
      : n_(n), fn_(std::move(fn)) {}
  std::size_t size() const override { return n_; }
  double distance(std::size_t i, std::size_t j) const override { return fn_(i, j); }

 private:
  std::size_t n_;
  std::function<double(std::size_t, std::size_t)> fn_;
};

/// Forwards to another oracle and counts calls.
class CountingOracle final : public DistanceOracle {
 public:
  explicit CountingOracle(const DistanceOracle& inner) : inner_(inner) {}
  std::size_t size() const override { return inner_.size(); }
  double distance(std::size_t i, std::size_t j) const override {
    calls_.fetch_add(1, std::memory_order_relaxed);
    return inner_.distance(i, j);
  }
  std::uint64_t calls() const { return calls_.load(); }
  void reset() { calls_.store(0); }

 private:
  const DistanceOracle& inner_;
  mutable std::atomic<std::uint64_t> calls_{0};
};

/// out[t] = distance(from, targets[t]).
void distance_row(const DistanceOracle& oracle, std::size_t from, std::span<const std::size_t> targets,
                  std::span<double> out, Execution exec = Execution::Parallel);

/// Upper triangle (i < j) in row-major order; entry (i, j) is at condensed_index(n, i, j).
std::vector<double> pairwise_condensed(const DistanceOracle& oracle, Execution exec = Execution::Parallel);

inline std::size_t condensed_index(std::size_t n, std::size_t i, std::size_t j) {
  if (i > j) std::swap(i, j);
  return i * n - i * (i + 1) / 2 + (j - i - 1);
}

/// Number of threads the Parallel policy will use.
int parallel_threads();

}  // namespace scd
