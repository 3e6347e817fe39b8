#include <algorithm>
#include <cmath>
#include <random>

#include "doctest.h"
#include "scd/error.hpp"
#include "scd/metrics.hpp"

using namespace scd;

namespace {

Slots one_hot(int slot, std::uint32_t count = 1) {
  Slots s{};
  s[static_cast<std::size_t>(slot)] = count;
  return s;
}

WeeklyProfile profile_of(const Slots& s) {
  WeeklyProfile p;
  p.card_id = "x";
  p.slots = s;
  return p;
}

Slots random_sparse(std::mt19937& rng, int max_nnz = 12) {
  Slots s{};
  const int nnz = static_cast<int>(rng() % static_cast<unsigned>(max_nnz + 1));
  for (int i = 0; i < nnz; ++i) s[rng() % kSlotsPerWeek] += 1 + rng() % 3;
  return s;
}

double both_routes(const Slots& u, const Slots& v, double k) {
  const double dense = transaction_distance(u, v, {k});
  const double sparse = transaction_distance(SparseProfile::from_dense(u), SparseProfile::from_dense(v), k);
  CHECK(dense == sparse);
  return dense;
}

}  // namespace

TEST_CASE("transaction distance: worked examples") {
  SUBCASE("identical vectors") {
    Slots u{};
    u[5] = 3;
    u[100] = 1;
    CHECK(both_routes(u, u, 1.0) == 0.0);
  }
  SUBCASE("one-hot at 10 vs one-hot at 12, k = 1") {
    // slot 10: gap to v's next non-zero (12) is 2, no previous -> min(10, 157) = 10; T = 2, A = 1
    // slot 12: gap to u's previous non-zero (10) is 2, no next -> min(12, 155) = 12; T = 2, A = 1
    CHECK(both_routes(one_hot(10), one_hot(12), 1.0) == 6.0);
  }
  SUBCASE("both non-zero at the differing slot: magnitude only") {
    Slots u{}, v{};
    for (int j : {3, 5, 40}) u[static_cast<std::size_t>(j)] = v[static_cast<std::size_t>(j)] = 1;
    u[5] = 2;
    v[5] = 5;
    CHECK(both_routes(u, v, 2.0) == 6.0);
    CHECK(both_routes(u, v, 0.5) == 1.5);
  }
  SUBCASE("no non-zero on either side: boundary gap min(i, 167 - i)") {
    CHECK(both_routes(one_hot(3), Slots{}, 0.0) == 3.0);
    CHECK(both_routes(one_hot(160), Slots{}, 0.0) == 7.0);
  }
  SUBCASE("k outside [0, 3] or wrong length is a contract violation") {
    CHECK_THROWS_AS(transaction_distance(one_hot(1), one_hot(2), {3.5}), ContractViolation);
    std::vector<std::uint32_t> short_vec(100, 0);
    CHECK_THROWS_AS(transaction_distance(short_vec, one_hot(2), {1.0}), ContractViolation);
  }
}

TEST_CASE("transaction distance: symmetry, non-negativity, route agreement on random sparse pairs") {
  std::mt19937 rng(2024);
  for (int t = 0; t < 1000; ++t) {
    const auto u = random_sparse(rng);
    const auto v = random_sparse(rng);
    const double k = (rng() % 301) / 100.0;
    const double d = both_routes(u, v, k);
    CHECK(d >= 0.0);
    CHECK(d == both_routes(v, u, k));
    CHECK(both_routes(u, u, k) == 0.0);
  }
}

TEST_CASE("transaction distance is non-decreasing in k") {
  std::mt19937 rng(99);
  for (int t = 0; t < 200; ++t) {
    const auto u = random_sparse(rng);
    auto v = random_sparse(rng);
    if (u == v) v[0] += 1;
    double prev = -1.0;
    for (double k = 0.0; k <= 3.0; k += 0.25) {
      const double d = both_routes(u, v, k);
      CHECK(d >= prev);
      prev = d;
    }
  }
}

TEST_CASE("regularity: single tap") {
  // D = [1, 0, 0, 0, 0, 0, 0]; mean 1/7; sum of squared deviations 36/49 + 6/49 = 42/49;
  // population variance 6/49, so D_sd = sqrt(6)/7. One travel day, so DIST_sd = 0.
  const double d_sd = std::sqrt(6.0) / 7.0;
  const double expected = (1.0 / 7.0) * std::exp(-d_sd);
  auto s = regularity(profile_of(one_hot(8)), {});
  CHECK(s.W == doctest::Approx(1.0 / 7.0).epsilon(1e-15));
  CHECK(s.D_sd == doctest::Approx(d_sd).epsilon(1e-15));
  CHECK(s.DIST_sd == 0.0);
  CHECK(s.RE == doctest::Approx(expected).epsilon(1e-14));
  CHECK(std::abs(s.RE - 0.10072) < 1e-4);
}

TEST_CASE("regularity: perfectly regular week") {
  Slots s{};
  for (int d = 0; d < 7; ++d) {
    s[static_cast<std::size_t>(d * 24 + 8)] = 1;
    s[static_cast<std::size_t>(d * 24 + 18)] = 1;
  }
  auto r = regularity(profile_of(s), {});
  CHECK(r.W == 1.0);
  CHECK(r.D_sd == 0.0);
  CHECK(r.DIST_sd == 0.0);
  CHECK(std::abs(r.RE - 1.0) <= 1e-12);
}

TEST_CASE("regularity: two travel days, hand evaluation") {
  // Mon 08 x1, Tue 08 x1 + 18 x1. D = [1,2,0,0,0,0,0]: variance 26/49.
  // Day vectors differ only at hour 18: gap back to 8 is 10, forward boundary min(18,149) = 18,
  // so the single pairwise distance is 10 + k; DIST_sd = 0.
  Slots s{};
  s[8] = 1;
  s[24 + 8] = 1;
  s[24 + 18] = 1;
  auto r = regularity(profile_of(s), {1.0});
  CHECK(r.W == doctest::Approx(2.0 / 7.0));
  CHECK(r.D_sd == doctest::Approx(std::sqrt(26.0) / 7.0));
  CHECK(r.DIST_sd == 0.0);
  CHECK(r.RE == doctest::Approx(2.0 / 7.0 * std::exp(-std::sqrt(26.0) / 7.0)));
}

TEST_CASE("regularity: three travel days spread DIST") {
  // Days: Mon {8}, Tue {8}, Wed {20}. Pairwise day distances with k = 1:
  //   Mon-Tue 0; Mon-Wed: slot 8 (Wed-vector zero, next 20 -> 12, prev boundary 8) -> 8 + 1,
  //   slot 20 (Mon-vector zero, prev 8 -> 12, next boundary min(20,147)=20) -> 12 + 1; total 22.
  //   Tue-Wed likewise 22. DIST = {0, 22, 22}: population sd = sqrt(968/9 - (44/3)^2 ... )
  Slots s{};
  s[8] = 1;
  s[24 + 8] = 1;
  s[48 + 20] = 1;
  auto r = regularity(profile_of(s), {1.0});
  const double mean = 44.0 / 3.0;
  const double var = ((0 - mean) * (0 - mean) + 2 * (22 - mean) * (22 - mean)) / 3.0;
  CHECK(r.DIST_sd == doctest::Approx(std::sqrt(var)));
}

TEST_CASE("regularity: range over random profiles") {
  std::mt19937 rng(5);
  for (int t = 0; t < 2000; ++t) {
    auto s = random_sparse(rng, 30);
    if (std::all_of(s.begin(), s.end(), [](auto v) { return v == 0; })) s[rng() % 168] = 1;
    auto r = regularity(profile_of(s), {(rng() % 301) / 100.0});
    CHECK(r.RE > 0.0);
    CHECK(r.RE <= 1.0);
    CHECK(r.RE <= r.W);
    const bool perfect = r.W == 1.0 && r.D_sd == 0.0 && r.DIST_sd == 0.0;
    CHECK((r.RE == 1.0) == perfect);
  }
  CHECK_THROWS_AS(regularity(profile_of(Slots{}), {}), ContractViolation);
}

TEST_CASE("stability ratio") {
  RegularityScore a, b;
  a.RE = 0.5;
  b.RE = 0.5;
  CHECK(stability(a, b).sta == 1.0);
  b.RE = 0.25;
  CHECK(stability(a, b).sta == 0.5);
  a.RE = 0.2;
  b.RE = 0.5;
  CHECK(stability(a, b).sta == doctest::Approx(2.5));
  a.RE = 0.0;
  CHECK_THROWS_AS(stability(a, b), ContractViolation);
}

TEST_CASE("pearson") {
  std::vector<double> x = {1, 2, 3, 7, 4};
  CHECK(pearson(x, x) == doctest::Approx(1.0));
  std::vector<double> neg;
  for (double v : x) neg.push_back(-v);
  CHECK(pearson(x, neg) == doctest::Approx(-1.0));
  // closed form: dx = (-1,0,1), dy = (-7/3,-1/3,8/3); sxy = 5, sxx = 2, syy = 114/9
  const double expected = 5.0 / std::sqrt(2.0 * 114.0 / 9.0);
  CHECK(pearson(std::vector<double>{1, 2, 3}, std::vector<double>{2, 4, 7}) == doctest::Approx(expected));
  CHECK(expected == doctest::Approx(0.9934).epsilon(1e-4));

  std::vector<double> affine;
  for (double v : x) affine.push_back(3.5 * v - 2.0);
  CHECK(pearson(x, affine) == doctest::Approx(1.0));

  CHECK_THROWS_AS(pearson(std::vector<double>{1, 1, 1}, std::vector<double>{1, 2, 3}), UndefinedStatistic);
  CHECK_THROWS_AS(pearson(std::vector<double>{1}, std::vector<double>{1}), ContractViolation);
  CHECK_THROWS_AS(pearson(std::vector<double>{1, 2}, std::vector<double>{1, 2, 3}), ContractViolation);
}
