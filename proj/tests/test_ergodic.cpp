#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "statconv/ergodic.hpp"
#include "statconv/fixtures.hpp"

using namespace statconv;

namespace {

const std::array<int, 4> kSchedule{64, 128, 256, 512};

// #{n <= N : n is in the block set [4^j, 2*4^j)} counted directly.
int block_count(int n_max) {
  int count = 0;
  for (int n = 1; n <= n_max; ++n)
    if (fixtures::block_member(n)) ++count;
  return count;
}

}  // namespace

TEST_CASE("correlation matrix of the alternating sequence") {
  auto grid = fixtures::unit_grid();
  auto seq = fixtures::alternating(grid, 6);
  auto b = make_tent({1.0}, 1.0);  // b(1) = 1, b(0) = 0
  auto rec = correlation_matrix(seq, b, 6);
  REQUIRE(rec.size == 6);
  CHECK(rec.domain_measure == doctest::Approx(1.0));
  for (int n = 1; n <= 6; ++n)
    for (int m = 1; m <= 6; ++m) {
      double expected = (n % 2 == 1 && m % 2 == 1) ? 1.0 : 0.0;
      CHECK(rec.at(n, m) == doctest::Approx(expected));
      CHECK(rec.at(n, m) == doctest::Approx(rec.at(m, n)));
    }
}

TEST_CASE("weak correlation verdict settles for the alternating sequence") {
  auto grid = fixtures::unit_grid();
  auto seq = fixtures::alternating(grid, 512);
  auto b = make_tent({1.0}, 1.0);
  auto rec = correlation_matrix(seq, b, 512);

  auto v1 = weak_correlation_verdict(rec, 1, kSchedule, 1e-2);
  // (1/N) sum_n C[n,1] = ceil(N/2)/N = 1/2 at every even checkpoint
  for (double est : v1.estimates) CHECK(est == doctest::Approx(0.5));
  CHECK(v1.tail_gap == doctest::Approx(0.0));
  CHECK(v1.converged);

  auto v2 = weak_correlation_verdict(rec, 2, kSchedule, 1e-2);
  for (double est : v2.estimates) CHECK(est == doctest::Approx(0.0));
  CHECK(v2.converged);
}

TEST_CASE("weak correlation verdict rejects the block sequence") {
  auto grid = fixtures::unit_grid();
  auto seq = fixtures::block(grid, 512);
  auto b = make_tent({1.0}, 1.0);
  auto rec = correlation_matrix(seq, b, 512);
  auto v = weak_correlation_verdict(rec, 1, kSchedule, 5e-2);

  // densities of the block index set at the checkpoints, counted directly
  std::array<double, 4> expected{22.0 / 64, 85.0 / 128, 86.0 / 256, 341.0 / 512};
  for (std::size_t i = 0; i < expected.size(); ++i) {
    CHECK(block_count(kSchedule[i]) ==
          doctest::Approx(expected[i] * kSchedule[i]));
    CHECK(v.estimates[i] == doctest::Approx(expected[i]));
  }
  // largest pairwise deviation: highest density (at 512) vs lowest (at 256)
  CHECK(v.tail_gap == doctest::Approx(341.0 / 512 - 86.0 / 256));
  CHECK(v.tail_gap > 0.2);
  CHECK_FALSE(v.converged);
}

TEST_CASE("strong verdict also checks agreement across weights") {
  auto grid = fixtures::unit_grid();
  auto b = make_tent({1.0}, 1.0);
  auto weights = default_weights();

  auto alt = fixtures::alternating(grid, 512);
  auto rec_alt = correlation_matrix(alt, b, 512);

  // The poly2 weight (3z^2) sees the odd indices with total fraction
  // sum_{odd n<=N} n^2 / sum_{n<=N} n^2 = (N-1)/(2N+1), so its own gap
  // between checkpoints 64 and 512 is 511/1025 - 63/129, a touch over 1e-2.
  auto v_tight = strong_correlation_verdict(rec_alt, 1, weights, kSchedule, 1e-2);
  CHECK(v_tight.tail_gap == doctest::Approx(511.0 / 1025 - 63.0 / 129));
  CHECK_FALSE(v_tight.converged);

  auto v_alt = strong_correlation_verdict(rec_alt, 1, weights, kSchedule, 2e-2);
  CHECK(v_alt.converged);
  CHECK(v_alt.estimate == doctest::Approx(0.5).epsilon(2e-2));

  auto blk = fixtures::block(grid, 512);
  auto rec_blk = correlation_matrix(blk, b, 512);
  auto v_blk = strong_correlation_verdict(rec_blk, 1, weights, kSchedule, 1e-2);
  CHECK_FALSE(v_blk.converged);
}

TEST_CASE("windowed correlation on the alternating sequence") {
  auto grid = fixtures::unit_grid();
  auto seq = fixtures::alternating(grid, 8);
  auto b = make_tent({1.0}, 1.0);
  auto rec = correlation_matrix(seq, b, 8);
  // window [4, 8]: odd indices 5 and 7 contribute, so 2 / (0.5 * 8)
  CHECK(windowed_correlation(rec, 0.5, 1.0, 1, 8) == doctest::Approx(0.5));
  CHECK_THROWS_AS(windowed_correlation(rec, 0.9, 0.905, 1, 8), std::invalid_argument);
  CHECK_THROWS_AS(windowed_correlation(rec, 0.7, 0.3, 1, 8), std::invalid_argument);
}

TEST_CASE("disintegration gap vanishes at matched parity and not otherwise") {
  auto grid = fixtures::unit_grid();
  auto seq = fixtures::alternating(grid, 8);
  auto b = make_tent({1.0}, 1.0);
  auto rec = correlation_matrix(seq, b, 8);
  Weight w = Weight::constant();

  CHECK(disintegration_gap(rec, w, 4, 2) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(disintegration_gap(rec, w, 3, 3) == doctest::Approx(0.0).epsilon(1e-12));
  // N=4, M=3: |(2/4)^2 - (1/4) sum_n (odd count in 1..3)/3 [n odd]|
  CHECK(disintegration_gap(rec, w, 4, 3) == doctest::Approx(1.0 / 12.0));
}

TEST_CASE("stationarity modulus: shift sensitivity of the alternating sequence") {
  auto grid = fixtures::unit_grid();
  auto seq = fixtures::alternating(grid, 32);
  auto b = make_tent({1.0}, 1.0);
  auto sm = stationarity_modulus(seq, b, 1, 1);
  CHECK(sm.exhaustive);
  CHECK(sm.modulus == doctest::Approx(1.0));

  auto seq_const = fixtures::constant(grid, 32, {0.7});
  auto sm_const = stationarity_modulus(seq_const, b, 1, 4);
  CHECK(sm_const.modulus == doctest::Approx(0.0));
}

TEST_CASE("stationarity modulus decays for a geometrically settling sequence") {
  auto grid = fixtures::unit_grid();
  const int len = 24;
  FieldSequence seq(grid, 1, len);
  for (int n = 1; n <= len; ++n) seq.value(n, 0, 0) = std::pow(2.0, -n);
  auto b = make_tent({0.0}, 1.0);
  double lip = b.lipschitz();
  for (int k : {2, 4, 6, 8}) {
    auto sm = stationarity_modulus(seq, b, k, 6);
    // |b(u)b(v) - b(u')b(v')| <= lip (|u-u'| + |v-v'|) <= 2 lip 2^{-k}
    CHECK(sm.modulus <= 4.0 * lip * std::pow(2.0, -k));
  }
}

TEST_CASE("averaged stationarity modulus: enumeration oracle at small sizes") {
  auto grid = fixtures::unit_grid();
  auto seq = fixtures::alternating(grid, 12);
  auto b = make_tent({1.0}, 1.0);

  auto oracle = [&](int k, int n_used) {
    auto corr = [&](int i, int j) {
      return (i % 2 == 1 && j % 2 == 1) ? 1.0 : 0.0;
    };
    double acc = 0.0;
    for (int n = 1; n <= n_used; ++n)
      for (int m = 1; m <= n_used; ++m)
        acc += std::abs(corr(k + n, k + m) - corr(k, k + std::abs(n - m)));
    return acc / (static_cast<double>(n_used) * n_used);
  };

  for (int k : {1, 2}) {
    for (int n_used : {2, 3, 4}) {
      CHECK(averaged_stationarity_modulus(seq, b, k, n_used) ==
            doctest::Approx(oracle(k, n_used)));
    }
  }
  // at k = 1, N = 4 the count is the odd-odd quarter of all pairs
  CHECK(averaged_stationarity_modulus(seq, b, 1, 4) == doctest::Approx(0.25));
}

TEST_CASE("statistical density gap counts large member deviations") {
  auto grid = fixtures::unit_grid();
  auto u = fixtures::alternating(grid, 10);
  auto v = fixtures::alternating(grid, 10);
  for (int n : {1, 4, 9}) v.value(n, 0, 0) += 2.0;
  CHECK(statistical_density_gap(u, v, 0.5, 10) == doctest::Approx(0.3));
  CHECK(statistical_density_gap(u, v, 3.0, 10) == doctest::Approx(0.0));
  CHECK(statistical_density_gap(u, u, 1e-12, 10) == doctest::Approx(0.0));
}

TEST_CASE("index set enumeration") {
  auto squares = index_set_members(IndexSet::squares, 10);
  CHECK(squares == std::vector<int>{1, 4, 9});
  auto powers = index_set_members(IndexSet::powers_of_two, 10);
  CHECK(powers == std::vector<int>{1, 2, 4, 8});
  std::vector<int> raw{3, 1, 3, 9};
  auto custom = index_set_members(IndexSet::custom, 10, raw);
  CHECK(custom == std::vector<int>{1, 3, 9});
  std::vector<int> bad{0, 2};
  CHECK_THROWS_AS(index_set_members(IndexSet::custom, 10, bad),
                  std::invalid_argument);
}

TEST_CASE("perturbation is deterministic, bounded, and sparse") {
  Grid g;
  g.space_dim = 1;
  g.cells = {4, 1};
  g.time_steps = 2;
  auto seq = fixtures::alternating(g, 20);

  auto p1 = perturb_on_index_set(seq, IndexSet::squares, 0.5, 42);
  auto p2 = perturb_on_index_set(seq, IndexSet::squares, 0.5, 42);
  auto p3 = perturb_on_index_set(seq, IndexSet::squares, 0.5, 43);

  bool identical = true;
  bool differs_from_other_seed = false;
  for (std::size_t i = 0; i < seq.raw().size(); ++i) {
    if (p1.raw()[i] != p2.raw()[i]) identical = false;
    if (p1.raw()[i] != p3.raw()[i]) differs_from_other_seed = true;
  }
  CHECK(identical);
  CHECK(differs_from_other_seed);

  auto touched = index_set_members(IndexSet::squares, 20);
  for (int n = 1; n <= 20; ++n) {
    bool in_set = std::find(touched.begin(), touched.end(), n) != touched.end();
    for (int cell = 0; cell < g.cell_count(); ++cell) {
      double delta = p1.value(n, cell, 0) - seq.value(n, cell, 0);
      if (in_set) {
        CHECK(std::abs(delta) <= 0.5);
      } else {
        CHECK(delta == 0.0);
      }
    }
  }

  auto p0 = perturb_on_index_set(seq, IndexSet::squares, 0.0, 42);
  for (std::size_t i = 0; i < seq.raw().size(); ++i)
    CHECK(p0.raw()[i] == seq.raw()[i]);
}

TEST_CASE("ergodic mean drift of the harmonic sequence obeys the Cesaro bound") {
  auto grid = fixtures::unit_grid();
  auto seq = fixtures::harmonic(grid, 512);  // U_n = 0.5 + 1/n
  auto b = make_tent({0.5}, 3.0);
  double lip = b.lipschitz();
  for (int n_used : kSchedule) {
    auto mean = weighted_ergodic_mean(seq, b, Weight::constant(), n_used);
    double harmonic_sum = 0.0;
    for (int n = 1; n <= n_used; ++n) harmonic_sum += 1.0 / n;
    CHECK(std::abs(mean[0] - 1.0) <= lip * harmonic_sum / n_used * (1 + 1e-9));
  }
}

TEST_CASE("periodic sequences settle at the period-average rate") {
  auto grid = fixtures::unit_grid();
  auto seq = fixtures::periodic_values(grid, 512, {1.0, 0.0, 0.0});
  auto b = make_tent({1.0}, 1.0);
  // #{n <= N : n = 1 mod 3} = floor((N+2)/3)
  for (int n_used : kSchedule) {
    auto mean = weighted_ergodic_mean(seq, b, Weight::constant(), n_used);
    double expected = std::floor((n_used + 2) / 3.0) / n_used;
    CHECK(mean[0] == doctest::Approx(expected));
  }
}

TEST_CASE("full analysis of the alternating sequence converges to the coin flip") {
  auto grid = fixtures::unit_grid();
  auto seq = fixtures::alternating(grid, 512);
  auto dict = dictionary_for_sequence(seq);
  auto weights = default_weights();
  auto rep = analyze_convergence(seq, dict, weights, kSchedule, 1e-2);

  CHECK(rep.converged);
  CHECK(rep.pairs.size() == dict.size() * weights.size());
  for (const auto& p : rep.pairs) CHECK(p.verdict.converged);
  for (const auto& c : rep.independence) CHECK(c.ok);
  REQUIRE(rep.mean_barycenter.size() == 1);
  CHECK(rep.mean_barycenter[0] == doctest::Approx(0.5));
  for (double d : rep.checkpoint_measure_distances)
    CHECK(d == doctest::Approx(0.0).epsilon(1e-12));

  const auto& lm = rep.limit_measure.cell_measures.at(0);
  REQUIRE(lm.size() == 2);
  CHECK(lm.weight(0) == doctest::Approx(0.5));
  CHECK(lm.weight(1) == doctest::Approx(0.5));
}

TEST_CASE("full analysis flags the block sequence") {
  auto grid = fixtures::unit_grid();
  auto seq = fixtures::block(grid, 512);
  auto dict = dictionary_for_sequence(seq);
  auto weights = default_weights();
  auto rep = analyze_convergence(seq, dict, weights, kSchedule, 1e-2);
  CHECK_FALSE(rep.converged);
}

TEST_CASE("analysis validates its schedule") {
  auto grid = fixtures::unit_grid();
  auto seq = fixtures::alternating(grid, 32);
  auto dict = dictionary_for_sequence(seq);
  auto weights = default_weights();
  std::vector<int> too_long{16, 64};
  CHECK_THROWS_AS(analyze_convergence(seq, dict, weights, too_long, 1e-2),
                  std::invalid_argument);
  std::vector<int> not_increasing{16, 16};
  CHECK_THROWS_AS(analyze_convergence(seq, dict, weights, not_increasing, 1e-2),
                  std::invalid_argument);
}
