#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "statconv/fixtures.hpp"
#include "statconv/measures.hpp"
#include "statconv/observables.hpp"

using namespace statconv;

namespace {

EmpiricalMeasure from_atoms(const std::vector<double>& xs,
                            const std::vector<double>& ws) {
  EmpiricalMeasure m(1);
  for (std::size_t i = 0; i < xs.size(); ++i)
    m.add(std::span<const double>(&xs[i], 1), ws[i]);
  m.finalize();
  return m;
}

EmpiricalMeasure from_atoms2(const std::vector<std::array<double, 2>>& xs,
                             const std::vector<double>& ws) {
  EmpiricalMeasure m(2);
  for (std::size_t i = 0; i < xs.size(); ++i)
    m.add(std::span<const double>(xs[i].data(), 2), ws[i]);
  m.finalize();
  return m;
}

// Independent W1 oracle in one dimension: integral of |F_mu - F_nu| summed
// over the piecewise-constant segments between consecutive atom positions.
double w1_cdf_oracle(const EmpiricalMeasure& a, const EmpiricalMeasure& b) {
  std::vector<double> xs;
  for (int i = 0; i < a.size(); ++i) xs.push_back(a.point(i)[0]);
  for (int i = 0; i < b.size(); ++i) xs.push_back(b.point(i)[0]);
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  auto cdf = [](const EmpiricalMeasure& m, double x) {
    double s = 0.0;
    for (int i = 0; i < m.size(); ++i)
      if (m.point(i)[0] <= x) s += m.weight(i);
    return s;
  };
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < xs.size(); ++i)
    acc += std::abs(cdf(a, xs[i]) - cdf(b, xs[i])) * (xs[i + 1] - xs[i]);
  return acc;
}

// Independent W2 oracle: sample both quantile functions on a grid that is a
// common multiple of the atom counts, where midpoint sampling is exact.
double w2_quantile_oracle(const EmpiricalMeasure& a, const EmpiricalMeasure& b,
                          int common) {
  auto quantile = [](const EmpiricalMeasure& m, double q) {
    double c = 0.0;
    for (int i = 0; i < m.size(); ++i) {
      c += m.weight(i);
      if (q <= c) return m.point(i)[0];
    }
    return m.point(m.size() - 1)[0];
  };
  double acc = 0.0;
  for (int j = 0; j < common; ++j) {
    double q = (j + 0.5) / common;
    double d = quantile(a, q) - quantile(b, q);
    acc += d * d;
  }
  return std::sqrt(acc / common);
}

}  // namespace

TEST_CASE("empirical measure merges duplicate atoms and normalizes") {
  auto grid = fixtures::unit_grid();
  auto seq = fixtures::alternating(grid, 3);  // values 1, 0, 1
  auto m = empirical_measure(seq, 0, Weight::constant(), 3);
  REQUIRE(m.size() == 2);
  CHECK(m.point(0)[0] == doctest::Approx(0.0));
  CHECK(m.weight(0) == doctest::Approx(1.0 / 3.0));
  CHECK(m.point(1)[0] == doctest::Approx(1.0));
  CHECK(m.weight(1) == doctest::Approx(2.0 / 3.0));
  CHECK(m.total_weight() == doctest::Approx(1.0));
}

TEST_CASE("merge tolerance separates close from coincident atoms") {
  auto close = from_atoms({0.0, 1e-13}, {0.5, 0.5});
  CHECK(close.size() == 1);
  auto apart = from_atoms({0.0, 1e-10}, {0.5, 0.5});
  CHECK(apart.size() == 2);
}

TEST_CASE("finalize rejects weights that do not sum to one") {
  EmpiricalMeasure m(1);
  double x = 0.0;
  m.add(std::span<const double>(&x, 1), 0.7);
  CHECK_THROWS_AS(m.finalize(), std::invalid_argument);
}

TEST_CASE("dual pairing averages the observable over atoms") {
  auto m = from_atoms({0.0, 1.0}, {0.5, 0.5});
  auto b = make_tent({0.0}, 2.0);
  // b(0) = 1, b(1) = 1/2
  CHECK(m.pair(b) == doctest::Approx(0.75));
}

TEST_CASE("one-dimensional distances match hand counts") {
  auto d0 = EmpiricalMeasure::dirac({0.0});
  auto d1 = EmpiricalMeasure::dirac({1.0});
  CHECK(wasserstein(d0, d1, 1.0) == doctest::Approx(1.0));
  CHECK(wasserstein(d0, d1, 2.0) == doctest::Approx(1.0));

  auto half = from_atoms({0.0, 1.0}, {0.5, 0.5});
  auto dirac_mid = EmpiricalMeasure::dirac({0.5});
  CHECK(wasserstein(half, dirac_mid, 1.0) == doctest::Approx(0.5));

  // alternating with three members: 2/3 at 1, 1/3 at 0
  auto third = from_atoms({0.0, 1.0}, {1.0 / 3.0, 2.0 / 3.0});
  CHECK(wasserstein(third, half, 1.0) == doctest::Approx(1.0 / 6.0));

  auto quarter = from_atoms({0.0, 1.0}, {0.25, 0.75});
  CHECK(wasserstein(quarter, half, 2.0) == doctest::Approx(0.5));

  auto uniform3 = from_atoms({0.0, 0.5, 1.0}, {1.0 / 3, 1.0 / 3, 1.0 / 3});
  CHECK(wasserstein(uniform3, dirac_mid, 1.0) == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("quantile walk agrees with the cdf-difference oracle on random pairs") {
  std::mt19937_64 rng(101);
  std::uniform_real_distribution<double> ux(-3.0, 3.0);
  for (int trial = 0; trial < 200; ++trial) {
    int na = 1 + static_cast<int>(rng() % 6);
    int nb = 1 + static_cast<int>(rng() % 6);
    std::vector<double> xa(na), xb(nb);
    for (double& x : xa) x = ux(rng);
    for (double& x : xb) x = ux(rng);
    auto a = from_atoms(xa, std::vector<double>(na, 1.0 / na));
    auto b = from_atoms(xb, std::vector<double>(nb, 1.0 / nb));
    CHECK(wasserstein(a, b, 1.0) ==
          doctest::Approx(w1_cdf_oracle(a, b)).epsilon(1e-10));
  }
}

TEST_CASE("order-two distance agrees with exact quantile sampling") {
  std::mt19937_64 rng(202);
  std::uniform_real_distribution<double> ux(-2.0, 2.0);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> xa(4), xb(5);
    for (double& x : xa) x = ux(rng);
    for (double& x : xb) x = ux(rng);
    auto a = from_atoms(xa, std::vector<double>(4, 0.25));
    auto b = from_atoms(xb, std::vector<double>(5, 0.2));
    // 20 is a common multiple of both atom counts: sampling is exact
    CHECK(wasserstein(a, b, 2.0) ==
          doctest::Approx(w2_quantile_oracle(a, b, 20)).epsilon(1e-10));
  }
}

TEST_CASE("wasserstein input validation") {
  auto d0 = EmpiricalMeasure::dirac({0.0});
  auto d2 = EmpiricalMeasure::dirac({0.0, 0.0});
  CHECK_THROWS_AS(wasserstein(d0, d0, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(wasserstein(d0, d2, 1.0), std::invalid_argument);
  auto d4 = EmpiricalMeasure::dirac({0.0, 0.0, 0.0, 0.0});
  CHECK_THROWS_AS(wasserstein(d4, d4, 1.0), std::invalid_argument);
}

TEST_CASE("sliced distance is a translation-bounded metric in two dimensions") {
  std::mt19937_64 rng(303);
  std::uniform_real_distribution<double> ux(-1.0, 1.0);

  auto rand_measure = [&](int n) {
    std::vector<std::array<double, 2>> xs(n);
    for (auto& x : xs) x = {ux(rng), ux(rng)};
    return from_atoms2(xs, std::vector<double>(n, 1.0 / n));
  };

  for (int trial = 0; trial < 50; ++trial) {
    auto a = rand_measure(3);
    auto b = rand_measure(4);
    auto c = rand_measure(2);
    double dab = wasserstein(a, b, 1.0);
    double dba = wasserstein(b, a, 1.0);
    double dac = wasserstein(a, c, 1.0);
    double dcb = wasserstein(c, b, 1.0);
    CHECK(dab == doctest::Approx(dba));
    CHECK(dab >= 0.0);
    CHECK(wasserstein(a, a, 1.0) == doctest::Approx(0.0));
    CHECK(dab <= dac + dcb + 1e-12);
  }

  // translating a dirac scales the sliced distance linearly and never
  // exceeds the euclidean shift
  auto p = EmpiricalMeasure::dirac({0.3, -0.2});
  auto shift = [&](double sx, double sy) {
    return EmpiricalMeasure::dirac({0.3 + sx, -0.2 + sy});
  };
  double d1 = wasserstein(p, shift(0.4, 0.1), 1.0);
  double d2 = wasserstein(p, shift(0.8, 0.2), 1.0);
  CHECK(d2 == doctest::Approx(2.0 * d1));
  CHECK(d1 <= std::hypot(0.4, 0.1) + 1e-12);
  CHECK(d1 > 0.0);
}

TEST_CASE("weak-star pseudometric from dictionary pairings") {
  auto d0 = EmpiricalMeasure::dirac({0.0});
  auto d1 = EmpiricalMeasure::dirac({1.0});
  auto dict = make_dictionary({0.0}, {1.0}, 0.4);

  double expected = 0.0;
  double scale = 0.5;
  for (const auto& b : dict.observables) {
    double gap = std::abs(d0.pair(b) - d1.pair(b));
    expected += scale * gap / (1.0 + gap);
    scale *= 0.5;
  }
  CHECK(weak_star_distance(d0, d1, dict) == doctest::Approx(expected));
  CHECK(weak_star_distance(d0, d0, dict) == doctest::Approx(0.0));
  CHECK(weak_star_distance(d0, d1, dict) ==
        doctest::Approx(weak_star_distance(d1, d0, dict)));
  CHECK(weak_star_distance(d0, d1, dict) < 1.0);

  ObservableDictionary empty;
  CHECK_THROWS_AS(weak_star_distance(d0, d1, empty), std::invalid_argument);
}

TEST_CASE("moment summary of the half-half measure") {
  auto half = from_atoms({0.0, 1.0}, {0.5, 0.5});
  auto ms = moments(half, 1.0);
  CHECK(ms.barycenter[0] == doctest::Approx(0.5));
  CHECK(ms.second_moment[0] == doctest::Approx(0.5));
  CHECK(ms.variance[0] == doctest::Approx(0.25));
  CHECK(ms.abs_moment == doctest::Approx(0.5));
  auto ms2 = moments(half, 2.0);
  CHECK(ms2.abs_moment == doctest::Approx(0.5));
}

TEST_CASE("parametrized distance integrates per-cell distances") {
  Grid g;
  g.space_dim = 1;
  g.cells = {2, 1};
  g.time_steps = 1;
  g.final_time = 1.0;
  g.lengths = {1.0, 1.0};

  auto seq_hi = fixtures::constant(g, 4, {1.0});
  auto seq_lo = fixtures::constant(g, 4, {0.0});
  auto mu = parametrized_measure(seq_hi, Weight::constant(), 4);
  auto nu = parametrized_measure(seq_lo, Weight::constant(), 4);
  // every cell contributes W = 1 and the cell volumes sum to |Q| = 1
  CHECK(parametrized_distance(mu, nu, 1.0) == doctest::Approx(1.0));
  CHECK(parametrized_distance(mu, nu, 2.0) == doctest::Approx(1.0));
  CHECK(parametrized_distance(mu, mu, 1.0) == doctest::Approx(0.0));
}

TEST_CASE("weighted ergodic mean with the linear weight") {
  auto grid = fixtures::unit_grid();
  auto seq = fixtures::alternating(grid, 4);  // 1, 0, 1, 0
  auto b = make_tent({1.0}, 1.0);             // b(u) = u on {0, 1}
  auto mean = weighted_ergodic_mean(seq, b, Weight::linear(), 4);
  REQUIRE(mean.size() == 1);
  // weights w(n/4) = n/2: (0.5 *1 + 1*0 + 1.5*1 + 2*0) / 5
  CHECK(mean[0] == doctest::Approx(0.4));

  auto mean_c = weighted_ergodic_mean(seq, b, Weight::constant(), 4);
  CHECK(mean_c[0] == doctest::Approx(0.5));
  auto mean_3 = weighted_ergodic_mean(seq, b, Weight::constant(), 3);
  CHECK(mean_3[0] == doctest::Approx(2.0 / 3.0));
}

TEST_CASE("mean of pairings equals pairing with the empirical measure") {
  Grid g;
  g.space_dim = 1;
  g.cells = {3, 1};
  g.time_steps = 2;
  g.final_time = 0.5;
  auto seq = fixtures::harmonic(g, 12);
  auto b = make_bump({0.8}, 0.9);
  for (const Weight& w : default_weights()) {
    auto mean = weighted_ergodic_mean(seq, b, w, 12);
    for (int cell = 0; cell < g.cell_count(); ++cell) {
      auto m = empirical_measure(seq, cell, w, 12);
      CHECK(mean[cell] == doctest::Approx(m.pair(b)).epsilon(1e-12));
    }
  }
}

TEST_CASE("barycenter equals the direct weighted atom sum") {
  auto grid = fixtures::unit_grid();
  auto seq = fixtures::harmonic(grid, 20);
  auto m = empirical_measure(seq, 0, Weight::linear(), 20);
  double direct = 0.0;
  for (int i = 0; i < m.size(); ++i) direct += m.weight(i) * m.point(i)[0];
  auto ms = moments(m, 1.0);
  CHECK(ms.barycenter[0] == doctest::Approx(direct).epsilon(1e-13));
}

TEST_CASE("zero-weight members are skipped when building the measure") {
  auto grid = fixtures::unit_grid();
  auto seq = fixtures::alternating(grid, 8);
  // tent50 at z = n/8 is nonzero only for n in {3, 4, 5}: values 1, 0, 1
  // with weights 2, 4, 2, so the measure is half at 0 and half at 1
  auto m = empirical_measure(seq, 0, Weight::tent(0.5, 0.5), 8);
  CHECK(m.total_weight() == doctest::Approx(1.0));
  REQUIRE(m.size() == 2);
  CHECK(m.weight(0) == doctest::Approx(0.5));
  CHECK(m.weight(1) == doctest::Approx(0.5));
  for (int i = 0; i < m.size(); ++i) CHECK(m.weight(i) > 0.0);
}
