#include "statconv/measures.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace statconv {

namespace {

constexpr double kWeightSumTol = 1e-12;

double weight_normalizer(const FieldSequence& seq, const Weight& w, int n_used) {
  if (n_used < 1 || n_used > seq.length())
    throw std::invalid_argument("ergodic mean: n_used outside [1, length]");
  double w_n = weight_partial_sum(w, n_used);
  if (!(w_n > 0.0))
    throw std::invalid_argument("ergodic mean: weight vanishes on the sample points");
  return w_n;
}

}  // namespace

EmpiricalMeasure::EmpiricalMeasure(int dim) : dim_(dim) {
  if (dim < 1) throw std::invalid_argument("measure: dimension must be >= 1");
}

EmpiricalMeasure EmpiricalMeasure::dirac(std::vector<double> point) {
  EmpiricalMeasure mu(static_cast<int>(point.size()));
  mu.add(point, 1.0);
  mu.finalize();
  return mu;
}

void EmpiricalMeasure::add(std::span<const double> point, double weight) {
  if (static_cast<int>(point.size()) != dim_)
    throw std::invalid_argument("measure: atom dimension mismatch");
  if (weight < 0.0) throw std::invalid_argument("measure: negative atom weight");
  points_.insert(points_.end(), point.begin(), point.end());
  weights_.push_back(weight);
  finalized_ = false;
}

void EmpiricalMeasure::finalize(double merge_tol) {
  const int n = size();
  if (n == 0) throw std::invalid_argument("measure: no atoms");
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    return std::lexicographical_compare(point(a).begin(), point(a).end(),
                                        point(b).begin(), point(b).end());
  });

  std::vector<double> pts;
  std::vector<double> wts;
  pts.reserve(points_.size());
  wts.reserve(weights_.size());
  auto close = [&](std::span<const double> a, std::span<const double> b) {
    for (int d = 0; d < dim_; ++d)
      if (std::abs(a[d] - b[d]) > merge_tol) return false;
    return true;
  };
  for (int k = 0; k < n; ++k) {
    int i = order[k];
    if (!wts.empty()) {
      std::span<const double> rep{pts.data() + pts.size() - dim_,
                                  static_cast<std::size_t>(dim_)};
      if (close(rep, point(i))) {
        wts.back() += weights_[i];
        continue;
      }
    }
    auto p = point(i);
    pts.insert(pts.end(), p.begin(), p.end());
    wts.push_back(weights_[i]);
  }
  points_ = std::move(pts);
  weights_ = std::move(wts);

  double total = total_weight();
  if (std::abs(total - 1.0) > kWeightSumTol)
    throw std::invalid_argument("measure: atom weights must sum to one");
  finalized_ = true;
}

double EmpiricalMeasure::total_weight() const {
  double s = 0.0;
  for (double w : weights_) s += w;
  return s;
}

double EmpiricalMeasure::pair(const CompactObservable& b) const {
  double s = 0.0;
  for (int i = 0; i < size(); ++i) s += weights_[i] * b(point(i));
  return s;
}

std::vector<double> weighted_ergodic_mean(const FieldSequence& seq,
                                          const CompactObservable& b,
                                          const Weight& w, int n_used) {
  if (b.dim() != seq.state_dim())
    throw std::invalid_argument("ergodic mean: observable dimension mismatch");
  const double w_n = weight_normalizer(seq, w, n_used);
  const int cells = seq.grid().cell_count();
  std::vector<double> mean(cells, 0.0);
  for (int n = 1; n <= n_used; ++n) {
    double wn = w(static_cast<double>(n) / n_used);
    if (wn == 0.0) continue;
    for (int cell = 0; cell < cells; ++cell)
      mean[cell] += wn * b(seq.state(n, cell));
  }
  for (double& v : mean) v /= w_n;
  return mean;
}

EmpiricalMeasure empirical_measure(const FieldSequence& seq, int cell, const Weight& w,
                                   int n_used) {
  if (cell < 0 || cell >= seq.grid().cell_count())
    throw std::invalid_argument("empirical measure: cell index out of range");
  const double w_n = weight_normalizer(seq, w, n_used);
  EmpiricalMeasure mu(seq.state_dim());
  for (int n = 1; n <= n_used; ++n) {
    double wn = w(static_cast<double>(n) / n_used);
    if (wn == 0.0) continue;
    mu.add(seq.state(n, cell), wn / w_n);
  }
  mu.finalize();
  return mu;
}

ParametrizedMeasure parametrized_measure(const FieldSequence& seq, const Weight& w,
                                         int n_used) {
  ParametrizedMeasure pm{seq.grid(), seq.state_dim(), {}};
  const int cells = seq.grid().cell_count();
  pm.cell_measures.reserve(cells);
  for (int cell = 0; cell < cells; ++cell)
    pm.cell_measures.push_back(empirical_measure(seq, cell, w, n_used));
  return pm;
}

namespace {

/// Exact order-s distance between two one-dimensional atom lists via the
/// shared quantile partition.
double quantile_distance_pow(std::vector<std::pair<double, double>>& a,
                             std::vector<std::pair<double, double>>& b, double order) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  double acc = 0.0;
  std::size_t i = 0, j = 0;
  double ca = a[0].second, cb = b[0].second;  // cumulative weights
  double q = 0.0;
  while (i < a.size() && j < b.size()) {
    double nxt = std::min(ca, cb);
    double seg = nxt - q;
    if (seg > 0.0) acc += seg * std::pow(std::abs(a[i].first - b[j].first), order);
    q = nxt;
    if (ca == nxt) {
      ++i;
      if (i < a.size()) ca += a[i].second;
    }
    if (cb == nxt) {
      ++j;
      if (j < b.size()) cb += b[j].second;
    }
  }
  return acc;
}

std::vector<std::pair<double, double>> project(const EmpiricalMeasure& mu,
                                               std::span<const double> dir) {
  std::vector<std::pair<double, double>> proj(mu.size());
  for (int i = 0; i < mu.size(); ++i) {
    auto p = mu.point(i);
    double v = 0.0;
    for (std::size_t d = 0; d < dir.size(); ++d) v += dir[d] * p[d];
    proj[i] = {v, mu.weight(i)};
  }
  return proj;
}

/// Fixed deterministic unit directions: equal angles on the half-circle in
/// two dimensions, a spherical Fibonacci set in three.
std::vector<std::vector<double>> direction_set(int dim, int count) {
  std::vector<std::vector<double>> dirs;
  if (dim == 2) {
    for (int k = 0; k < count; ++k) {
      double th = M_PI * k / count;
      dirs.push_back({std::cos(th), std::sin(th)});
    }
  } else {
    const double golden = M_PI * (3.0 - std::sqrt(5.0));
    for (int k = 0; k < count; ++k) {
      double z = 1.0 - 2.0 * (k + 0.5) / count;
      double r = std::sqrt(std::max(0.0, 1.0 - z * z));
      double th = golden * k;
      dirs.push_back({r * std::cos(th), r * std::sin(th), z});
    }
  }
  return dirs;
}

}  // namespace

double wasserstein(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu, double order,
                   int directions) {
  if (mu.dim() != nu.dim())
    throw std::invalid_argument("wasserstein: dimension mismatch");
  if (!(order >= 1.0)) throw std::invalid_argument("wasserstein: order must be >= 1");
  if (mu.size() == 0 || nu.size() == 0)
    throw std::invalid_argument("wasserstein: empty measure");
  if (mu.dim() == 1) {
    std::vector<double> one{1.0};
    auto a = project(mu, one);
    auto b = project(nu, one);
    return std::pow(quantile_distance_pow(a, b, order), 1.0 / order);
  }
  if (directions < 1)
    throw std::invalid_argument("wasserstein: direction count must be >= 1");
  if (mu.dim() > 3)
    throw std::invalid_argument("wasserstein: supported state dimensions are 1..3");
  auto dirs = direction_set(mu.dim(), directions);
  double acc = 0.0;
  for (const auto& dir : dirs) {
    auto a = project(mu, dir);
    auto b = project(nu, dir);
    acc += quantile_distance_pow(a, b, order);
  }
  return std::pow(acc / dirs.size(), 1.0 / order);
}

double weak_star_distance(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu,
                          const ObservableDictionary& dict) {
  if (dict.size() == 0) throw std::invalid_argument("weak-star distance: empty dictionary");
  double s = 0.0;
  double scale = 0.5;
  for (const auto& b : dict.observables) {
    double gap = std::abs(mu.pair(b) - nu.pair(b));
    s += scale * gap / (1.0 + gap);
    scale *= 0.5;
  }
  return s;
}

MomentSummary moments(const EmpiricalMeasure& mu, double order) {
  if (!(order >= 1.0)) throw std::invalid_argument("moments: order must be >= 1");
  const int dim = mu.dim();
  MomentSummary ms;
  ms.order = order;
  ms.barycenter.assign(dim, 0.0);
  ms.second_moment.assign(dim, 0.0);
  ms.variance.assign(dim, 0.0);
  for (int i = 0; i < mu.size(); ++i) {
    auto p = mu.point(i);
    double w = mu.weight(i);
    double norm2 = 0.0;
    for (int d = 0; d < dim; ++d) {
      ms.barycenter[d] += w * p[d];
      ms.second_moment[d] += w * p[d] * p[d];
      norm2 += p[d] * p[d];
    }
    ms.abs_moment += w * std::pow(std::sqrt(norm2), order);
  }
  for (int d = 0; d < dim; ++d)
    ms.variance[d] = ms.second_moment[d] - ms.barycenter[d] * ms.barycenter[d];
  return ms;
}

double parametrized_distance(const ParametrizedMeasure& a, const ParametrizedMeasure& b,
                             double order) {
  if (!(a.grid == b.grid) || a.dim != b.dim)
    throw std::invalid_argument("parametrized distance: measures on different grids");
  if (!(order >= 1.0))
    throw std::invalid_argument("parametrized distance: order must be >= 1");
  const double vol = a.grid.cell_volume();
  double acc = 0.0;
  for (std::size_t cell = 0; cell < a.cell_measures.size(); ++cell) {
    double w = wasserstein(a.cell_measures[cell], b.cell_measures[cell], order);
    acc += vol * std::pow(w, order);
  }
  return std::pow(acc, 1.0 / order);
}

}  // namespace statconv
