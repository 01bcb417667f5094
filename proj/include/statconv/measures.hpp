#pragma once

#include <span>
#include <vector>

#include "statconv/grid.hpp"
#include "statconv/observables.hpp"

namespace statconv {

/// Finitely supported probability measure on R^D. Atom storage is flat
/// (point coordinates row-major); construction merges atoms that coincide
/// within sup-norm 1e-12 and the weights sum to one.
class EmpiricalMeasure {
 public:
  explicit EmpiricalMeasure(int dim);
  static EmpiricalMeasure dirac(std::vector<double> point);

  /// Append a raw atom; call finalize() once all atoms are in.
  void add(std::span<const double> point, double weight);
  /// Sort atoms lexicographically, merge duplicates, check normalization.
  void finalize(double merge_tol = 1e-12);

  int dim() const { return dim_; }
  int size() const { return static_cast<int>(weights_.size()); }
  std::span<const double> point(int i) const {
    return {points_.data() + static_cast<std::size_t>(i) * dim_,
            static_cast<std::size_t>(dim_)};
  }
  double weight(int i) const { return weights_[i]; }
  double total_weight() const;

  /// Dual pairing <mu, b>.
  double pair(const CompactObservable& b) const;

 private:
  int dim_;
  std::vector<double> points_;
  std::vector<double> weights_;
  bool finalized_ = false;
};

struct MomentSummary {
  std::vector<double> barycenter;
  std::vector<double> second_moment;  // componentwise E[u_i^2]
  std::vector<double> variance;       // componentwise
  double abs_moment = 0.0;            // E[|u|_2^order]
  double order = 1.0;
};

/// One empirical measure per space-time cell of the grid.
struct ParametrizedMeasure {
  Grid grid;
  int dim = 1;
  std::vector<EmpiricalMeasure> cell_measures;
};

/// Per-cell weighted average (1/w_N) sum_{n<=N} w(n/N) b(U_n), returned as a
/// field over the grid cells.
std::vector<double> weighted_ergodic_mean(const FieldSequence& seq,
                                          const CompactObservable& b,
                                          const Weight& w, int n_used);

/// Atoms at U_n(cell) with weights w(n/N)/w_N, duplicates merged.
EmpiricalMeasure empirical_measure(const FieldSequence& seq, int cell,
                                   const Weight& w, int n_used);

ParametrizedMeasure parametrized_measure(const FieldSequence& seq, const Weight& w,
                                         int n_used);

/// Wasserstein distance of the given order (>= 1). Exact quantile coupling
/// in one dimension; sliced average over a fixed deterministic direction set
/// for D > 1 (`directions` is ignored when D == 1).
double wasserstein(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu,
                   double order, int directions = 16);

/// sum_j 2^{-j} |<mu - nu, b_j>| / (1 + |<mu - nu, b_j>|) over the dictionary.
double weak_star_distance(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu,
                          const ObservableDictionary& dict);

MomentSummary moments(const EmpiricalMeasure& mu, double order);

/// ( sum_cells cell_volume * W_order(mu_cell, nu_cell)^order )^(1/order).
double parametrized_distance(const ParametrizedMeasure& a, const ParametrizedMeasure& b,
                             double order);

}  // namespace statconv
