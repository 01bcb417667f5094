#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "statconv/grid.hpp"
#include "statconv/measures.hpp"
#include "statconv/observables.hpp"

namespace statconv {

/// Values b(U_n) over the grid cells for n = 1..length, cached so pair
/// correlations are O(cells) dot products against the cell volume.
class ObservableTrace {
 public:
  ObservableTrace(const FieldSequence& seq, const CompactObservable& b, int n_used);

  int length() const { return length_; }
  int cells() const { return cells_; }
  double domain_measure() const { return domain_measure_; }
  std::span<const double> values(int n) const {
    return {values_.data() + static_cast<std::size_t>(n - 1) * cells_,
            static_cast<std::size_t>(cells_)};
  }
  /// \int_Q b(U_n) b(U_m) dy (n, m are 1-based).
  double correlation(int n, int m) const;

 private:
  int length_;
  int cells_;
  double cell_volume_;
  double domain_measure_;
  std::vector<double> values_;
};

/// Dense symmetric matrix C[n,m] = \int_Q b(U_n) b(U_m) dy, 1 <= n, m <= size.
struct CorrelationRecord {
  int observable_id = 0;
  int size = 0;
  double domain_measure = 1.0;
  std::vector<double> entries;

  double at(int n, int m) const {
    return entries[static_cast<std::size_t>(n - 1) * size + (m - 1)];
  }
};

CorrelationRecord correlation_matrix(const FieldSequence& seq,
                                     const CompactObservable& b, int n_used);

/// Finite-sample surrogate for "the limit exists": estimates along a
/// checkpoint schedule, the largest pairwise deviation between checkpoints
/// (normalized by the domain measure where applicable), and the verdict
/// tail_gap <= tol.
struct ConvergenceVerdict {
  double estimate = 0.0;  // value at the last checkpoint
  double tail_gap = 0.0;  // max pairwise deviation across checkpoints
  double tol = 0.0;
  bool converged = false;
  std::vector<int> checkpoints;
  std::vector<double> estimates;  // one per checkpoint
};

/// Plain-average verdict for lim_N (1/N) sum_{n<=N} C[n,m].
ConvergenceVerdict weak_correlation_verdict(const CorrelationRecord& rec, int m,
                                            std::span<const int> schedule, double tol);

/// Weighted verdict: every weight's averages must settle and the final
/// estimates must agree across weights within tol (both folded into tail_gap).
ConvergenceVerdict strong_correlation_verdict(const CorrelationRecord& rec, int m,
                                              std::span<const Weight> weights,
                                              std::span<const int> schedule, double tol);

/// (1/(beta-alpha)) (1/N) sum_{alpha N <= n <= beta N} C[n,m].
double windowed_correlation(const CorrelationRecord& rec, double alpha, double beta,
                            int m, int n_used);

/// | double weighted average - iterated weighted average | of the
/// correlation matrix: the finite-sample disintegration defect.
double disintegration_gap(const CorrelationRecord& rec, const Weight& w, int n_used,
                          int m_used);

struct StationarityModulus {
  int observable_id = 0;
  int start_index = 0;  // k
  int max_shift = 0;
  double modulus = 0.0;
  long long samples = 0;
  bool exhaustive = true;
};

/// omega(b, k) = sup over k <= k1 <= k2, 0 <= shift <= max_shift of
/// | int b(U_k1) b(U_k2) - b(U_k1+shift) b(U_k2+shift) dy |, enumerated in
/// full when at most max_samples triples exist, otherwise over a seeded
/// stratified subsample of max_samples triples.
StationarityModulus stationarity_modulus(const FieldSequence& seq,
                                         const CompactObservable& b, int k,
                                         int max_shift, long long max_samples = 100000);

/// (1/N^2) sum_{n,m=1..N} | int b(U_{k+n}) b(U_{k+m}) - b(U_k) b(U_{k+|n-m|}) dy |.
double averaged_stationarity_modulus(const FieldSequence& seq,
                                     const CompactObservable& b, int k, int n_used);

/// Fraction of indices n <= N with \int_Q |U_n - V_n|_2 dy > eps.
double statistical_density_gap(const FieldSequence& u, const FieldSequence& v,
                               double eps, int n_used);

enum class IndexSet { squares, powers_of_two, custom };

/// Copy of the sequence with U_n replaced by U_n + magnitude * noise on the
/// selected sparse index set; noise is a deterministic function of
/// (seed, member, cell, component) with values in [-1, 1).
FieldSequence perturb_on_index_set(const FieldSequence& seq, IndexSet set,
                                   double magnitude, std::uint64_t seed,
                                   std::span<const int> custom_indices = {});
std::vector<int> index_set_members(IndexSet set, int length,
                                   std::span<const int> custom_indices = {});

struct PairVerdict {
  int observable_id = 0;
  std::string weight;
  ConvergenceVerdict verdict;
};

struct IndependenceCheck {
  int observable_id = 0;
  double spread = 0.0;  // max final-checkpoint L1 gap across weights, / |Q|
  bool ok = false;
};

/// Full convergence report: per-(observable, weight) Cauchy verdicts for the
/// weighted ergodic means, weight-independence spreads, distances between the
/// measures at consecutive checkpoints, and the limit-candidate measure at
/// the last checkpoint (built with the first weight).
struct ConvergenceReport {
  std::vector<int> schedule;
  double tol = 0.0;
  std::vector<PairVerdict> pairs;
  std::vector<IndependenceCheck> independence;
  std::vector<double> checkpoint_measure_distances;
  ParametrizedMeasure limit_measure;
  std::vector<double> mean_barycenter;  // space-time average of the limit barycenter
  bool converged = false;
};

ConvergenceReport analyze_convergence(const FieldSequence& seq,
                                      const ObservableDictionary& dict,
                                      std::span<const Weight> weights,
                                      std::span<const int> schedule, double tol);

}  // namespace statconv
