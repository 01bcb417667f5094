#pragma once

#include <span>
#include <string>
#include <vector>

#include "statconv/grid.hpp"

namespace statconv {

enum class Profile { tent, smooth_bump };

/// Compactly supported test observable on state space R^D with values in
/// [0,1]: equal to 1 at the center and exactly zero once the sup-norm
/// distance from the center reaches `radius`.
///
/// tent        1 - |u - c|_inf / r          (Lipschitz 1/r per coordinate)
/// smooth_bump (1 - |u - c|_2^2 / r^2)^2    (C^1, polynomial inside the ball)
struct CompactObservable {
  std::vector<double> center;
  double radius = 1.0;
  Profile profile = Profile::tent;
  int id = 0;

  double operator()(std::span<const double> u) const;
  int dim() const { return static_cast<int>(center.size()); }
  /// Lipschitz constant w.r.t. the euclidean norm: 1/r for the tent,
  /// sup 4t(1-t^2)/r = 8/(3 sqrt(3) r) for the bump.
  double lipschitz() const;
};

CompactObservable make_tent(std::vector<double> center, double radius, int id = 0);
CompactObservable make_bump(std::vector<double> center, double radius, int id = 0);

double eval_observable(const CompactObservable& b, std::span<const double> u);

/// Averaging weight on [0,1]: w >= 0, normalized so that \int_0^1 w = 1.
/// Kinds: constant 1, linear 2z, polynomial (k+1)z^k, and the normalized
/// tent with support [center - width/2, center + width/2] inside [0,1].
class Weight {
 public:
  enum class Kind { constant, linear, polynomial, tent };

  static Weight constant();
  static Weight linear();
  static Weight polynomial(int degree);
  static Weight tent(double center, double width);

  double operator()(double z) const;
  /// sup |w'| over the smooth pieces; Lipschitz constant of w on [0,1].
  double max_slope() const;
  Kind kind() const { return kind_; }
  const std::string& name() const { return name_; }

 private:
  Weight(Kind kind, std::string name) : kind_(kind), name_(std::move(name)) {}

  Kind kind_;
  std::string name_;
  int degree_ = 0;
  double center_ = 0.5;
  double halfwidth_ = 0.25;
};

/// w_N = sum_{n=1..n_terms} w(n / n_terms); rejects n_terms == 0.
double weight_partial_sum(const Weight& w, int n_terms);

/// The six stock weights: constant, 2z, 3z^2, tents at 1/4, 1/2, 3/4 of width 1/2.
std::vector<Weight> default_weights();

/// Lookup by the names used in configs and reports: "constant", "linear",
/// "poly<k>", "tent<percent>" (e.g. tent25 is the stock tent at z = 0.25).
Weight weight_by_name(const std::string& name);

/// Finite ordered family of observables covering a box of state values.
struct ObservableDictionary {
  std::vector<CompactObservable> observables;
  std::vector<double> range_lo;
  std::vector<double> range_hi;

  int dim() const { return static_cast<int>(range_lo.size()); }
  std::size_t size() const { return observables.size(); }
};

/// Tensor-product lattice of observables over [lo, hi], one center every
/// `radius` along each axis (supports overlap, every box point is covered).
ObservableDictionary make_dictionary(std::vector<double> lo, std::vector<double> hi,
                                     double radius, Profile profile = Profile::tent);

/// Dictionary over the attained value range of the sequence, padded by 10%
/// of the per-component span on each side. The default radius is
/// radius_scale times the largest component span (1.0 for constant data).
ObservableDictionary dictionary_for_sequence(const FieldSequence& seq,
                                             double radius_scale = 10.0,
                                             Profile profile = Profile::tent);
ObservableDictionary dictionary_for_sequence_with_radius(const FieldSequence& seq,
                                                         double radius,
                                                         Profile profile = Profile::tent);

}  // namespace statconv
