#include "statconv/observables.hpp"

#include <cmath>
#include <stdexcept>

namespace statconv {

namespace {

void check_radius(double radius) {
  if (!(radius > 0.0)) throw std::invalid_argument("observable: radius must be positive");
}

}  // namespace

double CompactObservable::operator()(std::span<const double> u) const {
  if (u.size() != center.size())
    throw std::invalid_argument("observable: state dimension mismatch");
  if (profile == Profile::tent) {
    double t = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
      double d = std::abs(u[i] - center[i]);
      if (d > t) t = d;
    }
    t /= radius;
    return t < 1.0 ? 1.0 - t : 0.0;
  }
  double t2 = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    double d = (u[i] - center[i]) / radius;
    t2 += d * d;
  }
  if (t2 >= 1.0) return 0.0;
  double s = 1.0 - t2;
  return s * s;
}

double CompactObservable::lipschitz() const {
  if (profile == Profile::tent) return 1.0 / radius;
  return 8.0 / (3.0 * std::sqrt(3.0)) / radius;
}

CompactObservable make_tent(std::vector<double> center, double radius, int id) {
  check_radius(radius);
  return CompactObservable{std::move(center), radius, Profile::tent, id};
}

CompactObservable make_bump(std::vector<double> center, double radius, int id) {
  check_radius(radius);
  return CompactObservable{std::move(center), radius, Profile::smooth_bump, id};
}

double eval_observable(const CompactObservable& b, std::span<const double> u) {
  return b(u);
}

Weight Weight::constant() { return Weight(Kind::constant, "constant"); }

Weight Weight::linear() { return Weight(Kind::linear, "linear"); }

Weight Weight::polynomial(int degree) {
  if (degree < 0) throw std::invalid_argument("weight: polynomial degree must be >= 0");
  Weight w(Kind::polynomial, "poly" + std::to_string(degree));
  w.degree_ = degree;
  return w;
}

Weight Weight::tent(double center, double width) {
  if (!(width > 0.0)) throw std::invalid_argument("weight: tent width must be positive");
  double hw = 0.5 * width;
  if (center - hw < 0.0 || center + hw > 1.0)
    throw std::invalid_argument("weight: tent support must lie inside [0,1]");
  Weight w(Kind::tent, "tent" + std::to_string(static_cast<int>(std::lround(center * 100))));
  w.center_ = center;
  w.halfwidth_ = hw;
  return w;
}

double Weight::operator()(double z) const {
  switch (kind_) {
    case Kind::constant:
      return 1.0;
    case Kind::linear:
      return 2.0 * z;
    case Kind::polynomial:
      return (degree_ + 1) * std::pow(z, degree_);
    case Kind::tent: {
      double t = 1.0 - std::abs(z - center_) / halfwidth_;
      // triangle area is halfwidth_, so peak 1/halfwidth_ normalizes it
      return t > 0.0 ? t / halfwidth_ : 0.0;
    }
  }
  return 0.0;
}

double Weight::max_slope() const {
  switch (kind_) {
    case Kind::constant:
      return 0.0;
    case Kind::linear:
      return 2.0;
    case Kind::polynomial:
      return static_cast<double>(degree_ + 1) * degree_;
    case Kind::tent:
      return 1.0 / (halfwidth_ * halfwidth_);
  }
  return 0.0;
}

double weight_partial_sum(const Weight& w, int n_terms) {
  if (n_terms < 1)
    throw std::invalid_argument("weight_partial_sum: n_terms must be >= 1");
  double s = 0.0;
  for (int n = 1; n <= n_terms; ++n) s += w(static_cast<double>(n) / n_terms);
  return s;
}

std::vector<Weight> default_weights() {
  return {Weight::constant(),          Weight::linear(),
          Weight::polynomial(2),       Weight::tent(0.25, 0.5),
          Weight::tent(0.5, 0.5),      Weight::tent(0.75, 0.5)};
}

Weight weight_by_name(const std::string& name) {
  if (name == "constant") return Weight::constant();
  if (name == "linear") return Weight::linear();
  if (name.starts_with("poly")) {
    try {
      return Weight::polynomial(std::stoi(name.substr(4)));
    } catch (const std::logic_error&) {
      throw std::invalid_argument("weight: unknown name '" + name + "'");
    }
  }
  if (name.starts_with("tent")) {
    try {
      return Weight::tent(std::stoi(name.substr(4)) / 100.0, 0.5);
    } catch (const std::logic_error&) {
      throw std::invalid_argument("weight: unknown name '" + name + "'");
    }
  }
  throw std::invalid_argument("weight: unknown name '" + name + "'");
}

ObservableDictionary make_dictionary(std::vector<double> lo, std::vector<double> hi,
                                     double radius, Profile profile) {
  check_radius(radius);
  if (lo.size() != hi.size() || lo.empty())
    throw std::invalid_argument("dictionary: inconsistent box bounds");
  const int dim = static_cast<int>(lo.size());
  for (int d = 0; d < dim; ++d)
    if (hi[d] < lo[d]) throw std::invalid_argument("dictionary: box bounds reversed");

  std::vector<int> counts(dim);
  for (int d = 0; d < dim; ++d) {
    double span = hi[d] - lo[d];
    counts[d] = span > 0.0 ? static_cast<int>(std::ceil(span / radius)) + 1 : 1;
  }

  ObservableDictionary dict;
  dict.range_lo = lo;
  dict.range_hi = hi;
  std::vector<int> idx(dim, 0);
  int id = 0;
  while (true) {
    std::vector<double> center(dim);
    for (int d = 0; d < dim; ++d) center[d] = lo[d] + idx[d] * radius;
    dict.observables.push_back(CompactObservable{std::move(center), radius, profile, id++});
    int d = dim - 1;
    while (d >= 0 && ++idx[d] == counts[d]) idx[d--] = 0;
    if (d < 0) break;
  }
  return dict;
}

namespace {

ObservableDictionary dictionary_over_padded_range(const FieldSequence& seq,
                                                  double radius, Profile profile) {
  std::vector<double> lo, hi;
  seq.value_range(lo, hi);
  for (std::size_t d = 0; d < lo.size(); ++d) {
    double pad = 0.1 * (hi[d] - lo[d]);
    lo[d] -= pad;
    hi[d] += pad;
  }
  return make_dictionary(std::move(lo), std::move(hi), radius, profile);
}

}  // namespace

ObservableDictionary dictionary_for_sequence(const FieldSequence& seq,
                                             double radius_scale, Profile profile) {
  if (!(radius_scale > 0.0))
    throw std::invalid_argument("dictionary: radius_scale must be positive");
  std::vector<double> lo, hi;
  seq.value_range(lo, hi);
  double span = 0.0;
  for (std::size_t d = 0; d < lo.size(); ++d) span = std::max(span, hi[d] - lo[d]);
  double radius = span > 0.0 ? radius_scale * span : 1.0;
  return dictionary_over_padded_range(seq, radius, profile);
}

ObservableDictionary dictionary_for_sequence_with_radius(const FieldSequence& seq,
                                                         double radius,
                                                         Profile profile) {
  return dictionary_over_padded_range(seq, radius, profile);
}

}  // namespace statconv
