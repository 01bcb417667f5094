#include "statconv/ergodic.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace statconv {

namespace {

void check_schedule(std::span<const int> schedule, int limit) {
  if (schedule.empty()) throw std::invalid_argument("schedule: must be nonempty");
  int prev = 0;
  for (int n : schedule) {
    if (n <= prev) throw std::invalid_argument("schedule: must be strictly increasing");
    prev = n;
  }
  if (schedule.back() > limit)
    throw std::invalid_argument("schedule: checkpoint exceeds available length");
}

ConvergenceVerdict verdict_from_estimates(std::vector<int> checkpoints,
                                          std::vector<double> estimates, double tol,
                                          double scale) {
  ConvergenceVerdict v;
  v.checkpoints = std::move(checkpoints);
  v.estimates = std::move(estimates);
  v.estimate = v.estimates.back();
  double gap = 0.0;
  for (std::size_t i = 0; i < v.estimates.size(); ++i)
    for (std::size_t j = i + 1; j < v.estimates.size(); ++j)
      gap = std::max(gap, std::abs(v.estimates[i] - v.estimates[j]));
  v.tail_gap = gap / scale;
  v.tol = tol;
  v.converged = v.tail_gap <= tol;
  return v;
}

// SplitMix64: deterministic, platform-independent stream for perturbations.
std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

double unit_noise(std::uint64_t seed, std::uint64_t member, std::uint64_t cell,
                  std::uint64_t comp) {
  std::uint64_t h = splitmix64(seed ^ splitmix64(member ^ splitmix64(cell ^ splitmix64(comp))));
  double u = static_cast<double>(h >> 11) * 0x1.0p-53;  // [0,1)
  return 2.0 * u - 1.0;
}

}  // namespace

ObservableTrace::ObservableTrace(const FieldSequence& seq, const CompactObservable& b,
                                 int n_used) {
  if (n_used < 1 || n_used > seq.length())
    throw std::invalid_argument("trace: n_used outside [1, length]");
  if (b.dim() != seq.state_dim())
    throw std::invalid_argument("trace: observable dimension mismatch");
  length_ = n_used;
  cells_ = seq.grid().cell_count();
  cell_volume_ = seq.grid().cell_volume();
  domain_measure_ = seq.grid().domain_measure();
  values_.resize(static_cast<std::size_t>(length_) * cells_);
  for (int n = 1; n <= length_; ++n) {
    double* row = values_.data() + static_cast<std::size_t>(n - 1) * cells_;
    for (int cell = 0; cell < cells_; ++cell) row[cell] = b(seq.state(n, cell));
  }
}

double ObservableTrace::correlation(int n, int m) const {
  auto a = values(n);
  auto b = values(m);
  double s = 0.0;
  for (int c = 0; c < cells_; ++c) s += a[c] * b[c];
  return s * cell_volume_;
}

CorrelationRecord correlation_matrix(const FieldSequence& seq,
                                     const CompactObservable& b, int n_used) {
  ObservableTrace trace(seq, b, n_used);
  CorrelationRecord rec;
  rec.observable_id = b.id;
  rec.size = n_used;
  rec.domain_measure = trace.domain_measure();
  rec.entries.resize(static_cast<std::size_t>(n_used) * n_used);
  for (int n = 1; n <= n_used; ++n) {
    for (int m = n; m <= n_used; ++m) {
      double c = trace.correlation(n, m);
      rec.entries[static_cast<std::size_t>(n - 1) * n_used + (m - 1)] = c;
      rec.entries[static_cast<std::size_t>(m - 1) * n_used + (n - 1)] = c;
    }
  }
  return rec;
}

ConvergenceVerdict weak_correlation_verdict(const CorrelationRecord& rec, int m,
                                            std::span<const int> schedule, double tol) {
  if (m < 1 || m > rec.size)
    throw std::invalid_argument("correlation verdict: m outside the record");
  check_schedule(schedule, rec.size);
  if (!(tol > 0.0)) throw std::invalid_argument("correlation verdict: tol must be positive");
  std::vector<double> estimates;
  estimates.reserve(schedule.size());
  double run = 0.0;
  int upto = 0;
  for (int cp : schedule) {
    for (int n = upto + 1; n <= cp; ++n) run += rec.at(n, m);
    upto = cp;
    estimates.push_back(run / cp);
  }
  return verdict_from_estimates({schedule.begin(), schedule.end()}, std::move(estimates),
                                tol, rec.domain_measure);
}

ConvergenceVerdict strong_correlation_verdict(const CorrelationRecord& rec, int m,
                                              std::span<const Weight> weights,
                                              std::span<const int> schedule, double tol) {
  if (weights.empty())
    throw std::invalid_argument("correlation verdict: weight list must be nonempty");
  if (m < 1 || m > rec.size)
    throw std::invalid_argument("correlation verdict: m outside the record");
  check_schedule(schedule, rec.size);
  if (!(tol > 0.0)) throw std::invalid_argument("correlation verdict: tol must be positive");

  // estimates[w][i] = weighted average at checkpoint i for weight w
  std::vector<std::vector<double>> estimates(weights.size());
  for (std::size_t wi = 0; wi < weights.size(); ++wi) {
    const Weight& w = weights[wi];
    for (int cp : schedule) {
      double acc = 0.0;
      double w_n = weight_partial_sum(w, cp);
      if (!(w_n > 0.0))
        throw std::invalid_argument("correlation verdict: weight vanishes on sample points");
      for (int n = 1; n <= cp; ++n)
        acc += w(static_cast<double>(n) / cp) * rec.at(n, m);
      estimates[wi].push_back(acc / w_n);
    }
  }

  double per_weight_gap = 0.0;
  for (const auto& est : estimates)
    for (std::size_t i = 0; i < est.size(); ++i)
      for (std::size_t j = i + 1; j < est.size(); ++j)
        per_weight_gap = std::max(per_weight_gap, std::abs(est[i] - est[j]));

  double cross_weight = 0.0;
  for (std::size_t a = 0; a < estimates.size(); ++a)
    for (std::size_t b = a + 1; b < estimates.size(); ++b)
      cross_weight = std::max(cross_weight,
                              std::abs(estimates[a].back() - estimates[b].back()));

  ConvergenceVerdict v;
  v.checkpoints.assign(schedule.begin(), schedule.end());
  // reported estimates: mean over weights at each checkpoint
  for (std::size_t i = 0; i < schedule.size(); ++i) {
    double s = 0.0;
    for (const auto& est : estimates) s += est[i];
    v.estimates.push_back(s / estimates.size());
  }
  v.estimate = v.estimates.back();
  v.tail_gap = std::max(per_weight_gap, cross_weight) / rec.domain_measure;
  v.tol = tol;
  v.converged = v.tail_gap <= tol;
  return v;
}

double windowed_correlation(const CorrelationRecord& rec, double alpha, double beta,
                            int m, int n_used) {
  if (!(0.0 <= alpha && alpha < beta && beta <= 1.0))
    throw std::invalid_argument("windowed correlation: need 0 <= alpha < beta <= 1");
  if (m < 1 || m > rec.size)
    throw std::invalid_argument("windowed correlation: m outside the record");
  if (n_used < 1 || n_used > rec.size)
    throw std::invalid_argument("windowed correlation: N outside the record");
  int lo = std::max(1, static_cast<int>(std::ceil(alpha * n_used)));
  int hi = static_cast<int>(std::floor(beta * n_used));
  if (hi < lo) throw std::invalid_argument("windowed correlation: empty index window");
  double acc = 0.0;
  for (int n = lo; n <= hi; ++n) acc += rec.at(n, m);
  return acc / (beta - alpha) / n_used;
}

double disintegration_gap(const CorrelationRecord& rec, const Weight& w, int n_used,
                          int m_used) {
  if (n_used < 1 || n_used > rec.size || m_used < 1 || m_used > rec.size)
    throw std::invalid_argument("disintegration gap: indices outside the record");
  double wn = weight_partial_sum(w, n_used);
  double wm = weight_partial_sum(w, m_used);
  if (!(wn > 0.0) || !(wm > 0.0))
    throw std::invalid_argument("disintegration gap: weight vanishes on sample points");

  std::vector<double> wn_vals(n_used);
  for (int n = 1; n <= n_used; ++n)
    wn_vals[n - 1] = w(static_cast<double>(n) / n_used);

  // inner[m] = (1/w_N) sum_n w(n/N) C[n,m], for every m up to max(N, M)
  int m_top = std::max(n_used, m_used);
  std::vector<double> inner(m_top);
  for (int m = 1; m <= m_top; ++m) {
    double acc = 0.0;
    for (int n = 1; n <= n_used; ++n) acc += wn_vals[n - 1] * rec.at(n, m);
    inner[m - 1] = acc / wn;
  }

  double lhs = 0.0;
  for (int m = 1; m <= n_used; ++m) lhs += wn_vals[m - 1] * inner[m - 1];
  lhs /= wn;

  double rhs = 0.0;
  for (int m = 1; m <= m_used; ++m)
    rhs += w(static_cast<double>(m) / m_used) * inner[m - 1];
  rhs /= wm;

  return std::abs(lhs - rhs);
}

StationarityModulus stationarity_modulus(const FieldSequence& seq,
                                         const CompactObservable& b, int k,
                                         int max_shift, long long max_samples) {
  if (k < 1 || k > seq.length())
    throw std::invalid_argument("stationarity modulus: k outside [1, length]");
  if (max_shift < 0) throw std::invalid_argument("stationarity modulus: negative shift");
  if (max_samples < 1)
    throw std::invalid_argument("stationarity modulus: max_samples must be >= 1");
  const int len = seq.length();
  if (k + max_shift > len)
    throw std::invalid_argument("stationarity modulus: window exceeds the sequence");

  ObservableTrace trace(seq, b, len);

  // triples (k1, k2, s): k <= k1 <= k2, 0 <= s <= max_shift, k2 + s <= len
  long long total = 0;
  for (int k1 = k; k1 <= len; ++k1)
    for (int k2 = k1; k2 <= len; ++k2)
      total += std::min(max_shift, len - k2) + 1;

  StationarityModulus out;
  out.observable_id = b.id;
  out.start_index = k;
  out.max_shift = max_shift;

  double worst = 0.0;
  if (total <= max_samples) {
    for (int k1 = k; k1 <= len; ++k1)
      for (int k2 = k1; k2 <= len; ++k2) {
        double base = trace.correlation(k1, k2);
        int top = std::min(max_shift, len - k2);
        for (int s = 0; s <= top; ++s)
          worst = std::max(worst, std::abs(base - trace.correlation(k1 + s, k2 + s)));
      }
    out.samples = total;
    out.exhaustive = true;
  } else {
    // stratified deterministic subsample: a fixed-seed counter stream picks
    // (k1, k2, s) uniformly; duplicates are harmless for a sup estimate
    out.samples = max_samples;
    out.exhaustive = false;
    for (long long i = 0; i < max_samples; ++i) {
      std::uint64_t h1 = splitmix64(0x9d2c5680u ^ (static_cast<std::uint64_t>(i) << 1));
      std::uint64_t h2 = splitmix64(h1 ^ 0xda3e39cb94b95bdbULL);
      std::uint64_t h3 = splitmix64(h2 ^ 0x94d049bb133111ebULL);
      int k1 = k + static_cast<int>(h1 % static_cast<std::uint64_t>(len - k + 1));
      int k2 = k1 + static_cast<int>(h2 % static_cast<std::uint64_t>(len - k1 + 1));
      int top = std::min(max_shift, len - k2);
      int s = static_cast<int>(h3 % static_cast<std::uint64_t>(top + 1));
      worst = std::max(worst,
                       std::abs(trace.correlation(k1, k2) - trace.correlation(k1 + s, k2 + s)));
    }
  }
  out.modulus = worst;
  return out;
}

double averaged_stationarity_modulus(const FieldSequence& seq,
                                     const CompactObservable& b, int k, int n_used) {
  if (k < 1) throw std::invalid_argument("averaged stationarity: k must be >= 1");
  if (n_used < 1) throw std::invalid_argument("averaged stationarity: N must be >= 1");
  if (k + n_used > seq.length())
    throw std::invalid_argument("averaged stationarity: window exceeds the sequence");
  ObservableTrace trace(seq, b, seq.length());
  double acc = 0.0;
  for (int n = 1; n <= n_used; ++n)
    for (int m = 1; m <= n_used; ++m) {
      double lhs = trace.correlation(k + n, k + m);
      double rhs = trace.correlation(k, k + std::abs(n - m));
      acc += std::abs(lhs - rhs);
    }
  return acc / (static_cast<double>(n_used) * n_used);
}

double statistical_density_gap(const FieldSequence& u, const FieldSequence& v,
                               double eps, int n_used) {
  if (!(u.grid() == v.grid()) || u.state_dim() != v.state_dim())
    throw std::invalid_argument("density gap: sequences on different grids");
  if (n_used < 1 || n_used > std::min(u.length(), v.length()))
    throw std::invalid_argument("density gap: n_used outside [1, length]");
  if (!(eps > 0.0)) throw std::invalid_argument("density gap: eps must be positive");
  const int cells = u.grid().cell_count();
  const int dim = u.state_dim();
  const double vol = u.grid().cell_volume();
  int count = 0;
  for (int n = 1; n <= n_used; ++n) {
    double l1 = 0.0;
    for (int cell = 0; cell < cells; ++cell) {
      auto a = u.state(n, cell);
      auto b = v.state(n, cell);
      double norm2 = 0.0;
      for (int c = 0; c < dim; ++c) {
        double d = a[c] - b[c];
        norm2 += d * d;
      }
      l1 += std::sqrt(norm2) * vol;
    }
    if (l1 > eps) ++count;
  }
  return static_cast<double>(count) / n_used;
}

std::vector<int> index_set_members(IndexSet set, int length,
                                   std::span<const int> custom_indices) {
  std::vector<int> out;
  switch (set) {
    case IndexSet::squares:
      for (int r = 1; r * r <= length; ++r) out.push_back(r * r);
      break;
    case IndexSet::powers_of_two:
      for (long long p = 1; p <= length; p *= 2) out.push_back(static_cast<int>(p));
      break;
    case IndexSet::custom: {
      out.assign(custom_indices.begin(), custom_indices.end());
      std::sort(out.begin(), out.end());
      out.erase(std::unique(out.begin(), out.end()), out.end());
      for (int n : out)
        if (n < 1 || n > length)
          throw std::invalid_argument("perturbation: custom index outside [1, length]");
      break;
    }
  }
  return out;
}

FieldSequence perturb_on_index_set(const FieldSequence& seq, IndexSet set,
                                   double magnitude, std::uint64_t seed,
                                   std::span<const int> custom_indices) {
  FieldSequence out = seq;
  const int cells = seq.grid().cell_count();
  const int dim = seq.state_dim();
  for (int n : index_set_members(set, seq.length(), custom_indices)) {
    for (int cell = 0; cell < cells; ++cell)
      for (int c = 0; c < dim; ++c)
        out.value(n, cell, c) +=
            magnitude * unit_noise(seed, static_cast<std::uint64_t>(n),
                                   static_cast<std::uint64_t>(cell),
                                   static_cast<std::uint64_t>(c));
  }
  return out;
}

namespace {

double field_l1_gap(std::span<const double> a, std::span<const double> b, double vol) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] - b[i]);
  return s * vol;
}

}  // namespace

ConvergenceReport analyze_convergence(const FieldSequence& seq,
                                      const ObservableDictionary& dict,
                                      std::span<const Weight> weights,
                                      std::span<const int> schedule, double tol) {
  if (dict.size() == 0) throw std::invalid_argument("analysis: dictionary must be nonempty");
  if (weights.empty()) throw std::invalid_argument("analysis: weight list must be nonempty");
  check_schedule(schedule, seq.length());
  if (!(tol > 0.0)) throw std::invalid_argument("analysis: tol must be positive");

  const double measure = seq.grid().domain_measure();
  const double vol = seq.grid().cell_volume();

  ConvergenceReport report;
  report.schedule.assign(schedule.begin(), schedule.end());
  report.tol = tol;
  bool all_ok = true;

  for (const auto& b : dict.observables) {
    // means[w][i] = weighted ergodic mean field at checkpoint i
    std::vector<std::vector<std::vector<double>>> means(weights.size());
    for (std::size_t wi = 0; wi < weights.size(); ++wi)
      for (int cp : schedule)
        means[wi].push_back(weighted_ergodic_mean(seq, b, weights[wi], cp));

    for (std::size_t wi = 0; wi < weights.size(); ++wi) {
      ConvergenceVerdict v;
      v.checkpoints = report.schedule;
      v.tol = tol;
      for (const auto& field : means[wi]) {
        double avg = 0.0;
        for (double x : field) avg += x;
        v.estimates.push_back(avg * vol / measure);
      }
      v.estimate = v.estimates.back();
      double gap = 0.0;
      for (std::size_t i = 0; i < means[wi].size(); ++i)
        for (std::size_t j = i + 1; j < means[wi].size(); ++j)
          gap = std::max(gap, field_l1_gap(means[wi][i], means[wi][j], vol));
      v.tail_gap = gap / measure;
      v.converged = v.tail_gap <= tol;
      all_ok = all_ok && v.converged;
      report.pairs.push_back(PairVerdict{b.id, weights[wi].name(), std::move(v)});
    }

    IndependenceCheck ind;
    ind.observable_id = b.id;
    double spread = 0.0;
    for (std::size_t a = 0; a < weights.size(); ++a)
      for (std::size_t c = a + 1; c < weights.size(); ++c)
        spread = std::max(spread,
                          field_l1_gap(means[a].back(), means[c].back(), vol));
    ind.spread = spread / measure;
    ind.ok = ind.spread <= tol;
    all_ok = all_ok && ind.ok;
    report.independence.push_back(ind);
  }

  // limit-candidate measure at the last checkpoint, first weight; distances
  // between consecutive checkpoint measures report how settled the atoms are
  std::vector<ParametrizedMeasure> checkpoint_measures;
  checkpoint_measures.reserve(schedule.size());
  for (int cp : schedule)
    checkpoint_measures.push_back(parametrized_measure(seq, weights[0], cp));
  for (std::size_t i = 0; i + 1 < checkpoint_measures.size(); ++i)
    report.checkpoint_measure_distances.push_back(
        parametrized_distance(checkpoint_measures[i], checkpoint_measures[i + 1], 1.0));
  report.limit_measure = std::move(checkpoint_measures.back());

  report.mean_barycenter.assign(seq.state_dim(), 0.0);
  for (const auto& mu : report.limit_measure.cell_measures) {
    auto ms = moments(mu, 1.0);
    for (int c = 0; c < seq.state_dim(); ++c) report.mean_barycenter[c] += ms.barycenter[c];
  }
  for (int c = 0; c < seq.state_dim(); ++c)
    report.mean_barycenter[c] /= static_cast<double>(report.limit_measure.cell_measures.size());

  report.converged = all_ok;
  return report;
}

}  // namespace statconv
