#include "statconv/euler.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

#include "statconv/fixtures.hpp"

namespace statconv {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::string cell_label(const SpaceGrid& g, int cell) {
  if (g.dim == 1) return std::to_string(cell);
  return std::to_string(cell / g.cells[1]) + "," + std::to_string(cell % g.cells[1]);
}

}  // namespace

void EulerParams::validate() const {
  if (!(a > 0.0)) throw std::invalid_argument("euler: a must be positive");
  if (!(gamma > 1.0)) throw std::invalid_argument("euler: gamma must exceed 1");
  if (space_dim != 1 && space_dim != 2)
    throw std::invalid_argument("euler: space_dim must be 1 or 2");
  if (!(viscosity >= 0.0))
    throw std::invalid_argument("euler: viscosity must be nonnegative");
  if (!(cfl > 0.0 && cfl < 1.0))
    throw std::invalid_argument("euler: cfl must lie in (0,1)");
}

double pressure(double rho, const EulerParams& p) {
  if (!(rho >= 0.0)) throw std::domain_error("pressure: negative density");
  return p.a * std::pow(rho, p.gamma);
}

double pressure_potential(double rho, const EulerParams& p) {
  if (!(rho >= 0.0))
    throw std::domain_error("pressure_potential: negative density");
  return p.a * std::pow(rho, p.gamma) / (p.gamma - 1.0);
}

double energy_density(double rho, std::span<const double> momentum,
                      const EulerParams& p) {
  double m2 = 0.0;
  for (double m : momentum) m2 += m * m;
  if (rho > 0.0) return 0.5 * m2 / rho + pressure_potential(rho, p);
  if (rho == 0.0 && m2 == 0.0) return 0.0;
  return std::numeric_limits<double>::infinity();
}

std::array<double, 2> SpaceGrid::center(int cell) const {
  if (dim == 1) return {(cell + 0.5) * dx(0), 0.0};
  int ix = cell / cells[1];
  int iy = cell % cells[1];
  return {(ix + 0.5) * dx(0), (iy + 0.5) * dx(1)};
}

double max_wave_speed(const EulerState& s, const EulerParams& p) {
  const int dim = s.grid.dim;
  const int nc = s.grid.count();
  double alpha = 0.0;
  for (int c = 0; c < nc; ++c) {
    double rho = s.rho[c];
    if (!(rho > 0.0))
      throw std::runtime_error("wave speed: nonpositive density at cell " +
                               cell_label(s.grid, c));
    double sound = std::sqrt(p.a * p.gamma * std::pow(rho, p.gamma - 1.0));
    double umax = 0.0;
    for (int d = 0; d < dim; ++d)
      umax = std::max(umax, std::abs(s.mom[static_cast<std::size_t>(c) * dim + d] / rho));
    alpha = std::max(alpha, umax + sound);
  }
  return alpha;
}

double suggested_dt(const EulerState& s, const EulerParams& p) {
  p.validate();
  double alpha = max_wave_speed(s, p);
  double inv_h = 0.0;
  double inv_h2 = 0.0;
  for (int d = 0; d < s.grid.dim; ++d) {
    inv_h += 1.0 / s.grid.dx(d);
    inv_h2 += 1.0 / (s.grid.dx(d) * s.grid.dx(d));
  }
  double dt = 1.0 / (alpha * inv_h);
  if (p.viscosity > 0.0) dt = std::min(dt, 1.0 / (2.0 * p.viscosity * inv_h2));
  return p.cfl * dt;
}

EulerState lf_step_dt(const EulerState& s, const EulerParams& p, double dt) {
  p.validate();
  const int dim = s.grid.dim;
  if (dim != p.space_dim)
    throw std::invalid_argument("lf_step: state/params dimension mismatch");
  if (!(dt > 0.0)) throw std::invalid_argument("lf_step: dt must be positive");
  const int nc = s.grid.count();
  if (static_cast<int>(s.rho.size()) != nc ||
      static_cast<int>(s.mom.size()) != nc * dim)
    throw std::invalid_argument("lf_step: state size mismatch");

  const double alpha = max_wave_speed(s, p);
  const int comps = 1 + dim;

  // Gather (rho, m) into one array so the face sweep is component-agnostic.
  std::vector<double> u(static_cast<std::size_t>(nc) * comps);
  std::vector<double> press(nc);
  for (int c = 0; c < nc; ++c) {
    u[static_cast<std::size_t>(c) * comps] = s.rho[c];
    for (int d = 0; d < dim; ++d)
      u[static_cast<std::size_t>(c) * comps + 1 + d] =
          s.mom[static_cast<std::size_t>(c) * dim + d];
    press[c] = pressure(s.rho[c], p);
  }

  auto flux = [&](int c, int d, double* out) {
    const double* st = u.data() + static_cast<std::size_t>(c) * comps;
    double rho = st[0];
    double md = st[1 + d];
    out[0] = md;
    for (int k = 0; k < dim; ++k)
      out[1 + k] = st[1 + k] * md / rho + (k == d ? press[c] : 0.0);
  };

  std::vector<double> un = u;
  const int cx = s.grid.cells[0];
  const int cy = dim == 2 ? s.grid.cells[1] : 1;

  double fl[3], fr[3];
  for (int d = 0; d < dim; ++d) {
    const double lam = dt / s.grid.dx(d);
    for (int ix = 0; ix < cx; ++ix) {
      for (int iy = 0; iy < cy; ++iy) {
        int c = ix * cy + iy;
        int nb = d == 0 ? ((ix + 1) % cx) * cy + iy : ix * cy + (iy + 1) % cy;
        flux(c, d, fl);
        flux(nb, d, fr);
        for (int k = 0; k < comps; ++k) {
          double g = 0.5 * (fl[k] + fr[k]) -
                     0.5 * alpha * (u[static_cast<std::size_t>(nb) * comps + k] -
                                    u[static_cast<std::size_t>(c) * comps + k]);
          un[static_cast<std::size_t>(c) * comps + k] -= lam * g;
          un[static_cast<std::size_t>(nb) * comps + k] += lam * g;
        }
      }
    }
  }

  if (p.viscosity > 0.0) {
    for (int d = 0; d < dim; ++d) {
      const double coef = p.viscosity * dt / (s.grid.dx(d) * s.grid.dx(d));
      for (int ix = 0; ix < cx; ++ix) {
        for (int iy = 0; iy < cy; ++iy) {
          int c = ix * cy + iy;
          int lo, hi;
          if (d == 0) {
            lo = ((ix + cx - 1) % cx) * cy + iy;
            hi = ((ix + 1) % cx) * cy + iy;
          } else {
            lo = ix * cy + (iy + cy - 1) % cy;
            hi = ix * cy + (iy + 1) % cy;
          }
          for (int k = 0; k < comps; ++k)
            un[static_cast<std::size_t>(c) * comps + k] +=
                coef * (u[static_cast<std::size_t>(hi) * comps + k] -
                        2.0 * u[static_cast<std::size_t>(c) * comps + k] +
                        u[static_cast<std::size_t>(lo) * comps + k]);
        }
      }
    }
  }

  EulerState out;
  out.grid = s.grid;
  out.time = s.time + dt;
  out.rho.resize(nc);
  out.mom.resize(static_cast<std::size_t>(nc) * dim);
  for (int c = 0; c < nc; ++c) {
    double rho = un[static_cast<std::size_t>(c) * comps];
    bool ok = rho > 0.0 && std::isfinite(rho);
    for (int d = 0; d < dim && ok; ++d)
      ok = std::isfinite(un[static_cast<std::size_t>(c) * comps + 1 + d]);
    if (!ok)
      throw std::runtime_error(
          "time step left the admissible set (cfl violation?): rho = " +
          std::to_string(rho) + " at cell " + cell_label(s.grid, c) +
          ", dt = " + std::to_string(dt));
    out.rho[c] = rho;
    for (int d = 0; d < dim; ++d)
      out.mom[static_cast<std::size_t>(c) * dim + d] =
          un[static_cast<std::size_t>(c) * comps + 1 + d];
  }
  return out;
}

EulerState lf_step(const EulerState& s, const EulerParams& p) {
  return lf_step_dt(s, p, suggested_dt(s, p));
}

double total_mass(const EulerState& s) {
  double sum = 0.0;
  for (double r : s.rho) sum += r;
  return sum * s.grid.cell_volume();
}

double total_energy(const EulerState& s, const EulerParams& p) {
  const int dim = s.grid.dim;
  double sum = 0.0;
  for (int c = 0; c < s.grid.count(); ++c) {
    std::span<const double> m{s.mom.data() + static_cast<std::size_t>(c) * dim,
                              static_cast<std::size_t>(dim)};
    sum += energy_density(s.rho[c], m, p);
  }
  return sum * s.grid.cell_volume();
}

namespace {

// Spatial mode table: (frequency, use sine) per dimension. Mode 0 is the
// constant; in one dimension the remaining seven walk up the frequencies,
// in two dimensions they combine the first sine/cosine pair per axis.
struct Mode1D {
  int freq;
  bool sine;
};

constexpr Mode1D kModes1D[8] = {{0, false}, {1, true}, {1, false}, {2, true},
                                {2, false}, {3, true}, {3, false}, {4, true}};

// (fx, sx, fy, sy): frequency and sine/cosine flag per axis; frequency 0
// means the constant factor 1.
struct Mode2D {
  int fx;
  bool sx;
  int fy;
  bool sy;
};

constexpr Mode2D kModes2D[8] = {{0, false, 0, false}, {1, true, 0, false},
                                {1, false, 0, false}, {0, false, 1, true},
                                {0, false, 1, false}, {1, true, 1, true},
                                {1, true, 1, false},  {1, false, 1, false}};

double axis_value(int freq, bool sine, double x, double length) {
  if (freq == 0) return 1.0;
  double arg = kTwoPi * freq * x / length;
  return sine ? std::sin(arg) : std::cos(arg);
}

double axis_derivative(int freq, bool sine, double x, double length) {
  if (freq == 0) return 0.0;
  double k = kTwoPi * freq / length;
  double arg = k * x;
  return sine ? k * std::cos(arg) : -k * std::sin(arg);
}

}  // namespace

double TestFunction::space_value(std::array<double, 2> x) const {
  if (space_dim == 1) {
    const Mode1D& m = kModes1D[mode];
    return axis_value(m.freq, m.sine, x[0], lengths[0]);
  }
  const Mode2D& m = kModes2D[mode];
  return axis_value(m.fx, m.sx, x[0], lengths[0]) *
         axis_value(m.fy, m.sy, x[1], lengths[1]);
}

std::array<double, 2> TestFunction::space_gradient(std::array<double, 2> x) const {
  if (space_dim == 1) {
    const Mode1D& m = kModes1D[mode];
    return {axis_derivative(m.freq, m.sine, x[0], lengths[0]), 0.0};
  }
  const Mode2D& m = kModes2D[mode];
  double vx = axis_value(m.fx, m.sx, x[0], lengths[0]);
  double vy = axis_value(m.fy, m.sy, x[1], lengths[1]);
  double dx = axis_derivative(m.fx, m.sx, x[0], lengths[0]);
  double dy = axis_derivative(m.fy, m.sy, x[1], lengths[1]);
  return {dx * vy, vx * dy};
}

std::vector<TestFunction> standard_test_functions(int space_dim, double final_time,
                                                  std::array<double, 2> lengths) {
  if (space_dim != 1 && space_dim != 2)
    throw std::invalid_argument("test functions: space_dim must be 1 or 2");
  if (!(final_time > 0.0))
    throw std::invalid_argument("test functions: final_time must be positive");
  std::vector<TestFunction> out;
  out.reserve(8);
  for (int m = 0; m < 8; ++m)
    out.push_back(TestFunction{m, space_dim, final_time, lengths});
  return out;
}

namespace {

/// Accumulates the weak-form residuals of a piecewise-constant-in-time
/// trajectory against a test set, midpoint quadrature in both variables.
class ResidualAccumulator {
 public:
  ResidualAccumulator(const SpaceGrid& grid, std::span<const TestFunction> tests,
                      const EulerParams& params)
      : grid_(grid),
        params_(params),
        tests_(tests.begin(), tests.end()),
        n_tests_(static_cast<int>(tests.size())) {
    const int nc = grid.count();
    values_.resize(static_cast<std::size_t>(n_tests_) * nc);
    grads_.resize(static_cast<std::size_t>(n_tests_) * nc * grid.dim);
    for (int q = 0; q < n_tests_; ++q) {
      for (int c = 0; c < nc; ++c) {
        auto x = grid.center(c);
        values_[static_cast<std::size_t>(q) * nc + c] = tests_[q].space_value(x);
        auto g = tests_[q].space_gradient(x);
        for (int d = 0; d < grid.dim; ++d)
          grads_[(static_cast<std::size_t>(q) * nc + c) * grid.dim + d] = g[d];
      }
    }
    acc1_.assign(n_tests_, 0.0);
    acc2_.assign(static_cast<std::size_t>(n_tests_) * grid.dim, 0.0);
  }

  void add_initial(std::span<const double> rho0, std::span<const double> mom0) {
    const int nc = grid_.count();
    const int dim = grid_.dim;
    for (int q = 0; q < n_tests_; ++q) {
      double psi0 = tests_[q].time_value(0.0);
      double srho = 0.0;
      for (int c = 0; c < nc; ++c)
        srho += rho0[c] * values_[static_cast<std::size_t>(q) * nc + c];
      acc1_[q] += psi0 * srho;
      for (int k = 0; k < dim; ++k) {
        double sm = 0.0;
        for (int c = 0; c < nc; ++c)
          sm += mom0[static_cast<std::size_t>(c) * dim + k] *
                values_[static_cast<std::size_t>(q) * nc + c];
        acc2_[static_cast<std::size_t>(q) * dim + k] += psi0 * sm;
      }
    }
  }

  void add_slab(std::span<const double> rho, std::span<const double> mom,
                double t0, double dt) {
    const int nc = grid_.count();
    const int dim = grid_.dim;
    press_.resize(nc);
    for (int c = 0; c < nc; ++c) press_[c] = pressure(rho[c], params_);
    const double tm = t0 + 0.5 * dt;
    for (int q = 0; q < n_tests_; ++q) {
      const double* val = values_.data() + static_cast<std::size_t>(q) * nc;
      const double* grd = grads_.data() + static_cast<std::size_t>(q) * nc * dim;
      double dpsi = tests_[q].time_derivative(tm);
      double psi = tests_[q].time_value(tm);
      double srho = 0.0;
      double sdiv = 0.0;
      for (int c = 0; c < nc; ++c) {
        srho += rho[c] * val[c];
        for (int d = 0; d < dim; ++d)
          sdiv += mom[static_cast<std::size_t>(c) * dim + d] *
                  grd[static_cast<std::size_t>(c) * dim + d];
      }
      acc1_[q] += dt * (dpsi * srho + psi * sdiv);
      for (int k = 0; k < dim; ++k) {
        double sm = 0.0;
        double sflux = 0.0;
        for (int c = 0; c < nc; ++c) {
          double mk = mom[static_cast<std::size_t>(c) * dim + k];
          sm += mk * val[c];
          for (int j = 0; j < dim; ++j) {
            double f = rho[c] > 0.0
                           ? mk * mom[static_cast<std::size_t>(c) * dim + j] / rho[c]
                           : 0.0;
            if (j == k) f += press_[c];
            sflux += f * grd[static_cast<std::size_t>(c) * dim + j];
          }
        }
        acc2_[static_cast<std::size_t>(q) * dim + k] += dt * (dpsi * sm + psi * sflux);
      }
    }
  }

  std::vector<ResidualPair> finalize() const {
    const double vol = grid_.cell_volume();
    std::vector<ResidualPair> out(n_tests_);
    for (int q = 0; q < n_tests_; ++q) {
      out[q].continuity = std::abs(acc1_[q]) * vol;
      double worst = 0.0;
      for (int k = 0; k < grid_.dim; ++k)
        worst = std::max(
            worst, std::abs(acc2_[static_cast<std::size_t>(q) * grid_.dim + k]));
      out[q].momentum = worst * vol;
    }
    return out;
  }

 private:
  SpaceGrid grid_;
  EulerParams params_;
  std::vector<TestFunction> tests_;
  int n_tests_;
  std::vector<double> values_;
  std::vector<double> grads_;
  std::vector<double> press_;
  std::vector<double> acc1_;
  std::vector<double> acc2_;
};

SpaceGrid space_grid_of(const Grid& g) {
  SpaceGrid sg;
  sg.dim = g.space_dim;
  sg.cells = g.cells;
  sg.lengths = g.lengths;
  if (g.space_dim == 1) {
    sg.cells[1] = 1;
    sg.lengths[1] = 1.0;
  }
  return sg;
}

}  // namespace

std::vector<ResidualPair> consistency_residuals(const FieldSequence& seq, int member,
                                                std::span<const TestFunction> tests,
                                                const EulerParams& params,
                                                std::span<const double> rho0,
                                                std::span<const double> mom0) {
  params.validate();
  const Grid& g = seq.grid();
  const int dim = params.space_dim;
  if (g.space_dim != dim)
    throw std::invalid_argument("residuals: grid/params dimension mismatch");
  if (seq.state_dim() != 1 + dim)
    throw std::invalid_argument("residuals: sequence must carry (rho, m) states");
  if (member < 1 || member > seq.length())
    throw std::invalid_argument("residuals: member index out of range");
  const int sc = g.space_cell_count();
  if (static_cast<int>(rho0.size()) != sc ||
      static_cast<int>(mom0.size()) != sc * dim)
    throw std::invalid_argument("residuals: initial data size mismatch");

  SpaceGrid sg = space_grid_of(g);
  ResidualAccumulator acc(sg, tests, params);
  acc.add_initial(rho0, mom0);

  std::vector<double> rho(sc);
  std::vector<double> mom(static_cast<std::size_t>(sc) * dim);
  const double dt = g.dt();
  for (int t = 0; t < g.time_steps; ++t) {
    for (int c = 0; c < sc; ++c) {
      int cell = t * sc + c;
      rho[c] = seq.value(member, cell, 0);
      for (int d = 0; d < dim; ++d)
        mom[static_cast<std::size_t>(c) * dim + d] = seq.value(member, cell, 1 + d);
    }
    acc.add_slab(rho, mom, t * dt, dt);
  }
  return acc.finalize();
}

namespace {

double average_sin(double a, double b, double length) {
  // Mean of sin(2 pi x / length) over [a, b], exact.
  double k = kTwoPi / length;
  return (std::cos(k * a) - std::cos(k * b)) / (k * (b - a));
}

void preset_initial(const FamilyConfig& cfg, const SpaceGrid& sg,
                    std::vector<double>& rho, std::vector<double>& mom) {
  const int dim = sg.dim;
  const int nc = sg.count();
  rho.assign(nc, 0.0);
  mom.assign(static_cast<std::size_t>(nc) * dim, 0.0);

  if (cfg.preset == "constant") {
    std::vector<double> m0(dim, 0.0);
    if (!cfg.constant_mom.empty()) {
      if (static_cast<int>(cfg.constant_mom.size()) != dim)
        throw std::invalid_argument("constant preset: momentum size mismatch");
      m0 = cfg.constant_mom;
    }
    for (int c = 0; c < nc; ++c) {
      rho[c] = cfg.constant_rho;
      for (int d = 0; d < dim; ++d)
        mom[static_cast<std::size_t>(c) * dim + d] = m0[d];
    }
    return;
  }

  if (cfg.preset == "smooth-wave") {
    // rho = base + A sin(2 pi x/L) [ * sin(2 pi y/L2) in 2d ],
    // m_1 = M sin(2 pi x/L), exact cell averages.
    for (int c = 0; c < nc; ++c) {
      int ix = dim == 1 ? c : c / sg.cells[1];
      double ax = ix * sg.dx(0);
      double sx = average_sin(ax, ax + sg.dx(0), sg.lengths[0]);
      double wave = sx;
      if (dim == 2) {
        int iy = c % sg.cells[1];
        double ay = iy * sg.dx(1);
        wave = sx * average_sin(ay, ay + sg.dx(1), sg.lengths[1]);
      }
      rho[c] = cfg.constant_rho + cfg.wave_amplitude * wave;
      mom[static_cast<std::size_t>(c) * dim] = cfg.wave_momentum * sx;
    }
    return;
  }

  if (cfg.preset == "riemann") {
    // Density jump across x = L/2, zero momentum; averages are exact on
    // the straddling cell.
    double half = 0.5 * sg.lengths[0];
    for (int c = 0; c < nc; ++c) {
      int ix = dim == 1 ? c : c / sg.cells[1];
      double a = ix * sg.dx(0);
      double b = a + sg.dx(0);
      double frac = std::clamp((half - a) / (b - a), 0.0, 1.0);
      rho[c] = frac * cfg.rho_left + (1.0 - frac) * cfg.rho_right;
    }
    return;
  }

  throw std::invalid_argument("unknown solver preset: " + cfg.preset);
}

/// Restriction of a member-grid slab onto the analysis grid: exact cell
/// averaging in space, exact interval-overlap averaging in time.
class SlabRestrictor {
 public:
  SlabRestrictor(const Grid& analysis, const SpaceGrid& member_grid, int member,
                 FieldSequence& out)
      : analysis_(analysis), mg_(member_grid), member_(member), out_(out) {
    rx_ = mg_.cells[0] / analysis.cells[0];
    ry_ = analysis.space_dim == 2 ? mg_.cells[1] / analysis.cells[1] : 1;
    if (rx_ * analysis.cells[0] != mg_.cells[0] ||
        (analysis.space_dim == 2 && ry_ * analysis.cells[1] != mg_.cells[1]))
      throw std::invalid_argument(
          "restriction: member mesh must refine the analysis mesh");
    buf_.resize(static_cast<std::size_t>(analysis.space_cell_count()) *
                (1 + mg_.dim));
  }

  void add_slab(std::span<const double> rho, std::span<const double> mom,
                double t0, double dt) {
    const int sc = analysis_.space_cell_count();
    const int dim = mg_.dim;
    const int comps = 1 + dim;
    const int acy = analysis_.space_dim == 2 ? analysis_.cells[1] : 1;
    const int mcy = dim == 2 ? mg_.cells[1] : 1;
    const double inv_block = 1.0 / (rx_ * ry_);
    for (int X = 0; X < sc; ++X) {
      int ax = X / acy;
      int ay = X % acy;
      double* acc = buf_.data() + static_cast<std::size_t>(X) * comps;
      std::fill(acc, acc + comps, 0.0);
      for (int i = 0; i < rx_; ++i) {
        for (int j = 0; j < ry_; ++j) {
          int mc = (ax * rx_ + i) * mcy + (ay * ry_ + j);
          acc[0] += rho[mc];
          for (int d = 0; d < dim; ++d)
            acc[1 + d] += mom[static_cast<std::size_t>(mc) * dim + d];
        }
      }
      for (int k = 0; k < comps; ++k) acc[k] *= inv_block;
    }

    const double dta = analysis_.dt();
    const double t1 = t0 + dt;
    int jlo = std::max(0, static_cast<int>(std::floor(t0 / dta)));
    for (int j = jlo; j < analysis_.time_steps; ++j) {
      double lo = std::max(t0, j * dta);
      double hi = std::min(t1, (j + 1) * dta);
      if (hi <= lo) {
        if (j * dta >= t1) break;
        continue;
      }
      double w = (hi - lo) / dta;
      for (int X = 0; X < sc; ++X) {
        const double* acc = buf_.data() + static_cast<std::size_t>(X) * comps;
        int cell = j * sc + X;
        for (int k = 0; k < comps; ++k)
          out_.value(member_, cell, k) += w * acc[k];
      }
    }
  }

 private:
  Grid analysis_;
  SpaceGrid mg_;
  int member_;
  FieldSequence& out_;
  int rx_ = 1;
  int ry_ = 1;
  std::vector<double> buf_;
};

}  // namespace

FamilyResult simulate_family(const FamilyConfig& cfg) {
  cfg.params.validate();
  cfg.analysis.validate();
  if (cfg.analysis.space_dim != cfg.params.space_dim &&
      cfg.kind != FamilyConfig::Kind::synthetic)
    throw std::invalid_argument("family: analysis grid dimension mismatch");

  if (cfg.kind == FamilyConfig::Kind::synthetic) {
    if (cfg.members < 1)
      throw std::invalid_argument("family: members must be positive");
    FamilyResult res{FieldSequence(cfg.analysis, 1, 1), {}};
    bool momentum_fixture = cfg.preset == "alternating-momentum";
    if (cfg.preset == "alternating")
      res.sequence = fixtures::alternating(cfg.analysis, cfg.members);
    else if (cfg.preset == "block")
      res.sequence = fixtures::block(cfg.analysis, cfg.members);
    else if (cfg.preset == "harmonic")
      res.sequence = fixtures::harmonic(cfg.analysis, cfg.members);
    else if (cfg.preset == "period3")
      res.sequence = fixtures::periodic_values(cfg.analysis, cfg.members,
                                               {1.0, 0.0, 0.0});
    else if (momentum_fixture)
      res.sequence = fixtures::alternating_momentum(cfg.analysis, cfg.members);
    else
      throw std::invalid_argument("unknown synthetic preset: " + cfg.preset);

    res.report.has_residuals = momentum_fixture;
    res.report.members.resize(cfg.members);
    std::vector<TestFunction> tests;
    if (momentum_fixture)
      tests = standard_test_functions(cfg.analysis.space_dim,
                                      cfg.analysis.final_time, cfg.analysis.lengths);
    res.report.test_function_count = static_cast<int>(tests.size());
    const int dim = cfg.analysis.space_dim;
    EulerParams pm = cfg.params;
    pm.space_dim = dim;
    for (int n = 1; n <= cfg.members; ++n) {
      MemberReport& r = res.report.members[n - 1];
      r.member = n;
      r.cells = cfg.analysis.cells;
      r.admissible = true;
      if (momentum_fixture) {
        const int sc = cfg.analysis.space_cell_count();
        std::vector<double> rho0(sc), mom0(static_cast<std::size_t>(sc) * dim);
        for (int c = 0; c < sc; ++c) {
          rho0[c] = res.sequence.value(n, c, 0);
          for (int d = 0; d < dim; ++d)
            mom0[static_cast<std::size_t>(c) * dim + d] =
                res.sequence.value(n, c, 1 + d);
        }
        auto pairs = consistency_residuals(res.sequence, n, tests, pm, rho0, mom0);
        for (const auto& pr : pairs) {
          r.e1.push_back(pr.continuity);
          r.e2.push_back(pr.momentum);
        }
        double e = 0.0;
        for (int c = 0; c < sc; ++c) {
          std::span<const double> m{mom0.data() + static_cast<std::size_t>(c) * dim,
                                    static_cast<std::size_t>(dim)};
          e += energy_density(rho0[c], m, pm);
        }
        r.initial_energy = e * cfg.analysis.space_volume() /
                           cfg.analysis.space_cell_count();
        r.final_energy = r.initial_energy;
      }
    }
    return res;
  }

  // Solver families.
  int members = cfg.kind == FamilyConfig::Kind::viscosity ? cfg.members : cfg.levels;
  if (members < 1) throw std::invalid_argument("family: members must be positive");
  const int dim = cfg.params.space_dim;
  const Grid& A = cfg.analysis;
  FieldSequence seq(A, 1 + dim, members);
  std::fill(seq.raw().begin(), seq.raw().end(), 0.0);

  ConsistencyReport report;
  report.members.resize(members);
  auto tests = standard_test_functions(dim, A.final_time, A.lengths);
  report.test_function_count = static_cast<int>(tests.size());

  // Family reference initial data on the analysis mesh, for the data gaps.
  SpaceGrid asg = space_grid_of(A);
  std::vector<double> rho_ref, mom_ref;
  preset_initial(cfg, asg, rho_ref, mom_ref);

  for (int n = 1; n <= members; ++n) {
    try {
      SpaceGrid sg = asg;
      double eps = cfg.params.viscosity;
      if (cfg.kind == FamilyConfig::Kind::viscosity) {
        if (!(cfg.eps0 >= 0.0))
          throw std::invalid_argument("family: eps0 must be nonnegative");
        eps = cfg.eps0 / std::pow(static_cast<double>(n), cfg.eps_decay);
      } else {
        for (int d = 0; d < dim; ++d) sg.cells[d] = asg.cells[d] << (n - 1);
      }

      std::vector<double> rho0, mom0;
      preset_initial(cfg, sg, rho0, mom0);
      double rho_min = *std::min_element(rho0.begin(), rho0.end());
      if (rho_min < cfg.rho_floor)
        throw std::invalid_argument(
            "initial density " + std::to_string(rho_min) +
            " below the vacuum floor " + std::to_string(cfg.rho_floor));

      EulerParams pm = cfg.params;
      pm.viscosity = eps;

      MemberReport& r = report.members[n - 1];
      r.member = n;
      r.viscosity = eps;
      r.cells = sg.cells;

      EulerState s{sg, 0.0, rho0, mom0};
      double e0 = total_energy(s, pm);
      double mass0 = total_mass(s);
      r.initial_energy = e0;

      ResidualAccumulator acc(sg, tests, pm);
      acc.add_initial(rho0, mom0);
      SlabRestrictor restrictor(A, sg, n, seq);

      double min_defect = 0.0;
      int steps = 0;
      const double T = A.final_time;
      while (s.time < T * (1.0 - 1e-12)) {
        double dt = std::min(suggested_dt(s, pm), T - s.time);
        if (!(dt > 0.0)) throw std::runtime_error("time step collapsed to zero");
        acc.add_slab(s.rho, s.mom, s.time, dt);
        restrictor.add_slab(s.rho, s.mom, s.time, dt);
        s = lf_step_dt(s, pm, dt);
        ++steps;
        min_defect = std::min(min_defect, e0 - total_energy(s, pm));
        if (steps > 20'000'000)
          throw std::runtime_error("step budget exhausted before final time");
      }

      r.steps = steps;
      r.final_energy = total_energy(s, pm);
      r.mass_drift_rel = std::abs(total_mass(s) - mass0) / std::abs(mass0);
      r.min_energy_defect = min_defect;
      r.admissible = min_defect >= -1e-10 * std::abs(e0);
      for (const auto& pr : acc.finalize()) {
        r.e1.push_back(pr.continuity);
        r.e2.push_back(pr.momentum);
      }

      // Initial-data distance to the family reference, on the analysis mesh.
      const int sc = A.space_cell_count();
      const int rx = sg.cells[0] / A.cells[0];
      const int ry = dim == 2 ? sg.cells[1] / A.cells[1] : 1;
      const int acy = dim == 2 ? A.cells[1] : 1;
      const int mcy = dim == 2 ? sg.cells[1] : 1;
      double vol = A.space_volume() / sc;
      double drho = 0.0, dmom = 0.0;
      for (int X = 0; X < sc; ++X) {
        int ax = X / acy, ay = X % acy;
        double rbar = 0.0;
        std::array<double, 2> mbar{0.0, 0.0};
        for (int i = 0; i < rx; ++i)
          for (int j = 0; j < ry; ++j) {
            int mc = (ax * rx + i) * mcy + (ay * ry + j);
            rbar += rho0[mc];
            for (int d = 0; d < dim; ++d)
              mbar[d] += mom0[static_cast<std::size_t>(mc) * dim + d];
          }
        rbar /= rx * ry;
        drho += std::abs(rbar - rho_ref[X]) * vol;
        for (int d = 0; d < dim; ++d)
          dmom += std::abs(mbar[d] / (rx * ry) -
                           mom_ref[static_cast<std::size_t>(X) * dim + d]) *
                  vol;
      }
      r.initial_rho_gap = drho;
      r.initial_mom_gap = dmom;
    } catch (const std::exception& e) {
      throw std::runtime_error("member " + std::to_string(n) + ": " + e.what());
    }
  }

  return {std::move(seq), std::move(report)};
}

std::vector<double> energy_defect_series(const FieldSequence& seq, int member,
                                         double energy_ref,
                                         const EulerParams& params) {
  const Grid& g = seq.grid();
  const int dim = params.space_dim;
  if (seq.state_dim() != 1 + dim)
    throw std::invalid_argument("energy series: sequence must carry (rho, m) states");
  if (member < 1 || member > seq.length())
    throw std::invalid_argument("energy series: member index out of range");
  const int sc = g.space_cell_count();
  const double vol = g.space_volume() / sc;
  std::vector<double> out(g.time_steps, 0.0);
  for (int t = 0; t < g.time_steps; ++t) {
    double e = 0.0;
    for (int c = 0; c < sc; ++c) {
      auto st = seq.state(member, t * sc + c);
      e += energy_density(st[0], st.subspan(1, dim), params);
    }
    out[t] = energy_ref - e * vol;
  }
  return out;
}

double ReynoldsDefectField::trace(int cell) const {
  double tr = 0.0;
  for (int i = 0; i < space_dim; ++i) tr += entry(cell, i, i);
  return tr;
}

double ReynoldsDefectField::min_eigenvalue(int cell) const {
  if (space_dim == 1) return entry(cell, 0, 0);
  double a = entry(cell, 0, 0);
  double b = entry(cell, 0, 1);
  double c = entry(cell, 1, 1);
  double mid = 0.5 * (a + c);
  double rad = std::sqrt(0.25 * (a - c) * (a - c) + b * b);
  return mid - rad;
}

ReynoldsDefectField reynolds_defect(const FieldSequence& seq, int n_used,
                                    const EulerParams& params) {
  params.validate();
  const Grid& g = seq.grid();
  const int dim = params.space_dim;
  if (seq.state_dim() != 1 + dim)
    throw std::invalid_argument("reynolds: sequence must carry (rho, m) states");
  if (n_used < 1 || n_used > seq.length())
    throw std::invalid_argument("reynolds: sample count out of range");

  ReynoldsDefectField out;
  out.grid = g;
  out.space_dim = dim;
  out.n_used = n_used;
  out.entries.assign(static_cast<std::size_t>(g.cell_count()) * dim * dim, 0.0);

  const double inv_n = 1.0 / n_used;
  for (int cell = 0; cell < g.cell_count(); ++cell) {
    double mean_rho = 0.0;
    std::array<double, 2> mean_m{0.0, 0.0};
    std::array<double, 4> mean_flux{0.0, 0.0, 0.0, 0.0};
    for (int n = 1; n <= n_used; ++n) {
      auto st = seq.state(n, cell);
      double rho = st[0];
      double p = pressure(rho, params);
      mean_rho += rho;
      for (int i = 0; i < dim; ++i) {
        mean_m[i] += st[1 + i];
        for (int j = 0; j < dim; ++j) {
          double f = rho > 0.0 ? st[1 + i] * st[1 + j] / rho : 0.0;
          if (i == j) f += p;
          mean_flux[static_cast<std::size_t>(i) * dim + j] += f;
        }
      }
    }
    mean_rho *= inv_n;
    for (int i = 0; i < dim; ++i) mean_m[i] *= inv_n;
    double pbar = pressure(mean_rho, params);
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j < dim; ++j) {
        double fbar =
            mean_rho > 0.0 ? mean_m[i] * mean_m[j] / mean_rho : 0.0;
        if (i == j) fbar += pbar;
        out.entries[(static_cast<std::size_t>(cell) * dim + i) * dim + j] =
            mean_flux[static_cast<std::size_t>(i) * dim + j] * inv_n - fbar;
      }
  }
  return out;
}

double boundary_energy_check(const FieldSequence& seq, int n_used, double width,
                             const EulerParams& params) {
  params.validate();
  const Grid& g = seq.grid();
  const int dim = params.space_dim;
  if (seq.state_dim() != 1 + dim)
    throw std::invalid_argument("boundary check: sequence must carry (rho, m) states");
  if (n_used < 1 || n_used > seq.length())
    throw std::invalid_argument("boundary check: sample count out of range");
  double half_min = 0.5 * g.lengths[0];
  if (dim == 2) half_min = std::min(half_min, 0.5 * g.lengths[1]);
  if (!(width > 0.0) || width >= half_min)
    throw std::invalid_argument(
        "boundary check: width must lie in (0, half the box)");

  const int sc = g.space_cell_count();
  std::vector<char> near(sc, 0);
  for (int X = 0; X < sc; ++X) {
    auto x = g.space_center(X);
    for (int d = 0; d < dim; ++d) {
      double dist = std::min(x[d], g.lengths[d] - x[d]);
      if (dist < width) {
        near[X] = 1;
        break;
      }
    }
  }

  const double vol = g.cell_volume();
  const double inv_n = 1.0 / n_used;
  double mean_of_energy = 0.0;
  double energy_of_mean = 0.0;
  std::array<double, 2> mbar;
  for (int cell = 0; cell < g.cell_count(); ++cell) {
    if (!near[g.space_index(cell)]) continue;
    double rbar = 0.0;
    mbar = {0.0, 0.0};
    for (int n = 1; n <= n_used; ++n) {
      auto st = seq.state(n, cell);
      mean_of_energy += energy_density(st[0], st.subspan(1, dim), params) * vol * inv_n;
      rbar += st[0] * inv_n;
      for (int d = 0; d < dim; ++d) mbar[d] += st[1 + d] * inv_n;
    }
    energy_of_mean +=
        energy_density(rbar, std::span<const double>(mbar.data(), dim), params) * vol;
  }
  return std::abs(mean_of_energy - energy_of_mean);
}

}  // namespace statconv
