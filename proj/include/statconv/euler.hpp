#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

#include "statconv/grid.hpp"

namespace statconv {

/// Isentropic gas dynamics parameters: pressure p(rho) = a rho^gamma.
struct EulerParams {
  double a = 1.0;
  double gamma = 2.0;
  int space_dim = 1;
  double viscosity = 0.0;  // explicit diffusion coefficient eps
  double cfl = 0.4;

  void validate() const;
};

double pressure(double rho, const EulerParams& p);
/// Pressure potential P with rho P'' = p', here P(rho) = a rho^gamma / (gamma-1).
double pressure_potential(double rho, const EulerParams& p);
/// Total energy density: |m|^2/(2 rho) + P(rho) for rho > 0, 0 at the vacuum
/// state (0,0), +infinity otherwise.
double energy_density(double rho, std::span<const double> momentum,
                      const EulerParams& p);

/// Periodic spatial mesh of the torus (no time axis).
struct SpaceGrid {
  int dim = 1;
  std::array<int, 2> cells{1, 1};
  std::array<double, 2> lengths{1.0, 1.0};

  int count() const { return cells[0] * cells[1]; }
  double dx(int d) const { return lengths[d] / cells[d]; }
  double cell_volume() const {
    return dim == 1 ? dx(0) : dx(0) * dx(1);
  }
  std::array<double, 2> center(int cell) const;
};

/// Cellwise-constant fluid state: density and momentum (cells x dim).
struct EulerState {
  SpaceGrid grid;
  double time = 0.0;
  std::vector<double> rho;
  std::vector<double> mom;
};

double max_wave_speed(const EulerState& s, const EulerParams& p);
/// Stable step from the cfl number, the acoustic speeds, and (when eps > 0)
/// the explicit-diffusion bound.
double suggested_dt(const EulerState& s, const EulerParams& p);
/// One conservative Lax-Friedrichs (global-speed) step with optional
/// explicit diffusion; throws when the step leaves the admissible set
/// (vacuum or non-finite values), which signals a cfl violation.
EulerState lf_step_dt(const EulerState& s, const EulerParams& p, double dt);
EulerState lf_step(const EulerState& s, const EulerParams& p);

double total_mass(const EulerState& s);
double total_energy(const EulerState& s, const EulerParams& p);

/// Tensor trigonometric test function phi(t,x) = psi(t) s(x) with
/// psi(t) = (1 - t/T)^2 and s one of eight low trigonometric modes on the
/// torus; all derivatives are hand-coded.
struct TestFunction {
  int mode = 0;
  int space_dim = 1;
  double final_time = 1.0;
  std::array<double, 2> lengths{1.0, 1.0};

  double space_value(std::array<double, 2> x) const;
  std::array<double, 2> space_gradient(std::array<double, 2> x) const;
  double time_value(double t) const {
    double s = 1.0 - t / final_time;
    return s * s;
  }
  double time_derivative(double t) const {
    return -2.0 / final_time * (1.0 - t / final_time);
  }
  double value(double t, std::array<double, 2> x) const {
    return time_value(t) * space_value(x);
  }
};

std::vector<TestFunction> standard_test_functions(int space_dim, double final_time,
                                                  std::array<double, 2> lengths);

/// Weak-form residuals of one member of a (rho, m) sequence against the
/// fixed test set, by midpoint quadrature on the member's own grid:
/// continuity = | int rho dphi/dt + m . grad phi dy + int rho_0 phi(0) dx |,
/// momentum   = max over components of the analogous momentum residual with
/// convective flux 1_{rho>0} m (x) m / rho and pressure p(rho).
struct ResidualPair {
  double continuity = 0.0;
  double momentum = 0.0;
};

std::vector<ResidualPair> consistency_residuals(const FieldSequence& seq, int member,
                                                std::span<const TestFunction> tests,
                                                const EulerParams& params,
                                                std::span<const double> rho0,
                                                std::span<const double> mom0);

struct FamilyConfig {
  enum class Kind { viscosity, mesh, synthetic };

  Kind kind = Kind::viscosity;
  int members = 8;          // viscosity / synthetic member count
  double eps0 = 0.0;        // member n runs with eps0 / n^eps_decay
  double eps_decay = 1.0;
  int levels = 3;           // mesh family: cells double per level
  std::string preset = "constant";
  EulerParams params;
  Grid analysis;            // common analysis grid (coarsest mesh)
  double rho_floor = 1e-8;

  double constant_rho = 1.0;
  std::vector<double> constant_mom;
  double wave_amplitude = 0.2;
  double wave_momentum = 0.1;
  double rho_left = 2.0;
  double rho_right = 1.0;
};

struct MemberReport {
  int member = 0;
  double viscosity = 0.0;
  std::array<int, 2> cells{1, 1};
  int steps = 0;
  double initial_energy = 0.0;  // E_n
  double final_energy = 0.0;
  double mass_drift_rel = 0.0;
  double min_energy_defect = 0.0;  // min over recorded times of E_n - E(t)
  bool admissible = true;
  std::vector<double> e1;  // per test function
  std::vector<double> e2;
  double initial_rho_gap = 0.0;  // L1 gap to the family data on the analysis mesh
  double initial_mom_gap = 0.0;
};

struct ConsistencyReport {
  std::vector<MemberReport> members;
  int test_function_count = 0;
  bool has_residuals = true;
};

struct FamilyResult {
  FieldSequence sequence;  // members restricted to the analysis grid
  ConsistencyReport report;
};

/// Runs the approximation family described by the config: a viscosity
/// schedule eps_n -> 0 on a fixed mesh, a mesh-halving schedule, or one of
/// the synthetic sequences. Members are restricted onto the analysis grid by
/// exact cell/interval averaging.
FamilyResult simulate_family(const FamilyConfig& cfg);

/// E_ref - int E(rho_n, m_n)(t) dx per analysis time step.
std::vector<double> energy_defect_series(const FieldSequence& seq, int member,
                                         double energy_ref, const EulerParams& params);

/// Cesaro mean of the convective+pressure flux minus the flux of the Cesaro
/// means, per space-time cell: the defect that closes the averaged momentum
/// equation. Entries are dim x dim, symmetric, positive semidefinite in
/// exact arithmetic.
struct ReynoldsDefectField {
  Grid grid;
  int space_dim = 1;
  int n_used = 0;
  std::vector<double> entries;  // cell-major, dim*dim per cell

  double entry(int cell, int i, int j) const {
    return entries[static_cast<std::size_t>(cell) * space_dim * space_dim +
                   static_cast<std::size_t>(i) * space_dim + j];
  }
  double trace(int cell) const;
  double min_eigenvalue(int cell) const;
};

ReynoldsDefectField reynolds_defect(const FieldSequence& seq, int n_used,
                                    const EulerParams& params);

/// | Cesaro mean of int_U E(U_n) dy - int_U E(mean state) dy | over the
/// cells within `width` of the torus seam; rejects width >= half the box.
double boundary_energy_check(const FieldSequence& seq, int n_used, double width,
                             const EulerParams& params);

}  // namespace statconv
