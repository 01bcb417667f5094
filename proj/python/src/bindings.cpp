// Python bindings for the statconv core. Sequences cross the boundary as
// numpy arrays shaped (length, cells, components); everything heavier stays
// in C++ and is exposed through the same types the CLI uses.

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstring>
#include <stdexcept>

#include "statconv/cli.hpp"
#include "statconv/config.hpp"
#include "statconv/ergodic.hpp"
#include "statconv/euler.hpp"
#include "statconv/fixtures.hpp"
#include "statconv/grid.hpp"
#include "statconv/measures.hpp"
#include "statconv/observables.hpp"
#include "statconv/report.hpp"
#include "statconv/snapshot.hpp"

namespace py = pybind11;
using namespace statconv;

namespace {

IndexSet index_set_from_name(const std::string& name) {
  if (name == "squares") return IndexSet::squares;
  if (name == "powers_of_two") return IndexSet::powers_of_two;
  if (name == "custom") return IndexSet::custom;
  throw std::invalid_argument("unknown index set: " + name);
}

Profile profile_from_name(const std::string& name) {
  if (name == "tent") return Profile::tent;
  if (name == "smooth" || name == "smooth_bump") return Profile::smooth_bump;
  throw std::invalid_argument("unknown observable profile: " + name);
}

FamilyConfig::Kind family_kind_from_name(const std::string& name) {
  if (name == "viscosity") return FamilyConfig::Kind::viscosity;
  if (name == "mesh") return FamilyConfig::Kind::mesh;
  if (name == "synthetic") return FamilyConfig::Kind::synthetic;
  throw std::invalid_argument("unknown family kind: " + name);
}

const char* family_kind_name(FamilyConfig::Kind k) {
  switch (k) {
    case FamilyConfig::Kind::viscosity: return "viscosity";
    case FamilyConfig::Kind::mesh: return "mesh";
    case FamilyConfig::Kind::synthetic: return "synthetic";
  }
  return "?";
}

py::array_t<double> sequence_to_array(const FieldSequence& seq) {
  py::array_t<double> out({seq.length(), seq.grid().cell_count(), seq.state_dim()});
  auto raw = seq.raw();
  std::memcpy(out.mutable_data(), raw.data(), raw.size() * sizeof(double));
  return out;
}

FieldSequence sequence_from_array(const Grid& grid, py::array_t<double> values) {
  auto buf = values.request();
  if (buf.ndim != 3)
    throw std::invalid_argument("values must have shape (length, cells, components)");
  int length = static_cast<int>(buf.shape[0]);
  int cells = static_cast<int>(buf.shape[1]);
  int dim = static_cast<int>(buf.shape[2]);
  if (cells != grid.cell_count())
    throw std::invalid_argument("values axis 1 must match grid.cell_count()");
  FieldSequence seq(grid, dim, length);
  auto arr = values.unchecked<3>();
  for (int n = 1; n <= length; ++n)
    for (int c = 0; c < cells; ++c)
      for (int d = 0; d < dim; ++d) seq.value(n, c, d) = arr(n - 1, c, d);
  return seq;
}

std::vector<double> to_vector(py::array_t<double> a) {
  auto buf = a.request();
  const double* p = static_cast<const double*>(buf.ptr);
  return std::vector<double>(p, p + buf.size);
}

py::dict verdict_to_dict(const ConvergenceVerdict& v) {
  py::dict d;
  d["estimate"] = v.estimate;
  d["tail_gap"] = v.tail_gap;
  d["tol"] = v.tol;
  d["converged"] = v.converged;
  d["checkpoints"] = v.checkpoints;
  d["estimates"] = v.estimates;
  return d;
}

py::dict member_report_to_dict(const MemberReport& r) {
  py::dict d;
  d["member"] = r.member;
  d["viscosity"] = r.viscosity;
  d["cells"] = std::vector<int>{r.cells[0], r.cells[1]};
  d["steps"] = r.steps;
  d["initial_energy"] = r.initial_energy;
  d["final_energy"] = r.final_energy;
  d["mass_drift_rel"] = r.mass_drift_rel;
  d["min_energy_defect"] = r.min_energy_defect;
  d["admissible"] = r.admissible;
  d["e1"] = r.e1;
  d["e2"] = r.e2;
  d["initial_rho_gap"] = r.initial_rho_gap;
  d["initial_mom_gap"] = r.initial_mom_gap;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "statistical convergence diagnostics and the companion fluid solver";

  // ----- grid and sequences -----
  py::class_<Grid>(m, "Grid")
      .def(py::init([](int space_dim, std::vector<int> cells, int time_steps,
                       double final_time, std::vector<double> lengths) {
             Grid g;
             g.space_dim = space_dim;
             if (cells.empty() || cells.size() > 2)
               throw std::invalid_argument("cells must have 1 or 2 entries");
             g.cells = {cells[0], cells.size() == 2 ? cells[1] : 1};
             g.time_steps = time_steps;
             g.final_time = final_time;
             if (!lengths.empty())
               g.lengths = {lengths[0], lengths.size() == 2 ? lengths[1] : 1.0};
             g.validate();
             return g;
           }),
           py::arg("space_dim") = 1, py::arg("cells") = std::vector<int>{1},
           py::arg("time_steps") = 1, py::arg("final_time") = 1.0,
           py::arg("lengths") = std::vector<double>{1.0})
      .def_readonly("space_dim", &Grid::space_dim)
      .def_readonly("time_steps", &Grid::time_steps)
      .def_readonly("final_time", &Grid::final_time)
      .def_property_readonly("cells",
                             [](const Grid& g) {
                               std::vector<int> c{g.cells[0]};
                               if (g.space_dim == 2) c.push_back(g.cells[1]);
                               return c;
                             })
      .def_property_readonly("lengths",
                             [](const Grid& g) {
                               std::vector<double> l{g.lengths[0]};
                               if (g.space_dim == 2) l.push_back(g.lengths[1]);
                               return l;
                             })
      .def("cell_count", &Grid::cell_count)
      .def("space_cell_count", &Grid::space_cell_count)
      .def("domain_measure", &Grid::domain_measure)
      .def("cell_volume", &Grid::cell_volume)
      .def("__eq__", [](const Grid& a, const Grid& b) { return a == b; });

  py::class_<FieldSequence>(m, "FieldSequence")
      .def(py::init<Grid, int, int>(), py::arg("grid"), py::arg("state_dim"),
           py::arg("length"))
      .def_property_readonly("grid", &FieldSequence::grid)
      .def_property_readonly("state_dim", &FieldSequence::state_dim)
      .def_property_readonly("length", &FieldSequence::length)
      .def("to_array", &sequence_to_array,
           "copy out as numpy (length, cells, components)")
      .def_static("from_array", &sequence_from_array, py::arg("grid"),
                  py::arg("values"));

  // ----- reference sequences -----
  m.def("unit_grid", &fixtures::unit_grid);
  m.def("constant_sequence", &fixtures::constant, py::arg("grid"), py::arg("length"),
        py::arg("value"));
  m.def("alternating_sequence", &fixtures::alternating, py::arg("grid"),
        py::arg("length"), py::arg("hi") = 1.0, py::arg("lo") = 0.0);
  m.def("periodic_sequence", &fixtures::periodic_values, py::arg("grid"),
        py::arg("length"), py::arg("values"));
  m.def("block_sequence", &fixtures::block, py::arg("grid"), py::arg("length"));
  m.def("block_member", &fixtures::block_member, py::arg("n"));
  m.def("harmonic_sequence", &fixtures::harmonic, py::arg("grid"), py::arg("length"),
        py::arg("base") = 0.5);
  m.def("alternating_momentum_sequence", &fixtures::alternating_momentum,
        py::arg("grid"), py::arg("length"), py::arg("speed") = 1.0);

  // ----- observables and weights -----
  py::class_<CompactObservable>(m, "CompactObservable")
      .def_readonly("center", &CompactObservable::center)
      .def_readonly("radius", &CompactObservable::radius)
      .def_readonly("id", &CompactObservable::id)
      .def("dim", &CompactObservable::dim)
      .def("lipschitz", &CompactObservable::lipschitz)
      .def("__call__", [](const CompactObservable& b, py::array_t<double> u) {
        auto v = to_vector(u);
        return b(std::span<const double>(v.data(), v.size()));
      });

  m.def(
      "make_tent",
      [](std::vector<double> center, double radius, int id) {
        return make_tent(std::move(center), radius, id);
      },
      py::arg("center"), py::arg("radius"), py::arg("id") = 0);
  m.def(
      "make_bump",
      [](std::vector<double> center, double radius, int id) {
        return make_bump(std::move(center), radius, id);
      },
      py::arg("center"), py::arg("radius"), py::arg("id") = 0);

  py::class_<Weight>(m, "Weight")
      .def_static("constant", &Weight::constant)
      .def_static("linear", &Weight::linear)
      .def_static("polynomial", &Weight::polynomial, py::arg("degree"))
      .def_static("tent", &Weight::tent, py::arg("center"), py::arg("width"))
      .def_property_readonly("name", &Weight::name)
      .def("max_slope", &Weight::max_slope)
      .def("__call__", &Weight::operator());
  m.def("default_weights", &default_weights);
  m.def("weight_by_name", &weight_by_name, py::arg("name"));
  m.def("weight_partial_sum", &weight_partial_sum, py::arg("weight"),
        py::arg("n_terms"));

  py::class_<ObservableDictionary>(m, "ObservableDictionary")
      .def_readonly("observables", &ObservableDictionary::observables)
      .def_readonly("range_lo", &ObservableDictionary::range_lo)
      .def_readonly("range_hi", &ObservableDictionary::range_hi)
      .def("dim", &ObservableDictionary::dim)
      .def("__len__", &ObservableDictionary::size);
  m.def(
      "make_dictionary",
      [](std::vector<double> lo, std::vector<double> hi, double radius,
         const std::string& profile) {
        return make_dictionary(std::move(lo), std::move(hi), radius,
                               profile_from_name(profile));
      },
      py::arg("lo"), py::arg("hi"), py::arg("radius"), py::arg("profile") = "tent");
  m.def(
      "dictionary_for_sequence",
      [](const FieldSequence& seq, double radius_scale, const std::string& profile) {
        return dictionary_for_sequence(seq, radius_scale, profile_from_name(profile));
      },
      py::arg("seq"), py::arg("radius_scale") = 10.0, py::arg("profile") = "tent");

  // ----- measures -----
  py::class_<EmpiricalMeasure>(m, "EmpiricalMeasure")
      .def(py::init<int>(), py::arg("dim"))
      .def_static("dirac", &EmpiricalMeasure::dirac, py::arg("point"))
      .def("add",
           [](EmpiricalMeasure& mu, py::array_t<double> point, double weight) {
             auto v = to_vector(point);
             mu.add(std::span<const double>(v.data(), v.size()), weight);
           })
      .def("finalize", &EmpiricalMeasure::finalize, py::arg("merge_tol") = 1e-12)
      .def_property_readonly("dim", &EmpiricalMeasure::dim)
      .def("__len__", &EmpiricalMeasure::size)
      .def("points",
           [](const EmpiricalMeasure& mu) {
             py::array_t<double> out({mu.size(), mu.dim()});
             auto w = out.mutable_unchecked<2>();
             for (int i = 0; i < mu.size(); ++i)
               for (int d = 0; d < mu.dim(); ++d) w(i, d) = mu.point(i)[d];
             return out;
           })
      .def("weights",
           [](const EmpiricalMeasure& mu) {
             py::array_t<double> out(mu.size());
             for (int i = 0; i < mu.size(); ++i) out.mutable_at(i) = mu.weight(i);
             return out;
           })
      .def("pair", &EmpiricalMeasure::pair, py::arg("observable"));

  py::class_<ParametrizedMeasure>(m, "ParametrizedMeasure")
      .def_readonly("grid", &ParametrizedMeasure::grid)
      .def_readonly("dim", &ParametrizedMeasure::dim)
      .def("cell_measure",
           [](const ParametrizedMeasure& pm, int cell) -> const EmpiricalMeasure& {
             return pm.cell_measures.at(cell);
           },
           py::return_value_policy::reference_internal)
      .def("__len__",
           [](const ParametrizedMeasure& pm) { return pm.cell_measures.size(); });

  m.def("weighted_ergodic_mean",
        [](const FieldSequence& seq, const CompactObservable& b, const Weight& w,
           int n_used) {
          auto v = weighted_ergodic_mean(seq, b, w, n_used);
          return py::array_t<double>(static_cast<py::ssize_t>(v.size()), v.data());
        },
        py::arg("seq"), py::arg("observable"), py::arg("weight"), py::arg("n_used"));
  m.def("empirical_measure", &empirical_measure, py::arg("seq"), py::arg("cell"),
        py::arg("weight"), py::arg("n_used"));
  m.def("parametrized_measure", &parametrized_measure, py::arg("seq"),
        py::arg("weight"), py::arg("n_used"));
  m.def("wasserstein", &wasserstein, py::arg("mu"), py::arg("nu"), py::arg("order"),
        py::arg("directions") = 16);
  m.def("weak_star_distance", &weak_star_distance, py::arg("mu"), py::arg("nu"),
        py::arg("dictionary"));
  m.def("parametrized_distance", &parametrized_distance, py::arg("a"), py::arg("b"),
        py::arg("order"));
  m.def("moments", [](const EmpiricalMeasure& mu, double order) {
    auto s = moments(mu, order);
    py::dict d;
    d["barycenter"] = s.barycenter;
    d["second_moment"] = s.second_moment;
    d["variance"] = s.variance;
    d["abs_moment"] = s.abs_moment;
    d["order"] = s.order;
    return d;
  });

  // ----- averaging diagnostics -----
  py::class_<CorrelationRecord>(m, "CorrelationRecord")
      .def_readonly("observable_id", &CorrelationRecord::observable_id)
      .def_readonly("size", &CorrelationRecord::size)
      .def_readonly("domain_measure", &CorrelationRecord::domain_measure)
      .def("matrix", [](const CorrelationRecord& rec) {
        py::array_t<double> out({rec.size, rec.size});
        std::memcpy(out.mutable_data(), rec.entries.data(),
                    rec.entries.size() * sizeof(double));
        return out;
      });
  m.def("correlation_matrix", &correlation_matrix, py::arg("seq"),
        py::arg("observable"), py::arg("n_used"));

  m.def("weak_correlation_verdict",
        [](const CorrelationRecord& rec, int probe, std::vector<int> schedule,
           double tol) {
          return verdict_to_dict(weak_correlation_verdict(rec, probe, schedule, tol));
        },
        py::arg("record"), py::arg("probe"), py::arg("schedule"), py::arg("tol"));
  m.def("strong_correlation_verdict",
        [](const CorrelationRecord& rec, int probe, std::vector<Weight> weights,
           std::vector<int> schedule, double tol) {
          return verdict_to_dict(
              strong_correlation_verdict(rec, probe, weights, schedule, tol));
        },
        py::arg("record"), py::arg("probe"), py::arg("weights"), py::arg("schedule"),
        py::arg("tol"));
  m.def("windowed_correlation", &windowed_correlation, py::arg("record"),
        py::arg("alpha"), py::arg("beta"), py::arg("probe"), py::arg("n_used"));
  m.def("disintegration_gap", &disintegration_gap, py::arg("record"),
        py::arg("weight"), py::arg("n_used"), py::arg("m_used"));
  m.def("stationarity_modulus",
        [](const FieldSequence& seq, const CompactObservable& b, int k, int max_shift,
           long long max_samples) {
          auto s = stationarity_modulus(seq, b, k, max_shift, max_samples);
          py::dict d;
          d["observable_id"] = s.observable_id;
          d["start_index"] = s.start_index;
          d["max_shift"] = s.max_shift;
          d["modulus"] = s.modulus;
          d["samples"] = s.samples;
          d["exhaustive"] = s.exhaustive;
          return d;
        },
        py::arg("seq"), py::arg("observable"), py::arg("k"), py::arg("max_shift"),
        py::arg("max_samples") = 100000);
  m.def("averaged_stationarity_modulus", &averaged_stationarity_modulus,
        py::arg("seq"), py::arg("observable"), py::arg("k"), py::arg("n_used"));
  m.def("statistical_density_gap", &statistical_density_gap, py::arg("u"),
        py::arg("v"), py::arg("eps"), py::arg("n_used"));

  m.def("index_set_members",
        [](const std::string& set, int length, std::vector<int> custom) {
          return index_set_members(index_set_from_name(set), length, custom);
        },
        py::arg("set"), py::arg("length"), py::arg("custom") = std::vector<int>{});
  m.def("perturb_on_index_set",
        [](const FieldSequence& seq, const std::string& set, double magnitude,
           std::uint64_t seed, std::vector<int> custom) {
          return perturb_on_index_set(seq, index_set_from_name(set), magnitude, seed,
                                      custom);
        },
        py::arg("seq"), py::arg("set"), py::arg("magnitude"), py::arg("seed"),
        py::arg("custom") = std::vector<int>{});

  py::class_<ConvergenceReport>(m, "ConvergenceReport")
      .def_readonly("schedule", &ConvergenceReport::schedule)
      .def_readonly("tol", &ConvergenceReport::tol)
      .def_readonly("converged", &ConvergenceReport::converged)
      .def_readonly("mean_barycenter", &ConvergenceReport::mean_barycenter)
      .def_readonly("checkpoint_measure_distances",
                    &ConvergenceReport::checkpoint_measure_distances)
      .def_property_readonly("limit_measure",
                             [](const ConvergenceReport& r) { return r.limit_measure; })
      .def("pairs",
           [](const ConvergenceReport& r) {
             py::list out;
             for (const auto& p : r.pairs) {
               py::dict d;
               d["observable_id"] = p.observable_id;
               d["weight"] = p.weight;
               d["verdict"] = verdict_to_dict(p.verdict);
               out.append(d);
             }
             return out;
           })
      .def("independence", [](const ConvergenceReport& r) {
        py::list out;
        for (const auto& c : r.independence) {
          py::dict d;
          d["observable_id"] = c.observable_id;
          d["spread"] = c.spread;
          d["ok"] = c.ok;
          out.append(d);
        }
        return out;
      });
  m.def("analyze_convergence",
        [](const FieldSequence& seq, const ObservableDictionary& dict,
           std::vector<Weight> weights, std::vector<int> schedule, double tol) {
          return analyze_convergence(seq, dict, weights, schedule, tol);
        },
        py::arg("seq"), py::arg("dictionary"), py::arg("weights"),
        py::arg("schedule"), py::arg("tol"));
  m.def("convergence_report_json", &convergence_report_json, py::arg("report"),
        py::arg("dictionary"));

  // ----- fluid solver -----
  py::class_<EulerParams>(m, "EulerParams")
      .def(py::init([](double a, double gamma, int space_dim, double viscosity,
                       double cfl) {
             EulerParams p;
             p.a = a;
             p.gamma = gamma;
             p.space_dim = space_dim;
             p.viscosity = viscosity;
             p.cfl = cfl;
             p.validate();
             return p;
           }),
           py::arg("a") = 1.0, py::arg("gamma") = 2.0, py::arg("space_dim") = 1,
           py::arg("viscosity") = 0.0, py::arg("cfl") = 0.4)
      .def_readonly("a", &EulerParams::a)
      .def_readonly("gamma", &EulerParams::gamma)
      .def_readonly("space_dim", &EulerParams::space_dim)
      .def_readonly("viscosity", &EulerParams::viscosity)
      .def_readonly("cfl", &EulerParams::cfl);
  m.def("pressure", &pressure, py::arg("rho"), py::arg("params"));
  m.def("pressure_potential", &pressure_potential, py::arg("rho"), py::arg("params"));
  m.def("energy_density",
        [](double rho, py::array_t<double> momentum, const EulerParams& p) {
          auto v = to_vector(momentum);
          return energy_density(rho, std::span<const double>(v.data(), v.size()), p);
        },
        py::arg("rho"), py::arg("momentum"), py::arg("params"));

  py::class_<SpaceGrid>(m, "SpaceGrid")
      .def(py::init([](int dim, std::vector<int> cells, std::vector<double> lengths) {
             SpaceGrid g;
             g.dim = dim;
             g.cells = {cells.at(0), cells.size() == 2 ? cells[1] : 1};
             if (!lengths.empty())
               g.lengths = {lengths[0], lengths.size() == 2 ? lengths[1] : 1.0};
             return g;
           }),
           py::arg("dim") = 1, py::arg("cells") = std::vector<int>{1},
           py::arg("lengths") = std::vector<double>{1.0})
      .def_readonly("dim", &SpaceGrid::dim)
      .def("count", &SpaceGrid::count)
      .def("cell_volume", &SpaceGrid::cell_volume);

  py::class_<EulerState>(m, "EulerState")
      .def(py::init([](const SpaceGrid& grid, double time, py::array_t<double> rho,
                       py::array_t<double> mom) {
             EulerState s;
             s.grid = grid;
             s.time = time;
             s.rho = to_vector(rho);
             s.mom = to_vector(mom);
             if (static_cast<int>(s.rho.size()) != grid.count())
               throw std::invalid_argument("rho size must match the grid");
             if (s.mom.size() != s.rho.size() * static_cast<std::size_t>(grid.dim))
               throw std::invalid_argument("momentum size must be cells x dim");
             return s;
           }),
           py::arg("grid"), py::arg("time"), py::arg("rho"), py::arg("mom"))
      .def_readonly("grid", &EulerState::grid)
      .def_readonly("time", &EulerState::time)
      .def("rho",
           [](const EulerState& s) {
             return py::array_t<double>(static_cast<py::ssize_t>(s.rho.size()),
                                        s.rho.data());
           })
      .def("momentum", [](const EulerState& s) {
        py::array_t<double> out({s.grid.count(), s.grid.dim});
        std::memcpy(out.mutable_data(), s.mom.data(), s.mom.size() * sizeof(double));
        return out;
      });
  m.def("max_wave_speed", &max_wave_speed, py::arg("state"), py::arg("params"));
  m.def("suggested_dt", &suggested_dt, py::arg("state"), py::arg("params"));
  m.def("lf_step", &lf_step, py::arg("state"), py::arg("params"));
  m.def("lf_step_dt", &lf_step_dt, py::arg("state"), py::arg("params"), py::arg("dt"));
  m.def("total_mass", &total_mass, py::arg("state"));
  m.def("total_energy", &total_energy, py::arg("state"), py::arg("params"));

  py::class_<FamilyConfig>(m, "FamilyConfig")
      .def(py::init<>())
      .def_property("kind",
                    [](const FamilyConfig& c) { return family_kind_name(c.kind); },
                    [](FamilyConfig& c, const std::string& name) {
                      c.kind = family_kind_from_name(name);
                    })
      .def_readwrite("members", &FamilyConfig::members)
      .def_readwrite("eps0", &FamilyConfig::eps0)
      .def_readwrite("eps_decay", &FamilyConfig::eps_decay)
      .def_readwrite("levels", &FamilyConfig::levels)
      .def_readwrite("preset", &FamilyConfig::preset)
      .def_readwrite("params", &FamilyConfig::params)
      .def_readwrite("analysis", &FamilyConfig::analysis)
      .def_readwrite("rho_floor", &FamilyConfig::rho_floor)
      .def_readwrite("constant_rho", &FamilyConfig::constant_rho)
      .def_readwrite("constant_mom", &FamilyConfig::constant_mom)
      .def_readwrite("wave_amplitude", &FamilyConfig::wave_amplitude)
      .def_readwrite("wave_momentum", &FamilyConfig::wave_momentum)
      .def_readwrite("rho_left", &FamilyConfig::rho_left)
      .def_readwrite("rho_right", &FamilyConfig::rho_right);

  py::class_<FamilyResult>(m, "FamilyResult")
      .def_property_readonly("sequence",
                             [](const FamilyResult& r) { return r.sequence; })
      .def_property_readonly("has_residuals",
                             [](const FamilyResult& r) { return r.report.has_residuals; })
      .def_property_readonly("test_function_count",
                             [](const FamilyResult& r) {
                               return r.report.test_function_count;
                             })
      .def("members", [](const FamilyResult& r) {
        py::list out;
        for (const auto& mr : r.report.members) out.append(member_report_to_dict(mr));
        return out;
      });
  m.def("simulate_family", &simulate_family, py::arg("config"));
  m.def("consistency_report_json",
        [](const FamilyResult& r) { return consistency_report_json(r.report); },
        py::arg("result"));

  py::class_<ReynoldsDefectField>(m, "ReynoldsDefectField")
      .def_readonly("space_dim", &ReynoldsDefectField::space_dim)
      .def_readonly("n_used", &ReynoldsDefectField::n_used)
      .def("entries",
           [](const ReynoldsDefectField& f) {
             int cells = static_cast<int>(f.entries.size()) /
                         (f.space_dim * f.space_dim);
             py::array_t<double> out({cells, f.space_dim, f.space_dim});
             std::memcpy(out.mutable_data(), f.entries.data(),
                         f.entries.size() * sizeof(double));
             return out;
           })
      .def("trace", &ReynoldsDefectField::trace, py::arg("cell"))
      .def("min_eigenvalue", &ReynoldsDefectField::min_eigenvalue, py::arg("cell"));
  m.def("reynolds_defect", &reynolds_defect, py::arg("seq"), py::arg("n_used"),
        py::arg("params"));
  m.def("boundary_energy_check", &boundary_energy_check, py::arg("seq"),
        py::arg("n_used"), py::arg("width"), py::arg("params"));
  m.def("energy_defect_series",
        [](const FieldSequence& seq, int member, double energy_ref,
           const EulerParams& params) {
          auto v = energy_defect_series(seq, member, energy_ref, params);
          return py::array_t<double>(static_cast<py::ssize_t>(v.size()), v.data());
        },
        py::arg("seq"), py::arg("member"), py::arg("energy_ref"), py::arg("params"));

  // ----- snapshots, measures on disk, pipeline -----
  m.def("save_snapshot", &save_snapshot, py::arg("seq"), py::arg("path"));
  m.def("load_snapshot", &load_snapshot, py::arg("path"));
  m.def("encode_snapshot",
        [](const FieldSequence& seq) {
          auto bytes = encode_snapshot(seq);
          return py::bytes(reinterpret_cast<const char*>(bytes.data()), bytes.size());
        },
        py::arg("seq"));
  m.def("decode_snapshot",
        [](py::bytes blob) {
          std::string s = blob;
          return decode_snapshot(std::span<const std::uint8_t>(
              reinterpret_cast<const std::uint8_t*>(s.data()), s.size()));
        },
        py::arg("blob"));
  m.def("measure_csv", &measure_csv, py::arg("measure"));
  m.def("run_cli", &run_cli, py::arg("args"),
        "run a pipeline subcommand exactly as the command line tool would");
}
