#include "statconv/config.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace statconv {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& field, const std::string& what) {
  throw std::invalid_argument("config: " + field + " " + what);
}

const json* find(const json& j, const char* key) {
  auto it = j.find(key);
  return it == j.end() ? nullptr : &*it;
}

double get_number(const json& j, const std::string& field) {
  if (!j.is_number()) fail(field, "must be a number");
  return j.get<double>();
}

int get_int(const json& j, const std::string& field) {
  if (!j.is_number_integer()) fail(field, "must be an integer");
  return j.get<int>();
}

std::string get_string(const json& j, const std::string& field) {
  if (!j.is_string()) fail(field, "must be a string");
  return j.get<std::string>();
}

void expect_object(const json& j, const std::string& field) {
  if (!j.is_object()) fail(field, "must be an object");
}

void parse_grid(const json& j, Grid& g) {
  expect_object(j, "grid");
  if (const json* v = find(j, "space_dim")) g.space_dim = get_int(*v, "grid.space_dim");
  if (const json* v = find(j, "cells")) {
    if (!v->is_array() || v->empty() || v->size() > 2)
      fail("grid.cells", "must be an array of 1 or 2 integers");
    for (std::size_t d = 0; d < v->size(); ++d)
      g.cells[d] = get_int((*v)[d], "grid.cells");
    if (v->size() == 1) g.cells[1] = 1;
  }
  if (const json* v = find(j, "time_steps")) g.time_steps = get_int(*v, "grid.time_steps");
  if (const json* v = find(j, "final_time"))
    g.final_time = get_number(*v, "grid.final_time");
  if (const json* v = find(j, "lengths")) {
    if (!v->is_array() || v->empty() || v->size() > 2)
      fail("grid.lengths", "must be an array of 1 or 2 numbers");
    for (std::size_t d = 0; d < v->size(); ++d)
      g.lengths[d] = get_number((*v)[d], "grid.lengths");
  }
  try {
    g.validate();
  } catch (const std::invalid_argument& e) {
    fail("grid", std::string("invalid: ") + e.what());
  }
}

void parse_solver(const json& j, EulerParams& p) {
  expect_object(j, "solver");
  if (const json* v = find(j, "a")) p.a = get_number(*v, "solver.a");
  if (const json* v = find(j, "gamma")) p.gamma = get_number(*v, "solver.gamma");
  if (const json* v = find(j, "viscosity"))
    p.viscosity = get_number(*v, "solver.viscosity");
  if (const json* v = find(j, "cfl")) p.cfl = get_number(*v, "solver.cfl");
  try {
    p.validate();
  } catch (const std::invalid_argument& e) {
    fail("solver", std::string("invalid: ") + e.what());
  }
}

void parse_family(const json& j, FamilyConfig& f) {
  expect_object(j, "family");
  if (const json* v = find(j, "kind")) {
    std::string kind = get_string(*v, "family.kind");
    if (kind == "viscosity")
      f.kind = FamilyConfig::Kind::viscosity;
    else if (kind == "mesh")
      f.kind = FamilyConfig::Kind::mesh;
    else if (kind == "synthetic")
      f.kind = FamilyConfig::Kind::synthetic;
    else
      fail("family.kind", "must be one of viscosity, mesh, synthetic");
  }
  if (const json* v = find(j, "members")) {
    f.members = get_int(*v, "family.members");
    if (f.members < 1) fail("family.members", "must be >= 1");
  }
  if (const json* v = find(j, "eps0")) {
    f.eps0 = get_number(*v, "family.eps0");
    if (!(f.eps0 >= 0.0)) fail("family.eps0", "must be nonnegative");
  }
  if (const json* v = find(j, "eps_decay")) {
    f.eps_decay = get_number(*v, "family.eps_decay");
    if (!(f.eps_decay > 0.0)) fail("family.eps_decay", "must be positive");
  }
  if (const json* v = find(j, "levels")) {
    f.levels = get_int(*v, "family.levels");
    if (f.levels < 1) fail("family.levels", "must be >= 1");
  }
  if (const json* v = find(j, "preset")) f.preset = get_string(*v, "family.preset");
  if (const json* v = find(j, "rho_floor")) {
    f.rho_floor = get_number(*v, "family.rho_floor");
    if (!(f.rho_floor > 0.0)) fail("family.rho_floor", "must be positive");
  }
  if (const json* v = find(j, "constant_rho"))
    f.constant_rho = get_number(*v, "family.constant_rho");
  if (const json* v = find(j, "constant_mom")) {
    if (!v->is_array()) fail("family.constant_mom", "must be an array");
    f.constant_mom.clear();
    for (const auto& e : *v)
      f.constant_mom.push_back(get_number(e, "family.constant_mom"));
  }
  if (const json* v = find(j, "wave_amplitude"))
    f.wave_amplitude = get_number(*v, "family.wave_amplitude");
  if (const json* v = find(j, "wave_momentum"))
    f.wave_momentum = get_number(*v, "family.wave_momentum");
  if (const json* v = find(j, "rho_left")) f.rho_left = get_number(*v, "family.rho_left");
  if (const json* v = find(j, "rho_right"))
    f.rho_right = get_number(*v, "family.rho_right");
}

void parse_dictionary(const json& j, DictionarySpec& d) {
  expect_object(j, "dictionary");
  if (const json* v = find(j, "radius_scale")) {
    d.radius_scale = get_number(*v, "dictionary.radius_scale");
    if (!(d.radius_scale > 0.0)) fail("dictionary.radius_scale", "must be positive");
  }
  if (const json* v = find(j, "radius")) {
    d.radius = get_number(*v, "dictionary.radius");
    if (d.radius < 0.0) fail("dictionary.radius", "must be nonnegative");
  }
  if (const json* v = find(j, "profile")) {
    d.profile = get_string(*v, "dictionary.profile");
    if (d.profile != "tent" && d.profile != "smooth")
      fail("dictionary.profile", "must be 'tent' or 'smooth'");
  }
  if (const json* v = find(j, "centers")) {
    if (!v->is_array()) fail("dictionary.centers", "must be an array of points");
    d.centers.clear();
    for (const auto& pt : *v) {
      if (!pt.is_array() || pt.empty())
        fail("dictionary.centers", "entries must be nonempty arrays");
      std::vector<double> c;
      for (const auto& e : pt) c.push_back(get_number(e, "dictionary.centers"));
      d.centers.push_back(std::move(c));
    }
    if (d.centers.empty()) fail("dictionary.centers", "must not be empty");
    if (!(d.radius > 0.0))
      fail("dictionary.radius", "must be positive when centers are explicit");
  }
}

void parse_schedule(const json& j, RunConfig& cfg) {
  expect_object(j, "schedule");
  if (const json* v = find(j, "checkpoints")) {
    if (!v->is_array() || v->empty())
      fail("schedule.checkpoints", "must be a nonempty array");
    cfg.checkpoints.clear();
    for (const auto& e : *v)
      cfg.checkpoints.push_back(get_int(e, "schedule.checkpoints"));
  }
  if (const json* v = find(j, "tol")) cfg.tol = get_number(*v, "schedule.tol");
}

void parse_perturb(const json& j, PerturbSpec& p) {
  expect_object(j, "perturb");
  if (const json* v = find(j, "index_set")) {
    p.index_set = get_string(*v, "perturb.index_set");
    if (p.index_set != "squares" && p.index_set != "powers_of_two" &&
        p.index_set != "custom")
      fail("perturb.index_set", "must be squares, powers_of_two, or custom");
  }
  if (const json* v = find(j, "magnitude")) {
    p.magnitude = get_number(*v, "perturb.magnitude");
    if (!(p.magnitude >= 0.0)) fail("perturb.magnitude", "must be nonnegative");
  }
  if (const json* v = find(j, "custom")) {
    if (!v->is_array()) fail("perturb.custom", "must be an array of indices");
    p.custom.clear();
    for (const auto& e : *v) p.custom.push_back(get_int(e, "perturb.custom"));
  }
}

}  // namespace

RunConfig parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("config: not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw std::invalid_argument("config: top level must be an object");

  RunConfig cfg;
  if (const json* v = find(j, "grid")) parse_grid(*v, cfg.family.analysis);
  if (const json* v = find(j, "solver")) parse_solver(*v, cfg.family.params);
  cfg.family.params.space_dim = cfg.family.analysis.space_dim;
  if (const json* v = find(j, "family")) parse_family(*v, cfg.family);
  if (const json* v = find(j, "dictionary")) parse_dictionary(*v, cfg.dictionary);
  if (const json* v = find(j, "weights")) {
    if (!v->is_array() || v->empty()) fail("weights", "must be a nonempty array");
    cfg.weights.clear();
    for (const auto& e : *v) cfg.weights.push_back(get_string(e, "weights"));
  }
  if (const json* v = find(j, "schedule")) parse_schedule(*v, cfg);
  if (const json* v = find(j, "perturb")) parse_perturb(*v, cfg.perturb);
  if (const json* v = find(j, "seed")) {
    if (!v->is_number_unsigned() && !v->is_number_integer())
      fail("seed", "must be a nonnegative integer");
    long long s = v->get<long long>();
    if (s < 0) fail("seed", "must be a nonnegative integer");
    cfg.seed = static_cast<std::uint64_t>(s);
  }
  if (const json* v = find(j, "output")) {
    expect_object(*v, "output");
    if (const json* d = find(*v, "dir")) cfg.out_dir = get_string(*d, "output.dir");
  }

  // Cross-field invariants.
  if (!(cfg.tol > 0.0)) fail("schedule.tol", "must be positive");
  for (std::size_t i = 0; i < cfg.checkpoints.size(); ++i) {
    if (cfg.checkpoints[i] < 1) fail("schedule.checkpoints", "must be >= 1");
    if (i > 0 && cfg.checkpoints[i] <= cfg.checkpoints[i - 1])
      fail("schedule.checkpoints", "must be strictly increasing");
  }
  try {
    weights_from_names(cfg.weights);
  } catch (const std::invalid_argument& e) {
    fail("weights", std::string("invalid: ") + e.what());
  }
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("config: cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

ObservableDictionary dictionary_from_spec(const DictionarySpec& spec,
                                          const FieldSequence& seq) {
  Profile profile = spec.profile == "smooth" ? Profile::smooth_bump : Profile::tent;
  if (!spec.centers.empty()) {
    ObservableDictionary dict;
    const std::size_t dim = static_cast<std::size_t>(seq.state_dim());
    dict.range_lo.assign(dim, 0.0);
    dict.range_hi.assign(dim, 0.0);
    int id = 0;
    for (const auto& c : spec.centers) {
      if (c.size() != dim)
        throw std::invalid_argument(
            "config: dictionary.centers dimension mismatch with the sequence");
      dict.observables.push_back(CompactObservable{c, spec.radius, profile, id++});
    }
    for (std::size_t d = 0; d < dim; ++d) {
      dict.range_lo[d] = dict.observables[0].center[d];
      dict.range_hi[d] = dict.observables[0].center[d];
      for (const auto& b : dict.observables) {
        dict.range_lo[d] = std::min(dict.range_lo[d], b.center[d] - b.radius);
        dict.range_hi[d] = std::max(dict.range_hi[d], b.center[d] + b.radius);
      }
    }
    return dict;
  }
  if (spec.radius > 0.0)
    return dictionary_for_sequence_with_radius(seq, spec.radius, profile);
  return dictionary_for_sequence(seq, spec.radius_scale, profile);
}

std::vector<Weight> weights_from_names(const std::vector<std::string>& names) {
  if (names.empty()) throw std::invalid_argument("weights: list must not be empty");
  std::vector<Weight> ws;
  ws.reserve(names.size());
  for (const auto& n : names) ws.push_back(weight_by_name(n));
  return ws;
}

}  // namespace statconv
