#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "statconv/euler.hpp"
#include "statconv/observables.hpp"

namespace statconv {

/// Dictionary section of a run config: either an explicit center list with a
/// radius, or an automatic lattice over the attained value range.
struct DictionarySpec {
  double radius_scale = 10.0;  // auto mode: radius = scale x largest span
  double radius = 0.0;        // > 0 overrides the scale / sizes explicit centers
  std::string profile = "tent";
  std::vector<std::vector<double>> centers;  // explicit dictionary when nonempty
};

struct PerturbSpec {
  std::string index_set = "squares";  // squares | powers_of_two | custom
  double magnitude = 0.0;
  std::vector<int> custom;
};

/// One run, fully described: family and solver, analysis grid, dictionary,
/// weights, checkpoint schedule, tolerance, seed, output directory.
struct RunConfig {
  FamilyConfig family;
  DictionarySpec dictionary;
  std::vector<std::string> weights{"constant", "linear",  "poly2",
                                   "tent25",   "tent50",  "tent75"};
  std::vector<int> checkpoints{64, 128, 256, 512};
  double tol = 1e-2;
  std::uint64_t seed = 0;
  PerturbSpec perturb;
  std::string out_dir = ".";
};

/// Parses and validates the structured config text; throws
/// std::invalid_argument with a one-line diagnostic naming the offending
/// field (e.g. "config: schedule.checkpoints must be strictly increasing").
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

ObservableDictionary dictionary_from_spec(const DictionarySpec& spec,
                                          const FieldSequence& seq);
std::vector<Weight> weights_from_names(const std::vector<std::string>& names);

}  // namespace statconv
