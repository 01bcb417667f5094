#pragma once

#include <span>
#include <string>
#include <vector>

#include "statconv/ergodic.hpp"
#include "statconv/euler.hpp"
#include "statconv/measures.hpp"
#include "statconv/observables.hpp"

namespace statconv {

/// Deterministic serializers: field order is fixed and numbers are written
/// with round-trip precision, so identical inputs give identical bytes.

std::string format_double(double v);

std::string consistency_report_json(const ConsistencyReport& rep);

struct PerturbationRecord {
  std::string index_set;
  double magnitude = 0.0;
  long long hits = 0;       // perturbed indices within 1..N
  double density = 0.0;     // hits / N
  double mean_change_bound = 0.0;  // 2 x density x |Q|
  double w1_bound = 0.0;           // density x magnitude x sqrt(D) x |Q|
};

std::string perturbation_record_json(const PerturbationRecord& rec);

std::string convergence_report_json(const ConvergenceReport& rep,
                                    const ObservableDictionary& dict);

/// One row per atom per cell: cell, u0..u{D-1}, weight.
std::string measure_csv(const ParametrizedMeasure& mu);

/// Flattens analysis reports into one table keyed by
/// (source, observable, weight, checkpoint).
std::string merge_reports_csv(std::span<const std::string> names,
                              std::span<const std::string> report_texts);

}  // namespace statconv
