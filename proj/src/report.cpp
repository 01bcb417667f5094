#include "statconv/report.hpp"

#include <cstdio>
#include <stdexcept>

#include "json.hpp"

namespace statconv {

namespace {

using ordered_json = nlohmann::ordered_json;

ordered_json json_doubles(std::span<const double> v) {
  ordered_json arr = ordered_json::array();
  for (double x : v) arr.push_back(x);
  return arr;
}

ordered_json json_ints(std::span<const int> v) {
  ordered_json arr = ordered_json::array();
  for (int x : v) arr.push_back(x);
  return arr;
}

}  // namespace

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string consistency_report_json(const ConsistencyReport& rep) {
  ordered_json j;
  j["kind"] = "consistency";
  j["test_functions"] = rep.test_function_count;
  j["has_residuals"] = rep.has_residuals;
  ordered_json members = ordered_json::array();
  for (const auto& m : rep.members) {
    ordered_json e;
    e["member"] = m.member;
    e["viscosity"] = m.viscosity;
    e["cells"] = ordered_json::array({m.cells[0], m.cells[1]});
    e["steps"] = m.steps;
    e["initial_energy"] = m.initial_energy;
    e["final_energy"] = m.final_energy;
    e["mass_drift_rel"] = m.mass_drift_rel;
    e["min_energy_defect"] = m.min_energy_defect;
    e["admissible"] = m.admissible;
    e["e1"] = json_doubles(m.e1);
    e["e2"] = json_doubles(m.e2);
    e["initial_rho_gap"] = m.initial_rho_gap;
    e["initial_mom_gap"] = m.initial_mom_gap;
    members.push_back(std::move(e));
  }
  j["members"] = std::move(members);
  return j.dump(2) + "\n";
}

std::string perturbation_record_json(const PerturbationRecord& rec) {
  ordered_json j;
  j["kind"] = "perturbation";
  j["index_set"] = rec.index_set;
  j["magnitude"] = rec.magnitude;
  j["hits"] = rec.hits;
  j["density"] = rec.density;
  j["mean_change_bound"] = rec.mean_change_bound;
  j["w1_bound"] = rec.w1_bound;
  return j.dump(2) + "\n";
}

std::string convergence_report_json(const ConvergenceReport& rep,
                                    const ObservableDictionary& dict) {
  ordered_json j;
  j["kind"] = "sreport";
  j["schedule"] = json_ints(rep.schedule);
  j["tol"] = rep.tol;
  j["converged"] = rep.converged;
  j["mean_barycenter"] = json_doubles(rep.mean_barycenter);

  ordered_json dj;
  dj["size"] = dict.observables.size();
  if (!dict.observables.empty()) {
    dj["radius"] = dict.observables.front().radius;
    dj["profile"] =
        dict.observables.front().profile == Profile::tent ? "tent" : "smooth";
    ordered_json centers = ordered_json::array();
    for (const auto& b : dict.observables) centers.push_back(json_doubles(b.center));
    dj["centers"] = std::move(centers);
  }
  j["dictionary"] = std::move(dj);

  ordered_json pairs = ordered_json::array();
  for (const auto& p : rep.pairs) {
    ordered_json e;
    e["observable"] = p.observable_id;
    e["weight"] = p.weight;
    e["estimate"] = p.verdict.estimate;
    e["tail_gap"] = p.verdict.tail_gap;
    e["converged"] = p.verdict.converged;
    e["estimates"] = json_doubles(p.verdict.estimates);
    pairs.push_back(std::move(e));
  }
  j["pairs"] = std::move(pairs);

  ordered_json indep = ordered_json::array();
  for (const auto& c : rep.independence) {
    ordered_json e;
    e["observable"] = c.observable_id;
    e["spread"] = c.spread;
    e["ok"] = c.ok;
    indep.push_back(std::move(e));
  }
  j["independence"] = std::move(indep);

  j["checkpoint_measure_distances"] = json_doubles(rep.checkpoint_measure_distances);
  j["limit_measure_cells"] = rep.limit_measure.cell_measures.size();
  return j.dump(2) + "\n";
}

std::string measure_csv(const ParametrizedMeasure& mu) {
  std::string out = "cell";
  for (int d = 0; d < mu.dim; ++d) out += ",u" + std::to_string(d);
  out += ",weight\n";
  for (std::size_t cell = 0; cell < mu.cell_measures.size(); ++cell) {
    const EmpiricalMeasure& m = mu.cell_measures[cell];
    for (int i = 0; i < m.size(); ++i) {
      out += std::to_string(cell);
      auto p = m.point(i);
      for (int d = 0; d < mu.dim; ++d) out += "," + format_double(p[d]);
      out += "," + format_double(m.weight(i)) + "\n";
    }
  }
  return out;
}

std::string merge_reports_csv(std::span<const std::string> names,
                              std::span<const std::string> report_texts) {
  if (names.size() != report_texts.size())
    throw std::invalid_argument("merge: names and reports must pair up");
  std::string out = "source,observable,weight,checkpoint,estimate,tail_gap,converged\n";
  for (std::size_t r = 0; r < report_texts.size(); ++r) {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(report_texts[r]);
    } catch (const nlohmann::json::parse_error& e) {
      throw std::invalid_argument("merge: " + names[r] + " is not valid JSON: " +
                                  e.what());
    }
    if (!j.contains("pairs") || !j["pairs"].is_array())
      throw std::invalid_argument("merge: " + names[r] +
                                  " has no analysis pairs section");
    auto schedule = j.value("schedule", std::vector<int>{});
    for (const auto& p : j["pairs"]) {
      auto estimates = p.value("estimates", std::vector<double>{});
      for (std::size_t k = 0; k < estimates.size(); ++k) {
        int checkpoint = k < schedule.size() ? schedule[k] : static_cast<int>(k);
        out += names[r];
        out += "," + std::to_string(p.value("observable", 0));
        out += "," + p.value("weight", std::string("?"));
        out += "," + std::to_string(checkpoint);
        out += "," + format_double(estimates[k]);
        out += "," + format_double(p.value("tail_gap", 0.0));
        out += p.value("converged", false) ? ",1\n" : ",0\n";
      }
    }
  }
  return out;
}

}  // namespace statconv
