#include "statconv/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>

#include "CLI11.hpp"

#include "statconv/config.hpp"
#include "statconv/ergodic.hpp"
#include "statconv/euler.hpp"
#include "statconv/report.hpp"
#include "statconv/snapshot.hpp"

namespace statconv {

namespace {

namespace fs = std::filesystem;

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<int> parse_checkpoint_list(const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      out.push_back(std::stoi(item));
    } catch (const std::logic_error&) {
      throw std::invalid_argument("--checkpoints: '" + item + "' is not an integer");
    }
  }
  if (out.empty()) throw std::invalid_argument("--checkpoints: empty list");
  for (std::size_t i = 1; i < out.size(); ++i)
    if (out[i] <= out[i - 1])
      throw std::invalid_argument("--checkpoints: must be strictly increasing");
  return out;
}

struct CommonArgs {
  std::string config_path;
  std::string out_dir = ".";
  std::string snapshot_path;
  std::string checkpoints;
  double tol = -1.0;       // < 0 means "use the config value"
  std::uint64_t seed = 0;
  bool seed_given = false;
};

RunConfig load_with_overrides(const CommonArgs& a) {
  RunConfig cfg = load_config(a.config_path);
  if (!a.checkpoints.empty()) cfg.checkpoints = parse_checkpoint_list(a.checkpoints);
  if (a.tol >= 0.0) {
    if (!(a.tol > 0.0)) throw std::invalid_argument("--tol must be positive");
    cfg.tol = a.tol;
  }
  if (a.seed_given) cfg.seed = a.seed;
  if (!a.out_dir.empty() && a.out_dir != ".") cfg.out_dir = a.out_dir;
  return cfg;
}

fs::path snapshot_in(const CommonArgs& a, const RunConfig& cfg) {
  if (!a.snapshot_path.empty()) return a.snapshot_path;
  return fs::path(cfg.out_dir) / "snapshot.bin";
}

int cmd_simulate(const CommonArgs& a) {
  RunConfig cfg = load_with_overrides(a);
  fs::create_directories(cfg.out_dir);
  FamilyResult fam = simulate_family(cfg.family);
  fs::path snap = fs::path(cfg.out_dir) / "snapshot.bin";
  save_snapshot(fam.sequence, snap.string());
  write_text(fs::path(cfg.out_dir) / "consistency_report.json",
             consistency_report_json(fam.report));
  std::cout << "simulate: wrote " << snap.string() << " ("
            << fam.sequence.length() << " members) and consistency_report.json\n";
  return 0;
}

int cmd_analyze(const CommonArgs& a) {
  RunConfig cfg = load_with_overrides(a);
  fs::create_directories(cfg.out_dir);
  FieldSequence seq = load_snapshot(snapshot_in(a, cfg).string());
  ObservableDictionary dict = dictionary_from_spec(cfg.dictionary, seq);
  if (dict.observables.empty())
    throw std::invalid_argument("config: dictionary is empty");
  std::vector<Weight> weights = weights_from_names(cfg.weights);
  if (cfg.checkpoints.back() > seq.length())
    throw std::invalid_argument(
        "config: schedule.checkpoints exceed the snapshot member count " +
        std::to_string(seq.length()));
  ConvergenceReport rep =
      analyze_convergence(seq, dict, weights, cfg.checkpoints, cfg.tol);
  write_text(fs::path(cfg.out_dir) / "sreport.json",
             convergence_report_json(rep, dict));
  write_text(fs::path(cfg.out_dir) / "limit_measure.csv",
             measure_csv(rep.limit_measure));
  std::cout << "analyze: verdict "
            << (rep.converged ? "converged" : "not converged") << ", "
            << rep.pairs.size() << " observable/weight pairs, sreport.json and "
            << "limit_measure.csv written\n";
  return 0;
}

int cmd_perturb(const CommonArgs& a) {
  RunConfig cfg = load_with_overrides(a);
  fs::create_directories(cfg.out_dir);
  FieldSequence seq = load_snapshot(snapshot_in(a, cfg).string());

  IndexSet set = IndexSet::squares;
  if (cfg.perturb.index_set == "powers_of_two") set = IndexSet::powers_of_two;
  else if (cfg.perturb.index_set == "custom") set = IndexSet::custom;

  FieldSequence out = perturb_on_index_set(seq, set, cfg.perturb.magnitude,
                                           cfg.seed, cfg.perturb.custom);
  fs::path snap = fs::path(cfg.out_dir) / "perturbed.bin";
  save_snapshot(out, snap.string());

  auto hits = index_set_members(set, seq.length(), cfg.perturb.custom);
  PerturbationRecord rec;
  rec.index_set = cfg.perturb.index_set;
  rec.magnitude = cfg.perturb.magnitude;
  rec.hits = static_cast<long long>(hits.size());
  rec.density = static_cast<double>(hits.size()) / seq.length();
  double q = seq.grid().domain_measure();
  rec.mean_change_bound = 2.0 * rec.density * q;
  rec.w1_bound = rec.density * cfg.perturb.magnitude *
                 std::sqrt(static_cast<double>(seq.state_dim())) * q;
  write_text(fs::path(cfg.out_dir) / "perturb_report.json",
             perturbation_record_json(rec));
  std::cout << "perturb: " << rec.hits << " of " << seq.length()
            << " members touched (density " << format_double(rec.density)
            << "), perturbed.bin and perturb_report.json written\n";
  return 0;
}

int cmd_report(const std::string& out_dir, const std::vector<std::string>& inputs) {
  fs::create_directories(out_dir);
  std::vector<std::string> names;
  std::vector<std::string> texts;
  for (const auto& p : inputs) {
    names.push_back(fs::path(p).stem().string());
    texts.push_back(read_text(p));
  }
  std::string csv = merge_reports_csv(names, texts);
  write_text(fs::path(out_dir) / "merged.csv", csv);
  std::cout << "report: merged " << inputs.size() << " report(s) into merged.csv\n";
  return 0;
}

}  // namespace

int run_cli(std::vector<std::string> args) {
  CLI::App app{"weighted ergodic averaging diagnostics for approximation families"};
  app.require_subcommand(1);

  CommonArgs sim, ana, per;
  std::string rep_out = ".";
  std::vector<std::string> rep_inputs;

  CLI::App* c_sim = app.add_subcommand(
      "simulate", "run the configured family and write snapshot + residual report");
  c_sim->add_option("--config", sim.config_path, "run config (JSON)")->required();
  c_sim->add_option("--out", sim.out_dir, "output directory");
  c_sim->add_option("--seed", sim.seed, "seed override");

  CLI::App* c_ana = app.add_subcommand(
      "analyze", "convergence analysis of a snapshot against the dictionary");
  c_ana->add_option("--config", ana.config_path, "run config (JSON)")->required();
  c_ana->add_option("--out", ana.out_dir, "output directory");
  c_ana->add_option("--snapshot", ana.snapshot_path,
                    "snapshot to analyze (default: <out>/snapshot.bin)");
  c_ana->add_option("--checkpoints", ana.checkpoints,
                    "comma-separated checkpoint override");
  c_ana->add_option("--tol", ana.tol, "tolerance override");

  CLI::App* c_per = app.add_subcommand(
      "perturb", "perturb a snapshot on a sparse index set");
  c_per->add_option("--config", per.config_path, "run config (JSON)")->required();
  c_per->add_option("--out", per.out_dir, "output directory");
  c_per->add_option("--snapshot", per.snapshot_path,
                    "snapshot to perturb (default: <out>/snapshot.bin)");
  CLI::Option* seed_opt = c_per->add_option("--seed", per.seed, "noise seed override");

  CLI::App* c_rep = app.add_subcommand(
      "report", "merge analysis reports into one CSV table");
  c_rep->add_option("--out", rep_out, "output directory");
  c_rep->add_option("inputs", rep_inputs, "sreport JSON files")->required();

  try {
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (c_sim->parsed()) return cmd_simulate(sim);
    if (c_ana->parsed()) return cmd_analyze(ana);
    if (c_per->parsed()) {
      per.seed_given = seed_opt->count() > 0;
      return cmd_perturb(per);
    }
    return cmd_report(rep_out, rep_inputs);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace statconv
