#include <cstdint>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "doctest.h"
#include "json.hpp"
#include "statconv/cli.hpp"
#include "statconv/config.hpp"
#include "statconv/ergodic.hpp"
#include "statconv/fixtures.hpp"
#include "statconv/report.hpp"
#include "statconv/snapshot.hpp"

using namespace statconv;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
  fs::path p = fs::temp_directory_path() / ("statconv_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::trunc);
  REQUIRE(out.good());
  out << text;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int count_lines(const std::string& text) {
  int n = 0;
  std::stringstream ss(text);
  std::string line;
  while (std::getline(ss, line))
    if (!line.empty()) ++n;
  return n;
}

// synthetic alternating run on the unit cylinder, 512 members
std::string alternating_config() {
  return R"({
    "grid": {"space_dim": 1, "cells": [1], "time_steps": 1,
             "final_time": 1.0, "lengths": [1.0]},
    "family": {"kind": "synthetic", "preset": "alternating", "members": 512},
    "schedule": {"checkpoints": [64, 128, 256, 512], "tol": 0.01},
    "perturb": {"index_set": "squares", "magnitude": 0.05},
    "seed": 7
  })";
}

}  // namespace

TEST_CASE("snapshots round-trip bit exactly") {
  Grid g = fixtures::unit_grid();
  auto seq = fixtures::block(g, 12);
  auto bytes = encode_snapshot(seq);
  auto back = decode_snapshot(bytes);
  CHECK(back.length() == 12);
  CHECK(back.state_dim() == 1);
  CHECK(back.grid().space_dim == g.space_dim);
  CHECK(back.grid().final_time == g.final_time);
  REQUIRE(back.raw().size() == seq.raw().size());
  for (std::size_t i = 0; i < seq.raw().size(); ++i) CHECK(back.raw()[i] == seq.raw()[i]);
}

TEST_CASE("snapshots carry two-dimensional momentum data") {
  Grid g;
  g.space_dim = 2;
  g.cells = {4, 3};
  g.time_steps = 2;
  g.final_time = 0.5;
  g.lengths = {1.0, 2.0};
  auto seq = fixtures::alternating_momentum(g, 5);
  // break the constant-in-space symmetry so payload order matters
  for (int n = 1; n <= 5; ++n)
    for (int cell = 0; cell < g.cell_count(); ++cell)
      for (int c = 0; c < 3; ++c)
        seq.value(n, cell, c) += (n * 100.0 + cell * 10.0 + c) / 7.0;

  auto back = decode_snapshot(encode_snapshot(seq));
  CHECK(back.state_dim() == 3);
  CHECK(back.grid().cells[0] == 4);
  CHECK(back.grid().cells[1] == 3);
  CHECK(back.grid().lengths[1] == 2.0);
  CHECK(back.grid().time_steps == 2);
  REQUIRE(back.raw().size() == seq.raw().size());
  for (std::size_t i = 0; i < seq.raw().size(); ++i) CHECK(back.raw()[i] == seq.raw()[i]);
}

TEST_CASE("snapshot files survive the disk") {
  auto dir = fresh_dir("snapfile");
  auto seq = fixtures::harmonic(fixtures::unit_grid(), 20);
  auto path = (dir / "seq.bin").string();
  save_snapshot(seq, path);
  auto back = load_snapshot(path);
  REQUIRE(back.raw().size() == seq.raw().size());
  for (std::size_t i = 0; i < seq.raw().size(); ++i) CHECK(back.raw()[i] == seq.raw()[i]);
  CHECK_THROWS_AS(load_snapshot((dir / "missing.bin").string()), std::runtime_error);
}

TEST_CASE("snapshot decoding rejects damaged bytes") {
  auto seq = fixtures::alternating(fixtures::unit_grid(), 6);
  auto good = encode_snapshot(seq);

  auto bad = good;
  bad[0] ^= 0xff;
  CHECK_THROWS_WITH_AS(decode_snapshot(bad), doctest::Contains("bad tag"),
                       std::runtime_error);

  bad = good;
  bad[8] = 9;  // format version field
  CHECK_THROWS_WITH_AS(decode_snapshot(bad), doctest::Contains("unsupported version 9"),
                       std::runtime_error);

  bad = good;
  bad.resize(bad.size() - 8);
  CHECK_THROWS_WITH_AS(decode_snapshot(bad), doctest::Contains("truncated payload"),
                       std::runtime_error);

  bad = good;
  bad[64 + 3] ^= 0x01;  // payload starts after the 64-byte header
  CHECK_THROWS_WITH_AS(decode_snapshot(bad), doctest::Contains("checksum mismatch"),
                       std::runtime_error);

  std::vector<std::uint8_t> stub(10, 0);
  CHECK_THROWS_WITH_AS(decode_snapshot(stub), doctest::Contains("truncated header"),
                       std::runtime_error);
}

TEST_CASE("snapshots refuse non-finite values") {
  auto seq = fixtures::constant(fixtures::unit_grid(), 2, {1.0});
  seq.value(2, 0, 0) = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(encode_snapshot(seq), std::invalid_argument);
}

TEST_CASE("config parsing covers every section") {
  std::string text = R"({
    "grid": {"space_dim": 1, "cells": [32], "time_steps": 8,
             "final_time": 0.5, "lengths": [2.0]},
    "solver": {"a": 0.7, "gamma": 1.4, "viscosity": 0.001, "cfl": 0.3},
    "family": {"kind": "viscosity", "members": 4, "eps0": 0.01, "eps_decay": 0.5,
               "preset": "smooth-wave", "wave_amplitude": 0.1, "wave_momentum": 0.05,
               "rho_floor": 1e-6},
    "dictionary": {"radius_scale": 4.0, "profile": "smooth"},
    "weights": ["constant", "tent50"],
    "schedule": {"checkpoints": [2, 4], "tol": 0.05},
    "perturb": {"index_set": "powers_of_two", "magnitude": 0.2},
    "seed": 42,
    "output": {"dir": "/tmp/elsewhere"}
  })";
  RunConfig cfg = parse_config(text);
  CHECK(cfg.family.analysis.space_dim == 1);
  CHECK(cfg.family.analysis.cells[0] == 32);
  CHECK(cfg.family.analysis.cells[1] == 1);
  CHECK(cfg.family.analysis.time_steps == 8);
  CHECK(cfg.family.analysis.final_time == 0.5);
  CHECK(cfg.family.analysis.lengths[0] == 2.0);
  CHECK(cfg.family.params.a == 0.7);
  CHECK(cfg.family.params.gamma == 1.4);
  CHECK(cfg.family.params.viscosity == 0.001);
  CHECK(cfg.family.params.cfl == 0.3);
  CHECK(cfg.family.params.space_dim == 1);  // tied to the grid
  CHECK(cfg.family.kind == FamilyConfig::Kind::viscosity);
  CHECK(cfg.family.members == 4);
  CHECK(cfg.family.eps0 == 0.01);
  CHECK(cfg.family.eps_decay == 0.5);
  CHECK(cfg.family.preset == "smooth-wave");
  CHECK(cfg.family.wave_amplitude == 0.1);
  CHECK(cfg.family.wave_momentum == 0.05);
  CHECK(cfg.family.rho_floor == 1e-6);
  CHECK(cfg.dictionary.radius_scale == 4.0);
  CHECK(cfg.dictionary.profile == "smooth");
  CHECK(cfg.weights == std::vector<std::string>{"constant", "tent50"});
  CHECK(cfg.checkpoints == std::vector<int>{2, 4});
  CHECK(cfg.tol == 0.05);
  CHECK(cfg.perturb.index_set == "powers_of_two");
  CHECK(cfg.perturb.magnitude == 0.2);
  CHECK(cfg.seed == 42);
  CHECK(cfg.out_dir == "/tmp/elsewhere");
}

TEST_CASE("config defaults hold when sections are missing") {
  RunConfig cfg = parse_config("{}");
  CHECK(cfg.weights.size() == 6);
  CHECK(cfg.checkpoints == std::vector<int>{64, 128, 256, 512});
  CHECK(cfg.tol == 1e-2);
  CHECK(cfg.seed == 0);
  CHECK(cfg.perturb.index_set == "squares");
  CHECK(cfg.dictionary.radius_scale == 10.0);
  CHECK(cfg.out_dir == ".");
}

TEST_CASE("config diagnostics name the offending field") {
  auto diag = [](const std::string& text) {
    try {
      parse_config(text);
    } catch (const std::invalid_argument& e) {
      return std::string(e.what());
    }
    return std::string("(no error)");
  };

  CHECK(diag("not json").find("not valid JSON") != std::string::npos);
  CHECK(diag("[1,2]").find("top level") != std::string::npos);
  CHECK(diag(R"({"schedule": {"checkpoints": [4, 2]}})")
            .find("schedule.checkpoints must be strictly increasing") !=
        std::string::npos);
  CHECK(diag(R"({"schedule": {"checkpoints": [0]}})")
            .find("schedule.checkpoints") != std::string::npos);
  CHECK(diag(R"({"schedule": {"tol": -1.0}})").find("schedule.tol") !=
        std::string::npos);
  CHECK(diag(R"({"schedule": {"checkpoints": []}})")
            .find("schedule.checkpoints") != std::string::npos);
  CHECK(diag(R"({"dictionary": {"centers": []}})").find("dictionary.centers") !=
        std::string::npos);
  CHECK(diag(R"({"dictionary": {"centers": [[0.5]]}})")
            .find("dictionary.radius must be positive") != std::string::npos);
  CHECK(diag(R"({"dictionary": {"profile": "boxcar"}})")
            .find("dictionary.profile") != std::string::npos);
  CHECK(diag(R"({"weights": ["constant", "sawtooth"]})").find("weights") !=
        std::string::npos);
  CHECK(diag(R"({"weights": []})").find("weights") != std::string::npos);
  CHECK(diag(R"({"perturb": {"index_set": "primes"}})").find("perturb.index_set") !=
        std::string::npos);
  CHECK(diag(R"({"perturb": {"magnitude": -0.1}})").find("perturb.magnitude") !=
        std::string::npos);
  CHECK(diag(R"({"seed": -3})").find("seed") != std::string::npos);
  CHECK(diag(R"({"family": {"kind": "alchemy"}})").find("family.kind") !=
        std::string::npos);
  CHECK(diag(R"({"family": {"members": 0}})").find("family.members") !=
        std::string::npos);
  CHECK(diag(R"({"grid": {"cells": [0]}})").find("grid") != std::string::npos);
  CHECK(diag(R"({"solver": {"gamma": 0.5}})").find("solver") != std::string::npos);
}

TEST_CASE("explicit dictionary centers are validated against the sequence") {
  auto seq = fixtures::alternating(fixtures::unit_grid(), 8);
  DictionarySpec spec;
  spec.centers = {{0.0}, {1.0}};
  spec.radius = 0.5;
  auto dict = dictionary_from_spec(spec, seq);
  REQUIRE(dict.size() == 2);
  CHECK(dict.observables[0].radius == 0.5);
  CHECK(dict.range_lo[0] == -0.5);
  CHECK(dict.range_hi[0] == 1.5);

  spec.centers = {{0.0, 0.0}};
  CHECK_THROWS_WITH_AS(dictionary_from_spec(spec, seq),
                       doctest::Contains("dimension mismatch"), std::invalid_argument);
}

TEST_CASE("automatic dictionary honors the radius override") {
  auto seq = fixtures::alternating(fixtures::unit_grid(), 8);
  DictionarySpec spec;
  spec.radius = 0.3;
  auto dict = dictionary_from_spec(spec, seq);
  CHECK(dict.size() >= 4);  // span 1.2 padded, one center per 0.3
  for (const auto& b : dict.observables) CHECK(b.radius == 0.3);
}

TEST_CASE("simulate and analyze through the command driver") {
  auto dir = fresh_dir("cli_main");
  auto cfg = dir / "run.json";
  write_file(cfg, alternating_config());

  CHECK(run_cli({"simulate", "--config", cfg.string(), "--out", dir.string()}) == 0);
  CHECK(fs::exists(dir / "snapshot.bin"));
  CHECK(fs::exists(dir / "consistency_report.json"));

  auto snap = load_snapshot((dir / "snapshot.bin").string());
  CHECK(snap.length() == 512);
  CHECK(snap.value(1, 0, 0) == 1.0);
  CHECK(snap.value(2, 0, 0) == 0.0);

  CHECK(run_cli({"analyze", "--config", cfg.string(), "--out", dir.string()}) == 0);
  auto rep = nlohmann::json::parse(slurp(dir / "sreport.json"));
  CHECK(rep.at("kind") == "sreport");
  CHECK(rep.at("converged") == true);
  CHECK(rep.at("tol") == 0.01);
  CHECK(rep.at("schedule") == nlohmann::json({64, 128, 256, 512}));
  REQUIRE(rep.at("mean_barycenter").size() == 1);
  CHECK(rep.at("mean_barycenter")[0].get<double>() == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(rep.at("pairs").size() == 12);  // 2 observables x 6 weights
  for (const auto& pair : rep.at("pairs")) {
    CHECK(pair.at("converged") == true);
    CHECK(pair.at("estimates").size() == 4);
    CHECK(pair.at("tail_gap").get<double>() <= 0.01);
  }
  for (const auto& ind : rep.at("independence")) CHECK(ind.at("ok") == true);
  for (const auto& d : rep.at("checkpoint_measure_distances"))
    CHECK(d.get<double>() <= 1e-12);

  auto csv = slurp(dir / "limit_measure.csv");
  CHECK(count_lines(csv) == 3);  // header + two atoms
  CHECK(csv.find("cell,u0,weight") != std::string::npos);
  CHECK(csv.find("0.5") != std::string::npos);

  // checkpoints above the member count are refused
  CHECK(run_cli({"analyze", "--config", cfg.string(), "--out", dir.string(),
                 "--checkpoints", "600"}) == 1);
  CHECK(run_cli({"analyze", "--config", cfg.string(), "--out", dir.string(),
                 "--checkpoints", "64,32"}) == 1);
  CHECK(run_cli({"analyze", "--config", cfg.string(), "--out", dir.string(),
                 "--tol", "0"}) == 1);
}

TEST_CASE("perturb and report through the command driver") {
  auto dir = fresh_dir("cli_perturb");
  auto cfg = dir / "run.json";
  write_file(cfg, alternating_config());

  REQUIRE(run_cli({"simulate", "--config", cfg.string(), "--out", dir.string()}) == 0);
  REQUIRE(run_cli({"analyze", "--config", cfg.string(), "--out", dir.string()}) == 0);
  CHECK(run_cli({"perturb", "--config", cfg.string(), "--out", dir.string()}) == 0);
  CHECK(fs::exists(dir / "perturbed.bin"));

  auto rec = nlohmann::json::parse(slurp(dir / "perturb_report.json"));
  CHECK(rec.at("index_set") == "squares");
  CHECK(rec.at("magnitude") == 0.05);
  CHECK(rec.at("hits") == 22);  // squares up to 512: 1..22^2
  CHECK(rec.at("density").get<double>() == doctest::Approx(22.0 / 512.0));
  CHECK(rec.at("mean_change_bound").get<double>() ==
        doctest::Approx(2.0 * 22.0 / 512.0));
  CHECK(rec.at("w1_bound").get<double>() == doctest::Approx(22.0 / 512.0 * 0.05));

  // perturbed members differ, untouched members are bit-identical
  auto base = load_snapshot((dir / "snapshot.bin").string());
  auto pert = load_snapshot((dir / "perturbed.bin").string());
  CHECK(pert.value(4, 0, 0) != base.value(4, 0, 0));
  CHECK(pert.value(2, 0, 0) == base.value(2, 0, 0));
  CHECK(pert.value(511, 0, 0) == base.value(511, 0, 0));

  CHECK(run_cli({"report", "--out", dir.string(),
                 (dir / "sreport.json").string()}) == 0);
  auto merged = slurp(dir / "merged.csv");
  CHECK(count_lines(merged) == 1 + 12 * 4);  // header + pairs x checkpoints
  CHECK(merged.find("source,observable,weight,checkpoint,estimate,tail_gap,converged") !=
        std::string::npos);
  CHECK(merged.find("sreport,") != std::string::npos);
}

TEST_CASE("identical runs produce identical bytes") {
  auto d1 = fresh_dir("cli_det1");
  auto d2 = fresh_dir("cli_det2");
  auto cfg1 = d1 / "run.json";
  auto cfg2 = d2 / "run.json";
  write_file(cfg1, alternating_config());
  write_file(cfg2, alternating_config());

  for (auto [dir, cfg] : {std::pair{d1, cfg1}, std::pair{d2, cfg2}}) {
    REQUIRE(run_cli({"simulate", "--config", cfg.string(), "--out", dir.string()}) == 0);
    REQUIRE(run_cli({"analyze", "--config", cfg.string(), "--out", dir.string()}) == 0);
    REQUIRE(run_cli({"perturb", "--config", cfg.string(), "--out", dir.string()}) == 0);
  }
  for (const char* name :
       {"snapshot.bin", "sreport.json", "limit_measure.csv", "perturbed.bin",
        "consistency_report.json", "perturb_report.json"}) {
    CHECK(slurp(d1 / name) == slurp(d2 / name));
  }

  // a different noise seed must change the perturbed payload
  REQUIRE(run_cli({"perturb", "--config", cfg2.string(), "--out", d2.string(),
                   "--seed", "8"}) == 0);
  CHECK(slurp(d1 / "perturbed.bin") != slurp(d2 / "perturbed.bin"));
}

TEST_CASE("driver errors map to exit codes") {
  auto dir = fresh_dir("cli_err");
  auto cfg = dir / "run.json";
  write_file(cfg, alternating_config());

  CHECK(run_cli({}) == 1);                    // missing subcommand
  CHECK(run_cli({"transmogrify"}) == 1);      // unknown subcommand
  CHECK(run_cli({"simulate"}) == 1);          // missing --config
  CHECK(run_cli({"simulate", "--config", (dir / "nope.json").string()}) == 1);
  // analyzing before simulating: the snapshot file is absent
  CHECK(run_cli({"analyze", "--config", cfg.string(), "--out", dir.string()}) == 2);

  write_file(dir / "broken.json", R"({"schedule": {"tol": 0}})");
  CHECK(run_cli({"simulate", "--config", (dir / "broken.json").string(),
                 "--out", dir.string()}) == 1);
}

TEST_CASE("report merging rejects malformed input by name") {
  std::vector<std::string> names{"goodname"};
  std::vector<std::string> texts{"{ not json"};
  CHECK_THROWS_WITH_AS(merge_reports_csv(names, texts),
                       doctest::Contains("goodname"), std::invalid_argument);
}

TEST_CASE("perturbed analysis stays within the stated distance bound") {
  auto seq = fixtures::alternating(fixtures::unit_grid(), 512);
  auto dict = dictionary_for_sequence(seq);
  auto weights = weights_from_names({"constant"});
  std::vector<int> schedule{512};

  auto before = analyze_convergence(seq, dict, weights, schedule, 0.01);
  auto pert = perturb_on_index_set(seq, IndexSet::squares, 0.05, 9);
  auto after = analyze_convergence(pert, dict, weights, schedule, 0.01);

  double moved = parametrized_distance(before.limit_measure, after.limit_measure, 1.0);
  double density = 22.0 / 512.0;
  CHECK(moved > 0.0);
  CHECK(moved <= density * 0.05 * 1.0 + 1e-12);  // density x magnitude x sqrt(D) x |Q|
}
