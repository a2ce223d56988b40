#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <string>

#include "manneal/config.hpp"
#include "manneal/errors.hpp"

using namespace manneal;

namespace {

constexpr double kPi = std::numbers::pi;

std::string benchmark_text() {
  return R"({
    "manifold": "circle",
    "cost": {"kind": "power", "p": 2.0},
    "measure": {
      "kind": "atomic",
      "atoms": [[0.0], [1.5707963267948966]],
      "weights": [0.5, 0.5]
    },
    "schedule": {"kind": "canonical", "c": 1.2337005501361697},
    "simulation": {
      "horizon": 10000.0,
      "step": 0.01,
      "replicas": 200,
      "seed": 42,
      "snapshot_times": [0.0, 1.0, 10.0, 100.0, 1000.0, 10000.0],
      "quantile_levels": [0.25, 0.5, 0.9],
      "histogram_resolution": 16
    },
    "oracle": {
      "resolution": 1024,
      "radii": [0.2, 0.5],
      "tol": 1e-9,
      "gibbs": [{"beta": 5.0, "delta": 0.05}],
      "validation_horizon": 1000000.0
    },
    "output": {"directory": "runs", "formats": ["csv", "json"]}
  })";
}

std::string config_field(const std::string& text) {
  try {
    parse_config_text(text);
  } catch (const ConfigError& e) {
    return e.field;
  }
  return "";
}

std::filesystem::path temp_file(const std::string& name, const std::string& content) {
  std::filesystem::path p = std::filesystem::temp_directory_path() / name;
  std::ofstream out(p);
  out << content;
  return p;
}

}  // namespace

TEST_CASE("benchmark config parses into resolved runtime objects") {
  ExperimentConfig cfg = parse_config_text(benchmark_text());
  CHECK(cfg.manifold == Manifold::Circle);
  CHECK(cfg.cost.kind == CostKind::PowerDistance);
  CHECK(cfg.cost.p == 2.0);
  CHECK(cfg.measure.kind == MeasureKind::Atomic);
  REQUIRE(cfg.measure.atoms.size() == 2);
  CHECK(cfg.measure.atoms[1].coords[0] == doctest::Approx(kPi / 2).epsilon(1e-15));
  CHECK(cfg.schedule.kind == ScheduleKind::Canonical);
  CHECK(cfg.schedule.c == 1.2337005501361697);
  CHECK(cfg.simulation.horizon == 10000.0);
  CHECK(cfg.simulation.replicas == 200);
  CHECK(cfg.simulation.seed == 42);
  CHECK(cfg.simulation.snapshot_times.size() == 6);
  CHECK(cfg.oracle.resolution == 1024);
  CHECK(cfg.oracle.gibbs.size() == 1);
  CHECK(cfg.output.formats.size() == 2);

  SimConfig sc = to_sim_config(cfg);
  CHECK(sc.horizon == 10000.0);
  CHECK(sc.replicas == 200);
  CHECK(sc.seed == 42);
  CHECK(sc.aggregation.radii == cfg.oracle.radii);
  CHECK(sc.aggregation.landscape_resolution == 1024);
  CHECK(sc.aggregation.histogram_resolution == 16);
  CHECK(sc.aggregation.quantile_levels == cfg.simulation.quantile_levels);
}

TEST_CASE("canonical form is a fixed point of parsing") {
  ExperimentConfig cfg = parse_config_text(benchmark_text());
  ExperimentConfig again = parse_config_text(cfg.canonical);
  CHECK(again.canonical == cfg.canonical);
  CHECK(config_hash(again) == config_hash(cfg));
  CHECK(config_hash(cfg).size() == 16);
  CHECK(run_directory(cfg) == "runs/" + config_hash(cfg) + "-s42");
}

TEST_CASE("defaults are materialized for optional sections") {
  ExperimentConfig cfg = parse_config_text(R"({
    "manifold": "circle",
    "cost": {"kind": "power"},
    "measure": {"kind": "atomic", "atoms": [[1.0]]},
    "schedule": {"kind": "canonical", "c": 2.0}
  })");
  CHECK(cfg.simulation.horizon == 0.0);
  CHECK(cfg.simulation.replicas == 1);
  REQUIRE(cfg.simulation.snapshot_times.size() == 1);
  CHECK(cfg.simulation.snapshot_times[0] == 0.0);
  CHECK(cfg.oracle.resolution == 1024);
  CHECK(cfg.output.directory == "runs");
  CHECK(cfg.measure.weights[0] == 1.0);
  // every default appears in the canonical document
  CHECK(cfg.canonical.find("\"snapshot_times\"") != std::string::npos);
  CHECK(cfg.canonical.find("\"validation_horizon\"") != std::string::npos);
  CHECK(cfg.canonical.find("\"formats\"") != std::string::npos);
}

TEST_CASE("values are normalized before echoing") {
  ExperimentConfig cfg = parse_config_text(R"({
    "manifold": "circle",
    "cost": {"kind": "power", "p": 2.0},
    "measure": {"kind": "atomic", "atoms": [[7.0], [0.5]], "weights": [3.0, 1.0]},
    "schedule": {"kind": "canonical", "c": 1.0}
  })");
  CHECK(cfg.measure.atoms[0].coords[0] == doctest::Approx(7.0 - 2.0 * kPi).epsilon(1e-14));
  CHECK(cfg.measure.weights[0] == 0.75);
  CHECK(cfg.measure.weights[1] == 0.25);
  ExperimentConfig again = parse_config_text(cfg.canonical);
  CHECK(again.canonical == cfg.canonical);
}

TEST_CASE("schema violations name the offending field") {
  CHECK(config_field("not json at all") == "config");
  CHECK(config_field(R"({"manifold": "klein"})") == "manifold");
  CHECK(config_field(R"({"manifold": "circle"})") == "cost");

  std::string base = benchmark_text();
  auto mutate = [&base](const std::string& from, const std::string& to) {
    std::string s = base;
    s.replace(s.find(from), from.size(), to);
    return s;
  };
  CHECK(config_field(mutate("\"p\": 2.0", "\"p\": -1.0")) == "cost.p");
  CHECK(config_field(mutate("\"kind\": \"power\"", "\"kind\": \"exotic\"")) == "cost.kind");
  CHECK(config_field(mutate("\"weights\": [0.5, 0.5]", "\"weights\": [0.5]")) ==
        "measure.weights");
  CHECK(config_field(mutate("\"step\": 0.01", "\"step\": 0.0")) == "simulation.step");
  CHECK(config_field(mutate("\"replicas\": 200", "\"replicas\": 0")) ==
        "simulation.replicas");
  CHECK(config_field(mutate("\"seed\": 42", "\"seed\": -3")) == "simulation.seed");
  CHECK(config_field(mutate("10000.0]", "10001.0]")) == "simulation.snapshot_times");
  CHECK(config_field(mutate("\"resolution\": 1024", "\"resolution\": 1")) ==
        "oracle.resolution");
  CHECK(config_field(mutate("\"formats\": [\"csv\", \"json\"]",
                            "\"formats\": [\"yaml\"]")) == "output.formats");
  CHECK(config_field(mutate("\"tol\": 1e-9", "\"tol\": 1e-9, \"mystery\": 1")) ==
        "oracle.mystery");
  CHECK(config_field(mutate("\"manifold\": \"circle\"",
                            "\"manifold\": \"circle\", \"extra\": {}")) == "extra");
}

TEST_CASE("a missing measure file is reported as measure.path") {
  std::string text = R"({
    "manifold": "circle",
    "cost": {"kind": "power", "p": 2.0},
    "measure": {"kind": "file", "path": "/nonexistent/points.csv"},
    "schedule": {"kind": "canonical", "c": 1.0}
  })";
  try {
    parse_config_text(text);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.field == "measure.path");
    CHECK(std::string(e.what()).find("measure.path") != std::string::npos);
  }
}

TEST_CASE("file-backed measures and schedules resolve at parse time") {
  auto points = temp_file("manneal_cfg_points.csv", "0.25\n1.5\n2.75\n");
  auto sched = temp_file("manneal_cfg_sched.csv",
                         "t,alpha,beta,delta\n0,1,0,0.5\n10,1,1,0.5\n");
  std::string text = std::string(R"({
    "manifold": "circle",
    "cost": {"kind": "power", "p": 2.0},
    "measure": {"kind": "file", "path": ")") + points.string() + R"("},
    "schedule": {"kind": "table", "path": ")" + sched.string() + R"("},
    "simulation": {"horizon": 5.0}
  })";
  ExperimentConfig cfg = parse_config_text(text);
  CHECK(cfg.measure.kind == MeasureKind::Atomic);
  CHECK(cfg.measure.atoms.size() == 3);
  CHECK(cfg.schedule.kind == ScheduleKind::UserTable);
  // the document keeps the file reference rather than the resolved payload
  CHECK(cfg.canonical.find("manneal_cfg_points.csv") != std::string::npos);

  // a horizon beyond the schedule table's domain is a config error
  std::string far = text;
  far.replace(far.find("\"horizon\": 5.0"), 14, "\"horizon\": 50.0");
  CHECK(config_field(far) == "simulation.horizon");
  std::filesystem::remove(points);
  std::filesystem::remove(sched);
}

TEST_CASE("command-line overrides enter the canonical document and hash") {
  ConfigOverrides ov;
  ov.seed = 7;
  ov.replicas = 4;
  ov.out_dir = "elsewhere";
  ExperimentConfig base = parse_config_text(benchmark_text());
  ExperimentConfig cfg = parse_config_text(benchmark_text(), ov);
  CHECK(cfg.simulation.seed == 7);
  CHECK(cfg.simulation.replicas == 4);
  CHECK(cfg.output.directory == "elsewhere");
  CHECK(config_hash(cfg) != config_hash(base));
  CHECK(run_directory(cfg) == "elsewhere/" + config_hash(cfg) + "-s7");
  ExperimentConfig again = parse_config_text(cfg.canonical);
  CHECK(again.canonical == cfg.canonical);
}

TEST_CASE("large unsigned seeds survive the round trip") {
  ConfigOverrides ov;
  ov.seed = 18446744073709551615ull;
  ExperimentConfig cfg = parse_config_text(benchmark_text(), ov);
  CHECK(cfg.simulation.seed == 18446744073709551615ull);
  ExperimentConfig again = parse_config_text(cfg.canonical);
  CHECK(again.simulation.seed == 18446744073709551615ull);
  CHECK(again.canonical == cfg.canonical);
}
