#pragma once

#include <optional>
#include <string>
#include <vector>

#include "manneal/cost.hpp"
#include "manneal/geometry.hpp"
#include "manneal/measures.hpp"
#include "manneal/schedules.hpp"
#include "manneal/simulator.hpp"

namespace manneal {

struct SimulationSection {
  double horizon = 0.0;
  double step = 1e-2;
  int replicas = 1;
  unsigned long long seed = 0;
  std::vector<double> snapshot_times;  // defaulted to {horizon} by the parser
  std::vector<double> quantile_levels{0.1, 0.25, 0.5, 0.75, 0.9};
  int histogram_resolution = 0;  // > 0 enables the I_t estimate
};

struct GibbsRequest {
  double beta = 0.0;
  double delta = 0.0;
};

struct OracleSection {
  int resolution = 1024;
  std::vector<double> radii{0.2, 0.5};
  double tol = 1e-9;
  std::vector<GibbsRequest> gibbs;
  double validation_horizon = 1e6;
};

struct OutputSection {
  std::string directory = "runs";
  std::vector<std::string> formats{"csv", "json"};
};

// A parsed, validated experiment: resolved runtime objects (file-backed
// tables and measures already loaded) plus the canonical JSON document the
// run is identified by. `canonical` materializes every default in a stable
// key order, so re-parsing it reproduces the same document byte for byte.
struct ExperimentConfig {
  Manifold manifold = Manifold::Circle;
  CostSpec cost;
  MeasureSpec measure;
  ScheduleTriple schedule;
  SimulationSection simulation;
  OracleSection oracle;
  OutputSection output;
  std::string canonical;
};

// Command-line overrides applied to the document before validation, so they
// participate in the canonical form and the config hash.
struct ConfigOverrides {
  std::optional<unsigned long long> seed;
  std::optional<int> replicas;
  std::optional<std::string> out_dir;
};

// Throws ConfigError (naming the dotted field path) on schema violations and
// IngestionError when the file itself cannot be read.
ExperimentConfig parse_config_text(const std::string& json_text,
                                   const ConfigOverrides& overrides = {});
ExperimentConfig load_config(const std::string& path,
                             const ConfigOverrides& overrides = {});

// FNV-1a 64-bit hash of the canonical document, as 16 lowercase hex digits.
std::string config_hash(const ExperimentConfig& cfg);

// <output.directory>/<config_hash>-s<seed>
std::string run_directory(const ExperimentConfig& cfg);

SimConfig to_sim_config(const ExperimentConfig& cfg);

}  // namespace manneal
