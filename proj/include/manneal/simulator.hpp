#pragma once

#include <string>
#include <vector>

#include "manneal/cost.hpp"
#include "manneal/flow.hpp"
#include "manneal/geometry.hpp"
#include "manneal/landscape.hpp"
#include "manneal/measures.hpp"
#include "manneal/rng.hpp"
#include "manneal/schedules.hpp"

namespace manneal {

// What run_ensemble computes per snapshot, against the oracle grid:
// neighborhood masses of the minimizer set at each radius, distance
// quantiles at each level, and (optionally) the Gibbs discrepancy I_t on a
// coarse histogram grid.
struct AggregationConfig {
  std::vector<double> radii{0.2, 0.5};
  std::vector<double> quantile_levels{0.1, 0.25, 0.5, 0.75, 0.9};
  int landscape_resolution = 1024;
  double min_tol = 1e-9;
  int histogram_resolution = 0;  // 0 disables the I_t estimate
};

struct SimConfig {
  Manifold manifold = Manifold::Circle;
  CostSpec cost;
  MeasureSpec measure;
  ScheduleTriple schedule;
  double horizon = 0.0;
  double step = 1e-2;  // Brownian sub-step h
  int replicas = 1;
  std::vector<double> snapshot_times;  // sorted; empty means {horizon}
  unsigned long long seed = 0;
  std::vector<ManifoldPoint> initial;  // per-replica starts; empty = uniform
  AggregationConfig aggregation;
  FlowConfig flow;
  // Replaces the per-jump spectral drift evaluation with cached distance
  // tables on the Circle/PowerDistance fast path. Kept as a switch so tests
  // can cross-validate the two implementations.
  bool tabulated_drift = true;
};

struct TrajectorySnapshot {
  double t = 0.0;
  ManifoldPoint position;
  long long jumps = 0;  // cumulative jump count at this snapshot
};

struct TrajectoryResult {
  int replica_id = 0;
  bool failed = false;
  std::string error;
  std::vector<TrajectorySnapshot> snapshots;
};

struct SnapshotStats {
  double t = 0.0;
  long long jumps = 0;                  // summed over completed replicas
  std::vector<double> masses;           // one per aggregation radius
  std::vector<double> quantiles;        // one per quantile level
  double it_estimate = 0.0;             // meaningful iff has_it
  bool has_it = false;
  std::vector<ManifoldPoint> positions; // completed replicas, id order
};

struct ReplicaFailure {
  int replica = 0;
  std::string error;
};

struct EnsembleRecord {
  std::string config_hash;  // set by the CLI; empty for library runs
  unsigned long long seed = 0;
  int replicas = 0;
  std::vector<double> radii;
  std::vector<double> quantile_levels;
  std::vector<SnapshotStats> snapshots;
  std::vector<ReplicaFailure> failures;
};

// Uniform sample from the normalized volume measure.
ManifoldPoint uniform_point(Manifold m, RandomStream& rng);

// ceil((t_to - t_from)/h) geodesic-random-walk steps, the last one shortened
// to land exactly at t_to.
ManifoldPoint advance_brownian(const ManifoldPoint& x, double t_from, double t_to,
                               double h, RandomStream& rng);

// Jump update X_T = flow over duration beta_t * alpha_t toward the sample.
ManifoldPoint apply_jump(const ManifoldPoint& x, double t,
                         const ManifoldPoint& y_sample, const SimConfig& cfg);

// Full event loop for one replica on streams (seed, 3*id + {0,1,2}) for
// Brownian / jump clock / target draws. Errors are captured in the result.
TrajectoryResult run_trajectory(const SimConfig& cfg, int replica_id);

// Runs all replicas (in parallel when OpenMP is enabled), then aggregates in
// replica order against the oracle landscape. Identical configs, including
// the seed, produce identical records regardless of thread count.
EnsembleRecord run_ensemble(const SimConfig& cfg);

// Stable text forms: CSV statistics (one row per snapshot x statistic) and a
// JSON document with the full record. Byte-identical for identical records.
std::string ensemble_csv(const EnsembleRecord& record);
std::string ensemble_json(const EnsembleRecord& record);

}  // namespace manneal
