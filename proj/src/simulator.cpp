#include "manneal/simulator.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <utility>

#include <json.hpp>

#include "manneal/errors.hpp"
#include "manneal/serialize.hpp"

namespace manneal {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void check_config(const SimConfig& cfg) {
  if (cfg.replicas < 1) throw ValidationError("replicas must be >= 1");
  if (!(cfg.step > 0.0)) throw ValidationError("step h must be positive");
  if (!(cfg.horizon >= 0.0)) throw ValidationError("horizon must be nonnegative");
  if (cfg.cost.manifold != cfg.manifold)
    throw ValidationError("cost manifold does not match the simulation manifold");
  if (cfg.measure.manifold != cfg.manifold)
    throw ValidationError("measure manifold does not match the simulation manifold");
  double prev = -std::numeric_limits<double>::infinity();
  for (double s : cfg.snapshot_times) {
    if (!(s >= 0.0 && s <= cfg.horizon))
      throw ValidationError("snapshot times must lie in [0, horizon]");
    if (!(s > prev)) throw ValidationError("snapshot times must be strictly increasing");
    prev = s;
  }
  if (!cfg.initial.empty() && cfg.initial.size() != static_cast<size_t>(cfg.replicas))
    throw ValidationError("initial positions must be empty or one per replica");
  for (const ManifoldPoint& x : cfg.initial)
    if (x.manifold_id != cfg.manifold)
      throw ValidationError("initial position on the wrong manifold");
  if (cfg.schedule.kind == ScheduleKind::UserTable &&
      (cfg.schedule.table.t.empty() || cfg.schedule.table.t.back() < cfg.horizon))
    throw ValidationError("schedule table must cover [0, horizon]");
  for (double r : cfg.aggregation.radii)
    if (!(r >= 0.0)) throw ValidationError("aggregation radii must be nonnegative");
  for (double q : cfg.aggregation.quantile_levels)
    if (!(q >= 0.0 && q <= 1.0))
      throw ValidationError("quantile levels must lie in [0, 1]");
  if (cfg.aggregation.landscape_resolution < 2)
    throw ValidationError("aggregation landscape resolution must be >= 2");
}

// ---------------------------------------------------------------------------
// Canonical-schedule tracker: maintains ln(1+t) and ln(2+t) incrementally
// (4-term log1p series for small increments, exact refresh every 4096 calls)
// so the per-jump schedule lookup avoids two full logarithms.

struct ScheduleTracker {
  const ScheduleTriple* sched;
  bool canonical;
  double c = 1.0;
  double t = 0.0;
  double l1 = 0.0;               // ln(1 + t)
  double l2 = std::numbers::ln2; // ln(2 + t)
  int since_refresh = 0;

  explicit ScheduleTracker(const ScheduleTriple& s)
      : sched(&s), canonical(s.kind == ScheduleKind::Canonical), c(s.c) {}

  static double log_inc(double u) {
    if (u < 1e-4) return u * (1.0 - u * (0.5 - u * (1.0 / 3.0 - 0.25 * u)));
    return std::log1p(u);
  }

  void refresh(double t_new) {
    t = t_new;
    l1 = std::log1p(t_new);
    l2 = std::log(2.0 + t_new);
    since_refresh = 0;
  }

  ScheduleValues at(double t_new) {
    if (!canonical) return eval(*sched, t_new);
    double dt = t_new - t;
    if (dt < 0.0 || ++since_refresh >= 4096) {
      refresh(t_new);
    } else {
      l1 += log_inc(dt / (1.0 + t));
      l2 += log_inc(dt / (2.0 + t));
      t = t_new;
    }
    return ScheduleValues{1.0 / (1.0 + t), l1 / c, 1.0 / l2};
  }
};

// ---------------------------------------------------------------------------
// Tabulated drift for rotation-invariant circle costs. The flow ODE reduces
// to d' = -1/2 profile_delta'(d) in the signed offset d = x - y, so the jump
// map only ever needs profile' along one period. Rows are rebuilt when delta
// crosses a 1e-4 grain boundary (the schedule's delta decays slowly, so a
// whole trajectory needs ~1e4 rebuilds); within a row the field is read by
// periodic Catmull-Rom interpolation on 256 nodes, which resolves spectral
// content up to k ~ 128, i.e. delta down to ~2e-3.

constexpr int kDriftNodes = 256;
constexpr int kDriftMask = kDriftNodes - 1;
constexpr double kDeltaGrain = 1e-4;
constexpr double kDriftDeltaFloor = 2e-3;

struct DriftNodeTrig {
  std::array<double, kDriftNodes> c{}, s{};
  DriftNodeTrig() {
    for (int j = 0; j < kDriftNodes; ++j) {
      c[static_cast<size_t>(j)] = std::cos(2.0 * kPi * j / kDriftNodes);
      s[static_cast<size_t>(j)] = std::sin(2.0 * kPi * j / kDriftNodes);
    }
  }
};

const DriftNodeTrig& drift_trig() {
  static const DriftNodeTrig t;
  return t;
}

struct DriftTable {
  const CostSpec* spec;
  long long cell = std::numeric_limits<long long>::min();
  std::array<double, kDriftNodes> g{};  // profile'(2 pi j / N)

  void ensure(double delta) {
    long long idx = std::llround(delta / kDeltaGrain);
    if (idx == cell) return;
    cell = idx;
    CircleProfile prof = circle_profile(*spec, static_cast<double>(idx) * kDeltaGrain);
    const int terms = static_cast<int>(prof.coeff.size());
    const DriftNodeTrig& trig = drift_trig();
    for (int j = 0; j < kDriftNodes; ++j) {
      const double cd = trig.c[static_cast<size_t>(j)];
      const double sd = trig.s[static_cast<size_t>(j)];
      double ck = cd, sk = sd;  // cos(k d_j), sin(k d_j), starting at k = 1
      double acc = 0.0;
      for (int k = 1; k < terms; ++k) {
        acc -= k * prof.coeff[static_cast<size_t>(k)] * sk;
        const double cn = ck * cd - sk * sd;
        sk = sk * cd + ck * sd;
        ck = cn;
      }
      g[static_cast<size_t>(j)] = acc;
    }
  }

  // -(1/2) profile'(d), periodic in d.
  double field(double d) const {
    const double u = d * (kDriftNodes / (2.0 * kPi));
    const double fl = std::floor(u);
    const int j = static_cast<int>(fl) & kDriftMask;
    const double w = u - fl;
    const double gm = g[static_cast<size_t>((j + kDriftMask) & kDriftMask)];
    const double g0 = g[static_cast<size_t>(j)];
    const double g1 = g[static_cast<size_t>((j + 1) & kDriftMask)];
    const double g2 = g[static_cast<size_t>((j + 2) & kDriftMask)];
    const double a = -0.5 * gm + 1.5 * g0 - 1.5 * g1 + 0.5 * g2;
    const double b = gm - 2.5 * g0 + 2.0 * g1 - 0.5 * g2;
    const double cc = 0.5 * (g1 - gm);
    return -0.5 * (((a * w + b) * w + cc) * w + g0);
  }
};

double drift_rk4(const DriftTable& tab, double d, double s) {
  // Early jumps can carry durations up to ~beta(t)*alpha(t) ~ 0.3; cap the
  // RK4 step at 0.05 so the stage size stays well inside the stability
  // region even near the cut locus, where the field slope is largest.
  const int steps = std::clamp(static_cast<int>(std::ceil(s / 0.05)), 1, 256);
  const double h = s / steps;
  for (int i = 0; i < steps; ++i) {
    const double k1 = tab.field(d);
    const double k2 = tab.field(d + 0.5 * h * k1);
    const double k3 = tab.field(d + 0.5 * h * k2);
    const double k4 = tab.field(d + h * k3);
    d += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return d;
}

bool fast_path_eligible(const SimConfig& cfg) {
  return cfg.tabulated_drift && cfg.manifold == Manifold::Circle &&
         cfg.cost.kind == CostKind::PowerDistance &&
         cfg.cost.regularization == Regularization::HeatKernel;
}

// One exponential draw per call on every branch; inversion past a user
// table's domain parks the jump beyond any horizon instead of failing.
double next_jump_or_never(const ScheduleTriple& sched, double t, RandomStream& clock) {
  const double e = clock.exponential();
  try {
    return next_jump_time(sched, t, e);
  } catch (const NumericError&) {
    return std::numeric_limits<double>::infinity();
  }
}

template <class JumpFn>
TrajectoryResult trajectory_core(const SimConfig& cfg, int replica_id, JumpFn&& jump) {
  TrajectoryResult out;
  out.replica_id = replica_id;
  RandomStream brown(cfg.seed, 3ull * static_cast<unsigned long long>(replica_id));
  RandomStream clock(cfg.seed, 3ull * static_cast<unsigned long long>(replica_id) + 1);
  RandomStream target(cfg.seed, 3ull * static_cast<unsigned long long>(replica_id) + 2);

  ManifoldPoint x = cfg.initial.empty() ? uniform_point(cfg.manifold, brown)
                                        : cfg.initial[static_cast<size_t>(replica_id)];
  const std::vector<double> snaps = cfg.snapshot_times.empty()
                                        ? std::vector<double>{cfg.horizon}
                                        : cfg.snapshot_times;
  out.snapshots.reserve(snaps.size());
  size_t si = 0;
  long long jumps = 0;
  double t = 0.0;
  while (si < snaps.size() && snaps[si] <= t) {
    out.snapshots.push_back({snaps[si], x, jumps});
    ++si;
  }

  double t_jump = next_jump_or_never(cfg.schedule, 0.0, clock);
  while (t < cfg.horizon) {
    const double t_stop = si < snaps.size() ? std::min(snaps[si], cfg.horizon) : cfg.horizon;
    // A jump landing exactly on a snapshot time is applied first; snapshots
    // observe the post-jump state.
    const bool jump_now = t_jump <= t_stop;
    const double t_target = jump_now ? t_jump : t_stop;
    x = advance_brownian(x, t, t_target, cfg.step, brown);
    t = t_target;
    if (jump_now) {
      const ManifoldPoint y = sample(cfg.measure, target);
      x = jump(x, t, y);
      ++jumps;
      t_jump = next_jump_or_never(cfg.schedule, t, clock);
    }
    while (si < snaps.size() && snaps[si] <= t) {
      out.snapshots.push_back({snaps[si], x, jumps});
      ++si;
    }
  }
  return out;
}

double quantile_type7(const std::vector<double>& sorted, double q) {
  if (sorted.empty()) return kNaN;
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const size_t lo = static_cast<size_t>(pos);
  const size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

int coord_count(Manifold m) { return m == Manifold::Sphere2 ? 3 : dimension(m); }

}  // namespace

ManifoldPoint uniform_point(Manifold m, RandomStream& rng) {
  switch (m) {
    case Manifold::Circle:
      return circle_point(2.0 * kPi * rng.uniform01());
    case Manifold::Torus2: {
      const double a = 2.0 * kPi * rng.uniform01();
      const double b = 2.0 * kPi * rng.uniform01();
      return torus_point(a, b);
    }
    case Manifold::Sphere2: {
      const double z = 2.0 * rng.uniform01() - 1.0;
      const double phi = 2.0 * kPi * rng.uniform01();
      const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
      return sphere_point(r * std::cos(phi), r * std::sin(phi), z);
    }
  }
  throw std::invalid_argument("unknown manifold");
}

ManifoldPoint advance_brownian(const ManifoldPoint& x, double t_from, double t_to,
                               double h, RandomStream& rng) {
  if (!(h > 0.0)) throw ValidationError("advance_brownian requires h > 0");
  const double gap = t_to - t_from;
  if (gap == 0.0) return x;
  if (!(gap > 0.0)) throw ValidationError("advance_brownian requires t_to >= t_from");
  long long n = static_cast<long long>(std::ceil(gap / h));
  if (n < 1) n = 1;
  ManifoldPoint cur = x;
  for (long long i = 0; i + 1 < n; ++i) cur = brownian_step(cur, h, rng);
  const double last = gap - static_cast<double>(n - 1) * h;
  if (last > 0.0) cur = brownian_step(cur, last, rng);
  return cur;
}

ManifoldPoint apply_jump(const ManifoldPoint& x, double t,
                         const ManifoldPoint& y_sample, const SimConfig& cfg) {
  const ScheduleValues v = eval(cfg.schedule, t);
  const double s = v.beta * v.alpha;
  return flow_map(cfg.cost, v.delta, s, x, y_sample, cfg.flow);
}

TrajectoryResult run_trajectory(const SimConfig& cfg, int replica_id) {
  TrajectoryResult out;
  out.replica_id = replica_id;
  try {
    check_config(cfg);
    if (replica_id < 0 || replica_id >= cfg.replicas)
      throw ValidationError("replica id out of range");
    if (fast_path_eligible(cfg)) {
      DriftTable tab{&cfg.cost};
      ScheduleTracker track(cfg.schedule);
      out = trajectory_core(
          cfg, replica_id,
          [&](const ManifoldPoint& x, double t, const ManifoldPoint& y) {
            const ScheduleValues v = track.at(t);
            const double s = v.beta * v.alpha;
            if (s == 0.0) return x;
            if (!(s <= cfg.flow.max_duration))
              throw IntegrationError("flow duration exceeds the configured maximum");
            if (v.delta < kDriftDeltaFloor)
              return flow_map(cfg.cost, v.delta, s, x, y, cfg.flow);
            tab.ensure(v.delta);
            const double d = drift_rk4(tab, angle_diff(x.coords[0], y.coords[0]), s);
            return circle_point(y.coords[0] + d);
          });
    } else {
      out = trajectory_core(cfg, replica_id,
                            [&](const ManifoldPoint& x, double t, const ManifoldPoint& y) {
                              return apply_jump(x, t, y, cfg);
                            });
    }
  } catch (const std::exception& e) {
    out.snapshots.clear();
    out.failed = true;
    out.error = e.what();
  }
  return out;
}

EnsembleRecord run_ensemble(const SimConfig& cfg) {
  check_config(cfg);
  validate_measure(cfg.measure);
  const int replicas = cfg.replicas;
  std::vector<TrajectoryResult> results(static_cast<size_t>(replicas));
#pragma omp parallel for schedule(dynamic)
  for (int r = 0; r < replicas; ++r)
    results[static_cast<size_t>(r)] = run_trajectory(cfg, r);

  EnsembleRecord rec;
  rec.seed = cfg.seed;
  rec.replicas = replicas;
  rec.radii = cfg.aggregation.radii;
  rec.quantile_levels = cfg.aggregation.quantile_levels;
  for (const TrajectoryResult& tr : results)
    if (tr.failed) rec.failures.push_back({tr.replica_id, tr.error});

  GridLandscape oracle =
      build_landscape(cfg.cost, cfg.measure, 0.0, cfg.aggregation.landscape_resolution);
  std::vector<ManifoldPoint> centers;
  for (int i : brute_min(oracle, cfg.aggregation.min_tol))
    centers.push_back(oracle.points[static_cast<size_t>(i)]);

  const std::vector<double> snaps = cfg.snapshot_times.empty()
                                        ? std::vector<double>{cfg.horizon}
                                        : cfg.snapshot_times;
  for (size_t si = 0; si < snaps.size(); ++si) {
    SnapshotStats st;
    st.t = snaps[si];
    for (const TrajectoryResult& tr : results) {
      if (tr.failed) continue;
      st.positions.push_back(tr.snapshots[si].position);
      st.jumps += tr.snapshots[si].jumps;
    }
    std::vector<double> dists;
    dists.reserve(st.positions.size());
    for (const ManifoldPoint& p : st.positions) {
      double best = std::numeric_limits<double>::infinity();
      for (const ManifoldPoint& c : centers) best = std::min(best, dist(p, c));
      dists.push_back(best);
    }
    const double count = static_cast<double>(dists.size());
    for (double r : rec.radii) {
      if (dists.empty()) {
        st.masses.push_back(kNaN);
        continue;
      }
      long long inside = 0;
      for (double d : dists) inside += d <= r ? 1 : 0;
      st.masses.push_back(static_cast<double>(inside) / count);
    }
    std::sort(dists.begin(), dists.end());
    for (double q : rec.quantile_levels) st.quantiles.push_back(quantile_type7(dists, q));
    if (cfg.aggregation.histogram_resolution > 0 && !st.positions.empty()) {
      const ScheduleValues v = eval(cfg.schedule, st.t);
      GridLandscape hist_grid = build_landscape(cfg.cost, cfg.measure, v.delta,
                                                cfg.aggregation.histogram_resolution);
      const std::vector<double> hist = nearest_node_histogram(hist_grid, st.positions);
      st.it_estimate = estimate_It(hist_grid, hist, gibbs(hist_grid, v.beta));
      st.has_it = true;
    }
    rec.snapshots.push_back(std::move(st));
  }
  return rec;
}

std::string ensemble_csv(const EnsembleRecord& record) {
  std::string out = "t,statistic,label,value\r\n";
  auto row = [&out](double t, const char* stat, const std::string& label, double value) {
    out += format_double(t);
    out += ',';
    out += stat;
    out += ',';
    out += csv_field(label);
    out += ',';
    out += format_double(value);
    out += "\r\n";
  };
  for (const SnapshotStats& st : record.snapshots) {
    row(st.t, "jumps", "", static_cast<double>(st.jumps));
    for (size_t i = 0; i < record.radii.size(); ++i)
      row(st.t, "mass", "r=" + format_double(record.radii[i]), st.masses[i]);
    for (size_t i = 0; i < record.quantile_levels.size(); ++i)
      row(st.t, "quantile", "q=" + format_double(record.quantile_levels[i]),
          st.quantiles[i]);
    if (st.has_it) row(st.t, "it", "", st.it_estimate);
  }
  return out;
}

std::string ensemble_json(const EnsembleRecord& record) {
  nlohmann::ordered_json j;
  j["schema"] = "ensemble-record-v1";
  j["config_hash"] = record.config_hash;
  j["seed"] = record.seed;
  j["replicas"] = record.replicas;
  j["radii"] = record.radii;
  j["quantile_levels"] = record.quantile_levels;
  nlohmann::ordered_json failures = nlohmann::ordered_json::array();
  for (const ReplicaFailure& f : record.failures)
    failures.push_back({{"replica", f.replica}, {"error", f.error}});
  j["failures"] = std::move(failures);
  nlohmann::ordered_json snapshots = nlohmann::ordered_json::array();
  for (const SnapshotStats& st : record.snapshots) {
    nlohmann::ordered_json s;
    s["t"] = st.t;
    s["jumps"] = st.jumps;
    s["masses"] = st.masses;
    s["quantiles"] = st.quantiles;
    if (st.has_it)
      s["it"] = st.it_estimate;
    else
      s["it"] = nullptr;
    nlohmann::ordered_json positions = nlohmann::ordered_json::array();
    for (const ManifoldPoint& p : st.positions) {
      nlohmann::ordered_json coords = nlohmann::ordered_json::array();
      for (int k = 0; k < coord_count(p.manifold_id); ++k) coords.push_back(p.coords[static_cast<size_t>(k)]);
      positions.push_back(std::move(coords));
    }
    s["positions"] = std::move(positions);
    snapshots.push_back(std::move(s));
  }
  j["snapshots"] = std::move(snapshots);
  return j.dump(2) + "\n";
}

}  // namespace manneal
