// Compares the OpenMP kernels against their serial references: the landscape
// builder's `parallel` switch and the replica loop under 1 thread vs all
// available. Prints one row per kernel and exits nonzero if the two code
// paths ever disagree.
//
//   bench_replicas [replicas] [horizon]

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "manneal/cost.hpp"
#include "manneal/geometry.hpp"
#include "manneal/landscape.hpp"
#include "manneal/measures.hpp"
#include "manneal/rng.hpp"
#include "manneal/schedules.hpp"
#include "manneal/simulator.hpp"

using namespace manneal;

namespace {

constexpr double kPi = 3.14159265358979323846;

template <class F>
double timed(F&& f) {
  auto t0 = std::chrono::steady_clock::now();
  f();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

int main(int argc, char** argv) {
  int replicas = argc > 1 ? std::atoi(argv[1]) : 32;
  double horizon = argc > 2 ? std::atof(argv[2]) : 1000.0;
#ifdef _OPENMP
  int threads = omp_get_max_threads();
#else
  int threads = 1;
#endif

  // Landscape kernel: 256 atoms scattered over the sphere, 64-ring grid
  // (8192 nodes), heat-kernel regularization at delta = 0.1.
  RandomStream scatter(7, 0);
  std::vector<ManifoldPoint> atoms;
  for (int i = 0; i < 256; ++i) atoms.push_back(uniform_point(Manifold::Sphere2, scatter));
  MeasureSpec nu = atomic_measure(Manifold::Sphere2, atoms,
                                  std::vector<double>(256, 1.0 / 256.0));
  CostSpec sph = power_cost(Manifold::Sphere2, 2.0);
  GridLandscape ls, lp;
  double t_ls = timed([&] { ls = build_landscape(sph, nu, 0.1, 64, false); });
  double t_lp = timed([&] { lp = build_landscape(sph, nu, 0.1, 64, true); });
  bool land_ok = ls.values == lp.values;

  // Replica kernel: the two-atom circle benchmark.
  SimConfig cfg;
  cfg.manifold = Manifold::Circle;
  cfg.cost = power_cost(Manifold::Circle, 2.0);
  cfg.measure = atomic_measure(Manifold::Circle,
                               {circle_point(0.0), circle_point(kPi / 2.0)}, {0.5, 0.5});
  cfg.schedule = canonical_schedule(kPi * kPi / 8.0);
  cfg.horizon = horizon;
  cfg.step = 1e-2;
  cfg.replicas = replicas;
  cfg.snapshot_times = {horizon};
  cfg.seed = 42;
  EnsembleRecord ra, rb;
#ifdef _OPENMP
  omp_set_num_threads(1);
#endif
  double t_rs = timed([&] { ra = run_ensemble(cfg); });
#ifdef _OPENMP
  omp_set_num_threads(threads);
#endif
  double t_rp = timed([&] { rb = run_ensemble(cfg); });
  bool rep_ok = ensemble_csv(ra) == ensemble_csv(rb) && ensemble_json(ra) == ensemble_json(rb);

  std::printf("threads: %d\n", threads);
  std::printf("%-28s %9s %9s %8s  %s\n", "kernel", "serial/s", "omp/s", "speedup", "outputs");
  std::printf("%-28s %9.3f %9.3f %7.2fx  %s\n", "landscape sphere 8192x256",
              t_ls, t_lp, t_ls / t_lp, land_ok ? "identical" : "DIFFER");
  char label[64];
  std::snprintf(label, sizeof label, "ensemble %d x T=%g", replicas, horizon);
  std::printf("%-28s %9.3f %9.3f %7.2fx  %s\n", label,
              t_rs, t_rp, t_rs / t_rp, rep_ok ? "identical" : "DIFFER");
  return land_ok && rep_ok ? 0 : 1;
}
