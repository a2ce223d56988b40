#pragma once

#include <string>
#include <vector>

#include "manneal/cost.hpp"
#include "manneal/geometry.hpp"
#include "manneal/measures.hpp"

namespace manneal {

// Potential U sampled on a manifold grid with its quadrature weights and the
// grid's neighbor topology (cycle / 4-neighbor torus / colatitude-longitude
// lattice with over-the-pole edges). U is kappa_delta-based at the stored
// delta; delta = 0 means the raw cost.
struct GridLandscape {
  Manifold manifold = Manifold::Circle;
  int resolution = 0;
  double delta = 0.0;
  std::vector<ManifoldPoint> points;
  std::vector<double> weights;
  std::vector<double> values;
  std::vector<std::vector<int>> adjacency;
};

struct GibbsTable {
  double beta = 0.0;
  double delta = 0.0;
  std::vector<double> masses;
};

// Neighbor lists for the standard grid topology at this resolution.
std::vector<std::vector<int>> grid_adjacency(Manifold m, int resolution);

// Evaluates U(x) = sum_j w_j kappa_delta(x, a_j) at every grid node. The
// measure must be discrete (Atomic or FileEmpirical). `parallel` switches
// between the OpenMP kernel and the serial reference; results are identical.
GridLandscape build_landscape(const CostSpec& spec, const MeasureSpec& nu,
                              double delta, int resolution, bool parallel = true);

// Indices of all nodes with U <= min U + tol, ascending.
std::vector<int> brute_min(const GridLandscape& L, double tol);

// Minimum over grid paths i -> j of the path's maximum U (endpoints
// included), by Dijkstra with the running path-max as priority.
double minimax_elevation(const GridLandscape& L, int i, int j);

// Largest well depth max_y [elevation(x0, y) - U(y)] from a global minimizer
// x0; verified to agree within 1e-12 across every x0 in brute_min.
double critical_depth(const GridLandscape& L);

// Node masses proportional to weight * exp(-beta U), log-domain normalized.
GibbsTable gibbs(const GridLandscape& L, double beta);

// Total mass of nodes within geodesic distance `radius` of any center node.
double neighborhood_mass(const GridLandscape& L, const std::vector<double>& masses,
                         const std::vector<int>& centers, double radius);

// Chi-square-style discrepancy sum_i (h_i/g_i - 1)^2 g_i of an empirical
// histogram h against Gibbs masses g on the same grid.
double estimate_It(const GridLandscape& L, const std::vector<double>& empirical,
                   const GibbsTable& table);

// Normalized occupancy histogram assigning each position to its nearest node.
std::vector<double> nearest_node_histogram(const GridLandscape& L,
                                           const std::vector<ManifoldPoint>& positions);

void export_landscape(const GridLandscape& L, const std::string& path);
GridLandscape import_landscape(const std::string& path);
void export_gibbs(const GibbsTable& table, const std::string& path);

}  // namespace manneal
