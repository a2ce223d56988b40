#pragma once

// Brute-force references for the bottleneck search: random small connected
// graphs dressed up as landscapes, and elevation by exhaustive enumeration of
// simple paths. Deliberately naive; used to cross-check the Dijkstra path.

#include <algorithm>
#include <limits>
#include <vector>

#include "manneal/geometry.hpp"
#include "manneal/landscape.hpp"
#include "manneal/rng.hpp"

namespace graph_oracle {

inline void add_edge(manneal::GridLandscape& L, int a, int b) {
  if (a == b) return;
  auto& na = L.adjacency[static_cast<size_t>(a)];
  if (std::find(na.begin(), na.end(), b) != na.end()) return;
  na.push_back(b);
  L.adjacency[static_cast<size_t>(b)].push_back(a);
}

// Random connected graph on 2..max_nodes nodes: a random attachment tree
// plus up to n extra edges, with i.i.d. uniform values.
inline manneal::GridLandscape random_connected_landscape(manneal::RandomStream& rng,
                                                         int max_nodes) {
  int n = 2 + static_cast<int>(rng.uniform01() * (max_nodes - 1));
  manneal::GridLandscape L;
  L.manifold = manneal::Manifold::Circle;
  L.resolution = n;
  L.adjacency.assign(static_cast<size_t>(n), {});
  for (int i = 0; i < n; ++i) {
    L.points.push_back(manneal::circle_point(6.283185307179586 * i / n));
    L.weights.push_back(1.0);
    L.values.push_back(rng.uniform01());
  }
  for (int i = 1; i < n; ++i)
    add_edge(L, i, static_cast<int>(rng.uniform01() * i));
  int extra = static_cast<int>(rng.uniform01() * n);
  for (int e = 0; e < extra; ++e)
    add_edge(L, static_cast<int>(rng.uniform01() * n),
             static_cast<int>(rng.uniform01() * n));
  return L;
}

inline void elevation_dfs(const manneal::GridLandscape& L, int at, int goal,
                          unsigned visited, double path_max, double& best) {
  path_max = std::max(path_max, L.values[static_cast<size_t>(at)]);
  if (path_max >= best) return;
  if (at == goal) {
    best = path_max;
    return;
  }
  for (int nb : L.adjacency[static_cast<size_t>(at)])
    if (!(visited >> nb & 1u))
      elevation_dfs(L, nb, goal, visited | (1u << nb), path_max, best);
}

inline double exhaustive_elevation(const manneal::GridLandscape& L, int i, int j) {
  double best = std::numeric_limits<double>::infinity();
  elevation_dfs(L, i, j, 1u << i, -best, best);
  return best;
}

inline double exhaustive_critical_depth(const manneal::GridLandscape& L) {
  size_t x0 = 0;
  for (size_t i = 1; i < L.values.size(); ++i)
    if (L.values[i] < L.values[x0]) x0 = i;
  double depth = 0.0;
  for (size_t y = 0; y < L.values.size(); ++y)
    depth = std::max(depth, exhaustive_elevation(L, static_cast<int>(x0),
                                                 static_cast<int>(y)) -
                                L.values[y]);
  return depth;
}

}  // namespace graph_oracle
