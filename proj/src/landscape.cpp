#include "manneal/landscape.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <queue>
#include <sstream>
#include <stdexcept>

#include "manneal/errors.hpp"
#include "manneal/serialize.hpp"

namespace manneal {
namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kTwoPi = 2.0 * kPi;
constexpr double kInf = std::numeric_limits<double>::infinity();

void push_edge(std::vector<std::vector<int>>& adj, int a, int b) {
  if (a != b) adj[static_cast<size_t>(a)].push_back(b);
}

// Path-max distances from `source` to every node (bottleneck Dijkstra with
// the running maximum of U as the priority key). Unreachable nodes stay +inf.
std::vector<double> minimax_from(const GridLandscape& L, int source) {
  size_t n = L.points.size();
  std::vector<double> best(n, kInf);
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<Item>> pq;
  best[static_cast<size_t>(source)] = L.values[static_cast<size_t>(source)];
  pq.push({best[static_cast<size_t>(source)], source});
  while (!pq.empty()) {
    auto [d, u] = pq.top();
    pq.pop();
    if (d > best[static_cast<size_t>(u)]) continue;
    for (int v : L.adjacency[static_cast<size_t>(u)]) {
      double nd = std::max(d, L.values[static_cast<size_t>(v)]);
      if (nd < best[static_cast<size_t>(v)]) {
        best[static_cast<size_t>(v)] = nd;
        pq.push({nd, v});
      }
    }
  }
  return best;
}

const char* manifold_name(Manifold m) {
  switch (m) {
    case Manifold::Circle: return "circle";
    case Manifold::Torus2: return "torus";
    case Manifold::Sphere2: return "sphere";
  }
  return "?";
}

Manifold manifold_from_name(const std::string& s) {
  if (s == "circle") return Manifold::Circle;
  if (s == "torus") return Manifold::Torus2;
  if (s == "sphere") return Manifold::Sphere2;
  throw ParseError("unknown manifold name: " + s);
}

}  // namespace

std::vector<std::vector<int>> grid_adjacency(Manifold m, int resolution) {
  if (resolution < 2) throw std::invalid_argument("grid_adjacency: resolution must be >= 2");
  std::vector<std::vector<int>> adj;
  switch (m) {
    case Manifold::Circle: {
      adj.resize(static_cast<size_t>(resolution));
      for (int i = 0; i < resolution; ++i) {
        push_edge(adj, i, (i + 1) % resolution);
        push_edge(adj, i, (i + resolution - 1) % resolution);
      }
      break;
    }
    case Manifold::Torus2: {
      int n = resolution;
      adj.resize(static_cast<size_t>(n) * n);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          int at = i * n + j;
          push_edge(adj, at, ((i + 1) % n) * n + j);
          push_edge(adj, at, ((i + n - 1) % n) * n + j);
          push_edge(adj, at, i * n + (j + 1) % n);
          push_edge(adj, at, i * n + (j + n - 1) % n);
        }
      break;
    }
    case Manifold::Sphere2: {
      int rings = resolution, cols = 2 * resolution;
      adj.resize(static_cast<size_t>(rings) * cols);
      for (int i = 0; i < rings; ++i)
        for (int j = 0; j < cols; ++j) {
          int at = i * cols + j;
          push_edge(adj, at, i * cols + (j + 1) % cols);
          push_edge(adj, at, i * cols + (j + cols - 1) % cols);
          // Over-the-pole edges connect antipodal longitudes in the same ring.
          if (i > 0)
            push_edge(adj, at, (i - 1) * cols + j);
          else
            push_edge(adj, at, (j + cols / 2) % cols);
          if (i + 1 < rings)
            push_edge(adj, at, (i + 1) * cols + j);
          else
            push_edge(adj, at, (rings - 1) * cols + (j + cols / 2) % cols);
        }
      break;
    }
  }
  for (auto& nb : adj) {
    std::sort(nb.begin(), nb.end());
    nb.erase(std::unique(nb.begin(), nb.end()), nb.end());
  }
  return adj;
}

GridLandscape build_landscape(const CostSpec& spec, const MeasureSpec& nu,
                              double delta, int resolution, bool parallel) {
  if (nu.kind != MeasureKind::Atomic && nu.kind != MeasureKind::FileEmpirical)
    throw ValidationError("landscape oracle requires a discrete (atomic) measure");
  GridLandscape L;
  L.manifold = spec.manifold;
  L.resolution = resolution;
  L.delta = delta;
  auto nodes = grid(spec.manifold, resolution);
  int n = static_cast<int>(nodes.size());
  L.points.reserve(nodes.size());
  L.weights.reserve(nodes.size());
  for (const auto& nd : nodes) {
    L.points.push_back(nd.point);
    L.weights.push_back(nd.weight);
  }
  L.values.assign(nodes.size(), 0.0);
#pragma omp parallel for schedule(static) if (parallel)
  for (int i = 0; i < n; ++i)
    L.values[static_cast<size_t>(i)] =
        potential_U(spec, delta, nu, L.points[static_cast<size_t>(i)]);
  L.adjacency = grid_adjacency(spec.manifold, resolution);
  return L;
}

std::vector<int> brute_min(const GridLandscape& L, double tol) {
  double lo = kInf;
  for (double v : L.values) lo = std::min(lo, v);
  std::vector<int> out;
  for (size_t i = 0; i < L.values.size(); ++i)
    if (L.values[i] <= lo + tol) out.push_back(static_cast<int>(i));
  return out;
}

double minimax_elevation(const GridLandscape& L, int i, int j) {
  if (i == j) return L.values[static_cast<size_t>(i)];
  double e = minimax_from(L, i)[static_cast<size_t>(j)];
  if (e == kInf) throw GraphError("no grid path between the requested nodes");
  return e;
}

double critical_depth(const GridLandscape& L) {
  double lo = kInf, hi = -kInf;
  for (double v : L.values) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  std::vector<int> mins = brute_min(L, 1e-12 * std::max(1.0, hi - lo));
  double first = 0.0;
  for (size_t k = 0; k < mins.size(); ++k) {
    std::vector<double> elev = minimax_from(L, mins[k]);
    double depth = 0.0;
    for (size_t y = 0; y < elev.size(); ++y) {
      if (elev[y] == kInf) throw GraphError("landscape grid is disconnected");
      depth = std::max(depth, elev[y] - L.values[y]);
    }
    if (k == 0)
      first = depth;
    else if (std::abs(depth - first) > 1e-12)
      throw NumericError("critical depth depends on the minimizer choice");
  }
  return first;
}

GibbsTable gibbs(const GridLandscape& L, double beta) {
  if (beta < 0.0) throw std::invalid_argument("gibbs: beta must be nonnegative");
  GibbsTable table;
  table.beta = beta;
  table.delta = L.delta;
  size_t n = L.points.size();
  table.masses.resize(n);
  double shift = -kInf;
  for (size_t i = 0; i < n; ++i) {
    table.masses[i] = std::log(L.weights[i]) - beta * L.values[i];
    shift = std::max(shift, table.masses[i]);
  }
  double z = 0.0;
  for (size_t i = 0; i < n; ++i) {
    table.masses[i] = std::exp(table.masses[i] - shift);
    z += table.masses[i];
  }
  for (size_t i = 0; i < n; ++i) table.masses[i] /= z;
  return table;
}

double neighborhood_mass(const GridLandscape& L, const std::vector<double>& masses,
                         const std::vector<int>& centers, double radius) {
  if (masses.size() != L.points.size())
    throw ValidationError("mass vector does not match the landscape grid");
  if (!(radius > 0.0)) throw std::invalid_argument("radius must be positive");
  double acc = 0.0;
  for (size_t i = 0; i < L.points.size(); ++i) {
    double dmin = kInf;
    for (int c : centers)
      dmin = std::min(dmin, dist(L.points[i], L.points[static_cast<size_t>(c)]));
    if (dmin <= radius) acc += masses[i];
  }
  return acc;
}

double estimate_It(const GridLandscape& L, const std::vector<double>& empirical,
                   const GibbsTable& table) {
  if (empirical.size() != L.points.size() || table.masses.size() != L.points.size())
    throw ValidationError("histogram and Gibbs table must share the landscape grid");
  double acc = 0.0;
  for (size_t i = 0; i < empirical.size(); ++i) {
    double g = table.masses[i], h = empirical[i];
    if (g <= 0.0) {
      if (h > 0.0)
        throw DiagnosticError("empirical mass on a node with zero Gibbs mass");
      continue;
    }
    double r = h / g - 1.0;
    acc += r * r * g;
  }
  return acc;
}

std::vector<double> nearest_node_histogram(const GridLandscape& L,
                                           const std::vector<ManifoldPoint>& positions) {
  std::vector<double> h(L.points.size(), 0.0);
  if (positions.empty()) return h;
  int res = L.resolution;
  for (const auto& p : positions) {
    size_t idx = 0;
    switch (L.manifold) {
      case Manifold::Circle: {
        double w = kTwoPi / res;
        idx = static_cast<size_t>(std::llround(p.coords[0] / w) % res);
        break;
      }
      case Manifold::Torus2: {
        double w = kTwoPi / res;
        long i = std::llround(p.coords[0] / w) % res;
        long j = std::llround(p.coords[1] / w) % res;
        idx = static_cast<size_t>(i * res + j);
        break;
      }
      case Manifold::Sphere2: {
        int cols = 2 * res;
        double theta = std::acos(std::clamp(p.coords[2], -1.0, 1.0));
        int ring = std::clamp(static_cast<int>(theta / (kPi / res)), 0, res - 1);
        double phi = std::atan2(p.coords[1], p.coords[0]);
        if (phi < 0) phi += kTwoPi;
        int col = static_cast<int>(std::llround(phi / (kTwoPi / cols))) % cols;
        idx = static_cast<size_t>(ring * cols + col);
        break;
      }
    }
    h[idx] += 1.0;
  }
  for (double& v : h) v /= static_cast<double>(positions.size());
  return h;
}

void export_landscape(const GridLandscape& L, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IngestionError("cannot open landscape file for writing: " + path);
  out << "# landscape manifold=" << manifold_name(L.manifold)
      << " resolution=" << L.resolution << " delta=" << format_double(L.delta)
      << "\n";
  out << "c0,c1,c2,weight,value\n";
  for (size_t i = 0; i < L.points.size(); ++i) {
    const auto& c = L.points[i].coords;
    out << format_double(c[0]) << ',' << format_double(c[1]) << ','
        << format_double(c[2]) << ',' << format_double(L.weights[i]) << ','
        << format_double(L.values[i]) << "\n";
  }
}

GridLandscape import_landscape(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IngestionError("cannot open landscape file: " + path);
  std::string line;
  if (!std::getline(in, line)) throw IngestionError("landscape file is empty: " + path);
  GridLandscape L;
  {
    std::istringstream head(line);
    std::string tag, word;
    head >> tag >> word;
    if (tag != "#" || word != "landscape")
      throw ParseError("landscape file missing '# landscape' header");
    bool have_m = false, have_r = false;
    while (head >> word) {
      auto eq = word.find('=');
      if (eq == std::string::npos) throw ParseError("malformed landscape header field: " + word);
      std::string key = word.substr(0, eq), val = word.substr(eq + 1);
      if (key == "manifold") {
        L.manifold = manifold_from_name(val);
        have_m = true;
      } else if (key == "resolution") {
        L.resolution = std::stoi(val);
        have_r = true;
      } else if (key == "delta") {
        L.delta = std::stod(val);
      }
    }
    if (!have_m || !have_r) throw ParseError("landscape header needs manifold and resolution");
  }
  int row = 1;
  while (std::getline(in, line)) {
    ++row;
    size_t start = line.find_first_not_of(" \t\r");
    if (start == std::string::npos || line[start] == '#') continue;
    if (line.compare(start, 2, "c0") == 0) continue;  // column header
    std::istringstream cells(line);
    std::string cell;
    double vals[5];
    for (int k = 0; k < 5; ++k) {
      if (!std::getline(cells, cell, ','))
        throw ParseError("landscape row " + std::to_string(row) + ": expected 5 columns");
      try {
        vals[k] = std::stod(cell);
      } catch (const std::exception&) {
        throw ParseError("landscape row " + std::to_string(row) + ": bad number");
      }
    }
    ManifoldPoint p;
    p.manifold_id = L.manifold;
    p.coords = {vals[0], vals[1], vals[2]};
    L.points.push_back(p);
    L.weights.push_back(vals[3]);
    L.values.push_back(vals[4]);
  }
  L.adjacency = grid_adjacency(L.manifold, L.resolution);
  if (L.points.size() != L.adjacency.size())
    throw ValidationError("landscape row count does not match the declared resolution");
  return L;
}

void export_gibbs(const GibbsTable& table, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IngestionError("cannot open gibbs file for writing: " + path);
  out << "# gibbs beta=" << format_double(table.beta)
      << " delta=" << format_double(table.delta) << "\n";
  out << "index,mass\n";
  for (size_t i = 0; i < table.masses.size(); ++i)
    out << i << ',' << format_double(table.masses[i]) << "\n";
}

}  // namespace manneal
