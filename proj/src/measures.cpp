#include "manneal/measures.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "manneal/errors.hpp"

namespace manneal {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void build_cdf(MeasureSpec& spec) {
  spec.weight_cdf.clear();
  spec.weight_cdf.reserve(spec.weights.size());
  double acc = 0.0;
  for (double w : spec.weights) {
    acc += w;
    spec.weight_cdf.push_back(acc);
  }
  if (!spec.weight_cdf.empty()) spec.weight_cdf.back() = 1.0;
}

std::size_t pick_index(const std::vector<double>& cdf, double u) {
  auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
  if (it == cdf.end()) --it;
  return static_cast<std::size_t>(it - cdf.begin());
}

// Rotate p0 (given relative to the north pole) so the pole maps to center.
ManifoldPoint rotate_pole_to(const ManifoldPoint& center, double x, double y, double z) {
  const auto& c = center.coords;
  double cz = c[2];
  if (cz > 1.0 - 1e-14) return sphere_point(x, y, z);
  if (cz < -1.0 + 1e-14) return sphere_point(x, -y, -z);
  // Rodrigues rotation about axis = normalize(ez x c) by angle acos(cz).
  double ax = -c[1], ay = c[0];
  double an = std::sqrt(ax * ax + ay * ay);
  ax /= an;
  ay /= an;
  double s = an;  // sin(angle), since |ez x c| = sin
  double t = 1.0 - cz;
  double rx = (cz + t * ax * ax) * x + t * ax * ay * y + ay * s * z;
  double ry = t * ax * ay * x + (cz + t * ay * ay) * y - ax * s * z;
  double rz = -ay * s * x + ax * s * y + cz * z;
  return sphere_point(rx, ry, rz);
}

ManifoldPoint parse_row(const std::string& line, Manifold m, int row) {
  std::vector<double> vals;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    try {
      std::size_t pos = 0;
      double v = std::stod(cell, &pos);
      while (pos < cell.size() && std::isspace(static_cast<unsigned char>(cell[pos]))) ++pos;
      if (pos != cell.size()) throw std::invalid_argument("trailing characters");
      vals.push_back(v);
    } catch (const std::exception&) {
      throw ParseError("row " + std::to_string(row) + ": cannot parse '" + cell + "'");
    }
  }
  int want = m == Manifold::Circle ? 1 : m == Manifold::Torus2 ? 2 : 3;
  if (static_cast<int>(vals.size()) != want)
    throw ParseError("row " + std::to_string(row) + ": expected " + std::to_string(want) +
                     " coordinates, got " + std::to_string(vals.size()));
  switch (m) {
    case Manifold::Circle:
      return circle_point(vals[0]);
    case Manifold::Torus2:
      return torus_point(vals[0], vals[1]);
    case Manifold::Sphere2: {
      double n = std::sqrt(vals[0] * vals[0] + vals[1] * vals[1] + vals[2] * vals[2]);
      if (std::abs(n - 1.0) > 1e-6)
        throw ValidationError("row " + std::to_string(row) +
                              ": sphere coordinates are off the unit sphere");
      return sphere_point(vals[0], vals[1], vals[2]);
    }
  }
  throw std::invalid_argument("unknown manifold");
}

}  // namespace

MeasureSpec atomic_measure(Manifold m, std::vector<ManifoldPoint> atoms,
                           std::vector<double> weights) {
  MeasureSpec spec;
  spec.manifold = m;
  spec.kind = MeasureKind::Atomic;
  spec.atoms = std::move(atoms);
  spec.weights = std::move(weights);
  validate_measure(spec);
  build_cdf(spec);
  return spec;
}

MeasureSpec von_mises_measure(double location, double concentration) {
  MeasureSpec spec;
  spec.manifold = Manifold::Circle;
  spec.kind = MeasureKind::VonMises;
  spec.location = wrap_angle(location);
  spec.concentration = concentration;
  validate_measure(spec);
  return spec;
}

MeasureSpec wrapped_gaussian_mixture(std::vector<MixtureComponent> components) {
  MeasureSpec spec;
  spec.manifold = Manifold::Circle;
  spec.kind = MeasureKind::WrappedGaussianMixture;
  spec.components = std::move(components);
  validate_measure(spec);
  spec.weights.clear();
  for (const auto& c : spec.components) spec.weights.push_back(c.weight);
  build_cdf(spec);
  return spec;
}

MeasureSpec uniform_cap_measure(const ManifoldPoint& center, double radius) {
  MeasureSpec spec;
  spec.manifold = Manifold::Sphere2;
  spec.kind = MeasureKind::UniformCap;
  spec.cap_center = center;
  spec.cap_radius = radius;
  validate_measure(spec);
  return spec;
}

MeasureSpec load_empirical(const std::string& path, Manifold m) {
  std::ifstream in(path);
  if (!in) throw IngestionError("cannot open measure file: " + path);
  std::vector<ManifoldPoint> atoms;
  std::string line;
  int row = 0;
  while (std::getline(in, line)) {
    ++row;
    std::size_t start = line.find_first_not_of(" \t\r");
    if (start == std::string::npos) continue;
    if (line[start] == '#') continue;
    atoms.push_back(parse_row(line.substr(start), m, row));
  }
  if (atoms.empty()) throw IngestionError("measure file has no data rows: " + path);
  std::vector<double> weights(atoms.size(), 1.0 / static_cast<double>(atoms.size()));
  auto spec = atomic_measure(m, std::move(atoms), std::move(weights));
  spec.path = path;
  return spec;
}

void validate_measure(const MeasureSpec& spec) {
  switch (spec.kind) {
    case MeasureKind::Atomic: {
      if (spec.atoms.empty()) throw std::invalid_argument("atomic measure has no atoms");
      if (spec.atoms.size() != spec.weights.size())
        throw std::invalid_argument("atom/weight count mismatch");
      double sum = 0.0;
      for (double w : spec.weights) {
        if (w <= 0.0) throw std::invalid_argument("atomic weights must be positive");
        sum += w;
      }
      if (std::abs(sum - 1.0) > 1e-12)
        throw std::invalid_argument("atomic weights must sum to 1");
      for (const auto& a : spec.atoms)
        if (a.manifold_id != spec.manifold)
          throw ValidationError("atom on the wrong manifold");
      break;
    }
    case MeasureKind::VonMises:
      if (spec.manifold != Manifold::Circle)
        throw std::invalid_argument("VonMises is defined on the circle");
      if (spec.concentration < 0.0)
        throw std::invalid_argument("concentration must be nonnegative");
      break;
    case MeasureKind::WrappedGaussianMixture: {
      if (spec.manifold != Manifold::Circle)
        throw std::invalid_argument("WrappedGaussianMixture is defined on the circle");
      if (spec.components.empty())
        throw std::invalid_argument("mixture has no components");
      double sum = 0.0;
      for (const auto& c : spec.components) {
        if (c.weight <= 0.0 || c.sigma <= 0.0)
          throw std::invalid_argument("mixture weights and sigmas must be positive");
        sum += c.weight;
      }
      if (std::abs(sum - 1.0) > 1e-12)
        throw std::invalid_argument("mixture weights must sum to 1");
      break;
    }
    case MeasureKind::UniformCap:
      if (spec.manifold != Manifold::Sphere2)
        throw std::invalid_argument("UniformCap is defined on the sphere");
      if (spec.cap_center.manifold_id != Manifold::Sphere2)
        throw ValidationError("cap center is not a sphere point");
      if (spec.cap_radius <= 0.0 || spec.cap_radius > std::numbers::pi)
        throw std::invalid_argument("cap radius must lie in (0, pi]");
      break;
    case MeasureKind::FileEmpirical:
      if (spec.path.empty()) throw std::invalid_argument("empirical measure needs a path");
      break;
  }
}

ManifoldPoint sample(const MeasureSpec& spec, RandomStream& rng) {
  switch (spec.kind) {
    case MeasureKind::Atomic:
      return spec.atoms[pick_index(spec.weight_cdf, rng.uniform01())];

    case MeasureKind::VonMises: {
      double k = spec.concentration;
      if (k == 0.0) return circle_point(kTwoPi * rng.uniform01());
      // Best-Fisher rejection sampler.
      double tau = 1.0 + std::sqrt(1.0 + 4.0 * k * k);
      double rho = (tau - std::sqrt(2.0 * tau)) / (2.0 * k);
      double r = (1.0 + rho * rho) / (2.0 * rho);
      for (;;) {
        double z = std::cos(std::numbers::pi * rng.uniform01());
        double f = (1.0 + r * z) / (r + z);
        double c = k * (r - f);
        double u = rng.uniform01();
        if (u < c * (2.0 - c) || u <= c * std::exp(1.0 - c)) {
          double sign = rng.uniform01() < 0.5 ? -1.0 : 1.0;
          return circle_point(spec.location + sign * std::acos(f));
        }
      }
    }

    case MeasureKind::WrappedGaussianMixture: {
      const auto& c = spec.components[pick_index(spec.weight_cdf, rng.uniform01())];
      return circle_point(c.mean + c.sigma * rng.normal());
    }

    case MeasureKind::UniformCap: {
      // Area-uniform: cos(colatitude) uniform on [cos(radius), 1].
      double z = 1.0 - rng.uniform01() * (1.0 - std::cos(spec.cap_radius));
      double st = std::sqrt(std::max(0.0, 1.0 - z * z));
      double phi = kTwoPi * rng.uniform01();
      return rotate_pole_to(spec.cap_center, st * std::cos(phi), st * std::sin(phi), z);
    }

    case MeasureKind::FileEmpirical:
      throw std::invalid_argument("FileEmpirical must be resolved via load_empirical");
  }
  throw std::invalid_argument("unknown measure kind");
}

}  // namespace manneal
