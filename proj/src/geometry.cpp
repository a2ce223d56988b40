#include "manneal/geometry.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "manneal/errors.hpp"

namespace manneal {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

void require_same_manifold(const ManifoldPoint& x, const ManifoldPoint& y) {
  if (x.manifold_id != y.manifold_id)
    throw std::invalid_argument("points on different manifolds");
}

double dot3(const std::array<double, 3>& a, const std::array<double, 3>& b) {
  return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}

std::array<double, 3> cross3(const std::array<double, 3>& a, const std::array<double, 3>& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

double norm3(const std::array<double, 3>& a) { return std::sqrt(dot3(a, a)); }

}  // namespace

int dimension(Manifold m) { return m == Manifold::Circle ? 1 : 2; }

GeometryParams geometry_params(Manifold m) { return {kPi, dimension(m)}; }

double total_volume(Manifold m) {
  switch (m) {
    case Manifold::Circle: return kTwoPi;
    case Manifold::Torus2: return kTwoPi * kTwoPi;
    case Manifold::Sphere2: return 4.0 * kPi;
  }
  return 0.0;
}

double wrap_angle(double theta) {
  double r = std::fmod(theta, kTwoPi);
  if (r < 0.0) r += kTwoPi;
  if (r >= kTwoPi) r = 0.0;  // fmod can round up to 2pi for tiny negatives
  return r;
}

double angle_diff(double a, double b) {
  double d = std::remainder(a - b, kTwoPi);
  if (d == -kPi) d = kPi;
  return d;
}

ManifoldPoint circle_point(double theta) {
  return {Manifold::Circle, {wrap_angle(theta), 0.0, 0.0}};
}

ManifoldPoint torus_point(double t1, double t2) {
  return {Manifold::Torus2, {wrap_angle(t1), wrap_angle(t2), 0.0}};
}

ManifoldPoint sphere_point(double x, double y, double z) {
  double n = std::sqrt(x * x + y * y + z * z);
  if (n == 0.0) throw std::invalid_argument("zero vector is not a sphere point");
  return {Manifold::Sphere2, {x / n, y / n, z / n}};
}

std::array<std::array<double, 3>, 2> sphere_frame(const ManifoldPoint& p) {
  const auto& c = p.coords;
  double sin_theta = std::sqrt(c[0] * c[0] + c[1] * c[1]);
  if (std::abs(c[2]) > 1.0 - 1e-8) {
    // Pole fallback: Gram-Schmidt of the x-axis against p.
    std::array<double, 3> e1{1.0 - c[0] * c[0], -c[0] * c[1], -c[0] * c[2]};
    double n = norm3(e1);
    e1 = {e1[0] / n, e1[1] / n, e1[2] / n};
    auto e2 = cross3(c, e1);
    return {e1, e2};
  }
  // e_theta points toward increasing colatitude, e_phi toward increasing
  // longitude; e_theta x e_phi = p.
  std::array<double, 3> e_theta{c[2] * c[0] / sin_theta, c[2] * c[1] / sin_theta, -sin_theta};
  std::array<double, 3> e_phi{-c[1] / sin_theta, c[0] / sin_theta, 0.0};
  return {e_theta, e_phi};
}

ManifoldPoint exp_map(const ManifoldPoint& x, const TangentVector& v) {
  require_same_manifold(x, v.base);
  switch (x.manifold_id) {
    case Manifold::Circle:
      return circle_point(x.coords[0] + v.components[0]);
    case Manifold::Torus2:
      return torus_point(x.coords[0] + v.components[0], x.coords[1] + v.components[1]);
    case Manifold::Sphere2: {
      auto frame = sphere_frame(x);
      double a = v.components[0], b = v.components[1];
      double r = std::sqrt(a * a + b * b);
      if (r == 0.0) return x;
      double c = std::cos(r), s = std::sin(r) / r;
      std::array<double, 3> q;
      for (int i = 0; i < 3; ++i)
        q[i] = c * x.coords[i] + s * (a * frame[0][i] + b * frame[1][i]);
      return sphere_point(q[0], q[1], q[2]);
    }
  }
  throw std::invalid_argument("unknown manifold");
}

TangentVector log_map(const ManifoldPoint& x, const ManifoldPoint& y) {
  require_same_manifold(x, y);
  TangentVector v;
  v.base = x;
  switch (x.manifold_id) {
    case Manifold::Circle: {
      double d = angle_diff(y.coords[0], x.coords[0]);
      if (std::abs(d) >= kPi)
        throw CutLocusError("log_map: antipodal points on the circle");
      v.components[0] = d;
      return v;
    }
    case Manifold::Torus2: {
      for (int i = 0; i < 2; ++i) {
        double d = angle_diff(y.coords[i], x.coords[i]);
        if (std::abs(d) >= kPi)
          throw CutLocusError("log_map: cut-locus pair on the torus");
        v.components[i] = d;
      }
      return v;
    }
    case Manifold::Sphere2: {
      double c = dot3(x.coords, y.coords);
      auto cr = cross3(x.coords, y.coords);
      double s = norm3(cr);
      double d = std::atan2(s, c);
      if (d >= kPi || (s == 0.0 && c < 0.0))
        throw CutLocusError("log_map: antipodal points on the sphere");
      if (d == 0.0) return v;
      // u = component of y orthogonal to x; |u| = sin(d).
      std::array<double, 3> u;
      for (int i = 0; i < 3; ++i) u[i] = y.coords[i] - c * x.coords[i];
      double un = norm3(u);
      auto frame = sphere_frame(x);
      v.components[0] = d * dot3(u, frame[0]) / un;
      v.components[1] = d * dot3(u, frame[1]) / un;
      return v;
    }
  }
  throw std::invalid_argument("unknown manifold");
}

double dist(const ManifoldPoint& x, const ManifoldPoint& y) {
  require_same_manifold(x, y);
  switch (x.manifold_id) {
    case Manifold::Circle:
      return std::abs(angle_diff(x.coords[0], y.coords[0]));
    case Manifold::Torus2: {
      double d1 = angle_diff(x.coords[0], y.coords[0]);
      double d2 = angle_diff(x.coords[1], y.coords[1]);
      return std::sqrt(d1 * d1 + d2 * d2);
    }
    case Manifold::Sphere2: {
      double c = dot3(x.coords, y.coords);
      double s = norm3(cross3(x.coords, y.coords));
      return std::atan2(s, c);
    }
  }
  throw std::invalid_argument("unknown manifold");
}

ManifoldPoint brownian_step(const ManifoldPoint& x, double h, RandomStream& rng) {
  if (h < 0.0) throw std::invalid_argument("brownian_step: negative duration");
  if (h == 0.0) return x;
  double s = std::sqrt(h);
  TangentVector v;
  v.base = x;
  v.components[0] = s * rng.normal();
  if (dimension(x.manifold_id) == 2) v.components[1] = s * rng.normal();
  return exp_map(x, v);
}

std::vector<GridNode> grid(Manifold m, int resolution) {
  if (resolution < 2) throw std::invalid_argument("grid: resolution must be >= 2");
  std::vector<GridNode> nodes;
  switch (m) {
    case Manifold::Circle: {
      double w = kTwoPi / resolution;
      nodes.reserve(resolution);
      for (int i = 0; i < resolution; ++i)
        nodes.push_back({circle_point(w * i), w});
      break;
    }
    case Manifold::Torus2: {
      double step = kTwoPi / resolution;
      double w = step * step;
      nodes.reserve(static_cast<std::size_t>(resolution) * resolution);
      for (int i = 0; i < resolution; ++i)
        for (int j = 0; j < resolution; ++j)
          nodes.push_back({torus_point(step * i, step * j), w});
      break;
    }
    case Manifold::Sphere2: {
      // Midpoint-colatitude rings; each ring's weight is its exact band area
      // split evenly over 2*resolution longitudes, so the total is exactly 4pi.
      int n_rings = resolution, n_cols = 2 * resolution;
      nodes.reserve(static_cast<std::size_t>(n_rings) * n_cols);
      for (int i = 0; i < n_rings; ++i) {
        double theta = kPi * (i + 0.5) / n_rings;
        double band = kTwoPi * (std::cos(kPi * i / n_rings) - std::cos(kPi * (i + 1) / n_rings));
        double w = band / n_cols;
        double st = std::sin(theta), ct = std::cos(theta);
        for (int j = 0; j < n_cols; ++j) {
          double phi = kTwoPi * j / n_cols;
          nodes.push_back({{Manifold::Sphere2,
                            {st * std::cos(phi), st * std::sin(phi), ct}},
                           w});
        }
      }
      break;
    }
  }
  return nodes;
}

}  // namespace manneal
