#pragma once

#include <array>
#include <vector>

#include "manneal/rng.hpp"

namespace manneal {

enum class Manifold { Circle, Torus2, Sphere2 };

// Position on a compact manifold. Coordinate conventions:
//   Circle:  coords[0] = angle in [0, 2pi)
//   Torus2:  coords[0..1] = angles in [0, 2pi)
//   Sphere2: coords[0..2] = unit vector in R^3 (|x| = 1 within 1e-12)
struct ManifoldPoint {
  Manifold manifold_id = Manifold::Circle;
  std::array<double, 3> coords{0.0, 0.0, 0.0};
};

// Tangent vector in an orthonormal frame at base. The frame is the canonical
// angle frame on Circle/Torus2; on Sphere2 it is the spherical-coordinate
// frame (e_theta, e_phi) with a fixed fallback frame near the poles.
struct TangentVector {
  ManifoldPoint base;
  std::array<double, 2> components{0.0, 0.0};
};

struct GeometryParams {
  double injectivity_radius;
  int dimension;
};

int dimension(Manifold m);
GeometryParams geometry_params(Manifold m);
double total_volume(Manifold m);

// Reduce an angle into [0, 2pi).
double wrap_angle(double theta);
// Signed shortest angular difference, in (-pi, pi].
double angle_diff(double a, double b);

ManifoldPoint circle_point(double theta);
ManifoldPoint torus_point(double t1, double t2);
ManifoldPoint sphere_point(double x, double y, double z);  // normalizes input

// Orthonormal frame at a sphere point: frame[0], frame[1] span the tangent
// plane and frame[0] x frame[1] = p.
std::array<std::array<double, 3>, 2> sphere_frame(const ManifoldPoint& p);

ManifoldPoint exp_map(const ManifoldPoint& x, const TangentVector& v);
TangentVector log_map(const ManifoldPoint& x, const ManifoldPoint& y);
double dist(const ManifoldPoint& x, const ManifoldPoint& y);
ManifoldPoint brownian_step(const ManifoldPoint& x, double h, RandomStream& rng);

struct GridNode {
  ManifoldPoint point;
  double weight;
};

// Quadrature grid covering the manifold; weights sum to the total volume.
// Circle: `resolution` uniform angles. Torus2: resolution^2 product grid.
// Sphere2: `resolution` colatitude rings x 2*resolution longitudes with exact
// band-area weights.
std::vector<GridNode> grid(Manifold m, int resolution);

}  // namespace manneal
