#pragma once

#include <string>
#include <vector>

#include "manneal/geometry.hpp"
#include "manneal/measures.hpp"

namespace manneal {

enum class CostKind { PowerDistance, Table };
enum class Regularization { HeatKernel, GeodesicMollifier };

// Grid-sampled cost on the circle: values[i*n + j] = kappa(theta_i, theta_j)
// on the uniform n-point angle grid, interpolated bilinearly with periodic
// wrap in both arguments. Other manifolds would need a 4-dimensional table
// and are not supported.
struct CostTable {
  int n = 0;
  std::vector<double> values;
};

struct HeatKernelParams {
  // Series order (image count on Circle/Torus2, spectral degree on Sphere2);
  // 0 picks the order automatically from delta so normalization holds to 1e-8.
  int truncation = 0;
};

struct CostSpec {
  Manifold manifold = Manifold::Circle;
  CostKind kind = CostKind::PowerDistance;
  double p = 2.0;  // PowerDistance exponent
  CostTable table;
  Regularization regularization = Regularization::HeatKernel;
  int quadrature_resolution = 0;  // 0 = manifold default (512 / 64 / 96)
  HeatKernelParams heat;
};

CostSpec power_cost(Manifold m, double p,
                    Regularization reg = Regularization::HeatKernel);
CostSpec table_cost(CostTable table, Regularization reg = Regularization::HeatKernel);

// CSV loader for CostTable: header row "circle,<n>", then n rows of n values.
CostTable load_cost_table(const std::string& path);

int default_quadrature_resolution(Manifold m);

double kappa(const CostSpec& spec, const ManifoldPoint& x, const ManifoldPoint& y);

// Heat kernel of the semigroup exp(delta * Laplacian): wrapped Gaussian of
// variance 2*delta on Circle (product on Torus2), truncated Legendre series
// sum_l exp(-delta l(l+1)) (2l+1)/(4pi) P_l(cos) on Sphere2.
double heat_kernel(double delta, const ManifoldPoint& x, const ManifoldPoint& z,
                   HeatKernelParams params = {});

// kappa smoothed in its first argument at scale delta, and its x-gradient.
double kappa_delta(const CostSpec& spec, double delta, const ManifoldPoint& x,
                   const ManifoldPoint& y);
TangentVector grad_kappa_delta(const CostSpec& spec, double delta,
                               const ManifoldPoint& x, const ManifoldPoint& y);

// Expected cost sum_j w_j kappa_delta(x, a_j) over a finite atomic measure;
// delta = 0 uses the unregularized kappa.
double potential_U(const CostSpec& spec, double delta, const MeasureSpec& nu,
                   const ManifoldPoint& x);

// Radial profile of kappa_delta for rotation-invariant circle costs:
// value(d) = kappa_delta(x, y) with d the signed angle x - y. Exposed so the
// simulator can tabulate the drift field cheaply.
struct CircleProfile {
  std::vector<double> coeff;  // value(d) = coeff[0] + sum_{k>=1} coeff[k] cos(k d)
  double value(double d) const;
  double deriv(double d) const;
};

// PowerDistance on the circle only; throws std::invalid_argument otherwise.
CircleProfile circle_profile(const CostSpec& spec, double delta);

}  // namespace manneal
