#pragma once

#include "manneal/cost.hpp"
#include "manneal/geometry.hpp"

namespace manneal {

// Fixed-step classical Runge-Kutta; step_count is fixed rather than adaptive
// so results are bit-reproducible across replicas regardless of duration.
struct FlowConfig {
  int step_count = 8;
  double max_duration = 10.0;  // |s| beyond this throws IntegrationError
};

// Value at time s of the drift flow started at x: the solution of
// phi' = -1/2 grad kappa_delta(., y) evaluated at phi. Negative s integrates
// the time-reversed field. Each sub-step is taken in the exponential chart at
// the current point; a sub-step reaching past half the injectivity radius
// throws IntegrationError.
ManifoldPoint flow_map(const CostSpec& spec, double delta, double s,
                       const ManifoldPoint& x, const ManifoldPoint& y,
                       const FlowConfig& config = {});

// Determinant of the differential of z -> flow_map(s, z, y) at x, by central
// finite differences in the orthonormal chart at x.
double flow_jacobian_det(const CostSpec& spec, double delta, double s,
                         const ManifoldPoint& x, const ManifoldPoint& y,
                         const FlowConfig& config = {}, double fd_step = 1e-5);

}  // namespace manneal
