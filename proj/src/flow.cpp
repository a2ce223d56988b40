#include "manneal/flow.hpp"

#include <array>
#include <cmath>
#include <stdexcept>

#include "manneal/errors.hpp"

namespace manneal {
namespace {

using Vec2 = std::array<double, 2>;

double dot3(const std::array<double, 3>& a, const std::array<double, 3>& b) {
  return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}

// The drift field at chart coordinates v (orthonormal chart centered on c),
// pulled back to the chart. On flat manifolds the canonical frames are
// parallel and components carry over; on the sphere the inverse differential
// of exp_c keeps the radial component and scales the transverse one by
// r/sin(r).
struct ChartField {
  const CostSpec& spec;
  double delta;
  const ManifoldPoint& y;
  double sign;  // -1/2 forward, +1/2 for time-reversed integration
  ManifoldPoint center;
  std::array<std::array<double, 3>, 2> frame{};  // sphere only

  Vec2 operator()(const Vec2& v, double trust_radius) const {
    double r = std::hypot(v[0], v[1]);
    if (r > trust_radius)
      throw IntegrationError("flow sub-step left the chart trust region");
    ManifoldPoint p = exp_map(center, TangentVector{center, {v[0], v[1]}});
    TangentVector g = grad_kappa_delta(spec, delta, p, y);
    double c0 = sign * g.components[0];
    double c1 = sign * g.components[1];
    if (center.manifold_id != Manifold::Sphere2 || r < 1e-9) return {c0, c1};

    auto fp = sphere_frame(p);
    std::array<double, 3> w{};
    for (int i = 0; i < 3; ++i) w[i] = c0 * fp[0][i] + c1 * fp[1][i];
    // Unit radial direction of the geodesic at p, and the (parallel) normal.
    std::array<double, 3> u{}, n{}, t{};
    for (int i = 0; i < 3; ++i) {
      u[i] = (v[0] * frame[0][i] + v[1] * frame[1][i]) / r;
      n[i] = (-v[1] * frame[0][i] + v[0] * frame[1][i]) / r;
      t[i] = -std::sin(r) * center.coords[i] + std::cos(r) * u[i];
    }
    double w_rad = dot3(w, t);
    double w_per = dot3(w, n) * (r / std::sin(r));
    return {(w_rad * v[0] - w_per * v[1]) / r, (w_rad * v[1] + w_per * v[0]) / r};
  }
};

}  // namespace

ManifoldPoint flow_map(const CostSpec& spec, double delta, double s,
                       const ManifoldPoint& x, const ManifoldPoint& y,
                       const FlowConfig& config) {
  if (config.step_count < 1) throw std::invalid_argument("step_count must be >= 1");
  if (!(std::abs(s) <= config.max_duration))
    throw IntegrationError("flow duration exceeds max_duration guard");
  if (s == 0.0) return x;

  const double h = std::abs(s) / config.step_count;
  const double sign = s > 0 ? -0.5 : 0.5;
  const double trust = geometry_params(x.manifold_id).injectivity_radius / 2;

  ManifoldPoint cur = x;
  for (int step = 0; step < config.step_count; ++step) {
    ChartField field{spec, delta, y, sign, cur, {}};
    if (cur.manifold_id == Manifold::Sphere2) field.frame = sphere_frame(cur);
    Vec2 k1 = field({0.0, 0.0}, trust);
    Vec2 k2 = field({0.5 * h * k1[0], 0.5 * h * k1[1]}, trust);
    Vec2 k3 = field({0.5 * h * k2[0], 0.5 * h * k2[1]}, trust);
    Vec2 k4 = field({h * k3[0], h * k3[1]}, trust);
    Vec2 dv{h / 6 * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0]),
            h / 6 * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1])};
    if (std::hypot(dv[0], dv[1]) > trust)
      throw IntegrationError("flow sub-step left the chart trust region");
    cur = exp_map(cur, TangentVector{cur, {dv[0], dv[1]}});
  }
  return cur;
}

double flow_jacobian_det(const CostSpec& spec, double delta, double s,
                         const ManifoldPoint& x, const ManifoldPoint& y,
                         const FlowConfig& config, double fd_step) {
  const int dim = dimension(x.manifold_id);
  ManifoldPoint c = flow_map(spec, delta, s, x, y, config);
  std::array<Vec2, 2> cols{};
  for (int i = 0; i < dim; ++i) {
    TangentVector e{x, {0.0, 0.0}};
    e.components[i] = fd_step;
    ManifoldPoint fp = flow_map(spec, delta, s, exp_map(x, e), y, config);
    e.components[i] = -fd_step;
    ManifoldPoint fm = flow_map(spec, delta, s, exp_map(x, e), y, config);
    TangentVector lp = log_map(c, fp), lm = log_map(c, fm);
    cols[i] = {(lp.components[0] - lm.components[0]) / (2 * fd_step),
               (lp.components[1] - lm.components[1]) / (2 * fd_step)};
  }
  if (dim == 1) return cols[0][0];
  return cols[0][0] * cols[1][1] - cols[0][1] * cols[1][0];
}

}  // namespace manneal
