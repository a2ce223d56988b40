#include "manneal/cost.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <memory>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "manneal/errors.hpp"

namespace manneal {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

// ---------------------------------------------------------------------------
// Quadrature helper: composite Simpson over [a, b] with n (even) intervals.

template <typename F>
double simpson(F&& f, double a, double b, int n) {
  double h = (b - a) / n;
  double acc = f(a) + f(b);
  for (int i = 1; i < n; ++i) acc += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
  return acc * h / 3.0;
}

// ---------------------------------------------------------------------------
// Circle heat kernel: wrapped Gaussian of variance 2*delta. Spatial image sum
// for small delta, Fourier sum for large delta; both to ~1e-15. A positive
// `truncation` forces the spatial representation with that many images.

double circle_heat(double delta, double d, int truncation) {
  if (truncation > 0 || delta <= 0.75) {
    int K = truncation > 0
                ? truncation
                : std::max(1, (int)std::ceil((8.0 * std::sqrt(2.0 * delta) - kPi) / kTwoPi));
    double inv = 1.0 / (4.0 * delta);
    double s = 0.0;
    for (int k = -K; k <= K; ++k) {
      double u = d + kTwoPi * k;
      s += std::exp(-u * u * inv);
    }
    return s / std::sqrt(4.0 * kPi * delta);
  }
  int K = (int)std::ceil(6.0 / std::sqrt(delta)) + 2;
  double acc = 1.0;
  double c1 = std::cos(d), s1 = std::sin(d), ck = c1, sk = s1;
  for (int k = 1; k <= K; ++k) {
    acc += 2.0 * std::exp(-double(k) * k * delta) * ck;
    double cn = ck * c1 - sk * s1;
    sk = sk * c1 + ck * s1;
    ck = cn;
  }
  return acc / kTwoPi;
}

// d/dd of circle_heat.
double circle_heat_deriv(double delta, double d, int truncation) {
  if (truncation > 0 || delta <= 0.75) {
    int K = truncation > 0
                ? truncation
                : std::max(1, (int)std::ceil((8.0 * std::sqrt(2.0 * delta) - kPi) / kTwoPi));
    double inv = 1.0 / (4.0 * delta);
    double s = 0.0;
    for (int k = -K; k <= K; ++k) {
      double u = d + kTwoPi * k;
      s += -2.0 * u * inv * std::exp(-u * u * inv);
    }
    return s / std::sqrt(4.0 * kPi * delta);
  }
  int K = (int)std::ceil(6.0 / std::sqrt(delta)) + 2;
  double acc = 0.0;
  double c1 = std::cos(d), s1 = std::sin(d), ck = c1, sk = s1;
  for (int k = 1; k <= K; ++k) {
    acc -= 2.0 * k * std::exp(-double(k) * k * delta) * sk;
    double cn = ck * c1 - sk * s1;
    sk = sk * c1 + ck * s1;
    ck = cn;
  }
  return acc / kTwoPi;
}

double sphere_heat(double delta, double cos_gamma, int truncation) {
  int L = truncation > 0
              ? truncation
              : std::clamp((int)std::ceil(6.0 / std::sqrt(delta)) + 4, 8, 2048);
  double pm1 = 1.0, p0 = cos_gamma;
  double acc = 1.0 / (4.0 * kPi) + 3.0 * std::exp(-2.0 * delta) * cos_gamma / (4.0 * kPi);
  for (int l = 2; l <= L; ++l) {
    double pl = ((2.0 * l - 1.0) * cos_gamma * p0 - (l - 1.0) * pm1) / l;
    acc += std::exp(-delta * l * (l + 1.0)) * (2.0 * l + 1.0) / (4.0 * kPi) * pl;
    pm1 = p0;
    p0 = pl;
  }
  return acc;
}

// ---------------------------------------------------------------------------
// Spectral orders chosen so the dropped terms are below ~1e-14 relative.

int circle_order(double delta) {
  return std::clamp((int)std::ceil(6.0 / std::sqrt(2.0 * delta)) + 4, 8, 4096);
}

int sphere_order(double delta) {
  return std::clamp((int)std::ceil(6.0 / std::sqrt(delta)) + 4, 8, 768);
}

// Fourier cosine coefficients of |d|^p on the circle:
// kappa(d) = c[0] + sum_{k>=1} c[k] cos(k d).
std::vector<double> circle_power_coeffs(double p, int K) {
  std::vector<double> c(K + 1);
  c[0] = std::pow(kPi, p) / (p + 1.0);
  if (p == 2.0) {
    for (int k = 1; k <= K; ++k) c[k] = 4.0 * (k % 2 ? -1.0 : 1.0) / (double(k) * k);
    return c;
  }
  // a_k = (2/pi) int_0^pi d^p cos(kd) dd; substitute d = u^2 to keep the
  // integrand differentiable at 0 for small p.
  const int N = 1 << 14;
  double root = std::sqrt(kPi);
  for (int k = 1; k <= K; ++k) {
    double val = simpson(
        [p, k](double u) {
          double u2 = u * u;
          return std::pow(u, 2.0 * p + 1.0) * std::cos(k * u2);
        },
        0.0, root, N);
    c[k] = 4.0 / kPi * val;
  }
  return c;
}

// Legendre coefficients of gamma^p on the sphere:
// kappa(gamma) = sum_l c[l] P_l(cos gamma).
std::vector<double> sphere_power_coeffs(double p, int L) {
  const int N = 1 << 13;
  std::vector<double> acc(L + 1, 0.0);
  double h = kPi / N;
  for (int i = 0; i <= N; ++i) {
    double gamma = i * h;
    double w = (i == 0 || i == N) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    double f = std::pow(gamma, p) * std::sin(gamma) * w;
    double cg = std::cos(gamma);
    double pm1 = 1.0, p0 = cg;
    acc[0] += f;
    if (L >= 1) acc[1] += f * cg;
    for (int l = 2; l <= L; ++l) {
      double pl = ((2.0 * l - 1.0) * cg * p0 - (l - 1.0) * pm1) / l;
      acc[l] += f * pl;
      pm1 = p0;
      p0 = pl;
    }
  }
  std::vector<double> c(L + 1);
  for (int l = 0; l <= L; ++l) c[l] = (2.0 * l + 1.0) / 2.0 * acc[l] * h / 3.0;
  return c;
}

// Regularization multipliers. Heat: exp(-k^2 delta) / exp(-l(l+1) delta).
// Mollifier: normalized truncated Gaussian in geodesic distance, variance
// 2*delta (matching the heat kernel), support min(pi, 6*sigma).

std::vector<double> circle_mollifier_multipliers(double delta, int K) {
  double sigma = std::sqrt(2.0 * delta);
  double rc = std::min(kPi, 6.0 * sigma);
  double inv = 1.0 / (4.0 * delta);
  const int N = 1 << 12;
  std::vector<double> acc(K + 1, 0.0);
  double h = rc / N;
  for (int i = 0; i <= N; ++i) {
    double r = i * h;
    double w = (i == 0 || i == N) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    double q = std::exp(-r * r * inv) * w;
    double c1 = std::cos(r), s1 = std::sin(r), ck = c1, sk = s1;
    acc[0] += q;
    for (int k = 1; k <= K; ++k) {
      acc[k] += q * ck;
      double cn = ck * c1 - sk * s1;
      sk = sk * c1 + ck * s1;
      ck = cn;
    }
  }
  std::vector<double> m(K + 1);
  for (int k = 0; k <= K; ++k) m[k] = acc[k] / acc[0];
  return m;
}

std::vector<double> sphere_mollifier_multipliers(double delta, int L) {
  double sigma = std::sqrt(2.0 * delta);
  double rc = std::min(kPi, 6.0 * sigma);
  double inv = 1.0 / (4.0 * delta);
  const int N = 1 << 12;
  std::vector<double> acc(L + 1, 0.0);
  double h = rc / N;
  for (int i = 0; i <= N; ++i) {
    double gamma = i * h;
    double w = (i == 0 || i == N) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    double q = std::exp(-gamma * gamma * inv) * std::sin(gamma) * w;
    double cg = std::cos(gamma);
    double pm1 = 1.0, p0 = cg;
    acc[0] += q;
    if (L >= 1) acc[1] += q * cg;
    for (int l = 2; l <= L; ++l) {
      double pl = ((2.0 * l - 1.0) * cg * p0 - (l - 1.0) * pm1) / l;
      acc[l] += q * pl;
      pm1 = p0;
      p0 = pl;
    }
  }
  std::vector<double> m(L + 1);
  for (int l = 0; l <= L; ++l) m[l] = acc[l] / acc[0];
  return m;
}

// ---------------------------------------------------------------------------
// Zonal profile on the sphere: kappa_delta as a function of the angle gamma.

struct SphereZonalProfile {
  std::vector<double> coeff;  // modulated Legendre coefficients

  double value(double gamma) const {
    double cg = std::cos(gamma);
    double pm1 = 1.0, p0 = cg;
    double acc = coeff[0];
    if (coeff.size() > 1) acc += coeff[1] * cg;
    for (std::size_t l = 2; l < coeff.size(); ++l) {
      double pl = ((2.0 * l - 1.0) * cg * p0 - (l - 1.0) * pm1) / double(l);
      acc += coeff[l] * pl;
      pm1 = p0;
      p0 = pl;
    }
    return acc;
  }

  // d/dgamma of value, via the joint recurrence for P_l(cos gamma) and its
  // gamma-derivative (regular at the poles).
  double deriv(double gamma) const {
    double cg = std::cos(gamma), sg = std::sin(gamma);
    double pm1 = 1.0, p0 = cg;
    double qm1 = 0.0, q0 = -sg;
    double acc = coeff.size() > 1 ? coeff[1] * q0 : 0.0;
    for (std::size_t l = 2; l < coeff.size(); ++l) {
      double pl = ((2.0 * l - 1.0) * cg * p0 - (l - 1.0) * pm1) / double(l);
      double ql = ((2.0 * l - 1.0) * (-sg * p0 + cg * q0) - (l - 1.0) * qm1) / double(l);
      acc += coeff[l] * ql;
      pm1 = p0;
      p0 = pl;
      qm1 = q0;
      q0 = ql;
    }
    return acc;
  }
};

// ---------------------------------------------------------------------------
// Thread-confined profile caches. Values depend only on the key, so separate
// thread caches stay consistent with sequential evaluation.

struct ProfileKey {
  Manifold m;
  double p;
  Regularization reg;
  double delta;
  int truncation;
  bool operator==(const ProfileKey&) const = default;
};

template <typename P>
const P& cache_lookup(std::vector<std::pair<ProfileKey, std::shared_ptr<P>>>& cache,
                      const ProfileKey& key, P (*build)(const ProfileKey&)) {
  for (std::size_t i = 0; i < cache.size(); ++i) {
    if (cache[i].first == key) {
      if (i != 0) std::rotate(cache.begin(), cache.begin() + i, cache.begin() + i + 1);
      return *cache[0].second;
    }
  }
  if (cache.size() >= 8) cache.pop_back();
  cache.insert(cache.begin(), {key, std::make_shared<P>(build(key))});
  return *cache[0].second;
}

CircleProfile build_circle_profile(const ProfileKey& key) {
  int K = key.truncation > 0 ? key.truncation : circle_order(key.delta);
  auto base = circle_power_coeffs(key.p, K);
  CircleProfile prof;
  prof.coeff.resize(K + 1);
  prof.coeff[0] = base[0];
  if (key.reg == Regularization::HeatKernel) {
    for (int k = 1; k <= K; ++k)
      prof.coeff[k] = base[k] * std::exp(-double(k) * k * key.delta);
  } else {
    auto m = circle_mollifier_multipliers(key.delta, K);
    for (int k = 1; k <= K; ++k) prof.coeff[k] = base[k] * m[k];
  }
  return prof;
}

SphereZonalProfile build_sphere_profile(const ProfileKey& key) {
  int L = key.truncation > 0 ? key.truncation : sphere_order(key.delta);
  auto base = sphere_power_coeffs(key.p, L);
  SphereZonalProfile prof;
  prof.coeff.resize(L + 1);
  prof.coeff[0] = base[0];
  if (key.reg == Regularization::HeatKernel) {
    for (int l = 1; l <= L; ++l)
      prof.coeff[l] = base[l] * std::exp(-key.delta * l * (l + 1.0));
  } else {
    auto m = sphere_mollifier_multipliers(key.delta, L);
    for (int l = 1; l <= L; ++l) prof.coeff[l] = base[l] * m[l];
  }
  return prof;
}

const CircleProfile& cached_circle_profile(const CostSpec& spec, double delta) {
  thread_local std::vector<std::pair<ProfileKey, std::shared_ptr<CircleProfile>>> cache;
  ProfileKey key{Manifold::Circle, spec.p, spec.regularization, delta, spec.heat.truncation};
  return cache_lookup<CircleProfile>(cache, key, build_circle_profile);
}

const SphereZonalProfile& cached_sphere_profile(const CostSpec& spec, double delta) {
  thread_local std::vector<std::pair<ProfileKey, std::shared_ptr<SphereZonalProfile>>> cache;
  ProfileKey key{Manifold::Sphere2, spec.p, spec.regularization, delta, spec.heat.truncation};
  return cache_lookup<SphereZonalProfile>(cache, key, build_sphere_profile);
}

// ---------------------------------------------------------------------------
// Quadrature backend: direct grid convolution. Used for Table costs on the
// circle and non-separable PowerDistance on the torus; accuracy is set by
// quadrature_resolution (defaults below, ~1e-3 convolution error or better
// for delta >= 0.02).

int quad_resolution(const CostSpec& spec) {
  if (spec.quadrature_resolution > 0) return spec.quadrature_resolution;
  return default_quadrature_resolution(spec.manifold);
}

double table_lookup(const CostTable& t, double x, double y) {
  double step = kTwoPi / t.n;
  double u = x / step, v = y / step;
  int i0 = (int)std::floor(u), j0 = (int)std::floor(v);
  double fu = u - i0, fv = v - j0;
  int i1 = (i0 + 1) % t.n, j1 = (j0 + 1) % t.n;
  i0 %= t.n;
  j0 %= t.n;
  const double* a = t.values.data();
  double v00 = a[i0 * t.n + j0], v01 = a[i0 * t.n + j1];
  double v10 = a[i1 * t.n + j0], v11 = a[i1 * t.n + j1];
  return (1 - fu) * ((1 - fv) * v00 + fv * v01) + fu * ((1 - fv) * v10 + fv * v11);
}

// Unnormalized smoothing kernel value and its d/d(offset) on the circle.
double kernel_1d(const CostSpec& spec, double delta, double d) {
  if (spec.regularization == Regularization::HeatKernel)
    return circle_heat(delta, d, spec.heat.truncation);
  double sigma = std::sqrt(2.0 * delta);
  double rc = std::min(kPi, 6.0 * sigma);
  return std::abs(d) <= rc ? std::exp(-d * d / (4.0 * delta)) : 0.0;
}

double kernel_1d_deriv(const CostSpec& spec, double delta, double d) {
  if (spec.regularization == Regularization::HeatKernel)
    return circle_heat_deriv(delta, d, spec.heat.truncation);
  double sigma = std::sqrt(2.0 * delta);
  double rc = std::min(kPi, 6.0 * sigma);
  return std::abs(d) <= rc ? -d / (2.0 * delta) * std::exp(-d * d / (4.0 * delta)) : 0.0;
}

// Circle Table: value and gradient by normalized kernel quadrature. The
// normalizer cancels for the exactly-mass-one heat kernel up to grid error;
// keeping it makes constants reproduce exactly for both regularizations.
double quad_circle_table(const CostSpec& spec, double delta, double x, double y,
                         bool want_grad) {
  int n = quad_resolution(spec);
  double step = kTwoPi / n;
  double num = 0.0, den = 0.0, dnum = 0.0, dden = 0.0;
  for (int i = 0; i < n; ++i) {
    double z = i * step;
    double u = angle_diff(x, z);
    double k = kernel_1d(spec, delta, u) * step;
    double t = table_lookup(spec.table, z, y);
    num += k * t;
    den += k;
    if (want_grad) {
      double dk = kernel_1d_deriv(spec, delta, u) * step;
      dnum += dk * t;
      dden += dk;
    }
  }
  if (!want_grad) return num / den;
  return dnum / den - num * dden / (den * den);
}

double torus_rho_p(double p, double d1, double d2) {
  return std::pow(d1 * d1 + d2 * d2, p / 2.0);
}

double quad_torus_power(const CostSpec& spec, double delta, const ManifoldPoint& x,
                        const ManifoldPoint& y, int grad_axis) {
  int n = quad_resolution(spec);
  double step = kTwoPi / n;
  bool heat = spec.regularization == Regularization::HeatKernel;
  double sigma = std::sqrt(2.0 * delta);
  double rc = std::min(kPi, 6.0 * sigma);

  // Precompute 1D kernel rows over offsets from x along each axis (heat), or
  // evaluate the radial mollifier inside the loop.
  std::vector<double> k1(n), k2(n), dk1, dk2;
  if (grad_axis >= 0) {
    dk1.resize(n);
    dk2.resize(n);
  }
  for (int i = 0; i < n; ++i) {
    double u1 = angle_diff(x.coords[0], i * step);
    double u2 = angle_diff(x.coords[1], i * step);
    if (heat) {
      k1[i] = circle_heat(delta, u1, spec.heat.truncation);
      k2[i] = circle_heat(delta, u2, spec.heat.truncation);
      if (grad_axis >= 0) {
        dk1[i] = circle_heat_deriv(delta, u1, spec.heat.truncation);
        dk2[i] = circle_heat_deriv(delta, u2, spec.heat.truncation);
      }
    }
  }

  double num = 0.0, den = 0.0, dnum = 0.0, dden = 0.0;
  for (int i = 0; i < n; ++i) {
    double u1 = angle_diff(x.coords[0], i * step);
    for (int j = 0; j < n; ++j) {
      double u2 = angle_diff(x.coords[1], j * step);
      double k, dk = 0.0;
      if (heat) {
        k = k1[i] * k2[j];
        if (grad_axis == 0) dk = dk1[i] * k2[j];
        if (grad_axis == 1) dk = k1[i] * dk2[j];
      } else {
        double r2 = u1 * u1 + u2 * u2;
        if (r2 > rc * rc) continue;
        k = std::exp(-r2 / (4.0 * delta));
        if (grad_axis == 0) dk = -u1 / (2.0 * delta) * k;
        if (grad_axis == 1) dk = -u2 / (2.0 * delta) * k;
      }
      double d1 = angle_diff(i * step, y.coords[0]);
      double d2 = angle_diff(j * step, y.coords[1]);
      double t = torus_rho_p(spec.p, d1, d2);
      num += k * t;
      den += k;
      if (grad_axis >= 0) {
        dnum += dk * t;
        dden += dk;
      }
    }
  }
  if (grad_axis < 0) return num / den;
  return dnum / den - num * dden / (den * den);
}

void check_spec(const CostSpec& spec, const ManifoldPoint& x, const ManifoldPoint& y) {
  if (x.manifold_id != spec.manifold || y.manifold_id != spec.manifold)
    throw std::invalid_argument("cost: point manifold does not match the CostSpec");
  if (spec.kind == CostKind::PowerDistance) {
    if (spec.p <= 0.0) throw std::invalid_argument("cost: p must be positive");
  } else {
    if (spec.manifold != Manifold::Circle)
      throw std::invalid_argument("cost: Table costs are supported on the circle only");
    if (spec.table.n < 2 ||
        spec.table.values.size() != std::size_t(spec.table.n) * spec.table.n)
      throw std::invalid_argument("cost: malformed table");
  }
}

}  // namespace

int default_quadrature_resolution(Manifold m) {
  switch (m) {
    case Manifold::Circle: return 512;
    case Manifold::Torus2: return 64;
    case Manifold::Sphere2: return 96;
  }
  return 0;
}

CostSpec power_cost(Manifold m, double p, Regularization reg) {
  CostSpec spec;
  spec.manifold = m;
  spec.kind = CostKind::PowerDistance;
  spec.p = p;
  spec.regularization = reg;
  if (p <= 0.0) throw std::invalid_argument("cost: p must be positive");
  return spec;
}

CostSpec table_cost(CostTable table, Regularization reg) {
  CostSpec spec;
  spec.manifold = Manifold::Circle;
  spec.kind = CostKind::Table;
  spec.table = std::move(table);
  spec.regularization = reg;
  if (spec.table.n < 2 ||
      spec.table.values.size() != std::size_t(spec.table.n) * spec.table.n)
    throw std::invalid_argument("cost: malformed table");
  return spec;
}

CostTable load_cost_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IngestionError("cannot open cost table: " + path);
  std::string line;
  CostTable t;
  int row = 0, data_rows = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++row;
    std::size_t start = line.find_first_not_of(" \t\r");
    if (start == std::string::npos || line[start] == '#') continue;
    std::stringstream ss(line.substr(start));
    std::string cell;
    if (!have_header) {
      std::getline(ss, cell, ',');
      if (cell != "circle")
        throw ParseError("row " + std::to_string(row) + ": expected header 'circle,<n>'");
      std::getline(ss, cell, ',');
      t.n = std::stoi(cell);
      if (t.n < 2) throw ParseError("cost table resolution must be >= 2");
      t.values.reserve(std::size_t(t.n) * t.n);
      have_header = true;
      continue;
    }
    int cols = 0;
    while (std::getline(ss, cell, ',')) {
      try {
        t.values.push_back(std::stod(cell));
      } catch (const std::exception&) {
        throw ParseError("row " + std::to_string(row) + ": cannot parse '" + cell + "'");
      }
      ++cols;
    }
    if (cols != t.n)
      throw ParseError("row " + std::to_string(row) + ": expected " + std::to_string(t.n) +
                       " values");
    ++data_rows;
  }
  if (!have_header || data_rows != t.n)
    throw IngestionError("cost table is incomplete: " + path);
  return t;
}

double kappa(const CostSpec& spec, const ManifoldPoint& x, const ManifoldPoint& y) {
  check_spec(spec, x, y);
  if (spec.kind == CostKind::Table)
    return table_lookup(spec.table, x.coords[0], y.coords[0]);
  double d = dist(x, y);
  if (spec.p == 2.0) return d * d;
  if (spec.p == 1.0) return d;
  return std::pow(d, spec.p);
}

double heat_kernel(double delta, const ManifoldPoint& x, const ManifoldPoint& z,
                   HeatKernelParams params) {
  if (delta <= 0.0) throw std::invalid_argument("heat_kernel: delta must be positive");
  if (x.manifold_id != z.manifold_id)
    throw std::invalid_argument("heat_kernel: manifold mismatch");
  switch (x.manifold_id) {
    case Manifold::Circle:
      return circle_heat(delta, angle_diff(x.coords[0], z.coords[0]), params.truncation);
    case Manifold::Torus2:
      return circle_heat(delta, angle_diff(x.coords[0], z.coords[0]), params.truncation) *
             circle_heat(delta, angle_diff(x.coords[1], z.coords[1]), params.truncation);
    case Manifold::Sphere2: {
      double c = x.coords[0] * z.coords[0] + x.coords[1] * z.coords[1] +
                 x.coords[2] * z.coords[2];
      return sphere_heat(delta, std::clamp(c, -1.0, 1.0), params.truncation);
    }
  }
  throw std::invalid_argument("unknown manifold");
}

double kappa_delta(const CostSpec& spec, double delta, const ManifoldPoint& x,
                   const ManifoldPoint& y) {
  if (delta <= 0.0) throw std::invalid_argument("kappa_delta: delta must be positive");
  check_spec(spec, x, y);
  if (spec.kind == CostKind::Table)
    return quad_circle_table(spec, delta, x.coords[0], y.coords[0], false);
  switch (spec.manifold) {
    case Manifold::Circle:
      return cached_circle_profile(spec, delta).value(angle_diff(x.coords[0], y.coords[0]));
    case Manifold::Torus2: {
      if (spec.p == 2.0) {
        // rho^2 separates; smooth each angle with the circle profile.
        CostSpec circ = spec;
        circ.manifold = Manifold::Circle;
        const auto& prof = cached_circle_profile(circ, delta);
        return prof.value(angle_diff(x.coords[0], y.coords[0])) +
               prof.value(angle_diff(x.coords[1], y.coords[1]));
      }
      return quad_torus_power(spec, delta, x, y, -1);
    }
    case Manifold::Sphere2:
      return cached_sphere_profile(spec, delta).value(dist(x, y));
  }
  throw std::invalid_argument("unknown manifold");
}

TangentVector grad_kappa_delta(const CostSpec& spec, double delta, const ManifoldPoint& x,
                               const ManifoldPoint& y) {
  if (delta <= 0.0)
    throw std::invalid_argument("grad_kappa_delta: delta must be positive");
  check_spec(spec, x, y);
  TangentVector g;
  g.base = x;
  if (spec.kind == CostKind::Table) {
    g.components[0] = quad_circle_table(spec, delta, x.coords[0], y.coords[0], true);
    return g;
  }
  switch (spec.manifold) {
    case Manifold::Circle:
      g.components[0] =
          cached_circle_profile(spec, delta).deriv(angle_diff(x.coords[0], y.coords[0]));
      return g;
    case Manifold::Torus2: {
      if (spec.p == 2.0) {
        CostSpec circ = spec;
        circ.manifold = Manifold::Circle;
        const auto& prof = cached_circle_profile(circ, delta);
        g.components[0] = prof.deriv(angle_diff(x.coords[0], y.coords[0]));
        g.components[1] = prof.deriv(angle_diff(x.coords[1], y.coords[1]));
        return g;
      }
      g.components[0] = quad_torus_power(spec, delta, x, y, 0);
      g.components[1] = quad_torus_power(spec, delta, x, y, 1);
      return g;
    }
    case Manifold::Sphere2: {
      double gamma = dist(x, y);
      // The zonal profile is even about 0 and pi, so the gradient vanishes at
      // coincidence and at the antipode.
      if (gamma < 1e-14 || gamma > kPi - 1e-14) return g;
      double slope = cached_sphere_profile(spec, delta).deriv(gamma);
      auto u = log_map(x, y);  // |u| = gamma, direction of decreasing gamma
      g.components[0] = -slope * u.components[0] / gamma;
      g.components[1] = -slope * u.components[1] / gamma;
      return g;
    }
  }
  throw std::invalid_argument("unknown manifold");
}

double potential_U(const CostSpec& spec, double delta, const MeasureSpec& nu,
                   const ManifoldPoint& x) {
  if (nu.kind != MeasureKind::Atomic)
    throw std::invalid_argument("potential_U: measure must be reduced to finite atoms");
  if (nu.atoms.empty()) throw std::invalid_argument("potential_U: empty atom list");
  double acc = 0.0;
  for (std::size_t j = 0; j < nu.atoms.size(); ++j) {
    double k = delta > 0.0 ? kappa_delta(spec, delta, x, nu.atoms[j])
                           : kappa(spec, x, nu.atoms[j]);
    acc += nu.weights[j] * k;
  }
  return acc;
}

double CircleProfile::value(double d) const {
  double c1 = std::cos(d), s1 = std::sin(d);
  double ck = c1, sk = s1;
  double acc = coeff[0];
  for (std::size_t k = 1; k < coeff.size(); ++k) {
    acc += coeff[k] * ck;
    double cn = ck * c1 - sk * s1;
    sk = sk * c1 + ck * s1;
    ck = cn;
  }
  return acc;
}

double CircleProfile::deriv(double d) const {
  double c1 = std::cos(d), s1 = std::sin(d);
  double ck = c1, sk = s1;
  double acc = 0.0;
  for (std::size_t k = 1; k < coeff.size(); ++k) {
    acc -= double(k) * coeff[k] * sk;
    double cn = ck * c1 - sk * s1;
    sk = sk * c1 + ck * s1;
    ck = cn;
  }
  return acc;
}

CircleProfile circle_profile(const CostSpec& spec, double delta) {
  if (spec.manifold != Manifold::Circle || spec.kind != CostKind::PowerDistance)
    throw std::invalid_argument("circle_profile: PowerDistance on the circle only");
  if (delta <= 0.0) throw std::invalid_argument("circle_profile: delta must be positive");
  return cached_circle_profile(spec, delta);
}

}  // namespace manneal
