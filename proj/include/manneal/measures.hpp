#pragma once

#include <string>
#include <vector>

#include "manneal/geometry.hpp"
#include "manneal/rng.hpp"

namespace manneal {

enum class MeasureKind { Atomic, VonMises, WrappedGaussianMixture, UniformCap, FileEmpirical };

struct MixtureComponent {
  double mean;    // angle
  double sigma;   // standard deviation before wrapping
  double weight;
};

// Target measure specification. Only the fields of the active kind are
// meaningful. FileEmpirical resolves to Atomic via load_empirical.
struct MeasureSpec {
  Manifold manifold = Manifold::Circle;
  MeasureKind kind = MeasureKind::Atomic;

  // Atomic
  std::vector<ManifoldPoint> atoms;
  std::vector<double> weights;

  // VonMises (Circle)
  double location = 0.0;
  double concentration = 0.0;

  // WrappedGaussianMixture (Circle)
  std::vector<MixtureComponent> components;

  // UniformCap (Sphere2)
  ManifoldPoint cap_center;
  double cap_radius = 0.0;

  // FileEmpirical
  std::string path;

  std::vector<double> weight_cdf;  // filled by make_* helpers for Atomic
};

MeasureSpec atomic_measure(Manifold m, std::vector<ManifoldPoint> atoms,
                           std::vector<double> weights);
MeasureSpec von_mises_measure(double location, double concentration);
MeasureSpec wrapped_gaussian_mixture(std::vector<MixtureComponent> components);
MeasureSpec uniform_cap_measure(const ManifoldPoint& center, double radius);

// Reads one point per CSV row (coordinates in the manifold's convention,
// '#' lines ignored) and returns a uniform-weight Atomic measure.
MeasureSpec load_empirical(const std::string& path, Manifold m);

ManifoldPoint sample(const MeasureSpec& spec, RandomStream& rng);

// Checks structural invariants (weights normalized, atoms on-manifold);
// throws std::invalid_argument / ValidationError on violation.
void validate_measure(const MeasureSpec& spec);

}  // namespace manneal
