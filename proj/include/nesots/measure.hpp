#pragma once

#include "nesots/manifold.hpp"
#include "nesots/slicing.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace nesots {

enum class Space { sphere, hyperbolic, projective };

std::string to_string(Space s);
Space space_from_string(const std::string& s);

/// Uniformly weighted atoms on S^d or H^d. Projective measures live on S^d
/// and are interpreted up to sign.
struct DiscreteMeasure {
  Space space = Space::sphere;
  std::vector<Vec> atoms;

  [[nodiscard]] std::size_t size() const { return atoms.size(); }
  [[nodiscard]] bool empty() const { return atoms.empty(); }
  /// Intrinsic dimension d (atoms have d + 1 coordinates).
  [[nodiscard]] int dim() const { return atoms.empty() ? 0 : static_cast<int>(atoms[0].size()) - 1; }
};

/// Throws GeometryError unless every atom satisfies the invariant of its space
/// within tol and all atoms share one dimension.
void validate(const DiscreteMeasure& m, double tol = 1e-9);

/// Generator for slice l of iteration j of a run seeded with seed. Each
/// (seed, j, l, tag) tuple yields an independent, reproducible stream.
Rng derive_stream(std::uint64_t seed, std::uint64_t j, std::uint64_t l, std::uint64_t tag = 0);

/// k distinct indices of [0, m) drawn uniformly without replacement.
std::vector<int> subsample_indices(std::size_t m, std::size_t k, Rng& rng);

DiscreteMeasure subsample(const DiscreteMeasure& nu, std::size_t k, Rng& rng);

/// Adds the antipode of every atom, making the measure antipodally symmetric.
DiscreteMeasure symmetrize_antipodal(const DiscreteMeasure& nu);

// Built-in target generators.

DiscreteMeasure uniform_sphere(int d, std::size_t m, Rng& rng);

/// Randomly rotated spherical Fibonacci lattice of m points on S^2: an
/// equal-area discretization of the uniform measure without the low
/// frequency fluctuations of i.i.d. atoms.
DiscreteMeasure uniform_sphere_lattice(std::size_t m, Rng& rng);

/// Uniform on {x in S^d : angle(x, axis) <= max_angle}.
DiscreteMeasure uniform_cap(const Vec& axis, double max_angle, std::size_t m, Rng& rng);

struct VonMisesFisher {
  Vec mean;
  double kappa = 1.0;
  double weight = 1.0;
};

Vec sample_von_mises_fisher(const Vec& mean, double kappa, Rng& rng);

/// Mixture of von Mises-Fisher lobes, optionally blended with a uniform
/// background of the given weight.
DiscreteMeasure vmf_mixture(const std::vector<VonMisesFisher>& lobes, double uniform_weight,
                            std::size_t m, Rng& rng);

/// Uniform (hyperbolic area) on {x in H^d : x_{d+1} <= max_time}.
DiscreteMeasure uniform_hyper_patch(int d, double max_time, std::size_t m, Rng& rng);

struct HyperBall {
  Vec center;
  double radius = 0.5;
  double weight = 1.0;
};

/// Mixture of uniform geodesic balls on H^d.
DiscreteMeasure hyper_ball_mixture(const std::vector<HyperBall>& balls, std::size_t m, Rng& rng);

}  // namespace nesots
