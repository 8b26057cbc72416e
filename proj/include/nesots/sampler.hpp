#pragma once

#include "nesots/measure.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace nesots {

enum class Pooling { mean, geometric_median };

std::string to_string(Pooling p);
Pooling pooling_from_string(const std::string& s);

class ConfigError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

struct SamplerConfig {
  std::size_t n = 1024;  ///< output sample count
  int K = 300;           ///< iterations
  int L = 32;            ///< slices per iteration
  double gamma0 = 1.0;   ///< initial step
  /// Per-iteration step multiplier. 0 selects 0.05^(1/K), so that the last
  /// step is about 5% of the first.
  double decay = 0.0;
  double tau = 1e-7;  ///< Weiszfeld stability term
  int p = 2;          ///< ground cost exponent, 1 or 2
  std::uint64_t seed = 1;
  Pooling pooling = Pooling::geometric_median;
  int max_slice_redraws = 32;
  /// Orthonormal matrix applied to every drawn slice. Running on a rotated
  /// target with the matching frame reproduces the rotated output.
  std::optional<Eigen::MatrixXd> frame;

  [[nodiscard]] double effective_decay() const;
  [[nodiscard]] double step(int iteration) const;
};

/// Throws ConfigError when cfg is inconsistent with a target of m atoms in
/// the given space (n <= m, 2n <= m for projective runs, ...).
void validate(const SamplerConfig& cfg, std::size_t m, Space space);

struct RunTrace {
  /// Mean over the iteration's slices of the optimal 1D cost per point
  /// between mu (before the update) and the projected quantiles of nu.
  std::vector<double> energy;
  std::vector<double> seconds;
};

struct RunResult {
  DiscreteMeasure samples;
  RunTrace trace;
};

/// Weiszfeld iteration from the origin with smoothed distances tau + |y - x_i|,
/// stopping when an update moves less than tau.
Vec geometric_median(std::span<const Vec> vectors, double tau, int max_iterations = 1000);
Vec geometric_median(const Eigen::Ref<const Eigen::MatrixXd>& columns, double tau,
                     int max_iterations = 1000);

/// Sliced optimal transport sampling of nu on S^d or H^d. The initial point
/// set is a uniform subsample of nu.
RunResult nesots_run(const DiscreteMeasure& nu, const SamplerConfig& cfg);

/// Same, starting from mu0 (cfg.n is ignored in favour of mu0.size()).
RunResult nesots_run(const DiscreteMeasure& mu0, const DiscreteMeasure& nu,
                     const SamplerConfig& cfg);

/// Sampling of P^d: n sign-free representatives on S^d optimized against an
/// antipodally symmetric target. Outputs live in Space::projective.
RunResult projective_run(const DiscreteMeasure& nu, const SamplerConfig& cfg);
RunResult projective_run(const DiscreteMeasure& mu0, const DiscreteMeasure& nu,
                         const SamplerConfig& cfg);

/// Flips each representative into the half-space whose first nonzero
/// coordinate is positive.
Vec canonical_sign(const Vec& x);

// Affine lines a x + b y + c = 0 encoded as points of P^2.

struct Line2 {
  double a = 0.0, b = 0.0, c = 0.0;
  /// Signed distance of (x, y) to the line.
  [[nodiscard]] double signed_distance(double x, double y) const;
};

Vec line_to_projective(const Line2& line);
Line2 projective_to_line(const Vec& coeffs);

/// Unit-normalized coefficients of each line; throws on a = b = 0.
DiscreteMeasure make_affine_line_measure(std::span<const Line2> lines);

// Unit quaternions (x, y, z, w) as rotations.

using Mat3 = Eigen::Matrix3d;

/// Rotation x -> q^{-1} x q, identical for q and -q.
Mat3 quaternion_to_rotation(const Vec& q);
Eigen::Vector3d rotate_by_quaternion(const Vec& q, const Eigen::Vector3d& x);

}  // namespace nesots
