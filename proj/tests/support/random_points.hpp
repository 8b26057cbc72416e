#pragma once

#include <nesots/manifold.hpp>
#include <nesots/slicing.hpp>

#include <random>

namespace nesots::testing {

inline Vec random_gaussian(int size, Rng& rng) {
  std::normal_distribution<double> normal;
  Vec v(size);
  for (int i = 0; i < size; ++i) v[i] = normal(rng);
  return v;
}

inline Vec random_sphere_point(int d, Rng& rng) { return random_gaussian(d + 1, rng).normalized(); }

/// Point on H^d at a random distance in [0, max_radius] from the origin.
inline Vec random_hyper_point(int d, Rng& rng, double max_radius = 3.0) {
  std::uniform_real_distribution<double> uni(0.0, max_radius);
  const double r = uni(rng);
  Vec x(d + 1);
  x.head(d) = std::sinh(r) * random_gaussian(d, rng).normalized();
  x[d] = std::cosh(r);
  return x;
}

inline Vec random_sphere_tangent(const Vec& x, Rng& rng, double scale = 1.0) {
  Vec v = random_gaussian(static_cast<int>(x.size()), rng);
  return scale * (v - x.dot(v) * x);
}

/// Tangent vector at x with Minkowski norm uniform in [0, 2 scale].
inline Vec random_hyper_tangent(const Vec& x, Rng& rng, double scale = 1.0) {
  const Vec v = hyper::to_tangent(x, random_gaussian(static_cast<int>(x.size()), rng));
  std::uniform_real_distribution<double> uni(0.0, 2.0 * scale);
  return (uni(rng) / hyper::tangent_norm(v)) * v;
}

/// Random rotation of R^{dim} (QR of a Gaussian matrix, sign-corrected).
inline Eigen::MatrixXd random_rotation(int dim, Rng& rng) {
  Eigen::MatrixXd g(dim, dim);
  std::normal_distribution<double> normal;
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) g(i, j) = normal(rng);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  Eigen::MatrixXd q = qr.householderQ();
  const Eigen::MatrixXd r = qr.matrixQR();
  for (int i = 0; i < dim; ++i)
    if (r(i, i) < 0) q.col(i) *= -1.0;
  if (q.determinant() < 0) q.col(0) *= -1.0;
  return q;
}

}  // namespace nesots::testing
