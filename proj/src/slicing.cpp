#include "nesots/slicing.hpp"

#include <cmath>
#include <numbers>

namespace nesots {

namespace {

Vec gaussian_vector(Rng& rng, Eigen::Index size) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Vec v(size);
  for (Eigen::Index i = 0; i < size; ++i) v[i] = normal(rng);
  return v;
}

}  // namespace

SphereSlice sample_slice_sphere(Rng& rng, int d) {
  if (d < 1) throw GeometryError("slice dimension must be >= 1");
  for (;;) {
    Vec a = gaussian_vector(rng, d + 1);
    Vec b = gaussian_vector(rng, d + 1);
    const double an = a.norm();
    if (an < 1e-9) continue;
    a /= an;
    b -= a.dot(b) * a;
    const double bn = b.norm();
    if (bn < 1e-9) continue;
    b /= bn;
    // One more pass restores orthogonality lost to rounding.
    b -= a.dot(b) * a;
    b.normalize();
    return {std::move(a), std::move(b)};
  }
}

HyperSlice sample_slice_hyper(Rng& rng, int d) {
  if (d < 1) throw GeometryError("slice dimension must be >= 1");
  for (;;) {
    Vec v = gaussian_vector(rng, d);
    const double n = v.norm();
    if (n < 1e-9) continue;
    Vec dvec = Vec::Zero(d + 1);
    dvec.head(d) = v / n;
    return {std::move(dvec)};
  }
}

Vec project_sphere(const SphereSlice& s, const Vec& x) {
  const double a = s.e1.dot(x);
  const double b = s.e2.dot(x);
  const double n = std::hypot(a, b);
  if (n < 1e-12) throw OrthogonalToSlice();
  return (a / n) * s.e1 + (b / n) * s.e2;
}

Vec project_hyper(const HyperSlice& s, const Vec& x) {
  const Eigen::Index last = x.size() - 1;
  // Π(x) = <x,d> d + x_{d+1} x_O; its Lorentz norm is a^2 - t^2 < 0.
  const double a = s.dvec.dot(x);
  const double t = x[last];
  const double q = std::sqrt(std::max(t * t - a * a, 1e-300));
  Vec p = (a / q) * s.dvec;
  p[last] = t / q;
  return p;
}

double coord_sphere(const SphereSlice& s, const Vec& p) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double t = (std::numbers::pi + std::atan2(s.e2.dot(p), s.e1.dot(p))) / two_pi;
  if (t >= 1.0) t -= 1.0;
  if (t < 0.0) t = 0.0;
  return t;
}

double coord_hyper(const HyperSlice& s, const Vec& p) {
  const double a = s.dvec.dot(p);
  // For a point on the slice, p = sinh(r) d + cosh(r) x_O; asinh(<p,d>) is
  // the signed distance without the cancellation of arccosh near 0.
  return std::asinh(a);
}

}  // namespace nesots
