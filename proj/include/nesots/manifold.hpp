#pragma once

#include <Eigen/Dense>

#include <stdexcept>

namespace nesots {

using Vec = Eigen::VectorXd;

/// Raised when a point or vector violates the invariant of the space it is
/// claimed to live in, or when an operation is undefined for its inputs.
class GeometryError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Sum_{i<=d} x_i y_i - x_{d+1} y_{d+1}. Throws on length mismatch.
double lorentz_dot(const Vec& x, const Vec& y);

/// Model origin of the hyperboloid, (0, ..., 0, 1) in R^{d+1}.
Vec hyper_origin(int d);

namespace sphere {

inline constexpr double kUnitTolerance = 1e-9;

bool on_manifold(const Vec& x, double tol = kUnitTolerance);
void require_on_manifold(const Vec& x, double tol = kUnitTolerance);

/// Angle between unit vectors x and y, 2 atan2(|x - y|, |x + y|).
double dist(const Vec& x, const Vec& y);

/// cos|v| x + sin|v| v/|v|, renormalized. Returns x for |v| < 1e-14.
Vec exp(const Vec& x, const Vec& v);

/// Tangent vector at x pointing to y with norm dist(x, y).
/// Throws GeometryError("antipodal log undefined") when y == -x.
Vec log(const Vec& x, const Vec& y);

/// Projection of v onto the tangent space at x.
Vec to_tangent(const Vec& x, const Vec& v);

/// Result of applying the rotation that carries x to y inside span{x, y}.
struct Rotated {
  Vec point;
  bool degenerate = false;  ///< x == +-y; the identity was applied.
};

/// Rotation mapping x onto y in their common plane, applied to w. The
/// component of w orthogonal to span{x, y} is left unchanged.
Rotated rotate_along_slice(const Vec& x, const Vec& y, const Vec& w);

}  // namespace sphere

namespace hyper {

inline constexpr double kLorentzTolerance = 1e-9;

bool on_manifold(const Vec& x, double tol = kLorentzTolerance);
void require_on_manifold(const Vec& x, double tol = kLorentzTolerance);

/// Moves x back onto the upper sheet: x / sqrt(-<x,x>_L).
Vec normalize(const Vec& x);

/// Lorentz norm sqrt(<v,v>_L) of a tangent vector (clamped at zero).
double tangent_norm(const Vec& v);

/// Geodesic distance, 2 asinh(|x - y|_L / 2) for stability at short range.
double dist(const Vec& x, const Vec& y);

Vec exp(const Vec& x, const Vec& v);
Vec log(const Vec& x, const Vec& y);

/// Projection of v onto the Lorentz-orthogonal complement of x.
Vec to_tangent(const Vec& x, const Vec& v);

struct Rotated {
  Vec point;
  bool degenerate = false;  ///< no usable direction between x and y.
};

/// Hyperbolic rotation (boost) translating x to y along the geodesic through
/// the origin that contains both, applied to w. x and y must lie on a common
/// geodesic through the model origin, which is the case for projections on
/// a slice.
Rotated rotate_along_slice(const Vec& x, const Vec& y, const Vec& w);

}  // namespace hyper

}  // namespace nesots
