#include "nesots/manifold.hpp"

#include <algorithm>
#include <cmath>

namespace nesots {

namespace {

constexpr double kZeroTangent = 1e-14;

void require_same_size(const Vec& x, const Vec& y) {
  if (x.size() != y.size() || x.size() < 2)
    throw GeometryError("dimension mismatch");
}

}  // namespace

double lorentz_dot(const Vec& x, const Vec& y) {
  require_same_size(x, y);
  const Eigen::Index last = x.size() - 1;
  return x.head(last).dot(y.head(last)) - x[last] * y[last];
}

Vec hyper_origin(int d) {
  Vec o = Vec::Zero(d + 1);
  o[d] = 1.0;
  return o;
}

namespace sphere {

bool on_manifold(const Vec& x, double tol) {
  return x.size() >= 2 && std::abs(x.norm() - 1.0) <= tol;
}

void require_on_manifold(const Vec& x, double tol) {
  if (!on_manifold(x, tol)) throw GeometryError("point is not on the unit sphere");
}

double dist(const Vec& x, const Vec& y) {
  require_same_size(x, y);
  // Half-angle form; acos of the inner product loses digits near 0 and pi.
  return 2.0 * std::atan2((x - y).norm(), (x + y).norm());
}

Vec to_tangent(const Vec& x, const Vec& v) { return v - x.dot(v) * x; }

Vec exp(const Vec& x, const Vec& v) {
  require_same_size(x, v);
  const double n = v.norm();
  if (n < kZeroTangent) return x;
  Vec y = std::cos(n) * x + (std::sin(n) / n) * v;
  return y / y.norm();
}

Vec log(const Vec& x, const Vec& y) {
  require_same_size(x, y);
  const double c = std::clamp(x.dot(y), -1.0, 1.0);
  Vec t = y - c * x;
  const double tn = t.norm();
  if (tn < kZeroTangent) {
    if (c < 0.0) throw GeometryError("antipodal log undefined");
    return Vec::Zero(x.size());
  }
  // atan2 keeps full accuracy for nearby points, where acos loses digits.
  return (std::atan2(tn, c) / tn) * t;
}

Rotated rotate_along_slice(const Vec& x, const Vec& y, const Vec& w) {
  require_same_size(x, y);
  require_same_size(x, w);
  const double c = std::clamp(x.dot(y), -1.0, 1.0);
  Vec ty = y - c * x;
  const double tn = ty.norm();
  if (tn < kZeroTangent) return {w, true};
  ty /= tn;
  const double phi = std::atan2(tn, c);
  const double wx = w.dot(x);
  const double wy = w.dot(ty);
  const double cp = std::cos(phi), sp = std::sin(phi);
  Vec out = w - wx * x - wy * ty;
  out += (cp * wx - sp * wy) * x + (sp * wx + cp * wy) * ty;
  return {out, false};
}

}  // namespace sphere

namespace hyper {

bool on_manifold(const Vec& x, double tol) {
  if (x.size() < 2) return false;
  return std::abs(lorentz_dot(x, x) + 1.0) <= tol * std::max(1.0, x.squaredNorm()) &&
         x[x.size() - 1] >= 1.0 - tol;
}

void require_on_manifold(const Vec& x, double tol) {
  if (!on_manifold(x, tol)) throw GeometryError("point is not on the hyperboloid");
}

Vec normalize(const Vec& x) {
  const double q = -lorentz_dot(x, x);
  if (!(q > 0.0)) throw GeometryError("vector is not timelike");
  Vec y = x / std::sqrt(q);
  if (y[y.size() - 1] < 0.0) y = -y;
  return y;
}

double tangent_norm(const Vec& v) { return std::sqrt(std::max(0.0, lorentz_dot(v, v))); }

double dist(const Vec& x, const Vec& y) {
  // <x-y,x-y>_L = 4 sinh^2(d/2); better conditioned than acosh near 0.
  const Vec diff = x - y;
  return 2.0 * std::asinh(0.5 * std::sqrt(std::max(0.0, lorentz_dot(diff, diff))));
}

Vec to_tangent(const Vec& x, const Vec& v) {
  // <x,x>_L = -1, so removing the x-component is v + <x,v>_L x.
  return v + lorentz_dot(x, v) * x;
}

Vec exp(const Vec& x, const Vec& v) {
  require_same_size(x, v);
  const double n = tangent_norm(v);
  if (n < kZeroTangent) return x;
  return normalize(std::cosh(n) * x + (std::sinh(n) / n) * v);
}

Vec log(const Vec& x, const Vec& y) {
  const double a = lorentz_dot(x, y);
  Vec t = y + a * x;
  // Using the tangent residual norm instead of sqrt(a^2 - 1) avoids the
  // cancellation for nearby points; the two agree analytically.
  const double tn = tangent_norm(t);
  if (a * a - 1.0 < 1e-18 || tn < kZeroTangent) return Vec::Zero(x.size());
  return (std::asinh(tn) / tn) * t;
}

Rotated rotate_along_slice(const Vec& x, const Vec& y, const Vec& w) {
  require_same_size(x, y);
  require_same_size(x, w);
  const Eigen::Index last = x.size() - 1;
  Vec dir = y - x;
  dir[last] = 0.0;
  const double dn = dir.norm();
  if (dn < kZeroTangent) return {w, true};
  dir /= dn;
  const double phi = dist(x, y);
  const double wd = w.dot(dir);
  const double w0 = w[last];
  const double ch = std::cosh(phi), sh = std::sinh(phi);
  Vec out = w - wd * dir;
  out[last] = 0.0;
  out += (ch * wd + sh * w0) * dir;
  out[last] += sh * wd + ch * w0;
  return {out, false};
}

}  // namespace hyper

}  // namespace nesots
