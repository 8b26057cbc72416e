#include "nesots/measure.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

namespace nesots {

namespace {

Vec uniform_direction(int dim, Rng& rng) {
  std::normal_distribution<double> normal;
  for (;;) {
    Vec v(dim);
    for (int i = 0; i < dim; ++i) v[i] = normal(rng);
    const double n = v.norm();
    if (n > 1e-12) return v / n;
  }
}

// Householder reflection carrying the last basis vector onto `target`.
Vec reflect_pole_to(const Vec& target, const Vec& x) {
  Vec pole = Vec::Zero(target.size());
  pole[pole.size() - 1] = 1.0;
  Vec u = pole - target;
  const double un = u.norm();
  if (un < 1e-14) return x;
  u /= un;
  return x - 2.0 * u.dot(x) * u;
}

// Radius in [0, max_r] with density proportional to f(r)^(d-1), where f is
// increasing on the interval (sin below pi/2, or sinh).
template <class F>
double sample_radius(int d, double max_r, F f, double f_max, Rng& rng) {
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  if (d == 1) return max_r * uni(rng);
  for (;;) {
    const double r = max_r * uni(rng);
    if (uni(rng) <= std::pow(f(r) / f_max, d - 1)) return r;
  }
}

std::size_t pick_component(const std::vector<double>& cumulative, Rng& rng) {
  std::uniform_real_distribution<double> uni(0.0, cumulative.back());
  const double u = uni(rng);
  const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
  return std::min<std::size_t>(static_cast<std::size_t>(it - cumulative.begin()),
                               cumulative.size() - 1);
}

}  // namespace

std::string to_string(Space s) {
  switch (s) {
    case Space::sphere: return "sphere";
    case Space::hyperbolic: return "hyperbolic";
    case Space::projective: return "projective";
  }
  return "unknown";
}

Space space_from_string(const std::string& s) {
  if (s == "sphere") return Space::sphere;
  if (s == "hyperbolic") return Space::hyperbolic;
  if (s == "projective") return Space::projective;
  throw GeometryError("unknown space '" + s + "'");
}

void validate(const DiscreteMeasure& m, double tol) {
  if (m.empty()) return;
  const auto dim = m.atoms[0].size();
  for (const Vec& a : m.atoms) {
    if (a.size() != dim) throw GeometryError("atoms have inconsistent dimensions");
    if (!a.allFinite()) throw GeometryError("atom has non-finite coordinates");
    if (m.space == Space::hyperbolic)
      hyper::require_on_manifold(a, tol);
    else
      sphere::require_on_manifold(a, tol);
  }
}

Rng derive_stream(std::uint64_t seed, std::uint64_t j, std::uint64_t l, std::uint64_t tag) {
  auto lo = [](std::uint64_t v) { return static_cast<std::uint32_t>(v); };
  auto hi = [](std::uint64_t v) { return static_cast<std::uint32_t>(v >> 32); };
  std::seed_seq seq{lo(seed), hi(seed), lo(j), hi(j), lo(l), hi(l), lo(tag), hi(tag)};
  return Rng(seq);
}

std::vector<int> subsample_indices(std::size_t m, std::size_t k, Rng& rng) {
  if (k > m) throw GeometryError("subsample size exceeds measure size");
  std::vector<int> idx(m);
  std::iota(idx.begin(), idx.end(), 0);
  // Partial Fisher-Yates.
  for (std::size_t i = 0; i < k; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, m - 1);
    std::swap(idx[i], idx[pick(rng)]);
  }
  idx.resize(k);
  return idx;
}

DiscreteMeasure subsample(const DiscreteMeasure& nu, std::size_t k, Rng& rng) {
  DiscreteMeasure out{nu.space, {}};
  out.atoms.reserve(k);
  for (int i : subsample_indices(nu.size(), k, rng)) out.atoms.push_back(nu.atoms[i]);
  return out;
}

DiscreteMeasure symmetrize_antipodal(const DiscreteMeasure& nu) {
  DiscreteMeasure out{nu.space, nu.atoms};
  out.atoms.reserve(2 * nu.size());
  for (const Vec& a : nu.atoms) out.atoms.push_back(-a);
  return out;
}

DiscreteMeasure uniform_sphere(int d, std::size_t m, Rng& rng) {
  DiscreteMeasure out{Space::sphere, {}};
  out.atoms.reserve(m);
  for (std::size_t i = 0; i < m; ++i) out.atoms.push_back(uniform_direction(d + 1, rng));
  return out;
}

DiscreteMeasure uniform_sphere_lattice(std::size_t m, Rng& rng) {
  // Random rotation: QR of a Gaussian matrix with the sign of R's diagonal
  // folded into Q.
  Eigen::Matrix3d g;
  std::normal_distribution<double> normal;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) g(i, j) = normal(rng);
  const Eigen::HouseholderQR<Eigen::Matrix3d> qr(g);
  Eigen::Matrix3d q = qr.householderQ();
  for (int i = 0; i < 3; ++i)
    if (qr.matrixQR()(i, i) < 0.0) q.col(i) *= -1.0;

  const double golden_angle = std::numbers::pi * (3.0 - std::sqrt(5.0));
  DiscreteMeasure out{Space::sphere, {}};
  out.atoms.reserve(m);
  for (std::size_t i = 0; i < m; ++i) {
    const double z = 1.0 - (2.0 * static_cast<double>(i) + 1.0) / static_cast<double>(m);
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double phi = golden_angle * static_cast<double>(i);
    out.atoms.push_back(Vec(q * Eigen::Vector3d(r * std::cos(phi), r * std::sin(phi), z)));
  }
  return out;
}

DiscreteMeasure uniform_cap(const Vec& axis, double max_angle, std::size_t m, Rng& rng) {
  const int d = static_cast<int>(axis.size()) - 1;
  const Vec a = axis.normalized();
  max_angle = std::clamp(max_angle, 0.0, std::numbers::pi);
  const double s_max = std::sin(std::min(max_angle, std::numbers::pi / 2));
  DiscreteMeasure out{Space::sphere, {}};
  out.atoms.reserve(m);
  for (std::size_t i = 0; i < m; ++i) {
    double r;
    if (max_angle <= std::numbers::pi / 2) {
      r = sample_radius(d, max_angle, [](double t) { return std::sin(t); }, s_max, rng);
    } else {
      // sin is not monotone past pi/2; plain rejection against sin <= 1.
      std::uniform_real_distribution<double> uni(0.0, 1.0);
      do { r = max_angle * uni(rng); } while (uni(rng) > std::pow(std::sin(r), d - 1));
    }
    Vec x(d + 1);
    x.head(d) = std::sin(r) * uniform_direction(d, rng);
    x[d] = std::cos(r);
    out.atoms.push_back(reflect_pole_to(a, x).normalized());
  }
  return out;
}

Vec sample_von_mises_fisher(const Vec& mean, double kappa, Rng& rng) {
  const int p = static_cast<int>(mean.size());
  const Vec mu = mean.normalized();
  if (kappa <= 0.0) return uniform_direction(p, rng);
  // Wood's rejection sampler for the cosine to the mean.
  const double pm1 = p - 1.0;
  const double b = (-2.0 * kappa + std::sqrt(4.0 * kappa * kappa + pm1 * pm1)) / pm1;
  const double x0 = (1.0 - b) / (1.0 + b);
  const double c = kappa * x0 + pm1 * std::log(1.0 - x0 * x0);
  std::gamma_distribution<double> gamma(pm1 / 2.0, 1.0);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  double w;
  for (;;) {
    const double g1 = gamma(rng), g2 = gamma(rng);
    const double z = g1 / (g1 + g2);
    w = (1.0 - (1.0 + b) * z) / (1.0 - (1.0 - b) * z);
    const double u = uni(rng);
    if (kappa * w + pm1 * std::log(1.0 - x0 * w) - c >= std::log(u)) break;
  }
  Vec x(p);
  x.head(p - 1) = std::sqrt(std::max(0.0, 1.0 - w * w)) * uniform_direction(p - 1, rng);
  x[p - 1] = w;
  return reflect_pole_to(mu, x).normalized();
}

DiscreteMeasure vmf_mixture(const std::vector<VonMisesFisher>& lobes, double uniform_weight,
                            std::size_t m, Rng& rng) {
  if (lobes.empty()) throw GeometryError("mixture needs at least one lobe");
  const int dim = static_cast<int>(lobes[0].mean.size());
  std::vector<double> cumulative;
  double acc = 0.0;
  for (const auto& l : lobes) cumulative.push_back(acc += l.weight);
  cumulative.push_back(acc += uniform_weight);
  DiscreteMeasure out{Space::sphere, {}};
  out.atoms.reserve(m);
  for (std::size_t i = 0; i < m; ++i) {
    const std::size_t k = pick_component(cumulative, rng);
    if (k == lobes.size())
      out.atoms.push_back(uniform_direction(dim, rng));
    else
      out.atoms.push_back(sample_von_mises_fisher(lobes[k].mean, lobes[k].kappa, rng));
  }
  return out;
}

namespace {

Vec hyper_ball_point(int d, double radius, Rng& rng) {
  const double r = sample_radius(d, radius, [](double t) { return std::sinh(t); },
                                 std::sinh(radius), rng);
  Vec x(d + 1);
  x.head(d) = std::sinh(r) * uniform_direction(d, rng);
  x[d] = std::cosh(r);
  return x;
}

}  // namespace

DiscreteMeasure uniform_hyper_patch(int d, double max_time, std::size_t m, Rng& rng) {
  if (max_time < 1.0) throw GeometryError("max_time must be >= 1");
  const double radius = std::acosh(max_time);
  DiscreteMeasure out{Space::hyperbolic, {}};
  out.atoms.reserve(m);
  for (std::size_t i = 0; i < m; ++i) out.atoms.push_back(hyper::normalize(hyper_ball_point(d, radius, rng)));
  return out;
}

DiscreteMeasure hyper_ball_mixture(const std::vector<HyperBall>& balls, std::size_t m, Rng& rng) {
  if (balls.empty()) throw GeometryError("mixture needs at least one ball");
  const int d = static_cast<int>(balls[0].center.size()) - 1;
  const Vec origin = hyper_origin(d);
  std::vector<double> cumulative;
  double acc = 0.0;
  for (const auto& b : balls) {
    hyper::require_on_manifold(b.center, 1e-6);
    cumulative.push_back(acc += b.weight);
  }
  DiscreteMeasure out{Space::hyperbolic, {}};
  out.atoms.reserve(m);
  for (std::size_t i = 0; i < m; ++i) {
    const auto& b = balls[pick_component(cumulative, rng)];
    const Vec local = hyper_ball_point(d, b.radius, rng);
    out.atoms.push_back(hyper::normalize(hyper::rotate_along_slice(origin, b.center, local).point));
  }
  return out;
}

}  // namespace nesots
