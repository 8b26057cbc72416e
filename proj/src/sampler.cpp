#include "nesots/sampler.hpp"

#include "nesots/ot1d.hpp"
#include "nesots/parallel.hpp"

#include <chrono>
#include <cmath>

namespace nesots {

namespace {

constexpr std::uint64_t kInitTag = 0x696e6974;  // "init"

// Directions proposed by one slice for every source point (columns), along
// with the optimal 1D cost per point on that slice.
struct SliceResult {
  Eigen::MatrixXd directions;
  double energy = 0.0;
};

Vec sphere_log_or_zero(const Vec& x, const Vec& y) {
  try {
    return sphere::log(x, y);
  } catch (const GeometryError&) {
    // Only reachable for an exact half-turn; such a displacement has no
    // well-defined direction and is dropped.
    return Vec::Zero(x.size());
  }
}

SphereSlice draw_sphere_slice(Rng& rng, int d, const SamplerConfig& cfg) {
  SphereSlice s = sample_slice_sphere(rng, d);
  if (cfg.frame) {
    s.e1 = *cfg.frame * s.e1;
    s.e2 = *cfg.frame * s.e2;
  }
  return s;
}

HyperSlice draw_hyper_slice(Rng& rng, int d, const SamplerConfig& cfg) {
  HyperSlice s = sample_slice_hyper(rng, d);
  if (cfg.frame) s.dvec = *cfg.frame * s.dvec;
  return s;
}

// Spherical slice. With `antipodal`, the source set is mu ∪ -mu (2n points,
// the copy of point i at index i + n).
SliceResult sphere_slice(const std::vector<Vec>& mu, bool antipodal, const DiscreteMeasure& nu,
                         const SamplerConfig& cfg, int iteration, int slice) {
  const std::size_t n = mu.size();
  const std::size_t ns = antipodal ? 2 * n : n;
  const int d = nu.dim();
  Rng rng = derive_stream(cfg.seed, static_cast<std::uint64_t>(iteration),
                          static_cast<std::uint64_t>(slice));
  const std::vector<int> picked = subsample_indices(nu.size(), ns, rng);

  auto source = [&](std::size_t i) -> Vec { return i < n ? mu[i] : Vec(-mu[i - n]); };

  std::vector<Vec> src_proj(ns), dst_proj(ns);
  std::vector<double> src_t(ns), dst_t(ns), all_t(nu.size());
  for (int attempt = 0;; ++attempt) {
    if (attempt > cfg.max_slice_redraws)
      throw GeometryError("point orthogonal to slice after repeated redraws");
    const SphereSlice s = draw_sphere_slice(rng, d, cfg);
    try {
      for (std::size_t i = 0; i < n; ++i) {
        src_proj[i] = project_sphere(s, mu[i]);
        src_t[i] = coord_sphere(s, src_proj[i]);
        if (antipodal) {
          src_proj[i + n] = -src_proj[i];
          src_t[i + n] = coord_sphere(s, src_proj[i + n]);
        }
      }
      for (std::size_t i = 0; i < ns; ++i) {
        dst_proj[i] = project_sphere(s, nu.atoms[picked[i]]);
        dst_t[i] = coord_sphere(s, dst_proj[i]);
      }
      for (std::size_t k = 0; k < all_t.size(); ++k) all_t[k] = coord_sphere(s, project_sphere(s, nu.atoms[k]));
      break;
    } catch (const OrthogonalToSlice&) {
      continue;
    }
  }

  const Assignment plan = solve_circle(src_t, dst_t, cfg.p);
  SliceResult r;
  r.directions.resize(d + 1, static_cast<Eigen::Index>(ns));
  for (std::size_t i = 0; i < ns; ++i) {
    const Vec x = source(i);
    const Vec g = sphere::rotate_along_slice(src_proj[i], dst_proj[plan.perm[i]], x).point;
    r.directions.col(static_cast<Eigen::Index>(i)) = sphere_log_or_zero(x, g);
  }
  // The reported energy compares against all of nu, reduced to quantiles,
  // rather than the random subsample used for the update.
  const std::vector<double> q = quantile_reduce(std::move(all_t), ns);
  r.energy = circle_cost(src_t, q, solve_circle(src_t, q, cfg.p), cfg.p) / static_cast<double>(ns);
  return r;
}

SliceResult hyper_slice(const std::vector<Vec>& mu, const DiscreteMeasure& nu,
                        const SamplerConfig& cfg, int iteration, int slice) {
  const std::size_t n = mu.size();
  const int d = nu.dim();
  Rng rng = derive_stream(cfg.seed, static_cast<std::uint64_t>(iteration),
                          static_cast<std::uint64_t>(slice));
  const std::vector<int> picked = subsample_indices(nu.size(), n, rng);
  const HyperSlice s = draw_hyper_slice(rng, d, cfg);

  std::vector<Vec> src_proj(n), dst_proj(n);
  std::vector<double> src_t(n), dst_t(n), all_t(nu.size());
  for (std::size_t k = 0; k < all_t.size(); ++k) all_t[k] = coord_hyper(s, project_hyper(s, nu.atoms[k]));
  for (std::size_t i = 0; i < n; ++i) {
    src_proj[i] = project_hyper(s, mu[i]);
    src_t[i] = coord_hyper(s, src_proj[i]);
    dst_proj[i] = project_hyper(s, nu.atoms[picked[i]]);
    dst_t[i] = coord_hyper(s, dst_proj[i]);
  }
  const Assignment plan = solve_line(src_t, dst_t);
  SliceResult r;
  r.directions.resize(d + 1, static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    const Vec g = hyper::rotate_along_slice(src_proj[i], dst_proj[plan.perm[i]], mu[i]).point;
    r.directions.col(static_cast<Eigen::Index>(i)) = hyper::log(mu[i], g);
  }
  const std::vector<double> q = quantile_reduce(std::move(all_t), n);
  r.energy = line_cost(src_t, q, solve_line(src_t, q), cfg.p) / static_cast<double>(n);
  return r;
}

Vec pool(const Eigen::MatrixXd& columns, const SamplerConfig& cfg) {
  if (cfg.pooling == Pooling::mean) return columns.rowwise().mean();
  return geometric_median(columns, cfg.tau);
}

RunResult run(const DiscreteMeasure& mu0, const DiscreteMeasure& nu, const SamplerConfig& cfg,
              Space space) {
  const bool projective = space == Space::projective;
  SamplerConfig local = cfg;
  local.n = mu0.size();
  validate(local, nu.size(), space);
  validate(nu);
  if (mu0.dim() != nu.dim()) throw ConfigError("initial set and target differ in dimension");
  const bool hyperbolic = space == Space::hyperbolic;
  if (hyperbolic != (nu.space == Space::hyperbolic) || hyperbolic != (mu0.space == Space::hyperbolic))
    throw ConfigError("initial set and target live in different spaces");
  validate(mu0);

  std::vector<Vec> mu = mu0.atoms;
  const std::size_t n = mu.size();
  const int d = nu.dim();
  const auto L = static_cast<std::size_t>(cfg.L);
  RunResult result;
  std::vector<SliceResult> slices(L);

  for (int j = 0; j < cfg.K; ++j) {
    const auto start = std::chrono::steady_clock::now();
    parallel_for(L, [&](std::size_t l) {
      slices[l] = hyperbolic ? hyper_slice(mu, nu, cfg, j, static_cast<int>(l))
                             : sphere_slice(mu, projective, nu, cfg, j, static_cast<int>(l));
    });

    const double gamma = cfg.step(j);
    const std::size_t per_point = projective ? 2 * L : L;
    Eigen::MatrixXd gathered(d + 1, static_cast<Eigen::Index>(per_point));
    for (std::size_t i = 0; i < n; ++i) {
      const auto col = static_cast<Eigen::Index>(i);
      for (std::size_t l = 0; l < L; ++l) {
        gathered.col(static_cast<Eigen::Index>(l)) = slices[l].directions.col(col);
        // The antipodal copy moves in the opposite direction of the same
        // tangent plane.
        if (projective)
          gathered.col(static_cast<Eigen::Index>(L + l)) =
              -slices[l].directions.col(col + static_cast<Eigen::Index>(n));
      }
      const Vec dir = pool(gathered, cfg);
      if (hyperbolic)
        mu[i] = hyper::exp(mu[i], hyper::to_tangent(mu[i], gamma * dir));
      else
        mu[i] = sphere::exp(mu[i], sphere::to_tangent(mu[i], gamma * dir));
    }

    double energy = 0.0;
    for (const auto& s : slices) energy += s.energy;
    result.trace.energy.push_back(energy / static_cast<double>(L));
    result.trace.seconds.push_back(
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
  }
  result.samples = DiscreteMeasure{space, std::move(mu)};
  return result;
}

DiscreteMeasure initial_subsample(const DiscreteMeasure& nu, const SamplerConfig& cfg) {
  if (cfg.n > nu.size()) throw ConfigError("n must not exceed the number of target atoms");
  Rng rng = derive_stream(cfg.seed, 0, 0, kInitTag);
  return subsample(nu, cfg.n, rng);
}

}  // namespace

std::string to_string(Pooling p) { return p == Pooling::mean ? "mean" : "median"; }

Pooling pooling_from_string(const std::string& s) {
  if (s == "mean") return Pooling::mean;
  if (s == "median" || s == "geometric-median") return Pooling::geometric_median;
  throw ConfigError("unknown pooling '" + s + "'");
}

double SamplerConfig::effective_decay() const {
  if (decay > 0.0) return decay;
  return std::pow(0.05, 1.0 / std::max(1, K));
}

double SamplerConfig::step(int iteration) const {
  return gamma0 * std::pow(effective_decay(), iteration);
}

void validate(const SamplerConfig& cfg, std::size_t m, Space space) {
  if (cfg.n < 1) throw ConfigError("n must be >= 1");
  if (m < 1) throw ConfigError("target measure is empty");
  if (cfg.n > m) throw ConfigError("n must not exceed m");
  if (space == Space::projective && 2 * cfg.n > m)
    throw ConfigError("projective sampling requires 2n <= m");
  if (cfg.K < 0 || cfg.L < 1) throw ConfigError("K must be >= 0 and L >= 1");
  if (!(cfg.gamma0 > 0.0)) throw ConfigError("gamma0 must be positive");
  if (cfg.decay < 0.0 || cfg.decay > 1.0) throw ConfigError("decay must lie in (0, 1]");
  if (!(cfg.tau > 0.0)) throw ConfigError("tau must be positive");
  if (cfg.p != 1 && cfg.p != 2) throw ConfigError("p must be 1 or 2");
}

Vec geometric_median(const Eigen::Ref<const Eigen::MatrixXd>& x, double tau, int max_iterations) {
  if (x.cols() == 0) throw GeometryError("geometric median of an empty set");
  if (x.cols() == 1) return x.col(0);
  Vec y = Vec::Zero(x.rows());
  Vec next(x.rows());
  for (int it = 0; it < max_iterations; ++it) {
    double wsum = 0.0;
    next.setZero();
    for (Eigen::Index i = 0; i < x.cols(); ++i) {
      const double w = 1.0 / (tau + (y - x.col(i)).norm());
      wsum += w;
      next += w * x.col(i);
    }
    next /= wsum;
    const double moved = (y - next).norm();
    y = next;
    if (moved <= tau) break;
  }
  return y;
}

Vec geometric_median(std::span<const Vec> vectors, double tau, int max_iterations) {
  if (vectors.empty()) throw GeometryError("geometric median of an empty set");
  Eigen::MatrixXd m(vectors[0].size(), static_cast<Eigen::Index>(vectors.size()));
  for (std::size_t i = 0; i < vectors.size(); ++i) m.col(static_cast<Eigen::Index>(i)) = vectors[i];
  return geometric_median(m, tau, max_iterations);
}

RunResult nesots_run(const DiscreteMeasure& nu, const SamplerConfig& cfg) {
  if (nu.space == Space::projective) throw ConfigError("use projective_run for P^d targets");
  return nesots_run(initial_subsample(nu, cfg), nu, cfg);
}

RunResult nesots_run(const DiscreteMeasure& mu0, const DiscreteMeasure& nu,
                     const SamplerConfig& cfg) {
  return run(mu0, nu, cfg, nu.space == Space::hyperbolic ? Space::hyperbolic : Space::sphere);
}

RunResult projective_run(const DiscreteMeasure& nu, const SamplerConfig& cfg) {
  if (nu.space == Space::hyperbolic) throw ConfigError("projective targets live on the sphere");
  validate(cfg, nu.size(), Space::projective);
  DiscreteMeasure mu0 = initial_subsample(nu, cfg);
  mu0.space = Space::projective;
  return projective_run(mu0, nu, cfg);
}

RunResult projective_run(const DiscreteMeasure& mu0, const DiscreteMeasure& nu,
                         const SamplerConfig& cfg) {
  return run(mu0, nu, cfg, Space::projective);
}

Vec canonical_sign(const Vec& x) {
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (std::abs(x[i]) > 1e-12) return x[i] < 0.0 ? Vec(-x) : x;
  }
  return x;
}

double Line2::signed_distance(double x, double y) const {
  return (a * x + b * y + c) / std::hypot(a, b);
}

Vec line_to_projective(const Line2& line) {
  if (std::hypot(line.a, line.b) < 1e-14) throw GeometryError("degenerate line (a = b = 0)");
  Vec v(3);
  v << line.a, line.b, line.c;
  return v / v.norm();
}

Line2 projective_to_line(const Vec& coeffs) {
  if (coeffs.size() != 3) throw GeometryError("line coefficients need three entries");
  return {coeffs[0], coeffs[1], coeffs[2]};
}

DiscreteMeasure make_affine_line_measure(std::span<const Line2> lines) {
  DiscreteMeasure out{Space::projective, {}};
  out.atoms.reserve(lines.size());
  for (const Line2& l : lines) out.atoms.push_back(line_to_projective(l));
  return out;
}

namespace {

Eigen::Vector4d hamilton(const Eigen::Vector4d& p, const Eigen::Vector4d& q) {
  // (x, y, z, w) layout.
  const Eigen::Vector3d pv = p.head<3>(), qv = q.head<3>();
  Eigen::Vector4d r;
  r.head<3>() = p[3] * qv + q[3] * pv + pv.cross(qv);
  r[3] = p[3] * q[3] - pv.dot(qv);
  return r;
}

}  // namespace

Eigen::Vector3d rotate_by_quaternion(const Vec& q, const Eigen::Vector3d& x) {
  if (q.size() != 4) throw GeometryError("quaternion needs four components");
  const Eigen::Vector4d qq = Eigen::Vector4d(q).normalized();
  Eigen::Vector4d inv = -qq;
  inv[3] = qq[3];
  Eigen::Vector4d xt;
  xt << x, 0.0;
  return hamilton(hamilton(inv, xt), qq).head<3>();
}

Mat3 quaternion_to_rotation(const Vec& q) {
  Mat3 r;
  for (int c = 0; c < 3; ++c) r.col(c) = rotate_by_quaternion(q, Eigen::Vector3d::Unit(c));
  return r;
}

}  // namespace nesots
