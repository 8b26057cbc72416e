#include "nesots/analysis.hpp"

#include "nesots/ot1d.hpp"
#include "nesots/parallel.hpp"
#include "nesots/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <queue>
#include <unordered_map>

namespace nesots {

namespace {

constexpr std::uint64_t kProbeTag = 0x70726f6265;  // "probe"

DiscreteMeasure doubled(const DiscreteMeasure& m) {
  DiscreteMeasure out = symmetrize_antipodal(m);
  out.space = Space::sphere;
  return out;
}

}  // namespace

std::vector<double> sw_slice_costs(const DiscreteMeasure& mu_in, const DiscreteMeasure& nu_in, int probes,
                                   int p, std::uint64_t seed) {
  if (mu_in.empty() || nu_in.empty()) throw ConfigError("sw_energy needs nonempty measures");
  if (probes < 1) throw ConfigError("sw_energy needs at least one probe slice");
  if (p != 1 && p != 2) throw ConfigError("p must be 1 or 2");
  const bool projective = mu_in.space == Space::projective || nu_in.space == Space::projective;
  const DiscreteMeasure mu = projective ? doubled(mu_in) : mu_in;
  const DiscreteMeasure nu = projective ? doubled(nu_in) : nu_in;
  if (mu.dim() != nu.dim()) throw ConfigError("measures differ in dimension");
  if ((mu.space == Space::hyperbolic) != (nu.space == Space::hyperbolic))
    throw ConfigError("measures live in different spaces");
  if (mu.size() > nu.size()) throw ConfigError("sw_energy needs |mu| <= |nu|");

  const std::size_t n = mu.size();
  const int d = mu.dim();
  std::vector<double> costs(static_cast<std::size_t>(probes));
  parallel_for(costs.size(), [&](std::size_t l) {
    Rng rng = derive_stream(seed, l, 0, kProbeTag);
    std::vector<double> src(n), all(nu.size());
    if (mu.space == Space::hyperbolic) {
      const HyperSlice s = sample_slice_hyper(rng, d);
      for (std::size_t i = 0; i < n; ++i) src[i] = coord_hyper(s, project_hyper(s, mu.atoms[i]));
      for (std::size_t i = 0; i < all.size(); ++i) all[i] = coord_hyper(s, project_hyper(s, nu.atoms[i]));
      const std::vector<double> dst = quantile_reduce(std::move(all), n);
      costs[l] = line_cost(src, dst, solve_line(src, dst), p) / static_cast<double>(n);
      return;
    }
    for (;;) {
      const SphereSlice s = sample_slice_sphere(rng, d);
      try {
        for (std::size_t i = 0; i < n; ++i) src[i] = coord_sphere(s, project_sphere(s, mu.atoms[i]));
        for (std::size_t i = 0; i < all.size(); ++i)
          all[i] = coord_sphere(s, project_sphere(s, nu.atoms[i]));
      } catch (const OrthogonalToSlice&) {
        continue;
      }
      break;
    }
    const std::vector<double> dst = quantile_reduce(std::move(all), n);
    costs[l] = circle_cost(src, dst, solve_circle(src, dst, p), p) / static_cast<double>(n);
  });
  return costs;
}

double sw_energy(const DiscreteMeasure& mu, const DiscreteMeasure& nu, int probes, int p,
                 std::uint64_t seed) {
  const std::vector<double> c = sw_slice_costs(mu, nu, probes, p, seed);
  double s = 0.0;
  for (double v : c) s += v;
  return s / static_cast<double>(c.size());
}

SpectrumReport sphere_power_spectrum(const std::vector<Vec>& points, int lmax) {
  if (points.empty()) throw ConfigError("spectrum of an empty point set");
  if (lmax < 0) throw ConfigError("lmax must be >= 0");
  const int nl = lmax + 1;
  // Sums of fully normalized P_l^m(cos theta) cos(m phi) and sin(m phi),
  // indexed [l * nl + m].
  std::vector<double> sc(static_cast<std::size_t>(nl * nl), 0.0), ss(sc.size(), 0.0);
  std::vector<double> plm(sc.size());
  for (const Vec& x : points) {
    if (x.size() != 3) throw ConfigError("spectrum expects points on S^2");
    const Vec u = x.normalized();
    const double z = std::clamp(u[2], -1.0, 1.0);
    const double st = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double phi = std::atan2(u[1], u[0]);

    plm[0] = std::sqrt(1.0 / (4.0 * std::numbers::pi));
    for (int m = 1; m <= lmax; ++m)
      plm[m * nl + m] = -std::sqrt((2.0 * m + 1.0) / (2.0 * m)) * st * plm[(m - 1) * nl + (m - 1)];
    for (int m = 0; m < lmax; ++m) plm[(m + 1) * nl + m] = std::sqrt(2.0 * m + 3.0) * z * plm[m * nl + m];
    for (int m = 0; m <= lmax; ++m)
      for (int l = m + 2; l <= lmax; ++l) {
        const double a = std::sqrt((4.0 * l * l - 1.0) / (static_cast<double>(l) * l - m * m));
        const double b = std::sqrt(((l - 1.0) * (l - 1.0) - m * m) / (4.0 * (l - 1.0) * (l - 1.0) - 1.0));
        plm[l * nl + m] = a * (z * plm[(l - 1) * nl + m] - b * plm[(l - 2) * nl + m]);
      }
    for (int m = 0; m <= lmax; ++m) {
      const double c = std::cos(m * phi), s = std::sin(m * phi);
      for (int l = m; l <= lmax; ++l) {
        sc[l * nl + m] += plm[l * nl + m] * c;
        ss[l * nl + m] += plm[l * nl + m] * s;
      }
    }
  }
  SpectrumReport rep;
  rep.power.resize(static_cast<std::size_t>(nl));
  const double n = static_cast<double>(points.size());
  for (int l = 0; l <= lmax; ++l) {
    // Real harmonics sqrt(2) P cos, sqrt(2) P sin for m > 0.
    double sum = sc[l * nl] * sc[l * nl];
    for (int m = 1; m <= l; ++m) sum += 2.0 * (sc[l * nl + m] * sc[l * nl + m] + ss[l * nl + m] * ss[l * nl + m]);
    rep.power[l] = 4.0 * std::numbers::pi * sum / (n * (2.0 * l + 1.0));
  }
  return rep;
}

double mean_power(const SpectrumReport& s, int lo, int hi) {
  double sum = 0.0;
  for (int l = lo; l <= hi; ++l) sum += s.power.at(static_cast<std::size_t>(l));
  return sum / (hi - lo + 1);
}

PcfReport pair_correlation(const std::vector<double>& pair_distances, std::size_t num_points, double rmax,
                           const std::vector<double>& uniform_fraction) {
  if (!(rmax > 0.0)) throw ConfigError("rmax must be positive");
  if (num_points < 2) throw ConfigError("pair correlation needs at least two points");
  const int bins = static_cast<int>(uniform_fraction.size());
  if (bins < 1) throw ConfigError("pair correlation needs at least one bin");
  PcfReport rep;
  rep.bin_width = rmax / bins;
  rep.counts.assign(static_cast<std::size_t>(bins), 0);
  for (double d : pair_distances) {
    if (d < 0.0 || d > rmax) continue;
    rep.counts[std::min(bins - 1, static_cast<int>(d / rep.bin_width))]++;
  }
  const double pairs = 0.5 * static_cast<double>(num_points) * static_cast<double>(num_points - 1);
  for (int b = 0; b < bins; ++b) {
    rep.centers.push_back((b + 0.5) * rep.bin_width);
    const double expected = pairs * uniform_fraction[b];
    rep.g.push_back(expected > 0.0 ? static_cast<double>(rep.counts[b]) / expected : 0.0);
  }
  return rep;
}

std::vector<double> sphere_pair_fraction(double rmax, int bins) {
  if (!(rmax > 0.0)) throw ConfigError("rmax must be positive");
  std::vector<double> f(static_cast<std::size_t>(bins));
  const double w = rmax / bins;
  for (int b = 0; b < bins; ++b) {
    const double lo = std::min(b * w, std::numbers::pi), hi = std::min((b + 1) * w, std::numbers::pi);
    f[b] = 0.5 * (std::cos(lo) - std::cos(hi));
  }
  return f;
}

std::vector<double> empirical_pair_fraction(const std::vector<double>& reference, double rmax, int bins) {
  if (!(rmax > 0.0)) throw ConfigError("rmax must be positive");
  if (reference.empty()) throw ConfigError("empty reference distance set");
  std::vector<double> f(static_cast<std::size_t>(bins), 0.0);
  const double w = rmax / bins;
  for (double d : reference)
    if (d >= 0.0 && d <= rmax) f[std::min(bins - 1, static_cast<int>(d / w))] += 1.0;
  for (double& v : f) v /= static_cast<double>(reference.size());
  return f;
}

namespace {

double point_distance(Space space, const Vec& a, const Vec& b) {
  switch (space) {
    case Space::hyperbolic: return hyper::dist(a, b);
    case Space::projective: return std::min(sphere::dist(a, b), sphere::dist(a, -b));
    case Space::sphere: break;
  }
  return sphere::dist(a, b);
}

}  // namespace

std::vector<double> pairwise_distances(const DiscreteMeasure& points) {
  std::vector<double> out;
  const std::size_t n = points.size();
  out.reserve(n * (n - 1) / 2);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) out.push_back(point_distance(points.space, points.atoms[i], points.atoms[j]));
  return out;
}

double min_pairwise_distance(const DiscreteMeasure& points) {
  if (points.size() < 2) throw ConfigError("minimum distance needs at least two points");
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < points.size(); ++i)
    for (std::size_t j = i + 1; j < points.size(); ++j)
      best = std::min(best, point_distance(points.space, points.atoms[i], points.atoms[j]));
  return best;
}

Eigen::MatrixXd mesh_geodesic_distances(const TriMesh& mesh, const std::vector<MeshSample>& sources,
                                        const std::vector<MeshSample>& targets) {
  const int nv = mesh.num_vertices();
  std::vector<const MeshSample*> samples;
  for (const auto& s : sources) samples.push_back(&s);
  for (const auto& s : targets) samples.push_back(&s);
  const int total = nv + static_cast<int>(samples.size());

  std::vector<std::vector<std::pair<int, double>>> adj(static_cast<std::size_t>(total));
  auto link = [&](int a, int b, double w) {
    adj[a].emplace_back(b, w);
    adj[b].emplace_back(a, w);
  };
  const EdgeTable edges = build_edges(mesh);
  for (const auto& e : edges.ends) link(e[0], e[1], (mesh.vertices[e[0]] - mesh.vertices[e[1]]).norm());

  std::unordered_map<int, std::vector<int>> by_face;
  for (int k = 0; k < static_cast<int>(samples.size()); ++k) {
    const MeshSample& s = *samples[k];
    if (s.face < 0 || s.face >= mesh.num_faces()) throw MeshError("sample references a missing face");
    const int node = nv + k;
    for (int v : mesh.faces[s.face]) link(node, v, (s.position - mesh.vertices[v]).norm());
    for (int other : by_face[s.face]) link(node, nv + other, (s.position - samples[other]->position).norm());
    by_face[s.face].push_back(k);
  }

  const int ns = static_cast<int>(sources.size());
  Eigen::MatrixXd out(ns, static_cast<Eigen::Index>(targets.size()));
  parallel_for(static_cast<std::size_t>(ns), [&](std::size_t si) {
    std::vector<double> dist(static_cast<std::size_t>(total), std::numeric_limits<double>::infinity());
    using Item = std::pair<double, int>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
    const int start = nv + static_cast<int>(si);
    dist[start] = 0.0;
    heap.emplace(0.0, start);
    while (!heap.empty()) {
      const auto [d, u] = heap.top();
      heap.pop();
      if (d > dist[u]) continue;
      for (const auto& [v, w] : adj[u])
        if (d + w < dist[v]) {
          dist[v] = d + w;
          heap.emplace(dist[v], v);
        }
    }
    for (std::size_t t = 0; t < targets.size(); ++t) {
      const double d = dist[nv + ns + t];
      if (!std::isfinite(d)) throw MeshError("mesh is disconnected");
      out(static_cast<Eigen::Index>(si), static_cast<Eigen::Index>(t)) = d;
    }
  });
  return out;
}

std::vector<double> mesh_pair_distances(const TriMesh& mesh, const std::vector<MeshSample>& samples) {
  const Eigen::MatrixXd d = mesh_geodesic_distances(mesh, samples, samples);
  std::vector<double> out;
  out.reserve(samples.size() * (samples.size() - 1) / 2);
  for (Eigen::Index i = 0; i < d.rows(); ++i)
    for (Eigen::Index j = i + 1; j < d.cols(); ++j) out.push_back(0.5 * (d(i, j) + d(j, i)));
  return out;
}

DiscreteMeasure white_noise_sphere(int d, std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  return uniform_sphere(d, n, rng);
}

}  // namespace nesots
