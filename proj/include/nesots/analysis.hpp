#pragma once

#include "nesots/measure.hpp"
#include "nesots/mesh.hpp"

#include <cstdint>
#include <vector>

namespace nesots {

/// Monte Carlo sliced Wasserstein energy SW_p^p(mu, nu): the mean over probe
/// slices of the optimal 1D cost per point (circle on S^d, line on H^d).
/// On every slice nu is reduced to |mu| atoms by taking the projected
/// quantiles floor((i + 1/2) m / n) of its sorted coordinates. Projective
/// measures are compared through their antipodal doubles. Probe streams use
/// their own tag and never coincide with the sampler's.
double sw_energy(const DiscreteMeasure& mu, const DiscreteMeasure& nu, int probes, int p,
                 std::uint64_t seed);

/// Per-slice values behind sw_energy, for diagnostics and tests.
std::vector<double> sw_slice_costs(const DiscreteMeasure& mu, const DiscreteMeasure& nu, int probes,
                                   int p, std::uint64_t seed);

struct SpectrumReport {
  std::vector<double> power;  ///< index l in [0, lmax]
};

/// Angular power of points on S^2 from real spherical harmonics:
///   power[l] = 4 pi / (n (2l + 1)) sum_m |sum_i Y_lm(x_i)|^2,
/// so white noise has expected power 1 for l >= 1 and power[0] = n.
SpectrumReport sphere_power_spectrum(const std::vector<Vec>& points, int lmax);

/// Mean of power[l] over l in [lo, hi].
double mean_power(const SpectrumReport& s, int lo, int hi);

struct PcfReport {
  std::vector<double> centers;
  std::vector<double> g;
  std::vector<long long> counts;
  double bin_width = 0.0;
};

/// Pair correlation from unordered pair distances of num_points points:
/// g_b = count_b / (num_pairs * fraction_b), where fraction_b is the
/// probability that a uniform pair falls in bin b of [0, rmax).
PcfReport pair_correlation(const std::vector<double>& pair_distances, std::size_t num_points,
                           double rmax, const std::vector<double>& uniform_fraction);

/// Exact bin probabilities of the great-circle distance of a uniform pair on
/// S^2: (cos a - cos b) / 2.
std::vector<double> sphere_pair_fraction(double rmax, int bins);

/// Bin probabilities estimated from the pair distances of a uniform
/// reference set (all pairs count in the denominator).
std::vector<double> empirical_pair_fraction(const std::vector<double>& reference_distances,
                                            double rmax, int bins);

/// Unordered pairwise distances (i < j) in the measure's geometry. Projective
/// points use min(d(x, y), d(x, -y)).
std::vector<double> pairwise_distances(const DiscreteMeasure& points);

double min_pairwise_distance(const DiscreteMeasure& points);

/// Shortest paths in the graph of mesh vertices and sample points. Samples are
/// joined to their face's vertices and to other samples on the same face by
/// straight segments; vertices are joined along mesh edges. Entry (s, t) is
/// the distance from sources[s] to targets[t].
Eigen::MatrixXd mesh_geodesic_distances(const TriMesh& mesh, const std::vector<MeshSample>& sources,
                                        const std::vector<MeshSample>& targets);

/// Upper triangle of mesh_geodesic_distances(samples, samples).
std::vector<double> mesh_pair_distances(const TriMesh& mesh, const std::vector<MeshSample>& samples);

/// Uniform points on S^d (the white-noise baseline).
DiscreteMeasure white_noise_sphere(int d, std::size_t n, std::uint64_t seed);

}  // namespace nesots
