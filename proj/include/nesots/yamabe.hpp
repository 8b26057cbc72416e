#pragma once

#include "nesots/mesh.hpp"

#include <Eigen/Sparse>

#include <vector>

namespace nesots {

// Discrete hyperbolic conformal metrics. The scaled length of edge ij is
//   l'_ij = exp((u_i + u_j) / 2) l_ij
// and the hyperbolic edge length is ell_ij = 2 asinh(l'_ij / 2), so that l' is
// the chord length of the hyperbolic edge in the hyperboloid model. Angles
// follow from ell through the hyperbolic law of cosines.

double hyperbolic_length(double scaled_length);

std::vector<double> scaled_lengths(const EdgeTable& edges, const std::vector<double>& lengths,
                                   const Eigen::VectorXd& u);

/// Interior angles of a hyperbolic triangle with side a opposite the first
/// angle, b opposite the second and c opposite the third. Requires the strict
/// triangle inequality.
Eigen::Vector3d hyperbolic_triangle_angles(double a, double b, double c);

bool triangle_inequality_holds(const TriMesh& mesh, const EdgeTable& edges,
                               const std::vector<double>& hyper_lengths);

/// Angle sum at every vertex for the hyperbolic lengths ell.
Eigen::VectorXd angle_sums(const TriMesh& mesh, const EdgeTable& edges,
                           const std::vector<double>& hyper_lengths);

/// Total hyperbolic area, sum over faces of pi minus the angle sum.
double hyperbolic_area(const TriMesh& mesh, const EdgeTable& edges,
                       const std::vector<double>& hyper_lengths);

/// d Theta_i / d u_j at u (symmetric, negative definite).
Eigen::SparseMatrix<double> angle_sum_jacobian(const TriMesh& mesh, const EdgeTable& edges,
                                               const std::vector<double>& lengths,
                                               const Eigen::VectorXd& u);

struct YamabeOptions {
  double tol = 1e-10;  ///< on max_i |Theta_i - 2 pi|
  int max_iterations = 100;
  int max_halvings = 60;
};

struct YamabeResult {
  Eigen::VectorXd u;
  std::vector<double> lengths;  ///< input edge lengths l, indexed like EdgeTable
  int iterations = 0;
  double max_defect = 0.0;               ///< recomputed from u
  std::vector<double> residual_history;  ///< max |Theta - 2 pi| per iteration
};

/// Newton descent on the conformal factors with backtracking on the residual
/// norm. Starts from the constant u whose total area matches Gauss-Bonnet.
/// Throws MeshError for genus < 2 or when a step cannot be made admissible.
YamabeResult yamabe_flow(const TriMesh& mesh, const EdgeTable& edges,
                         const std::vector<double>& lengths, const YamabeOptions& opts = {});
YamabeResult yamabe_flow(const TriMesh& mesh, const YamabeOptions& opts = {});

/// Hyperbolic lengths ell_ij for converged factors.
std::vector<double> hyperbolic_lengths(const EdgeTable& edges, const YamabeResult& flow);

/// Sum_i (2 pi - Theta_i) - 2 pi chi for the input lengths scaled down until
/// the total hyperbolic area is below 1e-9, so the value measures how far the
/// discrete Gauss-Bonnet identity is from holding.
double gauss_bonnet_residual(const TriMesh& mesh, const EdgeTable& edges,
                             const std::vector<double>& lengths);

}  // namespace nesots
