#include "nesots/yamabe.hpp"

#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>

#include <cmath>
#include <numbers>

namespace nesots {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Side opposite corner c of face f.
int side_edge(const EdgeTable& edges, int f, int c) { return edges.face_edges[f][(c + 1) % 3]; }

std::vector<double> to_hyperbolic(const std::vector<double>& scaled) {
  std::vector<double> out(scaled.size());
  for (std::size_t e = 0; e < scaled.size(); ++e) out[e] = hyperbolic_length(scaled[e]);
  return out;
}

double max_abs_defect(const Eigen::VectorXd& theta) {
  return (theta.array() - kTwoPi).abs().maxCoeff();
}

}  // namespace

double hyperbolic_length(double scaled_length) { return 2.0 * std::asinh(0.5 * scaled_length); }

std::vector<double> scaled_lengths(const EdgeTable& edges, const std::vector<double>& lengths,
                                   const Eigen::VectorXd& u) {
  std::vector<double> out(lengths.size());
  for (std::size_t e = 0; e < lengths.size(); ++e)
    out[e] = std::exp(0.5 * (u[edges.ends[e][0]] + u[edges.ends[e][1]])) * lengths[e];
  return out;
}

Eigen::Vector3d hyperbolic_triangle_angles(double a, double b, double c) {
  // Half-angle form: cos^2(alpha/2) = sinh(s) sinh(s - a) / (sinh b sinh c),
  // sin^2(alpha/2) = sinh(s - b) sinh(s - c) / (sinh b sinh c).
  const double s = 0.5 * (a + b + c);
  const double ss = std::sinh(s), sa = std::sinh(s - a), sb = std::sinh(s - b), sc = std::sinh(s - c);
  if (!(sa > 0.0 && sb > 0.0 && sc > 0.0)) throw MeshError("triangle inequality violated");
  return {2.0 * std::atan2(std::sqrt(sb * sc), std::sqrt(ss * sa)),
          2.0 * std::atan2(std::sqrt(sa * sc), std::sqrt(ss * sb)),
          2.0 * std::atan2(std::sqrt(sa * sb), std::sqrt(ss * sc))};
}

bool triangle_inequality_holds(const TriMesh& mesh, const EdgeTable& edges,
                               const std::vector<double>& ell) {
  for (int f = 0; f < mesh.num_faces(); ++f) {
    const double a = ell[side_edge(edges, f, 0)], b = ell[side_edge(edges, f, 1)],
                 c = ell[side_edge(edges, f, 2)];
    if (!(a < b + c && b < a + c && c < a + b)) return false;
    if (!(b + c - a > 1e-14 * (a + b + c) && a + c - b > 1e-14 * (a + b + c) &&
          a + b - c > 1e-14 * (a + b + c)))
      return false;
  }
  return true;
}

Eigen::VectorXd angle_sums(const TriMesh& mesh, const EdgeTable& edges, const std::vector<double>& ell) {
  Eigen::VectorXd theta = Eigen::VectorXd::Zero(mesh.num_vertices());
  for (int f = 0; f < mesh.num_faces(); ++f) {
    const Eigen::Vector3d ang = hyperbolic_triangle_angles(
        ell[side_edge(edges, f, 0)], ell[side_edge(edges, f, 1)], ell[side_edge(edges, f, 2)]);
    for (int c = 0; c < 3; ++c) theta[mesh.faces[f][c]] += ang[c];
  }
  return theta;
}

double hyperbolic_area(const TriMesh& mesh, const EdgeTable& edges, const std::vector<double>& ell) {
  double area = 0.0;
  for (int f = 0; f < mesh.num_faces(); ++f)
    area += std::numbers::pi - hyperbolic_triangle_angles(ell[side_edge(edges, f, 0)],
                                                          ell[side_edge(edges, f, 1)],
                                                          ell[side_edge(edges, f, 2)])
                                   .sum();
  return area;
}

Eigen::SparseMatrix<double> angle_sum_jacobian(const TriMesh& mesh, const EdgeTable& edges,
                                               const std::vector<double>& lengths,
                                               const Eigen::VectorXd& u) {
  const std::vector<double> ell = to_hyperbolic(scaled_lengths(edges, lengths, u));
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(mesh.faces.size() * 9);
  for (int f = 0; f < mesh.num_faces(); ++f) {
    Eigen::Vector3d s;
    for (int c = 0; c < 3; ++c) s[c] = ell[side_edge(edges, f, c)];
    const Eigen::Vector3d ang = hyperbolic_triangle_angles(s[0], s[1], s[2]);

    // dAngle[c] / dSide[e].
    Eigen::Matrix3d da;
    for (int c = 0; c < 3; ++c) {
      const int c1 = (c + 1) % 3, c2 = (c + 2) % 3;
      const double own = std::sinh(s[c]) / (std::sinh(s[c1]) * std::sinh(s[c2]) * std::sin(ang[c]));
      da(c, c) = own;
      da(c, c1) = -own * std::cos(ang[c2]);
      da(c, c2) = -own * std::cos(ang[c1]);
    }
    // dSide[e] / du at the two endpoints of side e, corners e+1 and e+2.
    Eigen::Matrix3d ds = Eigen::Matrix3d::Zero();
    for (int e = 0; e < 3; ++e) {
      const double t = std::tanh(0.5 * s[e]);
      ds(e, (e + 1) % 3) = t;
      ds(e, (e + 2) % 3) = t;
    }
    const Eigen::Matrix3d block = da * ds;
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c) trip.emplace_back(mesh.faces[f][r], mesh.faces[f][c], block(r, c));
  }
  Eigen::SparseMatrix<double> jac(mesh.num_vertices(), mesh.num_vertices());
  jac.setFromTriplets(trip.begin(), trip.end());
  return jac;
}

YamabeResult yamabe_flow(const TriMesh& mesh, const EdgeTable& edges,
                         const std::vector<double>& lengths, const YamabeOptions& opts) {
  if (mesh.genus < 2)
    throw MeshError("hyperbolic Yamabe flow needs genus >= 2 (got " + std::to_string(mesh.genus) + ")");
  const int nv = mesh.num_vertices();
  const double target_area = -kTwoPi * mesh.euler_characteristic();

  // Constant start: total area grows monotonically with a uniform scale.
  auto area_at = [&](double c) {
    return hyperbolic_area(mesh, edges, to_hyperbolic(scaled_lengths(edges, lengths,
                                                                      Eigen::VectorXd::Constant(nv, c))));
  };
  double mean = 0.0;
  for (double l : lengths) mean += l;
  mean /= static_cast<double>(lengths.size());
  double lo = std::log(1e-8 / mean), hi = std::log(1e8 / mean);
  for (int it = 0; it < 100 && hi - lo > 1e-13; ++it) {
    const double mid = 0.5 * (lo + hi);
    (area_at(mid) < target_area ? lo : hi) = mid;
  }

  YamabeResult res;
  res.lengths = lengths;
  res.u = Eigen::VectorXd::Constant(nv, 0.5 * (lo + hi));

  auto residual = [&](const Eigen::VectorXd& u, bool& admissible) -> Eigen::VectorXd {
    const std::vector<double> ell = to_hyperbolic(scaled_lengths(edges, lengths, u));
    admissible = triangle_inequality_holds(mesh, edges, ell);
    if (!admissible) return {};
    return angle_sums(mesh, edges, ell).array() - kTwoPi;
  };

  bool ok = true;
  Eigen::VectorXd r = residual(res.u, ok);
  if (!ok) throw MeshError("input lengths violate the triangle inequality");

  for (; res.iterations < opts.max_iterations; ++res.iterations) {
    const double defect = r.cwiseAbs().maxCoeff();
    res.residual_history.push_back(defect);
    if (defect < opts.tol) break;

    const Eigen::SparseMatrix<double> neg_jac = -angle_sum_jacobian(mesh, edges, lengths, res.u);
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(neg_jac);
    Eigen::VectorXd step;
    if (ldlt.info() == Eigen::Success) step = ldlt.solve(r);
    if (ldlt.info() != Eigen::Success || !step.allFinite()) {
      Eigen::SparseLU<Eigen::SparseMatrix<double>> lu(neg_jac);
      step = lu.solve(r);
    }

    const double norm0 = r.norm();
    double t = 1.0;
    int halvings = 0;
    for (;; ++halvings, t *= 0.5) {
      if (halvings > opts.max_halvings)
        throw MeshError("Newton step could not be made admissible after " +
                        std::to_string(opts.max_halvings) + " halvings");
      const Eigen::VectorXd trial = res.u + t * step;
      Eigen::VectorXd rt = residual(trial, ok);
      if (ok && rt.norm() < norm0) {
        res.u = trial;
        r = std::move(rt);
        break;
      }
    }
  }

  // Certificate, recomputed from the returned factors.
  res.max_defect = max_abs_defect(angle_sums(mesh, edges, hyperbolic_lengths(edges, res)));
  if (res.max_defect >= opts.tol)
    throw MeshError("Yamabe flow did not converge: max |Theta - 2 pi| = " +
                    std::to_string(res.max_defect));
  return res;
}

YamabeResult yamabe_flow(const TriMesh& mesh, const YamabeOptions& opts) {
  const EdgeTable edges = build_edges(mesh);
  return yamabe_flow(mesh, edges, edge_lengths(mesh, edges), opts);
}

std::vector<double> hyperbolic_lengths(const EdgeTable& edges, const YamabeResult& flow) {
  return to_hyperbolic(scaled_lengths(edges, flow.lengths, flow.u));
}

double gauss_bonnet_residual(const TriMesh& mesh, const EdgeTable& edges,
                             const std::vector<double>& lengths) {
  double euclid_area = 0.0;
  for (int f = 0; f < mesh.num_faces(); ++f) {
    const double a = lengths[side_edge(edges, f, 0)], b = lengths[side_edge(edges, f, 1)],
                 c = lengths[side_edge(edges, f, 2)];
    const double s = 0.5 * (a + b + c);
    euclid_area += std::sqrt(std::max(0.0, s * (s - a) * (s - b) * (s - c)));
  }
  // Hyperbolic area is about the Euclidean area for small triangles.
  const double scale = std::sqrt(1e-10 / euclid_area);
  std::vector<double> ell(lengths.size());
  for (std::size_t e = 0; e < lengths.size(); ++e) ell[e] = hyperbolic_length(scale * lengths[e]);
  const Eigen::VectorXd theta = angle_sums(mesh, edges, ell);
  return (kTwoPi - theta.array()).sum() - kTwoPi * mesh.euler_characteristic();
}

}  // namespace nesots
