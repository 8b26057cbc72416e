#include <doctest.h>

#include <nesots/analysis.hpp>
#include <nesots/sampler.hpp>

#include "support/random_points.hpp"

#include <cmath>
#include <numbers>
#include <set>

using namespace nesots;
using namespace nesots::testing;

namespace {

double weber_objective(const Eigen::MatrixXd& x, const Vec& y) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < x.cols(); ++i) s += (x.col(i) - y).norm();
  return s;
}

// Shrinking-grid search for the minimizer of the Weber objective.
Vec grid_median(const Eigen::MatrixXd& x) {
  const int dim = static_cast<int>(x.rows());
  const int steps = dim == 2 ? 20 : 10;
  Vec center = 0.5 * (x.rowwise().minCoeff() + x.rowwise().maxCoeff());
  double half = 0.5 * (x.rowwise().maxCoeff() - x.rowwise().minCoeff()).maxCoeff() + 1e-3;
  for (int round = 0; round < 80; ++round) {
    Vec best = center;
    double best_f = weber_objective(x, center);
    const int count = static_cast<int>(std::pow(steps + 1, dim));
    for (int k = 0; k < count; ++k) {
      Vec y = center;
      int rest = k;
      for (int a = 0; a < dim; ++a) {
        y[a] += half * (2.0 * (rest % (steps + 1)) / steps - 1.0);
        rest /= steps + 1;
      }
      const double f = weber_objective(x, y);
      if (f < best_f) {
        best_f = f;
        best = y;
      }
    }
    center = best;
    half *= 0.5;
  }
  return center;
}

DiscreteMeasure rotate(const DiscreteMeasure& m, const Eigen::MatrixXd& r) {
  DiscreteMeasure out = m;
  for (Vec& x : out.atoms) x = r * x;
  return out;
}

// Rotation of R^{d+1} fixing the time axis.
Eigen::MatrixXd spatial_rotation(int d, Rng& rng) {
  Eigen::MatrixXd r = Eigen::MatrixXd::Identity(d + 1, d + 1);
  r.topLeftCorner(d, d) = random_rotation(d, rng);
  return r;
}

double max_atom_error(const DiscreteMeasure& a, const DiscreteMeasure& b) {
  double e = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) e = std::max(e, (a.atoms[i] - b.atoms[i]).norm());
  return e;
}

}  // namespace

TEST_CASE("subsample draws distinct uniform indices") {
  Rng rng(3);
  std::vector<int> hits(20, 0);
  for (int t = 0; t < 20000; ++t) {
    const auto idx = subsample_indices(20, 5, rng);
    CHECK(std::set<int>(idx.begin(), idx.end()).size() == 5);
    for (int i : idx) {
      REQUIRE(i >= 0);
      REQUIRE(i < 20);
      ++hits[i];
    }
  }
  for (int h : hits) CHECK(std::abs(h / 20000.0 - 0.25) < 0.015);
  CHECK(subsample_indices(7, 7, rng).size() == 7);
  CHECK_THROWS(subsample_indices(3, 4, rng));
}

TEST_CASE("derive_stream is reproducible and separates tuples") {
  CHECK(derive_stream(5, 1, 2)() == derive_stream(5, 1, 2)());
  CHECK(derive_stream(5, 1, 2)() != derive_stream(5, 2, 1)());
  CHECK(derive_stream(5, 1, 2, 0)() != derive_stream(5, 1, 2, 1)());
}

TEST_CASE("geometric median exact cases") {
  Vec v(3);
  v << 0.3, -1.0, 2.0;
  CHECK((geometric_median(std::vector<Vec>{v}, 1e-7) - v).norm() == 0.0);

  // Equilateral triangle: the Fermat point is the centroid.
  Eigen::MatrixXd tri(2, 3);
  for (int k = 0; k < 3; ++k) {
    const double a = 2 * std::numbers::pi * k / 3 + 0.4;
    tri.col(k) << 1.0 + std::cos(a), -2.0 + std::sin(a);
  }
  CHECK((geometric_median(tri, 1e-7) - tri.rowwise().mean()).norm() < 1e-5);

  // Collinear points: the median of the middle coordinate.
  Eigen::MatrixXd line(3, 5);
  const double ts[] = {-3.0, -0.5, 0.2, 1.0, 7.0};
  Vec dir(3);
  dir << 1.0, 2.0, -1.0;
  dir.normalize();
  for (int k = 0; k < 5; ++k) line.col(k) = ts[k] * dir;
  CHECK((geometric_median(line, 1e-7) - 0.2 * dir).norm() < 1e-5);

  CHECK_THROWS_AS(geometric_median(Eigen::MatrixXd(2, 0), 1e-7), GeometryError);
}

TEST_CASE("geometric median against grid refinement") {
  Rng rng(11);
  std::uniform_int_distribution<int> count(3, 12);
  for (int trial = 0; trial < 40; ++trial) {
    const int dim = trial % 2 ? 3 : 2;
    Eigen::MatrixXd x(dim, count(rng));
    for (Eigen::Index i = 0; i < x.cols(); ++i) x.col(i) = random_gaussian(dim, rng);
    const double f = weber_objective(x, geometric_median(x, 1e-7));
    const double oracle = weber_objective(x, grid_median(x));
    CHECK(f <= oracle + 1e-6);
  }
}

TEST_CASE("identical measures are a fixed point") {
  Rng rng(5);
  SamplerConfig cfg;
  cfg.K = 3;
  cfg.L = 8;
  SUBCASE("sphere") {
    const DiscreteMeasure nu = uniform_sphere(2, 64, rng);
    cfg.n = nu.size();
    const RunResult r = nesots_run(nu, nu, cfg);
    CHECK(max_atom_error(r.samples, nu) < 1e-12);
    for (double e : r.trace.energy) CHECK(e < 1e-24);
  }
  SUBCASE("hyperbolic") {
    const DiscreteMeasure nu = uniform_hyper_patch(2, 3.0, 64, rng);
    cfg.n = nu.size();
    const RunResult r = nesots_run(nu, nu, cfg);
    CHECK(max_atom_error(r.samples, nu) < 1e-12);
  }
}

TEST_CASE("runs are equivariant under a rotated frame") {
  Rng rng(8);
  SamplerConfig cfg;
  cfg.n = 40;
  cfg.K = 5;
  cfg.L = 6;
  SUBCASE("sphere") {
    const DiscreteMeasure nu = uniform_sphere(2, 160, rng);
    const Eigen::MatrixXd r = random_rotation(3, rng);
    const RunResult base = nesots_run(nu, cfg);
    cfg.frame = r;
    const RunResult turned = nesots_run(rotate(nu, r), cfg);
    CHECK(max_atom_error(turned.samples, rotate(base.samples, r)) < 1e-9);
  }
  SUBCASE("hyperbolic") {
    const DiscreteMeasure nu = uniform_hyper_patch(2, 2.0, 160, rng);
    const Eigen::MatrixXd r = spatial_rotation(2, rng);
    const RunResult base = nesots_run(nu, cfg);
    cfg.frame = r;
    const RunResult turned = nesots_run(rotate(nu, r), cfg);
    CHECK(max_atom_error(turned.samples, rotate(base.samples, r)) < 1e-9);
  }
}

TEST_CASE("a single slice pools identically with mean and median") {
  Rng rng(2);
  const DiscreteMeasure nu = uniform_sphere(2, 200, rng);
  SamplerConfig cfg;
  cfg.n = 50;
  cfg.K = 4;
  cfg.L = 1;
  cfg.pooling = Pooling::mean;
  const RunResult a = nesots_run(nu, cfg);
  cfg.pooling = Pooling::geometric_median;
  const RunResult b = nesots_run(nu, cfg);
  CHECK(max_atom_error(a.samples, b.samples) < 1e-12);
}

TEST_CASE("runs are deterministic and outputs stay on the manifold") {
  Rng rng(4);
  const DiscreteMeasure nu = uniform_hyper_patch(3, 2.5, 300, rng);
  SamplerConfig cfg;
  cfg.n = 60;
  cfg.K = 6;
  cfg.L = 8;
  const RunResult a = nesots_run(nu, cfg), b = nesots_run(nu, cfg);
  CHECK(max_atom_error(a.samples, b.samples) == 0.0);
  CHECK(a.trace.energy == b.trace.energy);
  CHECK_NOTHROW(validate(a.samples, 1e-9));
}

TEST_CASE("configuration errors") {
  Rng rng(1);
  const DiscreteMeasure nu = uniform_sphere(2, 10, rng);
  SamplerConfig cfg;
  cfg.n = 11;
  CHECK_THROWS_AS(nesots_run(nu, cfg), ConfigError);
  cfg.n = 6;
  CHECK_THROWS_WITH_AS(projective_run(nu, cfg), "projective sampling requires 2n <= m", ConfigError);
  cfg.n = 4;
  cfg.p = 3;
  CHECK_THROWS_AS(nesots_run(nu, cfg), ConfigError);
  cfg.p = 2;
  cfg.L = 0;
  CHECK_THROWS_AS(nesots_run(nu, cfg), ConfigError);
  cfg.L = 4;
  cfg.gamma0 = 0.0;
  CHECK_THROWS_AS(nesots_run(nu, cfg), ConfigError);
  cfg.gamma0 = 1.0;
  const DiscreteMeasure h = uniform_hyper_patch(2, 2.0, 10, rng);
  CHECK_THROWS_AS(nesots_run(nesots_run(nu, cfg).samples, h, cfg), ConfigError);
  CHECK_THROWS_AS(pooling_from_string("max"), ConfigError);
  CHECK(pooling_from_string("mean") == Pooling::mean);
}

TEST_CASE("step schedule") {
  SamplerConfig cfg;
  cfg.K = 100;
  CHECK(cfg.step(0) == 1.0);
  CHECK(cfg.step(100) == doctest::Approx(0.05).epsilon(1e-12));
  cfg.decay = 0.5;
  CHECK(cfg.step(2) == doctest::Approx(0.25));
}

TEST_CASE("projective sampling") {
  Rng rng(6);
  const DiscreteMeasure nu = symmetrize_antipodal(uniform_sphere(2, 200, rng));
  SamplerConfig cfg;
  cfg.K = 5;
  cfg.L = 8;
  SUBCASE("single point") {
    cfg.n = 1;
    const RunResult r = projective_run(nu, cfg);
    CHECK(r.samples.space == Space::projective);
    CHECK(r.samples.size() == 1);
    CHECK(std::abs(r.samples.atoms[0].norm() - 1.0) < 1e-12);
  }
  SUBCASE("sign of the start is irrelevant up to sign of the output") {
    cfg.n = 30;
    DiscreteMeasure mu0 = subsample(nu, 30, rng);
    mu0.space = Space::projective;
    DiscreteMeasure flipped = mu0;
    for (std::size_t i = 0; i < mu0.size(); i += 2) flipped.atoms[i] = -flipped.atoms[i];
    const RunResult a = projective_run(mu0, nu, cfg), b = projective_run(flipped, nu, cfg);
    for (std::size_t i = 0; i < mu0.size(); ++i)
      CHECK((canonical_sign(a.samples.atoms[i]) - canonical_sign(b.samples.atoms[i])).norm() < 1e-9);
  }
}

TEST_CASE("canonical sign") {
  Vec x(3);
  x << 0.0, -0.6, 0.8;
  CHECK(canonical_sign(x)[1] == 0.6);
  CHECK(canonical_sign(-x) == canonical_sign(x));
}

TEST_CASE("quaternion rotations") {
  Rng rng(12);
  for (int t = 0; t < 100; ++t) {
    const Vec q = random_sphere_point(3, rng);
    const Mat3 r = quaternion_to_rotation(q), s = quaternion_to_rotation(-q);
    CHECK((r.transpose() * r - Mat3::Identity()).cwiseAbs().maxCoeff() < 1e-9);
    CHECK(r.determinant() == doctest::Approx(1.0).epsilon(1e-9));
    CHECK((r - s).cwiseAbs().maxCoeff() < 1e-12);
  }
  // Quarter turn about z: x -> q^{-1} x q with q = (0, 0, sin 45, cos 45).
  Vec q(4);
  q << 0.0, 0.0, std::sqrt(0.5), std::sqrt(0.5);
  const Eigen::Vector3d y = rotate_by_quaternion(q, Eigen::Vector3d::UnitX());
  CHECK((y - Eigen::Vector3d(0.0, -1.0, 0.0)).norm() < 1e-12);
}

TEST_CASE("affine lines as projective points") {
  const Line2 l{3.0, -4.0, 10.0};
  const Vec v = line_to_projective(l);
  CHECK(v.norm() == doctest::Approx(1.0));
  const Line2 back = projective_to_line(-v);
  CHECK(back.signed_distance(0.0, 0.0) == doctest::Approx(-2.0));
  CHECK(std::abs(back.signed_distance(2.0, 4.0)) < 1e-12);
  CHECK_THROWS_AS(line_to_projective({0.0, 0.0, 1.0}), GeometryError);
  const std::vector<Line2> lines{{1, 0, 0}, {0, 2, 1}};
  CHECK(make_affine_line_measure(lines).space == Space::projective);
}

TEST_CASE("hyperbolic blue noise spreads points") {
  Rng rng(21);
  const DiscreteMeasure nu = uniform_hyper_patch(2, std::cosh(1.5), 2048, rng);
  SamplerConfig cfg;
  cfg.n = 256;
  cfg.K = 80;
  cfg.L = 16;
  const RunResult r = nesots_run(nu, cfg);
  Rng init = derive_stream(cfg.seed, 0, 0, 0x696e6974);
  const DiscreteMeasure start = subsample(nu, cfg.n, init);
  CHECK(min_pairwise_distance(r.samples) > 2.0 * min_pairwise_distance(start));
}

TEST_CASE("energy decreases in windowed mean on a uniform target") {
  Rng rng(9);
  const DiscreteMeasure nu = uniform_sphere_lattice(1024, rng);
  SamplerConfig cfg;
  cfg.n = 256;
  cfg.K = 100;
  cfg.L = 16;
  const RunResult r = nesots_run(nu, cfg);
  double prev = INFINITY;
  for (int w = 0; w < 5; ++w) {
    double s = 0.0;
    for (int j = 20 * w; j < 20 * (w + 1); ++j) s += r.trace.energy[j];
    CHECK(s / 20.0 <= prev);
    prev = s / 20.0;
  }
}
