#include <doctest.h>

#include <nesots/bvh.hpp>
#include <nesots/layout.hpp>
#include <nesots/mesh_io.hpp>
#include <nesots/mesh_sampling.hpp>
#include <nesots/yamabe.hpp>

#include "support/shapes.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>

using namespace nesots;
using namespace nesots::testing;

namespace {

std::filesystem::path temp_file(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "nesots_test_mesh";
  std::filesystem::create_directories(dir);
  return dir / name;
}

void write_text(const std::filesystem::path& p, const std::string& text) {
  std::ofstream(p) << text;
}

double min_chord(const std::vector<MeshSample>& s) {
  double best = INFINITY;
  for (std::size_t i = 0; i < s.size(); ++i)
    for (std::size_t j = i + 1; j < s.size(); ++j) best = std::min(best, (s[i].position - s[j].position).norm());
  return best;
}

}  // namespace

TEST_CASE("genus of test surfaces") {
  CHECK(tetrahedron().genus == 0);
  CHECK(icosphere(2).genus == 0);
  CHECK(torus(2.0, 0.7, 12, 8).genus == 1);
  const TriMesh plate = genus2_plate(1);
  CHECK(plate.genus == 2);
  CHECK(plate.num_faces() == 100);
  CHECK(plate.euler_characteristic() == -2);
}

TEST_CASE("mesh validation errors") {
  std::vector<Vec3> v;
  std::vector<Face> f;
  open_surface(v, f);
  CHECK_THROWS_WITH_AS(make_mesh(v, f), doctest::Contains("boundary edge"), MeshError);

  const TriMesh t = tetrahedron();
  f = t.faces;
  std::swap(f[0][1], f[0][2]);
  CHECK_THROWS_WITH_AS(make_mesh(t.vertices, f), doctest::Contains("inconsistently oriented"), MeshError);

  f = t.faces;
  f[1][2] = 9;
  CHECK_THROWS_WITH_AS(make_mesh(t.vertices, f), doctest::Contains("missing vertex"), MeshError);

  f = t.faces;
  f[2] = {0, 0, 3};
  CHECK_THROWS_AS(make_mesh(t.vertices, f), MeshError);

  v = t.vertices;
  v.emplace_back(5, 5, 5);
  CHECK_THROWS_WITH_AS(make_mesh(v, t.faces), doctest::Contains("isolated vertex"), MeshError);

  // Two tetrahedra: disjoint, then glued at a single vertex.
  v = t.vertices;
  for (const Vec3& p : t.vertices) v.push_back(p + Vec3(4, 0, 0));
  f = t.faces;
  for (Face g : t.faces) f.push_back({g[0] + 4, g[1] + 4, g[2] + 4});
  CHECK_THROWS_WITH_AS(make_mesh(v, f), doctest::Contains("not connected"), MeshError);
  v.erase(v.begin() + 4);
  for (std::size_t k = 4; k < f.size(); ++k)
    for (int& i : f[k]) i = i == 4 ? 0 : i - 1;
  CHECK_THROWS_WITH_AS(make_mesh(v, f), doctest::Contains("non-manifold vertex"), MeshError);
}

TEST_CASE("edge table") {
  const TriMesh m = icosphere(1);
  const EdgeTable e = build_edges(m);
  CHECK(static_cast<int>(e.ends.size()) == m.num_vertices() + m.num_faces() - 2);
  for (int f = 0; f < m.num_faces(); ++f)
    for (int k = 0; k < 3; ++k) {
      const auto& ends = e.ends[e.face_edges[f][k]];
      CHECK(ends[0] == std::min(m.faces[f][k], m.faces[f][(k + 1) % 3]));
      const int g = e.face_neighbors[f][k];
      CHECK(g != f);
      CHECK(std::find(e.face_edges[g].begin(), e.face_edges[g].end(), e.face_edges[f][k]) !=
            e.face_edges[g].end());
    }
}

TEST_CASE("mesh file roundtrip") {
  const TriMesh m = genus2_plate(1);
  for (const char* name : {"plate.obj", "plate.ply"}) {
    const auto p = temp_file(name);
    if (p.extension() == ".obj") save_obj(m, p.string());
    else save_ply(m, p.string());
    const TriMesh back = load_mesh(p.string());
    CHECK(back.genus == 2);
    REQUIRE(back.num_vertices() == m.num_vertices());
    CHECK(back.faces == m.faces);
    for (int i = 0; i < m.num_vertices(); ++i) CHECK((back.vertices[i] - m.vertices[i]).norm() == 0.0);
  }
}

TEST_CASE("OBJ parsing") {
  const auto p = temp_file("tet.obj");
  write_text(p,
             "# tetrahedron\nv 1 1 1\nv 1 -1 -1\nv -1 1 -1\nv -1 -1 1\nvn 0 0 1\n"
             "f 1/1/1 2/2/1 3/3/1\nf 1//1 4//1 2//1\nf -4 -2 -1\nf 2 4 3\n");
  const TriMesh m = load_mesh(p.string());
  CHECK(m.genus == 0);
  CHECK(m.faces[2] == Face{0, 2, 3});

  write_text(p, "v 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\nf 1 2 3 4\n");
  CHECK_THROWS_WITH_AS(load_mesh(p.string()), doctest::Contains("non-triangular face"), MeshError);
  CHECK_THROWS(load_mesh(temp_file("missing.obj").string()));
}

TEST_CASE("binary PLY") {
  const TriMesh t = tetrahedron();
  const auto p = temp_file("tet_bin.ply");
  {
    std::ofstream out(p, std::ios::binary);
    out << "ply\nformat binary_little_endian 1.0\nelement vertex 4\nproperty float x\nproperty float y\n"
           "property float z\nelement face 4\nproperty list uchar int vertex_indices\nend_header\n";
    for (const Vec3& v : t.vertices)
      for (int k = 0; k < 3; ++k) {
        const float x = static_cast<float>(v[k]);
        out.write(reinterpret_cast<const char*>(&x), 4);
      }
    for (const Face& f : t.faces) {
      const unsigned char three = 3;
      out.write(reinterpret_cast<const char*>(&three), 1);
      for (int i : f) out.write(reinterpret_cast<const char*>(&i), 4);
    }
  }
  const TriMesh m = load_mesh(p.string());
  CHECK(m.faces == t.faces);
  CHECK((m.vertices[1] - t.vertices[1]).norm() == 0.0);
}

TEST_CASE("density files") {
  const auto p = temp_file("density.csv");
  write_text(p, "vertex,value\n2,0.5\n0,1\n1,2\n3,0\n");
  const MeshDensity d = load_density_csv(p.string(), MeshDensity::Kind::per_vertex, 4);
  CHECK(d.values == std::vector<double>{1.0, 2.0, 0.5, 0.0});
  write_text(p, "0,1\n1,2\n1,3\n3,0\n");
  CHECK_THROWS(load_density_csv(p.string(), MeshDensity::Kind::per_vertex, 4));
  write_text(p, "0,1\n1,2\n2,3\n");
  CHECK_THROWS(load_density_csv(p.string(), MeshDensity::Kind::per_vertex, 4));
}

TEST_CASE("face sampling follows the density") {
  const TriMesh t = tetrahedron();
  Rng rng(17);
  const MeshDensity d{MeshDensity::Kind::per_face, {3.0, 1.0, 0.0, 0.0}};
  const auto s = sample_faces(t, d, 20000, rng);
  double in0 = 0;
  Vec3 mean = Vec3::Zero();
  for (const MeshSample& x : s) {
    in0 += x.face == 0;
    CHECK(x.face < 2);
    CHECK(x.bary.minCoeff() >= 0.0);
    CHECK(x.bary.sum() == doctest::Approx(1.0));
    mean += x.bary;
  }
  CHECK(std::abs(in0 / 20000 - 0.75) < 0.02);
  mean /= 20000.0;
  for (int k = 0; k < 3; ++k) CHECK(std::abs(mean[k] - 1.0 / 3.0) < 0.01);

  CHECK_THROWS_WITH(sample_faces(t, {MeshDensity::Kind::per_face, {0, 0, 0, 0}}, 5, rng),
                    "density has zero total weight");
  CHECK_THROWS_AS(sample_faces(t, {MeshDensity::Kind::per_vertex, {1, 1}}, 5, rng), MeshError);
}

TEST_CASE("hyperbolic triangles") {
  // Equilateral side a: cos alpha = cosh a / (1 + cosh a).
  for (double a : {0.01, 0.5, 2.0, 6.0}) {
    const Eigen::Vector3d ang = hyperbolic_triangle_angles(a, a, a);
    for (int k = 0; k < 3; ++k) CHECK(ang[k] == doctest::Approx(std::acos(std::cosh(a) / (1 + std::cosh(a)))));
  }
  // Law of cosines for a scalene triangle.
  const double a = 0.7, b = 1.1, c = 1.5;
  const Eigen::Vector3d ang = hyperbolic_triangle_angles(a, b, c);
  CHECK(std::cosh(a) == doctest::Approx(std::cosh(b) * std::cosh(c) - std::sinh(b) * std::sinh(c) * std::cos(ang[0])));
  CHECK(std::cosh(c) == doctest::Approx(std::cosh(a) * std::cosh(b) - std::sinh(a) * std::sinh(b) * std::cos(ang[2])));
  CHECK(ang.sum() < std::numbers::pi);
  CHECK(hyperbolic_length(2 * std::sinh(0.35)) == doctest::Approx(0.7));
}

TEST_CASE("angle sum Jacobian matches finite differences") {
  const TriMesh m = genus2_plate(1);
  const EdgeTable e = build_edges(m);
  const YamabeResult flow = yamabe_flow(m);
  Rng rng(5);
  std::uniform_real_distribution<double> uni(-0.1, 0.1);
  Eigen::VectorXd u = flow.u;
  for (Eigen::Index i = 0; i < u.size(); ++i) u[i] += uni(rng);
  auto sums = [&](const Eigen::VectorXd& w) {
    std::vector<double> ell = scaled_lengths(e, flow.lengths, w);
    for (double& l : ell) l = hyperbolic_length(l);
    return angle_sums(m, e, ell);
  };
  const Eigen::MatrixXd j = Eigen::MatrixXd(angle_sum_jacobian(m, e, flow.lengths, u));
  CHECK((j - j.transpose()).cwiseAbs().maxCoeff() < 1e-12);
  const double h = 1e-6;
  for (int col : {0, 7, 31, m.num_vertices() - 1}) {
    Eigen::VectorXd up = u, dn = u;
    up[col] += h;
    dn[col] -= h;
    const Eigen::VectorXd fd = (sums(up) - sums(dn)) / (2 * h);
    CHECK((fd - j.col(col)).cwiseAbs().maxCoeff() < 1e-6);
  }
  CHECK(Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(j).eigenvalues().maxCoeff() < 0.0);
}

TEST_CASE("Yamabe flow converges and respects Gauss-Bonnet") {
  const TriMesh m = genus2_plate(2);
  const EdgeTable e = build_edges(m);
  const auto l = edge_lengths(m, e);
  CHECK(std::abs(gauss_bonnet_residual(m, e, l)) < 1e-6);

  const YamabeResult flow = yamabe_flow(m, e, l);
  CHECK(flow.max_defect < 1e-8);
  const auto ell = hyperbolic_lengths(e, flow);
  CHECK(triangle_inequality_holds(m, e, ell));
  const Eigen::VectorXd theta = angle_sums(m, e, ell);
  CHECK((theta.array() - 2 * std::numbers::pi).abs().maxCoeff() < 1e-8);
  CHECK(hyperbolic_area(m, e, ell) == doctest::Approx(4 * std::numbers::pi * (m.genus - 1)).epsilon(1e-8));

  // The converged metric is a fixed point.
  const std::vector<double> scaled = scaled_lengths(e, l, flow.u);
  const YamabeResult again = yamabe_flow(m, e, scaled);
  CHECK(again.u.cwiseAbs().maxCoeff() < 1e-8);
  CHECK(again.max_defect < 1e-8);

  CHECK_THROWS_AS(yamabe_flow(torus(2.0, 0.7, 12, 8)), MeshError);
  CHECK_THROWS_AS(yamabe_flow(icosphere(1)), MeshError);
}

TEST_CASE("local hyperbolic layouts are isometric") {
  const TriMesh m = genus2_plate(3);
  const EdgeTable e = build_edges(m);
  const auto ell = hyperbolic_lengths(e, yamabe_flow(m));
  std::size_t prev = 0;
  for (double eps : {1.1, 1.5, 2.6}) {
    const Layout lay = build_local_layout(m, e, ell, 17, eps);
    CHECK(lay.faces.size() > prev);
    prev = lay.faces.size();
    CHECK(layout_edge_error(m, e, ell, lay) < 1e-6);
    CHECK(lay.positions[17].isApprox(Vec3(0, 0, 1)));
    for (int v = 0; v < m.num_vertices(); ++v)
      if (lay.placed[v]) {
        const Vec3& p = lay.positions[v];
        CHECK(p[2] <= eps + 1e-12);
        CHECK(p[0] * p[0] + p[1] * p[1] - p[2] * p[2] == doctest::Approx(-1.0).epsilon(1e-9));
      }
    for (int f : lay.faces) {
      const Face& t = m.faces[f];
      const Vec3 &a = lay.positions[t[0]], &b = lay.positions[t[1]], &c = lay.positions[t[2]];
      CHECK(a.dot(b.cross(c)) > 0.0);
    }
  }
  // A threshold at the origin admits no face.
  const Layout tiny = build_local_layout(m, e, ell, 17, 1.0 + 1e-9);
  CHECK(tiny.faces.empty());
  CHECK(tiny.placed[17]);
}

TEST_CASE("restrict and map back") {
  const TriMesh m = genus2_plate(2);
  const EdgeTable e = build_edges(m);
  const auto ell = hyperbolic_lengths(e, yamabe_flow(m));
  const Layout lay = build_local_layout(m, e, ell, 3, 2.0);
  Rng rng(9);
  const auto samples = sample_faces(m, {}, 1000, rng);
  const Restriction r = restrict_to_layout(m, samples, lay);
  CHECK(r.measure.space == Space::hyperbolic);
  CHECK(r.measure.size() > 100);
  const LayoutBvh bvh(m, lay);
  const auto back = map_to_mesh(r.measure.atoms, m, bvh);
  for (std::size_t i = 0; i < back.size(); ++i) {
    REQUIRE(back[i]);
    const MeshSample& s = samples[r.source[i]];
    CHECK(back[i]->face == s.face);
    CHECK((back[i]->bary - s.bary).norm() < 1e-9);
    CHECK((back[i]->position - s.position).norm() < 1e-9);
  }
  // A point beyond the patch misses.
  Vec far(3);
  far << std::sinh(8.0), 0.0, std::cosh(8.0);
  CHECK_FALSE(map_to_mesh({far}, m, bvh)[0]);
}

TEST_CASE("spherical layouts") {
  const TriMesh m = icosphere(2);
  const Layout lay = sphere_layout(m, m.vertices);
  CHECK(count_flipped_faces(m, lay) == 0);
  std::vector<Vec3> off = m.vertices;
  off[0] *= 1.1;
  CHECK_THROWS_AS(sphere_layout(m, off), MeshError);

  Rng rng(1);
  const auto samples = sample_faces(m, {}, 500, rng);
  const Restriction r = restrict_to_layout(m, samples, lay);
  CHECK(r.measure.size() == 500);
  const auto back = map_to_mesh(r.measure.atoms, m, LayoutBvh(m, lay));
  for (std::size_t i = 0; i < back.size(); ++i) {
    REQUIRE(back[i]);
    CHECK((back[i]->position - samples[i].position).norm() < 1e-9);
  }
}

TEST_CASE("fallback embedding") {
  SUBCASE("convex mesh") {
    FallbackReport rep;
    const TriMesh m = ellipsoid(2, 1.0, 1.6, 0.8);
    const Layout lay = embed_sphere_fallback(m, 50, &rep);
    CHECK(rep.flips.back() == 0);
    CHECK(count_flipped_faces(m, lay) == 0);
    CHECK(rep.distortion.back() <= rep.distortion.front());
    for (int v = 0; v < m.num_vertices(); ++v) CHECK(lay.positions[v].norm() == doctest::Approx(1.0));
  }
  SUBCASE("genus must be zero") {
    CHECK_THROWS_AS(embed_sphere_fallback(torus(2.0, 0.7, 12, 8), 10), MeshError);
  }
}

TEST_CASE("spherical mesh pipeline") {
  const TriMesh m = icosphere(3);
  const Layout lay = sphere_layout(m, m.vertices);
  MeshSamplerConfig cfg;
  cfg.sampler.n = 256;
  cfg.sampler.K = 60;
  cfg.sampler.L = 16;

  SUBCASE("uniform") {
    const MeshRunResult r = sample_mesh_spherical(m, lay, {}, cfg);
    CHECK(r.samples.size() == 256);
    CHECK(r.trace.energy.size() == 60);
    CHECK(min_chord(r.samples) > 2.0 * min_chord(r.initial));
  }
  SUBCASE("hemisphere density") {
    MeshDensity d{MeshDensity::Kind::per_vertex, {}};
    for (const Vec3& v : m.vertices) d.values.push_back(v[2] > 0.0 ? 1.0 : 0.0);
    const MeshRunResult r = sample_mesh_spherical(m, lay, d, cfg);
    int upper = 0;
    for (const MeshSample& s : r.samples) upper += s.position[2] > -0.05;
    CHECK(upper >= 250);
  }
  SUBCASE("wrong genus or layout") {
    CHECK_THROWS_AS(sample_mesh_spherical(genus2_plate(1), lay, {}, cfg), MeshError);
  }
}

TEST_CASE("hyperbolic mesh pipeline") {
  const TriMesh m = genus2_plate(3);
  const EdgeTable e = build_edges(m);
  const YamabeResult flow = yamabe_flow(m);
  MeshSamplerConfig cfg;
  cfg.sampler.n = 200;
  cfg.sampler.K = 2;
  cfg.sampler.L = 8;
  cfg.eps = 1.5;

  SUBCASE("no rounds returns the start") {
    cfg.N = 0;
    const MeshRunResult r = sample_mesh_hyperbolic(m, e, flow, {}, cfg);
    REQUIRE(r.samples.size() == r.initial.size());
    for (std::size_t i = 0; i < r.samples.size(); ++i) CHECK(r.samples[i].position == r.initial[i].position);
    CHECK(r.rounds.empty());
  }
  SUBCASE("the queue visits the least covered vertex") {
    cfg.N = 30;
    const MeshRunResult r = sample_mesh_hyperbolic(m, e, flow, {}, cfg);
    CHECK(r.rounds.size() == 30);
    CHECK(r.rounds[0].origin == 0);
    // Replay the queue from the recorded origins.
    std::vector<int> visits(m.num_vertices(), 0);
    const auto ell = hyperbolic_lengths(e, flow);
    for (const PatchRound& pr : r.rounds) {
      CHECK(visits[pr.origin] == *std::min_element(visits.begin(), visits.end()));
      const Layout lay = build_local_layout(m, e, ell, pr.origin, cfg.eps);
      for (int v = 0; v < m.num_vertices(); ++v) visits[v] += lay.placed[v];
    }
    CHECK(visits == r.visits);
    CHECK(*std::min_element(visits.begin(), visits.end()) >= 1);
    for (const MeshSample& s : r.samples) {
      CHECK(s.bary.minCoeff() >= -1e-9);
      CHECK(s.bary.sum() == doctest::Approx(1.0));
    }
  }
  SUBCASE("genus one is rejected") {
    CHECK_THROWS_AS(sample_mesh_hyperbolic(torus(2.0, 0.7, 12, 8), e, flow, {}, cfg), MeshError);
  }
}
