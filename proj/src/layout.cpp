#include "nesots/layout.hpp"

#include "nesots/mesh_io.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

namespace nesots {

namespace {

const Vec3 kOrigin(0.0, 0.0, 1.0);

double lorentz3(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] - a[2] * b[2]; }

double hyper_dist3(const Vec3& a, const Vec3& b) {
  const Vec3 d = a - b;
  return 2.0 * std::asinh(0.5 * std::sqrt(std::max(0.0, lorentz3(d, d))));
}

Vec3 hyper_normalize3(const Vec3& x) { return x / std::sqrt(-lorentz3(x, x)); }

Vec3 hyper_exp3(const Vec3& x, const Vec3& v) {
  const double n = std::sqrt(std::max(0.0, lorentz3(v, v)));
  if (n < 1e-300) return x;
  return hyper_normalize3(std::cosh(n) * x + (std::sinh(n) / n) * v);
}

// Unit tangent at a pointing towards b.
Vec3 hyper_direction(const Vec3& a, const Vec3& b) {
  const Vec3 t = b + lorentz3(a, b) * a;
  return t / std::sqrt(lorentz3(t, t));
}

// Third vertex c of the hyperbolic triangle (a, b, c), counterclockwise seen
// from above the hyperboloid.
Vec3 place_third(const Vec3& a, const Vec3& b, double ab, double ac, double bc) {
  // Angle at a, opposite bc, in half-angle form.
  const double s = 0.5 * (ab + ac + bc);
  const double sa = std::sinh(s - bc), sb = std::sinh(s - ac), sc = std::sinh(s - ab);
  if (!(sa > 0.0 && sb > 0.0 && sc > 0.0)) throw MeshError("triangle inequality violated in layout");
  const double alpha = 2.0 * std::atan2(std::sqrt(sb * sc), std::sqrt(std::sinh(s) * sa));
  const Vec3 u = hyper_direction(a, b);
  // Lorentz cross product: orthogonal to both a and u.
  Vec3 v = a.cross(u);
  v[2] = -v[2];
  v /= std::sqrt(lorentz3(v, v));
  Vec3 c = hyper_exp3(a, ac * (std::cos(alpha) * u + std::sin(alpha) * v));
  if (a.dot(b.cross(c)) <= 0.0) c = hyper_exp3(a, ac * (std::cos(alpha) * u - std::sin(alpha) * v));
  return c;
}

int edge_between(const EdgeTable& edges, int f, int k) { return edges.face_edges[f][k]; }

}  // namespace

int Layout::num_placed_vertices() const {
  return static_cast<int>(std::count(placed.begin(), placed.end(), 1));
}

Layout build_local_layout(const TriMesh& mesh, const EdgeTable& edges, const std::vector<double>& ell,
                          int v0, double eps) {
  if (v0 < 0 || v0 >= mesh.num_vertices()) throw MeshError("layout origin out of range");
  Layout lay;
  lay.space = Space::hyperbolic;
  lay.origin = v0;
  lay.positions.assign(mesh.vertices.size(), Vec3::Zero());
  lay.placed.assign(mesh.vertices.size(), 0);
  lay.positions[v0] = kOrigin;
  lay.placed[v0] = 1;

  // Seed edge: v0 -> next vertex of the lowest-numbered incident face.
  int f0 = -1, k0 = -1;
  for (int f = 0; f < mesh.num_faces() && f0 < 0; ++f)
    for (int k = 0; k < 3; ++k)
      if (mesh.faces[f][k] == v0) {
        f0 = f;
        k0 = k;
        break;
      }
  const int v1 = mesh.faces[f0][(k0 + 1) % 3];
  const double l01 = ell[edge_between(edges, f0, k0)];
  const Vec3 p1(std::sinh(l01), 0.0, std::cosh(l01));
  if (p1[2] > eps) return lay;
  lay.positions[v1] = p1;
  lay.placed[v1] = 1;

  std::vector<char> processed(mesh.faces.size(), 0);
  std::deque<int> queue{f0, edges.face_neighbors[f0][k0]};
  while (!queue.empty()) {
    const int f = queue.front();
    queue.pop_front();
    if (processed[f]) continue;

    // A placed edge of f, in the face's winding order.
    const Face& t = mesh.faces[f];
    int k = -1;
    for (int i = 0; i < 3; ++i)
      if (lay.placed[t[i]] && lay.placed[t[(i + 1) % 3]]) {
        k = i;
        break;
      }
    if (k < 0) continue;  // reachable again later through another edge
    processed[f] = 1;

    const int a = t[k], b = t[(k + 1) % 3], c = t[(k + 2) % 3];
    const double ab = ell[edge_between(edges, f, k)], bc = ell[edge_between(edges, f, (k + 1) % 3)],
                 ca = ell[edge_between(edges, f, (k + 2) % 3)];
    const Vec3 pc = place_third(lay.positions[a], lay.positions[b], ab, ca, bc);
    if (pc[2] > eps) continue;
    if (lay.placed[c]) {
      // Reached along a different path: only accept the same position.
      if (hyper_dist3(lay.positions[c], pc) > 1e-6) continue;
    } else {
      lay.positions[c] = pc;
      lay.placed[c] = 1;
    }
    lay.faces.push_back(f);
    for (int i = 0; i < 3; ++i) {
      const int g = edges.face_neighbors[f][i];
      if (!processed[g]) queue.push_back(g);
    }
  }
  return lay;
}

double layout_edge_error(const TriMesh& mesh, const EdgeTable& edges, const std::vector<double>& ell,
                         const Layout& layout) {
  double err = 0.0;
  for (int f : layout.faces)
    for (int k = 0; k < 3; ++k) {
      const int a = mesh.faces[f][k], b = mesh.faces[f][(k + 1) % 3];
      err = std::max(err, std::abs(hyper_dist3(layout.positions[a], layout.positions[b]) -
                                   ell[edges.face_edges[f][k]]));
    }
  return err;
}

Layout sphere_layout(const TriMesh& mesh, std::vector<Vec3> sphere_vertices) {
  if (sphere_vertices.size() != mesh.vertices.size())
    throw MeshError("layout has " + std::to_string(sphere_vertices.size()) + " vertices, mesh has " +
                    std::to_string(mesh.vertices.size()));
  for (Vec3& p : sphere_vertices) {
    if (std::abs(p.norm() - 1.0) > 1e-6) throw MeshError("layout vertex is not on the unit sphere");
    p.normalize();
  }
  Layout lay;
  lay.space = Space::sphere;
  lay.positions = std::move(sphere_vertices);
  lay.placed.assign(mesh.vertices.size(), 1);
  lay.faces.resize(mesh.faces.size());
  for (int f = 0; f < mesh.num_faces(); ++f) lay.faces[f] = f;
  lay.origin = 0;
  return lay;
}

Layout load_sphere_layout(const TriMesh& mesh, const std::string& path) {
  std::vector<Vec3> verts;
  std::vector<Face> faces;
  read_mesh_geometry(path, verts, faces);
  if (faces != mesh.faces) throw MeshError("layout connectivity differs from the mesh");
  return sphere_layout(mesh, std::move(verts));
}

int count_flipped_faces(const TriMesh& mesh, const Layout& layout) {
  int flips = 0;
  for (int f : layout.faces) {
    const Face& t = mesh.faces[f];
    if (layout.positions[t[0]].dot(layout.positions[t[1]].cross(layout.positions[t[2]])) <= 0.0) ++flips;
  }
  return flips;
}

namespace {

double length_distortion(const EdgeTable& edges, const std::vector<double>& rest,
                         const std::vector<Vec3>& pos) {
  double lo = 1e300, hi = 0.0;
  for (std::size_t e = 0; e < rest.size(); ++e) {
    const double r = (pos[edges.ends[e][0]] - pos[edges.ends[e][1]]).norm() / rest[e];
    lo = std::min(lo, r);
    hi = std::max(hi, r);
  }
  return hi / lo;
}

}  // namespace

Layout embed_sphere_fallback(const TriMesh& mesh, int iterations, FallbackReport* report) {
  if (mesh.genus != 0) throw MeshError("spherical embedding needs genus 0");
  Vec3 centroid = Vec3::Zero();
  for (const Vec3& v : mesh.vertices) centroid += v;
  centroid /= static_cast<double>(mesh.vertices.size());
  std::vector<Vec3> pos(mesh.vertices.size());
  for (std::size_t i = 0; i < pos.size(); ++i) {
    const Vec3 d = mesh.vertices[i] - centroid;
    if (d.norm() < 1e-300) throw MeshError("vertex at the centroid cannot be projected");
    pos[i] = d.normalized();
  }

  const EdgeTable edges = build_edges(mesh);
  const std::vector<double> rest = edge_lengths(mesh, edges);
  double rest_total = 0.0;
  for (double r : rest) rest_total += r;

  Layout lay = sphere_layout(mesh, pos);
  FallbackReport rep;
  rep.flips.push_back(count_flipped_faces(mesh, lay));
  rep.distortion.push_back(length_distortion(edges, rest, lay.positions));

  std::vector<Vec3> force(pos.size());
  std::vector<int> degree(pos.size(), 0);
  for (const auto& e : edges.ends) {
    ++degree[e[0]];
    ++degree[e[1]];
  }
  for (int it = 0; it < iterations; ++it) {
    double chord_total = 0.0;
    for (const auto& e : edges.ends) chord_total += (lay.positions[e[0]] - lay.positions[e[1]]).norm();
    const double scale = chord_total / rest_total;
    std::fill(force.begin(), force.end(), Vec3::Zero());
    for (std::size_t e = 0; e < rest.size(); ++e) {
      const int i = edges.ends[e][0], j = edges.ends[e][1];
      const Vec3 d = lay.positions[j] - lay.positions[i];
      const double len = d.norm();
      const Vec3 f = (len - scale * rest[e]) / std::max(len, 1e-300) * d;
      force[i] += f;
      force[j] -= f;
    }
    for (std::size_t i = 0; i < pos.size(); ++i) {
      const Vec3& x = lay.positions[i];
      Vec3 step = 0.5 * force[i] / degree[i];
      step -= x.dot(step) * x;
      lay.positions[i] = (x + step).normalized();
    }
    rep.flips.push_back(count_flipped_faces(mesh, lay));
    rep.distortion.push_back(length_distortion(edges, rest, lay.positions));
  }
  if (report) *report = rep;
  if (rep.flips.back() > 0)
    throw MeshError(std::to_string(rep.flips.back()) +
                    " faces remain flipped on the sphere; supply a conformal spherical layout file");
  return lay;
}

Vec3 layout_point(const TriMesh& mesh, const Layout& layout, const MeshSample& s) {
  const Face& t = mesh.faces[s.face];
  const Vec3 p = s.bary[0] * layout.positions[t[0]] + s.bary[1] * layout.positions[t[1]] +
                 s.bary[2] * layout.positions[t[2]];
  return layout.space == Space::hyperbolic ? hyper_normalize3(p) : p.normalized();
}

Restriction restrict_to_layout(const TriMesh& mesh, const std::vector<MeshSample>& samples,
                               const Layout& layout) {
  std::vector<char> face_placed(mesh.faces.size(), 0);
  for (int f : layout.faces) face_placed[f] = 1;
  Restriction r;
  r.measure.space = layout.space;
  for (int i = 0; i < static_cast<int>(samples.size()); ++i) {
    if (!face_placed[samples[i].face]) continue;
    r.measure.atoms.push_back(layout_point(mesh, layout, samples[i]));
    r.source.push_back(i);
  }
  return r;
}

}  // namespace nesots
