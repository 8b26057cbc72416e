#include "nesots/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <unordered_map>

namespace nesots {

namespace {

std::uint64_t edge_key(int a, int b) {
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 32) |
         static_cast<std::uint32_t>(b);
}

}  // namespace

TriMesh make_mesh(std::vector<Vec3> vertices, std::vector<Face> faces) {
  const int nv = static_cast<int>(vertices.size());
  if (faces.empty()) throw MeshError("mesh has no faces");

  std::unordered_map<std::uint64_t, int> directed;  // (a, b) -> face
  directed.reserve(faces.size() * 3);
  std::vector<int> valence(nv, 0);
  for (int f = 0; f < static_cast<int>(faces.size()); ++f) {
    const Face& t = faces[f];
    for (int k = 0; k < 3; ++k) {
      if (t[k] < 0 || t[k] >= nv)
        throw MeshError("face " + std::to_string(f) + " references a missing vertex");
      ++valence[t[k]];
    }
    if (t[0] == t[1] || t[1] == t[2] || t[0] == t[2])
      throw MeshError("face " + std::to_string(f) + " repeats a vertex");
    for (int k = 0; k < 3; ++k) {
      const auto [it, inserted] = directed.emplace(edge_key(t[k], t[(k + 1) % 3]), f);
      if (!inserted)
        throw MeshError("non-manifold or inconsistently oriented edge (" + std::to_string(t[k]) +
                        ", " + std::to_string(t[(k + 1) % 3]) + ")");
    }
  }
  for (const auto& [key, f] : directed) {
    const int a = static_cast<int>(key >> 32), b = static_cast<int>(key & 0xffffffffu);
    if (!directed.contains(edge_key(b, a)))
      throw MeshError("boundary edge (" + std::to_string(a) + ", " + std::to_string(b) + ")");
  }
  for (int v = 0; v < nv; ++v)
    if (valence[v] == 0) throw MeshError("isolated vertex " + std::to_string(v));

  // The faces around each vertex must form a single fan. Following the
  // outgoing edge v -> b of face (v, a, b) leads to the next face.
  std::unordered_map<std::uint64_t, int> out_face;  // (v, a) -> face with v -> a
  for (int f = 0; f < static_cast<int>(faces.size()); ++f)
    for (int k = 0; k < 3; ++k) out_face.emplace(edge_key(faces[f][k], faces[f][(k + 1) % 3]), f);
  std::vector<char> seen_vertex(nv, 0);
  for (int f = 0; f < static_cast<int>(faces.size()); ++f) {
    for (int k = 0; k < 3; ++k) {
      const int v = faces[f][k];
      if (seen_vertex[v]) continue;
      seen_vertex[v] = 1;
      int count = 0, cur = f;
      do {
        const Face& t = faces[cur];
        const int pos = t[0] == v ? 0 : (t[1] == v ? 1 : 2);
        cur = out_face.at(edge_key(v, t[(pos + 2) % 3]));
        ++count;
      } while (cur != f && count <= valence[v]);
      if (count != valence[v]) throw MeshError("non-manifold vertex " + std::to_string(v));
    }
  }

  // Connectivity over faces.
  std::vector<char> reached(faces.size(), 0);
  std::vector<int> stack{0};
  reached[0] = 1;
  std::size_t visited = 1;
  while (!stack.empty()) {
    const int f = stack.back();
    stack.pop_back();
    for (int k = 0; k < 3; ++k) {
      const int g = directed.at(edge_key(faces[f][(k + 1) % 3], faces[f][k]));
      if (!reached[g]) {
        reached[g] = 1;
        ++visited;
        stack.push_back(g);
      }
    }
  }
  if (visited != faces.size()) throw MeshError("mesh is not connected");

  const long long ne = static_cast<long long>(directed.size()) / 2;
  const long long chi = nv - ne + static_cast<long long>(faces.size());
  if ((2 - chi) % 2 != 0) throw MeshError("odd Euler characteristic");

  TriMesh mesh;
  mesh.vertices = std::move(vertices);
  mesh.faces = std::move(faces);
  mesh.genus = static_cast<int>((2 - chi) / 2);
  return mesh;
}

EdgeTable build_edges(const TriMesh& mesh) {
  EdgeTable t;
  std::unordered_map<std::uint64_t, int> ids;
  ids.reserve(mesh.faces.size() * 2);
  t.face_edges.resize(mesh.faces.size());
  std::vector<std::array<int, 2>> edge_faces;
  for (int f = 0; f < mesh.num_faces(); ++f) {
    for (int k = 0; k < 3; ++k) {
      int a = mesh.faces[f][k], b = mesh.faces[f][(k + 1) % 3];
      if (a > b) std::swap(a, b);
      const auto [it, inserted] = ids.emplace(edge_key(a, b), static_cast<int>(t.ends.size()));
      if (inserted) {
        t.ends.push_back({a, b});
        edge_faces.push_back({f, -1});
      } else {
        edge_faces[it->second][1] = f;
      }
      t.face_edges[f][k] = it->second;
    }
  }
  t.face_neighbors.resize(mesh.faces.size());
  for (int f = 0; f < mesh.num_faces(); ++f)
    for (int k = 0; k < 3; ++k) {
      const auto& ef = edge_faces[t.face_edges[f][k]];
      t.face_neighbors[f][k] = ef[0] == f ? ef[1] : ef[0];
    }
  return t;
}

std::vector<std::vector<int>> vertex_faces(const TriMesh& mesh) {
  std::vector<std::vector<int>> out(mesh.vertices.size());
  for (int f = 0; f < mesh.num_faces(); ++f)
    for (int v : mesh.faces[f]) out[v].push_back(f);
  return out;
}

std::vector<std::vector<int>> vertex_neighbors(const TriMesh& mesh) {
  std::vector<std::vector<int>> out(mesh.vertices.size());
  for (const Face& t : mesh.faces)
    for (int k = 0; k < 3; ++k) {
      out[t[k]].push_back(t[(k + 1) % 3]);
      out[t[k]].push_back(t[(k + 2) % 3]);
    }
  for (auto& n : out) {
    std::sort(n.begin(), n.end());
    n.erase(std::unique(n.begin(), n.end()), n.end());
  }
  return out;
}

double face_area(const TriMesh& mesh, int f) {
  const Face& t = mesh.faces[f];
  const Vec3& a = mesh.vertices[t[0]];
  return 0.5 * (mesh.vertices[t[1]] - a).cross(mesh.vertices[t[2]] - a).norm();
}

std::vector<double> edge_lengths(const TriMesh& mesh, const EdgeTable& edges) {
  std::vector<double> out(edges.ends.size());
  for (std::size_t e = 0; e < out.size(); ++e)
    out[e] = (mesh.vertices[edges.ends[e][0]] - mesh.vertices[edges.ends[e][1]]).norm();
  return out;
}

MeshSample make_sample(const TriMesh& mesh, int face, const Vec3& bary) {
  const Face& t = mesh.faces.at(face);
  MeshSample s;
  s.face = face;
  s.bary = bary;
  s.position = bary[0] * mesh.vertices[t[0]] + bary[1] * mesh.vertices[t[1]] +
               bary[2] * mesh.vertices[t[2]];
  return s;
}

std::vector<double> face_weights(const TriMesh& mesh, const MeshDensity& density) {
  std::vector<double> w(mesh.faces.size());
  switch (density.kind) {
    case MeshDensity::Kind::uniform:
      break;
    case MeshDensity::Kind::per_vertex:
      if (density.values.size() != mesh.vertices.size())
        throw MeshError("per-vertex density has " + std::to_string(density.values.size()) +
                        " values for " + std::to_string(mesh.vertices.size()) + " vertices");
      break;
    case MeshDensity::Kind::per_face:
      if (density.values.size() != mesh.faces.size())
        throw MeshError("per-face density has " + std::to_string(density.values.size()) +
                        " values for " + std::to_string(mesh.faces.size()) + " faces");
      break;
  }
  for (double v : density.values)
    if (!(v >= 0.0) || !std::isfinite(v)) throw MeshError("density values must be finite and nonnegative");

  double total = 0.0;
  for (int f = 0; f < mesh.num_faces(); ++f) {
    double rho = 1.0;
    if (density.kind == MeshDensity::Kind::per_vertex) {
      const Face& t = mesh.faces[f];
      rho = (density.values[t[0]] + density.values[t[1]] + density.values[t[2]]) / 3.0;
    } else if (density.kind == MeshDensity::Kind::per_face) {
      rho = density.values[f];
    }
    w[f] = face_area(mesh, f) * rho;
    total += w[f];
  }
  if (!(total > 0.0)) throw MeshError("density has zero total weight");
  return w;
}

std::vector<MeshSample> sample_faces(const TriMesh& mesh, const MeshDensity& density,
                                     std::size_t m, Rng& rng) {
  const std::vector<double> w = face_weights(mesh, density);
  std::vector<MeshSample> out;
  if (m == 0) return out;
  out.reserve(m);
  std::discrete_distribution<int> pick(w.begin(), w.end());
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  for (std::size_t i = 0; i < m; ++i) {
    const int f = pick(rng);
    const double r1 = std::sqrt(uni(rng)), r2 = uni(rng);
    out.push_back(make_sample(mesh, f, Vec3(1.0 - r1, r1 * (1.0 - r2), r1 * r2)));
  }
  return out;
}

}  // namespace nesots
