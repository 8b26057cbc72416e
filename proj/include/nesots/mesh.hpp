#pragma once

#include "nesots/slicing.hpp"

#include <Eigen/Dense>

#include <array>
#include <stdexcept>
#include <vector>

namespace nesots {

class MeshError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

using Vec3 = Eigen::Vector3d;
using Face = std::array<int, 3>;

/// Closed, oriented, manifold triangle mesh.
struct TriMesh {
  std::vector<Vec3> vertices;
  std::vector<Face> faces;
  int genus = 0;

  [[nodiscard]] int num_vertices() const { return static_cast<int>(vertices.size()); }
  [[nodiscard]] int num_faces() const { return static_cast<int>(faces.size()); }
  [[nodiscard]] int euler_characteristic() const { return 2 - 2 * genus; }
};

/// Validates connectivity and computes the genus. Throws MeshError on
/// out-of-range or repeated indices, boundary edges, edges shared by more
/// than two faces, inconsistent orientation, non-manifold vertices or a
/// disconnected surface.
TriMesh make_mesh(std::vector<Vec3> vertices, std::vector<Face> faces);

/// Undirected edge table. Edge k of face f joins faces[f][k] and
/// faces[f][(k + 1) % 3] and is opposite to corner (k + 2) % 3.
struct EdgeTable {
  std::vector<std::array<int, 2>> ends;      ///< (i, j) with i < j
  std::vector<std::array<int, 3>> face_edges;  ///< edge ids per face
  std::vector<std::array<int, 3>> face_neighbors;  ///< face across each edge
};

EdgeTable build_edges(const TriMesh& mesh);

/// Faces incident to each vertex.
std::vector<std::vector<int>> vertex_faces(const TriMesh& mesh);

/// Vertex neighbors, sorted by id.
std::vector<std::vector<int>> vertex_neighbors(const TriMesh& mesh);

double face_area(const TriMesh& mesh, int f);
std::vector<double> edge_lengths(const TriMesh& mesh, const EdgeTable& edges);

/// A point on a mesh face.
struct MeshSample {
  int face = -1;
  Vec3 bary = Vec3::Zero();
  Vec3 position = Vec3::Zero();
};

MeshSample make_sample(const TriMesh& mesh, int face, const Vec3& bary);

/// Scalar density on a mesh, per vertex or per face. An empty value list is
/// the uniform density.
struct MeshDensity {
  enum class Kind { uniform, per_vertex, per_face };
  Kind kind = Kind::uniform;
  std::vector<double> values;
};

/// Selection weight of each face: area times mean density.
std::vector<double> face_weights(const TriMesh& mesh, const MeshDensity& density);

/// m samples, faces drawn proportionally to face_weights, uniform inside.
std::vector<MeshSample> sample_faces(const TriMesh& mesh, const MeshDensity& density,
                                     std::size_t m, Rng& rng);

}  // namespace nesots
