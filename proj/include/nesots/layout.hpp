#pragma once

#include "nesots/measure.hpp"
#include "nesots/mesh.hpp"

#include <string>
#include <vector>

namespace nesots {

/// Embedding of (part of) a mesh into S^2 or H^2. Positions are ambient
/// 3-vectors; only entries with placed[v] set are meaningful.
struct Layout {
  Space space = Space::hyperbolic;
  std::vector<Vec3> positions;
  std::vector<char> placed;
  std::vector<int> faces;  ///< placed face ids, in placement order
  int origin = -1;

  [[nodiscard]] int num_placed_vertices() const;
};

/// Breadth-first layout of the faces around v0 on the hyperboloid, using the
/// hyperbolic edge lengths ell (indexed like edges). v0 goes to the origin and
/// its first neighbor along +x. Each further face is attached across a placed
/// edge; faces with a vertex whose time coordinate exceeds eps, or whose
/// vertices were already placed elsewhere, are skipped.
Layout build_local_layout(const TriMesh& mesh, const EdgeTable& edges,
                          const std::vector<double>& ell, int v0, double eps);

/// Max over placed faces of | d_H(p_i, p_j) - ell_ij |.
double layout_edge_error(const TriMesh& mesh, const EdgeTable& edges,
                         const std::vector<double>& ell, const Layout& layout);

/// Layout on S^2 covering every face, from vertex positions on the unit
/// sphere (within 1e-6, then normalized).
Layout sphere_layout(const TriMesh& mesh, std::vector<Vec3> sphere_vertices);

/// Layout file: same format and face list as the mesh, vertices on S^2.
Layout load_sphere_layout(const TriMesh& mesh, const std::string& path);

/// Faces of a spherical layout whose orientation is not positive.
int count_flipped_faces(const TriMesh& mesh, const Layout& layout);

struct FallbackReport {
  std::vector<int> flips;           ///< per iteration, index 0 before smoothing
  std::vector<double> distortion;   ///< max/min ratio of layout to mesh edge lengths
};

/// Non-conformal spherical embedding of a genus-0 mesh: central projection
/// onto S^2 followed by tangential spring relaxation towards edge lengths
/// proportional to the mesh's. Throws MeshError if faces remain flipped.
Layout embed_sphere_fallback(const TriMesh& mesh, int iterations, FallbackReport* report = nullptr);

/// Samples on placed faces pushed to the layout by barycentric combination of
/// the placed vertices and normalization onto the manifold.
struct Restriction {
  DiscreteMeasure measure;
  std::vector<int> source;  ///< index of each atom in the input sample list
};

Restriction restrict_to_layout(const TriMesh& mesh, const std::vector<MeshSample>& samples,
                               const Layout& layout);

/// Sample point in layout coordinates; the face must be placed.
Vec3 layout_point(const TriMesh& mesh, const Layout& layout, const MeshSample& s);

}  // namespace nesots
