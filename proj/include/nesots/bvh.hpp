#pragma once

#include "nesots/layout.hpp"

#include <optional>
#include <vector>

namespace nesots {

struct RayHit {
  int face = -1;
  Vec3 bary = Vec3::Zero();
};

/// Bounding volume hierarchy over the placed triangles of a layout, queried
/// with rays from the ambient origin.
class LayoutBvh {
public:
  LayoutBvh(const TriMesh& mesh, const Layout& layout);

  /// First face crossed by the ray from (0, 0, 0) through p, with the
  /// Euclidean barycentric coordinates of the crossing.
  [[nodiscard]] std::optional<RayHit> cast(const Vec3& p) const;

private:
  struct Node {
    Vec3 lo, hi;
    int left = -1, right = -1;  ///< children, or -1 for a leaf
    int begin = 0, end = 0;     ///< triangle range for leaves
  };
  struct Tri {
    Vec3 a, b, c;
    int face;
  };

  int build(int begin, int end);

  std::vector<Tri> tris_;
  std::vector<Node> nodes_;
};

/// Pulls manifold points back to the mesh. Entries are empty for points whose
/// ray misses the layout.
std::vector<std::optional<MeshSample>> map_to_mesh(const std::vector<Vec>& points, const TriMesh& mesh,
                                                   const LayoutBvh& bvh);

}  // namespace nesots
