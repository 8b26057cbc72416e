#include "nesots/bvh.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace nesots {

namespace {

constexpr int kLeafSize = 4;
constexpr double kEdgeSlack = 1e-12;

bool ray_hits_box(const Vec3& dir, const Vec3& lo, const Vec3& hi) {
  double t0 = 0.0, t1 = std::numeric_limits<double>::infinity();
  for (int k = 0; k < 3; ++k) {
    if (dir[k] == 0.0) {
      if (lo[k] > 0.0 || hi[k] < 0.0) return false;
      continue;
    }
    double a = lo[k] / dir[k], b = hi[k] / dir[k];
    if (a > b) std::swap(a, b);
    t0 = std::max(t0, a);
    t1 = std::min(t1, b);
    if (t0 > t1) return false;
  }
  return true;
}

// Moller-Trumbore from the origin; returns false for misses and t <= 0.
bool intersect(const Vec3& dir, const Vec3& a, const Vec3& b, const Vec3& c, Vec3& bary) {
  const Vec3 e1 = b - a, e2 = c - a;
  const Vec3 pv = dir.cross(e2);
  const double det = e1.dot(pv);
  if (std::abs(det) < 1e-300) return false;
  const double inv = 1.0 / det;
  const Vec3 tv = -a;
  const double u = tv.dot(pv) * inv;
  const Vec3 qv = tv.cross(e1);
  const double v = dir.dot(qv) * inv;
  const double t = e2.dot(qv) * inv;
  if (t <= 0.0) return false;
  if (u < -kEdgeSlack || v < -kEdgeSlack || u + v > 1.0 + kEdgeSlack) return false;
  bary = Vec3(1.0 - u - v, u, v);
  return true;
}

}  // namespace

LayoutBvh::LayoutBvh(const TriMesh& mesh, const Layout& layout) {
  tris_.reserve(layout.faces.size());
  for (int f : layout.faces) {
    const Face& t = mesh.faces[f];
    tris_.push_back({layout.positions[t[0]], layout.positions[t[1]], layout.positions[t[2]], f});
  }
  if (!tris_.empty()) {
    nodes_.reserve(2 * tris_.size() / kLeafSize + 2);
    build(0, static_cast<int>(tris_.size()));
  }
}

int LayoutBvh::build(int begin, int end) {
  Node node;
  node.lo = Vec3::Constant(std::numeric_limits<double>::infinity());
  node.hi = -node.lo;
  Vec3 clo = node.lo, chi = node.hi;
  for (int i = begin; i < end; ++i) {
    for (const Vec3* p : {&tris_[i].a, &tris_[i].b, &tris_[i].c}) {
      node.lo = node.lo.cwiseMin(*p);
      node.hi = node.hi.cwiseMax(*p);
    }
    const Vec3 centroid = (tris_[i].a + tris_[i].b + tris_[i].c) / 3.0;
    clo = clo.cwiseMin(centroid);
    chi = chi.cwiseMax(centroid);
  }
  const int id = static_cast<int>(nodes_.size());
  nodes_.push_back(node);
  if (end - begin <= kLeafSize) {
    nodes_[id].begin = begin;
    nodes_[id].end = end;
    return id;
  }
  int axis = 0;
  (chi - clo).maxCoeff(&axis);
  const int mid = (begin + end) / 2;
  std::nth_element(tris_.begin() + begin, tris_.begin() + mid, tris_.begin() + end,
                   [axis](const Tri& x, const Tri& y) {
                     const double cx = x.a[axis] + x.b[axis] + x.c[axis];
                     const double cy = y.a[axis] + y.b[axis] + y.c[axis];
                     return cx < cy || (cx == cy && x.face < y.face);
                   });
  const int left = build(begin, mid);
  const int right = build(mid, end);
  nodes_[id].left = left;
  nodes_[id].right = right;
  return id;
}

std::optional<RayHit> LayoutBvh::cast(const Vec3& p) const {
  if (nodes_.empty()) return std::nullopt;
  std::optional<RayHit> best;
  double best_margin = -std::numeric_limits<double>::infinity();
  std::vector<int> stack{0};
  while (!stack.empty()) {
    const Node& n = nodes_[stack.back()];
    stack.pop_back();
    if (!ray_hits_box(p, n.lo, n.hi)) continue;
    if (n.left < 0) {
      for (int i = n.begin; i < n.end; ++i) {
        Vec3 bary;
        if (!intersect(p, tris_[i].a, tris_[i].b, tris_[i].c, bary)) continue;
        // On shared edges, keep the face the point is deepest inside.
        const double margin = bary.minCoeff();
        if (margin > best_margin || (margin == best_margin && tris_[i].face < best->face)) {
          best_margin = margin;
          best = RayHit{tris_[i].face, bary};
        }
      }
    } else {
      stack.push_back(n.left);
      stack.push_back(n.right);
    }
  }
  if (best) {
    best->bary = best->bary.cwiseMax(0.0);
    best->bary /= best->bary.sum();
  }
  return best;
}

std::vector<std::optional<MeshSample>> map_to_mesh(const std::vector<Vec>& points, const TriMesh& mesh,
                                                   const LayoutBvh& bvh) {
  std::vector<std::optional<MeshSample>> out(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (points[i].size() != 3) throw MeshError("map_to_mesh expects points in R^3");
    if (const auto hit = bvh.cast(Vec3(points[i][0], points[i][1], points[i][2])))
      out[i] = make_sample(mesh, hit->face, hit->bary);
  }
  return out;
}

}  // namespace nesots
