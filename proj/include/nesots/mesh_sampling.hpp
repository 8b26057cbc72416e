#pragma once

#include "nesots/bvh.hpp"
#include "nesots/layout.hpp"
#include "nesots/sampler.hpp"
#include "nesots/yamabe.hpp"

#include <vector>

namespace nesots {

struct MeshSamplerConfig {
  /// Inner sampler settings; n is the output size and K the iterations per
  /// patch (spherical path: total iterations).
  SamplerConfig sampler;
  std::size_t m = 0;  ///< target atoms drawn on the mesh; 0 selects 4 n
  int N = 500;        ///< patch rounds (hyperbolic path)
  double eps = 1.5;   ///< layout time threshold (hyperbolic path)

  [[nodiscard]] std::size_t target_size() const { return m ? m : 4 * sampler.n; }
};

struct PatchRound {
  int origin = -1;
  int faces = 0;
  int mu_count = 0;
  int nu_count = 0;
  int missed = 0;         ///< displacements dropped because the ray left the patch
  double energy = 0.0;    ///< first trace value of the round's inner run
  bool skipped = false;   ///< too few target atoms on the patch
};

struct MeshRunResult {
  std::vector<MeshSample> samples;
  std::vector<MeshSample> initial;  ///< subsample of the target the run starts from
  std::vector<PatchRound> rounds;   ///< hyperbolic path only
  RunTrace trace;                   ///< spherical path only
  std::vector<int> visits;          ///< times each vertex was in a patch

  [[nodiscard]] double mean_samples_per_patch() const;
};

/// Genus-0 pipeline: target sampled on the faces, pushed to the spherical
/// layout, optimized on S^2 and pulled back.
MeshRunResult sample_mesh_spherical(const TriMesh& mesh, const Layout& sphere_layout,
                                    const MeshDensity& density, const MeshSamplerConfig& cfg);

/// Genus >= 2 pipeline over N local hyperbolic patches. Each round lays out
/// the patch around the least visited vertex (ties by id), restricts the
/// current samples and the target to it, runs K sampler iterations and maps
/// the moved samples back.
MeshRunResult sample_mesh_hyperbolic(const TriMesh& mesh, const EdgeTable& edges,
                                     const YamabeResult& flow, const MeshDensity& density,
                                     const MeshSamplerConfig& cfg);

}  // namespace nesots
