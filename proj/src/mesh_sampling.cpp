#include "nesots/mesh_sampling.hpp"

#include <set>

namespace nesots {

namespace {

constexpr std::uint64_t kTargetTag = 0x7461726765;  // "targe"
constexpr std::uint64_t kStartTag = 0x7374617274;   // "start"
constexpr std::uint64_t kRoundTag = 0x726f756e64;   // "round"

std::vector<MeshSample> draw_target(const TriMesh& mesh, const MeshDensity& density,
                                    const MeshSamplerConfig& cfg) {
  Rng rng = derive_stream(cfg.sampler.seed, 0, 0, kTargetTag);
  return sample_faces(mesh, density, cfg.target_size(), rng);
}

std::vector<MeshSample> draw_start(const std::vector<MeshSample>& target, const MeshSamplerConfig& cfg) {
  if (cfg.sampler.n > target.size()) throw ConfigError("n must not exceed m");
  Rng rng = derive_stream(cfg.sampler.seed, 0, 0, kStartTag);
  std::vector<MeshSample> out;
  out.reserve(cfg.sampler.n);
  for (int i : subsample_indices(target.size(), cfg.sampler.n, rng)) out.push_back(target[i]);
  return out;
}

}  // namespace

double MeshRunResult::mean_samples_per_patch() const {
  double total = 0.0;
  int count = 0;
  for (const PatchRound& r : rounds) {
    total += r.mu_count;
    ++count;
  }
  return count ? total / count : 0.0;
}

MeshRunResult sample_mesh_spherical(const TriMesh& mesh, const Layout& layout, const MeshDensity& density,
                                    const MeshSamplerConfig& cfg) {
  if (mesh.genus != 0) throw MeshError("spherical pipeline needs genus 0 (got " + std::to_string(mesh.genus) + ")");
  if (layout.space != Space::sphere || layout.faces.size() != mesh.faces.size())
    throw MeshError("spherical pipeline needs a layout covering every face");

  MeshRunResult res;
  const std::vector<MeshSample> target = draw_target(mesh, density, cfg);
  res.initial = draw_start(target, cfg);
  const DiscreteMeasure nu = restrict_to_layout(mesh, target, layout).measure;
  const DiscreteMeasure mu0 = restrict_to_layout(mesh, res.initial, layout).measure;

  RunResult run = nesots_run(mu0, nu, cfg.sampler);
  res.trace = std::move(run.trace);

  const LayoutBvh bvh(mesh, layout);
  const auto mapped = map_to_mesh(run.samples.atoms, mesh, bvh);
  res.samples = res.initial;
  for (std::size_t i = 0; i < mapped.size(); ++i)
    if (mapped[i]) res.samples[i] = *mapped[i];
  res.visits.assign(mesh.vertices.size(), 1);
  return res;
}

MeshRunResult sample_mesh_hyperbolic(const TriMesh& mesh, const EdgeTable& edges, const YamabeResult& flow,
                                     const MeshDensity& density, const MeshSamplerConfig& cfg) {
  if (mesh.genus < 2) throw MeshError("hyperbolic pipeline needs genus >= 2 (got " + std::to_string(mesh.genus) + ")");
  if (!(cfg.eps > 1.0)) throw ConfigError("eps must exceed 1");
  if (cfg.N < 0) throw ConfigError("N must be >= 0");
  validate(cfg.sampler, cfg.target_size(), Space::hyperbolic);

  const std::vector<double> ell = hyperbolic_lengths(edges, flow);
  MeshRunResult res;
  const std::vector<MeshSample> target = draw_target(mesh, density, cfg);
  res.initial = draw_start(target, cfg);
  res.samples = res.initial;
  res.visits.assign(mesh.vertices.size(), 0);

  std::set<std::pair<int, int>> queue;  // (visits, vertex)
  for (int v = 0; v < mesh.num_vertices(); ++v) queue.emplace(0, v);

  for (int round = 0; round < cfg.N; ++round) {
    PatchRound pr;
    pr.origin = queue.begin()->second;

    const Layout layout = build_local_layout(mesh, edges, ell, pr.origin, cfg.eps);
    for (int v = 0; v < mesh.num_vertices(); ++v) {
      if (!layout.placed[v]) continue;
      queue.erase({res.visits[v], v});
      queue.emplace(++res.visits[v], v);
    }
    pr.faces = static_cast<int>(layout.faces.size());

    const Restriction mu = restrict_to_layout(mesh, res.samples, layout);
    const Restriction nu = restrict_to_layout(mesh, target, layout);
    pr.mu_count = static_cast<int>(mu.measure.size());
    pr.nu_count = static_cast<int>(nu.measure.size());
    if (pr.mu_count == 0 || pr.nu_count < pr.mu_count) {
      pr.skipped = true;
      res.rounds.push_back(pr);
      continue;
    }

    SamplerConfig inner = cfg.sampler;
    inner.seed = derive_stream(cfg.sampler.seed, static_cast<std::uint64_t>(round), 0, kRoundTag)();
    const RunResult run = nesots_run(mu.measure, nu.measure, inner);
    if (!run.trace.energy.empty()) pr.energy = run.trace.energy.front();

    const LayoutBvh bvh(mesh, layout);
    const auto mapped = map_to_mesh(run.samples.atoms, mesh, bvh);
    for (std::size_t i = 0; i < mapped.size(); ++i) {
      if (mapped[i]) res.samples[mu.source[i]] = *mapped[i];
      else ++pr.missed;
    }
    res.rounds.push_back(pr);
  }
  return res;
}

}  // namespace nesots
