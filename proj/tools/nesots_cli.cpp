// Command line driver: sampling on S^d, H^d, P^d and triangle meshes, and
// point set analysis. Every run writes its outputs and a manifest.json into
// the --out directory.

#include <nesots/analysis.hpp>
#include <nesots/layout.hpp>
#include <nesots/mesh_io.hpp>
#include <nesots/mesh_sampling.hpp>
#include <nesots/point_io.hpp>
#include <nesots/sampler.hpp>
#include <nesots/yamabe.hpp>

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace nesots;

namespace {

constexpr std::uint64_t kTargetTag = 0x74676574;     // "tget"
constexpr std::uint64_t kReferenceTag = 0x72656672;  // "refr"

struct Common {
  SamplerConfig cfg;
  std::size_t m = 0;
  std::string pooling = "median";
  std::string out = ".";
  std::string target = "";
  std::string target_file;
  int d = 2;
};

void add_sampler_flags(CLI::App* app, Common& c) {
  app->add_option("--n", c.cfg.n, "Output sample count")->check(CLI::PositiveNumber);
  app->add_option("--m", c.m, "Target atom count (default 4n)");
  app->add_option("--K", c.cfg.K, "Iterations");
  app->add_option("--L", c.cfg.L, "Slices per iteration");
  app->add_option("--gamma0", c.cfg.gamma0, "Initial step");
  app->add_option("--decay", c.cfg.decay, "Step multiplier per iteration (0: 0.05^(1/K))");
  app->add_option("--tau", c.cfg.tau, "Weiszfeld stability term");
  app->add_option("--p", c.cfg.p, "Ground cost exponent (1 or 2)");
  app->add_option("--seed", c.cfg.seed, "Random seed");
  app->add_option("--pooling", c.pooling, "mean or median");
  app->add_option("--out", c.out, "Output directory");
}

json sampler_json(const SamplerConfig& cfg) {
  return {{"n", cfg.n},           {"K", cfg.K},       {"L", cfg.L},
          {"gamma0", cfg.gamma0}, {"decay", cfg.effective_decay()},
          {"tau", cfg.tau},       {"p", cfg.p},       {"seed", cfg.seed},
          {"pooling", to_string(cfg.pooling)}};
}

std::size_t target_size(const Common& c) { return c.m ? c.m : 4 * c.cfg.n; }

Rng target_rng(const Common& c) { return derive_stream(c.cfg.seed, 0, 0, kTargetTag); }

fs::path prepare_out(const std::string& dir) {
  fs::create_directories(dir);
  return fs::path(dir);
}

void write_json(const fs::path& path, const json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

json base_manifest(const std::string& command, const std::vector<std::string>& args) {
  return {{"command", command}, {"version", NESOTS_VERSION}, {"args", args}};
}

Vec parse_vector(const std::string& text) {
  std::vector<double> v;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      v.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw ConfigError("malformed number '" + item + "' in '" + text + "'");
    }
  }
  return Eigen::Map<Vec>(v.data(), static_cast<Eigen::Index>(v.size()));
}

// ---------------------------------------------------------------- sphere

struct SphereArgs {
  Common c;
  double cap_angle = 0.5;
  std::vector<std::string> lobes;
  double uniform_weight = 0.2;
};

std::vector<VonMisesFisher> default_lobes() {
  auto unit = [](double x, double y, double z) {
    Vec v(3);
    v << x, y, z;
    return Vec(v.normalized());
  };
  return {{unit(0, 0, 1), 20.0, 0.5}, {unit(1, 0, 0), 8.0, 0.3}, {unit(0, -0.6, -0.8), 40.0, 0.2}};
}

DiscreteMeasure sphere_target(const SphereArgs& a, json& info) {
  const Common& c = a.c;
  const std::string kind = c.target.empty() ? (c.target_file.empty() ? "uniform" : "file") : c.target;
  info["target"] = kind;
  Rng rng = target_rng(c);
  const std::size_t m = target_size(c);
  if (kind == "file") {
    if (c.target_file.empty()) throw ConfigError("--target file needs --target-file");
    info["target_file"] = c.target_file;
    DiscreteMeasure nu = read_points_csv(c.target_file, Space::sphere);
    if (nu.space != Space::sphere) throw ConfigError("target file does not hold sphere points");
    return nu;
  }
  info["m"] = m;
  if (kind == "uniform") {
    info["generator"] = c.d == 2 ? "fibonacci-lattice" : "iid";
    return c.d == 2 ? uniform_sphere_lattice(m, rng) : uniform_sphere(c.d, m, rng);
  }
  Vec pole = Vec::Zero(c.d + 1);
  pole[c.d] = 1.0;
  if (kind == "cap") {
    info["cap_angle"] = a.cap_angle;
    return uniform_cap(pole, a.cap_angle, m, rng);
  }
  if (kind == "mixture") {
    std::vector<VonMisesFisher> lobes;
    if (a.lobes.empty()) {
      if (c.d != 2) throw ConfigError("the default mixture is defined on S^2; pass --lobe");
      lobes = default_lobes();
    }
    for (const std::string& s : a.lobes) {
      const Vec v = parse_vector(s);
      if (v.size() != c.d + 3) throw ConfigError("--lobe takes d+1 mean coordinates, kappa and weight");
      lobes.push_back({v.head(c.d + 1).normalized(), v[c.d + 1], v[c.d + 2]});
    }
    json jl = json::array();
    for (const auto& l : lobes)
      jl.push_back({{"mean", std::vector<double>(l.mean.data(), l.mean.data() + l.mean.size())},
                    {"kappa", l.kappa},
                    {"weight", l.weight}});
    info["lobes"] = jl;
    info["uniform_weight"] = a.uniform_weight;
    return vmf_mixture(lobes, a.uniform_weight, m, rng);
  }
  throw ConfigError("unknown sphere target '" + kind + "'");
}

void write_run(const fs::path& dir, const RunResult& r) {
  write_points_csv((dir / "points.csv").string(), r.samples);
  write_points_ply((dir / "points.ply").string(), r.samples.atoms);
  write_trace_csv((dir / "trace.csv").string(), r.trace.energy);
}

void cmd_sample_sphere(SphereArgs& a, const std::vector<std::string>& args) {
  a.c.cfg.pooling = pooling_from_string(a.c.pooling);
  if (a.c.d < 1) throw ConfigError("d must be >= 1");
  json m = base_manifest("sample-sphere", args);
  json target;
  const DiscreteMeasure nu = sphere_target(a, target);
  validate(a.c.cfg, nu.size(), Space::sphere);
  const RunResult r = nesots_run(nu, a.c.cfg);
  const fs::path dir = prepare_out(a.c.out);
  write_run(dir, r);
  m["space"] = "sphere";
  m["d"] = nu.dim();
  m["config"] = sampler_json(a.c.cfg);
  m["target"] = target;
  m["final_energy"] = r.trace.energy.empty() ? 0.0 : r.trace.energy.back();
  m["outputs"] = {"points.csv", "points.ply", "trace.csv"};
  write_json(dir / "manifest.json", m);
}

// ------------------------------------------------------------ hyperbolic

struct HyperArgs {
  Common c;
  double max_time = std::cosh(1.5);
  std::vector<std::string> balls;
};

void cmd_sample_hyperbolic(HyperArgs& a, const std::vector<std::string>& args) {
  a.c.cfg.pooling = pooling_from_string(a.c.pooling);
  if (a.c.d < 1) throw ConfigError("d must be >= 1");
  json m = base_manifest("sample-hyperbolic", args);
  json target;
  const std::string kind = a.c.target.empty() ? (a.c.target_file.empty() ? "patch" : "file") : a.c.target;
  target["target"] = kind;
  Rng rng = target_rng(a.c);
  DiscreteMeasure nu;
  if (kind == "file") {
    if (a.c.target_file.empty()) throw ConfigError("--target file needs --target-file");
    target["target_file"] = a.c.target_file;
    nu = read_points_csv(a.c.target_file, Space::hyperbolic);
    if (nu.space != Space::hyperbolic) throw ConfigError("target file does not hold hyperboloid points");
  } else if (kind == "patch") {
    if (!(a.max_time > 1.0)) throw ConfigError("--max-time must exceed 1");
    target["max_time"] = a.max_time;
    target["m"] = target_size(a.c);
    nu = uniform_hyper_patch(a.c.d, a.max_time, target_size(a.c), rng);
  } else if (kind == "balls") {
    if (a.balls.empty()) throw ConfigError("--target balls needs at least one --ball");
    std::vector<HyperBall> balls;
    json jb = json::array();
    for (const std::string& s : a.balls) {
      const Vec v = parse_vector(s);
      if (v.size() != a.c.d + 2) throw ConfigError("--ball takes d spatial coordinates, radius and weight");
      Vec center(a.c.d + 1);
      center.head(a.c.d) = v.head(a.c.d);
      center[a.c.d] = std::sqrt(1.0 + v.head(a.c.d).squaredNorm());
      balls.push_back({center, v[a.c.d], v[a.c.d + 1]});
      jb.push_back({{"center", std::vector<double>(center.data(), center.data() + center.size())},
                    {"radius", v[a.c.d]},
                    {"weight", v[a.c.d + 1]}});
    }
    target["balls"] = jb;
    target["m"] = target_size(a.c);
    nu = hyper_ball_mixture(balls, target_size(a.c), rng);
  } else {
    throw ConfigError("unknown hyperbolic target '" + kind + "'");
  }
  validate(a.c.cfg, nu.size(), Space::hyperbolic);
  const RunResult r = nesots_run(nu, a.c.cfg);
  const fs::path dir = prepare_out(a.c.out);
  write_run(dir, r);
  m["space"] = "hyperbolic";
  m["d"] = nu.dim();
  m["config"] = sampler_json(a.c.cfg);
  m["target"] = target;
  m["final_energy"] = r.trace.energy.empty() ? 0.0 : r.trace.energy.back();
  m["outputs"] = {"points.csv", "points.ply", "trace.csv"};
  write_json(dir / "manifest.json", m);
}

// ------------------------------------------------------------ projective

struct ProjectiveArgs {
  Common c;
  std::string mode = "points";
};

// Random lines meeting the unit disk: uniform normal angle and offset.
std::vector<Line2> disk_lines(std::size_t m, Rng& rng) {
  std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi), offset(-1.0, 1.0);
  std::vector<Line2> out(m);
  for (auto& l : out) {
    const double t = angle(rng);
    l = {std::cos(t), std::sin(t), offset(rng)};
  }
  return out;
}

void cmd_sample_projective(ProjectiveArgs& a, const std::vector<std::string>& args) {
  Common& c = a.c;
  c.cfg.pooling = pooling_from_string(c.pooling);
  json m = base_manifest("sample-projective", args);
  json target;
  target["mode"] = a.mode;
  Rng rng = target_rng(c);
  DiscreteMeasure base;
  if (a.mode == "points" || a.mode == "quaternion") {
    const int d = a.mode == "quaternion" ? 3 : c.d;
    if (a.mode == "quaternion" && c.d != 2 && c.d != 3)
      throw ConfigError("quaternion mode works on P^3; drop --d");
    if (!c.target_file.empty()) {
      target["target_file"] = c.target_file;
      base = read_points_csv(c.target_file, Space::sphere);
      if (base.dim() != d) throw ConfigError("target file has the wrong dimension");
    } else {
      const std::size_t half = (target_size(c) + 1) / 2;
      target["generator"] = d == 2 ? "fibonacci-lattice" : "iid";
      base = d == 2 ? uniform_sphere_lattice(half, rng) : uniform_sphere(d, half, rng);
    }
  } else if (a.mode == "lines") {
    std::vector<Line2> lines;
    if (!c.target_file.empty()) {
      target["target_file"] = c.target_file;
      for (const auto& row : read_table_csv(c.target_file)) {
        if (row.size() != 3) throw IoError(c.target_file + ": line rows need a,b,c");
        lines.push_back({row[0], row[1], row[2]});
      }
    } else {
      target["generator"] = "disk-lines";
      lines = disk_lines((target_size(c) + 1) / 2, rng);
    }
    base = make_affine_line_measure(lines);
  } else {
    throw ConfigError("unknown projective mode '" + a.mode + "'");
  }
  base.space = Space::sphere;
  const DiscreteMeasure nu = symmetrize_antipodal(base);
  target["m"] = nu.size();
  validate(c.cfg, nu.size(), Space::projective);
  RunResult r = projective_run(nu, c.cfg);
  for (Vec& x : r.samples.atoms) x = canonical_sign(x);

  const fs::path dir = prepare_out(c.out);
  std::vector<std::string> outputs{"trace.csv"};
  write_trace_csv((dir / "trace.csv").string(), r.trace.energy);
  if (a.mode == "points") {
    DiscreteMeasure anti = r.samples;
    for (Vec& x : anti.atoms) x = -x;
    write_points_csv((dir / "points.csv").string(), r.samples);
    write_points_csv((dir / "antipodes.csv").string(), anti);
    write_points_ply((dir / "points.ply").string(), r.samples.atoms);
    outputs.insert(outputs.end(), {"points.csv", "antipodes.csv", "points.ply"});
  } else if (a.mode == "quaternion") {
    std::vector<std::vector<double>> quats, rots;
    for (const Vec& q : r.samples.atoms) {
      quats.emplace_back(q.data(), q.data() + 4);
      const Mat3 rot = quaternion_to_rotation(q);
      std::vector<double> row;
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) row.push_back(rot(i, j));
      rots.push_back(std::move(row));
    }
    write_table_csv((dir / "quaternions.csv").string(), "x,y,z,w", quats);
    write_table_csv((dir / "rotations.csv").string(), "r00,r01,r02,r10,r11,r12,r20,r21,r22", rots);
    outputs.insert(outputs.end(), {"quaternions.csv", "rotations.csv"});
  } else {
    std::vector<std::vector<double>> rows;
    for (const Vec& x : r.samples.atoms) rows.push_back({x[0], x[1], x[2]});
    write_table_csv((dir / "lines.csv").string(), "a,b,c", rows);
    outputs.push_back("lines.csv");
  }
  m["space"] = "projective";
  m["d"] = nu.dim();
  m["config"] = sampler_json(c.cfg);
  m["target"] = target;
  m["final_energy"] = r.trace.energy.empty() ? 0.0 : r.trace.energy.back();
  m["outputs"] = outputs;
  write_json(dir / "manifest.json", m);
}

void require_file(const std::string& path) {
  if (!fs::is_regular_file(path)) throw IoError("cannot open " + path);
}

// ------------------------------------------------------------------ mesh

struct MeshArgs {
  Common c;
  std::string mesh;
  std::string density;
  std::string density_kind = "vertex";
  std::string layout;
  bool fallback = false;
  int fallback_iterations = 200;
  int N = 500;
  double eps = 1.5;
  std::string yamabe_cache;
};

// FNV-1a over the raw bytes of the edge lengths and faces, identifying the
// metric a cached set of conformal factors belongs to.
std::string metric_hash(const TriMesh& mesh, const std::vector<double>& lengths) {
  std::uint64_t h = 1469598103934665603ull;
  auto feed = [&](const void* p, std::size_t n) {
    const auto* b = static_cast<const unsigned char*>(p);
    for (std::size_t i = 0; i < n; ++i) h = (h ^ b[i]) * 1099511628211ull;
  };
  feed(lengths.data(), lengths.size() * sizeof(double));
  feed(mesh.faces.data(), mesh.faces.size() * sizeof(Face));
  std::ostringstream ss;
  ss << std::hex << h;
  return ss.str();
}

YamabeResult solve_or_load_metric(const TriMesh& mesh, const EdgeTable& edges, const std::string& cache,
                                  json& info) {
  const std::vector<double> lengths = edge_lengths(mesh, edges);
  const std::string hash = metric_hash(mesh, lengths);
  info["metric_hash"] = hash;
  if (!cache.empty() && fs::exists(cache)) {
    std::ifstream in(cache);
    json j;
    try {
      in >> j;
    } catch (const json::exception& e) {
      throw IoError(cache + ": " + e.what());
    }
    if (j.value("metric_hash", "") == hash) {
      YamabeResult r;
      r.lengths = lengths;
      const auto u = j.at("u").get<std::vector<double>>();
      if (static_cast<int>(u.size()) != mesh.num_vertices()) throw IoError(cache + ": wrong factor count");
      r.u = Eigen::Map<const Eigen::VectorXd>(u.data(), static_cast<Eigen::Index>(u.size()));
      std::vector<double> ell = hyperbolic_lengths(edges, r);
      const Eigen::VectorXd theta = angle_sums(mesh, edges, ell);
      r.max_defect = (theta.array() - 2.0 * std::numbers::pi).abs().maxCoeff();
      if (r.max_defect < 1e-8) {
        info["cache"] = "hit";
        info["max_defect"] = r.max_defect;
        return r;
      }
    }
    info["cache"] = "stale";
  } else {
    info["cache"] = cache.empty() ? "off" : "miss";
  }
  YamabeResult r = yamabe_flow(mesh, edges, lengths);
  info["iterations"] = r.iterations;
  info["max_defect"] = r.max_defect;
  if (!cache.empty()) {
    json j{{"metric_hash", hash},
           {"num_vertices", mesh.num_vertices()},
           {"u", std::vector<double>(r.u.data(), r.u.data() + r.u.size())}};
    write_json(cache, j);
  }
  return r;
}

void cmd_sample_mesh(MeshArgs& a, const std::vector<std::string>& args, bool k_given) {
  Common& c = a.c;
  c.cfg.pooling = pooling_from_string(c.pooling);
  json m = base_manifest("sample-mesh", args);
  require_file(a.mesh);
  const TriMesh mesh = load_mesh(a.mesh);
  m["mesh"] = {{"path", a.mesh}, {"vertices", mesh.num_vertices()}, {"faces", mesh.num_faces()}, {"genus", mesh.genus}};
  if (mesh.genus == 1)
    throw MeshError("unsupported genus 1: the flat metric case is not handled");

  MeshDensity density;
  if (!a.density.empty()) {
    if (a.density_kind == "vertex") {
      density = load_density_csv(a.density, MeshDensity::Kind::per_vertex, mesh.vertices.size());
    } else if (a.density_kind == "face") {
      density = load_density_csv(a.density, MeshDensity::Kind::per_face, mesh.faces.size());
    } else {
      throw ConfigError("--density-kind must be vertex or face");
    }
    m["density"] = {{"path", a.density}, {"kind", a.density_kind}};
  }

  MeshSamplerConfig cfg;
  cfg.sampler = c.cfg;
  cfg.m = c.m;
  cfg.N = a.N;
  cfg.eps = a.eps;
  const fs::path dir = prepare_out(c.out);
  MeshRunResult r;
  json stats;
  if (mesh.genus == 0) {
    if (!k_given) cfg.sampler.K = 300;
    Layout layout;
    if (!a.layout.empty()) {
      layout = load_sphere_layout(mesh, a.layout);
      m["layout"] = {{"source", "file"}, {"path", a.layout}};
    } else if (a.fallback) {
      FallbackReport rep;
      layout = embed_sphere_fallback(mesh, a.fallback_iterations, &rep);
      m["layout"] = {{"source", "fallback"},
                     {"iterations", a.fallback_iterations},
                     {"distortion", rep.distortion.back()}};
    } else {
      throw ConfigError("genus-0 meshes need --layout or --fallback-embed");
    }
    validate(cfg.sampler, cfg.target_size(), Space::sphere);
    r = sample_mesh_spherical(mesh, layout, density, cfg);
    write_trace_csv((dir / "trace.csv").string(), r.trace.energy);
    m["path"] = "spherical";
  } else {
    const EdgeTable edges = build_edges(mesh);
    json metric;
    const YamabeResult flow = solve_or_load_metric(mesh, edges, a.yamabe_cache, metric);
    m["metric"] = metric;
    r = sample_mesh_hyperbolic(mesh, edges, flow, density, cfg);
    std::vector<double> energy;
    std::vector<std::vector<double>> rows;
    int skipped = 0;
    long long missed = 0;
    for (std::size_t i = 0; i < r.rounds.size(); ++i) {
      const PatchRound& p = r.rounds[i];
      if (!p.skipped) energy.push_back(p.energy);
      skipped += p.skipped;
      missed += p.missed;
      rows.push_back({static_cast<double>(i), static_cast<double>(p.origin), static_cast<double>(p.faces),
                      static_cast<double>(p.mu_count), static_cast<double>(p.nu_count),
                      static_cast<double>(p.missed), p.energy, p.skipped ? 1.0 : 0.0});
    }
    write_trace_csv((dir / "trace.csv").string(), energy);
    write_table_csv((dir / "rounds.csv").string(), "round,origin,faces,mu,nu,missed,energy,skipped", rows);
    stats = {{"rounds", r.rounds.size()},
             {"skipped_rounds", skipped},
             {"missed_updates", missed},
             {"mean_samples_per_patch", r.mean_samples_per_patch()}};
    m["path"] = "hyperbolic";
    m["patches"] = stats;
  }
  write_mesh_samples_csv((dir / "samples.csv").string(), r.samples);
  write_mesh_samples_ply((dir / "samples.ply").string(), r.samples);
  json jc = sampler_json(cfg.sampler);
  jc["m"] = cfg.target_size();
  jc["N"] = cfg.N;
  jc["eps"] = cfg.eps;
  m["config"] = jc;
  m["outputs"] = mesh.genus == 0 ? json{"samples.csv", "samples.ply", "trace.csv"}
                                 : json{"samples.csv", "samples.ply", "trace.csv", "rounds.csv"};
  write_json(dir / "manifest.json", m);
}

// --------------------------------------------------------------- analyze

struct AnalyzeArgs {
  std::string input;
  std::string mesh;
  std::string target_file;
  std::string out = ".";
  int lmax = 64;
  int probes = 256;
  int bins = 32;
  double rmax = 0.0;
  std::uint64_t seed = 1;
  std::size_t reference = 1500;
};

bool is_mesh_samples_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  std::string first;
  std::getline(in, first);
  return first.rfind("faceId", 0) == 0;
}

void cmd_analyze(AnalyzeArgs& a, const std::vector<std::string>& args) {
  json m = base_manifest("analyze", args);
  m["input"] = a.input;
  if (a.bins < 1) throw ConfigError("--bins must be >= 1");
  const fs::path dir = prepare_out(a.out);
  std::vector<std::string> outputs;

  if (is_mesh_samples_file(a.input)) {
    if (a.mesh.empty()) throw ConfigError("mesh samples need --mesh");
    require_file(a.mesh);
    const TriMesh mesh = load_mesh(a.mesh);
    const auto samples = read_mesh_samples_csv(a.input);
    for (const MeshSample& s : samples)
      if (s.face < 0 || s.face >= mesh.num_faces()) throw IoError(a.input + ": face id out of range");
    double area = 0.0;
    for (int f = 0; f < mesh.num_faces(); ++f) area += face_area(mesh, f);
    const double rmax = a.rmax > 0.0 ? a.rmax : 4.0 * std::sqrt(area / static_cast<double>(samples.size()));
    Rng rng = derive_stream(a.seed, 0, 0, kReferenceTag);
    const auto ref = sample_faces(mesh, {}, a.reference, rng);
    const auto fraction = empirical_pair_fraction(mesh_pair_distances(mesh, ref), rmax, a.bins);
    const auto dist = mesh_pair_distances(mesh, samples);
    const PcfReport pcf = pair_correlation(dist, samples.size(), rmax, fraction);
    write_pcf_csv((dir / "pcf.csv").string(), pcf);
    outputs.push_back("pcf.csv");
    m["kind"] = "mesh-samples";
    m["count"] = samples.size();
    m["pcf"] = {{"rmax", rmax}, {"bins", a.bins}, {"reference", a.reference}, {"first_bin", pcf.g.front()}};
    m["min_distance"] = dist.empty() ? 0.0 : *std::min_element(dist.begin(), dist.end());
  } else {
    const DiscreteMeasure pts = read_points_csv(a.input, Space::sphere);
    m["kind"] = "points";
    m["space"] = to_string(pts.space);
    m["count"] = pts.size();
    m["d"] = pts.dim();
    m["min_distance"] = pts.size() > 1 ? min_pairwise_distance(pts) : 0.0;
    const bool s2 = pts.space != Space::hyperbolic && pts.dim() == 2;
    if (s2) {
      std::vector<Vec> atoms = pts.atoms;
      if (pts.space == Space::projective)
        for (const Vec& x : pts.atoms) atoms.push_back(-x);
      const SpectrumReport spec = sphere_power_spectrum(atoms, a.lmax);
      write_spectrum_csv((dir / "spectrum.csv").string(), spec);
      outputs.push_back("spectrum.csv");
      m["spectrum"] = {{"lmax", a.lmax}, {"mean_power_1_10", mean_power(spec, 1, std::min(10, a.lmax))}};

      const bool proj = pts.space == Space::projective;
      const double n_eff = static_cast<double>(proj ? 2 * pts.size() : pts.size());
      double rmax = a.rmax > 0.0 ? a.rmax : 4.0 * std::sqrt(4.0 * std::numbers::pi / n_eff);
      rmax = std::min(rmax, proj ? std::numbers::pi / 2 : std::numbers::pi);
      std::vector<double> fraction = sphere_pair_fraction(rmax, a.bins);
      // Folded distances on P^2 are twice as likely below pi / 2.
      if (proj)
        for (double& f : fraction) f *= 2.0;
      const PcfReport pcf = pair_correlation(pairwise_distances(pts), pts.size(), rmax, fraction);
      write_pcf_csv((dir / "pcf.csv").string(), pcf);
      outputs.push_back("pcf.csv");
      m["pcf"] = {{"rmax", rmax}, {"bins", a.bins}, {"first_bin", pcf.g.front()}};
    }
    DiscreteMeasure nu;
    bool have_target = false;
    if (!a.target_file.empty()) {
      nu = read_points_csv(a.target_file, pts.space == Space::hyperbolic ? Space::hyperbolic : Space::sphere);
      if (pts.space == Space::projective) nu.space = Space::projective;
      have_target = true;
      m["target"] = a.target_file;
    } else if (s2) {
      Rng rng = derive_stream(a.seed, 0, 0, kReferenceTag);
      const std::size_t size = std::max<std::size_t>(8192, 4 * pts.size());
      nu = uniform_sphere_lattice(size, rng);
      if (pts.space == Space::projective) nu.space = Space::projective;
      have_target = true;
      m["target"] = "uniform";
    }
    if (have_target) {
      m["sw_energy"] = sw_energy(pts, nu, a.probes, 2, a.seed);
      m["probes"] = a.probes;
    }
  }
  m["outputs"] = outputs;
  write_json(dir / "manifest.json", m);
}

// ------------------------------------------------------------------ main

int fail(const std::string& kind, const std::string& message, int code) {
  std::cerr << json{{"error", kind}, {"message", message}}.dump() << '\n';
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sliced optimal transport sampling on non-Euclidean domains"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(NESOTS_VERSION));
  const std::vector<std::string> args(argv + 1, argv + argc);

  SphereArgs sphere;
  auto* s = app.add_subcommand("sample-sphere", "Blue noise on S^d");
  add_sampler_flags(s, sphere.c);
  s->add_option("--d", sphere.c.d, "Sphere dimension");
  s->add_option("--target", sphere.c.target, "uniform, cap, mixture or file");
  s->add_option("--target-file", sphere.c.target_file, "Target points CSV");
  s->add_option("--cap-angle", sphere.cap_angle, "Cap half angle (radians)");
  s->add_option("--lobe", sphere.lobes, "Mixture lobe: mean coordinates,kappa,weight");
  s->add_option("--uniform-weight", sphere.uniform_weight, "Mixture background weight");

  HyperArgs hyper;
  auto* h = app.add_subcommand("sample-hyperbolic", "Blue noise on H^d");
  add_sampler_flags(h, hyper.c);
  h->add_option("--d", hyper.c.d, "Hyperbolic dimension");
  h->add_option("--target", hyper.c.target, "patch, balls or file");
  h->add_option("--target-file", hyper.c.target_file, "Target points CSV");
  h->add_option("--max-time", hyper.max_time, "Patch bound on the time coordinate");
  h->add_option("--ball", hyper.balls, "Ball: spatial center coordinates,radius,weight");

  ProjectiveArgs proj;
  auto* p = app.add_subcommand("sample-projective", "Blue noise on P^d");
  add_sampler_flags(p, proj.c);
  p->add_option("--d", proj.c.d, "Projective dimension");
  p->add_option("--mode", proj.mode, "points, quaternion or lines");
  p->add_option("--target-file", proj.c.target_file, "Target points (or a,b,c lines) CSV");

  MeshArgs mesh;
  mesh.c.cfg.K = 10;
  auto* ms = app.add_subcommand("sample-mesh", "Blue noise on a triangle mesh");
  add_sampler_flags(ms, mesh.c);
  ms->add_option("--mesh", mesh.mesh, "OBJ or PLY mesh")->required();
  ms->add_option("--density", mesh.density, "Density CSV (id,value)");
  ms->add_option("--density-kind", mesh.density_kind, "vertex or face");
  ms->add_option("--layout", mesh.layout, "Spherical layout mesh (genus 0)");
  ms->add_flag("--fallback-embed", mesh.fallback, "Non-conformal spherical embedding (genus 0)");
  ms->add_option("--fallback-iterations", mesh.fallback_iterations, "Relaxation sweeps of the fallback");
  ms->add_option("--N", mesh.N, "Patch rounds (genus >= 2)");
  ms->add_option("--eps", mesh.eps, "Patch threshold on the time coordinate (genus >= 2)");
  ms->add_option("--yamabe-cache", mesh.yamabe_cache, "Conformal factor cache (JSON)");

  AnalyzeArgs an;
  auto* a = app.add_subcommand("analyze", "Spectrum, pair correlation and sliced energy of a point set");
  a->add_option("--input", an.input, "Points CSV or mesh samples CSV")->required();
  a->add_option("--mesh", an.mesh, "Mesh of a samples file");
  a->add_option("--target-file", an.target_file, "Target points for the sliced energy");
  a->add_option("--lmax", an.lmax, "Highest spherical harmonic degree");
  a->add_option("--probes", an.probes, "Probe slices of the sliced energy");
  a->add_option("--bins", an.bins, "Pair correlation bins");
  a->add_option("--rmax", an.rmax, "Pair correlation range (0: four mean spacings)");
  a->add_option("--reference", an.reference, "Uniform reference samples for mesh pair correlation");
  a->add_option("--seed", an.seed, "Seed of probes and reference sets");
  a->add_option("--out", an.out, "Output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail("usage", e.what(), 2);
  }

  const auto start = std::chrono::steady_clock::now();
  try {
    if (*s) cmd_sample_sphere(sphere, args);
    else if (*h) cmd_sample_hyperbolic(hyper, args);
    else if (*p) cmd_sample_projective(proj, args);
    else if (*ms) cmd_sample_mesh(mesh, args, ms->count("--K") > 0);
    else if (*a) cmd_analyze(an, args);
  } catch (const ConfigError& e) {
    return fail("config", e.what(), 2);
  } catch (const IoError& e) {
    return fail("io", e.what(), 3);
  } catch (const MeshError& e) {
    return fail("mesh", e.what(), 4);
  } catch (const GeometryError& e) {
    return fail("geometry", e.what(), 5);
  } catch (const std::exception& e) {
    return fail("internal", e.what(), 1);
  }
  std::cerr << "done in "
            << std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count() << " s\n";
  return 0;
}
