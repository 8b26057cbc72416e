#include "nesots/mesh_io.hpp"

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>

namespace nesots {

namespace {

std::string lower_extension(const std::string& path) {
  const auto dot = path.find_last_of('.');
  if (dot == std::string::npos) return {};
  std::string ext = path.substr(dot + 1);
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  return ext;
}

std::ifstream open_in(const std::string& path, std::ios::openmode mode = std::ios::in) {
  std::ifstream in(path, mode);
  if (!in) throw MeshError("cannot open " + path);
  return in;
}

void read_obj(const std::string& path, std::vector<Vec3>& vertices, std::vector<Face>& faces) {
  std::ifstream in = open_in(path);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream ss(line);
    std::string tag;
    if (!(ss >> tag)) continue;
    if (tag == "v") {
      Vec3 p;
      if (!(ss >> p[0] >> p[1] >> p[2]))
        throw MeshError(path + ":" + std::to_string(lineno) + ": malformed vertex");
      vertices.push_back(p);
    } else if (tag == "f") {
      std::vector<int> idx;
      std::string tok;
      while (ss >> tok) {
        // "i", "i/t", "i//n" or "i/t/n"; negative indices are relative.
        int v = 0;
        const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
        if (res.ec != std::errc())
          throw MeshError(path + ":" + std::to_string(lineno) + ": malformed face index");
        idx.push_back(v > 0 ? v - 1 : static_cast<int>(vertices.size()) + v);
      }
      if (idx.size() != 3)
        throw MeshError(path + ":" + std::to_string(lineno) + ": non-triangular face");
      faces.push_back({idx[0], idx[1], idx[2]});
    }
  }
}

enum class PlyType { i8, u8, i16, u16, i32, u32, f32, f64 };

PlyType ply_type(const std::string& s) {
  if (s == "char" || s == "int8") return PlyType::i8;
  if (s == "uchar" || s == "uint8") return PlyType::u8;
  if (s == "short" || s == "int16") return PlyType::i16;
  if (s == "ushort" || s == "uint16") return PlyType::u16;
  if (s == "int" || s == "int32") return PlyType::i32;
  if (s == "uint" || s == "uint32") return PlyType::u32;
  if (s == "float" || s == "float32") return PlyType::f32;
  if (s == "double" || s == "float64") return PlyType::f64;
  throw MeshError("unsupported PLY type " + s);
}

template <typename T>
T take(std::istream& in) {
  T v;
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!in) throw MeshError("truncated PLY body");
  return v;
}

double read_binary(std::istream& in, PlyType t) {
  switch (t) {
    case PlyType::i8: return take<std::int8_t>(in);
    case PlyType::u8: return take<std::uint8_t>(in);
    case PlyType::i16: return take<std::int16_t>(in);
    case PlyType::u16: return take<std::uint16_t>(in);
    case PlyType::i32: return take<std::int32_t>(in);
    case PlyType::u32: return take<std::uint32_t>(in);
    case PlyType::f32: return take<float>(in);
    case PlyType::f64: return take<double>(in);
  }
  return 0.0;
}

struct PlyProperty {
  std::string name;
  PlyType type = PlyType::f32;
  bool list = false;
  PlyType count_type = PlyType::u8;
};

struct PlyElement {
  std::string name;
  std::size_t count = 0;
  std::vector<PlyProperty> props;
};

void read_ply(const std::string& path, std::vector<Vec3>& vertices, std::vector<Face>& faces) {
  std::ifstream in = open_in(path, std::ios::in | std::ios::binary);
  std::string line;
  std::getline(in, line);
  if (line.rfind("ply", 0) != 0) throw MeshError(path + ": missing PLY magic");
  bool binary = false;
  std::vector<PlyElement> elements;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::istringstream ss(line);
    std::string key;
    ss >> key;
    if (key == "format") {
      std::string fmt;
      ss >> fmt;
      if (fmt == "binary_little_endian") binary = true;
      else if (fmt != "ascii") throw MeshError(path + ": unsupported PLY format " + fmt);
    } else if (key == "element") {
      PlyElement e;
      ss >> e.name >> e.count;
      elements.push_back(e);
    } else if (key == "property") {
      if (elements.empty()) throw MeshError(path + ": property before element");
      PlyProperty p;
      std::string t;
      ss >> t;
      if (t == "list") {
        std::string ct, it;
        ss >> ct >> it >> p.name;
        p.list = true;
        p.count_type = ply_type(ct);
        p.type = ply_type(it);
      } else {
        p.type = ply_type(t);
        ss >> p.name;
      }
      elements.back().props.push_back(p);
    } else if (key == "end_header") {
      break;
    }
  }

  for (const PlyElement& e : elements) {
    for (std::size_t r = 0; r < e.count; ++r) {
      std::vector<double> scalars;
      std::vector<int> list;
      Vec3 p = Vec3::Zero();
      std::istringstream row;
      if (!binary) {
        if (!std::getline(in, line)) throw MeshError(path + ": truncated PLY body");
        row.str(line);
      }
      for (const PlyProperty& prop : e.props) {
        auto next = [&](PlyType t) {
          if (binary) return read_binary(in, t);
          double v;
          if (!(row >> v)) throw MeshError(path + ": malformed PLY row");
          return v;
        };
        if (prop.list) {
          const int cnt = static_cast<int>(next(prop.count_type));
          std::vector<int> vals(cnt);
          for (int& v : vals) v = static_cast<int>(next(prop.type));
          if (prop.name == "vertex_indices" || prop.name == "vertex_index") list = vals;
        } else {
          const double v = next(prop.type);
          if (prop.name == "x") p[0] = v;
          else if (prop.name == "y") p[1] = v;
          else if (prop.name == "z") p[2] = v;
        }
      }
      if (e.name == "vertex") {
        vertices.push_back(p);
      } else if (e.name == "face") {
        if (list.size() != 3) throw MeshError(path + ": non-triangular face");
        faces.push_back({list[0], list[1], list[2]});
      }
    }
  }
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw MeshError("cannot write " + path);
  out.precision(17);
  return out;
}

}  // namespace

void read_mesh_geometry(const std::string& path, std::vector<Vec3>& vertices,
                        std::vector<Face>& faces) {
  const std::string ext = lower_extension(path);
  if (ext == "obj") read_obj(path, vertices, faces);
  else if (ext == "ply") read_ply(path, vertices, faces);
  else throw MeshError("unknown mesh format for " + path + " (expected .obj or .ply)");
}

TriMesh load_mesh(const std::string& path) {
  std::vector<Vec3> vertices;
  std::vector<Face> faces;
  read_mesh_geometry(path, vertices, faces);
  return make_mesh(std::move(vertices), std::move(faces));
}

void save_obj(const TriMesh& mesh, const std::string& path) {
  std::ofstream out = open_out(path);
  for (const Vec3& v : mesh.vertices) out << "v " << v[0] << ' ' << v[1] << ' ' << v[2] << '\n';
  for (const Face& f : mesh.faces) out << "f " << f[0] + 1 << ' ' << f[1] + 1 << ' ' << f[2] + 1 << '\n';
}

void save_ply(const TriMesh& mesh, const std::string& path) {
  std::ofstream out = open_out(path);
  out << "ply\nformat ascii 1.0\nelement vertex " << mesh.vertices.size()
      << "\nproperty double x\nproperty double y\nproperty double z\nelement face "
      << mesh.faces.size() << "\nproperty list uchar int vertex_indices\nend_header\n";
  for (const Vec3& v : mesh.vertices) out << v[0] << ' ' << v[1] << ' ' << v[2] << '\n';
  for (const Face& f : mesh.faces) out << "3 " << f[0] << ' ' << f[1] << ' ' << f[2] << '\n';
}

MeshDensity load_density_csv(const std::string& path, MeshDensity::Kind kind, std::size_t count) {
  std::ifstream in = open_in(path);
  MeshDensity d;
  d.kind = kind;
  d.values.assign(count, 0.0);
  std::vector<char> seen(count, 0);
  std::string line;
  int lineno = 0;
  bool first_data = true;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ss(line);
    long long id;
    double v;
    if (!(ss >> id >> v)) {
      if (first_data) {  // header row
        first_data = false;
        continue;
      }
      throw MeshError(path + ":" + std::to_string(lineno) + ": expected id,value");
    }
    first_data = false;
    if (id < 0 || static_cast<std::size_t>(id) >= count)
      throw MeshError(path + ":" + std::to_string(lineno) + ": id out of range");
    if (seen[id]) throw MeshError(path + ":" + std::to_string(lineno) + ": duplicate id");
    seen[id] = 1;
    d.values[id] = v;
  }
  if (std::find(seen.begin(), seen.end(), 0) != seen.end())
    throw MeshError(path + ": density is missing ids");
  return d;
}

}  // namespace nesots
