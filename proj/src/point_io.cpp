#include "nesots/point_io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace nesots {

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  return out;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  return in;
}

std::vector<double> parse_row(const std::string& line, const std::string& where) {
  std::vector<double> out;
  const char* p = line.data();
  const char* end = p + line.size();
  while (p < end) {
    while (p < end && (*p == ' ' || *p == '\t')) ++p;
    double v = 0.0;
    const auto res = std::from_chars(p, end, v);
    if (res.ec != std::errc()) throw IoError(where + ": malformed number");
    out.push_back(v);
    p = res.ptr;
    while (p < end && (*p == ' ' || *p == '\t' || *p == '\r')) ++p;
    if (p < end) {
      if (*p != ',') throw IoError(where + ": expected ','");
      ++p;
    }
  }
  return out;
}

void write_row(std::ostream& out, const std::vector<double>& row) {
  for (std::size_t i = 0; i < row.size(); ++i) {
    if (i) out << ',';
    out << format_double(row[i]);
  }
  out << '\n';
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

void write_points_csv(const std::string& path, const DiscreteMeasure& points) {
  std::ofstream out = open_out(path);
  out << "# space=" << to_string(points.space) << " dim=" << points.dim() << '\n';
  for (const Vec& x : points.atoms) write_row(out, std::vector<double>(x.data(), x.data() + x.size()));
}

DiscreteMeasure read_points_csv(const std::string& path, Space fallback, double tol) {
  std::ifstream in = open_in(path);
  DiscreteMeasure m;
  m.space = fallback;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto pos = line.find("space=");
      if (pos != std::string::npos) {
        std::istringstream ss(line.substr(pos + 6));
        std::string name;
        ss >> name;
        m.space = space_from_string(name);
      }
      continue;
    }
    if (std::isalpha(static_cast<unsigned char>(line[0]))) continue;  // header row
    const std::vector<double> row = parse_row(line, path + ":" + std::to_string(lineno));
    if (row.size() < 2) throw IoError(path + ":" + std::to_string(lineno) + ": too few coordinates");
    if (!m.atoms.empty() && static_cast<Eigen::Index>(row.size()) != m.atoms[0].size())
      throw IoError(path + ":" + std::to_string(lineno) + ": inconsistent dimension");
    Vec x = Eigen::Map<const Vec>(row.data(), static_cast<Eigen::Index>(row.size()));
    if (m.space == Space::hyperbolic) {
      const double q = lorentz_dot(x, x);
      if (std::abs(q + 1.0) > tol || x[x.size() - 1] <= 0.0)
        throw IoError(path + ":" + std::to_string(lineno) + ": point is not on the hyperboloid");
      x = hyper::normalize(x);
    } else {
      if (std::abs(x.norm() - 1.0) > tol)
        throw IoError(path + ":" + std::to_string(lineno) + ": point is not on the unit sphere");
      x.normalize();
    }
    m.atoms.push_back(std::move(x));
  }
  if (m.atoms.empty()) throw IoError(path + ": no points");
  return m;
}

void write_points_ply(const std::string& path, const std::vector<Vec>& points) {
  std::ofstream out = open_out(path);
  out << "ply\nformat ascii 1.0\nelement vertex " << points.size()
      << "\nproperty double x\nproperty double y\nproperty double z\nend_header\n";
  for (const Vec& p : points) {
    for (int k = 0; k < 3; ++k) out << (k ? " " : "") << format_double(k < p.size() ? p[k] : 0.0);
    out << '\n';
  }
}

void write_mesh_samples_csv(const std::string& path, const std::vector<MeshSample>& samples) {
  std::ofstream out = open_out(path);
  out << "faceId,b0,b1,b2,x,y,z\n";
  for (const MeshSample& s : samples) {
    out << s.face;
    for (double v : {s.bary[0], s.bary[1], s.bary[2], s.position[0], s.position[1], s.position[2]})
      out << ',' << format_double(v);
    out << '\n';
  }
}

std::vector<MeshSample> read_mesh_samples_csv(const std::string& path) {
  std::ifstream in = open_in(path);
  std::vector<MeshSample> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#' || std::isalpha(static_cast<unsigned char>(line[0]))) continue;
    const std::vector<double> row = parse_row(line, path + ":" + std::to_string(lineno));
    if (row.size() != 7) throw IoError(path + ":" + std::to_string(lineno) + ": expected 7 columns");
    MeshSample s;
    s.face = static_cast<int>(row[0]);
    s.bary = Vec3(row[1], row[2], row[3]);
    s.position = Vec3(row[4], row[5], row[6]);
    out.push_back(s);
  }
  if (out.empty()) throw IoError(path + ": no samples");
  return out;
}

void write_mesh_samples_ply(const std::string& path, const std::vector<MeshSample>& samples) {
  std::vector<Vec> pts;
  pts.reserve(samples.size());
  for (const MeshSample& s : samples) pts.emplace_back(s.position);
  write_points_ply(path, pts);
}

void write_trace_csv(const std::string& path, const std::vector<double>& energy) {
  std::ofstream out = open_out(path);
  out << "iteration,energy\n";
  for (std::size_t i = 0; i < energy.size(); ++i) out << i << ',' << format_double(energy[i]) << '\n';
}

void write_spectrum_csv(const std::string& path, const SpectrumReport& s) {
  std::ofstream out = open_out(path);
  out << "l,power\n";
  for (std::size_t l = 0; l < s.power.size(); ++l) out << l << ',' << format_double(s.power[l]) << '\n';
}

void write_pcf_csv(const std::string& path, const PcfReport& p) {
  std::ofstream out = open_out(path);
  out << "r,g\n";
  for (std::size_t b = 0; b < p.g.size(); ++b)
    out << format_double(p.centers[b]) << ',' << format_double(p.g[b]) << '\n';
}

std::vector<std::vector<double>> read_table_csv(const std::string& path) {
  std::ifstream in = open_in(path);
  std::vector<std::vector<double>> rows;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#' || std::isalpha(static_cast<unsigned char>(line[0]))) continue;
    rows.push_back(parse_row(line, path + ":" + std::to_string(lineno)));
  }
  if (rows.empty()) throw IoError(path + ": no rows");
  return rows;
}

void write_table_csv(const std::string& path, const std::string& header,
                     const std::vector<std::vector<double>>& rows) {
  std::ofstream out = open_out(path);
  out << header << '\n';
  for (const auto& r : rows) write_row(out, r);
}

}  // namespace nesots
