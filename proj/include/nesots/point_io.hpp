#pragma once

#include "nesots/analysis.hpp"
#include "nesots/measure.hpp"
#include "nesots/mesh.hpp"
#include "nesots/sampler.hpp"

#include <stdexcept>
#include <string>
#include <vector>

namespace nesots {

class IoError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Shortest round-trip decimal form of v.
std::string format_double(double v);

/// One row per atom, `x0,...,xd`, after a `# space=<name> dim=<d>` comment.
void write_points_csv(const std::string& path, const DiscreteMeasure& points);

/// Reads a points CSV. The space comes from the header comment if present,
/// else from fallback. Atoms off the manifold by more than tol are rejected;
/// the rest are renormalized.
DiscreteMeasure read_points_csv(const std::string& path, Space fallback, double tol = 1e-6);

/// ASCII PLY point cloud of the first three coordinates.
void write_points_ply(const std::string& path, const std::vector<Vec>& points);

void write_mesh_samples_csv(const std::string& path, const std::vector<MeshSample>& samples);
std::vector<MeshSample> read_mesh_samples_csv(const std::string& path);
void write_mesh_samples_ply(const std::string& path, const std::vector<MeshSample>& samples);

/// `iteration,energy`.
void write_trace_csv(const std::string& path, const std::vector<double>& energy);

/// `l,power`.
void write_spectrum_csv(const std::string& path, const SpectrumReport& s);

/// `r,g`.
void write_pcf_csv(const std::string& path, const PcfReport& p);

/// Numeric rows of a CSV file; comment lines and a header row are skipped.
std::vector<std::vector<double>> read_table_csv(const std::string& path);

/// Generic numeric table with a header row.
void write_table_csv(const std::string& path, const std::string& header,
                     const std::vector<std::vector<double>>& rows);

}  // namespace nesots
