#pragma once

#include "nesots/mesh.hpp"

#include <string>
#include <vector>

namespace nesots {

/// Reads an OBJ or PLY (ascii or binary little endian) triangle mesh and
/// validates it. The format is chosen from the file extension.
TriMesh load_mesh(const std::string& path);

/// Raw geometry without validation (used for layout files whose vertices
/// live on S^2).
void read_mesh_geometry(const std::string& path, std::vector<Vec3>& vertices,
                        std::vector<Face>& faces);

void save_obj(const TriMesh& mesh, const std::string& path);
void save_ply(const TriMesh& mesh, const std::string& path);

/// Per-vertex or per-face density from `id,value` rows. Lines starting with
/// '#' and a non-numeric header row are skipped; every id in [0, count) must
/// appear exactly once.
MeshDensity load_density_csv(const std::string& path, MeshDensity::Kind kind, std::size_t count);

}  // namespace nesots
