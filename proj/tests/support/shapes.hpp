#pragma once

#include <nesots/mesh.hpp>

namespace nesots::testing {

TriMesh tetrahedron();

/// Unit icosphere with the given number of 1:4 subdivisions.
TriMesh icosphere(int subdivisions);

/// Icosphere scaled by (a, b, c).
TriMesh ellipsoid(int subdivisions, double a, double b, double c);

/// Torus of radii R > r with nu x nv quads.
TriMesh torus(double R, double r, int nu, int nv);

/// Genus-2 surface: boundary of a 5 x 3 x 1 slab of unit cubes with two
/// cubes removed, each unit square split into k x k quads and then into
/// triangles. |F| = 100 k^2.
TriMesh genus2_plate(int k);

/// Raw faces of an open surface (a tetrahedron minus one face).
void open_surface(std::vector<Vec3>& vertices, std::vector<Face>& faces);

}  // namespace nesots::testing
