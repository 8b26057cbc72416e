#pragma once

#include "nesots/manifold.hpp"

#include <random>

namespace nesots {

using Rng = std::mt19937_64;

/// Great circle span{e1, e2} ∩ S^d, with e1 and e2 orthonormal.
struct SphereSlice {
  Vec e1;
  Vec e2;
};

/// Geodesic span{dvec, x_O} ∩ H^d; dvec is a unit vector with zero time
/// coordinate.
struct HyperSlice {
  Vec dvec;
};

/// Orthonormalized pair of standard Gaussian vectors in R^{d+1}.
SphereSlice sample_slice_sphere(Rng& rng, int d);

/// Uniform unit direction orthogonal to the hyperboloid origin.
HyperSlice sample_slice_hyper(Rng& rng, int d);

/// Thrown by project_sphere when the point has no component in the slice
/// plane; the caller draws another slice.
class OrthogonalToSlice : public GeometryError {
public:
  OrthogonalToSlice() : GeometryError("point orthogonal to slice") {}
};

Vec project_sphere(const SphereSlice& s, const Vec& x);
Vec project_hyper(const HyperSlice& s, const Vec& x);

/// Periodic coordinate in [0, 1) of a point on the great circle.
/// (pi + atan2(<e2,p>, <e1,p>)) / (2 pi), with 1.0 wrapped to 0.0.
double coord_sphere(const SphereSlice& s, const Vec& p);

/// Signed geodesic distance from the origin along the slice direction.
double coord_hyper(const HyperSlice& s, const Vec& p);

}  // namespace nesots
