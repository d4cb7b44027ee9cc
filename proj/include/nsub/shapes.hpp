#pragma once

#include <cstdint>
#include <string>

#include "nsub/mesh.hpp"

namespace nsub::shapes {

/// Regular tetrahedron inscribed in the unit sphere.
Mesh tetrahedron();
/// Vertices at +-x, +-y, +-z.
Mesh octahedron();
/// Regular icosahedron inscribed in the unit sphere.
Mesh icosahedron();
/// Icosahedron refined `levels` times with vertices projected to the sphere.
Mesh icosphere(int levels, double radius = 1.0);
/// Torus around the z axis with a regular (valence-6) triangulation.
Mesh torus(double major_radius, double minor_radius, int major_segments, int minor_segments);
/// Icosphere with smooth radial bumps; a stand-in for scanned organic shapes.
Mesh bumpy_sphere(int levels, double amplitude, int frequency);
/// Torus whose tube radius oscillates around the ring.
Mesh wavy_torus(int major_segments, int minor_segments);
/// Icosphere stretched into an ellipsoid with a twist about the long axis.
Mesh twisted_ellipsoid(int levels);

/// Adds seeded uniform noise in [-amplitude, amplitude] to every coordinate.
Mesh jitter(const Mesh& mesh, double amplitude, std::uint64_t seed);

/// Shape by name for the command line; throws Error for unknown names.
Mesh by_name(const std::string& name);

}  // namespace nsub::shapes
