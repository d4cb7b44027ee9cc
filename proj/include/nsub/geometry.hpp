#pragma once

#include <vector>

#include "nsub/mesh.hpp"

namespace nsub {

/// Triangle quality 4*sqrt(3)*A / (sum of squared edge lengths), in [0, 1].
/// Equilateral triangles score 1, degenerate ones 0.
double triangle_quality(const Vec3& a, const Vec3& b, const Vec3& c);
double triangle_quality(const Vec2& a, const Vec2& b, const Vec2& c);

double triangle_area(const Vec3& a, const Vec3& b, const Vec3& c);
/// Signed area, positive for counter-clockwise triangles.
double signed_area(const Vec2& a, const Vec2& b, const Vec2& c);
/// Unit normal of a counter-clockwise triangle; zero for degenerate input.
Vec3 face_normal(const Vec3& a, const Vec3& b, const Vec3& c);
Vec3 face_normal(const Mesh& mesh, int f);

/// Position minus the uniform average of the 1-ring, per vertex.
std::vector<Vec3> differential_coordinates(const Mesh& mesh);
std::vector<Vec3> differential_coordinates(const Topology& topology, const std::vector<Vec3>& positions);

/// x -> scale * x + translation.
struct Similarity {
  double scale = 1.0;
  Vec3 translation = Vec3::Zero();

  Vec3 apply(const Vec3& x) const { return scale * x + translation; }
  Vec3 invert(const Vec3& y) const { return (y - translation) / scale; }
  Similarity inverse() const { return Similarity{1.0 / scale, -translation / scale}; }
};

Mesh transform(const Mesh& mesh, const Similarity& s);

struct BoundingBox {
  Vec3 min = Vec3::Zero();
  Vec3 max = Vec3::Zero();
  double diagonal() const { return (max - min).norm(); }
  Vec3 center() const { return 0.5 * (min + max); }
};

BoundingBox bounding_box(const std::vector<Vec3>& points);
inline BoundingBox bounding_box(const Mesh& mesh) { return bounding_box(mesh.vertices()); }

struct NormalizedMesh {
  Mesh mesh;
  Similarity transform;  ///< maps original coordinates to normalized ones
};

/// Centers the bounding box at the origin and scales its diagonal to 1.
/// Throws NumericalError for an empty mesh or a zero diagonal.
NormalizedMesh normalize_unit_box(const Mesh& mesh);

double surface_area(const Mesh& mesh);

}  // namespace nsub
