#include "nsub/geometry.hpp"

#include <cmath>

#include "nsub/error.hpp"

namespace nsub {

namespace {

double quality_from(double area, double l2_sum) {
  if (area <= 0.0 || l2_sum <= 0.0) return 0.0;
  double q = 4.0 * std::sqrt(3.0) * area / l2_sum;
  return std::min(q, 1.0);
}

}  // namespace

double triangle_area(const Vec3& a, const Vec3& b, const Vec3& c) {
  return 0.5 * (b - a).cross(c - a).norm();
}

double signed_area(const Vec2& a, const Vec2& b, const Vec2& c) {
  Vec2 u = b - a, v = c - a;
  return 0.5 * (u.x() * v.y() - u.y() * v.x());
}

double triangle_quality(const Vec3& a, const Vec3& b, const Vec3& c) {
  double l2 = (b - a).squaredNorm() + (c - b).squaredNorm() + (a - c).squaredNorm();
  return quality_from(triangle_area(a, b, c), l2);
}

double triangle_quality(const Vec2& a, const Vec2& b, const Vec2& c) {
  double l2 = (b - a).squaredNorm() + (c - b).squaredNorm() + (a - c).squaredNorm();
  return quality_from(std::abs(signed_area(a, b, c)), l2);
}

Vec3 face_normal(const Vec3& a, const Vec3& b, const Vec3& c) {
  Vec3 n = (b - a).cross(c - a);
  double len = n.norm();
  if (len == 0.0 || !std::isfinite(len)) return Vec3::Zero();
  return n / len;
}

Vec3 face_normal(const Mesh& mesh, int f) {
  const Face& t = mesh.faces()[f];
  return face_normal(mesh.vertex(t[0]), mesh.vertex(t[1]), mesh.vertex(t[2]));
}

std::vector<Vec3> differential_coordinates(const Topology& topology,
                                           const std::vector<Vec3>& positions) {
  std::vector<Vec3> out(positions.size());
  for (int v = 0; v < topology.num_vertices(); ++v) {
    Vec3 sum = Vec3::Zero();
    auto out_h = topology.outgoing_sorted(v);
    for (int h : out_h) sum += positions[topology.dest(h)];
    out[v] = positions[v] - sum / static_cast<double>(out_h.size());
  }
  return out;
}

std::vector<Vec3> differential_coordinates(const Mesh& mesh) {
  return differential_coordinates(mesh.topology(), mesh.vertices());
}

Mesh transform(const Mesh& mesh, const Similarity& s) {
  std::vector<Vec3> v;
  v.reserve(mesh.vertices().size());
  for (const Vec3& p : mesh.vertices()) v.push_back(s.apply(p));
  return mesh.with_positions(std::move(v));
}

BoundingBox bounding_box(const std::vector<Vec3>& points) {
  BoundingBox box;
  if (points.empty()) return box;
  box.min = box.max = points.front();
  for (const Vec3& p : points) {
    box.min = box.min.cwiseMin(p);
    box.max = box.max.cwiseMax(p);
  }
  return box;
}

NormalizedMesh normalize_unit_box(const Mesh& mesh) {
  if (mesh.empty()) throw NumericalError("cannot normalize an empty mesh");
  BoundingBox box = bounding_box(mesh);
  double diag = box.diagonal();
  if (!(diag > 0.0) || !std::isfinite(diag)) {
    throw NumericalError("cannot normalize a mesh with zero bounding-box diagonal");
  }
  Similarity s;
  s.scale = 1.0 / diag;
  s.translation = -box.center() * s.scale;
  return NormalizedMesh{transform(mesh, s), s};
}

double surface_area(const Mesh& mesh) {
  double total = 0.0;
  for (const Face& f : mesh.faces()) {
    total += triangle_area(mesh.vertex(f[0]), mesh.vertex(f[1]), mesh.vertex(f[2]));
  }
  return total;
}

}  // namespace nsub
