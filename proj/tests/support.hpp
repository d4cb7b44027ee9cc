#pragma once

#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "nsub/geometry.hpp"
#include "nsub/mesh.hpp"

namespace nsub::test {

struct Rigid {
  Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
  Vec3 translation = Vec3::Zero();
  Vec3 apply(const Vec3& x) const { return rotation * x + translation; }
};

inline Rigid random_rigid(std::mt19937_64& rng, double max_translation = 2.0) {
  std::normal_distribution<double> gauss;
  std::uniform_real_distribution<double> shift(-max_translation, max_translation);
  Eigen::Quaterniond q(gauss(rng), gauss(rng), gauss(rng), gauss(rng));
  q.normalize();
  return Rigid{q.toRotationMatrix(), Vec3(shift(rng), shift(rng), shift(rng))};
}

inline Mesh apply(const Mesh& mesh, const Rigid& r) {
  std::vector<Vec3> out;
  out.reserve(mesh.vertices().size());
  for (const Vec3& v : mesh.vertices()) out.push_back(r.apply(v));
  return mesh.with_positions(std::move(out));
}

inline int find_vertex(const Mesh& mesh, const Vec3& p) {
  for (int v = 0; v < mesh.num_vertices(); ++v) {
    if ((mesh.vertex(v) - p).norm() < 1e-12) return v;
  }
  throw std::logic_error("no vertex at the requested position");
}

inline double max_distance(const std::vector<Vec3>& a, const std::vector<Vec3>& b) {
  if (a.size() != b.size()) return INFINITY;
  double d = 0.0;
  for (size_t i = 0; i < a.size(); ++i) d = std::max(d, (a[i] - b[i]).norm());
  return d;
}

// Axis-aligned unit cube, two triangles per side, outward orientation.
inline Mesh unit_cube() {
  std::vector<Vec3> v;
  for (int i = 0; i < 8; ++i) v.emplace_back(i & 1, (i >> 1) & 1, (i >> 2) & 1);
  std::vector<Face> f = {{0, 2, 1}, {1, 2, 3}, {4, 5, 6}, {5, 7, 6}, {0, 1, 4}, {1, 5, 4},
                         {2, 6, 3}, {3, 6, 7}, {0, 4, 2}, {2, 4, 6}, {1, 3, 5}, {3, 7, 5}};
  return Mesh(std::move(v), std::move(f));
}

// Edge j=0 -> k=1 along x inside a hexagonal fan of eight triangles at
// height `lift`, with the boundary ring at z = 0 closed by an apex below.
// Mirror symmetric about the xz plane.
inline Mesh edge_fan(double lift) {
  std::vector<Vec3> v = {{-0.5, 0, lift}, {0.5, 0, lift}, {1.5, 0, 0},  {0.5, 1, 0}, {-0.5, 1, 0},
                         {-1.5, 0, 0},    {-0.5, -1, 0},  {0.5, -1, 0}, {0, 0, -1}};
  const int j = 0, k = 1, a = 8;
  auto b = [](int i) { return 2 + (i % 6 + 6) % 6; };
  std::vector<Face> f = {{j, k, b(1)},    {j, b(1), b(2)}, {j, b(2), b(3)}, {j, b(3), b(4)},
                         {k, j, b(4)},    {k, b(4), b(5)}, {k, b(5), b(0)}, {k, b(0), b(1)}};
  for (int i = 0; i < 6; ++i) f.push_back({a, b(i + 1), b(i)});
  return Mesh(std::move(v), std::move(f));
}

// Two coincident hexagonal fans glued along their rim: a closed but flat mesh.
inline Mesh flat_disk() {
  std::vector<Vec3> v = {{0, 0, 0}, {0.1, -0.05, 0}};
  for (int i = 0; i < 6; ++i) {
    double t = M_PI / 3.0 * i;
    v.emplace_back(std::cos(t) + 0.1 * std::sin(3 * t), std::sin(t), 0.0);
  }
  std::vector<Face> f;
  for (int i = 0; i < 6; ++i) {
    int p = 2 + i, q = 2 + (i + 1) % 6;
    f.push_back({0, p, q});
    f.push_back({1, q, p});
  }
  return Mesh(std::move(v), std::move(f));
}

}  // namespace nsub::test
