#include "nsub/shapes.hpp"

#include <cmath>
#include <map>
#include <numbers>
#include <random>

#include "nsub/error.hpp"
#include "nsub/subdivide.hpp"

namespace nsub::shapes {

Mesh tetrahedron() {
  const double s = 1.0 / std::sqrt(3.0);
  std::vector<Vec3> v{{s, s, s}, {s, -s, -s}, {-s, s, -s}, {-s, -s, s}};
  std::vector<Face> f{{0, 1, 2}, {0, 3, 1}, {0, 2, 3}, {1, 3, 2}};
  return Mesh(std::move(v), std::move(f));
}

Mesh octahedron() {
  std::vector<Vec3> v{{1, 0, 0}, {-1, 0, 0}, {0, 1, 0}, {0, -1, 0}, {0, 0, 1}, {0, 0, -1}};
  std::vector<Face> f{{0, 2, 4}, {2, 1, 4}, {1, 3, 4}, {3, 0, 4},
                      {2, 0, 5}, {1, 2, 5}, {3, 1, 5}, {0, 3, 5}};
  return Mesh(std::move(v), std::move(f));
}

Mesh icosahedron() {
  const double t = (1.0 + std::sqrt(5.0)) / 2.0;
  std::vector<Vec3> v{{-1, t, 0}, {1, t, 0}, {-1, -t, 0}, {1, -t, 0},
                      {0, -1, t}, {0, 1, t}, {0, -1, -t}, {0, 1, -t},
                      {t, 0, -1}, {t, 0, 1}, {-t, 0, -1}, {-t, 0, 1}};
  for (Vec3& p : v) p.normalize();
  std::vector<Face> f{{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
                      {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
                      {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
                      {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1}};
  return Mesh(std::move(v), std::move(f));
}

Mesh icosphere(int levels, double radius) {
  Mesh m = icosahedron();
  for (int l = 0; l < levels; ++l) {
    m = midpoint_topology_subdivide(m).mesh;
    std::vector<Vec3> v = m.vertices();
    for (Vec3& p : v) p.normalize();
    m = m.with_positions(std::move(v));
  }
  std::vector<Vec3> v = m.vertices();
  for (Vec3& p : v) p *= radius;
  return m.with_positions(std::move(v));
}

Mesh torus(double major_radius, double minor_radius, int major_segments, int minor_segments) {
  if (major_segments < 3 || minor_segments < 3) throw Error("torus needs at least 3 segments");
  std::vector<Vec3> v;
  std::vector<Face> f;
  const double two_pi = 2.0 * std::numbers::pi;
  for (int i = 0; i < major_segments; ++i) {
    double u = two_pi * i / major_segments;
    for (int j = 0; j < minor_segments; ++j) {
      double w = two_pi * j / minor_segments;
      double r = major_radius + minor_radius * std::cos(w);
      v.emplace_back(r * std::cos(u), r * std::sin(u), minor_radius * std::sin(w));
    }
  }
  auto id = [&](int i, int j) {
    return ((i + major_segments) % major_segments) * minor_segments +
           (j + minor_segments) % minor_segments;
  };
  for (int i = 0; i < major_segments; ++i) {
    for (int j = 0; j < minor_segments; ++j) {
      int a = id(i, j), b = id(i + 1, j), c = id(i + 1, j + 1), d = id(i, j + 1);
      f.push_back({a, b, c});
      f.push_back({a, c, d});
    }
  }
  return Mesh(std::move(v), std::move(f));
}

Mesh bumpy_sphere(int levels, double amplitude, int frequency) {
  Mesh m = icosphere(levels);
  std::vector<Vec3> v = m.vertices();
  for (Vec3& p : v) {
    double bump = std::sin(frequency * p.x()) * std::sin(frequency * p.y()) *
                      std::sin(frequency * p.z()) +
                  0.5 * std::cos(2.0 * frequency * p.z());
    p *= 1.0 + amplitude * bump;
  }
  return m.with_positions(std::move(v));
}

Mesh wavy_torus(int major_segments, int minor_segments) {
  Mesh m = torus(1.0, 0.35, major_segments, minor_segments);
  std::vector<Vec3> v = m.vertices();
  for (Vec3& p : v) {
    double u = std::atan2(p.y(), p.x());
    Vec3 center(std::cos(u), std::sin(u), 0.0);
    Vec3 offset = p - center;
    p = center + offset * (1.0 + 0.3 * std::sin(5.0 * u));
  }
  return m.with_positions(std::move(v));
}

Mesh twisted_ellipsoid(int levels) {
  Mesh m = icosphere(levels);
  std::vector<Vec3> v = m.vertices();
  for (Vec3& p : v) {
    Vec3 q(0.6 * p.x(), 0.35 * p.y(), 1.2 * p.z());
    double angle = 0.8 * q.z();
    double c = std::cos(angle), s = std::sin(angle);
    p = Vec3(c * q.x() - s * q.y(), s * q.x() + c * q.y(), q.z());
  }
  return m.with_positions(std::move(v));
}

Mesh jitter(const Mesh& mesh, double amplitude, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-amplitude, amplitude);
  std::vector<Vec3> v = mesh.vertices();
  for (Vec3& p : v) {
    double x = dist(rng), y = dist(rng), z = dist(rng);
    p += Vec3(x, y, z);
  }
  return mesh.with_positions(std::move(v));
}

Mesh by_name(const std::string& name) {
  static const std::map<std::string, Mesh (*)()> table{
      {"tetrahedron", &tetrahedron},
      {"octahedron", &octahedron},
      {"icosahedron", &icosahedron},
      {"icosphere", [] { return icosphere(3); }},
      {"bumpy", [] { return bumpy_sphere(4, 0.12, 4); }},
      {"torus", [] { return torus(1.0, 0.4, 48, 24); }},
      {"wavy-torus", [] { return wavy_torus(60, 24); }},
      {"twisted", [] { return twisted_ellipsoid(4); }},
  };
  auto it = table.find(name);
  if (it == table.end()) throw Error("unknown shape '" + name + "'");
  return it->second();
}

}  // namespace nsub::shapes
