#include "nsub/classic.hpp"

#include <cmath>
#include <numbers>

#include "nsub/error.hpp"
#include "nsub/subdivide.hpp"

namespace nsub {

double loop_beta(int n) {
  double c = 3.0 / 8.0 + 0.25 * std::cos(2.0 * std::numbers::pi / n);
  return (5.0 / 8.0 - c * c) / n;
}

namespace {

void check_levels(int levels) {
  if (levels < 1) throw DimensionError("levels must be at least 1");
}

Mesh loop_once(const Mesh& mesh) {
  const Topology& topo = mesh.topology();
  const int nv = mesh.num_vertices();
  std::vector<Vec3> out(static_cast<size_t>(nv + mesh.num_edges()));
  for (int v = 0; v < nv; ++v) {
    auto outs = topo.outgoing_sorted(v);
    const int n = static_cast<int>(outs.size());
    const double beta = loop_beta(n);
    Vec3 sum = Vec3::Zero();
    for (int h : outs) sum += mesh.vertex(topo.dest(h));
    out[v] = (1.0 - n * beta) * mesh.vertex(v) + beta * sum;
  }
  for (int e = 0; e < mesh.num_edges(); ++e) {
    int h = topo.edge_halfedge(e);
    const Vec3& a = mesh.vertex(topo.source(h));
    const Vec3& b = mesh.vertex(topo.dest(h));
    const Vec3& c = mesh.vertex(topo.left_opposite(h));
    const Vec3& d = mesh.vertex(topo.right_opposite(h));
    out[nv + e] = 3.0 / 8.0 * (a + b) + 1.0 / 8.0 * (c + d);
  }
  return Mesh(std::move(out), midpoint_topology(topo));
}

// Extraordinary rule seen from the source of h.
Vec3 butterfly_extraordinary(const Mesh& mesh, int h) {
  const Topology& topo = mesh.topology();
  const int n = topo.valence(topo.source(h));
  const std::vector<double> s = butterfly_weights(n);
  Vec3 value = 0.75 * mesh.vertex(topo.source(h));
  int g = h;
  for (int i = 0; i < n; ++i) {
    value += s[static_cast<size_t>(i)] * mesh.vertex(topo.dest(g));
    g = topo.rotate_ccw(g);
  }
  return value;
}

Vec3 butterfly_regular(const Mesh& mesh, int h) {
  const Topology& topo = mesh.topology();
  const int t = topo.twin(h);
  Vec3 value = 0.5 * (mesh.vertex(topo.source(h)) + mesh.vertex(topo.dest(h)));
  value += 0.125 * (mesh.vertex(topo.left_opposite(h)) + mesh.vertex(topo.left_opposite(t)));
  value -= 0.0625 * (mesh.vertex(topo.right_opposite(Topology::next(h))) +
                     mesh.vertex(topo.right_opposite(Topology::prev(h))) +
                     mesh.vertex(topo.right_opposite(Topology::next(t))) +
                     mesh.vertex(topo.right_opposite(Topology::prev(t))));
  return value;
}

Mesh butterfly_once(const Mesh& mesh) {
  const Topology& topo = mesh.topology();
  const int nv = mesh.num_vertices();
  std::vector<Vec3> out(mesh.vertices());
  out.resize(static_cast<size_t>(nv + mesh.num_edges()));
  for (int e = 0; e < mesh.num_edges(); ++e) {
    int h = topo.edge_halfedge(e);
    bool a_regular = topo.valence(topo.source(h)) == 6;
    bool b_regular = topo.valence(topo.dest(h)) == 6;
    Vec3 p;
    if (a_regular && b_regular) {
      p = butterfly_regular(mesh, h);
    } else if (!a_regular && !b_regular) {
      p = 0.5 * (butterfly_extraordinary(mesh, h) + butterfly_extraordinary(mesh, topo.twin(h)));
    } else if (!a_regular) {
      p = butterfly_extraordinary(mesh, h);
    } else {
      p = butterfly_extraordinary(mesh, topo.twin(h));
    }
    out[nv + e] = p;
  }
  return Mesh(std::move(out), midpoint_topology(topo));
}

}  // namespace

std::vector<double> butterfly_weights(int n) {
  if (n < 3) throw DimensionError("valence below 3");
  if (n == 3) return {5.0 / 12.0, -1.0 / 12.0, -1.0 / 12.0};
  if (n == 4) return {3.0 / 8.0, 0.0, -1.0 / 8.0, 0.0};
  std::vector<double> s(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    double t = 2.0 * std::numbers::pi * i / n;
    s[static_cast<size_t>(i)] = (0.25 + std::cos(t) + 0.5 * std::cos(2.0 * t)) / n;
  }
  return s;
}

Mesh loop_subdivide(const Mesh& mesh, int levels) {
  check_levels(levels);
  Mesh current = mesh;
  for (int l = 0; l < levels; ++l) current = loop_once(current);
  return current;
}

Mesh butterfly_subdivide(const Mesh& mesh, int levels) {
  check_levels(levels);
  Mesh current = mesh;
  for (int l = 0; l < levels; ++l) current = butterfly_once(current);
  return current;
}

}  // namespace nsub
