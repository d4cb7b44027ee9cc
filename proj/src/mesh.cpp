#include "nsub/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <string>
#include <unordered_map>

#include "nsub/error.hpp"

namespace nsub {

namespace {

std::string edge_name(int a, int b) {
  return "(" + std::to_string(a) + ", " + std::to_string(b) + ")";
}

std::uint64_t directed_key(int a, int b) {
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 32) |
         static_cast<std::uint32_t>(b);
}

}  // namespace

// ==========================================================
// ================   BarycentricPoint   ====================
// ==========================================================

BarycentricPoint BarycentricPoint::make(int face, std::array<double, 3> weights) {
  return make(face, weights, kBaryEpsilon);
}

BarycentricPoint BarycentricPoint::make(int face, std::array<double, 3> weights,
                                        double tolerance) {
  double sum = 0.0;
  for (double w : weights) {
    if (!std::isfinite(w) || w < -tolerance) {
      throw NumericalError("barycentric weight " + std::to_string(w) + " out of range on face " +
                           std::to_string(face));
    }
    sum += w;
  }
  if (std::abs(sum - 1.0) > tolerance) {
    throw NumericalError("barycentric weights sum to " + std::to_string(sum) + " on face " +
                         std::to_string(face));
  }
  double clamped_sum = 0.0;
  for (double& w : weights) {
    w = std::max(w, 0.0);
    clamped_sum += w;
  }
  for (double& w : weights) w /= clamped_sum;
  return BarycentricPoint{face, weights};
}

// ==========================================================
// ================       Topology       ====================
// ==========================================================

Topology::Topology(int num_vertices, std::vector<Face> faces)
    : num_vertices_(num_vertices), faces_(std::move(faces)) {
  const int nf = num_faces();
  const int nh = 3 * nf;

  for (int f = 0; f < nf; ++f) {
    const Face& t = faces_[f];
    for (int c = 0; c < 3; ++c) {
      if (t[c] < 0 || t[c] >= num_vertices_) {
        throw TopologyError("face " + std::to_string(f) + " references vertex " +
                            std::to_string(t[c]) + " out of range");
      }
    }
    if (t[0] == t[1] || t[1] == t[2] || t[0] == t[2]) {
      throw TopologyError("face " + std::to_string(f) + " is degenerate (repeated vertex)");
    }
  }

  // Count undirected incidences first so the diagnostics can tell boundary,
  // non-manifold and orientation problems apart.
  std::unordered_map<std::uint64_t, int> undirected;
  undirected.reserve(static_cast<size_t>(nh));
  for (int h = 0; h < nh; ++h) {
    int a = source(h), b = dest(h);
    ++undirected[directed_key(std::min(a, b), std::max(a, b))];
  }
  for (int h = 0; h < nh; ++h) {
    int a = std::min(source(h), dest(h)), b = std::max(source(h), dest(h));
    int count = undirected[directed_key(a, b)];
    if (count > 2) throw TopologyError("non-manifold edge " + edge_name(a, b));
    if (count == 1) throw TopologyError("boundary edge " + edge_name(a, b));
  }

  std::unordered_map<std::uint64_t, int> directed;
  directed.reserve(static_cast<size_t>(nh));
  for (int h = 0; h < nh; ++h) {
    auto [it, inserted] = directed.emplace(directed_key(source(h), dest(h)), h);
    if (!inserted) {
      throw TopologyError("inconsistently oriented edge " + edge_name(source(h), dest(h)));
    }
  }
  twin_.assign(static_cast<size_t>(nh), -1);
  for (int h = 0; h < nh; ++h) {
    twin_[h] = directed.at(directed_key(dest(h), source(h)));
  }

  vertex_out_.assign(static_cast<size_t>(num_vertices_), -1);
  std::vector<int> out_count(static_cast<size_t>(num_vertices_), 0);
  for (int h = 0; h < nh; ++h) {
    if (vertex_out_[source(h)] < 0) vertex_out_[source(h)] = h;
    ++out_count[source(h)];
  }
  for (int v = 0; v < num_vertices_; ++v) {
    if (vertex_out_[v] < 0) throw TopologyError("unreferenced vertex " + std::to_string(v));
    int steps = 0;
    int h = vertex_out_[v];
    do {
      h = rotate_ccw(h);
      ++steps;
    } while (h != vertex_out_[v] && steps <= out_count[v]);
    if (steps != out_count[v]) {
      throw TopologyError("non-manifold vertex " + std::to_string(v));
    }
  }

  out_offsets_.assign(static_cast<size_t>(num_vertices_) + 1, 0);
  for (int v = 0; v < num_vertices_; ++v) out_offsets_[v + 1] = out_offsets_[v] + out_count[v];
  sorted_out_.assign(static_cast<size_t>(nh), -1);
  std::vector<int> fill(out_offsets_.begin(), out_offsets_.end() - 1);
  for (int h = 0; h < nh; ++h) sorted_out_[fill[source(h)]++] = h;
  for (int v = 0; v < num_vertices_; ++v) {
    std::sort(sorted_out_.begin() + out_offsets_[v], sorted_out_.begin() + out_offsets_[v + 1],
              [this](int x, int y) { return dest(x) < dest(y); });
  }

  edges_.reserve(static_cast<size_t>(nh / 2));
  for (int v = 0; v < num_vertices_; ++v) {
    for (int h : outgoing_sorted(v)) {
      if (v < dest(h)) edges_.push_back(Edge{v, dest(h)});
    }
  }
  // Outgoing lists are sorted by destination, so edges_ is already ordered.
  edge_of_.assign(static_cast<size_t>(nh), -1);
  edge_half_.assign(edges_.size(), -1);
  {
    int e = 0;
    for (int v = 0; v < num_vertices_; ++v) {
      for (int h : outgoing_sorted(v)) {
        if (v < dest(h)) {
          edge_of_[h] = e;
          edge_of_[twin_[h]] = e;
          edge_half_[e] = h;
          ++e;
        }
      }
    }
  }
}

int Topology::find_halfedge(int a, int b) const {
  if (a < 0 || a >= num_vertices_ || b < 0 || b >= num_vertices_) return -1;
  for (int h : outgoing_sorted(a)) {
    if (dest(h) == b) return h;
  }
  return -1;
}

// ==========================================================
// ================         Mesh         ====================
// ==========================================================

Mesh::Mesh(std::vector<Vec3> vertices, std::vector<Face> faces)
    : vertices_(std::move(vertices)) {
  const int nv = static_cast<int>(vertices_.size());
  topology_ = std::make_shared<const Topology>(nv, std::move(faces));
}

Mesh::Mesh(std::vector<Vec3> vertices, std::shared_ptr<const Topology> topology)
    : vertices_(std::move(vertices)), topology_(std::move(topology)) {
  if (!topology_ || topology_->num_vertices() != static_cast<int>(vertices_.size())) {
    throw DimensionError("vertex count does not match topology");
  }
}

Mesh Mesh::with_positions(std::vector<Vec3> vertices) const {
  return Mesh(std::move(vertices), topology_);
}

Vec3 Mesh::position(const BarycentricPoint& p) const {
  const Face& t = faces()[p.face];
  return p.weights[0] * vertices_[t[0]] + p.weights[1] * vertices_[t[1]] +
         p.weights[2] * vertices_[t[2]];
}

// ==========================================================
// ================   Neighborhood queries   ================
// ==========================================================

std::vector<int> one_ring(const Mesh& mesh, int v) {
  const Topology& topo = mesh.topology();
  std::vector<int> ring;
  ring.reserve(static_cast<size_t>(topo.valence(v)));
  // The sorted list starts at the lowest-index neighbor.
  const int start = topo.outgoing_sorted(v).front();
  int h = start;
  do {
    ring.push_back(topo.dest(h));
    h = topo.rotate_ccw(h);
  } while (h != start);
  return ring;
}

EdgeNeighborhood edge_neighborhood(const Mesh& mesh, int j, int k) {
  const Topology& topo = mesh.topology();
  if (topo.find_halfedge(j, k) < 0) {
    throw TopologyError("not an edge " + edge_name(j, k));
  }
  EdgeNeighborhood out;
  for (int center : {j, k}) {
    for (int h : topo.outgoing_sorted(center)) {
      int d = topo.dest(h);
      if (d != j && d != k) out.vertices.push_back(d);
      out.faces.push_back(Topology::face_of(h));
    }
  }
  std::sort(out.vertices.begin(), out.vertices.end());
  out.vertices.erase(std::unique(out.vertices.begin(), out.vertices.end()), out.vertices.end());
  std::sort(out.faces.begin(), out.faces.end());
  out.faces.erase(std::unique(out.faces.begin(), out.faces.end()), out.faces.end());
  return out;
}

bool check_link_condition(const Mesh& mesh, int j, int k) {
  const Topology& topo = mesh.topology();
  if (topo.find_halfedge(j, k) < 0) {
    throw TopologyError("not an edge " + edge_name(j, k));
  }
  std::vector<int> common;
  for (int hj : topo.outgoing_sorted(j)) {
    int a = topo.dest(hj);
    if (topo.find_halfedge(k, a) >= 0) common.push_back(a);
  }
  if (common.size() != 2) return false;
  return topo.find_halfedge(common[0], common[1]) < 0;
}

std::uint64_t mesh_hash(const Mesh& mesh) {
  std::uint64_t h = 1469598103934665603ull;
  auto mix = [&h](const void* data, size_t n) {
    const auto* bytes = static_cast<const unsigned char*>(data);
    for (size_t i = 0; i < n; ++i) {
      h ^= bytes[i];
      h *= 1099511628211ull;
    }
  };
  for (const Vec3& p : mesh.vertices()) {
    double xyz[3] = {p.x(), p.y(), p.z()};
    mix(xyz, sizeof(xyz));
  }
  for (const Face& f : mesh.faces()) {
    std::int32_t idx[3] = {f[0], f[1], f[2]};
    mix(idx, sizeof(idx));
  }
  return h;
}

}  // namespace nsub
