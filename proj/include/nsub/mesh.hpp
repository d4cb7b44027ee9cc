#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace nsub {

using Vec3 = Eigen::Vector3d;
using Vec2 = Eigen::Vector2d;
using Face = std::array<int, 3>;

/// Undirected edge, always stored with a < b.
struct Edge {
  int a = 0;
  int b = 0;
  friend bool operator==(const Edge&, const Edge&) = default;
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

inline constexpr double kBaryEpsilon = 1e-10;

/// A point on a mesh face given by convex weights over the face corners.
struct BarycentricPoint {
  int face = -1;
  std::array<double, 3> weights{1.0, 0.0, 0.0};

  /// Clamps weights in [-kBaryEpsilon, 0) to zero and renormalizes.
  /// Throws NumericalError when a weight is below -kBaryEpsilon or the sum is
  /// off by more than kBaryEpsilon.
  static BarycentricPoint make(int face, std::array<double, 3> weights);
  /// Same as make() but with a caller-chosen tolerance.
  static BarycentricPoint make(int face, std::array<double, 3> weights, double tolerance);
};

/// Immutable connectivity of a closed, oriented triangle mesh.
///
/// Halfedges are implicit: halfedge 3*f + c runs from faces[f][c] to
/// faces[f][(c + 1) % 3], so the face of a halfedge lies on its left.
class Topology {
 public:
  /// Validates and builds adjacency. Throws TopologyError naming the
  /// offending edge for boundary, non-manifold or inconsistently oriented
  /// input, and for unreferenced or out-of-range vertices.
  Topology(int num_vertices, std::vector<Face> faces);

  int num_vertices() const { return num_vertices_; }
  int num_faces() const { return static_cast<int>(faces_.size()); }
  int num_halfedges() const { return 3 * num_faces(); }
  int num_edges() const { return static_cast<int>(edges_.size()); }

  const std::vector<Face>& faces() const { return faces_; }
  const Face& face(int f) const { return faces_[f]; }

  static int face_of(int h) { return h / 3; }
  static int next(int h) { return 3 * (h / 3) + (h % 3 + 1) % 3; }
  static int prev(int h) { return 3 * (h / 3) + (h % 3 + 2) % 3; }
  int twin(int h) const { return twin_[h]; }
  int source(int h) const { return faces_[h / 3][h % 3]; }
  int dest(int h) const { return faces_[h / 3][(h % 3 + 1) % 3]; }
  /// Opposite corner of the face on the left of h.
  int left_opposite(int h) const { return faces_[h / 3][(h % 3 + 2) % 3]; }
  /// Opposite corner of the face on the right of h.
  int right_opposite(int h) const { return left_opposite(twin_[h]); }

  /// Next outgoing halfedge counter-clockwise around source(h).
  int rotate_ccw(int h) const { return twin_[prev(h)]; }

  int valence(int v) const { return out_offsets_[v + 1] - out_offsets_[v]; }
  /// Outgoing halfedges of v sorted by ascending destination index.
  std::span<const int> outgoing_sorted(int v) const {
    return {sorted_out_.data() + out_offsets_[v], static_cast<size_t>(valence(v))};
  }
  /// Some outgoing halfedge of v.
  int outgoing(int v) const { return vertex_out_[v]; }

  /// Halfedge from a to b, or -1.
  int find_halfedge(int a, int b) const;

  /// Undirected edges in ascending (a, b) order.
  const std::vector<Edge>& edges() const { return edges_; }
  /// Index into edges() of the edge carrying halfedge h.
  int edge_of(int h) const { return edge_of_[h]; }
  /// Halfedge a -> b of edges()[e] (the one leaving the smaller index).
  int edge_halfedge(int e) const { return edge_half_[e]; }

 private:
  int num_vertices_ = 0;
  std::vector<Face> faces_;
  std::vector<int> twin_;
  std::vector<int> vertex_out_;
  std::vector<int> out_offsets_;
  std::vector<int> sorted_out_;
  std::vector<Edge> edges_;
  std::vector<int> edge_of_;
  std::vector<int> edge_half_;
};

/// Indexed triangle mesh: positions plus shared immutable topology.
class Mesh {
 public:
  Mesh() = default;
  Mesh(std::vector<Vec3> vertices, std::vector<Face> faces);
  Mesh(std::vector<Vec3> vertices, std::shared_ptr<const Topology> topology);

  /// Same connectivity, new positions.
  Mesh with_positions(std::vector<Vec3> vertices) const;

  const std::vector<Vec3>& vertices() const { return vertices_; }
  const Vec3& vertex(int v) const { return vertices_[v]; }
  const std::vector<Face>& faces() const { return topology_->faces(); }
  const Topology& topology() const { return *topology_; }
  const std::shared_ptr<const Topology>& shared_topology() const { return topology_; }

  int num_vertices() const { return static_cast<int>(vertices_.size()); }
  int num_faces() const { return topology_ ? topology_->num_faces() : 0; }
  int num_edges() const { return topology_ ? topology_->num_edges() : 0; }
  int euler_characteristic() const { return num_vertices() - num_edges() + num_faces(); }
  bool empty() const { return vertices_.empty(); }

  /// Position of a barycentric point.
  Vec3 position(const BarycentricPoint& p) const;

 private:
  std::vector<Vec3> vertices_;
  std::shared_ptr<const Topology> topology_;
};

/// Neighbors of v in counter-clockwise order, starting at the lowest index.
std::vector<int> one_ring(const Mesh& mesh, int v);

struct EdgeNeighborhood {
  std::vector<int> vertices;  ///< union of both 1-rings minus j and k, ascending
  std::vector<int> faces;     ///< faces incident to j or k, ascending
};

/// Union of the 1-rings of j and k. Throws TopologyError if (j,k) is not an edge.
EdgeNeighborhood edge_neighborhood(const Mesh& mesh, int j, int k);

/// True iff the 1-rings of j and k share exactly two vertices and those two
/// are not joined by an edge. Throws TopologyError if (j,k) is not an edge.
bool check_link_condition(const Mesh& mesh, int j, int k);

/// 64-bit FNV-1a over vertex bit patterns and face indices.
std::uint64_t mesh_hash(const Mesh& mesh);

}  // namespace nsub
