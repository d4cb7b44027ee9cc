#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "nsub/mesh.hpp"

namespace nsub {

struct ClosestPoint {
  double distance = 0.0;
  BarycentricPoint point;  ///< on the queried mesh
  Vec3 position = Vec3::Zero();
};

/// Closest point of triangle (a, b, c) to p with its barycentric weights.
Vec3 closest_point_on_triangle(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c,
                               std::array<double, 3>& weights);

/// Exact closest point over all faces (linear scan with box pruning). Ties
/// go to the lowest face index.
ClosestPoint point_to_mesh_distance(const Vec3& p, const Mesh& mesh);

/// Bounding-volume hierarchy over a mesh's faces. Results are bit-identical
/// to point_to_mesh_distance.
class MeshDistanceQuery {
 public:
  explicit MeshDistanceQuery(const Mesh& mesh);
  ClosestPoint closest(const Vec3& p) const;

 private:
  struct Node {
    Vec3 lo, hi;
    int left = -1;   ///< child node, or -1 for a leaf
    int right = -1;
    int begin = 0;   ///< leaf range into order_
    int end = 0;
  };
  int build(int begin, int end, const std::vector<Vec3>& centroids);

  const Mesh* mesh_;
  std::vector<Node> nodes_;
  std::vector<int> order_;
};

struct DirectionalDistance {
  double mean = 0.0;
  double max = 0.0;
  int samples = 0;  ///< surface samples (vertices are added to the max only)
};

struct DistanceReport {
  double hausdorff = 0.0;  ///< max of both directions
  double mean = 0.0;       ///< mean of both directional means
  DirectionalDistance a_to_b;
  DirectionalDistance b_to_a;
};

struct SamplingOptions {
  int samples = 100000;  ///< per direction, area-proportional over faces
  std::uint64_t seed = 0;
};

/// Seeded, stratified (per face, area-proportional) surface samples.
std::vector<BarycentricPoint> sample_surface(const Mesh& mesh, int count, std::uint64_t seed);

/// Metro-style distances: mean over samples of A to B (and B to A);
/// Hausdorff over samples plus all vertices. Distances below 1e-12 of the
/// joint bounding-box diagonal are reported as 0.
DistanceReport surface_distance(const Mesh& a, const Mesh& b, const SamplingOptions& options = {});

std::string format_report_json(const DistanceReport& report);

}  // namespace nsub
