#pragma once

#include <memory>
#include <vector>

#include "nsub/mesh.hpp"

namespace nsub {

/// How each vertex and face of a midpoint-refined mesh relates to its input.
struct SubdivisionParents {
  /// Per output vertex: even vertices sit on a corner of their lowest-index
  /// incident face, odd vertices at (1/2, 1/2) on the lower-index face of
  /// their parent edge.
  std::vector<BarycentricPoint> vertex_parent;
  /// Per output face: the input face it was cut from (children of f are 4f..4f+3).
  std::vector<int> face_parent;
};

struct MidpointSubdivision {
  Mesh mesh;
  SubdivisionParents parents;
};

/// Connectivity of one 1-to-4 split. Even vertices keep indices 0..V-1, the
/// odd vertex of edges()[e] gets index V + e.
std::shared_ptr<const Topology> midpoint_topology(const Topology& coarse);

/// 1-to-4 split with odd vertices at geometric edge midpoints.
MidpointSubdivision midpoint_topology_subdivide(const Mesh& mesh);

/// Repeated midpoint refinement (geometry unchanged).
Mesh midpoint_subdivide(const Mesh& mesh, int levels);

}  // namespace nsub
