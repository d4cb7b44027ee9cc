#pragma once

#include <vector>

#include <Eigen/Core>

#include "nsub/mesh.hpp"

namespace nsub {

/// Rows are the x, y, z axes of a half-flap's local frame; multiplying a
/// global vector by it gives local coordinates.
using Frame = Eigen::Matrix3d;

/// A directed edge with its two incident triangles.
struct HalfFlap {
  int halfedge = -1;
  int source = -1;
  int dest = -1;
  int left = -1;   ///< opposite corner of the face left of source -> dest
  int right = -1;  ///< opposite corner of the face on the right
  Frame frame = Frame::Identity();
};

/// x along source -> dest, z along the average of the two face normals
/// (left normal when they cancel, then the right one, then any
/// perpendicular), y = z × x and z re-orthogonalized as x × y. Throws
/// NumericalError for a zero-length edge.
Frame half_flap_frame(const Vec3& source, const Vec3& dest, const Vec3& left, const Vec3& right);

HalfFlap half_flap(const Topology& topology, const std::vector<Vec3>& positions, int halfedge);
inline HalfFlap half_flap(const Mesh& mesh, int halfedge) {
  return half_flap(mesh.topology(), mesh.vertices(), halfedge);
}

/// Frames of every halfedge, indexed by halfedge.
std::vector<Frame> half_flap_frames(const Topology& topology, const std::vector<Vec3>& positions);

}  // namespace nsub
