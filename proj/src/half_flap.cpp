#include "nsub/half_flap.hpp"

#include <cmath>

#include "nsub/error.hpp"
#include "nsub/geometry.hpp"

namespace nsub {

namespace {

constexpr double kFoldThreshold = 1e-8;

}  // namespace

Frame half_flap_frame(const Vec3& source, const Vec3& dest, const Vec3& left, const Vec3& right) {
  Vec3 x = dest - source;
  double len = x.norm();
  if (!(len > 0.0)) throw NumericalError("half-flap on a zero-length edge");
  x /= len;
  Vec3 n_left = face_normal(source, dest, left);
  Vec3 n_right = face_normal(dest, source, right);
  Vec3 z = n_left + n_right;
  if (z.norm() < kFoldThreshold) {
    z = n_left.squaredNorm() > 0.0 ? n_left : n_right;
  }
  // Drop any component along x so a sloppy normal cannot tilt the frame.
  z -= z.dot(x) * x;
  if (z.norm() < kFoldThreshold) {
    Vec3 axis = std::abs(x.x()) < 0.9 ? Vec3::UnitX() : Vec3::UnitY();
    z = x.cross(axis);
  }
  z.normalize();
  Vec3 y = z.cross(x).normalized();
  z = x.cross(y);
  Frame f;
  f.row(0) = x;
  f.row(1) = y;
  f.row(2) = z;
  return f;
}

HalfFlap half_flap(const Topology& topology, const std::vector<Vec3>& positions, int h) {
  HalfFlap flap;
  flap.halfedge = h;
  flap.source = topology.source(h);
  flap.dest = topology.dest(h);
  flap.left = topology.left_opposite(h);
  flap.right = topology.right_opposite(h);
  flap.frame = half_flap_frame(positions[flap.source], positions[flap.dest], positions[flap.left],
                               positions[flap.right]);
  return flap;
}

std::vector<Frame> half_flap_frames(const Topology& topology, const std::vector<Vec3>& positions) {
  std::vector<Frame> frames(static_cast<size_t>(topology.num_halfedges()));
  for (int h = 0; h < topology.num_halfedges(); ++h) {
    frames[h] = half_flap_frame(positions[topology.source(h)], positions[topology.dest(h)],
                                positions[topology.left_opposite(h)],
                                positions[topology.right_opposite(h)]);
  }
  return frames;
}

}  // namespace nsub
