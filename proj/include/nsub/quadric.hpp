#pragma once

#include <vector>

#include <Eigen/Core>

#include "nsub/mesh.hpp"

namespace nsub {

/// Sum of weighted squared point-to-plane distances, as a symmetric 4x4 form
/// over homogeneous points.
struct Quadric {
  Eigen::Matrix4d matrix = Eigen::Matrix4d::Zero();

  /// weight * (n.x + d)^2 for the plane n.x + d = 0 (n unit length).
  static Quadric from_plane(const Vec3& normal, double offset, double weight);

  double evaluate(const Vec3& x) const;

  Quadric& operator+=(const Quadric& other) {
    matrix += other.matrix;
    return *this;
  }
  friend Quadric operator+(Quadric a, const Quadric& b) { return a += b; }
};

/// Per-vertex sum of the area-weighted plane quadrics of incident faces.
std::vector<Quadric> init_quadrics(const Mesh& mesh);

/// Quadric of one face (area-weighted plane quadric).
Quadric face_quadric(const Vec3& a, const Vec3& b, const Vec3& c);

struct Placement {
  Vec3 position = Vec3::Zero();
  double cost = 0.0;
  bool used_midpoint = false;
};

/// Minimizer of q over R^3; falls back to the midpoint of (a, b) when the
/// 3x3 block is singular (smallest/largest eigenvalue ratio below 1e-7).
Placement optimal_placement(const Quadric& q, const Vec3& a, const Vec3& b);

}  // namespace nsub
