#include "nsub/quadric.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>

#include "nsub/geometry.hpp"

namespace nsub {

namespace {
constexpr double kSingularRatio = 1e-7;
}

Quadric Quadric::from_plane(const Vec3& normal, double offset, double weight) {
  Eigen::Vector4d p(normal.x(), normal.y(), normal.z(), offset);
  Quadric q;
  q.matrix = weight * p * p.transpose();
  return q;
}

double Quadric::evaluate(const Vec3& x) const {
  Eigen::Vector4d h(x.x(), x.y(), x.z(), 1.0);
  return h.dot(matrix * h);
}

Quadric face_quadric(const Vec3& a, const Vec3& b, const Vec3& c) {
  Vec3 n = face_normal(a, b, c);
  return Quadric::from_plane(n, -n.dot(a), triangle_area(a, b, c));
}

std::vector<Quadric> init_quadrics(const Mesh& mesh) {
  std::vector<Quadric> q(static_cast<size_t>(mesh.num_vertices()));
  for (const Face& f : mesh.faces()) {
    Quadric fq = face_quadric(mesh.vertex(f[0]), mesh.vertex(f[1]), mesh.vertex(f[2]));
    for (int v : f) q[v] += fq;
  }
  return q;
}

Placement optimal_placement(const Quadric& q, const Vec3& a, const Vec3& b) {
  const Eigen::Matrix3d A = q.matrix.topLeftCorner<3, 3>();
  const Vec3 rhs = -q.matrix.topRightCorner<3, 1>();
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(A);
  const Vec3 lambda = eig.eigenvalues();
  const double largest = lambda.cwiseAbs().maxCoeff();
  Placement out;
  if (largest > 0.0 && lambda.minCoeff() > kSingularRatio * largest) {
    const Eigen::Matrix3d& V = eig.eigenvectors();
    out.position = V * (V.transpose() * rhs).cwiseQuotient(lambda);
  } else {
    out.position = 0.5 * (a + b);
    out.used_midpoint = true;
  }
  out.cost = std::max(0.0, q.evaluate(out.position));
  return out;
}

}  // namespace nsub
