#include "nsub/uv_chart.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include <Eigen/Dense>

#include "nsub/error.hpp"
#include "nsub/geometry.hpp"

namespace nsub {

namespace {

// Boundary cycle of a fan around the merged center, following the outer
// edges of each face in counter-clockwise order.
std::vector<int> boundary_cycle(std::span<const FanFace> faces, int j, int k) {
  std::map<int, int> successor;
  int count = 0;
  for (const FanFace& f : faces) {
    const Face& t = f.corners;
    int c = -1;
    for (int i = 0; i < 3; ++i) {
      if (t[i] == j || t[i] == k) c = i;
    }
    if (c < 0) throw TopologyError("fan face " + std::to_string(f.id) + " misses the center");
    int x = t[(c + 1) % 3], y = t[(c + 2) % 3];
    if (x == j || x == k || y == j || y == k) continue;  // face on the collapsing edge
    if (!successor.emplace(x, y).second) {
      throw TopologyError("edge neighborhood of (" + std::to_string(j) + ", " + std::to_string(k) +
                          ") is not a disk");
    }
    ++count;
  }
  if (successor.empty()) throw TopologyError("empty fan");
  std::vector<int> cycle;
  int start = successor.begin()->first;
  int v = start;
  do {
    cycle.push_back(v);
    auto it = successor.find(v);
    if (it == successor.end() || static_cast<int>(cycle.size()) > count) {
      throw TopologyError("edge neighborhood of (" + std::to_string(j) + ", " + std::to_string(k) +
                          ") is not a disk");
    }
    v = it->second;
  } while (v != start);
  if (static_cast<int>(cycle.size()) != count) {
    throw TopologyError("edge neighborhood of (" + std::to_string(j) + ", " + std::to_string(k) +
                        ") is not a disk");
  }
  return cycle;
}

void fill_triangles(UVChart& chart, std::span<const FanFace> faces) {
  std::map<int, int> local;
  for (int i = 0; i < chart.num_vertices(); ++i) local[chart.vertices[i]] = i;
  for (const FanFace& f : faces) {
    Face t{};
    for (int c = 0; c < 3; ++c) {
      auto it = local.find(f.corners[c]);
      if (it == local.end()) throw TopologyError("fan face outside chart");
      t[c] = it->second;
    }
    chart.triangles.push_back(t);
    chart.faces.push_back(f.id);
  }
}

// Isometric 2D layout of a 3D triangle: a at the origin, b on +x.
std::array<Vec2, 3> local_layout(const Vec3& a, const Vec3& b, const Vec3& c) {
  Vec3 e1 = b - a, e2 = c - a;
  double l1 = e1.norm();
  Vec3 x = e1 / l1;
  double px = e2.dot(x);
  double py = (e2 - px * x).norm();
  return {Vec2(0.0, 0.0), Vec2(l1, 0.0), Vec2(px, py)};
}

// Gradients of the three hat functions of a CCW 2D triangle, scaled by
// sqrt(area), so that the Cauchy-Riemann residuals weigh by area.
struct TriangleGradients {
  std::array<Vec2, 3> g;
  double area = 0.0;
};

TriangleGradients hat_gradients(const Vec3& a, const Vec3& b, const Vec3& c) {
  auto q = local_layout(a, b, c);
  double area = signed_area(q[0], q[1], q[2]);
  TriangleGradients out;
  out.area = area;
  if (!(area > 0.0)) return out;
  const double scale = std::sqrt(area) / (2.0 * area);
  for (int i = 0; i < 3; ++i) {
    Vec2 e = q[(i + 2) % 3] - q[(i + 1) % 3];
    out.g[i] = Vec2(-e.y(), e.x()) * scale;
  }
  return out;
}

}  // namespace

UVChart make_pre_chart(int j, int k, std::span<const FanFace> faces) {
  UVChart chart;
  chart.stage = ChartStage::PreCollapse;
  chart.num_interior = 2;
  chart.vertices = {j, k};
  for (int v : boundary_cycle(faces, j, k)) chart.vertices.push_back(v);
  fill_triangles(chart, faces);
  return chart;
}

UVChart make_post_chart(int survivor, const UVChart& pre, std::span<const FanFace> faces) {
  UVChart chart;
  chart.stage = ChartStage::PostCollapse;
  chart.num_interior = 1;
  chart.vertices.push_back(survivor);
  chart.uv.push_back(Vec2::Zero());
  for (int i = pre.num_interior; i < pre.num_vertices(); ++i) {
    chart.vertices.push_back(pre.vertices[i]);
    if (!pre.uv.empty()) chart.uv.push_back(pre.uv[i]);
  }
  if (pre.uv.empty()) chart.uv.clear();
  std::vector<int> cycle = boundary_cycle(faces, survivor, survivor);
  if (cycle.size() != chart.boundary().size()) {
    throw TopologyError("post-collapse fan boundary differs from the pre-collapse boundary");
  }
  fill_triangles(chart, faces);
  return chart;
}

void conformal_flatten(UVChart& chart, std::span<const Vec3> positions) {
  const int n = chart.num_vertices();
  if (static_cast<int>(positions.size()) != n || n < 3) {
    throw DimensionError("chart positions do not match chart vertices");
  }
  const int free = n - 2;
  const int rows = 2 * chart.num_triangles();
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(rows, 2 * free);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(rows);

  const double pin_length = (positions[1] - positions[0]).norm();
  const std::array<Vec2, 2> pinned{Vec2(0.0, 0.0), Vec2(pin_length, 0.0)};

  for (int t = 0; t < chart.num_triangles(); ++t) {
    const Face& tri = chart.triangles[t];
    TriangleGradients tg = hat_gradients(positions[tri[0]], positions[tri[1]], positions[tri[2]]);
    if (!(tg.area > 0.0)) throw NumericalError("degenerate triangle in chart");
    for (int c = 0; c < 3; ++c) {
      const int v = tri[c];
      const double gx = tg.g[c].x(), gy = tg.g[c].y();
      // r1 = sum gx*u - gy*v ; r2 = sum gy*u + gx*v
      if (v < 2) {
        rhs(2 * t) -= gx * pinned[v].x() - gy * pinned[v].y();
        rhs(2 * t + 1) -= gy * pinned[v].x() + gx * pinned[v].y();
      } else {
        const int col = 2 * (v - 2);
        M(2 * t, col) += gx;
        M(2 * t, col + 1) += -gy;
        M(2 * t + 1, col) += gy;
        M(2 * t + 1, col + 1) += gx;
      }
    }
  }

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(M);
  qr.setThreshold(1e-12);
  if (qr.rank() < 2 * free) throw NumericalError("conformal flattening system is rank deficient");
  Eigen::VectorXd z = qr.solve(rhs);
  if (!z.allFinite()) throw NumericalError("conformal flattening produced non-finite values");

  chart.uv.assign(static_cast<size_t>(n), Vec2::Zero());
  chart.uv[0] = pinned[0];
  chart.uv[1] = pinned[1];
  for (int v = 2; v < n; ++v) chart.uv[v] = Vec2(z(2 * (v - 2)), z(2 * (v - 2) + 1));
}

void reflatten_interior(UVChart& chart, std::span<const Vec3> positions) {
  const int n = chart.num_vertices();
  if (static_cast<int>(positions.size()) != n || static_cast<int>(chart.uv.size()) != n) {
    throw DimensionError("chart positions do not match chart vertices");
  }
  if (chart.num_interior != 1) throw DimensionError("reflatten needs exactly one interior vertex");
  Eigen::Matrix2d H = Eigen::Matrix2d::Zero();
  Eigen::Vector2d b = Eigen::Vector2d::Zero();
  for (int t = 0; t < chart.num_triangles(); ++t) {
    const Face& tri = chart.triangles[t];
    TriangleGradients tg = hat_gradients(positions[tri[0]], positions[tri[1]], positions[tri[2]]);
    if (!(tg.area > 0.0)) throw NumericalError("degenerate triangle in chart");
    Eigen::Matrix2d J = Eigen::Matrix2d::Zero();
    Eigen::Vector2d c = Eigen::Vector2d::Zero();
    for (int k = 0; k < 3; ++k) {
      const double gx = tg.g[k].x(), gy = tg.g[k].y();
      Eigen::Matrix2d Jk;
      Jk << gx, -gy, gy, gx;
      if (tri[k] == 0) {
        J += Jk;
      } else {
        c += Jk * chart.uv[tri[k]];
      }
    }
    H += J.transpose() * J;
    b -= J.transpose() * c;
  }
  const double det = H.determinant();
  if (!(std::abs(det) > 1e-14 * H.squaredNorm()) || !std::isfinite(det)) {
    throw NumericalError("interior re-flattening system is singular");
  }
  chart.uv[0] = H.inverse() * b;
}

double conformal_energy(const UVChart& chart, std::span<const Vec3> positions) {
  double energy = 0.0;
  for (int t = 0; t < chart.num_triangles(); ++t) {
    const Face& tri = chart.triangles[t];
    TriangleGradients tg = hat_gradients(positions[tri[0]], positions[tri[1]], positions[tri[2]]);
    double r1 = 0.0, r2 = 0.0;
    for (int k = 0; k < 3; ++k) {
      const Vec2& w = chart.uv[tri[k]];
      r1 += tg.g[k].x() * w.x() - tg.g[k].y() * w.y();
      r2 += tg.g[k].y() * w.x() + tg.g[k].x() * w.y();
    }
    energy += r1 * r1 + r2 * r2;
  }
  return energy;
}

double chart_signed_area(const UVChart& chart, int triangle) {
  const Face& t = chart.triangles[triangle];
  return signed_area(chart.uv[t[0]], chart.uv[t[1]], chart.uv[t[2]]);
}

double chart_total_area(const UVChart& chart) {
  double total = 0.0;
  for (int t = 0; t < chart.num_triangles(); ++t) total += chart_signed_area(chart, t);
  return total;
}

bool all_triangles_positive(const UVChart& chart) {
  for (int t = 0; t < chart.num_triangles(); ++t) {
    if (!(chart_signed_area(chart, t) > 0.0)) return false;
  }
  return true;
}

double interior_angle_sum(const UVChart& chart, int v) {
  double sum = 0.0;
  for (const Face& t : chart.triangles) {
    for (int c = 0; c < 3; ++c) {
      if (t[c] != v) continue;
      Vec2 a = chart.uv[t[(c + 1) % 3]] - chart.uv[v];
      Vec2 b = chart.uv[t[(c + 2) % 3]] - chart.uv[v];
      double cross = a.x() * b.y() - a.y() * b.x();
      sum += std::atan2(std::abs(cross), a.dot(b));
    }
  }
  return sum;
}

ChartLocation locate(const UVChart& chart, const Vec2& p) {
  ChartLocation best;
  best.min_weight = -std::numeric_limits<double>::infinity();
  for (int t = 0; t < chart.num_triangles(); ++t) {
    const Face& tri = chart.triangles[t];
    const Vec2& a = chart.uv[tri[0]];
    const Vec2& b = chart.uv[tri[1]];
    const Vec2& c = chart.uv[tri[2]];
    double area = signed_area(a, b, c);
    if (!(area > 0.0)) continue;
    std::array<double, 3> w{signed_area(p, b, c) / area, signed_area(a, p, c) / area, 0.0};
    w[2] = 1.0 - w[0] - w[1];
    double m = std::min({w[0], w[1], w[2]});
    if (m > best.min_weight) {
      best.triangle = t;
      best.weights = w;
      best.min_weight = m;
    }
  }
  return best;
}

Vec2 chart_point(const UVChart& chart, int triangle, const std::array<double, 3>& w) {
  const Face& t = chart.triangles[triangle];
  return w[0] * chart.uv[t[0]] + w[1] * chart.uv[t[1]] + w[2] * chart.uv[t[2]];
}

}  // namespace nsub
