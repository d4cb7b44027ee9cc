#include "nsub/distance.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include <json.hpp>

#include "nsub/error.hpp"
#include "nsub/geometry.hpp"

namespace nsub {

namespace {

constexpr int kLeafSize = 4;

double box_distance2(const Vec3& p, const Vec3& lo, const Vec3& hi) {
  double d2 = 0.0;
  for (int i = 0; i < 3; ++i) {
    double d = std::max({lo[i] - p[i], 0.0, p[i] - hi[i]});
    d2 += d * d;
  }
  return d2;
}

struct Candidate {
  double d2 = std::numeric_limits<double>::infinity();
  int face = -1;
  std::array<double, 3> w{};
  Vec3 q = Vec3::Zero();
};

// Shared by the scan and the tree so that both produce identical bits.
void test_face(const Vec3& p, const Mesh& mesh, int f, Candidate& best) {
  const Face& t = mesh.faces()[f];
  std::array<double, 3> w;
  Vec3 q = closest_point_on_triangle(p, mesh.vertex(t[0]), mesh.vertex(t[1]), mesh.vertex(t[2]), w);
  double d2 = (q - p).squaredNorm();
  if (d2 < best.d2 || (d2 == best.d2 && f < best.face)) {
    best.d2 = d2;
    best.face = f;
    best.w = w;
    best.q = q;
  }
}

ClosestPoint finish(const Candidate& c) {
  ClosestPoint out;
  out.distance = std::sqrt(c.d2);
  out.point = BarycentricPoint{c.face, c.w};
  out.position = c.q;
  return out;
}

}  // namespace

Vec3 closest_point_on_triangle(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c,
                               std::array<double, 3>& w) {
  const Vec3 ab = b - a, ac = c - a, ap = p - a;
  const double d1 = ab.dot(ap), d2 = ac.dot(ap);
  if (d1 <= 0.0 && d2 <= 0.0) {
    w = {1.0, 0.0, 0.0};
    return a;
  }
  const Vec3 bp = p - b;
  const double d3 = ab.dot(bp), d4 = ac.dot(bp);
  if (d3 >= 0.0 && d4 <= d3) {
    w = {0.0, 1.0, 0.0};
    return b;
  }
  const double vc = d1 * d4 - d3 * d2;
  if (vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0) {
    const double v = d1 / (d1 - d3);
    w = {1.0 - v, v, 0.0};
    return a + v * ab;
  }
  const Vec3 cp = p - c;
  const double d5 = ab.dot(cp), d6 = ac.dot(cp);
  if (d6 >= 0.0 && d5 <= d6) {
    w = {0.0, 0.0, 1.0};
    return c;
  }
  const double vb = d5 * d2 - d1 * d6;
  if (vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0) {
    const double v = d2 / (d2 - d6);
    w = {1.0 - v, 0.0, v};
    return a + v * ac;
  }
  const double va = d3 * d6 - d5 * d4;
  if (va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0) {
    const double v = (d4 - d3) / ((d4 - d3) + (d5 - d6));
    w = {0.0, 1.0 - v, v};
    return b + v * (c - b);
  }
  const double denom = 1.0 / (va + vb + vc);
  const double v = vb * denom, u = vc * denom;
  w = {1.0 - v - u, v, u};
  return a + ab * v + ac * u;
}

ClosestPoint point_to_mesh_distance(const Vec3& p, const Mesh& mesh) {
  if (mesh.num_faces() == 0) throw DimensionError("distance to an empty mesh");
  Candidate best;
  for (int f = 0; f < mesh.num_faces(); ++f) {
    const Face& t = mesh.faces()[f];
    Vec3 lo = mesh.vertex(t[0]).cwiseMin(mesh.vertex(t[1])).cwiseMin(mesh.vertex(t[2]));
    Vec3 hi = mesh.vertex(t[0]).cwiseMax(mesh.vertex(t[1])).cwiseMax(mesh.vertex(t[2]));
    if (box_distance2(p, lo, hi) > best.d2) continue;
    test_face(p, mesh, f, best);
  }
  return finish(best);
}

MeshDistanceQuery::MeshDistanceQuery(const Mesh& mesh) : mesh_(&mesh) {
  if (mesh.num_faces() == 0) throw DimensionError("distance to an empty mesh");
  std::vector<Vec3> centroids(static_cast<size_t>(mesh.num_faces()));
  for (int f = 0; f < mesh.num_faces(); ++f) {
    const Face& t = mesh.faces()[f];
    centroids[f] = (mesh.vertex(t[0]) + mesh.vertex(t[1]) + mesh.vertex(t[2])) / 3.0;
  }
  order_.resize(centroids.size());
  std::iota(order_.begin(), order_.end(), 0);
  nodes_.reserve(2 * centroids.size() / kLeafSize + 2);
  build(0, static_cast<int>(order_.size()), centroids);
}

int MeshDistanceQuery::build(int begin, int end, const std::vector<Vec3>& centroids) {
  const int id = static_cast<int>(nodes_.size());
  nodes_.emplace_back();
  Vec3 lo = Vec3::Constant(std::numeric_limits<double>::infinity());
  Vec3 hi = -lo;
  for (int i = begin; i < end; ++i) {
    for (int v : mesh_->faces()[order_[i]]) {
      lo = lo.cwiseMin(mesh_->vertex(v));
      hi = hi.cwiseMax(mesh_->vertex(v));
    }
  }
  nodes_[id].lo = lo;
  nodes_[id].hi = hi;
  if (end - begin <= kLeafSize) {
    nodes_[id].begin = begin;
    nodes_[id].end = end;
    return id;
  }
  Vec3 extent = hi - lo;
  int axis = 0;
  if (extent[1] > extent[axis]) axis = 1;
  if (extent[2] > extent[axis]) axis = 2;
  const int mid = begin + (end - begin) / 2;
  std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                   [&](int x, int y) {
                     return centroids[x][axis] < centroids[y][axis] ||
                            (centroids[x][axis] == centroids[y][axis] && x < y);
                   });
  int left = build(begin, mid, centroids);
  int right = build(mid, end, centroids);
  nodes_[id].left = left;
  nodes_[id].right = right;
  return id;
}

ClosestPoint MeshDistanceQuery::closest(const Vec3& p) const {
  Candidate best;
  std::vector<int> stack{0};
  stack.reserve(64);
  while (!stack.empty()) {
    const Node& node = nodes_[stack.back()];
    stack.pop_back();
    // Ties must still be visited so the lowest face index wins.
    if (box_distance2(p, node.lo, node.hi) > best.d2) continue;
    if (node.left < 0) {
      for (int i = node.begin; i < node.end; ++i) test_face(p, *mesh_, order_[i], best);
      continue;
    }
    double dl = box_distance2(p, nodes_[node.left].lo, nodes_[node.left].hi);
    double dr = box_distance2(p, nodes_[node.right].lo, nodes_[node.right].hi);
    // Visit the nearer child first.
    if (dl <= dr) {
      stack.push_back(node.right);
      stack.push_back(node.left);
    } else {
      stack.push_back(node.left);
      stack.push_back(node.right);
    }
  }
  return finish(best);
}

std::vector<BarycentricPoint> sample_surface(const Mesh& mesh, int count, std::uint64_t seed) {
  if (count < 0) throw DimensionError("sample count must be nonnegative");
  const int nf = mesh.num_faces();
  std::vector<double> area(static_cast<size_t>(nf));
  double total = 0.0;
  for (int f = 0; f < nf; ++f) {
    const Face& t = mesh.faces()[f];
    area[f] = triangle_area(mesh.vertex(t[0]), mesh.vertex(t[1]), mesh.vertex(t[2]));
    total += area[f];
  }
  std::vector<int> per_face(static_cast<size_t>(nf), 0);
  if (total > 0.0 && count > 0) {
    // Largest-remainder allocation; ties broken by face index.
    std::vector<std::pair<double, int>> remainder;
    int assigned = 0;
    for (int f = 0; f < nf; ++f) {
      double exact = count * area[f] / total;
      per_face[f] = static_cast<int>(std::floor(exact));
      assigned += per_face[f];
      remainder.emplace_back(exact - per_face[f], f);
    }
    std::sort(remainder.begin(), remainder.end(),
              [](const auto& x, const auto& y) { return x.first > y.first || (x.first == y.first && x.second < y.second); });
    for (int i = 0; assigned < count && i < nf; ++i, ++assigned) ++per_face[remainder[i].second];
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<BarycentricPoint> out;
  out.reserve(static_cast<size_t>(count));
  for (int f = 0; f < nf; ++f) {
    for (int s = 0; s < per_face[f]; ++s) {
      double r1 = std::sqrt(unit(rng)), r2 = unit(rng);
      out.push_back(BarycentricPoint{f, {1.0 - r1, r1 * (1.0 - r2), r1 * r2}});
    }
  }
  return out;
}

namespace {

DirectionalDistance directional(const Mesh& from, const MeshDistanceQuery& to, int samples,
                                std::uint64_t seed, double snap) {
  DirectionalDistance out;
  auto points = sample_surface(from, samples, seed);
  double sum = 0.0;
  for (const BarycentricPoint& p : points) {
    double d = to.closest(from.position(p)).distance;
    if (d < snap) d = 0.0;
    sum += d;
    out.max = std::max(out.max, d);
  }
  for (const Vec3& v : from.vertices()) {
    double d = to.closest(v).distance;
    if (d < snap) d = 0.0;
    out.max = std::max(out.max, d);
  }
  out.samples = static_cast<int>(points.size());
  out.mean = points.empty() ? 0.0 : sum / static_cast<double>(points.size());
  return out;
}

}  // namespace

DistanceReport surface_distance(const Mesh& a, const Mesh& b, const SamplingOptions& options) {
  if (a.num_faces() == 0 || b.num_faces() == 0) throw DimensionError("distance between empty meshes");
  if (options.samples < 1) throw DimensionError("sample count must be positive");
  std::vector<Vec3> all = a.vertices();
  all.insert(all.end(), b.vertices().begin(), b.vertices().end());
  const double snap = 1e-12 * bounding_box(all).diagonal();
  MeshDistanceQuery qa(a), qb(b);
  DistanceReport r;
  // Seeds depend on the sampled mesh, so swapping a and b swaps the directions.
  r.a_to_b = directional(a, qb, options.samples, options.seed ^ mesh_hash(a), snap);
  r.b_to_a = directional(b, qa, options.samples, options.seed ^ mesh_hash(b), snap);
  r.hausdorff = std::max(r.a_to_b.max, r.b_to_a.max);
  r.mean = 0.5 * (r.a_to_b.mean + r.b_to_a.mean);
  return r;
}

std::string format_report_json(const DistanceReport& r) {
  auto dir = [](const DirectionalDistance& d) {
    return nlohmann::ordered_json{{"mean", d.mean}, {"max", d.max}, {"samples", d.samples}};
  };
  nlohmann::ordered_json j{{"hausdorff", r.hausdorff},
                           {"mean", r.mean},
                           {"a_to_b", dir(r.a_to_b)},
                           {"b_to_a", dir(r.b_to_a)}};
  return j.dump(2);
}

}  // namespace nsub
