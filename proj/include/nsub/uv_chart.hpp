#pragma once

#include <array>
#include <span>
#include <vector>

#include "nsub/mesh.hpp"

namespace nsub {

enum class ChartStage { PreCollapse, PostCollapse };

/// Flattened triangle fan around a collapsing edge (pre-collapse) or around
/// the surviving vertex (post-collapse). The first `num_interior` local
/// vertices are interior; the rest form the boundary cycle, in order.
struct UVChart {
  ChartStage stage = ChartStage::PreCollapse;
  int num_interior = 0;
  std::vector<int> vertices;   ///< global vertex ids
  std::vector<Vec2> uv;        ///< per local vertex
  std::vector<Face> triangles; ///< local indices, corner order of the global face
  std::vector<int> faces;      ///< global face id per triangle

  int num_vertices() const { return static_cast<int>(vertices.size()); }
  int num_triangles() const { return static_cast<int>(triangles.size()); }
  std::span<const int> boundary() const {
    return std::span<const int>(vertices).subspan(static_cast<size_t>(num_interior));
  }
};

/// One face of a fan with its global id.
struct FanFace {
  int id = -1;
  Face corners{};
};

/// Chart topology for the faces incident to j or k. Throws TopologyError if
/// the fan is not a disk. UVs are left empty.
UVChart make_pre_chart(int j, int k, std::span<const FanFace> faces);

/// Chart topology around `survivor` for the post-collapse faces, reusing the
/// boundary cycle (and its UVs, bit for bit) of `pre`.
UVChart make_post_chart(int survivor, const UVChart& pre, std::span<const FanFace> faces);

/// Least-squares conformal flattening with local vertex 0 pinned at the
/// origin and local vertex 1 at (|x0 - x1|, 0). `positions` are the 3D
/// positions of the chart vertices. Throws NumericalError if the system is
/// rank deficient.
void conformal_flatten(UVChart& chart, std::span<const Vec3> positions);

/// Places the single interior vertex (local 0) at the minimizer of the
/// conformal energy with the boundary UVs held fixed (a 2x2 solve). Throws
/// NumericalError if the system is singular.
void reflatten_interior(UVChart& chart, std::span<const Vec3> positions);

/// Conformal (least-squares) energy of the chart against its 3D triangles.
double conformal_energy(const UVChart& chart, std::span<const Vec3> positions);

double chart_signed_area(const UVChart& chart, int triangle);
double chart_total_area(const UVChart& chart);
bool all_triangles_positive(const UVChart& chart);
/// Sum of the UV corner angles at local vertex v.
double interior_angle_sum(const UVChart& chart, int v);

struct ChartLocation {
  int triangle = -1;
  std::array<double, 3> weights{};
  double min_weight = 0.0;
};

/// Triangle whose barycentric coordinates for `p` have the largest minimum.
ChartLocation locate(const UVChart& chart, const Vec2& p);
Vec2 chart_point(const UVChart& chart, int triangle, const std::array<double, 3>& weights);

}  // namespace nsub
