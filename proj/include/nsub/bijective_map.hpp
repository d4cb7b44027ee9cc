#pragma once

#include <string>
#include <vector>

#include "nsub/collapse.hpp"
#include "nsub/mesh.hpp"

namespace nsub {

/// Composition of per-collapse chart correspondences from a coarse mesh
/// back to the mesh it was decimated from.
class BijectiveMap {
 public:
  BijectiveMap() = default;
  /// `coarse_vertex_global` / `coarse_face_global` give the global id of
  /// each coarse vertex / face; records are in collapse (fine-to-coarse) order.
  BijectiveMap(Mesh fine, Mesh coarse, std::vector<CollapseRecord> records,
               std::vector<int> coarse_vertex_global, std::vector<int> coarse_face_global);

  /// Map without collapses: coarse == fine.
  static BijectiveMap identity(const Mesh& mesh);

  const Mesh& fine() const { return fine_; }
  const Mesh& coarse() const { return coarse_; }
  const std::vector<CollapseRecord>& records() const { return records_; }
  const std::vector<int>& coarse_vertex_global() const { return coarse_vertex_global_; }
  const std::vector<int>& coarse_face_global() const { return coarse_face_global_; }

  int num_global_vertices() const { return static_cast<int>(global_positions_.size()); }
  int num_global_faces() const { return static_cast<int>(global_faces_.size()); }
  const Vec3& global_position(int v) const { return global_positions_[v]; }
  const Face& global_face(int f) const { return global_faces_[f]; }
  /// Record that created face f, or -1 for faces of the fine mesh.
  int face_creator(int f) const { return face_creator_[f]; }

  struct Image {
    BarycentricPoint fine_point;
    Vec3 position = Vec3::Zero();
    int records_processed = 0;
  };

  /// Maps a point on the coarse mesh to the fine mesh. Throws NumericalError
  /// (naming the record) if chart point location fails beyond tolerance.
  Image map_point(const BarycentricPoint& coarse_point) const;

  /// Maps a point on a face created by record r (global face id) to the
  /// faces that record removed. Returns the new global face point.
  BarycentricPoint map_through_record(int r, const BarycentricPoint& global_point) const;

 private:
  Mesh fine_;
  Mesh coarse_;
  std::vector<CollapseRecord> records_;
  std::vector<int> coarse_vertex_global_;
  std::vector<int> coarse_face_global_;
  std::vector<Vec3> global_positions_;
  std::vector<Face> global_faces_;
  std::vector<int> face_creator_;
  std::vector<int> first_created_;
};

/// Tolerance below which a chart point-location result is treated as inside.
inline constexpr double kChartLocateTolerance = 1e-8;

/// Independent replay of a map: re-derives the mesh state before every
/// collapse and re-checks the validity criteria and chart invariants.
struct MapVerification {
  bool ok = true;
  std::string failure;           ///< first failure, empty when ok
  int records_checked = 0;
  double min_normal_dot = 1.0;   ///< smallest n_before . n_after seen
  double min_quality_3d = 1.0;
  double min_quality_uv = 1.0;
  double max_angle_error = 0.0;  ///< largest |interior angle sum - 2 pi|
  double max_area_mismatch = 0.0;  ///< relative |area(pre) - area(post)|
  bool connectivity_matches = false;
};

MapVerification verify_map(const BijectiveMap& map, const CollapseCriteria& criteria = {});

/// Largest UV error of a post -> pre -> post round trip over points sampled
/// in every post-collapse triangle of record r.
double record_round_trip_error(const CollapseRecord& record, int samples_per_triangle);

}  // namespace nsub
