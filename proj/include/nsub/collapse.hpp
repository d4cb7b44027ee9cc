#pragma once

#include <optional>
#include <string>
#include <vector>

#include "nsub/mesh.hpp"
#include "nsub/quadric.hpp"
#include "nsub/uv_chart.hpp"

namespace nsub {

/// Thresholds for accepting an edge collapse.
struct CollapseCriteria {
  double normal_threshold = 0.2;  ///< n_before . n_after must exceed this
  double min_quality = 0.2;       ///< triangle quality must exceed this (3D and UV)
  double angle_tolerance = 1e-7;  ///< |interior UV angle sum - 2 pi|
};

enum class CollapseCheck {
  Valid,
  LinkCondition,
  NormalFlip,
  Quality3D,
  FlattenFailed,
  UVFlip,
  UVOverlap,
  QualityUV,
};

const char* to_string(CollapseCheck check);

/// One applied collapse: (j, k) merged into the new vertex i.
/// `before.faces` lists the faces removed, `after.faces` the faces created;
/// together they are the face re-indexing table between the two levels.
struct CollapseRecord {
  int j = -1;
  int k = -1;
  int i = -1;
  Vec3 position = Vec3::Zero();
  UVChart before;
  UVChart after;
};

/// Collapse planned against a specific state; apply it only to that state.
struct CollapsePlan {
  CollapseCheck check = CollapseCheck::Valid;
  CollapseRecord record;
  std::vector<FanFace> removed;
  std::vector<FanFace> created;

  bool valid() const { return check == CollapseCheck::Valid; }
};

/// Mutable mesh used while decimating. Vertex and face ids are global and
/// never reused: a collapse kills j, k and every face touching them, and
/// appends the survivor and the re-created faces with fresh ids.
class DecimationState {
 public:
  explicit DecimationState(const Mesh& mesh);

  int num_alive_vertices() const { return alive_vertices_; }
  int num_alive_faces() const { return static_cast<int>(alive_faces_.size()); }
  int num_original_vertices() const { return original_vertices_; }
  int num_original_faces() const { return original_faces_; }

  const std::vector<Vec3>& positions() const { return positions_; }
  const std::vector<Face>& faces() const { return faces_; }
  const std::vector<Quadric>& quadrics() const { return quadrics_; }
  bool vertex_alive(int v) const { return vertex_faces_[v].size() > 0; }
  bool face_alive(int f) const { return alive_index_[f] >= 0; }
  /// Alive face ids in an order that only depends on the collapse history.
  const std::vector<int>& alive_faces() const { return alive_faces_; }

  bool is_edge(int a, int b) const;
  /// Alive faces incident to v, ascending.
  std::vector<int> faces_around(int v) const;
  /// Neighbors of v.
  std::vector<int> neighbors(int v) const;
  bool link_condition(int j, int k) const;

  /// QSLIM placement for merging j and k.
  Placement placement(int j, int k) const;

  /// Runs every validity criterion and, when valid, builds both charts.
  /// Throws TopologyError if (j, k) is not an edge.
  CollapsePlan plan(int j, int k, const Vec3& new_position,
                    const CollapseCriteria& criteria = {}) const;

  /// Applies a valid plan built against the current state.
  CollapseRecord apply(CollapsePlan plan);

  /// Compacts alive vertices/faces (ascending global id) into a Mesh.
  Mesh extract(std::vector<int>* vertex_global = nullptr, std::vector<int>* face_global = nullptr) const;

 private:
  int original_vertices_ = 0;
  int original_faces_ = 0;
  int alive_vertices_ = 0;
  std::vector<Vec3> positions_;
  std::vector<Face> faces_;
  std::vector<Quadric> quadrics_;
  std::vector<std::vector<int>> vertex_faces_;
  std::vector<int> alive_faces_;
  std::vector<int> alive_index_;
};

struct CollapseValidity {
  CollapseCheck check = CollapseCheck::Valid;
  bool valid() const { return check == CollapseCheck::Valid; }
};

/// All five validity criteria for collapsing (j, k) to new_position.
CollapseValidity validate_collapse(const Mesh& mesh, int j, int k, const Vec3& new_position,
                                   const CollapseCriteria& criteria = {});

/// Conformal flattening of the faces incident to j or k.
UVChart flatten_one_ring(const Mesh& mesh, int j, int k);

/// Collapses (j, k) with QSLIM placement and records both charts. Throws
/// Error carrying the failed criterion if the collapse is invalid.
CollapseRecord collapse_edge_with_param(DecimationState& state, int j, int k,
                                        const CollapseCriteria& criteria = {});

}  // namespace nsub
