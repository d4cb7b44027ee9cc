#pragma once

#include <memory>
#include <vector>

#include <Eigen/Core>

#include "nsub/half_flap.hpp"
#include "nsub/mesh.hpp"
#include "nsub/mlp.hpp"
#include "nsub/network.hpp"

namespace nsub {

/// Per-vertex positions (global) and kFeatureDim-long features, one column
/// per vertex. The first three feature components are global vectors.
struct VertexStates {
  std::vector<Vec3> positions;
  Eigen::MatrixXd features;

  int size() const { return static_cast<int>(positions.size()); }
};

/// Connectivity of every level of a midpoint refinement, built once per
/// coarse mesh.
class SubdivisionHierarchy {
 public:
  SubdivisionHierarchy(std::shared_ptr<const Topology> coarse, int levels);

  int levels() const { return static_cast<int>(topologies_.size()) - 1; }
  const Topology& topology(int level) const { return *topologies_[level]; }
  const std::shared_ptr<const Topology>& shared_topology(int level) const { return topologies_[level]; }

 private:
  std::vector<std::shared_ptr<const Topology>> topologies_;
};

/// Runs the init module on every outgoing half-flap and average-pools.
/// Positions are unchanged.
VertexStates init_features(const Mesh& mesh, const NetworkBundle& bundle);

/// Vertex module: moves every vertex by its pooled displacement and
/// replaces its feature with the pooled output.
VertexStates step_vertex(const Topology& topology, const VertexStates& states,
                         const NetworkBundle& bundle);

/// Edge module on both half-flaps of every edge; one state per entry of
/// topology.edges(), placed at the edge midpoint plus the pooled displacement.
VertexStates step_edge(const Topology& topology, const VertexStates& states,
                       const NetworkBundle& bundle);

/// Level meshes 1..levels (entry l-1 is level l).
std::vector<Mesh> neural_subdivide(const Mesh& mesh, const NetworkBundle& bundle, int levels);

/// neural_subdivide in the frame the bundle was trained in: applies the
/// bundle's normalization first and maps the results back. Rigid motions of
/// the input still commute with the output because the similarity is fixed.
std::vector<Mesh> neural_subdivide_normalized(const Mesh& mesh, const NetworkBundle& bundle,
                                              int levels);

/// Frames and activations of one batched module evaluation.
struct FlapPassTape {
  std::vector<Frame> frames;
  MLPCache cache;
};

struct ForwardTape {
  FlapPassTape init;
  std::vector<FlapPassTape> vertex;  ///< per level
  std::vector<FlapPassTape> edge;    ///< per level
};

struct ForwardOutput {
  /// positions[l] holds the level-l vertices, l = 0..levels.
  std::vector<std::vector<Vec3>> positions;
  VertexStates final_states;
};

/// Full forward pass. Records activations in `tape` when given. When
/// `frozen` is given its frames are used instead of recomputing them from
/// the current positions (finite-difference checks of the frozen-frame graph).
ForwardOutput forward_pipeline(const SubdivisionHierarchy& hierarchy,
                               const std::vector<Vec3>& coarse_positions,
                               const NetworkBundle& bundle, ForwardTape* tape = nullptr,
                               const ForwardTape* frozen = nullptr);

/// Accumulates into `grad` the parameter gradient for upstream position
/// gradients `d_positions[l]` (levels 1..levels; entry 0 is ignored).
/// Frames are treated as constants.
void backward_pipeline(const SubdivisionHierarchy& hierarchy, const NetworkBundle& bundle,
                       const ForwardTape& tape,
                       const std::vector<std::vector<Vec3>>& d_positions, NetworkBundle& grad);

}  // namespace nsub
