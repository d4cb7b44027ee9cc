#include "nsub/pipeline.hpp"

#include "nsub/error.hpp"
#include "nsub/geometry.hpp"
#include "nsub/subdivide.hpp"

namespace nsub {

namespace {

using Eigen::MatrixXd;

// Input column layout shared by the vertex and edge modules:
// [edge vectors to dest, left, right] ++ features of (source, dest, left, right).
MatrixXd step_input(const Topology& topo, const std::vector<Vec3>& pos, const MatrixXd& feat,
                    const std::vector<Frame>& frames) {
  MatrixXd x(kStepInputDim, topo.num_halfedges());
  for (int h = 0; h < topo.num_halfedges(); ++h) {
    const Frame& r = frames[h];
    const int v[4] = {topo.source(h), topo.dest(h), topo.left_opposite(h), topo.right_opposite(h)};
    auto col = x.col(h);
    for (int k = 1; k < 4; ++k) col.segment<3>(3 * (k - 1)) = r * (pos[v[k]] - pos[v[0]]);
    for (int k = 0; k < 4; ++k) {
      const int base = 9 + kFeatureDim * k;
      col.segment<3>(base) = r * feat.col(v[k]).head<3>();
      col.segment<kLatentDim>(base + 3) = feat.col(v[k]).tail<kLatentDim>();
    }
  }
  return x;
}

MatrixXd init_input(const Topology& topo, const std::vector<Vec3>& pos,
                    const std::vector<Vec3>& diff, const std::vector<Frame>& frames) {
  MatrixXd x(kInitInputDim, topo.num_halfedges());
  for (int h = 0; h < topo.num_halfedges(); ++h) {
    const Frame& r = frames[h];
    const int v[4] = {topo.source(h), topo.dest(h), topo.left_opposite(h), topo.right_opposite(h)};
    auto col = x.col(h);
    for (int k = 1; k < 4; ++k) col.segment<3>(3 * (k - 1)) = r * (pos[v[k]] - pos[v[0]]);
    for (int k = 0; k < 4; ++k) col.segment<3>(9 + 3 * k) = r * diff[v[k]];
  }
  return x;
}

// Backward of step_input with frames held fixed.
void scatter_step_input(const Topology& topo, const std::vector<Frame>& frames, const MatrixXd& dx,
                        std::vector<Vec3>& d_pos, MatrixXd& d_feat) {
  for (int h = 0; h < topo.num_halfedges(); ++h) {
    const Frame& r = frames[h];
    const int v[4] = {topo.source(h), topo.dest(h), topo.left_opposite(h), topo.right_opposite(h)};
    auto col = dx.col(h);
    for (int k = 1; k < 4; ++k) {
      Vec3 g = r.transpose() * col.segment<3>(3 * (k - 1));
      d_pos[v[k]] += g;
      d_pos[v[0]] -= g;
    }
    for (int k = 0; k < 4; ++k) {
      const int base = 9 + kFeatureDim * k;
      d_feat.col(v[k]).head<3>() += r.transpose() * col.segment<3>(base);
      d_feat.col(v[k]).tail<kLatentDim>() += col.segment<kLatentDim>(base + 3);
    }
  }
}

// Mean over each vertex's outgoing half-flaps (ascending destination order);
// displacements are rotated back to global coordinates first.
MatrixXd pool_vertices(const Topology& topo, const MatrixXd& y, const std::vector<Frame>& frames) {
  MatrixXd out = MatrixXd::Zero(kFeatureDim, topo.num_vertices());
  for (int v = 0; v < topo.num_vertices(); ++v) {
    auto col = out.col(v);
    for (int h : topo.outgoing_sorted(v)) {
      col.head<3>() += frames[h].transpose() * y.col(h).head<3>();
      col.tail<kLatentDim>() += y.col(h).tail<kLatentDim>();
    }
    col /= static_cast<double>(topo.valence(v));
  }
  return out;
}

MatrixXd unpool_vertices(const Topology& topo, const MatrixXd& d_out, const std::vector<Frame>& frames) {
  MatrixXd dy(kFeatureDim, topo.num_halfedges());
  for (int v = 0; v < topo.num_vertices(); ++v) {
    const double inv = 1.0 / static_cast<double>(topo.valence(v));
    for (int h : topo.outgoing_sorted(v)) {
      dy.col(h).head<3>() = frames[h] * d_out.col(v).head<3>() * inv;
      dy.col(h).tail<kLatentDim>() = d_out.col(v).tail<kLatentDim>() * inv;
    }
  }
  return dy;
}

// Mean of the two half-flaps of every edge, a -> b first.
MatrixXd pool_edges(const Topology& topo, const MatrixXd& y, const std::vector<Frame>& frames) {
  MatrixXd out(kFeatureDim, topo.num_edges());
  for (int e = 0; e < topo.num_edges(); ++e) {
    const int h = topo.edge_halfedge(e), t = topo.twin(h);
    auto col = out.col(e);
    col.head<3>() = frames[h].transpose() * y.col(h).head<3>();
    col.head<3>() += frames[t].transpose() * y.col(t).head<3>();
    col.tail<kLatentDim>() = y.col(h).tail<kLatentDim>();
    col.tail<kLatentDim>() += y.col(t).tail<kLatentDim>();
    col /= 2.0;
  }
  return out;
}

MatrixXd unpool_edges(const Topology& topo, const MatrixXd& d_out, const std::vector<Frame>& frames) {
  MatrixXd dy(kFeatureDim, topo.num_halfedges());
  for (int e = 0; e < topo.num_edges(); ++e) {
    const int hs[2] = {topo.edge_halfedge(e), topo.twin(topo.edge_halfedge(e))};
    for (int h : hs) {
      dy.col(h).head<3>() = frames[h] * d_out.col(e).head<3>() * 0.5;
      dy.col(h).tail<kLatentDim>() = d_out.col(e).tail<kLatentDim>() * 0.5;
    }
  }
  return dy;
}

std::vector<Frame> frames_for(const Topology& topo, const std::vector<Vec3>& pos,
                              const FlapPassTape* frozen) {
  if (!frozen) return half_flap_frames(topo, pos);
  if (static_cast<int>(frozen->frames.size()) != topo.num_halfedges()) {
    throw DimensionError("frozen frames do not match the connectivity");
  }
  return frozen->frames;
}

// Evaluates a module, optionally recording the pass.
MatrixXd run_module(const MLPParams& params, MatrixXd input, std::vector<Frame> frames,
                    FlapPassTape* tape, std::vector<Frame>* frames_out) {
  if (tape) {
    tape->cache.input = std::move(input);
    MatrixXd y = mlp_forward(params, tape->cache);
    tape->frames = std::move(frames);
    if (frames_out) *frames_out = tape->frames;
    return y;
  }
  MatrixXd y = mlp_forward(params, input);
  if (frames_out) *frames_out = std::move(frames);
  return y;
}

VertexStates init_pass(const Topology& topo, const std::vector<Vec3>& pos, const NetworkBundle& bundle,
                       FlapPassTape* tape, const FlapPassTape* frozen) {
  std::vector<Frame> frames = frames_for(topo, pos, frozen);
  MatrixXd x = init_input(topo, pos, differential_coordinates(topo, pos), frames);
  std::vector<Frame> used;
  MatrixXd y = run_module(bundle.init, std::move(x), std::move(frames), tape, &used);
  return VertexStates{pos, pool_vertices(topo, y, used)};
}

VertexStates vertex_pass(const Topology& topo, const VertexStates& in, const NetworkBundle& bundle,
                         FlapPassTape* tape, const FlapPassTape* frozen) {
  std::vector<Frame> frames = frames_for(topo, in.positions, frozen);
  MatrixXd x = step_input(topo, in.positions, in.features, frames);
  std::vector<Frame> used;
  MatrixXd y = run_module(bundle.vertex, std::move(x), std::move(frames), tape, &used);
  VertexStates out;
  out.features = pool_vertices(topo, y, used);
  out.positions.resize(in.positions.size());
  for (int v = 0; v < topo.num_vertices(); ++v) {
    out.positions[v] = in.positions[v] + out.features.col(v).head<3>();
  }
  return out;
}

VertexStates edge_pass(const Topology& topo, const VertexStates& in, const NetworkBundle& bundle,
                       FlapPassTape* tape, const FlapPassTape* frozen) {
  std::vector<Frame> frames = frames_for(topo, in.positions, frozen);
  MatrixXd x = step_input(topo, in.positions, in.features, frames);
  std::vector<Frame> used;
  MatrixXd y = run_module(bundle.edge, std::move(x), std::move(frames), tape, &used);
  VertexStates out;
  out.features = pool_edges(topo, y, used);
  out.positions.resize(static_cast<size_t>(topo.num_edges()));
  for (int e = 0; e < topo.num_edges(); ++e) {
    const Edge& ed = topo.edges()[e];
    out.positions[e] = 0.5 * (in.positions[ed.a] + in.positions[ed.b]);
    out.positions[e] += out.features.col(e).head<3>();
  }
  return out;
}

// Even vertices first, then one odd vertex per edge.
VertexStates concatenate(VertexStates even, const VertexStates& odd) {
  VertexStates out;
  out.positions = std::move(even.positions);
  out.positions.insert(out.positions.end(), odd.positions.begin(), odd.positions.end());
  out.features.resize(kFeatureDim, even.features.cols() + odd.features.cols());
  out.features << even.features, odd.features;
  return out;
}

void check_states(const Topology& topo, const VertexStates& s) {
  if (s.size() != topo.num_vertices() || s.features.rows() != kFeatureDim ||
      s.features.cols() != topo.num_vertices()) {
    throw DimensionError("vertex states do not match the connectivity");
  }
}

}  // namespace

SubdivisionHierarchy::SubdivisionHierarchy(std::shared_ptr<const Topology> coarse, int levels) {
  if (levels < 0) throw DimensionError("levels must be nonnegative");
  topologies_.push_back(std::move(coarse));
  for (int l = 0; l < levels; ++l) topologies_.push_back(midpoint_topology(*topologies_.back()));
}

VertexStates init_features(const Mesh& mesh, const NetworkBundle& bundle) {
  return init_pass(mesh.topology(), mesh.vertices(), bundle, nullptr, nullptr);
}

VertexStates step_vertex(const Topology& topology, const VertexStates& states,
                         const NetworkBundle& bundle) {
  check_states(topology, states);
  return vertex_pass(topology, states, bundle, nullptr, nullptr);
}

VertexStates step_edge(const Topology& topology, const VertexStates& states,
                       const NetworkBundle& bundle) {
  check_states(topology, states);
  return edge_pass(topology, states, bundle, nullptr, nullptr);
}

std::vector<Mesh> neural_subdivide(const Mesh& mesh, const NetworkBundle& bundle, int levels) {
  if (levels < 1) throw DimensionError("levels must be at least 1");
  SubdivisionHierarchy hierarchy(mesh.shared_topology(), levels);
  ForwardOutput fwd = forward_pipeline(hierarchy, mesh.vertices(), bundle);
  std::vector<Mesh> out;
  for (int l = 1; l <= levels; ++l) {
    out.emplace_back(std::move(fwd.positions[l]), hierarchy.shared_topology(l));
  }
  return out;
}

std::vector<Mesh> neural_subdivide_normalized(const Mesh& mesh, const NetworkBundle& bundle,
                                              int levels) {
  const Similarity& n = bundle.normalization;
  // Skipped for the identity so that signed zeros and last bits survive untouched.
  if (n.scale == 1.0 && n.translation.isZero(0.0)) return neural_subdivide(mesh, bundle, levels);
  std::vector<Mesh> out = neural_subdivide(transform(mesh, n), bundle, levels);
  const Similarity back = n.inverse();
  for (Mesh& m : out) m = transform(m, back);
  return out;
}

ForwardOutput forward_pipeline(const SubdivisionHierarchy& hierarchy,
                               const std::vector<Vec3>& coarse_positions,
                               const NetworkBundle& bundle, ForwardTape* tape,
                               const ForwardTape* frozen) {
  const int levels = hierarchy.levels();
  if (static_cast<int>(coarse_positions.size()) != hierarchy.topology(0).num_vertices()) {
    throw DimensionError("coarse positions do not match the connectivity");
  }
  if (frozen && (static_cast<int>(frozen->vertex.size()) != levels ||
                 static_cast<int>(frozen->edge.size()) != levels)) {
    throw DimensionError("frozen frames cover a different number of levels");
  }
  if (tape) {
    tape->vertex.assign(static_cast<size_t>(levels), {});
    tape->edge.assign(static_cast<size_t>(levels), {});
  }
  ForwardOutput out;
  out.positions.push_back(coarse_positions);
  VertexStates states = init_pass(hierarchy.topology(0), coarse_positions, bundle,
                                  tape ? &tape->init : nullptr, frozen ? &frozen->init : nullptr);
  for (int l = 0; l < levels; ++l) {
    const Topology& topo = hierarchy.topology(l);
    VertexStates even = vertex_pass(topo, states, bundle, tape ? &tape->vertex[l] : nullptr,
                                    frozen ? &frozen->vertex[l] : nullptr);
    VertexStates odd = edge_pass(topo, even, bundle, tape ? &tape->edge[l] : nullptr,
                                 frozen ? &frozen->edge[l] : nullptr);
    states = concatenate(std::move(even), odd);
    out.positions.push_back(states.positions);
  }
  out.final_states = std::move(states);
  return out;
}

void backward_pipeline(const SubdivisionHierarchy& hierarchy, const NetworkBundle& bundle,
                       const ForwardTape& tape, const std::vector<std::vector<Vec3>>& d_positions,
                       NetworkBundle& grad) {
  const int levels = hierarchy.levels();
  if (static_cast<int>(d_positions.size()) != levels + 1) {
    throw DimensionError("expected position gradients for every level");
  }
  for (int l = 1; l <= levels; ++l) {
    if (static_cast<int>(d_positions[l].size()) != hierarchy.topology(l).num_vertices()) {
      throw DimensionError("position gradient size differs from level " + std::to_string(l));
    }
  }
  // Gradients w.r.t. the states entering the level being unwound.
  std::vector<Vec3> d_pos = d_positions[levels];
  MatrixXd d_feat = MatrixXd::Zero(kFeatureDim, hierarchy.topology(levels).num_vertices());

  for (int l = levels - 1; l >= 0; --l) {
    const Topology& topo = hierarchy.topology(l);
    const int nv = topo.num_vertices(), ne = topo.num_edges();

    // Edge step: odd = midpoint(even) + pooled displacement.
    std::vector<Vec3> d_even_pos(d_pos.begin(), d_pos.begin() + nv);
    MatrixXd d_even_feat = d_feat.leftCols(nv);
    MatrixXd d_odd_out = d_feat.rightCols(ne);
    for (int e = 0; e < ne; ++e) {
      const Vec3& g = d_pos[nv + e];
      const Edge& ed = topo.edges()[e];
      d_even_pos[ed.a] += 0.5 * g;
      d_even_pos[ed.b] += 0.5 * g;
      d_odd_out.col(e).head<3>() += g;
    }
    const FlapPassTape& et = tape.edge[l];
    MatrixXd dy = unpool_edges(topo, d_odd_out, et.frames);
    MatrixXd dx;
    mlp_backward(bundle.edge, et.cache, dy, grad.edge, &dx);
    scatter_step_input(topo, et.frames, dx, d_even_pos, d_even_feat);

    // Vertex step: even = old + pooled displacement, feature = pooled output.
    MatrixXd d_vertex_out = std::move(d_even_feat);
    for (int v = 0; v < nv; ++v) d_vertex_out.col(v).head<3>() += d_even_pos[v];
    const FlapPassTape& vt = tape.vertex[l];
    dy = unpool_vertices(topo, d_vertex_out, vt.frames);
    mlp_backward(bundle.vertex, vt.cache, dy, grad.vertex, &dx);
    d_pos = std::move(d_even_pos);
    d_feat = MatrixXd::Zero(kFeatureDim, nv);
    scatter_step_input(topo, vt.frames, dx, d_pos, d_feat);
    if (l > 0) {
      for (int v = 0; v < nv; ++v) d_pos[v] += d_positions[l][v];
    }
  }

  // Init module: feature = pooled output; coarse positions are constants.
  MatrixXd dy = unpool_vertices(hierarchy.topology(0), d_feat, tape.init.frames);
  mlp_backward(bundle.init, tape.init.cache, dy, grad.init, nullptr);
}

}  // namespace nsub
