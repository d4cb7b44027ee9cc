#include "nsub/collapse.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "nsub/error.hpp"
#include "nsub/geometry.hpp"

namespace nsub {

const char* to_string(CollapseCheck check) {
  switch (check) {
    case CollapseCheck::Valid: return "valid";
    case CollapseCheck::LinkCondition: return "link condition";
    case CollapseCheck::NormalFlip: return "normal flip";
    case CollapseCheck::Quality3D: return "3D triangle quality";
    case CollapseCheck::FlattenFailed: return "flattening failed";
    case CollapseCheck::UVFlip: return "UV face flip";
    case CollapseCheck::UVOverlap: return "UV overlap";
    case CollapseCheck::QualityUV: return "UV triangle quality";
  }
  return "unknown";
}

DecimationState::DecimationState(const Mesh& mesh)
    : original_vertices_(mesh.num_vertices()),
      original_faces_(mesh.num_faces()),
      alive_vertices_(mesh.num_vertices()),
      positions_(mesh.vertices()),
      faces_(mesh.faces()),
      quadrics_(init_quadrics(mesh)),
      vertex_faces_(static_cast<size_t>(mesh.num_vertices())) {
  alive_faces_.resize(faces_.size());
  alive_index_.resize(faces_.size());
  for (int f = 0; f < static_cast<int>(faces_.size()); ++f) {
    alive_faces_[f] = f;
    alive_index_[f] = f;
    for (int v : faces_[f]) vertex_faces_[v].push_back(f);
  }
}

bool DecimationState::is_edge(int a, int b) const {
  if (a < 0 || b < 0 || a >= static_cast<int>(positions_.size()) ||
      b >= static_cast<int>(positions_.size()) || a == b) {
    return false;
  }
  for (int f : vertex_faces_[a]) {
    const Face& t = faces_[f];
    if (t[0] == b || t[1] == b || t[2] == b) return true;
  }
  return false;
}

std::vector<int> DecimationState::faces_around(int v) const {
  std::vector<int> out = vertex_faces_[v];
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<int> DecimationState::neighbors(int v) const {
  std::vector<int> out;
  for (int f : vertex_faces_[v]) {
    for (int u : faces_[f]) {
      if (u != v) out.push_back(u);
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

bool DecimationState::link_condition(int j, int k) const {
  std::vector<int> nj = neighbors(j), nk = neighbors(k), common;
  std::set_intersection(nj.begin(), nj.end(), nk.begin(), nk.end(), std::back_inserter(common));
  return common.size() == 2 && !is_edge(common[0], common[1]);
}

Placement DecimationState::placement(int j, int k) const {
  return optimal_placement(quadrics_[j] + quadrics_[k], positions_[j], positions_[k]);
}

CollapsePlan DecimationState::plan(int j, int k, const Vec3& new_position,
                                   const CollapseCriteria& criteria) const {
  if (!is_edge(j, k)) {
    throw TopologyError("not an edge (" + std::to_string(j) + ", " + std::to_string(k) + ")");
  }
  CollapsePlan plan;
  if (!link_condition(j, k)) {
    plan.check = CollapseCheck::LinkCondition;
    return plan;
  }

  const int survivor = static_cast<int>(positions_.size());
  std::vector<int> fan = faces_around(j);
  for (int f : vertex_faces_[k]) fan.push_back(f);
  std::sort(fan.begin(), fan.end());
  fan.erase(std::unique(fan.begin(), fan.end()), fan.end());

  int next_face = static_cast<int>(faces_.size());
  for (int f : fan) {
    const Face& t = faces_[f];
    plan.removed.push_back(FanFace{f, t});
    bool has_j = t[0] == j || t[1] == j || t[2] == j;
    bool has_k = t[0] == k || t[1] == k || t[2] == k;
    if (has_j && has_k) continue;
    Face moved = t;
    for (int& v : moved) {
      if (v == j || v == k) v = survivor;
    }
    plan.created.push_back(FanFace{next_face++, moved});
  }

  auto position_of = [&](int v) -> const Vec3& {
    return v == survivor ? new_position : positions_[v];
  };

  // Euclidean normal stability and 3D quality of every surviving face.
  for (size_t c = 0, r = 0; c < plan.created.size(); ++c) {
    while (true) {
      const Face& t = plan.removed[r].corners;
      bool has_j = t[0] == j || t[1] == j || t[2] == j;
      bool has_k = t[0] == k || t[1] == k || t[2] == k;
      if (!(has_j && has_k)) break;
      ++r;
    }
    const Face& before = plan.removed[r++].corners;
    const Face& after = plan.created[c].corners;
    Vec3 n0 = face_normal(positions_[before[0]], positions_[before[1]], positions_[before[2]]);
    Vec3 n1 = face_normal(position_of(after[0]), position_of(after[1]), position_of(after[2]));
    if (!(n0.dot(n1) > criteria.normal_threshold)) {
      plan.check = CollapseCheck::NormalFlip;
      return plan;
    }
  }
  for (const FanFace& f : plan.created) {
    const Face& t = f.corners;
    if (!(triangle_quality(position_of(t[0]), position_of(t[1]), position_of(t[2])) >
          criteria.min_quality)) {
      plan.check = CollapseCheck::Quality3D;
      return plan;
    }
  }

  CollapseRecord& rec = plan.record;
  rec.j = j;
  rec.k = k;
  rec.i = survivor;
  rec.position = new_position;
  try {
    rec.before = make_pre_chart(j, k, plan.removed);
    std::vector<Vec3> pre_pos;
    for (int v : rec.before.vertices) pre_pos.push_back(positions_[v]);
    conformal_flatten(rec.before, pre_pos);
  } catch (const TopologyError&) {
    plan.check = CollapseCheck::FlattenFailed;
    return plan;
  } catch (const NumericalError&) {
    plan.check = CollapseCheck::FlattenFailed;
    return plan;
  }
  if (!all_triangles_positive(rec.before)) {
    plan.check = CollapseCheck::UVFlip;
    return plan;
  }
  for (int v = 0; v < rec.before.num_interior; ++v) {
    if (std::abs(interior_angle_sum(rec.before, v) - 2.0 * std::numbers::pi) >
        criteria.angle_tolerance) {
      plan.check = CollapseCheck::UVOverlap;
      return plan;
    }
  }

  try {
    rec.after = make_post_chart(survivor, rec.before, plan.created);
    std::vector<Vec3> post_pos;
    for (int v : rec.after.vertices) post_pos.push_back(position_of(v));
    reflatten_interior(rec.after, post_pos);
  } catch (const TopologyError&) {
    plan.check = CollapseCheck::FlattenFailed;
    return plan;
  } catch (const NumericalError&) {
    plan.check = CollapseCheck::FlattenFailed;
    return plan;
  }
  if (!all_triangles_positive(rec.after)) {
    plan.check = CollapseCheck::UVFlip;
    return plan;
  }
  if (std::abs(interior_angle_sum(rec.after, 0) - 2.0 * std::numbers::pi) >
      criteria.angle_tolerance) {
    plan.check = CollapseCheck::UVOverlap;
    return plan;
  }
  for (const Face& t : rec.after.triangles) {
    if (!(triangle_quality(rec.after.uv[t[0]], rec.after.uv[t[1]], rec.after.uv[t[2]]) >
          criteria.min_quality)) {
      plan.check = CollapseCheck::QualityUV;
      return plan;
    }
  }
  plan.check = CollapseCheck::Valid;
  return plan;
}

CollapseRecord DecimationState::apply(CollapsePlan plan) {
  if (!plan.valid()) throw Error("cannot apply an invalid collapse");
  if (plan.record.i != static_cast<int>(positions_.size()) ||
      (!plan.created.empty() && plan.created.front().id != static_cast<int>(faces_.size()))) {
    throw Error("collapse plan is stale");
  }
  const int j = plan.record.j, k = plan.record.k;

  for (const FanFace& f : plan.removed) {
    int idx = alive_index_[f.id];
    if (idx < 0) throw Error("collapse plan is stale");
    int last = alive_faces_.back();
    alive_faces_[idx] = last;
    alive_index_[last] = idx;
    alive_faces_.pop_back();
    alive_index_[f.id] = -1;
    for (int v : f.corners) {
      auto& list = vertex_faces_[v];
      list.erase(std::remove(list.begin(), list.end(), f.id), list.end());
    }
  }
  vertex_faces_[j].clear();
  vertex_faces_[k].clear();

  positions_.push_back(plan.record.position);
  quadrics_.push_back(quadrics_[j] + quadrics_[k]);
  vertex_faces_.emplace_back();
  for (const FanFace& f : plan.created) {
    faces_.push_back(f.corners);
    alive_index_.push_back(static_cast<int>(alive_faces_.size()));
    alive_faces_.push_back(f.id);
    for (int v : f.corners) vertex_faces_[v].push_back(f.id);
  }
  --alive_vertices_;
  return std::move(plan.record);
}

Mesh DecimationState::extract(std::vector<int>* vertex_global, std::vector<int>* face_global) const {
  std::vector<int> local(positions_.size(), -1);
  std::vector<Vec3> verts;
  std::vector<int> vglobal;
  for (int v = 0; v < static_cast<int>(positions_.size()); ++v) {
    if (!vertex_alive(v)) continue;
    local[v] = static_cast<int>(verts.size());
    verts.push_back(positions_[v]);
    vglobal.push_back(v);
  }
  std::vector<Face> faces;
  std::vector<int> fglobal;
  for (int f = 0; f < static_cast<int>(faces_.size()); ++f) {
    if (!face_alive(f)) continue;
    const Face& t = faces_[f];
    faces.push_back({local[t[0]], local[t[1]], local[t[2]]});
    fglobal.push_back(f);
  }
  if (vertex_global) *vertex_global = std::move(vglobal);
  if (face_global) *face_global = std::move(fglobal);
  return Mesh(std::move(verts), std::move(faces));
}

CollapseValidity validate_collapse(const Mesh& mesh, int j, int k, const Vec3& new_position,
                                   const CollapseCriteria& criteria) {
  DecimationState state(mesh);
  return CollapseValidity{state.plan(j, k, new_position, criteria).check};
}

UVChart flatten_one_ring(const Mesh& mesh, int j, int k) {
  if (mesh.topology().find_halfedge(j, k) < 0) {
    throw TopologyError("not an edge (" + std::to_string(j) + ", " + std::to_string(k) + ")");
  }
  EdgeNeighborhood hood = edge_neighborhood(mesh, j, k);
  std::vector<FanFace> fan;
  for (int f : hood.faces) fan.push_back(FanFace{f, mesh.faces()[f]});
  UVChart chart = make_pre_chart(j, k, fan);
  std::vector<Vec3> pos;
  for (int v : chart.vertices) pos.push_back(mesh.vertex(v));
  conformal_flatten(chart, pos);
  return chart;
}

CollapseRecord collapse_edge_with_param(DecimationState& state, int j, int k,
                                        const CollapseCriteria& criteria) {
  Placement p = state.placement(j, k);
  CollapsePlan plan = state.plan(j, k, p.position, criteria);
  if (!plan.valid()) {
    throw Error(std::string("collapse rejected: ") + to_string(plan.check));
  }
  return state.apply(std::move(plan));
}

}  // namespace nsub
