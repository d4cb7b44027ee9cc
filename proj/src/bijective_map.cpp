#include "nsub/bijective_map.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

#include "nsub/error.hpp"
#include "nsub/geometry.hpp"

namespace nsub {

BijectiveMap::BijectiveMap(Mesh fine, Mesh coarse, std::vector<CollapseRecord> records,
                           std::vector<int> coarse_vertex_global,
                           std::vector<int> coarse_face_global)
    : fine_(std::move(fine)),
      coarse_(std::move(coarse)),
      records_(std::move(records)),
      coarse_vertex_global_(std::move(coarse_vertex_global)),
      coarse_face_global_(std::move(coarse_face_global)) {
  if (static_cast<int>(coarse_vertex_global_.size()) != coarse_.num_vertices() ||
      static_cast<int>(coarse_face_global_.size()) != coarse_.num_faces()) {
    throw DimensionError("coarse index tables do not match the coarse mesh");
  }
  global_positions_ = fine_.vertices();
  global_faces_ = fine_.faces();
  face_creator_.assign(global_faces_.size(), -1);
  for (int r = 0; r < static_cast<int>(records_.size()); ++r) {
    const CollapseRecord& rec = records_[r];
    if (rec.i != static_cast<int>(global_positions_.size())) {
      throw ParseError("collapse record " + std::to_string(r) + " has a non-sequential vertex id");
    }
    const int faces_so_far = static_cast<int>(global_faces_.size());
    for (const UVChart* chart : {&rec.before, &rec.after}) {
      bool bad = chart->uv.size() != chart->vertices.size() ||
                 chart->faces.size() != chart->triangles.size();
      for (int v : chart->vertices) bad = bad || v < 0 || v > rec.i;
      for (int f : chart == &rec.before ? chart->faces : std::vector<int>{}) {
        bad = bad || f < 0 || f >= faces_so_far;
      }
      if (bad) throw ParseError("collapse record " + std::to_string(r) + " references unknown ids");
    }
    global_positions_.push_back(rec.position);
    first_created_.push_back(static_cast<int>(global_faces_.size()));
    for (int t = 0; t < rec.after.num_triangles(); ++t) {
      if (rec.after.faces[t] != static_cast<int>(global_faces_.size())) {
        throw ParseError("collapse record " + std::to_string(r) + " has non-sequential face ids");
      }
      const Face& local = rec.after.triangles[t];
      global_faces_.push_back({rec.after.vertices[local[0]], rec.after.vertices[local[1]],
                               rec.after.vertices[local[2]]});
      face_creator_.push_back(r);
    }
  }
}

BijectiveMap BijectiveMap::identity(const Mesh& mesh) {
  std::vector<int> v(static_cast<size_t>(mesh.num_vertices())), f(static_cast<size_t>(mesh.num_faces()));
  for (int i = 0; i < mesh.num_vertices(); ++i) v[i] = i;
  for (int i = 0; i < mesh.num_faces(); ++i) f[i] = i;
  return BijectiveMap(mesh, mesh, {}, std::move(v), std::move(f));
}

BarycentricPoint BijectiveMap::map_through_record(int r, const BarycentricPoint& p) const {
  const CollapseRecord& rec = records_[r];
  const int t = p.face - first_created_[r];
  if (t < 0 || t >= rec.after.num_triangles()) {
    throw DimensionError("face " + std::to_string(p.face) + " was not created by record " +
                         std::to_string(r));
  }
  Vec2 uv = chart_point(rec.after, t, p.weights);
  ChartLocation loc = locate(rec.before, uv);
  if (loc.triangle < 0 || loc.min_weight < -kChartLocateTolerance) {
    throw NumericalError("chart point location failed in collapse record " + std::to_string(r) +
                         " (min barycentric " + std::to_string(loc.min_weight) + ")");
  }
  return BarycentricPoint::make(rec.before.faces[loc.triangle], loc.weights, kChartLocateTolerance);
}

BijectiveMap::Image BijectiveMap::map_point(const BarycentricPoint& coarse_point) const {
  if (coarse_point.face < 0 || coarse_point.face >= coarse_.num_faces()) {
    throw DimensionError("coarse face index out of range");
  }
  BarycentricPoint p{coarse_face_global_[coarse_point.face], coarse_point.weights};
  Image out;
  for (int r = static_cast<int>(records_.size()) - 1; r >= 0; --r) {
    ++out.records_processed;
    if (face_creator_[p.face] == r) p = map_through_record(r, p);
  }
  if (out.records_processed != static_cast<int>(records_.size()) ||
      p.face >= fine_.num_faces()) {
    throw NumericalError("map composition did not reach the fine mesh");
  }
  out.fine_point = p;
  out.position = fine_.position(p);
  return out;
}

// ==========================================================
// ================      Verification      ==================
// ==========================================================

MapVerification verify_map(const BijectiveMap& map, const CollapseCriteria& criteria) {
  MapVerification out;
  auto fail = [&out](const std::string& what) {
    if (out.ok) {
      out.ok = false;
      out.failure = what;
    }
  };
  const int total_faces = map.num_global_faces();
  std::vector<char> alive(static_cast<size_t>(total_faces), 0);
  std::vector<std::set<int>> vertex_faces(static_cast<size_t>(map.num_global_vertices()));
  for (int f = 0; f < map.fine().num_faces(); ++f) {
    alive[f] = 1;
    for (int v : map.global_face(f)) vertex_faces[v].insert(f);
  }
  auto neighbors = [&](int v) {
    std::set<int> n;
    for (int f : vertex_faces[v]) {
      for (int u : map.global_face(f)) {
        if (u != v) n.insert(u);
      }
    }
    return n;
  };
  auto is_edge = [&](int a, int b) {
    for (int f : vertex_faces[a]) {
      const Face& t = map.global_face(f);
      if (t[0] == b || t[1] == b || t[2] == b) return true;
    }
    return false;
  };
  const double two_pi = 2.0 * std::numbers::pi;

  for (int r = 0; r < static_cast<int>(map.records().size()); ++r) {
    const CollapseRecord& rec = map.records()[r];
    const std::string tag = "record " + std::to_string(r) + ": ";
    // The pre-collapse chart must cover exactly the faces around j and k.
    std::set<int> fan(vertex_faces[rec.j].begin(), vertex_faces[rec.j].end());
    fan.insert(vertex_faces[rec.k].begin(), vertex_faces[rec.k].end());
    std::set<int> chart_faces(rec.before.faces.begin(), rec.before.faces.end());
    if (fan != chart_faces) fail(tag + "pre-collapse chart does not match the edge neighborhood");

    std::set<int> nj = neighbors(rec.j), nk = neighbors(rec.k);
    std::vector<int> common;
    std::set_intersection(nj.begin(), nj.end(), nk.begin(), nk.end(), std::back_inserter(common));
    if (common.size() != 2 || is_edge(common[0], common[1])) fail(tag + "link condition violated");

    // Normals and 3D quality of surviving faces: pair each created face
    // with the removed face it replaces (same corners up to j/k -> i).
    for (int t = 0; t < rec.after.num_triangles(); ++t) {
      const Face& after = map.global_face(rec.after.faces[t]);
      int match = -1;
      for (int s = 0; s < rec.before.num_triangles() && match < 0; ++s) {
        const Face& before = map.global_face(rec.before.faces[s]);
        bool same = true;
        for (int c = 0; c < 3; ++c) {
          int b = before[c] == rec.j || before[c] == rec.k ? rec.i : before[c];
          if (b != after[c]) same = false;
        }
        if (same) match = rec.before.faces[s];
      }
      if (match < 0) {
        fail(tag + "created face without a predecessor");
        continue;
      }
      const Face& before = map.global_face(match);
      Vec3 n0 = face_normal(map.global_position(before[0]), map.global_position(before[1]),
                            map.global_position(before[2]));
      Vec3 n1 = face_normal(map.global_position(after[0]), map.global_position(after[1]),
                            map.global_position(after[2]));
      double dot = n0.dot(n1);
      out.min_normal_dot = std::min(out.min_normal_dot, dot);
      if (!(dot > criteria.normal_threshold)) fail(tag + "normal test violated");
      double q3 = triangle_quality(map.global_position(after[0]), map.global_position(after[1]),
                                   map.global_position(after[2]));
      out.min_quality_3d = std::min(out.min_quality_3d, q3);
      if (!(q3 > criteria.min_quality)) fail(tag + "3D quality violated");
      const Face& lt = rec.after.triangles[t];
      double quv = triangle_quality(rec.after.uv[lt[0]], rec.after.uv[lt[1]], rec.after.uv[lt[2]]);
      out.min_quality_uv = std::min(out.min_quality_uv, quv);
      if (!(quv > criteria.min_quality)) fail(tag + "UV quality violated");
    }

    if (!all_triangles_positive(rec.before) || !all_triangles_positive(rec.after)) {
      fail(tag + "UV triangle with nonpositive area");
    }
    for (const UVChart* chart : {&rec.before, &rec.after}) {
      for (int v = 0; v < chart->num_interior; ++v) {
        double err = std::abs(interior_angle_sum(*chart, v) - two_pi);
        out.max_angle_error = std::max(out.max_angle_error, err);
        if (err > criteria.angle_tolerance) fail(tag + "interior angle sum differs from 2 pi");
      }
    }
    // Shared boundary, bit for bit.
    auto b0 = rec.before.boundary();
    auto b1 = rec.after.boundary();
    if (!std::equal(b0.begin(), b0.end(), b1.begin(), b1.end())) {
      fail(tag + "boundary vertices differ between charts");
    } else {
      for (size_t i = 0; i < b0.size(); ++i) {
        const Vec2& u0 = rec.before.uv[rec.before.num_interior + i];
        const Vec2& u1 = rec.after.uv[rec.after.num_interior + i];
        if (u0.x() != u1.x() || u0.y() != u1.y()) fail(tag + "boundary UVs differ between charts");
      }
    }
    double a0 = chart_total_area(rec.before), a1 = chart_total_area(rec.after);
    double mismatch = std::abs(a0 - a1) / std::max(std::abs(a0), 1e-300);
    out.max_area_mismatch = std::max(out.max_area_mismatch, mismatch);
    if (mismatch > 1e-8) fail(tag + "charts cover different areas");

    // Replay the collapse.
    for (int f : rec.before.faces) {
      alive[f] = 0;
      for (int v : map.global_face(f)) vertex_faces[v].erase(f);
    }
    for (int f : rec.after.faces) {
      alive[f] = 1;
      for (int v : map.global_face(f)) vertex_faces[v].insert(f);
    }
    ++out.records_checked;
  }

  // Replaying the face tables must reproduce the coarse connectivity.
  std::vector<int> alive_faces;
  for (int f = 0; f < total_faces; ++f) {
    if (alive[f]) alive_faces.push_back(f);
  }
  out.connectivity_matches = alive_faces == map.coarse_face_global();
  if (out.connectivity_matches) {
    for (int f = 0; f < map.coarse().num_faces() && out.connectivity_matches; ++f) {
      const Face& g = map.global_face(alive_faces[f]);
      const Face& c = map.coarse().faces()[f];
      for (int i = 0; i < 3; ++i) {
        if (map.coarse_vertex_global()[c[i]] != g[i]) out.connectivity_matches = false;
      }
    }
  }
  if (!out.connectivity_matches) fail("replayed connectivity differs from the coarse mesh");
  return out;
}

double record_round_trip_error(const CollapseRecord& record, int samples_per_triangle) {
  double worst = 0.0;
  const int n = std::max(1, samples_per_triangle);
  // Deterministic low-discrepancy points inside each triangle.
  for (int t = 0; t < record.after.num_triangles(); ++t) {
    for (int s = 0; s < n; ++s) {
      double a = std::fmod(0.5 + s * 0.6180339887498949, 1.0);
      double b = std::fmod(0.5 + s * 0.7548776662466927, 1.0);
      if (a + b > 1.0) {
        a = 1.0 - a;
        b = 1.0 - b;
      }
      std::array<double, 3> w{1.0 - a - b, a, b};
      Vec2 uv = chart_point(record.after, t, w);
      ChartLocation pre = locate(record.before, uv);
      Vec2 uv_pre = chart_point(record.before, pre.triangle, pre.weights);
      ChartLocation post = locate(record.after, uv_pre);
      Vec2 back = chart_point(record.after, post.triangle, post.weights);
      worst = std::max(worst, (back - uv).norm());
    }
  }
  return worst;
}

}  // namespace nsub
