#include "nsub/subdivide.hpp"

#include <algorithm>

#include "nsub/error.hpp"

namespace nsub {

std::shared_ptr<const Topology> midpoint_topology(const Topology& coarse) {
  const int nv = coarse.num_vertices();
  std::vector<Face> faces;
  faces.reserve(static_cast<size_t>(coarse.num_faces()) * 4);
  for (int f = 0; f < coarse.num_faces(); ++f) {
    const Face& t = coarse.face(f);
    // Odd vertex across from each corner's outgoing halfedge.
    int m01 = nv + coarse.edge_of(3 * f + 0);
    int m12 = nv + coarse.edge_of(3 * f + 1);
    int m20 = nv + coarse.edge_of(3 * f + 2);
    faces.push_back({t[0], m01, m20});
    faces.push_back({m01, t[1], m12});
    faces.push_back({m20, m12, t[2]});
    faces.push_back({m01, m12, m20});
  }
  return std::make_shared<const Topology>(nv + coarse.num_edges(), std::move(faces));
}

MidpointSubdivision midpoint_topology_subdivide(const Mesh& mesh) {
  const Topology& topo = mesh.topology();
  const int nv = mesh.num_vertices();
  const int ne = mesh.num_edges();

  std::vector<Vec3> positions(mesh.vertices());
  positions.reserve(static_cast<size_t>(nv + ne));
  for (const Edge& e : topo.edges()) {
    positions.push_back(0.5 * (mesh.vertex(e.a) + mesh.vertex(e.b)));
  }

  SubdivisionParents parents;
  parents.vertex_parent.resize(static_cast<size_t>(nv + ne));
  for (int v = 0; v < nv; ++v) {
    int best_face = -1, corner = 0;
    for (int h : topo.outgoing_sorted(v)) {
      int f = Topology::face_of(h);
      if (best_face < 0 || f < best_face) {
        best_face = f;
        corner = h % 3;
      }
    }
    std::array<double, 3> w{0.0, 0.0, 0.0};
    w[static_cast<size_t>(corner)] = 1.0;
    parents.vertex_parent[v] = BarycentricPoint{best_face, w};
  }
  for (int e = 0; e < ne; ++e) {
    int h = topo.edge_halfedge(e);
    int f0 = Topology::face_of(h), f1 = Topology::face_of(topo.twin(h));
    int hh = f0 < f1 ? h : topo.twin(h);
    std::array<double, 3> w{0.0, 0.0, 0.0};
    w[static_cast<size_t>(hh % 3)] = 0.5;
    w[static_cast<size_t>((hh % 3 + 1) % 3)] = 0.5;
    parents.vertex_parent[nv + e] = BarycentricPoint{Topology::face_of(hh), w};
  }
  parents.face_parent.resize(static_cast<size_t>(mesh.num_faces()) * 4);
  for (int f = 0; f < mesh.num_faces(); ++f) {
    for (int c = 0; c < 4; ++c) parents.face_parent[4 * f + c] = f;
  }

  return MidpointSubdivision{Mesh(std::move(positions), midpoint_topology(topo)),
                             std::move(parents)};
}

Mesh midpoint_subdivide(const Mesh& mesh, int levels) {
  if (levels < 0) throw DimensionError("levels must be nonnegative");
  Mesh current = mesh;
  for (int l = 0; l < levels; ++l) current = midpoint_topology_subdivide(current).mesh;
  return current;
}

}  // namespace nsub
