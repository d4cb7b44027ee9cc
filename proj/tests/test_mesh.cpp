#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <random>
#include <set>
#include <string>

#include "nsub/error.hpp"
#include "nsub/geometry.hpp"
#include "nsub/mesh.hpp"
#include "nsub/obj_io.hpp"
#include "nsub/shapes.hpp"
#include "nsub/subdivide.hpp"
#include "support.hpp"

using namespace nsub;
using nsub::test::find_vertex;

namespace {

const char* kTetraObj =
    "# tetrahedron\n"
    "v 1 1 1\nv 1 -1 -1\nv -1 1 -1\nv -1 -1 1\n"
    "f 1 2 3\nf 1 3 4\nf 1 4 2\nf 2 4 3\n";

}  // namespace

TEST_CASE("obj: tetrahedron counts") {
  Mesh m = parse_obj(kTetraObj);
  CHECK(m.num_vertices() == 4);
  CHECK(m.num_faces() == 4);
  CHECK(m.num_edges() == 6);
  CHECK(m.euler_characteristic() == 2);
}

TEST_CASE("obj: quad face is rejected with its line") {
  std::string text = "v 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\nf 1 2 3 4\n";
  try {
    parse_obj(text);
    FAIL("quad accepted");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("line 5") != std::string::npos);
  }
}

TEST_CASE("obj: open surface is rejected") {
  std::string text = "v 0 0 0\nv 1 0 0\nv 0 1 0\nv 1 1 0\nf 1 2 3\nf 2 4 3\n";
  CHECK_THROWS_AS(parse_obj(text), TopologyError);
}

TEST_CASE("obj: slash indices and relative indices") {
  std::string text =
      "v 1 1 1\nv 1 -1 -1\nv -1 1 -1\nv -1 -1 1\nvt 0 0\nvn 0 0 1\n"
      "f 1/1/1 2/1/1 3/1/1\nf -4 -2 -1\nf 1//1 4//1 2//1\nf 2 4 3\n";
  Mesh m = parse_obj(text);
  CHECK(m.faces()[1] == Face{0, 2, 3});
}

TEST_CASE("obj: save then load round-trips bit for bit") {
  Mesh m = shapes::jitter(shapes::icosahedron(), 0.1, 3);
  auto path = std::filesystem::temp_directory_path() / "nsub_roundtrip.obj";
  save_obj(m, path);
  Mesh r = load_obj(path);
  std::filesystem::remove(path);
  REQUIRE(r.num_vertices() == m.num_vertices());
  CHECK(r.vertices() == m.vertices());
  CHECK(r.faces() == m.faces());

  std::string text = format_obj(shapes::tetrahedron());
  CHECK(std::count(text.begin(), text.end(), 'v') == 4);
  CHECK(std::count(text.begin(), text.end(), 'f') == 4);
}

TEST_CASE("obj: empty path is an I/O error") {
  CHECK_THROWS_AS(save_obj(shapes::tetrahedron(), ""), IoError);
  CHECK_THROWS_AS(load_obj(""), IoError);
}

TEST_CASE("one_ring: valences and orientation") {
  for (const Mesh& m : {shapes::tetrahedron(), shapes::octahedron(), shapes::icosahedron()}) {
    const int expected = m.num_vertices() == 4 ? 3 : m.num_vertices() == 6 ? 4 : 5;
    for (int v = 0; v < m.num_vertices(); ++v) {
      auto ring = one_ring(m, v);
      REQUIRE(static_cast<int>(ring.size()) == expected);
      CHECK(ring.front() == *std::min_element(ring.begin(), ring.end()));
      // Consecutive neighbors close a face with v, in face orientation.
      for (size_t i = 0; i < ring.size(); ++i) {
        int a = ring[i], b = ring[(i + 1) % ring.size()];
        int h = m.topology().find_halfedge(v, a);
        REQUIRE(h >= 0);
        bool shares = false;
        for (const Face& f : m.faces()) {
          for (int c = 0; c < 3; ++c) {
            if (f[c] == v && ((f[(c + 1) % 3] == a && f[(c + 2) % 3] == b) ||
                              (f[(c + 1) % 3] == b && f[(c + 2) % 3] == a))) {
              shares = true;
            }
          }
        }
        CHECK(shares);
      }
    }
  }
}

TEST_CASE("edge_neighborhood") {
  Mesh oct = shapes::octahedron();
  int px = find_vertex(oct, Vec3(1, 0, 0)), py = find_vertex(oct, Vec3(0, 1, 0));
  auto n = edge_neighborhood(oct, px, py).vertices;
  std::set<int> expected;
  for (const Vec3& p : {Vec3(-1, 0, 0), Vec3(0, -1, 0), Vec3(0, 0, 1), Vec3(0, 0, -1)}) {
    expected.insert(find_vertex(oct, p));
  }
  CHECK(std::set<int>(n.begin(), n.end()) == expected);
  CHECK(edge_neighborhood(oct, px, py).faces.size() == 6);

  Mesh tet = shapes::tetrahedron();
  CHECK(edge_neighborhood(tet, 0, 1).vertices == std::vector<int>{2, 3});

  Mesh ico = shapes::icosahedron();
  const Edge e = ico.topology().edges()[0];
  // Two 1-rings of five share two vertices: eight including j and k.
  CHECK(edge_neighborhood(ico, e.a, e.b).vertices.size() + 2 == 8);
  CHECK_THROWS_AS(edge_neighborhood(oct, px, find_vertex(oct, Vec3(-1, 0, 0))), TopologyError);
}

TEST_CASE("differential coordinates") {
  Mesh oct = shapes::octahedron();
  auto d = differential_coordinates(oct);
  int top = find_vertex(oct, Vec3(0, 0, 1));
  CHECK((d[top] - Vec3(0, 0, 1)).norm() < 1e-15);

  Mesh disk = test::flat_disk();
  Vec3 avg = Vec3::Zero();
  for (int i = 2; i < 8; ++i) avg += disk.vertex(i);
  avg /= 6.0;
  CHECK((differential_coordinates(disk)[0] - (disk.vertex(0) - avg)).norm() < 1e-15);

  // Translation invariance and rotation equivariance.
  std::mt19937_64 rng(5);
  Mesh m = shapes::jitter(shapes::icosphere(2), 0.05, 1);
  auto base = differential_coordinates(m);
  for (int trial = 0; trial < 5; ++trial) {
    test::Rigid r = test::random_rigid(rng);
    auto moved = differential_coordinates(test::apply(m, r));
    for (size_t v = 0; v < base.size(); ++v) CHECK((moved[v] - r.rotation * base[v]).norm() < 1e-12);
  }
}

TEST_CASE("triangle quality") {
  Vec3 a(0, 0, 0), b(1, 0, 0), c(0.5, std::sqrt(3.0) / 2.0, 0);
  CHECK(triangle_quality(a, b, c) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(triangle_quality(a, b, Vec3(2, 0, 0)) == 0.0);
  // Right isosceles, legs 1: area 1/2, squared edges 1 + 1 + 2.
  CHECK(triangle_quality(a, b, Vec3(0, 1, 0)) ==
        doctest::Approx(4.0 * std::sqrt(3.0) * 0.5 / 4.0).epsilon(1e-15));
  CHECK(triangle_quality(Vec2(0, 0), Vec2(1, 0), Vec2(0, 1)) ==
        doctest::Approx(std::sqrt(3.0) / 2.0).epsilon(1e-15));

  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1, 1), s(0.1, 10);
  for (int trial = 0; trial < 50; ++trial) {
    Vec3 p(u(rng), u(rng), u(rng)), q(u(rng), u(rng), u(rng)), r(u(rng), u(rng), u(rng));
    test::Rigid m = test::random_rigid(rng);
    double k = s(rng);
    double moved = triangle_quality(Vec3(k * m.apply(p)), Vec3(k * m.apply(q)), Vec3(k * m.apply(r)));
    CHECK(std::abs(moved - triangle_quality(p, q, r)) < 1e-12);
  }
}

TEST_CASE("link condition") {
  Mesh tet = shapes::tetrahedron();
  Mesh oct = shapes::octahedron();
  Mesh ico = shapes::icosahedron();
  for (const Edge& e : tet.topology().edges()) CHECK_FALSE(check_link_condition(tet, e.a, e.b));
  for (const Edge& e : oct.topology().edges()) CHECK(check_link_condition(oct, e.a, e.b));
  for (const Edge& e : ico.topology().edges()) CHECK(check_link_condition(ico, e.a, e.b));
}

TEST_CASE("midpoint subdivision counts") {
  auto ico = midpoint_topology_subdivide(shapes::icosahedron());
  CHECK(ico.mesh.num_vertices() == 42);
  CHECK(ico.mesh.num_faces() == 80);
  Mesh tet1 = midpoint_subdivide(shapes::tetrahedron(), 1);
  CHECK(tet1.num_vertices() == 10);
  CHECK(tet1.num_faces() == 16);
  Mesh tet2 = midpoint_subdivide(shapes::tetrahedron(), 2);
  CHECK(tet2.num_vertices() == 34);
  CHECK(tet2.num_faces() == 64);
  CHECK(tet2.euler_characteristic() == 2);

  Mesh torus = shapes::torus(1.0, 0.4, 12, 8);
  CHECK(midpoint_subdivide(torus, 2).euler_characteristic() == torus.euler_characteristic());
}

TEST_CASE("midpoint subdivision parents") {
  Mesh m = shapes::jitter(shapes::octahedron(), 0.1, 2);
  auto sub = midpoint_topology_subdivide(m);
  const int V = m.num_vertices();
  for (int e = 0; e < m.num_edges(); ++e) {
    const Edge ed = m.topology().edges()[e];
    CHECK(sub.mesh.vertex(V + e) == 0.5 * (m.vertex(ed.a) + m.vertex(ed.b)));
    const BarycentricPoint& p = sub.parents.vertex_parent[V + e];
    CHECK((m.position(p) - sub.mesh.vertex(V + e)).norm() < 1e-15);
  }
  for (int f = 0; f < sub.mesh.num_faces(); ++f) CHECK(sub.parents.face_parent[f] == f / 4);
  for (int v = 0; v < V; ++v) CHECK(sub.mesh.vertex(v) == m.vertex(v));
}

TEST_CASE("normalize_unit_box") {
  Mesh cube = test::unit_cube();
  auto n = normalize_unit_box(cube);
  CHECK(bounding_box(n.mesh).diagonal() == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(n.transform.scale == doctest::Approx(1.0 / std::sqrt(3.0)).epsilon(1e-15));
  CHECK(bounding_box(n.mesh).center().norm() < 1e-15);

  auto again = normalize_unit_box(n.mesh);
  CHECK(again.transform.scale == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(again.transform.translation.norm() < 1e-15);

  Mesh big = transform(cube, Similarity{10.0, Vec3(3, -2, 1)});
  auto nb = normalize_unit_box(big);
  CHECK(test::max_distance(nb.mesh.vertices(), n.mesh.vertices()) < 1e-12);
}

TEST_CASE("topology rejects bad input") {
  std::vector<Vec3> v(4, Vec3::Zero());
  CHECK_THROWS_AS(Mesh(v, {{0, 1, 1}}), TopologyError);
  CHECK_THROWS_AS(Mesh(v, {{0, 1, 7}}), TopologyError);
  // Both faces of an edge with the same orientation.
  CHECK_THROWS_AS(Mesh(v, {{0, 1, 2}, {0, 1, 3}, {0, 2, 3}, {1, 2, 3}}), TopologyError);
}

TEST_CASE("barycentric clamping") {
  auto p = BarycentricPoint::make(0, {1.0 + 5e-11, -5e-11, 0.0});
  CHECK(p.weights[1] == 0.0);
  CHECK(p.weights[0] + p.weights[1] + p.weights[2] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK_THROWS_AS(BarycentricPoint::make(0, {1.1, -0.1, 0.0}), NumericalError);
}
