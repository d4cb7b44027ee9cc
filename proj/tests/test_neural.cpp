#include <doctest.h>

#include <cmath>
#include <random>

#include "nsub/error.hpp"
#include "nsub/geometry.hpp"
#include "nsub/half_flap.hpp"
#include "nsub/mlp.hpp"
#include "nsub/network.hpp"
#include "nsub/pipeline.hpp"
#include "nsub/shapes.hpp"
#include "nsub/subdivide.hpp"
#include "support.hpp"

using namespace nsub;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

// Xavier weights plus small random biases so that no module is trivially centered.
NetworkBundle noisy_bundle(std::uint64_t seed) {
  NetworkBundle b = NetworkBundle::random(seed);
  std::mt19937_64 rng(seed + 1);
  std::uniform_real_distribution<double> u(-0.1, 0.1);
  for (MLPParams* p : {&b.init, &b.vertex, &b.edge}) {
    for (auto& bias : p->biases) {
      for (int i = 0; i < bias.size(); ++i) bias[i] = u(rng);
    }
  }
  return b;
}

double relative_error(double a, double b) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-6});
}

// Single-flap reference evaluation of one vertex's pooled state.
VectorXd pooled_vertex(const Mesh& mesh, const MatrixXd& feat, const std::vector<Vec3>& diff,
                       const MLPParams& params, int v, bool init) {
  const Topology& topo = mesh.topology();
  VectorXd sum = VectorXd::Zero(kFeatureDim);
  for (int h : topo.outgoing_sorted(v)) {
    HalfFlap f = half_flap(mesh, h);
    const int ids[4] = {f.source, f.dest, f.left, f.right};
    VectorXd x(init ? kInitInputDim : kStepInputDim);
    for (int k = 1; k < 4; ++k) x.segment<3>(3 * (k - 1)) = f.frame * (mesh.vertex(ids[k]) - mesh.vertex(ids[0]));
    for (int k = 0; k < 4; ++k) {
      if (init) {
        x.segment<3>(9 + 3 * k) = f.frame * diff[ids[k]];
      } else {
        x.segment<3>(9 + 32 * k) = f.frame * feat.col(ids[k]).head<3>();
        x.segment<29>(12 + 32 * k) = feat.col(ids[k]).tail<29>();
      }
    }
    VectorXd y = mlp_apply(params, x).output;
    sum.head<3>() += f.frame.transpose() * y.head<3>();
    sum.tail<29>() += y.tail<29>();
  }
  return sum / static_cast<double>(topo.valence(v));
}

}  // namespace

TEST_CASE("module dimensions") {
  CHECK(kInitInputDim == 21);
  CHECK(kStepInputDim == 137);
  NetworkBundle b = NetworkBundle::random(1);
  CHECK(b.init.input_dim() == 21);
  CHECK(b.vertex.input_dim() == 137);
  CHECK(b.edge.input_dim() == 137);
  for (const MLPParams* p : {&b.init, &b.vertex, &b.edge}) {
    CHECK(p->hidden_dim() == 32);
    CHECK(p->output_dim() == 32);
    CHECK(p->weights[1].rows() == 32);
    CHECK(p->weights[1].cols() == 32);
  }
  CHECK(b.num_parameters() == (21 * 32 + 32 + 32 * 32 + 32 + 32 * 32 + 32) +
                                  2 * (137 * 32 + 32 + 32 * 32 + 32 + 32 * 32 + 32));
  // Xavier bound for the first init layer.
  const double bound = std::sqrt(6.0 / (21 + 32));
  CHECK(b.init.weights[0].cwiseAbs().maxCoeff() <= bound);
  CHECK(b.init.biases[0].isZero());
  CHECK(format_checkpoint(NetworkBundle::random(1)) == format_checkpoint(b));
}

TEST_CASE("mlp: zero and pass-through networks") {
  MLPParams z = MLPParams::zeros(21, 32, 32);
  CHECK(mlp_apply(z, VectorXd::Random(21)).output.isZero());

  MLPParams id = MLPParams::zeros(4, 4, 4);
  for (auto& w : id.weights) w.setIdentity();
  VectorXd x(4);
  x << 0.5, 0.0, 2.0, 1e-3;
  CHECK(mlp_apply(id, x).output == x);
  CHECK_THROWS_AS(mlp_apply(id, VectorXd::Zero(5)), DimensionError);
}

TEST_CASE("mlp: gradient against central differences") {
  std::mt19937_64 rng(3);
  MLPParams p = MLPParams::zeros(21, 32, 32);
  xavier_init(p, rng);
  std::normal_distribution<double> g(0.0, 0.1);
  for (auto& b : p.biases) {
    for (int i = 0; i < b.size(); ++i) b[i] = g(rng);
  }
  VectorXd x(21), w(32);
  for (int i = 0; i < 21; ++i) x[i] = 4 * g(rng);
  for (int i = 0; i < 32; ++i) w[i] = g(rng);
  MLPEvaluation e = mlp_apply(p, x, w);
  auto f = [&](const MLPParams& q, const VectorXd& in) { return w.dot(mlp_apply(q, in).output); };
  const double h = 1e-5;
  double worst = 0.0;
  auto blocks = p.blocks();
  auto grads = e.grad.blocks();
  for (int b = 0; b < 6; ++b) {
    for (size_t i = 0; i < blocks[b].size(); ++i) {
      const double keep = blocks[b][i];
      blocks[b][i] = keep + h;
      double up = f(p, x);
      blocks[b][i] = keep - h;
      double down = f(p, x);
      blocks[b][i] = keep;
      worst = std::max(worst, relative_error(grads[b][i], (up - down) / (2 * h)));
    }
  }
  for (int i = 0; i < 21; ++i) {
    VectorXd a = x, c = x;
    a[i] += h;
    c[i] -= h;
    worst = std::max(worst, relative_error(e.d_input[i], (f(p, a) - f(p, c)) / (2 * h)));
  }
  CHECK(worst < 1e-5);
}

TEST_CASE("mlp: batched pass equals per-column pass") {
  std::mt19937_64 rng(4);
  MLPParams p = MLPParams::zeros(7, 32, 5);
  xavier_init(p, rng);
  MatrixXd X = MatrixXd::Random(7, 9);
  MatrixXd dY = MatrixXd::Random(5, 9);
  MLPCache cache;
  MatrixXd Y = mlp_forward(p, X, &cache);
  MLPParams grad = p.zeros_like();
  MatrixXd dX;
  mlp_backward(p, cache, dY, grad, &dX);
  MLPParams sum = p.zeros_like();
  for (int c = 0; c < 9; ++c) {
    MLPEvaluation e = mlp_apply(p, X.col(c), dY.col(c));
    CHECK((Y.col(c) - e.output).norm() < 1e-14);
    CHECK((dX.col(c) - e.d_input).norm() < 1e-14);
    for (int l = 0; l < 3; ++l) {
      sum.weights[l] += e.grad.weights[l];
      sum.biases[l] += e.grad.biases[l];
    }
  }
  for (int l = 0; l < 3; ++l) {
    CHECK((sum.weights[l] - grad.weights[l]).norm() < 1e-12);
    CHECK((sum.biases[l] - grad.biases[l]).norm() < 1e-12);
  }
}

TEST_CASE("half-flap frames") {
  Frame f = half_flap_frame(Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0.5, 1, 0), Vec3(0.5, -1, 0));
  CHECK((f - Frame::Identity()).norm() < 1e-15);

  // Folded flap: the two face normals cancel, the left normal takes over.
  Frame fold = half_flap_frame(Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0.5, 1, 0), Vec3(0.5, 1, 0));
  CHECK(fold.determinant() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK((fold * fold.transpose() - Frame::Identity()).norm() < 1e-12);
  CHECK((fold.row(0).transpose() - Vec3(1, 0, 0)).norm() < 1e-15);
  // Degenerate wings: any perpendicular.
  Frame flat = half_flap_frame(Vec3(0, 0, 0), Vec3(0, 0, 2), Vec3(0, 0, 1), Vec3(0, 0, 3));
  CHECK(flat.determinant() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK_THROWS_AS(half_flap_frame(Vec3(1, 1, 1), Vec3(1, 1, 1), Vec3(0, 1, 0), Vec3(0, 0, 1)),
                  NumericalError);

  Mesh m = shapes::jitter(shapes::icosphere(1), 0.05, 2);
  std::mt19937_64 rng(8);
  test::Rigid r = test::random_rigid(rng);
  Mesh moved = test::apply(m, r);
  auto a = half_flap_frames(m.topology(), m.vertices());
  auto b = half_flap_frames(moved.topology(), moved.vertices());
  for (size_t h = 0; h < a.size(); ++h) {
    CHECK(a[h].determinant() == doctest::Approx(1.0).epsilon(1e-9));
    CHECK((a[h] * a[h].transpose() - Frame::Identity()).norm() < 1e-9);
    Vec3 x = (m.vertex(m.topology().dest(h)) - m.vertex(m.topology().source(h))).normalized();
    CHECK((a[h].row(0).transpose() - x).norm() < 1e-12);
    CHECK((b[h] - a[h] * r.rotation.transpose()).norm() < 1e-12);
  }
}

TEST_CASE("init features match a per-flap reference") {
  Mesh m = shapes::jitter(shapes::icosphere(1), 0.05, 6);
  NetworkBundle b = noisy_bundle(6);
  VertexStates s = init_features(m, b);
  REQUIRE(s.features.rows() == kFeatureDim);
  REQUIRE(s.features.cols() == m.num_vertices());
  CHECK(s.positions == m.vertices());
  auto diff = differential_coordinates(m);
  for (int v = 0; v < m.num_vertices(); ++v) {
    VectorXd ref = pooled_vertex(m, MatrixXd(), diff, b.init, v, true);
    CHECK((ref - s.features.col(v)).norm() < 1e-12);
  }
}

TEST_CASE("vertex and edge steps match a per-flap reference") {
  Mesh m = shapes::jitter(shapes::icosphere(1), 0.05, 7);
  NetworkBundle b = noisy_bundle(7);
  VertexStates s0 = init_features(m, b);
  VertexStates s1 = step_vertex(m.topology(), s0, b);
  for (int v = 0; v < m.num_vertices(); ++v) {
    VectorXd ref = pooled_vertex(m, s0.features, {}, b.vertex, v, false);
    CHECK((ref - s1.features.col(v)).norm() < 1e-12);
    CHECK((s1.positions[v] - (m.vertex(v) + ref.head<3>())).norm() < 1e-12);
  }

  VertexStates odd = step_edge(m.topology(), s1, b);
  REQUIRE(odd.size() == m.num_edges());
  Mesh moved = m.with_positions(s1.positions);
  for (int e = 0; e < m.num_edges(); ++e) {
    const Topology& topo = m.topology();
    VectorXd sum = VectorXd::Zero(kFeatureDim);
    const int h = topo.edge_halfedge(e);
    for (int g : {h, topo.twin(h)}) {
      HalfFlap f = half_flap(moved, g);
      const int ids[4] = {f.source, f.dest, f.left, f.right};
      VectorXd x(kStepInputDim);
      for (int k = 1; k < 4; ++k) x.segment<3>(3 * (k - 1)) = f.frame * (moved.vertex(ids[k]) - moved.vertex(ids[0]));
      for (int k = 0; k < 4; ++k) {
        x.segment<3>(9 + 32 * k) = f.frame * s1.features.col(ids[k]).head<3>();
        x.segment<29>(12 + 32 * k) = s1.features.col(ids[k]).tail<29>();
      }
      VectorXd y = mlp_apply(b.edge, x).output;
      sum.head<3>() += f.frame.transpose() * y.head<3>();
      sum.tail<29>() += y.tail<29>();
    }
    sum /= 2.0;
    const Edge ed = topo.edges()[e];
    Vec3 mid = 0.5 * (s1.positions[ed.a] + s1.positions[ed.b]);
    CHECK((odd.features.col(e) - sum).norm() < 1e-12);
    CHECK((odd.positions[e] - (mid + sum.head<3>())).norm() < 1e-12);
  }
}

TEST_CASE("steps are rigid-equivariant") {
  Mesh m = shapes::jitter(shapes::icosphere(1), 0.05, 9);
  NetworkBundle b = noisy_bundle(9);
  std::mt19937_64 rng(10);
  for (int trial = 0; trial < 3; ++trial) {
    test::Rigid r = test::random_rigid(rng);
    Mesh mm = test::apply(m, r);
    VertexStates a0 = init_features(m, b), b0 = init_features(mm, b);
    for (int v = 0; v < m.num_vertices(); ++v) {
      CHECK((b0.features.col(v).tail<kLatentDim>() - a0.features.col(v).tail<kLatentDim>()).norm() < 1e-9);
      CHECK((b0.features.col(v).head<3>() - r.rotation * a0.features.col(v).head<3>()).norm() < 1e-9);
    }
    VertexStates a1 = step_vertex(m.topology(), a0, b), b1 = step_vertex(m.topology(), b0, b);
    for (int v = 0; v < m.num_vertices(); ++v) CHECK((b1.positions[v] - r.apply(a1.positions[v])).norm() < 1e-9);
    VertexStates a2 = step_edge(m.topology(), a1, b), b2 = step_edge(m.topology(), b1, b);
    for (int e = 0; e < m.num_edges(); ++e) CHECK((b2.positions[e] - r.apply(a2.positions[e])).norm() < 1e-9);
  }
}

TEST_CASE("edge step does not depend on vertex numbering") {
  Mesh m = shapes::jitter(shapes::icosphere(1), 0.05, 12);
  const int V = m.num_vertices();
  // Reverse the vertex order: every edge's a -> b half-flap becomes the b -> a one.
  std::vector<Vec3> pos(V);
  std::vector<Face> faces;
  for (int v = 0; v < V; ++v) pos[V - 1 - v] = m.vertex(v);
  for (const Face& f : m.faces()) faces.push_back({V - 1 - f[0], V - 1 - f[1], V - 1 - f[2]});
  Mesh r(pos, faces);
  NetworkBundle b = noisy_bundle(12);
  VertexStates sm = step_vertex(m.topology(), init_features(m, b), b);
  VertexStates sr = step_vertex(r.topology(), init_features(r, b), b);
  VertexStates om = step_edge(m.topology(), sm, b), orr = step_edge(r.topology(), sr, b);
  for (int e = 0; e < m.num_edges(); ++e) {
    const Edge ed = m.topology().edges()[e];
    int h = r.topology().find_halfedge(V - 1 - ed.b, V - 1 - ed.a);
    int er = r.topology().edge_of(h);
    CHECK((om.positions[e] - orr.positions[er]).norm() < 1e-12);
    CHECK((om.features.col(e) - orr.features.col(er)).norm() < 1e-12);
  }
}

TEST_CASE("zero network reduces to midpoint subdivision") {
  Mesh m = shapes::jitter(shapes::icosphere(1), 0.05, 13);
  NetworkBundle z = NetworkBundle::zeros();
  VertexStates s = init_features(m, z);
  CHECK(s.features.isZero());
  VertexStates s1 = step_vertex(m.topology(), s, z);
  CHECK(s1.positions == m.vertices());
  auto levels = neural_subdivide(m, z, 3);
  REQUIRE(levels.size() == 3);
  for (int l = 0; l < 3; ++l) {
    Mesh mid = midpoint_subdivide(m, l + 1);
    CHECK(levels[l].vertices() == mid.vertices());
    CHECK(levels[l].faces() == mid.faces());
  }
  auto norm = neural_subdivide_normalized(m, z, 2);
  CHECK(norm.back().faces() == midpoint_subdivide(m, 2).faces());
}

TEST_CASE("neural subdivision: connectivity, feature size and rigid invariance") {
  Mesh m = shapes::jitter(shapes::icosphere(1), 0.05, 14);
  NetworkBundle b = noisy_bundle(14);
  auto levels = neural_subdivide(m, b, 2);
  for (int l = 0; l < 2; ++l) CHECK(levels[l].faces() == midpoint_subdivide(m, l + 1).faces());

  SubdivisionHierarchy hier(m.shared_topology(), 2);
  ForwardOutput out = forward_pipeline(hier, m.vertices(), b);
  CHECK(out.final_states.features.rows() == kFeatureDim);
  CHECK(out.final_states.size() == levels[1].num_vertices());
  CHECK(out.positions[2] == levels[1].vertices());

  std::mt19937_64 rng(15);
  const double diag = bounding_box(m).diagonal();
  for (int trial = 0; trial < 3; ++trial) {
    test::Rigid r = test::random_rigid(rng);
    auto moved = neural_subdivide(test::apply(m, r), b, 2);
    Mesh expected = test::apply(levels[1], r);
    CHECK(test::max_distance(moved[1].vertices(), expected.vertices()) < 1e-6 * diag);
  }
}

TEST_CASE("checkpoint round trip") {
  NetworkBundle b = noisy_bundle(16);
  b.trained_levels = 3;
  b.normalization = Similarity{0.37, Vec3(0.1, -0.2, 1.0 / 3.0)};
  std::string text = format_checkpoint(b);
  NetworkBundle r = parse_checkpoint(text);
  CHECK(format_checkpoint(r) == text);
  CHECK(r.trained_levels == 3);
  CHECK(r.normalization.translation == b.normalization.translation);
  for (int l = 0; l < 3; ++l) CHECK(r.edge.weights[l] == b.edge.weights[l]);

  CHECK_THROWS_AS(parse_checkpoint("NSD 2\n"), ParseError);
  CHECK_THROWS_AS(parse_checkpoint(text.substr(0, text.size() / 3)), ParseError);
  std::string bad_dim = text;
  bad_dim.replace(bad_dim.find("module V 137"), 12, "module V 136");
  CHECK_THROWS_AS(parse_checkpoint(bad_dim), Error);
}
