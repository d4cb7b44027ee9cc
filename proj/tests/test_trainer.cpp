#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <random>

#include "nsub/adam.hpp"
#include "nsub/classic.hpp"
#include "nsub/dataset.hpp"
#include "nsub/error.hpp"
#include "nsub/geometry.hpp"
#include "nsub/gradcheck.hpp"
#include "nsub/loss.hpp"
#include "nsub/shapes.hpp"
#include "nsub/subdivide.hpp"
#include "nsub/text_io.hpp"
#include "nsub/trainer.hpp"
#include "support.hpp"

using namespace nsub;
namespace fs = std::filesystem;

namespace {

std::vector<std::vector<Vec3>> random_levels(std::mt19937_64& rng, std::vector<int> sizes) {
  std::normal_distribution<double> g;
  std::vector<std::vector<Vec3>> out;
  for (int n : sizes) {
    std::vector<Vec3> l;
    for (int i = 0; i < n; ++i) l.emplace_back(g(rng), g(rng), g(rng));
    out.push_back(l);
  }
  return out;
}

DatasetOptions small_options(TargetKind kind, int levels) {
  DatasetOptions o;
  o.count = 3;
  o.min_vertices = 40;
  o.max_vertices = 60;
  o.levels = levels;
  o.seed = 21;
  o.targets = kind;
  return o;
}

bool same_params(const NetworkBundle& a, const NetworkBundle& b) {
  for (auto [p, q] : {std::pair{&a.init, &b.init}, {&a.vertex, &b.vertex}, {&a.edge, &b.edge}}) {
    for (int l = 0; l < 3; ++l) {
      if (p->weights[l] != q->weights[l] || p->biases[l] != q->biases[l]) return false;
    }
  }
  return true;
}

fs::path scratch(const std::string& name) {
  fs::path p = fs::temp_directory_path() / ("nsub_test_" + name);
  fs::remove_all(p);
  return p;
}

}  // namespace

TEST_CASE("loss: exact targets, single offset and gradient") {
  std::mt19937_64 rng(1);
  auto t = random_levels(rng, {10, 40});
  CHECK(loss_l2_levels(t, t).value == 0.0);

  std::vector<std::vector<Vec3>> one = {std::vector<Vec3>(25, Vec3(1, 2, 3))};
  auto moved = one;
  moved[0][7].x() += 0.3;
  CHECK(loss_l2_levels(moved, one).value == doctest::Approx(0.09 / 25).epsilon(1e-12));

  auto p = random_levels(rng, {10, 40});
  LevelLoss l = loss_l2_levels(p, t);
  CHECK(l.per_level.size() == 2);
  CHECK(l.value == doctest::Approx(0.5 * (l.per_level[0] + l.per_level[1])).epsilon(1e-15));
  const double h = 1e-6;
  double worst = 0.0;
  for (size_t lv = 0; lv < p.size(); ++lv) {
    for (size_t i = 0; i < p[lv].size(); ++i) {
      for (int c = 0; c < 3; ++c) {
        auto a = p, b = p;
        a[lv][i][c] += h;
        b[lv][i][c] -= h;
        double fd = (loss_l2_levels(a, t).value - loss_l2_levels(b, t).value) / (2 * h);
        double an = l.gradient[lv][i][c];
        worst = std::max(worst, std::abs(fd - an) / std::max(std::abs(an), 1e-3));
      }
    }
  }
  CHECK(worst < 1e-6);
  CHECK_THROWS_AS(loss_l2_levels(p, {t[0]}), DimensionError);

  // Joint rigid motion of predictions and targets leaves the loss alone.
  test::Rigid r = test::random_rigid(rng);
  auto pr = p, tr = t;
  for (auto* set : {&pr, &tr}) {
    for (auto& lvl : *set) {
      for (Vec3& x : lvl) x = r.apply(x);
    }
  }
  CHECK(loss_l2_levels(pr, tr).value == doctest::Approx(l.value).epsilon(1e-12));
}

TEST_CASE("adam: first step by hand") {
  NetworkBundle params = NetworkBundle::zeros();
  NetworkBundle grad = NetworkBundle::zeros();
  for (MLPParams* m : {&grad.init, &grad.vertex, &grad.edge}) {
    for (auto block : m->blocks()) std::fill(block.begin(), block.end(), 1.0);
  }
  AdamState s = AdamState::for_bundle(params);
  REQUIRE(adam_step(s, params, grad));
  CHECK(s.step == 1);
  // m = 0.1, v = 0.001, both bias corrections give 1, step = -lr / (1 + eps).
  CHECK(s.first_moment.vertex.weights[1](3, 4) == doctest::Approx(0.1).epsilon(1e-15));
  CHECK(s.second_moment.edge.biases[2][5] == doctest::Approx(0.001).epsilon(1e-15));
  CHECK(params.init.weights[0](0, 0) == doctest::Approx(-0.002 / (1.0 + 1e-8)).epsilon(1e-14));

  NetworkBundle frozen = NetworkBundle::random(3);
  NetworkBundle zero = NetworkBundle::zeros();
  AdamState z = AdamState::for_bundle(frozen);
  NetworkBundle before = frozen;
  for (int i = 0; i < 20; ++i) adam_step(z, frozen, zero);
  CHECK(same_params(before, frozen));

  NetworkBundle bad = grad;
  bad.edge.weights[0](0, 0) = NAN;
  AdamState keep = s;
  NetworkBundle p2 = params;
  CHECK_FALSE(adam_step(s, p2, bad));
  CHECK(s.step == keep.step);
  CHECK(same_params(p2, params));

  // Two identical runs give identical trajectories.
  std::mt19937_64 rng(4);
  std::normal_distribution<double> g;
  NetworkBundle ga = NetworkBundle::zeros();
  for (auto block : ga.vertex.blocks()) {
    for (double& x : block) x = g(rng);
  }
  NetworkBundle a = NetworkBundle::random(5), b = NetworkBundle::random(5);
  AdamState sa = AdamState::for_bundle(a), sb = AdamState::for_bundle(b);
  for (int i = 0; i < 5; ++i) {
    adam_step(sa, a, ga);
    adam_step(sb, b, ga);
  }
  CHECK(format_checkpoint(a) == format_checkpoint(b));
}

TEST_CASE("dataset: surface-map targets") {
  Mesh source = shapes::bumpy_sphere(3, 0.1, 3);
  Dataset d = generate_dataset(source, small_options(TargetKind::SurfaceMap, 2));
  REQUIRE(d.pairs.size() == 3);
  Mesh fine = normalize_unit_box(source).mesh;
  CHECK(d.normalization.scale == normalize_unit_box(source).transform.scale);
  for (const TrainingPair& p : d.pairs) {
    CHECK(p.coarse.num_vertices() >= 40);
    CHECK(p.coarse.num_vertices() <= 60);
    REQUIRE(p.levels() == 2);
    Mesh l1 = midpoint_subdivide(p.coarse, 1), l2 = midpoint_subdivide(p.coarse, 2);
    CHECK(static_cast<int>(p.targets[0].size()) == p.coarse.num_vertices() + p.coarse.num_edges());
    CHECK(p.targets[0].size() == static_cast<size_t>(l1.num_vertices()));
    CHECK(p.targets[1].size() == static_cast<size_t>(l2.num_vertices()));
    for (int l = 0; l < 2; ++l) {
      REQUIRE(p.preimages[l].size() == p.targets[l].size());
      for (size_t v = 0; v < p.targets[l].size(); ++v) {
        CHECK((fine.position(p.preimages[l][v]) - p.targets[l][v]).norm() < 1e-10);
      }
    }
    // Even targets keep their identity across levels.
    for (size_t v = 0; v < p.targets[0].size(); ++v) CHECK(p.targets[1][v] == p.targets[0][v]);
  }
  Dataset again = generate_dataset(source, small_options(TargetKind::SurfaceMap, 2));
  for (size_t i = 0; i < d.pairs.size(); ++i) {
    CHECK(again.pairs[i].coarse.vertices() == d.pairs[i].coarse.vertices());
    CHECK(again.pairs[i].targets == d.pairs[i].targets);
  }
}

TEST_CASE("dataset: refinement points are dyadic") {
  Mesh m = shapes::jitter(shapes::octahedron(), 0.1, 1);
  auto pts = refinement_points(m.topology(), 2);
  Mesh l1 = midpoint_subdivide(m, 1), l2 = midpoint_subdivide(m, 2);
  REQUIRE(pts[1].size() == static_cast<size_t>(l2.num_vertices()));
  for (int v = 0; v < l1.num_vertices(); ++v) CHECK((m.position(pts[0][v]) - l1.vertex(v)).norm() < 1e-15);
  for (int v = 0; v < l2.num_vertices(); ++v) {
    CHECK((m.position(pts[1][v]) - l2.vertex(v)).norm() < 1e-15);
    for (double w : pts[1][v].weights) CHECK(w * 4 == std::round(w * 4));
  }
}

TEST_CASE("dataset: Loop targets, levels and save/load") {
  Mesh source = shapes::icosphere(3);
  Dataset d = generate_dataset(source, small_options(TargetKind::Loop, 1));
  for (const TrainingPair& p : d.pairs) {
    REQUIRE(p.levels() == 1);
    CHECK(p.targets[0].size() == static_cast<size_t>(p.coarse.num_vertices() + p.coarse.num_edges()));
    CHECK(p.targets[0] == loop_subdivide(p.coarse, 1).vertices());
  }
  fs::path a = scratch("ds_a"), b = scratch("ds_b");
  save_dataset(d, a);
  Dataset back = load_dataset(a);
  REQUIRE(back.pairs.size() == d.pairs.size());
  CHECK(back.options.targets == TargetKind::Loop);
  CHECK(back.options.seed == d.options.seed);
  CHECK(back.normalization.scale == d.normalization.scale);
  for (size_t i = 0; i < d.pairs.size(); ++i) {
    CHECK(back.pairs[i].coarse.vertices() == d.pairs[i].coarse.vertices());
    CHECK(back.pairs[i].coarse.faces() == d.pairs[i].coarse.faces());
    CHECK(back.pairs[i].targets == d.pairs[i].targets);
    CHECK(back.pairs[i].seed == d.pairs[i].seed);
  }
  save_dataset(back, b);
  CHECK(read_text_file(a / "manifest.txt") == read_text_file(b / "manifest.txt"));
  CHECK(read_text_file(a / "pair_0001" / "targets_L1.txt") == read_text_file(b / "pair_0001" / "targets_L1.txt"));
  fs::remove(a / "pair_0002" / "coarse.obj");
  CHECK_THROWS_AS(load_dataset(a), Error);
  fs::remove_all(a);
  fs::remove_all(b);
  CHECK_THROWS_AS(load_dataset(a), Error);
}

TEST_CASE("train: zero epochs, history and determinism") {
  Dataset d = generate_dataset(shapes::icosphere(3), small_options(TargetKind::Loop, 2));
  TrainOptions o;
  o.epochs = 0;
  o.seed = 3;
  TrainResult r0 = train(d, o);
  CHECK(r0.history.empty());
  CHECK(same_params(r0.bundle, NetworkBundle::random(3)));
  CHECK(r0.bundle.trained_levels == 2);

  o.epochs = 3;
  TrainResult a = train(d, o), b = train(d, o);
  CHECK(a.history.size() == 3);
  CHECK_FALSE(a.aborted);
  CHECK(format_checkpoint(a.bundle) == format_checkpoint(b.bundle));
  CHECK(a.history == b.history);

  NetworkBundle start = NetworkBundle::random(9);
  TrainResult c = train(d, o, &start);
  CHECK_FALSE(same_params(c.bundle, start));

  fs::path ck = scratch("ckpt.nsd");
  o.checkpoint = ck;
  train(d, o);
  CHECK(parse_checkpoint(read_text_file(ck)).trained_levels == 2);
  CHECK(read_text_file(ck) == format_checkpoint(a.bundle));
  fs::remove(ck);
}

TEST_CASE("train: single pair overfits") {
  DatasetOptions o = small_options(TargetKind::Loop, 1);
  o.count = 1;
  Dataset d = generate_dataset(shapes::icosphere(2), o);
  TrainOptions t;
  t.epochs = 500;
  t.seed = 1;
  TrainResult r = train(d, t);
  REQUIRE(r.history.size() == 500);
  PreparedPair p = prepare_pair(d.pairs[0], 1);
  double initial = evaluate_pair(p, NetworkBundle::random(1)).loss;
  CHECK(r.history.back() < 0.1 * initial);
}

TEST_CASE("evaluate_pair: gradient of the frozen-frame loss") {
  DatasetOptions o = small_options(TargetKind::Loop, 2);
  o.count = 1;
  o.min_vertices = o.max_vertices = 12;
  Dataset d = generate_dataset(shapes::icosahedron(), o);
  PreparedPair p = prepare_pair(d.pairs[0], 2);
  NetworkBundle b = NetworkBundle::random(2);
  PairEvaluation e = evaluate_pair(p, b);
  CHECK(e.per_level.size() == 2);

  // Frames are constants of the differentiated graph, so the reference
  // re-runs the forward pass with the frames of the unperturbed pass.
  ForwardTape tape;
  forward_pipeline(p.hierarchy, d.pairs[0].coarse.vertices(), b, &tape);
  auto loss = [&](const NetworkBundle& q) {
    ForwardOutput f = forward_pipeline(p.hierarchy, d.pairs[0].coarse.vertices(), q, nullptr, &tape);
    return loss_l2_levels({f.positions[1], f.positions[2]}, d.pairs[0].targets).value;
  };
  CHECK(loss(b) == e.loss);
  const double h = 1e-6;
  std::mt19937_64 rng(6);
  int checked = 0;
  for (int m = 0; m < 3; ++m) {
    MLPParams& mod = m == 0 ? b.init : m == 1 ? b.vertex : b.edge;
    MLPParams& gmod = m == 0 ? e.grad.init : m == 1 ? e.grad.vertex : e.grad.edge;
    auto blocks = mod.blocks();
    auto grads = gmod.blocks();
    for (int blk = 0; blk < 6; ++blk) {
      std::uniform_int_distribution<size_t> pick(0, blocks[blk].size() - 1);
      size_t i = pick(rng);
      double keep = blocks[blk][i];
      blocks[blk][i] = keep + h;
      double up = loss(b);
      blocks[blk][i] = keep - h;
      double down = loss(b);
      blocks[blk][i] = keep;
      double fd = (up - down) / (2 * h);
      CHECK(std::abs(fd - grads[blk][i]) <= 1e-4 * std::max(std::abs(fd), 1e-6));
      ++checked;
    }
  }
  CHECK(checked == 18);
}

TEST_CASE("gradcheck: zero bundle") {
  GradCheckOptions o;
  o.levels = 1;
  o.zero_bundle = true;
  GradCheckReport r = grad_check(4, o);
  CHECK(std::isfinite(r.loss));
  CHECK(r.max_relative_error < 1e-4);
  CHECK(r.parameters == NetworkBundle::zeros().num_parameters());
}
