// Command-line front end: decimation, dataset generation, training,
// subdivision and evaluation.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "nsub/bijective_map.hpp"
#include "nsub/classic.hpp"
#include "nsub/compare.hpp"
#include "nsub/dataset.hpp"
#include "nsub/decimate.hpp"
#include "nsub/distance.hpp"
#include "nsub/error.hpp"
#include "nsub/gradcheck.hpp"
#include "nsub/network.hpp"
#include "nsub/nsm_io.hpp"
#include "nsub/obj_io.hpp"
#include "nsub/pipeline.hpp"
#include "nsub/shapes.hpp"
#include "nsub/subdivide.hpp"
#include "nsub/trainer.hpp"

namespace fs = std::filesystem;
using namespace nsub;

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr double kGradTolerance = 1e-4;

struct DecimateArgs {
  std::string input, output, map, policy = "qslim";
  int target = 0;
  std::uint64_t seed = 0;
};

struct GenDataArgs {
  std::vector<std::string> inputs;
  std::string out_dir, targets = "map";
  int count = 200, min_v = 150, max_v = 300, levels = 2;
  std::uint64_t seed = 0;
};

struct TrainArgs {
  std::string data, checkpoint, init;
  int epochs = 700, levels = 0, checkpoint_every = 0;
  double lr = 0.002;
  std::uint64_t seed = 0;
  bool quiet = false;
};

struct SubdivideArgs {
  std::string input, checkpoint, output, all_levels;
  int levels = 2;
  bool no_normalize = false;
};

struct ClassicArgs {
  std::string scheme, input, output;
  int levels = 1;
};

struct EvalArgs {
  std::string a, b;
  int samples = 100000;
  std::uint64_t seed = 0;
  bool json = false;
};

struct GradArgs {
  std::uint64_t seed = 0;
  int levels = 2;
  bool zero = false;
};

struct ShapeArgs {
  std::string shape, output;
  double jitter = 0.0;
  std::uint64_t seed = 0;
};

struct CompareArgs {
  std::string coarse, reference, checkpoint;
  int levels = 2, samples = 100000;
  std::uint64_t seed = 0;
};

struct VerifyArgs {
  std::string fine, coarse, map;
};

int run_decimate(const DecimateArgs& a) {
  Mesh mesh = load_obj(a.input);
  DecimationResult r = decimate(mesh, a.target, parse_policy(a.policy), a.seed);
  save_obj(r.coarse, a.output);
  if (!a.map.empty()) save_nsm(r.map, a.map);
  std::cout << "decimated " << mesh.num_vertices() << " -> " << r.coarse.num_vertices()
            << " vertices (" << r.collapses << " collapses)\n";
  if (!r.reached_target) {
    std::cerr << "warning: no valid collapse left; target " << a.target << " not reached\n";
  }
  return 0;
}

int run_gen_data(const GenDataArgs& a) {
  std::vector<Mesh> sources;
  for (const std::string& in : a.inputs) sources.push_back(load_obj(in));
  DatasetOptions o;
  o.count = a.count;
  o.min_vertices = a.min_v;
  o.max_vertices = a.max_v;
  o.levels = a.levels;
  o.seed = a.seed;
  o.targets = a.targets == "loop" ? TargetKind::Loop : TargetKind::SurfaceMap;
  Dataset d = generate_dataset(sources, o);
  save_dataset(d, a.out_dir);
  int best_effort = 0;
  for (const TrainingPair& p : d.pairs) best_effort += p.best_effort ? 1 : 0;
  std::cout << "wrote " << d.pairs.size() << " pairs to " << a.out_dir << '\n';
  if (best_effort > 0) std::cerr << "warning: " << best_effort << " pairs stopped above the requested size\n";
  return 0;
}

int run_train(const TrainArgs& a) {
  Dataset d = load_dataset(a.data);
  TrainOptions o;
  o.epochs = a.epochs;
  o.learning_rate = a.lr;
  o.seed = a.seed;
  o.levels = a.levels;
  o.checkpoint = a.checkpoint;
  o.checkpoint_every = a.checkpoint_every;
  if (!a.quiet) {
    o.on_epoch = [](int epoch, double loss) {
      std::fprintf(stderr, "epoch %d loss %.6e\n", epoch + 1, loss);
    };
  }
  NetworkBundle initial;
  if (!a.init.empty()) initial = load_checkpoint(a.init);
  TrainResult r = train(d, o, a.init.empty() ? nullptr : &initial);
  if (r.rejected_steps > 0) {
    std::cerr << "warning: " << r.rejected_steps << " updates skipped for non-finite gradients\n";
  }
  if (r.aborted) {
    std::cerr << "error: " << r.message << '\n';
    return kExitData;
  }
  if (!r.history.empty()) std::printf("final loss %.6e\n", r.history.back());
  return 0;
}

int run_subdivide(const SubdivideArgs& a) {
  Mesh mesh = load_obj(a.input);
  NetworkBundle bundle = load_checkpoint(a.checkpoint);
  if (a.levels > bundle.trained_levels) {
    std::cerr << "warning: checkpoint was trained for " << bundle.trained_levels
              << " levels; results beyond that are extrapolated\n";
  }
  std::vector<Mesh> levels = a.no_normalize ? neural_subdivide(mesh, bundle, a.levels)
                                            : neural_subdivide_normalized(mesh, bundle, a.levels);
  save_obj(levels.back(), a.output);
  if (!a.all_levels.empty()) {
    fs::create_directories(a.all_levels);
    for (size_t l = 0; l < levels.size(); ++l) {
      save_obj(levels[l], fs::path(a.all_levels) / ("level_" + std::to_string(l + 1) + ".obj"));
    }
  }
  return 0;
}

int run_classic(const ClassicArgs& a) {
  Mesh mesh = load_obj(a.input);
  Mesh out;
  if (a.scheme == "loop") {
    out = loop_subdivide(mesh, a.levels);
  } else if (a.scheme == "butterfly") {
    out = butterfly_subdivide(mesh, a.levels);
  } else {
    out = midpoint_subdivide(mesh, a.levels);
  }
  save_obj(out, a.output);
  return 0;
}

int run_eval(const EvalArgs& a) {
  Mesh ma = load_obj(a.a), mb = load_obj(a.b);
  DistanceReport r = surface_distance(ma, mb, SamplingOptions{a.samples, a.seed});
  if (a.json) {
    std::cout << format_report_json(r) << '\n';
  } else {
    std::printf("hausdorff %.9g\nmean %.9g\n", r.hausdorff, r.mean);
    std::printf("a->b mean %.9g max %.9g samples %d\n", r.a_to_b.mean, r.a_to_b.max, r.a_to_b.samples);
    std::printf("b->a mean %.9g max %.9g samples %d\n", r.b_to_a.mean, r.b_to_a.max, r.b_to_a.samples);
  }
  return 0;
}

int run_gradcheck(const GradArgs& a) {
  GradCheckOptions o;
  o.levels = a.levels;
  o.zero_bundle = a.zero;
  GradCheckReport r = grad_check(a.seed, o);
  std::printf("parameters %d\nloss %.9g\n", r.parameters, r.loss);
  std::printf("max relative error %.3e (worst %s: analytic %.9g, numeric %.9g)\n",
              r.max_relative_error, r.worst_parameter.c_str(), r.worst_analytic, r.worst_numeric);
  std::printf("max absolute error %.3e\n", r.max_absolute_error);
  std::printf("parameters across a ReLU kink %d (max relative error including them %.3e)\n",
              r.kink_parameters, r.max_relative_error_all);
  const bool ok = r.max_relative_error < kGradTolerance;
  std::printf("%s\n", ok ? "gradient check passed" : "gradient check FAILED");
  return ok ? 0 : kExitData;
}

int run_make_shape(const ShapeArgs& a) {
  Mesh m = shapes::by_name(a.shape);
  if (a.jitter > 0.0) m = shapes::jitter(m, a.jitter, a.seed);
  save_obj(m, a.output);
  std::cout << a.shape << ": " << m.num_vertices() << " vertices, " << m.num_faces() << " faces\n";
  return 0;
}

int run_compare(const CompareArgs& a) {
  Mesh coarse = load_obj(a.coarse), reference = load_obj(a.reference);
  NetworkBundle bundle;
  if (!a.checkpoint.empty()) bundle = load_checkpoint(a.checkpoint);
  SchemeComparison c = compare_schemes(coarse, reference, a.checkpoint.empty() ? nullptr : &bundle,
                                       a.levels, SamplingOptions{a.samples, a.seed});
  std::cout << format_comparison(c);
  return 0;
}

int run_verify_map(const VerifyArgs& a) {
  Mesh fine = load_obj(a.fine), coarse = load_obj(a.coarse);
  BijectiveMap map = load_nsm(a.map, fine, coarse);
  MapVerification v = verify_map(map);
  std::printf("records %d\nmin normal dot %.6f\nmin quality 3d %.6f\nmin quality uv %.6f\n",
              v.records_checked, v.min_normal_dot, v.min_quality_3d, v.min_quality_uv);
  std::printf("max angle-sum error %.3e\nmax area mismatch %.3e\nconnectivity %s\n",
              v.max_angle_error, v.max_area_mismatch, v.connectivity_matches ? "matches" : "differs");
  if (!v.ok) {
    std::printf("map INVALID: %s\n", v.failure.c_str());
    return kExitData;
  }
  std::printf("map valid\n");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Mesh decimation with surface maps, neural subdivision and evaluation"};
  app.require_subcommand(1);

  DecimateArgs dec;
  auto* c_dec = app.add_subcommand("decimate", "Edge-collapse decimation with a coarse-to-fine map");
  c_dec->add_option("--input", dec.input, "Input OBJ")->required();
  c_dec->add_option("--target-vertices", dec.target, "Stop at this many vertices")->required();
  c_dec->add_option("--policy", dec.policy, "qslim or random100")
      ->check(CLI::IsMember({"qslim", "qslim-greedy", "random100", "random-100"}));
  c_dec->add_option("--seed", dec.seed, "Seed for the random policy");
  c_dec->add_option("--output", dec.output, "Coarse OBJ")->required();
  c_dec->add_option("--map", dec.map, "Write the surface map (.nsm)");

  GenDataArgs gen;
  auto* c_gen = app.add_subcommand("gen-data", "Generate training pairs from random decimations");
  c_gen->add_option("--input", gen.inputs, "Source OBJ (repeat for several shapes)")->required();
  c_gen->add_option("--count", gen.count, "Number of pairs")->check(CLI::PositiveNumber);
  c_gen->add_option("--min-v", gen.min_v, "Smallest coarse vertex count");
  c_gen->add_option("--max-v", gen.max_v, "Largest coarse vertex count");
  c_gen->add_option("--levels", gen.levels, "Subdivision levels with targets")->check(CLI::Range(1, 6));
  c_gen->add_option("--seed", gen.seed, "Dataset seed");
  c_gen->add_option("--targets", gen.targets, "map (surface map) or loop (Loop subdivision)")
      ->check(CLI::IsMember({"map", "loop"}));
  c_gen->add_option("--out-dir", gen.out_dir, "Output directory")->required();

  TrainArgs tr;
  auto* c_train = app.add_subcommand("train", "Train the subdivision modules");
  c_train->add_option("--data", tr.data, "Dataset directory")->required();
  c_train->add_option("--epochs", tr.epochs, "Epochs")->check(CLI::NonNegativeNumber);
  c_train->add_option("--lr", tr.lr, "Learning rate")->check(CLI::PositiveNumber);
  c_train->add_option("--levels", tr.levels, "Levels to train (default: dataset levels)");
  c_train->add_option("--seed", tr.seed, "Initialization and shuffling seed");
  c_train->add_option("--checkpoint", tr.checkpoint, "Output checkpoint")->required();
  c_train->add_option("--checkpoint-every", tr.checkpoint_every, "Also write every N epochs");
  c_train->add_option("--init", tr.init, "Start from this checkpoint");
  c_train->add_flag("--quiet", tr.quiet, "No per-epoch output");

  SubdivideArgs sub;
  auto* c_sub = app.add_subcommand("subdivide", "Neural subdivision with a trained checkpoint");
  c_sub->add_option("--input", sub.input, "Coarse OBJ")->required();
  c_sub->add_option("--checkpoint", sub.checkpoint, "Checkpoint")->required();
  c_sub->add_option("--levels", sub.levels, "Subdivision levels")->check(CLI::Range(1, 8));
  c_sub->add_option("--output", sub.output, "Finest level OBJ")->required();
  c_sub->add_option("--all-levels", sub.all_levels, "Also write level_<k>.obj for every level here");
  c_sub->add_flag("--no-normalize", sub.no_normalize,
                  "Skip the checkpoint's training normalization");

  ClassicArgs cls;
  auto* c_cls = app.add_subcommand("subdivide-classic", "Loop, modified butterfly or midpoint subdivision");
  c_cls->add_option("--scheme", cls.scheme, "loop, butterfly or midpoint")
      ->required()
      ->check(CLI::IsMember({"loop", "butterfly", "midpoint"}));
  c_cls->add_option("--levels", cls.levels, "Subdivision levels")->check(CLI::Range(1, 8));
  c_cls->add_option("--input", cls.input, "Input OBJ")->required();
  c_cls->add_option("--output", cls.output, "Output OBJ")->required();

  EvalArgs ev;
  auto* c_eval = app.add_subcommand("eval", "Hausdorff and mean surface distance");
  c_eval->add_option("--a", ev.a, "First OBJ")->required();
  c_eval->add_option("--b", ev.b, "Second OBJ")->required();
  c_eval->add_option("--samples", ev.samples, "Surface samples per direction")->check(CLI::PositiveNumber);
  c_eval->add_option("--seed", ev.seed, "Sampling seed");
  c_eval->add_flag("--json", ev.json, "Print the report as JSON");

  GradArgs gc;
  auto* c_grad = app.add_subcommand("gradcheck", "Compare analytic and finite-difference gradients");
  c_grad->add_option("--seed", gc.seed, "Mesh and network seed");
  c_grad->add_option("--levels", gc.levels, "Subdivision levels")->check(CLI::Range(1, 3));
  c_grad->add_flag("--zero", gc.zero, "Check an all-zero network");

  ShapeArgs sh;
  auto* c_shape = app.add_subcommand("make-shape", "Write a built-in test shape");
  c_shape->add_option("--shape", sh.shape,
                      "tetrahedron, octahedron, icosahedron, icosphere, bumpy, torus, wavy-torus, twisted")
      ->required();
  c_shape->add_option("--jitter", sh.jitter, "Uniform vertex noise amplitude");
  c_shape->add_option("--seed", sh.seed, "Noise seed");
  c_shape->add_option("--output", sh.output, "Output OBJ")->required();

  CompareArgs cmp;
  auto* c_cmp = app.add_subcommand("compare", "Distance table for Loop, butterfly and neural subdivision");
  c_cmp->add_option("--coarse", cmp.coarse, "Coarse OBJ")->required();
  c_cmp->add_option("--reference", cmp.reference, "Reference OBJ")->required();
  c_cmp->add_option("--checkpoint", cmp.checkpoint, "Checkpoint (omit for classic schemes only)");
  c_cmp->add_option("--levels", cmp.levels, "Subdivision levels")->check(CLI::Range(1, 6));
  c_cmp->add_option("--samples", cmp.samples, "Surface samples per direction")->check(CLI::PositiveNumber);
  c_cmp->add_option("--seed", cmp.seed, "Sampling seed");

  VerifyArgs vm;
  auto* c_verify = app.add_subcommand("verify-map", "Replay a surface map and check every collapse");
  c_verify->add_option("--fine", vm.fine, "Original OBJ")->required();
  c_verify->add_option("--coarse", vm.coarse, "Decimated OBJ")->required();
  c_verify->add_option("--map", vm.map, "Map (.nsm)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  }

  try {
    if (c_dec->parsed()) return run_decimate(dec);
    if (c_gen->parsed()) return run_gen_data(gen);
    if (c_train->parsed()) return run_train(tr);
    if (c_sub->parsed()) return run_subdivide(sub);
    if (c_cls->parsed()) return run_classic(cls);
    if (c_eval->parsed()) return run_eval(ev);
    if (c_grad->parsed()) return run_gradcheck(gc);
    if (c_shape->parsed()) return run_make_shape(sh);
    if (c_cmp->parsed()) return run_compare(cmp);
    if (c_verify->parsed()) return run_verify_map(vm);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  }
  return kExitUsage;
}
