#include "nsub/dataset.hpp"

#include <charconv>
#include <cstdio>
#include <random>

#include "nsub/classic.hpp"
#include "nsub/decimate.hpp"
#include "nsub/error.hpp"
#include "nsub/obj_io.hpp"
#include "nsub/subdivide.hpp"
#include "nsub/text_io.hpp"

namespace nsub {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::string hex(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::uint64_t parse_hex(TokenReader& in) {
  std::string_view tok = in.next();
  std::uint64_t v = 0;
  auto [end, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v, 16);
  if (ec != std::errc() || end != tok.data() + tok.size()) {
    in.fail("invalid hexadecimal value '" + std::string(tok) + "'");
  }
  return v;
}

std::string pair_dir(int index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "pair_%04d", index);
  return buf;
}

// Corner coordinates of the 4 children of a face, in terms of the parent's
// corners: t0, m01, m20 / m01, t1, m12 / m20, m12, t2 / m01, m12, m20.
using Corners = std::array<std::array<double, 3>, 3>;

Corners child_corners(const Corners& parent, int child) {
  auto mid = [&](int a, int b) {
    std::array<double, 3> m{};
    for (int i = 0; i < 3; ++i) m[i] = 0.5 * (parent[a][i] + parent[b][i]);
    return m;
  };
  switch (child) {
    case 0: return {parent[0], mid(0, 1), mid(2, 0)};
    case 1: return {mid(0, 1), parent[1], mid(1, 2)};
    case 2: return {mid(2, 0), mid(1, 2), parent[2]};
    default: return {mid(0, 1), mid(1, 2), mid(2, 0)};
  }
}

std::vector<std::vector<Vec3>> loop_targets(const Mesh& coarse, int levels) {
  std::vector<std::vector<Vec3>> out;
  Mesh current = coarse;
  for (int l = 0; l < levels; ++l) {
    current = loop_subdivide(current, 1);
    out.push_back(current.vertices());
  }
  return out;
}

}  // namespace

const char* to_string(TargetKind kind) {
  return kind == TargetKind::Loop ? "loop" : "map";
}

std::vector<std::vector<BarycentricPoint>> refinement_points(const Topology& coarse, int levels) {
  std::vector<std::vector<BarycentricPoint>> out;
  // Level-0 points: every vertex on a corner of its lowest-index face.
  std::vector<BarycentricPoint> prev(static_cast<size_t>(coarse.num_vertices()));
  for (int v = 0; v < coarse.num_vertices(); ++v) {
    int best = -1;
    for (int h : coarse.outgoing_sorted(v)) {
      if (best < 0 || Topology::face_of(h) < Topology::face_of(best)) best = h;
    }
    std::array<double, 3> w{0.0, 0.0, 0.0};
    w[static_cast<size_t>(best % 3)] = 1.0;
    prev[v] = BarycentricPoint{Topology::face_of(best), w};
  }
  std::vector<Corners> corners(static_cast<size_t>(coarse.num_faces()),
                               Corners{{{1.0, 0.0, 0.0}, {0.0, 1.0, 0.0}, {0.0, 0.0, 1.0}}});
  std::vector<int> ancestor(static_cast<size_t>(coarse.num_faces()));
  for (int f = 0; f < coarse.num_faces(); ++f) ancestor[f] = f;

  std::shared_ptr<const Topology> topo;
  const Topology* current = &coarse;
  for (int l = 0; l < levels; ++l) {
    const int nv = current->num_vertices();
    std::vector<BarycentricPoint> level(prev);
    level.resize(static_cast<size_t>(nv + current->num_edges()));
    for (int e = 0; e < current->num_edges(); ++e) {
      int h = current->edge_halfedge(e);
      int t = current->twin(h);
      int hh = Topology::face_of(h) < Topology::face_of(t) ? h : t;
      int f = Topology::face_of(hh);
      const Corners& c = corners[f];
      const auto& a = c[static_cast<size_t>(hh % 3)];
      const auto& b = c[static_cast<size_t>((hh % 3 + 1) % 3)];
      std::array<double, 3> w{};
      for (int i = 0; i < 3; ++i) w[i] = 0.5 * (a[i] + b[i]);
      level[nv + e] = BarycentricPoint{ancestor[f], w};
    }
    std::vector<Corners> next_corners(corners.size() * 4);
    std::vector<int> next_ancestor(ancestor.size() * 4);
    for (size_t f = 0; f < corners.size(); ++f) {
      for (int c = 0; c < 4; ++c) {
        next_corners[4 * f + c] = child_corners(corners[f], c);
        next_ancestor[4 * f + c] = ancestor[f];
      }
    }
    corners = std::move(next_corners);
    ancestor = std::move(next_ancestor);
    topo = midpoint_topology(*current);
    current = topo.get();
    out.push_back(level);
    prev = std::move(level);
  }
  return out;
}

Dataset generate_dataset(const std::vector<Mesh>& sources, const DatasetOptions& options) {
  if (sources.empty()) throw DimensionError("no source meshes");
  if (options.count < 1) throw DimensionError("pair count must be positive");
  if (options.levels < 1) throw DimensionError("levels must be at least 1");
  if (options.min_vertices < 4 || options.max_vertices < options.min_vertices) {
    throw DimensionError("invalid vertex range [" + std::to_string(options.min_vertices) + ", " +
                         std::to_string(options.max_vertices) + "]");
  }
  Dataset out;
  out.options = options;
  std::vector<NormalizedMesh> normalized;
  for (const Mesh& m : sources) {
    normalized.push_back(normalize_unit_box(m));
    out.source_hashes.push_back(mesh_hash(normalized.back().mesh));
  }
  if (sources.size() == 1) out.normalization = normalized[0].transform;

  const int shapes = static_cast<int>(sources.size());
  int index = 0;
  for (int s = 0; s < shapes; ++s) {
    const Mesh& source = normalized[s].mesh;
    const int share = options.count / shapes + (s < options.count % shapes ? 1 : 0);
    for (int k = 0; k < share; ++k, ++index) {
      TrainingPair pair;
      bool done = false;
      for (int attempt = 0; attempt < std::max(1, options.max_attempts) && !done; ++attempt) {
        const std::uint64_t pair_seed =
            splitmix64(options.seed ^ splitmix64(static_cast<std::uint64_t>(index) * 64 + attempt));
        std::mt19937_64 rng(pair_seed);
        std::uniform_int_distribution<int> count(options.min_vertices, options.max_vertices);
        const int target = count(rng);
        DecimationResult dec = decimate(source, target, DecimationPolicy::Random100, rng());
        TrainingPair candidate;
        candidate.coarse = dec.coarse;
        candidate.source_hash = out.source_hashes[s];
        candidate.source_index = s;
        candidate.seed = pair_seed;
        candidate.best_effort = !dec.reached_target;
        try {
          if (options.targets == TargetKind::Loop) {
            candidate.targets = loop_targets(dec.coarse, options.levels);
          } else {
            auto points = refinement_points(dec.coarse.topology(), options.levels);
            for (const auto& level : points) {
              std::vector<Vec3> targets;
              std::vector<BarycentricPoint> pre;
              targets.reserve(level.size());
              pre.reserve(level.size());
              for (const BarycentricPoint& p : level) {
                BijectiveMap::Image img = dec.map.map_point(p);
                targets.push_back(img.position);
                pre.push_back(img.fine_point);
              }
              candidate.targets.push_back(std::move(targets));
              candidate.preimages.push_back(std::move(pre));
            }
          }
        } catch (const NumericalError&) {
          ++out.dropped_pairs;
          continue;
        }
        pair = std::move(candidate);
        done = !pair.best_effort;
      }
      if (pair.targets.empty()) {
        throw NumericalError("could not build training pair " + std::to_string(index) +
                             " after " + std::to_string(options.max_attempts) + " attempts");
      }
      out.pairs.push_back(std::move(pair));
    }
  }
  return out;
}

void save_dataset(const Dataset& dataset, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create '" + dir.string() + "': " + ec.message());
  const DatasetOptions& o = dataset.options;
  std::string manifest = "NSDATA 1\n";
  manifest += "seed " + hex(o.seed) + '\n';
  manifest += "count " + std::to_string(dataset.pairs.size()) + '\n';
  manifest += "vertices " + std::to_string(o.min_vertices) + ' ' + std::to_string(o.max_vertices) + '\n';
  manifest += "levels " + std::to_string(o.levels) + '\n';
  manifest += std::string("targets ") + to_string(o.targets) + '\n';
  const Similarity& s = dataset.normalization;
  manifest += "normalization " + format_double(s.scale) + ' ' + format_double(s.translation.x()) +
              ' ' + format_double(s.translation.y()) + ' ' + format_double(s.translation.z()) + '\n';
  manifest += "sources " + std::to_string(dataset.source_hashes.size()) + '\n';
  for (std::uint64_t h : dataset.source_hashes) manifest += hex(h) + '\n';
  manifest += "dropped " + std::to_string(dataset.dropped_pairs) + '\n';
  for (size_t i = 0; i < dataset.pairs.size(); ++i) {
    const TrainingPair& p = dataset.pairs[i];
    manifest += "pair " + std::to_string(i) + ' ' + std::to_string(p.source_index) + ' ' +
                hex(p.seed) + ' ' + (p.best_effort ? "1" : "0") + ' ' +
                std::to_string(p.coarse.num_vertices()) + '\n';
    const std::filesystem::path pdir = dir / pair_dir(static_cast<int>(i));
    std::filesystem::create_directories(pdir, ec);
    if (ec) throw IoError("cannot create '" + pdir.string() + "': " + ec.message());
    save_obj(p.coarse, pdir / "coarse.obj");
    for (int l = 0; l < p.levels(); ++l) {
      std::string text;
      for (const Vec3& t : p.targets[l]) {
        text += format_double(t.x()) + ' ' + format_double(t.y()) + ' ' + format_double(t.z()) + '\n';
      }
      write_text_file(pdir / ("targets_L" + std::to_string(l + 1) + ".txt"), text);
    }
  }
  write_text_file(dir / "manifest.txt", manifest);
}

Dataset load_dataset(const std::filesystem::path& dir) {
  TokenReader in(read_text_file(dir / "manifest.txt"), (dir / "manifest.txt").string());
  Dataset out;
  DatasetOptions& o = out.options;
  in.expect("NSDATA");
  if (in.next_int() != 1) in.fail("unsupported dataset version");
  in.expect("seed");
  o.seed = parse_hex(in);
  in.expect("count");
  o.count = in.next_int(1, 1 << 24);
  in.expect("vertices");
  o.min_vertices = in.next_int(4, 1 << 30);
  o.max_vertices = in.next_int(o.min_vertices, 1 << 30);
  in.expect("levels");
  o.levels = in.next_int(1, 16);
  in.expect("targets");
  std::string_view kind = in.next();
  if (kind == "map") {
    o.targets = TargetKind::SurfaceMap;
  } else if (kind == "loop") {
    o.targets = TargetKind::Loop;
  } else {
    in.fail("unknown target kind '" + std::string(kind) + "'");
  }
  in.expect("normalization");
  out.normalization.scale = in.next_double();
  for (int i = 0; i < 3; ++i) out.normalization.translation[i] = in.next_double();
  in.expect("sources");
  int sources = in.next_int(1, 1 << 20);
  for (int i = 0; i < sources; ++i) out.source_hashes.push_back(parse_hex(in));
  in.expect("dropped");
  out.dropped_pairs = in.next_int(0, 1 << 30);
  for (int i = 0; i < o.count; ++i) {
    in.expect("pair");
    if (in.next_int() != i) in.fail("pairs out of order");
    TrainingPair p;
    p.source_index = in.next_int(0, sources - 1);
    p.source_hash = out.source_hashes[p.source_index];
    p.seed = parse_hex(in);
    p.best_effort = in.next_int(0, 1) == 1;
    int nv = in.next_int(4, 1 << 30);
    const std::filesystem::path pdir = dir / pair_dir(i);
    p.coarse = load_obj(pdir / "coarse.obj");
    if (p.coarse.num_vertices() != nv) in.fail("coarse mesh of pair " + std::to_string(i) + " has the wrong size");
    // Level sizes follow from the coarse connectivity.
    int size = p.coarse.num_vertices(), edges = p.coarse.num_edges(), faces = p.coarse.num_faces();
    for (int l = 1; l <= o.levels; ++l) {
      size += edges;
      edges = 2 * edges + 3 * faces;
      faces *= 4;
      const std::filesystem::path tpath = pdir / ("targets_L" + std::to_string(l) + ".txt");
      TokenReader t(read_text_file(tpath), tpath.string());
      std::vector<Vec3> targets(static_cast<size_t>(size));
      for (Vec3& v : targets) {
        double x = t.next_double(), y = t.next_double(), z = t.next_double();
        v = Vec3(x, y, z);
      }
      if (!t.at_end()) t.fail("more targets than level vertices");
      p.targets.push_back(std::move(targets));
    }
    out.pairs.push_back(std::move(p));
  }
  if (!in.at_end()) in.fail("trailing data in manifest");
  return out;
}

}  // namespace nsub
