#include "nsub/decimate.hpp"

#include <algorithm>
#include <queue>
#include <random>
#include <string>
#include <tuple>

#include "nsub/error.hpp"

namespace nsub {

namespace {

constexpr int kRandomCandidates = 100;
constexpr int kRandomRounds = 10;

struct Candidate {
  double cost;
  int a;
  int b;
  Vec3 position;
};

bool cheaper(const Candidate& x, const Candidate& y) {
  return std::tie(x.cost, x.a, x.b) < std::tie(y.cost, y.a, y.b);
}

Candidate evaluate(const DecimationState& state, int a, int b) {
  if (a > b) std::swap(a, b);
  Placement p = state.placement(a, b);
  return Candidate{p.cost, a, b, p.position};
}

void run_greedy(DecimationState& state, int target, const CollapseCriteria& criteria,
                std::vector<CollapseRecord>& records) {
  auto worse = [](const Candidate& x, const Candidate& y) { return cheaper(y, x); };
  std::priority_queue<Candidate, std::vector<Candidate>, decltype(worse)> queue(worse);
  for (int f : state.alive_faces()) {
    const Face& t = state.faces()[f];
    for (int c = 0; c < 3; ++c) {
      int a = t[c], b = t[(c + 1) % 3];
      if (a < b) queue.push(evaluate(state, a, b));
    }
  }
  while (state.num_alive_vertices() > target && !queue.empty()) {
    Candidate top = queue.top();
    queue.pop();
    // Entries touching a dead vertex are stale; the survivor's edges were
    // re-queued with fresh costs when it was created.
    if (!state.vertex_alive(top.a) || !state.vertex_alive(top.b)) continue;
    CollapsePlan plan = state.plan(top.a, top.b, top.position, criteria);
    if (!plan.valid()) continue;
    CollapseRecord rec = state.apply(std::move(plan));
    int i = rec.i;
    records.push_back(std::move(rec));
    for (int n : state.neighbors(i)) queue.push(evaluate(state, n, i));
    // Invalid edges near the collapse may have become valid.
    for (int n : state.neighbors(i)) {
      for (int m : state.neighbors(n)) {
        if (m != i && n < m) queue.push(evaluate(state, n, m));
      }
    }
  }
}

bool run_random(DecimationState& state, int target, std::uint64_t seed,
                const CollapseCriteria& criteria, std::vector<CollapseRecord>& records) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> corner(0, 2);
  std::vector<Candidate> candidates;
  while (state.num_alive_vertices() > target) {
    bool collapsed = false;
    for (int round = 0; round < kRandomRounds && !collapsed; ++round) {
      // Every edge owns two of the 3F halfedges, so a uniform halfedge is a
      // uniform edge.
      candidates.clear();
      std::uniform_int_distribution<int> face(0, state.num_alive_faces() - 1);
      for (int s = 0; s < kRandomCandidates; ++s) {
        const Face& t = state.faces()[state.alive_faces()[face(rng)]];
        int c = corner(rng);
        candidates.push_back(evaluate(state, t[c], t[(c + 1) % 3]));
      }
      std::sort(candidates.begin(), candidates.end(), cheaper);
      for (size_t s = 0; s < candidates.size(); ++s) {
        if (s > 0 && candidates[s].a == candidates[s - 1].a && candidates[s].b == candidates[s - 1].b) {
          continue;
        }
        CollapsePlan plan = state.plan(candidates[s].a, candidates[s].b, candidates[s].position, criteria);
        if (!plan.valid()) continue;
        records.push_back(state.apply(std::move(plan)));
        collapsed = true;
        break;
      }
    }
    if (!collapsed) return false;
  }
  return true;
}

}  // namespace

DecimationPolicy parse_policy(std::string_view name) {
  if (name == "qslim" || name == "qslim-greedy") return DecimationPolicy::QslimGreedy;
  if (name == "random100" || name == "random-100") return DecimationPolicy::Random100;
  throw Error("unknown decimation policy '" + std::string(name) + "'");
}

const char* to_string(DecimationPolicy policy) {
  return policy == DecimationPolicy::QslimGreedy ? "qslim" : "random100";
}

DecimationResult decimate(const Mesh& mesh, int target_vertices, DecimationPolicy policy,
                          std::uint64_t seed, const CollapseCriteria& criteria) {
  if (target_vertices < 4) throw DimensionError("target vertex count must be at least 4");
  DecimationState state(mesh);
  std::vector<CollapseRecord> records;
  if (policy == DecimationPolicy::QslimGreedy) {
    run_greedy(state, target_vertices, criteria, records);
  } else {
    run_random(state, target_vertices, seed, criteria, records);
  }
  DecimationResult out;
  out.reached_target = state.num_alive_vertices() <= target_vertices;
  out.collapses = static_cast<int>(records.size());
  std::vector<int> vglobal, fglobal;
  out.coarse = state.extract(&vglobal, &fglobal);
  out.map = BijectiveMap(mesh, out.coarse, std::move(records), std::move(vglobal), std::move(fglobal));
  return out;
}

}  // namespace nsub
