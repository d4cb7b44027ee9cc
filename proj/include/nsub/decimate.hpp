#pragma once

#include <cstdint>
#include <string_view>

#include "nsub/bijective_map.hpp"
#include "nsub/collapse.hpp"
#include "nsub/mesh.hpp"

namespace nsub {

enum class DecimationPolicy {
  QslimGreedy,  ///< global min-error priority queue
  Random100,    ///< min-error edge among 100 random candidates
};

/// Parses "qslim" / "qslim-greedy" / "random100" / "random-100".
DecimationPolicy parse_policy(std::string_view name);
const char* to_string(DecimationPolicy policy);

struct DecimationResult {
  Mesh coarse;
  BijectiveMap map;
  bool reached_target = true;  ///< false when no valid edge remained
  int collapses = 0;
};

/// Collapses edges until at most `target_vertices` remain or no valid edge
/// is left. Deterministic for a given (mesh, target, policy, seed).
DecimationResult decimate(const Mesh& mesh, int target_vertices, DecimationPolicy policy,
                          std::uint64_t seed, const CollapseCriteria& criteria = {});

}  // namespace nsub
