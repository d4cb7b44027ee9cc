#pragma once

#include <string>
#include <vector>

#include "nsub/distance.hpp"
#include "nsub/network.hpp"

namespace nsub {

struct SchemeResult {
  std::string scheme;
  Mesh subdivided;
  DistanceReport report;
};

struct SchemeComparison {
  std::vector<SchemeResult> rows;
  double reference_diagonal = 0.0;
  int levels = 0;
};

/// Subdivides `coarse` with Loop, modified butterfly and (when `bundle` is
/// given) the neural modules in the bundle's normalized frame, and measures
/// each result against `reference`.
SchemeComparison compare_schemes(const Mesh& coarse, const Mesh& reference,
                                 const NetworkBundle* bundle, int levels = 2,
                                 const SamplingOptions& sampling = {});

/// Aligned text table; distances in thousandths of the reference
/// bounding-box diagonal.
std::string format_comparison(const SchemeComparison& comparison);

}  // namespace nsub
