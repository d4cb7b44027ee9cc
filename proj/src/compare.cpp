#include "nsub/compare.hpp"

#include <cstdio>

#include "nsub/classic.hpp"
#include "nsub/geometry.hpp"
#include "nsub/pipeline.hpp"

namespace nsub {

SchemeComparison compare_schemes(const Mesh& coarse, const Mesh& reference,
                                 const NetworkBundle* bundle, int levels,
                                 const SamplingOptions& sampling) {
  SchemeComparison out;
  out.levels = levels;
  out.reference_diagonal = bounding_box(reference).diagonal();
  auto add = [&](const char* name, Mesh m) {
    DistanceReport r = surface_distance(m, reference, sampling);
    out.rows.push_back(SchemeResult{name, std::move(m), r});
  };
  add("loop", loop_subdivide(coarse, levels));
  add("butterfly", butterfly_subdivide(coarse, levels));
  if (bundle) add("neural", neural_subdivide_normalized(coarse, *bundle, levels).back());
  return out;
}

std::string format_comparison(const SchemeComparison& c) {
  std::string out;
  char line[160];
  std::snprintf(line, sizeof(line), "%-10s %12s %12s   (x 1e-3 of bbox diagonal %.6g, %d levels)\n",
                "scheme", "hausdorff", "mean", c.reference_diagonal, c.levels);
  out += line;
  const double unit = c.reference_diagonal > 0.0 ? 1e3 / c.reference_diagonal : 1.0;
  for (const SchemeResult& r : c.rows) {
    std::snprintf(line, sizeof(line), "%-10s %12.4f %12.4f\n", r.scheme.c_str(),
                  r.report.hausdorff * unit, r.report.mean * unit);
    out += line;
  }
  return out;
}

}  // namespace nsub
