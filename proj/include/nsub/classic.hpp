#pragma once

#include "nsub/mesh.hpp"

namespace nsub {

/// Loop's even-vertex weight for valence n.
double loop_beta(int n);

/// Classic Loop subdivision (approximating) on a closed mesh.
Mesh loop_subdivide(const Mesh& mesh, int levels);

/// Modified butterfly weights s_0..s_{n-1} for an extraordinary vertex of
/// valence n; the vertex itself carries 3/4.
std::vector<double> butterfly_weights(int n);

/// Modified butterfly subdivision (interpolating) on a closed mesh.
Mesh butterfly_subdivide(const Mesh& mesh, int levels);

}  // namespace nsub
