#pragma once

#include <filesystem>
#include <string>

#include "nsub/mesh.hpp"

namespace nsub {

/// Reads `v` and triangular `f` records from a Wavefront OBJ file.
/// Texture/normal indices in faces (`f 1/2/3 ...`) and negative (relative)
/// indices are accepted; `vt`, `vn` and other records are ignored.
Mesh load_obj(const std::filesystem::path& path);
Mesh parse_obj(const std::string& text);

/// Writes `v` lines then `f` lines with shortest round-trip decimals.
void save_obj(const Mesh& mesh, const std::filesystem::path& path);
std::string format_obj(const Mesh& mesh);

}  // namespace nsub
