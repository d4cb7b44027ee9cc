#pragma once

#include <filesystem>
#include <string>

#include "nsub/bijective_map.hpp"

namespace nsub {

/// Serializes a map as `NSM 1` text. The endpoint meshes are identified by
/// hash only; they are stored separately (OBJ).
std::string format_nsm(const BijectiveMap& map);
void save_nsm(const BijectiveMap& map, const std::filesystem::path& path);

/// Rebuilds a map from its text and the two endpoint meshes. Throws
/// ParseError on malformed input or when a mesh hash does not match.
BijectiveMap parse_nsm(const std::string& text, const Mesh& fine, const Mesh& coarse);
BijectiveMap load_nsm(const std::filesystem::path& path, const Mesh& fine, const Mesh& coarse);

}  // namespace nsub
