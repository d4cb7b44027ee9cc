#include "nsub/obj_io.hpp"

#include <sstream>
#include <string_view>
#include <vector>

#include "nsub/error.hpp"
#include "nsub/text_io.hpp"

namespace nsub {

namespace {

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> tokens;
  size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') ++i;
    if (i > start) tokens.push_back(line.substr(start, i - start));
  }
  return tokens;
}

}  // namespace

Mesh parse_obj(const std::string& text) {
  std::vector<Vec3> vertices;
  std::vector<Face> faces;
  std::string_view rest(text);
  int line_no = 0;
  while (!rest.empty()) {
    size_t nl = rest.find('\n');
    std::string_view line = rest.substr(0, nl);
    rest = nl == std::string_view::npos ? std::string_view() : rest.substr(nl + 1);
    ++line_no;
    if (size_t hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    auto tokens = split_ws(line);
    if (tokens.empty()) continue;
    auto fail = [&](const std::string& what) {
      throw ParseError("line " + std::to_string(line_no) + ": " + what);
    };
    if (tokens[0] == "v") {
      if (tokens.size() < 4) fail("vertex record needs three coordinates");
      try {
        vertices.emplace_back(parse_double(tokens[1]), parse_double(tokens[2]),
                              parse_double(tokens[3]));
      } catch (const ParseError& e) {
        fail(e.what());
      }
    } else if (tokens[0] == "f") {
      if (tokens.size() != 4) {
        fail("face with " + std::to_string(tokens.size() - 1) + " vertices; only triangles supported");
      }
      Face face{};
      for (int c = 0; c < 3; ++c) {
        std::string_view tok = tokens[static_cast<size_t>(c) + 1];
        tok = tok.substr(0, tok.find('/'));
        long long idx = 0;
        try {
          idx = parse_int(tok);
        } catch (const ParseError& e) {
          fail(e.what());
        }
        long long resolved = idx > 0 ? idx - 1 : static_cast<long long>(vertices.size()) + idx;
        if (idx == 0 || resolved < 0) fail("invalid vertex index " + std::to_string(idx));
        face[static_cast<size_t>(c)] = static_cast<int>(resolved);
      }
      faces.push_back(face);
    }
    // vt, vn, o, g, s, usemtl, mtllib ... are ignored.
  }
  if (vertices.empty() || faces.empty()) throw ParseError("no vertices or faces");
  for (const Face& f : faces) {
    for (int v : f) {
      if (v >= static_cast<int>(vertices.size())) {
        throw ParseError("face references missing vertex " + std::to_string(v + 1));
      }
    }
  }
  return Mesh(std::move(vertices), std::move(faces));
}

Mesh load_obj(const std::filesystem::path& path) {
  return parse_obj(read_text_file(path));
}

std::string format_obj(const Mesh& mesh) {
  std::string out;
  out.reserve(static_cast<size_t>(mesh.num_vertices()) * 64 + static_cast<size_t>(mesh.num_faces()) * 24);
  for (const Vec3& p : mesh.vertices()) {
    out += "v ";
    out += format_double(p.x());
    out += ' ';
    out += format_double(p.y());
    out += ' ';
    out += format_double(p.z());
    out += '\n';
  }
  for (const Face& f : mesh.faces()) {
    out += "f " + std::to_string(f[0] + 1) + ' ' + std::to_string(f[1] + 1) + ' ' +
           std::to_string(f[2] + 1) + '\n';
  }
  return out;
}

void save_obj(const Mesh& mesh, const std::filesystem::path& path) {
  write_text_file(path, format_obj(mesh));
}

}  // namespace nsub
