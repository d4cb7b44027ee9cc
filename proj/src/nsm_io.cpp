#include "nsub/nsm_io.hpp"

#include <cstdio>
#include <limits>

#include "nsub/error.hpp"
#include "nsub/text_io.hpp"

namespace nsub {

namespace {

std::string hex(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

void append_chart(std::string& out, const char* tag, const UVChart& chart) {
  out += tag;
  out += ' ' + std::to_string(chart.num_vertices()) + ' ' + std::to_string(chart.num_interior) +
         ' ' + std::to_string(chart.num_triangles()) + '\n';
  for (int v = 0; v < chart.num_vertices(); ++v) {
    out += std::to_string(chart.vertices[v]) + ' ' + format_double(chart.uv[v].x()) + ' ' +
           format_double(chart.uv[v].y()) + '\n';
  }
  for (int t = 0; t < chart.num_triangles(); ++t) {
    const Face& f = chart.triangles[t];
    out += std::to_string(f[0]) + ' ' + std::to_string(f[1]) + ' ' + std::to_string(f[2]) + ' ' +
           std::to_string(chart.faces[t]) + '\n';
  }
}

UVChart read_chart(TokenReader& in, const char* tag, ChartStage stage) {
  constexpr long long kMax = std::numeric_limits<int>::max();
  in.expect(tag);
  UVChart chart;
  chart.stage = stage;
  int nv = in.next_int(3, kMax);
  chart.num_interior = in.next_int(1, nv);
  int nt = in.next_int(1, kMax);
  for (int v = 0; v < nv; ++v) {
    chart.vertices.push_back(in.next_int(0, kMax));
    double u = in.next_double();
    double w = in.next_double();
    chart.uv.emplace_back(u, w);
  }
  for (int t = 0; t < nt; ++t) {
    Face f{};
    for (int& c : f) c = in.next_int(0, nv - 1);
    chart.triangles.push_back(f);
    chart.faces.push_back(in.next_int(0, kMax));
  }
  return chart;
}

}  // namespace

std::string format_nsm(const BijectiveMap& map) {
  std::string out = "NSM 1\n";
  out += "fine_hash " + hex(mesh_hash(map.fine())) + '\n';
  out += "coarse_hash " + hex(mesh_hash(map.coarse())) + '\n';
  out += "coarse_vertices " + std::to_string(map.coarse_vertex_global().size()) + '\n';
  for (int v : map.coarse_vertex_global()) out += std::to_string(v) + '\n';
  out += "coarse_faces " + std::to_string(map.coarse_face_global().size()) + '\n';
  for (int f : map.coarse_face_global()) out += std::to_string(f) + '\n';
  out += "records " + std::to_string(map.records().size()) + '\n';
  for (const CollapseRecord& r : map.records()) {
    out += "collapse " + std::to_string(r.j) + ' ' + std::to_string(r.k) + ' ' +
           std::to_string(r.i) + ' ' + format_double(r.position.x()) + ' ' +
           format_double(r.position.y()) + ' ' + format_double(r.position.z()) + '\n';
    append_chart(out, "before", r.before);
    append_chart(out, "after", r.after);
  }
  return out;
}

void save_nsm(const BijectiveMap& map, const std::filesystem::path& path) {
  write_text_file(path, format_nsm(map));
}

BijectiveMap parse_nsm(const std::string& text, const Mesh& fine, const Mesh& coarse) {
  constexpr long long kMax = std::numeric_limits<int>::max();
  TokenReader in(text, "map");
  in.expect("NSM");
  if (in.next_int() != 1) in.fail("unsupported map version");
  in.expect("fine_hash");
  if (in.next() != hex(mesh_hash(fine))) in.fail("fine mesh does not match the map");
  in.expect("coarse_hash");
  if (in.next() != hex(mesh_hash(coarse))) in.fail("coarse mesh does not match the map");
  in.expect("coarse_vertices");
  std::vector<int> vglobal(static_cast<size_t>(in.next_int(0, kMax)));
  for (int& v : vglobal) v = in.next_int(0, kMax);
  in.expect("coarse_faces");
  std::vector<int> fglobal(static_cast<size_t>(in.next_int(0, kMax)));
  for (int& f : fglobal) f = in.next_int(0, kMax);
  in.expect("records");
  int n = in.next_int(0, kMax);
  std::vector<CollapseRecord> records;
  records.reserve(static_cast<size_t>(n));
  for (int r = 0; r < n; ++r) {
    in.expect("collapse");
    CollapseRecord rec;
    rec.j = in.next_int(0, kMax);
    rec.k = in.next_int(0, kMax);
    rec.i = in.next_int(0, kMax);
    double x = in.next_double(), y = in.next_double(), z = in.next_double();
    rec.position = Vec3(x, y, z);
    rec.before = read_chart(in, "before", ChartStage::PreCollapse);
    rec.after = read_chart(in, "after", ChartStage::PostCollapse);
    records.push_back(std::move(rec));
  }
  if (!in.at_end()) in.fail("trailing data after the last record");
  try {
    return BijectiveMap(fine, coarse, std::move(records), std::move(vglobal), std::move(fglobal));
  } catch (const DimensionError& e) {
    throw ParseError(std::string("map: ") + e.what());
  }
}

BijectiveMap load_nsm(const std::filesystem::path& path, const Mesh& fine, const Mesh& coarse) {
  return parse_nsm(read_text_file(path), fine, coarse);
}

}  // namespace nsub
