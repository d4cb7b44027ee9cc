#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <string>
#include <sys/wait.h>

#include "nsub/network.hpp"
#include "nsub/obj_io.hpp"
#include "nsub/shapes.hpp"
#include "nsub/subdivide.hpp"
#include "nsub/text_io.hpp"

using namespace nsub;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code = -1;
  std::string out;
  std::string err;
};

Run ns(const std::string& args) {
  static const fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / "nsub_cli_test";
    fs::create_directories(d);
    return d;
  }();
  const fs::path out = dir / "stdout.txt", err = dir / "stderr.txt";
  std::string cmd = std::string(NS_EXECUTABLE) + ' ' + args + " >" + out.string() + " 2>" + err.string();
  int status = std::system(cmd.c_str());
  Run r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = read_text_file(out);
  r.err = read_text_file(err);
  return r;
}

fs::path work(const std::string& name) { return fs::temp_directory_path() / "nsub_cli_test" / name; }

}  // namespace

TEST_CASE("cli: usage errors") {
  CHECK(ns("").code == 1);
  Run bad = ns("eval --a x.obj --b y.obj --frobnicate");
  CHECK(bad.code == 1);
  CHECK(bad.err.find("Usage") != std::string::npos);
  CHECK(ns("subdivide-classic --scheme catmull --input a.obj --output b.obj").code == 1);
  CHECK(ns("--help").code == 0);
}

TEST_CASE("cli: eval of a mesh against itself") {
  save_obj(shapes::icosphere(2), work("sphere.obj"));
  Run r = ns("eval --a " + work("sphere.obj").string() + " --b " + work("sphere.obj").string() +
             " --samples 2000");
  CHECK(r.code == 0);
  CHECK(r.out.find("hausdorff 0\n") != std::string::npos);
  CHECK(r.out.find("mean 0\n") != std::string::npos);
  Run j = ns("eval --json --a " + work("sphere.obj").string() + " --b " + work("sphere.obj").string() +
             " --samples 2000");
  CHECK(j.out.find("\"hausdorff\": 0.0") != std::string::npos);
}

TEST_CASE("cli: data errors exit with 2") {
  CHECK(ns("eval --a " + work("missing.obj").string() + " --b " + work("missing.obj").string()).code == 2);
  write_text_file(work("quad.obj"), "v 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\nf 1 2 3 4\n");
  Run r = ns("subdivide-classic --scheme loop --input " + work("quad.obj").string() + " --output " +
             work("out.obj").string());
  CHECK(r.code == 2);
  CHECK(r.err.find("line 5") != std::string::npos);
}

TEST_CASE("cli: decimate, verify and subdivide") {
  save_obj(shapes::bumpy_sphere(3, 0.1, 3), work("bumpy.obj"));
  Run d = ns("decimate --input " + work("bumpy.obj").string() + " --target-vertices 100 --policy random100 --seed 3" +
             " --output " + work("coarse.obj").string() + " --map " + work("coarse.nsm").string());
  REQUIRE(d.code == 0);
  CHECK(load_obj(work("coarse.obj")).num_vertices() == 100);
  Run v = ns("verify-map --fine " + work("bumpy.obj").string() + " --coarse " + work("coarse.obj").string() +
             " --map " + work("coarse.nsm").string());
  CHECK(v.code == 0);
  CHECK(v.out.find("map valid") != std::string::npos);
  CHECK(ns("verify-map --fine " + work("sphere.obj").string() + " --coarse " + work("coarse.obj").string() +
           " --map " + work("coarse.nsm").string()).code == 2);

  save_checkpoint(NetworkBundle::zeros(), work("zero.nsd"));
  Run s = ns("subdivide --input " + work("coarse.obj").string() + " --checkpoint " + work("zero.nsd").string() +
             " --levels 3 --output " + work("neural.obj").string() + " --all-levels " + work("levels").string());
  CHECK(s.code == 0);
  CHECK(s.err.find("warning") != std::string::npos);
  Mesh coarse = load_obj(work("coarse.obj"));
  CHECK(load_obj(work("neural.obj")).num_faces() == 64 * coarse.num_faces());
  CHECK(load_obj(work("levels") / "level_1.obj").num_faces() == 4 * coarse.num_faces());
  Run c = ns("subdivide-classic --scheme midpoint --levels 3 --input " + work("coarse.obj").string() +
             " --output " + work("mid.obj").string());
  CHECK(c.code == 0);
  CHECK(read_text_file(work("mid.obj")) == read_text_file(work("neural.obj")));
}

TEST_CASE("cli: make-shape and compare") {
  CHECK(ns("make-shape --shape torus --output " + work("torus.obj").string()).code == 0);
  CHECK(ns("make-shape --shape teapot --output " + work("teapot.obj").string()).code == 2);
  save_obj(shapes::icosphere(1), work("ico1.obj"));
  Run r = ns("compare --coarse " + work("ico1.obj").string() + " --reference " + work("sphere.obj").string() +
             " --samples 2000 --levels 1");
  CHECK(r.code == 0);
  CHECK(r.out.find("loop") != std::string::npos);
}
