#include "nsub/network.hpp"

#include <cmath>
#include <random>

#include "nsub/error.hpp"
#include "nsub/text_io.hpp"

namespace nsub {

namespace {

constexpr const char* kModuleNames[3] = {"I", "V", "E"};
constexpr const char* kBlockNames[6] = {"W1", "b1", "W2", "b2", "W3", "b3"};

MLPParams& module(NetworkBundle& b, int m) {
  return m == 0 ? b.init : (m == 1 ? b.vertex : b.edge);
}
const MLPParams& module(const NetworkBundle& b, int m) {
  return m == 0 ? b.init : (m == 1 ? b.vertex : b.edge);
}

}  // namespace

NetworkBundle NetworkBundle::zeros() {
  NetworkBundle b;
  b.init = MLPParams::zeros(kInitInputDim, kHiddenDim, kFeatureDim);
  b.vertex = MLPParams::zeros(kStepInputDim, kHiddenDim, kFeatureDim);
  b.edge = MLPParams::zeros(kStepInputDim, kHiddenDim, kFeatureDim);
  return b;
}

NetworkBundle NetworkBundle::random(std::uint64_t seed) {
  NetworkBundle b = zeros();
  std::mt19937_64 rng(seed);
  xavier_init(b.init, rng);
  xavier_init(b.vertex, rng);
  xavier_init(b.edge, rng);
  return b;
}

int NetworkBundle::num_parameters() const {
  return init.num_parameters() + vertex.num_parameters() + edge.num_parameters();
}

bool NetworkBundle::all_finite() const {
  return init.all_finite() && vertex.all_finite() && edge.all_finite() &&
         std::isfinite(normalization.scale) && normalization.translation.allFinite();
}

NetworkBundle NetworkBundle::zeros_like() const {
  NetworkBundle b;
  b.init = init.zeros_like();
  b.vertex = vertex.zeros_like();
  b.edge = edge.zeros_like();
  b.trained_levels = trained_levels;
  b.normalization = normalization;
  return b;
}

void NetworkBundle::set_zero() {
  init.set_zero();
  vertex.set_zero();
  edge.set_zero();
}

std::string format_checkpoint(const NetworkBundle& bundle) {
  std::string out = "NSD 1\n";
  for (int m = 0; m < 3; ++m) {
    const MLPParams& p = module(bundle, m);
    out += std::string("module ") + kModuleNames[m] + ' ' + std::to_string(p.input_dim()) + ' ' +
           std::to_string(p.hidden_dim()) + ' ' + std::to_string(p.output_dim()) + '\n';
  }
  out += "levels " + std::to_string(bundle.trained_levels) + '\n';
  const Similarity& s = bundle.normalization;
  out += "normalization " + format_double(s.scale) + ' ' + format_double(s.translation.x()) + ' ' +
         format_double(s.translation.y()) + ' ' + format_double(s.translation.z()) + '\n';
  for (int m = 0; m < 3; ++m) {
    const MLPParams& p = module(bundle, m);
    for (int l = 0; l < 3; ++l) {
      const Eigen::MatrixXd& w = p.weights[l];
      out += std::string("matrix ") + kModuleNames[m] + '.' + kBlockNames[2 * l] + ' ' +
             std::to_string(w.rows()) + ' ' + std::to_string(w.cols()) + '\n';
      for (Eigen::Index r = 0; r < w.rows(); ++r) {
        for (Eigen::Index c = 0; c < w.cols(); ++c) {
          if (c) out += ' ';
          out += format_double(w(r, c));
        }
        out += '\n';
      }
      const Eigen::VectorXd& b = p.biases[l];
      out += std::string("matrix ") + kModuleNames[m] + '.' + kBlockNames[2 * l + 1] + ' ' +
             std::to_string(b.size()) + " 1\n";
      for (Eigen::Index r = 0; r < b.size(); ++r) out += format_double(b(r)) + '\n';
    }
  }
  out += "end\n";
  return out;
}

NetworkBundle parse_checkpoint(const std::string& text) {
  TokenReader in(text, "checkpoint");
  in.expect("NSD");
  if (in.next_int() != 1) in.fail("unsupported checkpoint version");
  NetworkBundle bundle = NetworkBundle::zeros();
  for (int m = 0; m < 3; ++m) {
    const MLPParams& p = module(bundle, m);
    in.expect("module");
    in.expect(kModuleNames[m]);
    int a = in.next_int(0, 1 << 20), b = in.next_int(0, 1 << 20), c = in.next_int(0, 1 << 20);
    if (a != p.input_dim() || b != p.hidden_dim() || c != p.output_dim()) {
      in.fail(std::string("module ") + kModuleNames[m] + " has dimensions " + std::to_string(a) +
              "/" + std::to_string(b) + "/" + std::to_string(c) + ", expected " +
              std::to_string(p.input_dim()) + "/" + std::to_string(p.hidden_dim()) + "/" +
              std::to_string(p.output_dim()));
    }
  }
  in.expect("levels");
  bundle.trained_levels = in.next_int(1, 16);
  in.expect("normalization");
  bundle.normalization.scale = in.next_double();
  for (int i = 0; i < 3; ++i) bundle.normalization.translation[i] = in.next_double();
  if (!(bundle.normalization.scale > 0.0)) in.fail("normalization scale must be positive");
  for (int m = 0; m < 3; ++m) {
    MLPParams& p = module(bundle, m);
    for (int blk = 0; blk < 6; ++blk) {
      in.expect("matrix");
      in.expect(std::string(kModuleNames[m]) + '.' + kBlockNames[blk]);
      int l = blk / 2;
      bool is_bias = blk % 2 == 1;
      long long rows = in.next_int(), cols = in.next_int();
      long long want_rows = is_bias ? p.biases[l].size() : p.weights[l].rows();
      long long want_cols = is_bias ? 1 : p.weights[l].cols();
      if (rows != want_rows || cols != want_cols) in.fail("matrix has the wrong shape");
      for (long long r = 0; r < rows; ++r) {
        for (long long c = 0; c < cols; ++c) {
          double v = in.next_double();
          if (!std::isfinite(v)) in.fail("non-finite parameter");
          if (is_bias) {
            p.biases[l](r) = v;
          } else {
            p.weights[l](r, c) = v;
          }
        }
      }
    }
  }
  in.expect("end");
  if (!in.at_end()) in.fail("trailing data after 'end'");
  return bundle;
}

void save_checkpoint(const NetworkBundle& bundle, const std::filesystem::path& path) {
  write_text_file(path, format_checkpoint(bundle));
}

NetworkBundle load_checkpoint(const std::filesystem::path& path) {
  return parse_checkpoint(read_text_file(path));
}

}  // namespace nsub
