#include "nsub/text_io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "nsub/error.hpp"

namespace nsub {

std::string format_double(double value) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  if (ec != std::errc()) throw Error("cannot format floating-point value");
  return std::string(buf, end);
}

double parse_double(std::string_view token) {
  double value = 0.0;
  auto [end, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc() || end != token.data() + token.size()) {
    throw ParseError("invalid number '" + std::string(token) + "'");
  }
  return value;
}

long long parse_int(std::string_view token) {
  long long value = 0;
  auto [end, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc() || end != token.data() + token.size()) {
    throw ParseError("invalid integer '" + std::string(token) + "'");
  }
  return value;
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
  if (path.empty()) throw IoError("empty output path");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << content;
  out.close();
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

TokenReader::TokenReader(std::string text, std::string source)
    : text_(std::move(text)), source_(std::move(source)) {}

void TokenReader::skip_space() {
  while (pos_ < text_.size()) {
    char c = text_[pos_];
    if (c == '\n') {
      ++line_;
    } else if (c != ' ' && c != '\t' && c != '\r') {
      break;
    }
    ++pos_;
  }
}

bool TokenReader::at_end() {
  skip_space();
  return pos_ >= text_.size();
}

std::string_view TokenReader::next() {
  skip_space();
  if (pos_ >= text_.size()) fail("unexpected end of file");
  size_t start = pos_;
  while (pos_ < text_.size() && text_[pos_] != ' ' && text_[pos_] != '\t' &&
         text_[pos_] != '\r' && text_[pos_] != '\n') {
    ++pos_;
  }
  return std::string_view(text_).substr(start, pos_ - start);
}

void TokenReader::expect(std::string_view keyword) {
  std::string_view tok = next();
  if (tok != keyword) {
    fail("expected '" + std::string(keyword) + "', found '" + std::string(tok) + "'");
  }
}

double TokenReader::next_double() {
  std::string_view tok = next();
  try {
    return parse_double(tok);
  } catch (const ParseError& e) {
    fail(e.what());
  }
}

long long TokenReader::next_int() {
  std::string_view tok = next();
  try {
    return parse_int(tok);
  } catch (const ParseError& e) {
    fail(e.what());
  }
}

int TokenReader::next_int(long long lo, long long hi) {
  long long v = next_int();
  if (v < lo || v > hi) {
    fail("value " + std::to_string(v) + " outside [" + std::to_string(lo) + ", " +
         std::to_string(hi) + "]");
  }
  return static_cast<int>(v);
}

void TokenReader::fail(const std::string& what) const {
  throw ParseError(source_ + ":" + std::to_string(line_) + ": " + what);
}

}  // namespace nsub
