#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace nsub {

/// Shortest decimal string that parses back to exactly `value`.
std::string format_double(double value);

/// Parses a full token as a double; throws ParseError on failure.
double parse_double(std::string_view token);
long long parse_int(std::string_view token);

/// Writes `content` to `path`, throwing IoError on failure.
void write_text_file(const std::filesystem::path& path, const std::string& content);
std::string read_text_file(const std::filesystem::path& path);

/// Whitespace-separated token stream over a text buffer. Errors name the
/// line of the offending token.
class TokenReader {
 public:
  explicit TokenReader(std::string text, std::string source = "input");

  bool at_end();
  std::string_view next();
  /// Reads a token and throws ParseError unless it equals `keyword`.
  void expect(std::string_view keyword);
  double next_double();
  long long next_int();
  /// Integer in [lo, hi].
  int next_int(long long lo, long long hi);
  [[noreturn]] void fail(const std::string& what) const;

 private:
  void skip_space();
  std::string text_;
  std::string source_;
  size_t pos_ = 0;
  int line_ = 1;
};

}  // namespace nsub
