#pragma once

#include <cstddef>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "ssm/ifs.hpp"

namespace ssm {

// Unreadable or malformed spec file. line/column are 1-based and point at the
// last character of the offending token; 0 when the problem is structural
// rather than syntactic.
class SpecFileError : public std::runtime_error {
 public:
  SpecFileError(const std::string& message, std::size_t line, std::size_t column)
      : std::runtime_error(message), line_(line), column_(column) {}

  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

// {"maps": [{"r": real, "b": real, "p": real}, ...]}
std::vector<SimilitudeMap> parse_ifs_json(std::string_view text);

// Parses, validates and optionally normalizes.
IfsSpec read_ifs_file(const std::filesystem::path& path, bool normalize);

nlohmann::json to_json(const IfsSpec& spec);

// Shortest round-trip text for a double ("%.17g").
std::string format_double(double x);

}  // namespace ssm
