#include "ssm/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace ssm {
namespace {

std::pair<std::size_t, std::size_t> line_column(std::string_view text, std::size_t byte) {
  std::size_t line = 1;
  std::size_t column = 1;
  // nlohmann reports the byte just past the offending character.
  const std::size_t end = std::min(text.size(), byte > 0 ? byte - 1 : 0);
  for (std::size_t i = 0; i < end; ++i) {
    if (text[i] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  return {line, column};
}

double number_field(const nlohmann::json& entry, const char* key, std::size_t index) {
  const auto it = entry.find(key);
  if (it == entry.end() || !it->is_number()) {
    throw SpecFileError("maps[" + std::to_string(index) + "]: field \"" + key +
                            "\" must be a number",
                        0, 0);
  }
  return it->get<double>();
}

}  // namespace

std::vector<SimilitudeMap> parse_ifs_json(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    const auto [line, column] = line_column(text, e.byte);
    throw SpecFileError(std::string("JSON syntax error at line ") + std::to_string(line) +
                            ", column " + std::to_string(column) + ": " + e.what(),
                        line, column);
  }
  if (!doc.is_object() || !doc.contains("maps") || !doc["maps"].is_array()) {
    throw SpecFileError("spec must be an object with a \"maps\" array", 0, 0);
  }
  std::vector<SimilitudeMap> maps;
  for (std::size_t i = 0; i < doc["maps"].size(); ++i) {
    const auto& entry = doc["maps"][i];
    if (!entry.is_object()) {
      throw SpecFileError("maps[" + std::to_string(i) + "] must be an object", 0, 0);
    }
    maps.push_back({number_field(entry, "r", i), number_field(entry, "b", i),
                    number_field(entry, "p", i)});
  }
  return maps;
}

IfsSpec read_ifs_file(const std::filesystem::path& path, bool normalize) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SpecFileError("cannot open spec file " + path.string(), 0, 0);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  const auto maps = parse_ifs_json(buffer.str());
  IfsSpec spec = validate_ifs(maps);
  return normalize ? normalize_to_unit(spec) : spec;
}

nlohmann::json to_json(const IfsSpec& spec) {
  nlohmann::json maps = nlohmann::json::array();
  for (const auto& f : spec.maps()) {
    maps.push_back({{"r", f.ratio}, {"b", f.translation}, {"p", f.weight}});
  }
  return {{"maps", maps}, {"normalized", spec.normalized()}};
}

std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace ssm
