#include "reviewgraph/resources.hpp"

#include <fstream>
#include <sstream>

#include "reviewgraph/common.hpp"

namespace reviewgraph {

namespace detail {
std::string_view embedded_resource(std::string_view name);
}

std::string read_resource(std::string_view name, const std::filesystem::path& override_dir) {
  if (!override_dir.empty()) {
    const auto path = override_dir / std::string(name);
    if (std::filesystem::exists(path)) {
      std::ifstream in(path, std::ios::binary);
      if (!in) throw IoError("cannot read resource " + path.string());
      std::ostringstream buffer;
      buffer << in.rdbuf();
      return buffer.str();
    }
  }
  auto text = detail::embedded_resource(name);
  if (text.empty()) throw InputError("unknown resource '" + std::string(name) + "'");
  return std::string(text);
}

std::vector<std::string> resource_lines(std::string_view text) {
  std::vector<std::string> lines;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    auto line = text.substr(start, end - start);
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.remove_suffix(1);
    while (!line.empty() && line.front() == ' ') line.remove_prefix(1);
    if (!line.empty() && line.front() != '#') lines.emplace_back(line);
    start = end + 1;
  }
  return lines;
}

std::unordered_set<std::string> parse_word_set(std::string_view text) {
  std::unordered_set<std::string> words;
  for (auto& line : resource_lines(text)) words.insert(std::move(line));
  return words;
}

std::vector<std::pair<std::string, std::string>> parse_tsv_pairs(std::string_view text) {
  std::vector<std::pair<std::string, std::string>> rows;
  for (const auto& line : resource_lines(text)) {
    auto tab = line.find('\t');
    if (tab == std::string::npos) throw InputError("resource line without tab: '" + line + "'");
    rows.emplace_back(line.substr(0, tab), line.substr(tab + 1));
  }
  return rows;
}

}  // namespace reviewgraph
