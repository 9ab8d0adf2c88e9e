#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

namespace reviewgraph {

/// Returns the text of a bundled resource file (stopwords.txt, lexicon.tsv,
/// ...). When `override_dir` is non-empty and contains the file, it wins.
std::string read_resource(std::string_view name, const std::filesystem::path& override_dir = {});

/// Non-empty, non-comment lines of a resource, trimmed.
std::vector<std::string> resource_lines(std::string_view text);

/// Word list (one entry per line).
std::unordered_set<std::string> parse_word_set(std::string_view text);

/// Two-column tab separated table, in file order.
std::vector<std::pair<std::string, std::string>> parse_tsv_pairs(std::string_view text);

}  // namespace reviewgraph
