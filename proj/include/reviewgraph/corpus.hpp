#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "reviewgraph/common.hpp"

namespace reviewgraph {

/// One review from the JSON-lines dump. `review_id` is the 0-based position
/// of the record among the records that were kept.
struct ReviewRecord {
  std::size_t review_id = 0;
  std::string hotel_id;
  Label rating = 0;
  std::string title;
  std::string text;
};

struct LoadResult {
  std::vector<ReviewRecord> reviews;
  std::size_t skipped = 0;  // malformed lines and records failing validation
};

/// Reads up to `limit` valid records (0 = all) in file order. Lines that are
/// not JSON objects, or lack an integral rating in 1..5, non-empty text, or a
/// usable hotel_url are skipped and counted.
LoadResult load_reviews(const std::filesystem::path& path, std::size_t limit = 0);

/// Same parser over an in-memory JSON-lines buffer.
LoadResult parse_reviews(std::string_view jsonl, std::size_t limit = 0);

/// Hotel key derived from a TripAdvisor style hotel_url, e.g.
/// "Hotel_Review-g1-d2-Reviews-Hotel_Roma-Rome_Lazio.html" -> "Hotel_Roma".
/// Returns an empty string when nothing usable remains.
std::string hotel_id_from_url(std::string_view url);

struct CorpusStats {
  std::size_t n_reviews = 0;
  std::size_t n_hotels = 0;
  double mean_rating = 0.0;
  double std_rating = 0.0;  // population standard deviation
  double mean_len_chars = 0.0;
  double median_len_chars = 0.0;  // lower-middle element for even counts
  std::map<Label, std::size_t> class_counts;
};

/// Throws DomainError on an empty list. Lengths are counted in code points.
CorpusStats corpus_stats(const std::vector<ReviewRecord>& reviews);

}  // namespace reviewgraph
