#include "reviewgraph/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace reviewgraph {

namespace {

std::optional<Label> parse_rating(const nlohmann::json& value) {
  double rating = 0.0;
  if (value.is_number()) {
    rating = value.get<double>();
  } else if (value.is_string()) {
    const auto& s = value.get_ref<const std::string&>();
    try {
      std::size_t used = 0;
      rating = std::stod(s, &used);
      if (used != s.size()) return std::nullopt;
    } catch (const std::exception&) {
      return std::nullopt;
    }
  } else {
    return std::nullopt;
  }
  if (!std::isfinite(rating) || rating != std::floor(rating)) return std::nullopt;
  if (rating < 1.0 || rating > 5.0) return std::nullopt;
  return static_cast<Label>(rating);
}

std::string string_field(const nlohmann::json& object, const char* key) {
  auto it = object.find(key);
  if (it == object.end() || !it->is_string()) return {};
  return it->get<std::string>();
}

}  // namespace

std::string hotel_id_from_url(std::string_view url) {
  if (auto cut = url.find_first_of("?#"); cut != std::string_view::npos) url = url.substr(0, cut);
  while (!url.empty() && url.back() == '/') url.remove_suffix(1);
  if (auto slash = url.rfind('/'); slash != std::string_view::npos) url = url.substr(slash + 1);
  if (auto dot = url.rfind('.'); dot != std::string_view::npos && dot > 0) {
    url = url.substr(0, dot);
  }
  static constexpr std::string_view kMarker = "-Reviews-";
  if (auto pos = url.find(kMarker); pos != std::string_view::npos) {
    auto rest = url.substr(pos + kMarker.size());
    return std::string(rest.substr(0, rest.find('-')));
  }
  return std::string(url);
}

LoadResult parse_reviews(std::string_view jsonl, std::size_t limit) {
  LoadResult result;
  std::size_t start = 0;
  while (start < jsonl.size()) {
    if (limit != 0 && result.reviews.size() >= limit) break;
    auto end = jsonl.find('\n', start);
    if (end == std::string_view::npos) end = jsonl.size();
    auto line = jsonl.substr(start, end - start);
    start = end + 1;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;

    auto object = nlohmann::json::parse(line, nullptr, false);
    if (object.is_discarded() || !object.is_object()) {
      ++result.skipped;
      continue;
    }
    auto rating_it = object.find("rating");
    auto rating = rating_it == object.end() ? std::nullopt : parse_rating(*rating_it);
    auto text = string_field(object, "text");
    auto hotel = hotel_id_from_url(string_field(object, "hotel_url"));
    if (!rating || text.empty() || hotel.empty()) {
      ++result.skipped;
      continue;
    }
    ReviewRecord record;
    record.review_id = result.reviews.size();
    record.hotel_id = std::move(hotel);
    record.rating = *rating;
    record.title = string_field(object, "title");
    record.text = std::move(text);
    result.reviews.push_back(std::move(record));
  }
  if (result.skipped > 0) {
    warn("skipped " + std::to_string(result.skipped) + " malformed review record(s)");
  }
  return result;
}

LoadResult load_reviews(const std::filesystem::path& path, std::size_t limit) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read reviews file " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_reviews(buffer.str(), limit);
}

CorpusStats corpus_stats(const std::vector<ReviewRecord>& reviews) {
  if (reviews.empty()) throw DomainError("corpus_stats: empty review list");
  CorpusStats stats;
  stats.n_reviews = reviews.size();
  std::set<std::string_view> hotels;
  std::vector<std::size_t> lengths;
  lengths.reserve(reviews.size());
  double rating_sum = 0.0;
  double length_sum = 0.0;
  for (const auto& review : reviews) {
    hotels.insert(review.hotel_id);
    ++stats.class_counts[review.rating];
    rating_sum += review.rating;
    lengths.push_back(utf8_length(review.text));
    length_sum += static_cast<double>(lengths.back());
  }
  const auto n = static_cast<double>(reviews.size());
  stats.n_hotels = hotels.size();
  stats.mean_rating = rating_sum / n;
  double squares = 0.0;
  for (const auto& review : reviews) {
    const double d = review.rating - stats.mean_rating;
    squares += d * d;
  }
  stats.std_rating = std::sqrt(squares / n);
  stats.mean_len_chars = length_sum / n;
  const auto middle = lengths.begin() + static_cast<std::ptrdiff_t>((lengths.size() - 1) / 2);
  std::nth_element(lengths.begin(), middle, lengths.end());
  stats.median_len_chars = static_cast<double>(*middle);
  return stats;
}

}  // namespace reviewgraph
