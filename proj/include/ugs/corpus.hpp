#pragma once

#include <chrono>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ugs {

enum class Area { Northside, Southside };

std::string_view to_string(Area area);
Area parse_area(std::string_view text);

struct District {
  std::string name;
  Area area = Area::Northside;
  double latitude = 0.0;
  double longitude = 0.0;

  bool operator==(const District&) const = default;
};

struct Venue {
  std::string id;
  std::string name;
  std::string district;
  long long likes = 0;

  bool operator==(const Venue&) const = default;
};

using Date = std::chrono::year_month_day;

// Accepts DD-MM-YYYY and YYYY-MM-DD. Returns nullopt for anything else,
// including calendar-invalid dates such as 31-02-2019.
std::optional<Date> parse_date(std::string_view text);
std::string to_iso(const Date& date);

struct Review {
  std::string title;
  std::string body;
  int rating = 0;
  std::optional<std::string> reviewer_location;
  Date date{};
  std::string venue_id;

  // Title and body joined by a single space; the unit of text downstream.
  std::string text() const;

  bool operator==(const Review&) const = default;
};

struct Corpus {
  std::vector<Review> reviews;
  std::string source_label;

  bool empty() const { return reviews.empty(); }
  std::size_t size() const { return reviews.size(); }

  bool operator==(const Corpus&) const = default;
};

// Throws DataError on a missing file, malformed row (with its 1-based line
// number), duplicate name, or out-of-range coordinate.
std::vector<District> load_districts(const std::filesystem::path& path);
std::vector<District> parse_districts(std::istream& in, const std::string& origin = "<stream>");

// JSON-Lines, one review per line; blank lines are skipped. Throws DataError
// naming the offending line, or "empty corpus" when no review is present.
Corpus load_reviews(const std::filesystem::path& path);
Corpus parse_reviews(std::istream& in, const std::string& origin = "<stream>");

// Writes the JSON-Lines form read by load_reviews, dates in ISO-8601.
void write_reviews(std::ostream& out, const Corpus& corpus);

// Keeps reviews dated within [from, to]; either bound may be absent.
Corpus filter_by_date(const Corpus& corpus, std::optional<Date> from, std::optional<Date> to);

}  // namespace ugs
