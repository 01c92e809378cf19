#include "ugs/corpus.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "ugs/csv.hpp"
#include "ugs/errors.hpp"

namespace ugs {

namespace {

using nlohmann::json;

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n\f\v");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n\f\v");
  return std::string(s.substr(first, last - first + 1));
}

std::optional<double> parse_double(std::string_view text) {
  const std::string t = trim(text);
  double value = 0.0;
  const auto* begin = t.data();
  const auto* end = t.data() + t.size();
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc{} || ptr != end || !std::isfinite(value)) return std::nullopt;
  return value;
}

std::optional<int> parse_digits(std::string_view text) {
  if (text.empty()) return std::nullopt;
  int value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) return std::nullopt;
  return value;
}

std::string where(const std::string& origin, std::size_t line) {
  return origin + ":" + std::to_string(line) + ": ";
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  return in;
}

}  // namespace

std::string_view to_string(Area area) {
  return area == Area::Northside ? "Northside" : "Southside";
}

Area parse_area(std::string_view text) {
  const std::string t = trim(text);
  if (t == "Northside") return Area::Northside;
  if (t == "Southside") return Area::Southside;
  throw DataError("unknown area '" + t + "'");
}

std::optional<Date> parse_date(std::string_view text) {
  const std::string t = trim(text);
  if (t.size() != 10) return std::nullopt;
  std::optional<int> y, m, d;
  if (t[2] == '-' && t[5] == '-') {
    d = parse_digits(std::string_view(t).substr(0, 2));
    m = parse_digits(std::string_view(t).substr(3, 2));
    y = parse_digits(std::string_view(t).substr(6, 4));
  } else if (t[4] == '-' && t[7] == '-') {
    y = parse_digits(std::string_view(t).substr(0, 4));
    m = parse_digits(std::string_view(t).substr(5, 2));
    d = parse_digits(std::string_view(t).substr(8, 2));
  } else {
    return std::nullopt;
  }
  if (!y || !m || !d || *m < 1 || *d < 1) return std::nullopt;
  const Date date{std::chrono::year{*y}, std::chrono::month{static_cast<unsigned>(*m)},
                  std::chrono::day{static_cast<unsigned>(*d)}};
  if (!date.ok()) return std::nullopt;
  return date;
}

std::string to_iso(const Date& date) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(date.year()),
                static_cast<unsigned>(date.month()), static_cast<unsigned>(date.day()));
  return buf;
}

std::string Review::text() const {
  if (title.empty()) return body;
  return title + " " + body;
}

std::vector<District> parse_districts(std::istream& in, const std::string& origin) {
  std::string line;
  std::size_t line_no = 0;
  bool saw_header = false;
  std::vector<District> out;
  std::set<std::string> names;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    std::vector<std::string> fields;
    try {
      fields = csv::split_record(line);
    } catch (const std::invalid_argument& e) {
      throw DataError(where(origin, line_no) + "malformed row: " + e.what());
    }
    if (!saw_header) {
      std::vector<std::string> header;
      for (const auto& f : fields) header.push_back(trim(f));
      if (header != std::vector<std::string>{"district", "area", "lat", "lon"})
        throw DataError(where(origin, line_no) + "expected header district,area,lat,lon");
      saw_header = true;
      continue;
    }
    if (fields.size() != 4)
      throw DataError(where(origin, line_no) + "malformed row: expected 4 fields, got " +
                      std::to_string(fields.size()));
    District d;
    d.name = trim(fields[0]);
    if (d.name.empty()) throw DataError(where(origin, line_no) + "malformed row: empty district name");
    try {
      d.area = parse_area(fields[1]);
    } catch (const DataError& e) {
      throw DataError(where(origin, line_no) + "malformed row: " + e.what());
    }
    const auto lat = parse_double(fields[2]);
    const auto lon = parse_double(fields[3]);
    if (!lat || !lon) throw DataError(where(origin, line_no) + "malformed row: bad coordinate");
    if (*lat < -90.0 || *lat > 90.0 || *lon < -180.0 || *lon > 180.0)
      throw DataError(where(origin, line_no) + "coordinate out of range");
    d.latitude = *lat;
    d.longitude = *lon;
    if (!names.insert(d.name).second)
      throw DataError(where(origin, line_no) + "duplicate district '" + d.name + "'");
    out.push_back(std::move(d));
  }
  if (!saw_header) throw DataError(origin + ": missing header district,area,lat,lon");
  return out;
}

std::vector<District> load_districts(const std::filesystem::path& path) {
  auto in = open_input(path);
  return parse_districts(in, path.string());
}

Corpus parse_reviews(std::istream& in, const std::string& origin) {
  Corpus corpus;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fail = [&](const std::string& what) -> DataError {
      return DataError(where(origin, line_no) + what);
    };
    json obj;
    try {
      obj = json::parse(line);
    } catch (const json::parse_error& e) {
      throw fail(std::string("malformed JSON: ") + e.what());
    }
    if (!obj.is_object()) throw fail("review must be a JSON object");

    const auto get_string = [&](const char* key, bool required) -> std::string {
      auto it = obj.find(key);
      if (it == obj.end() || it->is_null()) {
        if (required) throw fail(std::string("missing field '") + key + "'");
        return {};
      }
      if (!it->is_string()) throw fail(std::string("field '") + key + "' must be a string");
      return it->get<std::string>();
    };

    Review r;
    r.title = get_string("title", false);
    r.body = get_string("body", true);
    if (trim(r.body).empty()) throw fail("empty body");

    auto rating = obj.find("rating");
    if (rating == obj.end() || !rating->is_number_integer())
      throw fail("rating must be an integer");
    const auto value = rating->get<long long>();
    if (value < 1 || value > 5) throw fail("rating " + std::to_string(value) + " outside 1-5");
    r.rating = static_cast<int>(value);

    if (auto loc = obj.find("reviewer_location"); loc != obj.end() && !loc->is_null()) {
      if (!loc->is_string()) throw fail("field 'reviewer_location' must be a string");
      r.reviewer_location = loc->get<std::string>();
    }

    const std::string date_text = get_string("date", true);
    const auto date = parse_date(date_text);
    if (!date) throw fail("unparseable date '" + date_text + "'");
    r.date = *date;
    r.venue_id = get_string("venue_id", false);
    corpus.reviews.push_back(std::move(r));
  }
  if (corpus.reviews.empty()) throw DataError(origin + ": empty corpus");
  return corpus;
}

Corpus load_reviews(const std::filesystem::path& path) {
  auto in = open_input(path);
  Corpus corpus = parse_reviews(in, path.string());
  corpus.source_label = path.stem().string();
  return corpus;
}

void write_reviews(std::ostream& out, const Corpus& corpus) {
  for (const auto& r : corpus.reviews) {
    json obj;
    obj["title"] = r.title;
    obj["body"] = r.body;
    obj["rating"] = r.rating;
    obj["reviewer_location"] = r.reviewer_location ? json(*r.reviewer_location) : json(nullptr);
    obj["date"] = to_iso(r.date);
    obj["venue_id"] = r.venue_id;
    out << obj.dump() << '\n';
  }
}

Corpus filter_by_date(const Corpus& corpus, std::optional<Date> from, std::optional<Date> to) {
  Corpus out;
  out.source_label = corpus.source_label;
  std::copy_if(corpus.reviews.begin(), corpus.reviews.end(), std::back_inserter(out.reviews),
               [&](const Review& r) {
                 return (!from || r.date >= *from) && (!to || r.date <= *to);
               });
  return out;
}

}  // namespace ugs
