#include "ugs/venue_ingest.hpp"

#include "httplib.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <ostream>
#include <thread>
#include <unordered_set>

#include "ugs/csv.hpp"
#include "ugs/errors.hpp"

namespace ugs {

namespace {

using nlohmann::json;

// API version date sent with every live request.
constexpr const char* kApiVersion = "20201201";

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::string format_radius(double radius) {
  char buf[32];
  if (radius == std::floor(radius))
    std::snprintf(buf, sizeof buf, "%.0f", radius);
  else
    std::snprintf(buf, sizeof buf, "%g", radius);
  return buf;
}

void check_meta(const json& body, const std::string& context) {
  if (!body.is_object()) throw BackendError(context + ": malformed response body");
  if (auto meta = body.find("meta"); meta != body.end() && meta->contains("code")) {
    const auto& code = (*meta)["code"];
    if (!code.is_number_integer()) throw BackendError(context + ": malformed response meta");
    if (code.get<int>() != 200)
      throw BackendError(context + ": API error code " + std::to_string(code.get<int>()));
  }
}

class FixtureBackend final : public VenueBackend {
 public:
  explicit FixtureBackend(json document) : doc_(std::move(document)) {
    if (!doc_.is_object() || !doc_.contains("searches") || !doc_.contains("likes") ||
        !doc_["searches"].is_object() || !doc_["likes"].is_object())
      throw ConfigError("fixture must be a JSON object with 'searches' and 'likes' maps");
  }

  json search(const VenueSearchQuery& q) override {
    const std::string key = fixture_key(q);
    const auto& searches = doc_["searches"];
    auto it = searches.find(key);
    if (it == searches.end()) throw BackendError("fixture miss for search " + key);
    return *it;
  }

  json likes(const std::string& venue_id) override {
    const auto& likes = doc_["likes"];
    auto it = likes.find(venue_id);
    if (it == likes.end()) throw BackendError("venue not found: " + venue_id);
    return *it;
  }

 private:
  json doc_;
};

class LiveBackend final : public VenueBackend {
 public:
  LiveBackend(std::string base_url, Credentials credentials, std::chrono::milliseconds min_interval)
      : client_(base_url), credentials_(std::move(credentials)), min_interval_(min_interval) {
    client_.set_connection_timeout(10);
    client_.set_read_timeout(30);
  }

  json search(const VenueSearchQuery& q) override {
    httplib::Params params = auth_params();
    char ll[64];
    std::snprintf(ll, sizeof ll, "%.6f,%.6f", q.latitude, q.longitude);
    params.emplace("ll", ll);
    params.emplace("radius", format_radius(q.radius_m));
    params.emplace("query", q.query);
    if (q.limit) params.emplace("limit", std::to_string(*q.limit));
    return get("/v2/venues/search", params, "search " + fixture_key(q));
  }

  json likes(const std::string& venue_id) override {
    return get("/v2/venues/" + venue_id + "/likes", auth_params(), "likes " + venue_id, true);
  }

 private:
  httplib::Params auth_params() const {
    return {{"client_id", credentials_.client_id},
            {"client_secret", credentials_.client_secret},
            {"v", kApiVersion}};
  }

  void throttle() {
    const auto now = std::chrono::steady_clock::now();
    if (last_request_) {
      const auto ready = *last_request_ + min_interval_;
      if (now < ready) std::this_thread::sleep_for(ready - now);
    }
    last_request_ = std::chrono::steady_clock::now();
  }

  json get(const std::string& path, const httplib::Params& params, const std::string& context,
           bool not_found_is_unknown_venue = false) {
    throttle();
    auto res = client_.Get(path, params, httplib::Headers{});
    if (!res) throw BackendError(context + ": transport failure: " + httplib::to_string(res.error()));
    if (not_found_is_unknown_venue && (res->status == 400 || res->status == 404))
      throw BackendError("venue not found: " + context.substr(context.find(' ') + 1));
    if (res->status != 200)
      throw BackendError(context + ": HTTP status " + std::to_string(res->status));
    try {
      return json::parse(res->body);
    } catch (const json::parse_error&) {
      throw BackendError(context + ": malformed response body");
    }
  }

  httplib::Client client_;
  Credentials credentials_;
  std::chrono::milliseconds min_interval_;
  std::optional<std::chrono::steady_clock::time_point> last_request_;
};

bool matches_query(const json& venue, const std::string& query_lower) {
  if (query_lower.empty()) return true;
  if (auto name = venue.find("name"); name != venue.end() && name->is_string() &&
                                      lower(name->get<std::string>()).find(query_lower) != std::string::npos)
    return true;
  if (auto cats = venue.find("categories"); cats != venue.end() && cats->is_array()) {
    for (const auto& c : *cats) {
      if (c.is_object() && c.contains("name") && c["name"].is_string() &&
          lower(c["name"].get<std::string>()).find(query_lower) != std::string::npos)
        return true;
    }
  }
  return false;
}

}  // namespace

std::string fixture_key(const VenueSearchQuery& q) {
  char buf[96];
  // Rounding first and adding 0.0 folds -0.0000 into 0.0000.
  const auto r4 = [](double x) { return std::round(x * 1e4) / 1e4 + 0.0; };
  std::snprintf(buf, sizeof buf, "%.4f,%.4f,", r4(q.latitude), r4(q.longitude));
  return std::string(buf) + format_radius(q.radius_m) + "," + lower(q.query);
}

std::optional<Credentials> Credentials::from_environment() {
  const char* id = std::getenv("VENUE_CLIENT_ID");
  const char* secret = std::getenv("VENUE_CLIENT_SECRET");
  if (!id || !secret || !*id || !*secret) return std::nullopt;
  return Credentials{id, secret};
}

VenueApiClient VenueApiClient::fixture(const std::filesystem::path& fixture_path) {
  std::ifstream in(fixture_path);
  if (!in) throw ConfigError("cannot open fixture " + fixture_path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("fixture " + fixture_path.string() + " is not valid JSON: " + e.what());
  }
  return fixture(std::move(doc));
}

VenueApiClient VenueApiClient::fixture(json document) {
  return VenueApiClient(Mode::Fixture, std::make_unique<FixtureBackend>(std::move(document)));
}

VenueApiClient VenueApiClient::live(std::string base_url, std::optional<Credentials> credentials,
                                    std::chrono::milliseconds min_interval) {
  if (!credentials || credentials->client_id.empty() || credentials->client_secret.empty())
    throw ConfigError("live venue API requires VENUE_CLIENT_ID and VENUE_CLIENT_SECRET");
  if (base_url.empty()) throw ConfigError("live venue API requires a base URL");
  return VenueApiClient(Mode::Live, std::make_unique<LiveBackend>(std::move(base_url), std::move(*credentials),
                                                                  min_interval));
}

std::vector<Venue> search_venues(const District& district, double radius_m, VenueApiClient& client,
                                 const std::string& query, std::optional<int> limit) {
  if (!(radius_m > 0.0)) throw std::invalid_argument("radius must be positive");
  if (limit && *limit < 1) throw std::invalid_argument("limit must be positive");
  VenueSearchQuery q{district.latitude, district.longitude, radius_m, query, limit};
  const json body = client.search(q);
  const std::string context = "search " + district.name;
  check_meta(body, context);
  const auto response = body.find("response");
  if (response == body.end() || !response->is_object() || !response->contains("venues") ||
      !(*response)["venues"].is_array())
    throw BackendError(context + ": malformed response body");

  const std::string query_lower = lower(query);
  std::vector<Venue> out;
  for (const auto& v : (*response)["venues"]) {
    if (!v.is_object() || !v.contains("id") || !v["id"].is_string() || !v.contains("name") ||
        !v["name"].is_string())
      throw BackendError(context + ": malformed venue entry");
    if (!matches_query(v, query_lower)) continue;
    out.push_back(Venue{v["id"].get<std::string>(), v["name"].get<std::string>(), district.name, 0});
  }
  out = dedupe_venues(std::move(out));
  // Recorded responses ignore the limit, so it is applied here as well.
  if (limit && out.size() > static_cast<std::size_t>(*limit)) out.resize(static_cast<std::size_t>(*limit));
  return out;
}

long long fetch_likes(const std::string& venue_id, VenueApiClient& client) {
  const json body = client.likes(venue_id);
  const std::string context = "likes " + venue_id;
  check_meta(body, context);
  const auto response = body.find("response");
  if (response == body.end() || !response->is_object() || !response->contains("likes"))
    throw BackendError(context + ": malformed response body");
  const auto& likes = (*response)["likes"];
  if (!likes.is_object() || !likes.contains("count") || !likes["count"].is_number_integer())
    throw BackendError(context + ": malformed response body");
  const auto count = likes["count"].get<long long>();
  if (count < 0) throw BackendError(context + ": negative like count");
  return count;
}

std::vector<Venue> dedupe_venues(std::vector<Venue> venues) {
  std::unordered_set<std::string> seen;
  std::vector<Venue> out;
  out.reserve(venues.size());
  for (auto& v : venues)
    if (seen.insert(v.id).second) out.push_back(std::move(v));
  return out;
}

PopularityRanking aggregate_popularity(const std::vector<Venue>& venues, PopularityMeasure measure) {
  std::map<std::string, PopularityEntry> by_district;
  for (const auto& v : venues) {
    auto& e = by_district[v.district];
    e.district = v.district;
    e.total_likes += v.likes;
    ++e.venue_count;
  }
  PopularityRanking ranking;
  for (auto& [_, e] : by_district) ranking.entries.push_back(e);
  // Entries arrive name-ascending from the map, so a stable sort keeps the tie-break.
  std::stable_sort(ranking.entries.begin(), ranking.entries.end(),
                   [measure](const PopularityEntry& a, const PopularityEntry& b) {
                     if (measure == PopularityMeasure::Sum) return a.total_likes > b.total_likes;
                     return a.mean_likes() > b.mean_likes();
                   });
  return ranking;
}

IngestResult ingest_venues(const std::vector<District>& districts, VenueApiClient& client,
                           const IngestOptions& options) {
  IngestResult result;
  std::vector<Venue> found;
  for (const auto& d : districts) {
    try {
      auto venues = search_venues(d, options.radius_m, client, options.query, options.limit);
      found.insert(found.end(), std::make_move_iterator(venues.begin()),
                   std::make_move_iterator(venues.end()));
    } catch (const BackendError& e) {
      result.failed_districts.push_back(d.name + ": " + e.what());
    }
  }
  result.venues = dedupe_venues(std::move(found));
  for (auto& v : result.venues) v.likes = fetch_likes(v.id, client);
  result.ranking = aggregate_popularity(result.venues, options.measure);
  return result;
}

void write_venues_csv(std::ostream& out, const std::vector<Venue>& venues) {
  out << "id,name,district,likes\n";
  for (const auto& v : venues)
    out << csv::join({v.id, v.name, v.district, std::to_string(v.likes)}) << '\n';
}

void write_ranking_csv(std::ostream& out, const PopularityRanking& ranking, PopularityMeasure measure) {
  out << "district,total_likes,venue_count";
  if (measure == PopularityMeasure::MeanPerVenue) out << ",mean_likes";
  out << '\n';
  for (const auto& e : ranking.entries) {
    out << csv::join({e.district, std::to_string(e.total_likes), std::to_string(e.venue_count)});
    if (measure == PopularityMeasure::MeanPerVenue) {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.3f", e.mean_likes());
      out << ',' << buf;
    }
    out << '\n';
  }
}

}  // namespace ugs
