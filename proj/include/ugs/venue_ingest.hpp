#pragma once

#include <chrono>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "ugs/corpus.hpp"

namespace ugs {

struct VenueSearchQuery {
  double latitude = 0.0;
  double longitude = 0.0;
  double radius_m = 1200.0;
  std::string query = "park";
  std::optional<int> limit;
};

// Canonical lookup key shared by the fixture format and tests:
// "<lat %.4f>,<lon %.4f>,<radius>,<query>".
std::string fixture_key(const VenueSearchQuery& q);

// Source of raw response bodies in the venue-search API's JSON shape.
class VenueBackend {
 public:
  virtual ~VenueBackend() = default;
  virtual nlohmann::json search(const VenueSearchQuery& q) = 0;
  virtual nlohmann::json likes(const std::string& venue_id) = 0;
};

struct Credentials {
  std::string client_id;
  std::string client_secret;

  // Reads VENUE_CLIENT_ID / VENUE_CLIENT_SECRET; nullopt when either is unset or empty.
  static std::optional<Credentials> from_environment();
};

class VenueApiClient {
 public:
  enum class Mode { Fixture, Live };

  // Replays canned responses from a JSON document with "searches" and "likes"
  // maps. Never touches the network.
  static VenueApiClient fixture(const std::filesystem::path& fixture_path);
  static VenueApiClient fixture(nlohmann::json document);

  // Userless-auth client. Throws ConfigError if either credential is empty,
  // before any request is made. `min_interval` is enforced between requests.
  static VenueApiClient live(std::string base_url, std::optional<Credentials> credentials,
                             std::chrono::milliseconds min_interval = std::chrono::milliseconds{500});

  Mode mode() const { return mode_; }

  nlohmann::json search(const VenueSearchQuery& q) { return backend_->search(q); }
  nlohmann::json likes(const std::string& venue_id) { return backend_->likes(venue_id); }

 private:
  VenueApiClient(Mode mode, std::unique_ptr<VenueBackend> backend)
      : mode_(mode), backend_(std::move(backend)) {}

  Mode mode_;
  std::unique_ptr<VenueBackend> backend_;
};

// Venues near the district whose name or a category name contains the
// query (case-insensitive), tagged with the district name. Like counts are
// left at zero; see fetch_likes.
std::vector<Venue> search_venues(const District& district, double radius_m, VenueApiClient& client,
                                 const std::string& query = "park", std::optional<int> limit = {});

long long fetch_likes(const std::string& venue_id, VenueApiClient& client);

// Drops venues whose id was already seen, keeping the first occurrence.
std::vector<Venue> dedupe_venues(std::vector<Venue> venues);

struct PopularityEntry {
  std::string district;
  long long total_likes = 0;
  std::size_t venue_count = 0;

  double mean_likes() const {
    return venue_count ? static_cast<double>(total_likes) / static_cast<double>(venue_count) : 0.0;
  }
  bool operator==(const PopularityEntry&) const = default;
};

enum class PopularityMeasure { Sum, MeanPerVenue };

struct PopularityRanking {
  std::vector<PopularityEntry> entries;
  bool operator==(const PopularityRanking&) const = default;
};

// Per-district totals sorted by the measure descending, district name
// ascending on ties.
PopularityRanking aggregate_popularity(const std::vector<Venue>& venues,
                                       PopularityMeasure measure = PopularityMeasure::Sum);

struct IngestResult {
  std::vector<Venue> venues;
  PopularityRanking ranking;
  std::vector<std::string> failed_districts;  // "<district>: <reason>"
};

struct IngestOptions {
  double radius_m = 1200.0;
  std::string query = "park";
  std::optional<int> limit;
  PopularityMeasure measure = PopularityMeasure::Sum;
};

// Sequential search per district, then likes per venue. District failures
// are collected rather than thrown so the caller can report partial output.
IngestResult ingest_venues(const std::vector<District>& districts, VenueApiClient& client,
                           const IngestOptions& options = {});

void write_venues_csv(std::ostream& out, const std::vector<Venue>& venues);
void write_ranking_csv(std::ostream& out, const PopularityRanking& ranking,
                       PopularityMeasure measure = PopularityMeasure::Sum);

}  // namespace ugs
