#include <algorithm>
#include <cstdlib>
#include <random>
#include <sstream>

#include "doctest.h"
#include "test_support.hpp"
#include "ugs/errors.hpp"
#include "ugs/venue_ingest.hpp"

using namespace ugs;
using nlohmann::json;

namespace {

VenueApiClient bundled() { return VenueApiClient::fixture(testing::data_path("fixtures/venues_fixture.json")); }

District dublin(const std::string& name) {
  for (const auto& d : load_districts(testing::data_path("districts.csv")))
    if (d.name == name) return d;
  throw std::runtime_error("no district " + name);
}

json venue(const std::string& id, const std::string& name, const std::string& category) {
  return {{"id", id}, {"name", name}, {"categories", json::array({{{"name", category}}})}};
}

json search_response(json venues) { return {{"meta", {{"code", 200}}}, {"response", {{"venues", venues}}}}; }
json likes_response(long long n) { return {{"meta", {{"code", 200}}}, {"response", {{"likes", {{"count", n}}}}}}; }

}  // namespace

TEST_SUITE("venue_ingest") {
  TEST_CASE("fixture key format") {
    VenueSearchQuery q{53.33894, -6.252713, 1200, "Park", std::nullopt};
    CHECK(fixture_key(q) == "53.3389,-6.2527,1200,park");
    q.radius_m = 750.5;
    q.latitude = -0.00001;
    CHECK(fixture_key(q) == "0.0000,-6.2527,750.5,park");
  }

  TEST_CASE("search near Dublin 2 finds St Stephen's Green") {
    auto client = bundled();
    const auto venues = search_venues(dublin("Dublin 2"), 1200, client);
    REQUIRE_FALSE(venues.empty());
    CHECK(venues[0].name == "St Stephen's Green");
    CHECK(venues[0].district == "Dublin 2");
    // The cafe in the same response is not a park.
    for (const auto& v : venues) CHECK(v.name.find("Bewley") == std::string::npos);
  }

  TEST_CASE("district without parks gives an empty list") {
    auto client = bundled();
    CHECK(search_venues(dublin("Dublin 3"), 1200, client).empty());
  }

  TEST_CASE("search respects the limit") {
    auto client = bundled();
    CHECK(search_venues(dublin("Dublin 2"), 1200, client, "park", 2).size() == 2);
  }

  TEST_CASE("like counts replay exactly") {
    auto client = bundled();
    const auto d2 = search_venues(dublin("Dublin 2"), 1200, client);
    const auto d8 = search_venues(dublin("Dublin 8"), 1200, client);
    CHECK(fetch_likes(d2[0].id, client) == 1191);
    auto phoenix = std::find_if(d8.begin(), d8.end(), [](const Venue& v) { return v.name == "Phoenix Park"; });
    REQUIRE(phoenix != d8.end());
    CHECK(fetch_likes(phoenix->id, client) == 696);
    CHECK_THROWS_WITH_AS(fetch_likes("nope", client), doctest::Contains("venue not found"), BackendError);
  }

  TEST_CASE("fixture miss and malformed bodies") {
    auto client = VenueApiClient::fixture(json{{"searches", json::object()}, {"likes", json::object()}});
    District far{"Nowhere", Area::Northside, 10, 10};
    CHECK_THROWS_WITH_AS(search_venues(far, 1200, client), doctest::Contains("fixture miss"), BackendError);

    VenueSearchQuery q{10, 10, 1200, "park", std::nullopt};
    auto broken = VenueApiClient::fixture(json{{"searches", {{fixture_key(q), {{"response", {{"venues", 3}}}}}}},
                                               {"likes", {{"v", {{"response", {{"likes", {{"count", -1}}}}}}}}}});
    CHECK_THROWS_AS(search_venues(far, 1200, broken), BackendError);
    CHECK_THROWS_AS(fetch_likes("v", broken), BackendError);
    CHECK_THROWS_AS(VenueApiClient::fixture(json::array()), ConfigError);
  }

  TEST_CASE("live mode without credentials fails before any request") {
    CHECK_THROWS_AS(VenueApiClient::live("http://127.0.0.1:9", std::nullopt), ConfigError);
    CHECK_THROWS_AS(VenueApiClient::live("http://127.0.0.1:9", Credentials{"id", ""}), ConfigError);
  }

  TEST_CASE("search rejects a non-positive radius") {
    auto client = bundled();
    CHECK_THROWS(search_venues(dublin("Dublin 2"), 0.0, client));
  }

  TEST_CASE("aggregation over the bundled parks") {
    auto client = bundled();
    const auto result = ingest_venues(load_districts(testing::data_path("districts.csv")), client);
    CHECK(result.failed_districts.empty());
    CHECK(result.venues.size() == 8);
    REQUIRE(result.ranking.entries.size() >= 2);
    CHECK(result.ranking.entries[0] == PopularityEntry{"Dublin 2", 1776, 3});
    CHECK(result.ranking.entries[1].district == "Dublin 8");
    CHECK(result.ranking.entries[1].total_likes == 696);
  }

  TEST_CASE("ties by district name, empty input, sum invariant, permutation") {
    CHECK(aggregate_popularity({}).entries.empty());
    std::vector<Venue> vs = {{"a", "A", "Dublin 6W", 48}, {"b", "B", "Dublin 1", 48}, {"c", "C", "Dublin 4", 159},
                             {"d", "D", "Dublin 4", 1}};
    const auto r = aggregate_popularity(vs);
    REQUIRE(r.entries.size() == 3);
    CHECK(r.entries[0].district == "Dublin 4");
    CHECK(r.entries[1].district == "Dublin 1");
    CHECK(r.entries[2].district == "Dublin 6W");
    long long total = 0;
    for (const auto& e : r.entries) total += e.total_likes;
    CHECK(total == 48 + 48 + 159 + 1);

    std::mt19937 g(3);
    for (int i = 0; i < 10; ++i) {
      std::shuffle(vs.begin(), vs.end(), g);
      CHECK(aggregate_popularity(vs) == r);
    }
    const auto mean = aggregate_popularity(vs, PopularityMeasure::MeanPerVenue);
    CHECK(mean.entries[0].district == "Dublin 4");
    CHECK(mean.entries[0].mean_likes() == doctest::Approx(80.0));
  }

  TEST_CASE("dedupe keeps the first district") {
    const auto out = dedupe_venues({{"x", "P", "Dublin 2", 0}, {"x", "P", "Dublin 8", 0}, {"y", "Q", "Dublin 8", 0}});
    REQUIRE(out.size() == 2);
    CHECK(out[0].district == "Dublin 2");
  }

  TEST_CASE("partial failure is collected per district") {
    const District ok{"Good", Area::Northside, 1, 1};
    const District missing{"Missing", Area::Southside, 2, 2};
    json fixture{{"searches",
                  {{fixture_key({1, 1, 1200, "park", std::nullopt}),
                    search_response(json::array({venue("p1", "Green Park", "Park")}))}}},
                 {"likes", {{"p1", likes_response(5)}}}};
    auto client = VenueApiClient::fixture(fixture);
    const auto result = ingest_venues({ok, missing}, client);
    REQUIRE(result.failed_districts.size() == 1);
    CHECK(result.failed_districts[0].rfind("Missing", 0) == 0);
    CHECK(result.ranking.entries.size() == 1);
  }

  TEST_CASE("category match is case-insensitive") {
    json fixture{{"searches",
                  {{fixture_key({1, 1, 1200, "park", std::nullopt}),
                    search_response(json::array({venue("p1", "The Green", "National PARK"), venue("p2", "Cafe", "Cafe")}))}}},
                 {"likes", json::object()}};
    auto client = VenueApiClient::fixture(fixture);
    const auto vs = search_venues({"D", Area::Northside, 1, 1}, 1200, client);
    REQUIRE(vs.size() == 1);
    CHECK(vs[0].id == "p1");
  }

  TEST_CASE("CSV writers") {
    std::ostringstream venues, ranking, mean;
    write_venues_csv(venues, {{"id1", "St Anne's Park, Rose Gardens", "Dublin 5", 94}});
    CHECK(venues.str() == "id,name,district,likes\nid1,\"St Anne's Park, Rose Gardens\",Dublin 5,94\n");
    PopularityRanking r{{{"Dublin 2", 1776, 3}}};
    write_ranking_csv(ranking, r);
    CHECK(ranking.str() == "district,total_likes,venue_count\nDublin 2,1776,3\n");
    write_ranking_csv(mean, r, PopularityMeasure::MeanPerVenue);
    CHECK(mean.str() == "district,total_likes,venue_count,mean_likes\nDublin 2,1776,3,592.000\n");
  }
}

#include <atomic>
#include <chrono>
#include <thread>

#include "httplib.h"

TEST_SUITE("venue_ingest") {
  TEST_CASE("live client against a local server") {
    httplib::Server server;
    std::atomic<int> requests{0};
    std::string seen_ll, seen_radius, seen_secret;
    std::vector<std::chrono::steady_clock::time_point> stamps;
    std::mutex mu;
    server.Get("/v2/venues/search", [&](const httplib::Request& req, httplib::Response& res) {
      std::lock_guard lock(mu);
      ++requests;
      stamps.push_back(std::chrono::steady_clock::now());
      seen_ll = req.get_param_value("ll");
      seen_radius = req.get_param_value("radius");
      seen_secret = req.get_param_value("client_secret");
      res.set_content(search_response(json::array({venue("abc", "Herbert Park", "Park")})).dump(), "application/json");
    });
    server.Get(R"(/v2/venues/(\w+)/likes)", [&](const httplib::Request& req, httplib::Response& res) {
      std::lock_guard lock(mu);
      ++requests;
      stamps.push_back(std::chrono::steady_clock::now());
      if (req.matches[1] != "abc") {
        res.status = 400;
        return;
      }
      res.set_content(likes_response(159).dump(), "application/json");
    });
    const int port = server.bind_to_any_port("127.0.0.1");
    std::thread worker([&] { server.listen_after_bind(); });
    server.wait_until_ready();

    {
      auto client = VenueApiClient::live("http://127.0.0.1:" + std::to_string(port), Credentials{"id", "secret"},
                                         std::chrono::milliseconds(50));
      CHECK(client.mode() == VenueApiClient::Mode::Live);
      const auto vs = search_venues({"Dublin 4", Area::Southside, 53.327507, -6.227486}, 1200, client);
      REQUIRE(vs.size() == 1);
      CHECK(fetch_likes(vs[0].id, client) == 159);
      CHECK_THROWS_WITH_AS(fetch_likes("zzz", client), doctest::Contains("venue not found"), BackendError);
    }
    server.stop();
    worker.join();

    CHECK(requests == 3);
    CHECK(seen_ll == "53.327507,-6.227486");
    CHECK(seen_radius == "1200");
    CHECK(seen_secret == "secret");
    REQUIRE(stamps.size() == 3);
    for (std::size_t i = 1; i < stamps.size(); ++i) CHECK(stamps[i] - stamps[i - 1] >= std::chrono::milliseconds(45));
  }

  TEST_CASE("live transport failure is a backend error") {
    auto client = VenueApiClient::live("http://127.0.0.1:1", Credentials{"id", "secret"}, std::chrono::milliseconds(0));
    CHECK_THROWS_AS(fetch_likes("abc", client), BackendError);
  }
}
