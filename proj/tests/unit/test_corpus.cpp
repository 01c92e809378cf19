#include <sstream>

#include "doctest.h"
#include "test_support.hpp"
#include "ugs/corpus.hpp"
#include "ugs/csv.hpp"
#include "ugs/errors.hpp"

using namespace ugs;
using namespace std::chrono;

TEST_SUITE("corpus") {
  TEST_CASE("district row parses into its fields") {
    std::istringstream in("district,area,lat,lon\nDublin 1,Northside,53.352488,-6.256646\n");
    const auto ds = parse_districts(in);
    REQUIRE(ds.size() == 1);
    CHECK(ds[0] == District{"Dublin 1", Area::Northside, 53.352488, -6.256646});
  }

  TEST_CASE("header-only district file is an empty list") {
    std::istringstream in("district,area,lat,lon\n");
    CHECK(parse_districts(in).empty());
  }

  TEST_CASE("district errors name the problem and line") {
    std::istringstream lat("district,area,lat,lon\nX,Southside,95.0,0\n");
    CHECK_THROWS_WITH_AS(parse_districts(lat, "d.csv"), doctest::Contains("coordinate out of range"), DataError);
    std::istringstream lon("district,area,lat,lon\nX,Southside,0,-181\n");
    CHECK_THROWS_AS(parse_districts(lon), DataError);
    std::istringstream bad("district,area,lat,lon\nA,Northside,1,2\nB,Westside,1,2\n");
    CHECK_THROWS_WITH_AS(parse_districts(bad, "d.csv"), doctest::Contains("d.csv:3"), DataError);
    std::istringstream dup("district,area,lat,lon\nA,Northside,1,2\nA,Southside,1,2\n");
    CHECK_THROWS_AS(parse_districts(dup), DataError);
    std::istringstream header("name,area,lat,lon\n");
    CHECK_THROWS_AS(parse_districts(header), DataError);
    CHECK_THROWS_AS(load_districts("/nonexistent/districts.csv"), DataError);
  }

  TEST_CASE("bundled district file loads") {
    const auto ds = load_districts(testing::data_path("districts.csv"));
    CHECK(ds.size() == 8);
    CHECK(ds[1].name == "Dublin 2");
    CHECK(ds[1].area == Area::Southside);
  }

  TEST_CASE("dates in both accepted formats") {
    CHECK(parse_date("21-11-2018") == year_month_day{year{2018}, month{11}, day{21}});
    CHECK(parse_date("2018-11-21") == year_month_day{year{2018}, month{11}, day{21}});
    CHECK_FALSE(parse_date("31-02-2019"));
    CHECK_FALSE(parse_date("2019/02/01"));
    CHECK_FALSE(parse_date(""));
    CHECK(to_iso(*parse_date("03-07-2019")) == "2019-07-03");
  }

  TEST_CASE("review line from the example table") {
    std::istringstream in(
        R"({"title":"","body":"Absolutely beautiful if you get the weather to enjoy it.","rating":5,"date":"21-11-2018","venue_id":"v1"})"
        "\n");
    const auto c = parse_reviews(in);
    REQUIRE(c.size() == 1);
    CHECK(c.reviews[0].rating == 5);
    CHECK(to_iso(c.reviews[0].date) == "2018-11-21");
    CHECK_FALSE(c.reviews[0].reviewer_location);
    CHECK(c.reviews[0].text() == "Absolutely beautiful if you get the weather to enjoy it.");
  }

  TEST_CASE("review errors") {
    std::istringstream empty("\n\n");
    CHECK_THROWS_WITH_AS(parse_reviews(empty), doctest::Contains("empty corpus"), DataError);
    std::istringstream rating(R"({"body":"ok","rating":5,"date":"2020-01-01"})"
                              "\n"
                              R"({"body":"ok","rating":6,"date":"2020-01-01"})");
    CHECK_THROWS_WITH_AS(parse_reviews(rating, "r.jsonl"), doctest::Contains("r.jsonl:2"), DataError);
    std::istringstream date(R"({"body":"ok","rating":3,"date":"yesterday"})");
    CHECK_THROWS_WITH_AS(parse_reviews(date), doctest::Contains("unparseable date"), DataError);
    std::istringstream body(R"({"body":"   ","rating":3,"date":"2020-01-01"})");
    CHECK_THROWS_WITH_AS(parse_reviews(body), doctest::Contains("empty body"), DataError);
    std::istringstream json("{not json}\n");
    CHECK_THROWS_AS(parse_reviews(json), DataError);
  }

  TEST_CASE("review round trip and order") {
    const auto c = load_reviews(testing::data_path("reviews/synthetic_two_topic.jsonl"));
    CHECK(c.source_label == "synthetic_two_topic");
    std::ostringstream out;
    write_reviews(out, c);
    std::istringstream in(out.str());
    auto back = parse_reviews(in);
    back.source_label = c.source_label;
    CHECK(back == c);
    for (const auto& r : c.reviews) CHECK((r.rating >= 1 && r.rating <= 5));
  }

  TEST_CASE("date filter keeps the closed range") {
    Corpus c;
    for (const char* d : {"2006-05-01", "2015-01-01", "2020-12-31"}) {
      Review r;
      r.body = "x";
      r.rating = 3;
      r.date = *parse_date(d);
      c.reviews.push_back(r);
    }
    CHECK(filter_by_date(c, parse_date("2015-01-01"), std::nullopt).size() == 2);
    CHECK(filter_by_date(c, std::nullopt, parse_date("2015-01-01")).size() == 2);
    CHECK(filter_by_date(c, parse_date("2016-01-01"), parse_date("2016-12-31")).size() == 0);
  }

  TEST_CASE("csv records") {
    CHECK(csv::split_record("a,\"b,c\",\"d\"\"e\"") == std::vector<std::string>{"a", "b,c", "d\"e"});
    CHECK(csv::split_record("") == std::vector<std::string>{""});
    CHECK_THROWS_AS(csv::split_record("\"open"), std::invalid_argument);
    CHECK(csv::escape("St Anne's Park & Rose Gardens") == "St Anne's Park & Rose Gardens");
    CHECK(csv::join({"a,b", "c"}) == "\"a,b\",c");
  }
}
