#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>
#include <set>
#include <sstream>

#include "aeronet/timeutil.hpp"
#include "aeronet/trajectory.hpp"
#include "testutil.hpp"

using namespace aeronet;

namespace {

/// Two backward trajectories, 49 hourly fixes each (48 h lag), one covariate.
std::string fixture_csv() {
  std::ostringstream out;
  out << "traj_id,receptor_region,sample_time,point_time,lon_deg,lat_deg,alt_m,"
         "cov:rain_mm\n";
  for (int traj = 0; traj < 2; ++traj) {
    const std::string id = traj == 0 ? "trj_a" : "trj_b";
    const std::string receptor = traj == 0 ? "r1" : "";
    const std::int64_t sample = timeutil::parse_iso8601_utc("2011-01-03T12:00:00Z");
    for (int i = 0; i <= 48; ++i) {
      const std::int64_t t = sample - (48 - i) * 3600;
      out << id << ',' << receptor << ",2011-01-03T12:00:00Z,"
          << timeutil::format_iso8601_utc(t) << ',' << (10.0 + 0.1 * i - traj) << ','
          << (45.0 - 0.05 * i) << ',' << (500.0 + i) << ',' << (0.25 * i) << '\n';
    }
  }
  return out.str();
}

}  // namespace

TEST_CASE("iso8601 parse and format round trip") {
  CHECK_EQ(timeutil::parse_iso8601_utc("1970-01-01T00:00:00Z"), 0);
  CHECK_EQ(timeutil::parse_iso8601_utc("2011-01-01T12:00:00Z"), 1293883200);
  CHECK_EQ(timeutil::format_iso8601_utc(1293883200), "2011-01-01T12:00:00Z");
  std::mt19937_64 rng(11);
  for (int i = 0; i < 200; ++i) {
    const auto t = static_cast<std::int64_t>(rng() % 4102444800ULL);  // < 2100
    CHECK_EQ(timeutil::parse_iso8601_utc(timeutil::format_iso8601_utc(t)), t);
  }
  CHECK_THROWS_AS(timeutil::parse_iso8601_utc("2011-01-01 12:00:00"),
                  std::invalid_argument);
  CHECK_EQ(timeutil::parse_duration_seconds("-48h"), -172800);
  CHECK_EQ(timeutil::parse_duration_seconds("90m"), 5400);
  CHECK_EQ(timeutil::parse_duration_seconds("3600"), 3600);
  CHECK_EQ(timeutil::parse_duration_seconds("2d"), 172800);
}

TEST_CASE("parse_corpus reads the 2-trajectory fixture") {
  std::istringstream in(fixture_csv());
  const traj::TrajectoryCorpus corpus = traj::parse_corpus(in);
  REQUIRE_EQ(corpus.segments.size(), 2);
  CHECK_EQ(corpus.delta_seconds, -172800);
  CHECK_EQ(corpus.covariate_names, std::vector<std::string>{"rain_mm"});

  const auto& a = corpus.segments[0];
  CHECK_EQ(a.traj_id, "trj_a");
  REQUIRE(a.receptor_region.has_value());
  CHECK_EQ(*a.receptor_region, "r1");
  CHECK_EQ(a.fixes.size(), 49);
  CHECK(a.backward());
  CHECK_EQ(a.sample_time, a.fixes.back().t);
  CHECK_EQ(a.origin.lon, a.fixes.back().p.lon);
  CHECK_FALSE(a.truncated);
  CHECK_EQ(a.covariates.at("rain_mm").size(), 49);

  const auto& b = corpus.segments[1];
  CHECK_FALSE(b.receptor_region.has_value());
}

TEST_CASE("parse_corpus error paths") {
  SUBCASE("empty data section") {
    std::istringstream in(
        "traj_id,receptor_region,sample_time,point_time,lon_deg,lat_deg,alt_m\n");
    CHECK_THROWS_AS(traj::parse_corpus(in), EmptyCorpus);
  }
  SUBCASE("duplicate timestamp") {
    std::istringstream in(
        "traj_id,receptor_region,sample_time,point_time,lon_deg,lat_deg,alt_m\n"
        "t1,,2011-01-01T00:00:00Z,2011-01-01T00:00:00Z,0,0,\n"
        "t1,,2011-01-01T00:00:00Z,2011-01-01T00:00:00Z,1,0,\n");
    CHECK_THROWS_AS(traj::parse_corpus(in), NonMonotoneTime);
  }
  SUBCASE("malformed row keeps its line number") {
    std::istringstream in(
        "traj_id,receptor_region,sample_time,point_time,lon_deg,lat_deg,alt_m\n"
        "t1,,2011-01-01T01:00:00Z,2011-01-01T00:00:00Z,0,0,\n"
        "t1,,2011-01-01T01:00:00Z,2011-01-01T01:00:00Z,not_a_number,0,\n");
    try {
      traj::parse_corpus(in);
      FAIL("expected MalformedRow");
    } catch (const MalformedRow& e) {
      CHECK_EQ(e.line, 3);
    }
  }
  SUBCASE("mixed forward and backward segments") {
    std::istringstream in(
        "traj_id,receptor_region,sample_time,point_time,lon_deg,lat_deg,alt_m\n"
        // backward: sample_time is the last fix
        "t1,,2011-01-01T01:00:00Z,2011-01-01T00:00:00Z,0,0,\n"
        "t1,,2011-01-01T01:00:00Z,2011-01-01T01:00:00Z,1,0,\n"
        // forward: sample_time is the first fix
        "t2,,2011-01-01T00:00:00Z,2011-01-01T00:00:00Z,0,0,\n"
        "t2,,2011-01-01T00:00:00Z,2011-01-01T01:00:00Z,1,0,\n");
    CHECK_THROWS_AS(traj::parse_corpus(in), MixedDeltaSign);
  }
  SUBCASE("non-contiguous trajectory rows") {
    std::istringstream in(
        "traj_id,receptor_region,sample_time,point_time,lon_deg,lat_deg,alt_m\n"
        "t1,,2011-01-01T00:00:00Z,2011-01-01T00:00:00Z,0,0,\n"
        "t2,,2011-01-01T00:00:00Z,2011-01-01T00:00:00Z,0,0,\n"
        "t1,,2011-01-01T00:00:00Z,2011-01-01T01:00:00Z,1,0,\n");
    CHECK_THROWS_AS(traj::parse_corpus(in), MalformedRow);
  }
  SUBCASE("sample_time not an endpoint") {
    std::istringstream in(
        "traj_id,receptor_region,sample_time,point_time,lon_deg,lat_deg,alt_m\n"
        "t1,,2011-01-01T01:00:00Z,2011-01-01T00:00:00Z,0,0,\n"
        "t1,,2011-01-01T01:00:00Z,2011-01-01T01:00:00Z,1,0,\n"
        "t1,,2011-01-01T01:00:00Z,2011-01-01T02:00:00Z,2,0,\n");
    CHECK_THROWS_AS(traj::parse_corpus(in), InvalidSegment);
  }
}

TEST_CASE("serialize then parse reproduces every field") {
  std::istringstream in(fixture_csv());
  const traj::TrajectoryCorpus corpus = traj::parse_corpus(in);

  std::ostringstream out;
  traj::write_corpus(corpus, out);
  std::istringstream in2(out.str());
  const traj::TrajectoryCorpus again = traj::parse_corpus(in2);

  REQUIRE_EQ(again.segments.size(), corpus.segments.size());
  CHECK_EQ(again.delta_seconds, corpus.delta_seconds);
  CHECK_EQ(again.covariate_names, corpus.covariate_names);
  for (std::size_t s = 0; s < corpus.segments.size(); ++s) {
    const auto& x = corpus.segments[s];
    const auto& y = again.segments[s];
    CHECK_EQ(x.traj_id, y.traj_id);
    CHECK_EQ(x.sample_time, y.sample_time);
    CHECK_EQ(x.receptor_region, y.receptor_region);
    REQUIRE_EQ(x.fixes.size(), y.fixes.size());
    for (std::size_t i = 0; i < x.fixes.size(); ++i) {
      CHECK_EQ(x.fixes[i].t, y.fixes[i].t);
      CHECK_EQ(x.fixes[i].p.lon, y.fixes[i].p.lon);
      CHECK_EQ(x.fixes[i].p.lat, y.fixes[i].p.lat);
      CHECK_EQ(x.fixes[i].p.alt, y.fixes[i].p.alt);
    }
    CHECK(x.covariates == y.covariates);
  }
}

TEST_CASE("round trip preserves awkward doubles bit-exactly") {
  traj::TrajectorySegment seg = testutil::make_segment(
      "t1", {{0, 0.1, 0.2}, {3600, 1.0 / 3.0, -0.30000000000000004}});
  seg.fixes[0].p.alt = 0.1 + 0.2;  // 0.30000000000000004
  seg.covariates["x"] = {1e-300, 3.141592653589793};
  traj::TrajectoryCorpus corpus = traj::make_corpus({seg});
  std::ostringstream out;
  traj::write_corpus(corpus, out);
  std::istringstream in(out.str());
  const traj::TrajectoryCorpus again = traj::parse_corpus(in);
  CHECK_EQ(again.segments[0].fixes[1].p.lon, 1.0 / 3.0);
  CHECK_EQ(again.segments[0].fixes[1].p.lat, -0.30000000000000004);
  CHECK_EQ(again.segments[0].fixes[0].p.alt, 0.1 + 0.2);
  CHECK_EQ(again.segments[0].covariates.at("x")[0], 1e-300);
}

TEST_CASE("windowing by temporal context") {
  auto seg_at = [](const std::string& id, const char* iso) {
    auto seg = testutil::make_segment(id, {{0, 0.0, 0.0}, {3600, 1.0, 0.0}});
    const std::int64_t t = timeutil::parse_iso8601_utc(iso);
    seg.fixes[0].t = t - 3600;
    seg.fixes[1].t = t;
    seg.sample_time = t;
    return seg;
  };
  const traj::TrajectoryCorpus corpus =
      traj::make_corpus({seg_at("a", "2011-01-15T12:00:00Z"),
                         seg_at("b", "2012-06-01T12:00:00Z"),
                         seg_at("c", "2013-01-02T12:00:00Z")});

  SUBCASE("yearly") {
    const auto windows = traj::window_corpus(corpus, traj::WindowContext::yearly);
    REQUIRE_EQ(windows.size(), 3);
    CHECK(windows.count("2011"));
    CHECK(windows.count("2012"));
    CHECK(windows.count("2013"));
    CHECK_EQ(windows.at("2011").segments.size(), 1);
  }
  SUBCASE("monthly pooled across years") {
    const auto windows =
        traj::window_corpus(corpus, traj::WindowContext::monthly_pooled);
    REQUIRE_EQ(windows.size(), 2);
    // January 2011 and January 2013 pool into window "01"
    CHECK_EQ(windows.at("01").segments.size(), 2);
    CHECK_EQ(windows.at("06").segments.size(), 1);
  }
  SUBCASE("whole period") {
    const auto windows = traj::window_corpus(corpus, traj::WindowContext::whole);
    REQUIRE_EQ(windows.size(), 1);
    CHECK_EQ(windows.at("all").segments.size(), 3);
  }
  SUBCASE("windows partition the corpus") {
    for (auto context : {traj::WindowContext::whole, traj::WindowContext::yearly,
                         traj::WindowContext::monthly_pooled}) {
      const auto windows = traj::window_corpus(corpus, context);
      std::set<std::string> ids;
      std::size_t total = 0;
      for (const auto& [key, w] : windows) {
        total += w.segments.size();
        for (const auto& seg : w.segments) CHECK(ids.insert(seg.traj_id).second);
        CHECK_EQ(w.delta_seconds, corpus.delta_seconds);
      }
      CHECK_EQ(total, corpus.segments.size());
    }
  }
}

TEST_CASE("short segments are kept but flagged truncated") {
  auto full = testutil::make_segment(
      "full", {{0, 0, 0}, {3600, 1, 0}, {7200, 2, 0}, {10800, 3, 0}});
  auto cut = testutil::make_segment("cut", {{7200, 0, 0}, {10800, 1, 0}});
  const traj::TrajectoryCorpus corpus = traj::make_corpus({full, cut});
  CHECK_EQ(corpus.delta_seconds, -10800);
  CHECK_FALSE(corpus.segments[0].truncated);
  CHECK(corpus.segments[1].truncated);
}

TEST_CASE("tdump conversion maps fields onto TrajCsvV1") {
  const auto dir = testutil::temp_dir("tdump");
  const auto path = dir / "sample.tdump";
  testutil::write_file(path,
                       "     1     1\n"
                       "    GDAS    11     1     1     0     0\n"
                       "     2 BACKWARD  OMEGA\n"
                       "    11     1     2    12   45.00    5.00   500.0\n"
                       "    11     1     2    12   44.00    6.00   500.0\n"
                       "     1 PRESSURE\n"
                       "     1     1    11     1     2    12     0     0    0.0   "
                       "45.000    5.000   500.0   950.0\n"
                       "     2     1    11     1     2    12     0     0    0.0   "
                       "44.000    6.000   500.0   940.0\n"
                       "     1     1    11     1     2    11     0     0   -1.0   "
                       "45.100    5.200   520.0   948.0\n"
                       "     2     1    11     1     2    11     0     0   -1.0   "
                       "44.100    6.200   530.0   938.0\n"
                       "     1     1    11     1     2    10     0     0   -2.0   "
                       "45.200    5.400   540.0   946.0\n"
                       "     2     1    11     1     2    10     0     0   -2.0   "
                       "44.200    6.400   560.0   936.0\n");
  const traj::TrajectoryCorpus corpus = traj::parse_tdump(path);
  REQUIRE_EQ(corpus.segments.size(), 2);
  CHECK_EQ(corpus.delta_seconds, -7200);
  const auto& seg = corpus.segments[0];
  CHECK_EQ(seg.fixes.size(), 3);
  CHECK(seg.backward());
  CHECK_EQ(seg.sample_time, timeutil::parse_iso8601_utc("2011-01-02T12:00:00Z"));
  CHECK_EQ(seg.fixes.front().t, timeutil::parse_iso8601_utc("2011-01-02T10:00:00Z"));
  CHECK_EQ(seg.fixes.back().p.lat, 45.0);
  CHECK_EQ(seg.covariates.at("pressure").back(), 950.0);
  CHECK_EQ(seg.covariates.at("pressure").front(), 946.0);
}
