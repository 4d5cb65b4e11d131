#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <random>

#include "aeronet/flowsim.hpp"
#include "aeronet/network.hpp"
#include "testutil.hpp"

using namespace aeronet;
using conn::PointwiseMeasure;
using geo::GeoPoint;
using geo::Region;
using testutil::make_segment;
using testutil::square;

namespace {

/// Three unit cells in a west-to-east row.
geo::Partition row_partition() {
  std::vector<Region> regions;
  regions.push_back(square("w", 0.0, 0.0, 1.0));
  regions.push_back(square("m", 1.0, 0.0, 1.0));
  regions.push_back(square("e", 2.0, 0.0, 1.0));
  return geo::Partition(std::move(regions));
}

/// Backward corpus under an eastbound wind, one arrival per cell center.
traj::TrajectoryCorpus eastbound_corpus() {
  flow::CorpusSpec spec;
  spec.arrival_points = {{flow::Vec2{0.5, 0.5}, std::nullopt},
                         {flow::Vec2{1.5, 0.5}, std::nullopt},
                         {flow::Vec2{2.5, 0.5}, std::nullopt}};
  spec.arrival_times = {1293883200};
  spec.delta_seconds = -9000;                 // 2.5 h
  spec.fix_interval_seconds = 900;
  spec.step_seconds = 30.0;
  // 1 deg/h eastbound: back-trajectories reach 2.5 deg west
  return flow::generate_corpus(flow::VectorField::uniform(1.0 / 3600.0, 0.0), spec);
}

bool matrices_equal(const net::WindowedAdjacency& a, const net::WindowedAdjacency& b) {
  if (a.n() != b.n()) return false;
  for (std::size_t i = 0; i < a.n(); ++i) {
    for (std::size_t j = 0; j < a.n(); ++j) {
      if (i == j) continue;
      if (a.has_edge(i, j) != b.has_edge(i, j)) return false;
      if (a.weight(i, j) != b.weight(i, j)) return false;
    }
  }
  return true;
}

}  // namespace

TEST_CASE("eastbound wind builds a west-to-east transport chain") {
  const geo::Partition partition = row_partition();
  const traj::TrajectoryCorpus corpus = eastbound_corpus();

  net::BuildOptions options;
  options.context = traj::WindowContext::whole;
  options.direction = net::Direction::transport;
  const net::NetworkSequence seq = net::build_networks(
      corpus, partition, PointwiseMeasure::contact(), conn::EstimatorConfig{}, options);
  REQUIRE_EQ(seq.windows.size(), 1);
  const net::WindowedAdjacency& w = seq.windows.front();
  const auto idx = [&](const char* id) { return *partition.index_of(id); };

  // brute-force oracle: walk each trajectory's fixes through each region
  std::vector<std::vector<double>> contact(3, std::vector<double>(3, 0.0));
  std::vector<std::size_t> arrivals(3, 0);
  for (const auto& seg : corpus.segments) {
    const auto hits = partition.locate(seg.origin);
    REQUIRE_EQ(hits.size(), 1);
    const std::size_t receptor = hits[0];
    ++arrivals[receptor];
    for (std::size_t j = 0; j < 3; ++j) {
      if (j == receptor) continue;
      bool touched = false;
      for (const auto& fix : seg.fixes) {
        if (geo::point_in_region(fix.p, partition.at(j))) touched = true;
      }
      if (touched) contact[receptor][j] += 1.0;
    }
  }
  for (std::size_t receptor = 0; receptor < 3; ++receptor) {
    for (std::size_t j = 0; j < 3; ++j) {
      if (j == receptor) continue;
      // transport direction: edge src=j -> dst=receptor
      CHECK_EQ(w.weight(j, receptor),
               contact[receptor][j] / static_cast<double>(arrivals[receptor]));
    }
  }

  // west-to-east chain: only upwind sources feed a receptor
  CHECK_EQ(w.weight(idx("w"), idx("m")), 1.0);
  CHECK_EQ(w.weight(idx("w"), idx("e")), 1.0);
  CHECK_EQ(w.weight(idx("m"), idx("e")), 1.0);
  CHECK_EQ(w.weight(idx("m"), idx("w")), 0.0);
  CHECK_EQ(w.weight(idx("e"), idx("w")), 0.0);
  CHECK_EQ(w.weight(idx("e"), idx("m")), 0.0);
  // the eastern node receives from both upwind nodes
  CHECK_GT(w.weight(idx("w"), idx("e")) + w.weight(idx("m"), idx("e")), 1.9);

  // sampling convention is the transpose
  net::BuildOptions sampling_options = options;
  sampling_options.direction = net::Direction::sampling;
  const net::NetworkSequence s2 = net::build_networks(
      corpus, partition, PointwiseMeasure::contact(), conn::EstimatorConfig{},
      sampling_options);
  CHECK_EQ(s2.windows.front().weight(idx("e"), idx("w")), 1.0);
  CHECK_EQ(s2.windows.front().weight(idx("w"), idx("e")), 0.0);
}

TEST_CASE("single-region partition yields an empty edge set") {
  std::vector<Region> one;
  one.push_back(square("only", 0.0, 0.0, 3.0));
  const geo::Partition partition(std::move(one));
  auto seg = make_segment("t", {{0, 0.5, 0.5}, {3600, 2.5, 0.5}});
  const auto corpus = traj::make_corpus({seg});
  const net::NetworkSequence seq =
      net::build_networks(corpus, partition, PointwiseMeasure::contact(),
                          conn::EstimatorConfig{}, net::BuildOptions{});
  REQUIRE_EQ(seq.windows.size(), 1);
  CHECK_EQ(seq.windows.front().n(), 1);
}

TEST_CASE("identical segments in two windows produce identical matrices") {
  const geo::Partition partition = row_partition();
  std::vector<traj::TrajectorySegment> segments;
  for (int year = 0; year < 2; ++year) {
    const std::int64_t shift = year * 366LL * 86400;
    auto seg = make_segment("y" + std::to_string(year),
                            {{1293883200 + shift, 0.5, 0.5},
                             {1293886800 + shift, 2.5, 0.5}},
                            false);
    segments.push_back(std::move(seg));
  }
  const auto corpus = traj::make_corpus(std::move(segments));
  net::BuildOptions options;
  options.context = traj::WindowContext::yearly;
  const net::NetworkSequence seq =
      net::build_networks(corpus, partition, PointwiseMeasure::duration(),
                          conn::EstimatorConfig{}, options);
  REQUIRE_EQ(seq.windows.size(), 2);
  CHECK(matrices_equal(seq.windows[0], seq.windows[1]));
}

TEST_CASE("weights are invariant to segment input order") {
  const geo::Partition partition = row_partition();
  std::mt19937_64 rng(31337);
  std::vector<traj::TrajectorySegment> segments;
  for (int i = 0; i < 40; ++i) {
    std::vector<testutil::FixSpec> fixes;
    std::int64_t t = 1293883200;
    double lon = 3.0 * testutil::uniform01(rng);
    double lat = testutil::uniform01(rng);
    for (int k = 0; k < 6; ++k) {
      fixes.push_back({t, lon, lat});
      t += 900;
      lon += (testutil::uniform01(rng) - 0.5) * 1.4;
      lat += (testutil::uniform01(rng) - 0.5) * 0.6;
      lat = std::clamp(lat, 0.05, 0.95);
    }
    // keep the arrival inside the partition so the receptor resolves
    fixes.back().lon = std::clamp(fixes.back().lon, 0.05, 2.95);
    segments.push_back(make_segment("s" + std::to_string(i), fixes));
  }
  auto shuffled = segments;
  std::shuffle(shuffled.begin(), shuffled.end(), rng);

  const auto corpus_a = traj::make_corpus(segments);
  const auto corpus_b = traj::make_corpus(shuffled);
  const auto seq_a =
      net::build_networks(corpus_a, partition, PointwiseMeasure::duration(),
                          conn::EstimatorConfig{}, net::BuildOptions{});
  const auto seq_b =
      net::build_networks(corpus_b, partition, PointwiseMeasure::duration(),
                          conn::EstimatorConfig{}, net::BuildOptions{});
  CHECK(matrices_equal(seq_a.windows.front(), seq_b.windows.front()));

  // and invariant to the worker count
  net::BuildOptions threaded;
  threaded.threads = 4;
  const auto seq_c =
      net::build_networks(corpus_a, partition, PointwiseMeasure::duration(),
                          conn::EstimatorConfig{}, threaded);
  CHECK(matrices_equal(seq_a.windows.front(), seq_c.windows.front()));
}

TEST_CASE("halving a window and averaging reproduces the full estimate") {
  const Region a = square("a", 0.0, 0.0, 1.0);
  const Region b = square("b", 30.0, 30.0, 1.0);
  std::mt19937_64 rng(7);
  std::vector<traj::TrajectorySegment> all;
  for (int i = 0; i < 20; ++i) {
    auto seg = make_segment(
        "s" + std::to_string(i),
        {{0, -1.0 + testutil::uniform01(rng), testutil::uniform01(rng)},
         {3600, 1.5 + testutil::uniform01(rng), testutil::uniform01(rng)}});
    seg.receptor_region = "b";
    all.push_back(std::move(seg));
  }
  std::vector<traj::TrajectorySegment> half1(all.begin(), all.begin() + 10);
  std::vector<traj::TrajectorySegment> half2(all.begin() + 10, all.end());

  conn::EstimatorConfig cfg;
  const auto m = PointwiseMeasure::duration();
  const double full =
      conn::estimate_integrated(traj::make_corpus(all), b, a, m, cfg);
  const double e1 =
      conn::estimate_integrated(traj::make_corpus(half1), b, a, m, cfg);
  const double e2 =
      conn::estimate_integrated(traj::make_corpus(half2), b, a, m, cfg);
  CHECK_EQ(full, doctest::Approx(0.5 * (e1 + e2)).epsilon(1e-12));
}

TEST_CASE("receptor resolution errors") {
  const geo::Partition partition = row_partition();
  SUBCASE("explicit receptor id not in the partition") {
    auto seg = make_segment("t", {{0, 0.5, 0.5}, {3600, 1.5, 0.5}});
    seg.receptor_region = "nope";
    const auto corpus = traj::make_corpus({seg});
    CHECK_THROWS_AS(
        net::build_networks(corpus, partition, PointwiseMeasure::contact(),
                            conn::EstimatorConfig{}, net::BuildOptions{}),
        UnresolvedReceptor);
  }
  SUBCASE("origin outside every region") {
    auto seg = make_segment("t", {{0, 0.5, 0.5}, {3600, 9.0, 9.0}});
    const auto corpus = traj::make_corpus({seg});
    CHECK_THROWS_AS(
        net::build_networks(corpus, partition, PointwiseMeasure::contact(),
                            conn::EstimatorConfig{}, net::BuildOptions{}),
        UnresolvedReceptor);
  }
}

TEST_CASE("edge list round trip on a 604-node synthetic network") {
  std::mt19937_64 rng(604);
  std::vector<std::string> node_ids;
  for (int i = 0; i < 604; ++i) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "n%03d", i);
    node_ids.push_back(buf);
  }
  net::NetworkSequence seq;
  for (const char* wid : {"01", "02"}) {
    net::WindowedAdjacency w(wid, node_ids);
    w.measure_descriptor = "contact";
    w.b_area_mode = "unit";
    for (int e = 0; e < 5000; ++e) {
      const auto i = static_cast<std::size_t>(rng() % 604);
      const auto j = static_cast<std::size_t>(rng() % 604);
      if (i == j) continue;
      // keep some exact zeros: present but never connected
      const double weight = (e % 17 == 0) ? 0.0 : testutil::uniform01(rng);
      w.set_edge(i, j, weight);
    }
    seq.windows.push_back(std::move(w));
  }

  const auto dir = testutil::temp_dir("edges");
  const auto path = dir / "edges.csv";
  net::write_edges(seq, path, "cafef00d");
  const net::NetworkSequence again = net::read_edges(path);
  REQUIRE_EQ(again.windows.size(), 2);
  CHECK_EQ(again.windows[0].node_ids(), node_ids);
  CHECK_EQ(again.windows[0].measure_descriptor, "contact");
  CHECK_EQ(again.windows[0].direction, net::Direction::transport);
  for (std::size_t k = 0; k < 2; ++k) {
    CHECK(matrices_equal(seq.windows[k], again.windows[k]));
  }
}

TEST_CASE("empty network round-trips through a header-only file") {
  net::WindowedAdjacency w("all", {"a", "b", "c"});
  w.measure_descriptor = "duration";
  net::NetworkSequence seq;
  seq.windows.push_back(std::move(w));
  const auto dir = testutil::temp_dir("edges_empty");
  net::write_edges(seq, dir / "edges.csv");
  const std::string text = testutil::read_file(dir / "edges.csv");
  CHECK_EQ(std::count(text.begin(), text.end(), '\n'), 2);  // header lines only
  const net::NetworkSequence again = net::read_edges(dir / "edges.csv");
  REQUIRE_EQ(again.windows.size(), 1);
  CHECK_EQ(again.windows[0].n(), 3);
  CHECK_FALSE(again.windows[0].has_edge(0, 1));
}

TEST_CASE("corrupted edge headers are rejected") {
  const auto dir = testutil::temp_dir("edges_bad");
  testutil::write_file(dir / "bad1.csv", "# aeronet-edges v9; nodes=a|b\n");
  CHECK_THROWS_AS(net::read_edges(dir / "bad1.csv"), FormatVersionMismatch);
  testutil::write_file(dir / "bad2.csv", "window_id,src,dst,weight\n");
  CHECK_THROWS_AS(net::read_edges(dir / "bad2.csv"), FormatVersionMismatch);
  testutil::write_file(dir / "bad3.csv",
                       "# aeronet-edges v1; measure=contact; direction=transport; "
                       "b_area=unit; nodes=a|b; windows=all\n"
                       "window_id,src,dst,weight\n"
                       "all,a,zzz,1.0\n");
  CHECK_THROWS_AS(net::read_edges(dir / "bad3.csv"), DataError);
}

TEST_CASE("dense export writes absent cells as empty fields") {
  net::WindowedAdjacency w("all", {"a", "b"});
  w.set_edge(0, 1, 0.5);
  const auto dir = testutil::temp_dir("dense");
  net::write_dense_matrix(w, dir / "m.csv", "ff");
  const std::string text = testutil::read_file(dir / "m.csv");
  CHECK(text.find("a,,0.5\n") != std::string::npos);
  CHECK(text.find("b,,\n") != std::string::npos);
}
