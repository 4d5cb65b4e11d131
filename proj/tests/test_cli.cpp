#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include "aeronet/geojson.hpp"
#include "aeronet/metrics.hpp"
#include "testutil.hpp"

namespace fs = std::filesystem;

namespace {

// runs the CLI with `dir` as working directory, so identical relative-path
// invocations in different sandboxes must produce identical bytes
int run_cli(const std::string& args, const fs::path& dir) {
  fs::create_directories(dir);
  const std::string command = "cd " + dir.string() + " && " +
                              std::string(AERONET_CLI_PATH) + " " + args +
                              " 2> stderr.log";
  const int status = std::system(command.c_str());
  return WEXITSTATUS(status);
}

std::string stderr_of(const fs::path& dir) {
  return testutil::read_file(dir / "stderr.log");
}

void write_arrivals(const fs::path& path) {
  std::ofstream out(path);
  out << "lon_deg,lat_deg\n";
  // two arrival points per cell of a 1x3 row of 1-degree cells
  for (int c = 0; c < 3; ++c) {
    out << (0.3 + c) << ",0.4\n";
    out << (0.65 + c) << ",0.6\n";
  }
}

void write_times(const fs::path& path) {
  std::ofstream out(path);
  out << "2011-01-05T12:00:00Z\n2011-01-06T12:00:00Z\n2011-02-05T12:00:00Z\n";
}

/// simulate -> network -> indices -> cluster -> appendix under one seed
void run_pipeline(const fs::path& dir, const std::string& extra_flags) {
  fs::create_directories(dir);
  write_arrivals(dir / "arrivals.csv");
  write_times(dir / "times.txt");
  REQUIRE_EQ(run_cli("grid --grid 0,0,3,1,111.2 --out part.geojson",
                     dir),
             0);
  REQUIRE_EQ(run_cli("simulate --field uniform --u 1.1574074074074073e-4 --v 0"
                     " --arrivals arrivals.csv --times times.txt"
                     " --delta -4h --fix-interval 20m --step 60 --out corpus.csv " +
                         extra_flags,
                     dir),
             0);
  REQUIRE_EQ(run_cli("network --partition part.geojson --corpus corpus.csv"
                     " --context monthly-pooled --measure contact --out edges.csv"
                     " --dense-dir dense " +
                         extra_flags,
                     dir),
             0);
  REQUIRE_EQ(run_cli("indices --edges edges.csv --out indices.csv"
                     " --n-null 8 --seed 42 " +
                         extra_flags,
                     dir),
             0);
  REQUIRE_EQ(run_cli("cluster --indices indices.csv --out dendro.nwk"
                     " --report merges.csv " +
                         extra_flags,
                     dir),
             0);
  REQUIRE_EQ(run_cli("appendix --edges edges.csv --partition part.geojson"
                     " --out-dir appendix --bins 3 " +
                         extra_flags,
                     dir),
             0);
}

bool same_bytes(const fs::path& a, const fs::path& b) {
  return testutil::read_file(a) == testutil::read_file(b);
}

const char* const kPipelineFiles[] = {
    "part.geojson", "corpus.csv",  "edges.csv",
    "indices.csv",  "dendro.nwk",  "merges.csv",
    "dense/matrix_01.csv", "dense/matrix_02.csv",
    "appendix/distance_by_category.csv", "appendix/distance_summary.csv",
    "appendix/bearing_histogram.csv"};

}  // namespace

TEST_CASE("synthetic pipeline is byte-reproducible across runs and threads") {
  const fs::path base = testutil::temp_dir("cli_pipeline");
  run_pipeline(base / "run1", "--threads 1");
  run_pipeline(base / "run2", "--threads 1");
  run_pipeline(base / "run3", "--threads 8");
  for (const char* name : kPipelineFiles) {
    CAPTURE(name);
    CHECK(same_bytes(base / "run1" / name, base / "run2" / name));
    CHECK(same_bytes(base / "run1" / name, base / "run3" / name));
  }
  // two monthly-pooled windows from the January + February sample times
  const std::string edges = testutil::read_file(base / "run1" / "edges.csv");
  CHECK(edges.find("windows=01|02") != std::string::npos);
}

TEST_CASE("missing input files exit with code 2 and name the path") {
  const fs::path dir = testutil::temp_dir("cli_missing");
  const int code = run_cli("network --partition " + (dir / "nope.geojson").string() +
                               " --corpus x.csv --out " + (dir / "e.csv").string(),
                           dir);
  CHECK_EQ(code, 2);
  CHECK(stderr_of(dir).find("nope.geojson") != std::string::npos);
}

TEST_CASE("malformed corpus data exits with code 3") {
  const fs::path dir = testutil::temp_dir("cli_baddata");
  testutil::write_file(dir / "part.geojson", "");
  REQUIRE_EQ(run_cli("grid --grid 0,0,1,1,60 --out " + (dir / "part.geojson").string(),
                     dir),
             0);
  testutil::write_file(
      dir / "bad.csv",
      "traj_id,receptor_region,sample_time,point_time,lon_deg,lat_deg,alt_m\n"
      "t1,,2011-01-01T00:00:00Z,2011-01-01T00:00:00Z,bogus,0,\n");
  const int code = run_cli("network --partition " + (dir / "part.geojson").string() +
                               " --corpus " + (dir / "bad.csv").string() + " --out " +
                               (dir / "e.csv").string(),
                           dir);
  CHECK_EQ(code, 3);
}

TEST_CASE("indices on the shipped 3-node fixture match the hand computation") {
  const fs::path dir = testutil::temp_dir("cli_fixture");
  const fs::path fixture =
      fs::path(__FILE__).parent_path() / "fixtures" / "three_node_edges.csv";
  REQUIRE(fs::exists(fixture));
  REQUIRE_EQ(run_cli("indices --edges " + fixture.string() + " --out " +
                         (dir / "indices.csv").string() + " --n-null 4 --seed 9",
                     dir),
             0);
  const auto rows = aeronet::metrics::read_indices_csv(dir / "indices.csv");
  REQUIRE_EQ(rows.size(), 1);
  const auto& iv = rows[0];
  CHECK_EQ(iv.window_id, "all");
  // directed 3-cycle a->b (2), b->c (1), c->a (4), reciprocal costs
  CHECK_EQ(*iv.density, doctest::Approx(7.0 / 6.0).epsilon(1e-12));
  CHECK_EQ(*iv.transitivity, 1.0);
  CHECK_EQ(*iv.sp_mean, doctest::Approx(0.875).epsilon(1e-12));
  CHECK_EQ(*iv.sp_sd,
           doctest::Approx(std::sqrt(0.18229166666666666)).epsilon(1e-9));
  CHECK_EQ(*iv.diameter, 1.5);
  CHECK_EQ(*iv.degree_correlation, doctest::Approx(-0.5).epsilon(1e-12));
  CHECK_FALSE(iv.scale_free_alpha.has_value());  // 3 nodes cannot support the fit
  CHECK_EQ(iv.unreachable_pairs, 0);
}

TEST_CASE("grid and buffer subcommands") {
  const fs::path dir = testutil::temp_dir("cli_partitions");
  SUBCASE("2x2 grid of 74 km cells") {
    REQUIRE_EQ(
        run_cli("grid --grid 0,40,1.8,41.4,74 --out " + (dir / "g.geojson").string(),
                dir),
        0);
    const auto partition = aeronet::geo::load_partition_geojson(dir / "g.geojson");
    CHECK_GE(partition.size(), 4);
  }
  SUBCASE("overlapping buffers are rejected") {
    testutil::write_file(dir / "centers.csv",
                         "id,lon_deg,lat_deg\np1,0,0\np2,0.27,0\n");  // ~30 km apart
    const int code = run_cli("buffers --centers " + (dir / "centers.csv").string() +
                                 " --radius-km 20 --out " + (dir / "b.geojson").string(),
                             dir),
              expected = 2;
    CHECK_EQ(code, expected);
    CHECK(stderr_of(dir).find("overlap") != std::string::npos);
  }
  SUBCASE("well-separated buffers are accepted") {
    testutil::write_file(dir / "centers.csv",
                         "id,lon_deg,lat_deg\np1,0,0\np2,0.45,0\n");  // ~50 km apart
    REQUIRE_EQ(run_cli("buffers --centers " + (dir / "centers.csv").string() +
                           " --radius-km 20 --out " + (dir / "b.geojson").string(),
                       dir),
               0);
    const auto partition = aeronet::geo::load_partition_geojson(dir / "b.geojson");
    CHECK_EQ(partition.size(), 2);
    CHECK_EQ(partition.at(0).exterior().size(), 64);
  }
}

TEST_CASE("config file drives a run like the equivalent flags") {
  const fs::path dir = testutil::temp_dir("cli_config");
  write_arrivals(dir / "arrivals.csv");
  write_times(dir / "times.txt");
  REQUIRE_EQ(run_cli("grid --grid 0,0,3,1,111.2 --out part.geojson", dir), 0);
  REQUIRE_EQ(run_cli("simulate --field uniform --u 1.1574074074074073e-4 --v 0"
                     " --arrivals arrivals.csv --times times.txt"
                     " --delta -4h --fix-interval 20m --step 60 --out corpus.csv",
                     dir),
             0);
  REQUIRE_EQ(run_cli("network --partition part.geojson --corpus corpus.csv"
                     " --measure duration --out edges_flags.csv",
                     dir),
             0);
  // the measure schema keys work verbatim from a config file
  testutil::write_file(dir / "run.cfg",
                       "[network]\n"
                       "partition=part.geojson\n"
                       "corpus=corpus.csv\n"
                       "measure=duration\n"
                       "out=edges_config.csv\n");
  REQUIRE_EQ(run_cli("--config run.cfg network", dir), 0);
  CHECK(same_bytes(dir / "edges_flags.csv", dir / "edges_config.csv"));
}

TEST_CASE("convert-tdump subcommand") {
  const fs::path dir = testutil::temp_dir("cli_tdump");
  testutil::write_file(dir / "traj.tdump",
                       "     1     1\n"
                       "    GDAS    11     1     1     0     0\n"
                       "     1 BACKWARD  OMEGA\n"
                       "    11     1     2    12   45.00    5.00   500.0\n"
                       "     1 PRESSURE\n"
                       "     1     1    11     1     2    12     0     0    0.0   "
                       "45.000    5.000   500.0   950.0\n"
                       "     1     1    11     1     2    11     0     0   -1.0   "
                       "45.100    5.200   520.0   948.0\n");
  REQUIRE_EQ(run_cli("convert-tdump --tdump " + (dir / "traj.tdump").string() +
                         " --out " + (dir / "corpus.csv").string() + " --receptor r9",
                     dir),
             0);
  const std::string corpus = testutil::read_file(dir / "corpus.csv");
  CHECK(corpus.find("traj_id,receptor_region,sample_time") != std::string::npos);
  CHECK(corpus.find("t001,r9,2011-01-02T12:00:00Z") != std::string::npos);
  CHECK(corpus.find("cov:pressure") != std::string::npos);
}
