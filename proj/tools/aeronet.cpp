// aeronet: build and analyze trajectory-based connectivity networks.
//
// Subcommands cover the full pipeline: partition generation (grid, buffers),
// synthetic corpus simulation, network estimation, index computation,
// clustering, and appendix statistics. Logs go to stderr, data to files.

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "aeronet/connectivity.hpp"
#include "aeronet/errors.hpp"
#include "aeronet/flowsim.hpp"
#include "aeronet/geojson.hpp"
#include "aeronet/geometry.hpp"
#include "aeronet/metrics.hpp"
#include "aeronet/network.hpp"
#include "aeronet/parallel.hpp"
#include "aeronet/timeutil.hpp"
#include "aeronet/trajectory.hpp"

namespace {

using namespace aeronet;

std::string format_double(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

std::uint64_t fnv1a64(const std::string& text) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

/// Canonical key=value record of everything that determines the outputs.
/// The worker count is deliberately absent: results must not depend on it.
class Fingerprint {
 public:
  void add(const std::string& key, const std::string& value) {
    text_ += key;
    text_ += '=';
    text_ += value;
    text_ += '\n';
  }
  void add(const std::string& key, double value) { add(key, format_double(value)); }
  void add(const std::string& key, std::int64_t value) {
    add(key, std::to_string(value));
  }
  void add(const std::string& key, std::uint64_t value) {
    add(key, std::to_string(value));
  }
  std::string hex() const { return hex64(fnv1a64(text_)); }

 private:
  std::string text_;
};

void require_file(const std::string& path) {
  if (!std::filesystem::exists(path)) {
    throw ValidationError("file not found: " + path);
  }
}

std::vector<double> parse_csv_numbers(const std::string& text, std::size_t expect,
                                      const std::string& what) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string field;
  while (std::getline(ss, field, ',')) {
    try {
      out.push_back(std::stod(field));
    } catch (const std::exception&) {
      throw ValidationError("bad number '" + field + "' in " + what);
    }
  }
  if (out.size() != expect) {
    throw ValidationError(what + " needs " + std::to_string(expect) +
                          " comma-separated numbers");
  }
  return out;
}

// -- shared option bundles ----------------------------------------------------

struct GlobalOptions {
  std::uint64_t seed = 0;
  unsigned threads = 0;  // 0 = machine parallelism
  std::string edge_direction = "transport";
  std::string cost_mode = "reciprocal";
  std::string b_area = "unit";

  unsigned worker_count() const { return threads == 0 ? default_threads() : threads; }
};

struct MeasureOptions {
  std::string measure = "contact";
  double min_length_km = 0.0;
  double alt_threshold_m = 0.0;
  std::string z_source = "1";
  std::string ztilde_source = "1";
  std::string g_east, g_north;
  std::string events_file;

  // option names double as the config-file keys
  void attach(CLI::App* cmd) {
    cmd->add_option("--measure", measure,
                    "contact | contact_min_length | duration | length | volume | "
                    "field | covariate | covariate_measure")
        ->default_val("contact");
    cmd->add_option("--min_length_km,--min-length-km", min_length_km,
                    "threshold for contact_min_length");
    cmd->add_option("--alt_threshold_m,--alt-threshold-m", alt_threshold_m,
                    "altitude ceiling for ztilde_source=alt_below");
    cmd->add_option("--z_source,--z-source", z_source,
                    "origin factor: a constant or a covariate name");
    cmd->add_option("--ztilde_source,--ztilde-source", ztilde_source,
                    "along-path factor: 1, alt_below, or a covariate name");
    cmd->add_option("--g_east,--g-east", g_east,
                    "east component covariate for field");
    cmd->add_option("--g_north,--g-north", g_north,
                    "north component covariate for field");
    cmd->add_option("--events_file,--events-file", events_file,
                    "CSV time,weight for covariate_measure");
  }

  conn::ZSpec z_spec() const {
    double value = 0.0;
    auto [ptr, ec] =
        std::from_chars(z_source.data(), z_source.data() + z_source.size(), value);
    if (ec == std::errc{} && ptr == z_source.data() + z_source.size()) {
      return conn::ZSpec::constant(value);
    }
    return conn::ZSpec::origin_covariate(z_source);
  }

  conn::ZTildeSpec ztilde_spec() const {
    if (ztilde_source == "1") return conn::ZTildeSpec::one();
    if (ztilde_source == "alt_below") {
      return conn::ZTildeSpec::alt_below(alt_threshold_m);
    }
    return conn::ZTildeSpec::column(ztilde_source);
  }

  std::vector<conn::Event> load_events() const {
    require_file(events_file);
    std::ifstream in(events_file);
    std::string line;
    if (!std::getline(in, line) || line.rfind("time,weight", 0) != 0) {
      throw ValidationError("events file must start with header 'time,weight'");
    }
    std::vector<conn::Event> events;
    while (std::getline(in, line)) {
      if (line.empty() || line[0] == '#') continue;
      const auto comma = line.find(',');
      if (comma == std::string::npos) {
        throw DataError("events file row without comma: " + line);
      }
      conn::Event e;
      try {
        e.t = timeutil::parse_iso8601_utc(line.substr(0, comma));
        e.weight = std::stod(line.substr(comma + 1));
      } catch (const std::exception& ex) {
        throw DataError(std::string("bad events row: ") + ex.what());
      }
      events.push_back(e);
    }
    return events;
  }

  conn::PointwiseMeasure build() const {
    using conn::PointwiseMeasure;
    if (measure == "contact") return PointwiseMeasure::contact();
    if (measure == "contact_min_length") {
      return PointwiseMeasure::contact_min_length(min_length_km);
    }
    if (measure == "duration") return PointwiseMeasure::duration();
    if (measure == "length") return PointwiseMeasure::length();
    if (measure == "volume") return PointwiseMeasure::volume();
    if (measure == "field") return PointwiseMeasure::field(g_east, g_north);
    if (measure == "covariate") {
      return PointwiseMeasure::covariate(z_spec(), ztilde_spec());
    }
    if (measure == "covariate_measure") {
      return PointwiseMeasure::covariate_measure(z_spec(), ztilde_spec(),
                                                 load_events());
    }
    throw ValidationError("unknown measure '" + measure + "'");
  }

  void fingerprint(Fingerprint& fp) const {
    fp.add("measure", measure);
    fp.add("min_length_km", min_length_km);
    fp.add("alt_threshold_m", alt_threshold_m);
    fp.add("z_source", z_source);
    fp.add("ztilde_source", ztilde_source);
    fp.add("g_east", g_east);
    fp.add("g_north", g_north);
    fp.add("events_file", events_file);
  }
};

// -- subcommand state -----------------------------------------------------------

struct GridCmd {
  std::string grid_spec;
  std::string mask_file;
  std::string out;
};

struct BuffersCmd {
  std::string centers_file;
  double radius_km = 20.0;
  int vertices = 64;
  std::string out;
};

struct SimulateCmd {
  std::string field = "uniform";
  double u = 0.0, v = 0.0;
  double omega = 0.0;
  std::string center = "0,0";
  double k = 0.0;
  double amplitude = 0.1, eps = 0.25;
  std::string arrivals_file;
  std::string times_file;
  std::string delta = "-48h";
  std::string fix_interval = "1h";
  double step_seconds = 60.0;
  std::string anchor = "0,0";
  bool emit_jacdet = false;
  std::string out;
};

struct NetworkCmd {
  std::string partition_file;
  std::string corpus_file;
  std::string context = "whole";
  double t_length = 1.0;
  std::string out;
  std::string dense_dir;
  MeasureOptions measure;
};

struct IndicesCmd {
  std::string edges_file;
  std::string out;
  std::size_t n_null = 20;
  std::string strength = "total";
};

struct ClusterCmd {
  std::string indices_file;
  std::string out;
  std::string report;
  bool no_standardize = false;
};

struct AppendixCmd {
  std::string edges_file;
  std::string partition_file;
  std::string out_dir;
  int bins = 5;
  int sectors = 16;
};

struct TdumpCmd {
  std::string tdump_file;
  std::string out;
  std::string receptor;
};

// -- command implementations ------------------------------------------------------

int run_grid(const GridCmd& cmd, const GlobalOptions& global) {
  (void)global;
  const auto nums = parse_csv_numbers(cmd.grid_spec, 5, "--grid");
  std::optional<geo::Region> mask;
  if (!cmd.mask_file.empty()) {
    require_file(cmd.mask_file);
    const geo::Partition mask_partition = geo::load_partition_geojson(cmd.mask_file);
    if (mask_partition.size() != 1) {
      throw ValidationError("mask file must contain exactly one polygon feature");
    }
    mask = mask_partition.at(0);
  }
  Fingerprint fp;
  fp.add("cmd", "grid");
  fp.add("grid", cmd.grid_spec);
  fp.add("mask", cmd.mask_file);
  const geo::Partition partition = geo::make_grid_partition(
      nums[0], nums[1], nums[2], nums[3], nums[4], mask ? &*mask : nullptr);
  geo::write_partition_geojson(partition, cmd.out, fp.hex());
  std::cerr << "aeronet: wrote " << partition.size() << " grid cells to " << cmd.out
            << "\n";
  return 0;
}

int run_buffers(const BuffersCmd& cmd, const GlobalOptions& global) {
  (void)global;
  require_file(cmd.centers_file);
  std::ifstream in(cmd.centers_file);
  std::string line;
  if (!std::getline(in, line) || line.rfind("id,lon_deg,lat_deg", 0) != 0) {
    throw ValidationError("centers file must start with header 'id,lon_deg,lat_deg'");
  }
  std::vector<geo::BufferCenter> centers;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::stringstream ss(line);
    std::string id, lon, lat;
    if (!std::getline(ss, id, ',') || !std::getline(ss, lon, ',') ||
        !std::getline(ss, lat, ',')) {
      throw DataError("bad centers row: " + line);
    }
    centers.push_back(geo::BufferCenter{
        id, geo::GeoPoint{std::stod(lon), std::stod(lat), std::nullopt}});
  }
  Fingerprint fp;
  fp.add("cmd", "buffers");
  fp.add("centers", cmd.centers_file);
  fp.add("radius_km", cmd.radius_km);
  fp.add("vertices", static_cast<std::int64_t>(cmd.vertices));
  const geo::Partition partition =
      geo::make_buffer_partition(centers, cmd.radius_km, cmd.vertices);
  geo::write_partition_geojson(partition, cmd.out, fp.hex());
  std::cerr << "aeronet: wrote " << partition.size() << " buffers to " << cmd.out
            << "\n";
  return 0;
}

int run_simulate(const SimulateCmd& cmd, const GlobalOptions& global) {
  require_file(cmd.arrivals_file);
  require_file(cmd.times_file);
  const auto center = parse_csv_numbers(cmd.center, 2, "--center");
  const auto anchor = parse_csv_numbers(cmd.anchor, 2, "--anchor");
  const flow::VectorField field = flow::VectorField::from_cli(
      cmd.field, cmd.u, cmd.v, cmd.omega, flow::Vec2{center[0], center[1]}, cmd.k,
      cmd.amplitude, cmd.eps);

  flow::CorpusSpec spec;
  spec.anchor = geo::GeoPoint{anchor[0], anchor[1], std::nullopt};
  spec.delta_seconds = timeutil::parse_duration_seconds(cmd.delta);
  spec.fix_interval_seconds = timeutil::parse_duration_seconds(cmd.fix_interval);
  spec.step_seconds = cmd.step_seconds;
  spec.emit_jacdet = cmd.emit_jacdet;
  spec.threads = global.worker_count();

  std::ifstream arrivals(cmd.arrivals_file);
  std::string line;
  if (!std::getline(arrivals, line) || line.rfind("lon_deg,lat_deg", 0) != 0) {
    throw ValidationError(
        "arrivals file must start with header 'lon_deg,lat_deg[,receptor_region]'");
  }
  const bool has_receptor = line.find(",receptor_region") != std::string::npos;
  while (std::getline(arrivals, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::stringstream ss(line);
    std::string lon, lat, receptor;
    if (!std::getline(ss, lon, ',') || !std::getline(ss, lat, ',')) {
      throw DataError("bad arrivals row: " + line);
    }
    flow::ArrivalPoint p;
    p.p = flow::Vec2{std::stod(lon) - anchor[0], std::stod(lat) - anchor[1]};
    if (has_receptor && std::getline(ss, receptor, ',') && !receptor.empty()) {
      p.receptor_region = receptor;
    }
    spec.arrival_points.push_back(std::move(p));
  }
  std::ifstream times(cmd.times_file);
  while (std::getline(times, line)) {
    if (line.empty() || line[0] == '#') continue;
    spec.arrival_times.push_back(timeutil::parse_iso8601_utc(line));
  }

  Fingerprint fp;
  fp.add("cmd", "simulate");
  fp.add("field", cmd.field);
  fp.add("u", cmd.u);
  fp.add("v", cmd.v);
  fp.add("omega", cmd.omega);
  fp.add("center", cmd.center);
  fp.add("k", cmd.k);
  fp.add("amplitude", cmd.amplitude);
  fp.add("eps", cmd.eps);
  fp.add("arrivals", cmd.arrivals_file);
  fp.add("times", cmd.times_file);
  fp.add("delta", cmd.delta);
  fp.add("fix_interval", cmd.fix_interval);
  fp.add("step", cmd.step_seconds);
  fp.add("anchor", cmd.anchor);
  fp.add("emit_jacdet", std::string(cmd.emit_jacdet ? "1" : "0"));
  fp.add("seed", global.seed);

  const traj::TrajectoryCorpus corpus = flow::generate_corpus(field, spec);
  traj::write_corpus(corpus, cmd.out, fp.hex());
  std::cerr << "aeronet: simulated " << corpus.segments.size() << " trajectories to "
            << cmd.out << "\n";
  return 0;
}

int run_network(const NetworkCmd& cmd, const GlobalOptions& global) {
  require_file(cmd.partition_file);
  require_file(cmd.corpus_file);
  const geo::Partition partition = geo::load_partition_geojson(cmd.partition_file);
  const traj::TrajectoryCorpus corpus = traj::parse_corpus(cmd.corpus_file);

  conn::EstimatorConfig cfg;
  cfg.t_length = cmd.t_length;
  cfg.b_area_mode = global.b_area == "real"
                        ? conn::EstimatorConfig::BAreaMode::real_km2
                        : conn::EstimatorConfig::BAreaMode::unit;
  net::BuildOptions options;
  options.context = traj::parse_context(cmd.context);
  options.direction = net::parse_direction(global.edge_direction);
  options.threads = global.worker_count();

  Fingerprint fp;
  fp.add("cmd", "network");
  fp.add("partition", cmd.partition_file);
  fp.add("corpus", cmd.corpus_file);
  fp.add("context", cmd.context);
  fp.add("t_length", cmd.t_length);
  fp.add("b_area", global.b_area);
  fp.add("edge_direction", global.edge_direction);
  cmd.measure.fingerprint(fp);

  const net::NetworkSequence seq = net::build_networks(
      corpus, partition, cmd.measure.build(), cfg, options);
  net::write_edges(seq, cmd.out, fp.hex());
  std::size_t edges = 0;
  for (const auto& w : seq.windows) {
    for (std::size_t i = 0; i < w.n(); ++i) {
      for (std::size_t j = 0; j < w.n(); ++j) {
        if (i != j && w.has_edge(i, j)) ++edges;
      }
    }
  }
  std::cerr << "aeronet: wrote " << seq.windows.size() << " windows, " << edges
            << " edges to " << cmd.out << "\n";
  if (!cmd.dense_dir.empty()) {
    std::filesystem::create_directories(cmd.dense_dir);
    for (const auto& w : seq.windows) {
      net::write_dense_matrix(
          w, std::filesystem::path(cmd.dense_dir) / ("matrix_" + w.window_id() + ".csv"),
          fp.hex());
    }
    std::cerr << "aeronet: dense matrices in " << cmd.dense_dir << "\n";
  }
  return 0;
}

int run_indices(const IndicesCmd& cmd, const GlobalOptions& global) {
  require_file(cmd.edges_file);
  const net::NetworkSequence seq = net::read_edges(cmd.edges_file);

  metrics::IndexOptions options;
  options.cost_mode = metrics::parse_cost_mode(global.cost_mode);
  options.n_null = cmd.n_null;
  options.seed = global.seed;
  // windows are the outer work unit; leftover workers go to per-source
  // shortest paths inside each window
  options.threads = std::max<unsigned>(
      1, global.worker_count() /
             std::max<std::size_t>(1, seq.windows.size()));
  if (cmd.strength == "in") {
    options.strength_mode = metrics::StrengthMode::in;
  } else if (cmd.strength == "out") {
    options.strength_mode = metrics::StrengthMode::out;
  } else if (cmd.strength == "total") {
    options.strength_mode = metrics::StrengthMode::total;
  } else {
    throw ValidationError("unknown strength mode '" + cmd.strength + "'");
  }

  Fingerprint fp;
  fp.add("cmd", "indices");
  fp.add("edges", cmd.edges_file);
  fp.add("cost_mode", global.cost_mode);
  fp.add("n_null", static_cast<std::uint64_t>(cmd.n_null));
  fp.add("strength", cmd.strength);
  fp.add("seed", global.seed);

  std::vector<metrics::IndexVector> rows(seq.windows.size());
  parallel_for(seq.windows.size(), global.worker_count(), [&](std::size_t k) {
    rows[k] = metrics::index_vector(seq.windows[k], options);
  });
  for (const auto& row : rows) {
    for (const std::string& issue : row.issues) {
      std::cerr << "aeronet: window " << row.window_id << ": " << issue << "\n";
    }
  }
  metrics::write_indices_csv(rows, cmd.out, fp.hex());
  std::cerr << "aeronet: wrote " << rows.size() << " index rows to " << cmd.out
            << "\n";
  return 0;
}

int run_cluster(const ClusterCmd& cmd, const GlobalOptions& global) {
  (void)global;
  require_file(cmd.indices_file);
  const auto rows = metrics::read_indices_csv(cmd.indices_file);
  std::vector<std::string> dropped;
  const metrics::Dendrogram dendrogram =
      metrics::hclust_complete(rows, !cmd.no_standardize, &dropped);
  for (const std::string& field : dropped) {
    std::cerr << "aeronet: index '" << field
              << "' absent in some window, dropped from the feature space\n";
  }

  Fingerprint fp;
  fp.add("cmd", "cluster");
  fp.add("indices", cmd.indices_file);
  fp.add("standardize", std::string(cmd.no_standardize ? "0" : "1"));

  std::ofstream out(cmd.out);
  if (!out) throw ValidationError("cannot write dendrogram file '" + cmd.out + "'");
  // bracketed blocks are Newick comments
  out << "[aeronet-dendrogram v1; config=" << fp.hex() << "]"
      << dendrogram.to_newick() << '\n';
  std::cerr << "aeronet: wrote dendrogram to " << cmd.out << "\n";

  if (!cmd.report.empty()) {
    std::ofstream report(cmd.report);
    if (!report) throw ValidationError("cannot write report file '" + cmd.report + "'");
    report << "# aeronet-cluster v1; config=" << fp.hex() << '\n';
    report << "merge,left,right,height\n";
    const std::size_t n = dendrogram.leaves.size();
    auto label = [&](std::size_t node) {
      return node < n ? dendrogram.leaves[node]
                      : "merge" + std::to_string(node - n + 1);
    };
    for (std::size_t k = 0; k < dendrogram.merges.size(); ++k) {
      const auto& m = dendrogram.merges[k];
      report << (k + 1) << ',' << label(m.left) << ',' << label(m.right) << ','
             << format_double(m.height) << '\n';
    }
  }
  return 0;
}

int run_appendix(const AppendixCmd& cmd, const GlobalOptions& global) {
  (void)global;
  require_file(cmd.edges_file);
  require_file(cmd.partition_file);
  const net::NetworkSequence seq = net::read_edges(cmd.edges_file);
  const geo::Partition partition = geo::load_partition_geojson(cmd.partition_file);
  const metrics::EdgeCategories cats =
      metrics::edge_quantile_categories(seq, cmd.bins);
  if (cats.degenerate) {
    std::cerr << "aeronet: all edge weights equal; a single category was used\n";
  }

  Fingerprint fp;
  fp.add("cmd", "appendix");
  fp.add("edges", cmd.edges_file);
  fp.add("partition", cmd.partition_file);
  fp.add("bins", static_cast<std::int64_t>(cmd.bins));
  fp.add("sectors", static_cast<std::int64_t>(cmd.sectors));

  std::filesystem::create_directories(cmd.out_dir);
  const std::filesystem::path dir(cmd.out_dir);
  std::string edges_note;
  for (std::size_t k = 0; k < cats.bin_edges.size(); ++k) {
    if (k) edges_note += '|';
    edges_note += format_double(cats.bin_edges[k]);
  }

  const auto samples = metrics::distance_by_category(cats, partition);
  {
    std::ofstream out(dir / "distance_by_category.csv");
    out << "# aeronet-appendix v1; kind=distance; bin_edges=" << edges_note
        << "; config=" << fp.hex() << '\n';
    out << "category,distance_km\n";
    for (const auto& s : samples) {
      out << s.category << ',' << format_double(s.distance_km) << '\n';
    }
  }
  {
    std::ofstream out(dir / "distance_summary.csv");
    out << "# aeronet-appendix v1; kind=distance_summary; config=" << fp.hex() << '\n';
    out << "category,min,q1,median,q3,max\n";
    for (const auto& [cat, five] : metrics::five_number_by_category(samples)) {
      out << cat << ',' << format_double(five.min) << ',' << format_double(five.q1)
          << ',' << format_double(five.median) << ',' << format_double(five.q3) << ','
          << format_double(five.max) << '\n';
    }
  }
  {
    const auto hist = metrics::bearing_histogram(cats, partition, cmd.sectors);
    std::ofstream out(dir / "bearing_histogram.csv");
    out << "# aeronet-appendix v1; kind=bearing; bin_edges=" << edges_note
        << "; config=" << fp.hex() << '\n';
    out << "category,sector_start_deg,count\n";
    const double width = 360.0 / cmd.sectors;
    for (const auto& [cat, counts] : hist) {
      for (int s = 0; s < cmd.sectors; ++s) {
        out << cat << ',' << format_double(width * s) << ','
            << counts[static_cast<std::size_t>(s)] << '\n';
      }
    }
  }
  std::cerr << "aeronet: appendix statistics in " << cmd.out_dir << "\n";
  return 0;
}

int run_tdump(const TdumpCmd& cmd, const GlobalOptions& global) {
  (void)global;
  require_file(cmd.tdump_file);
  traj::TrajectoryCorpus corpus = traj::parse_tdump(cmd.tdump_file);
  if (!cmd.receptor.empty()) {
    for (auto& seg : corpus.segments) seg.receptor_region = cmd.receptor;
  }
  Fingerprint fp;
  fp.add("cmd", "convert-tdump");
  fp.add("tdump", cmd.tdump_file);
  fp.add("receptor", cmd.receptor);
  traj::write_corpus(corpus, cmd.out, fp.hex());
  std::cerr << "aeronet: converted " << corpus.segments.size() << " trajectories to "
            << cmd.out << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"trajectory-based connectivity networks"};
  app.require_subcommand(1);
  app.set_config("--config", "", "key=value config file; section per subcommand");

  GlobalOptions global;
  app.add_option("--seed", global.seed, "RNG seed for everything stochastic")
      ->default_val(0);
  app.add_option("--threads", global.threads, "worker threads; 0 = machine parallelism")
      ->default_val(0);
  app.add_option("--edge-direction", global.edge_direction, "transport | sampling")
      ->default_val("transport");
  app.add_option("--cost-mode", global.cost_mode, "reciprocal | direct")
      ->default_val("reciprocal");
  app.add_option("--b-area", global.b_area, "unit | real (receptor area in km^2)")
      ->default_val("unit");

  GridCmd grid;
  CLI::App* grid_cmd = app.add_subcommand("grid", "emit a regular grid partition");
  grid_cmd->add_option("--grid", grid.grid_spec, "lon0,lat0,lon1,lat1,cell_km")
      ->required();
  grid_cmd->add_option("--mask", grid.mask_file,
                       "GeoJSON polygon; keep cells whose center is inside");
  grid_cmd->add_option("--out", grid.out, "output GeoJSON")->required();

  BuffersCmd buffers;
  CLI::App* buffers_cmd =
      app.add_subcommand("buffers", "emit circular buffer regions around centers");
  buffers_cmd->add_option("--centers", buffers.centers_file, "CSV id,lon_deg,lat_deg")
      ->required();
  buffers_cmd->add_option("--radius-km", buffers.radius_km, "buffer radius")
      ->default_val(20.0);
  buffers_cmd->add_option("--vertices", buffers.vertices, "polygon vertex count")
      ->default_val(64);
  buffers_cmd->add_option("--out", buffers.out, "output GeoJSON")->required();

  SimulateCmd sim;
  CLI::App* sim_cmd =
      app.add_subcommand("simulate", "generate a synthetic trajectory corpus");
  sim_cmd->add_option("--field", sim.field,
                      "uniform | rotation | shear | double_gyre")
      ->default_val("uniform");
  sim_cmd->add_option("--u", sim.u, "uniform: east component (deg/s)");
  sim_cmd->add_option("--v", sim.v, "uniform: north component (deg/s)");
  sim_cmd->add_option("--omega", sim.omega, "rotation / double_gyre frequency");
  sim_cmd->add_option("--center", sim.center, "rotation center 'x,y'")
      ->default_val("0,0");
  sim_cmd->add_option("--k", sim.k, "shear rate");
  sim_cmd->add_option("--amplitude", sim.amplitude, "double_gyre amplitude")
      ->default_val(0.1);
  sim_cmd->add_option("--eps", sim.eps, "double_gyre asymmetry")->default_val(0.25);
  sim_cmd->add_option("--arrivals", sim.arrivals_file,
                      "CSV lon_deg,lat_deg[,receptor_region]")
      ->required();
  sim_cmd->add_option("--times", sim.times_file, "one ISO-8601 UTC time per line")
      ->required();
  sim_cmd->add_option("--delta", sim.delta, "signed lag, e.g. -48h")
      ->default_val("-48h");
  sim_cmd->add_option("--fix-interval", sim.fix_interval, "spacing between fixes")
      ->default_val("1h");
  sim_cmd->add_option("--step", sim.step_seconds, "RK4 step in seconds")
      ->default_val(60.0);
  sim_cmd->add_option("--anchor", sim.anchor, "planar origin as 'lon,lat'")
      ->default_val("0,0");
  sim_cmd->add_flag("--emit-jacdet", sim.emit_jacdet,
                    "attach |det J| as a cov:jacdet column");
  sim_cmd->add_option("--out", sim.out, "output TrajCsvV1")->required();

  NetworkCmd network;
  CLI::App* network_cmd =
      app.add_subcommand("network", "estimate windowed connectivity networks");
  network_cmd->add_option("--partition", network.partition_file, "GeoJSON partition")
      ->required();
  network_cmd->add_option("--corpus", network.corpus_file, "TrajCsvV1 corpus")
      ->required();
  network_cmd->add_option("--context", network.context,
                          "whole | yearly | monthly-pooled")
      ->default_val("whole");
  network_cmd->add_option("--t-length", network.t_length, "|T| in the estimator")
      ->default_val(1.0);
  network_cmd->add_option("--out", network.out, "output edge-list CSV")->required();
  network_cmd->add_option("--dense-dir", network.dense_dir,
                          "also write dense per-window matrices here");
  network.measure.attach(network_cmd);

  IndicesCmd indices;
  CLI::App* indices_cmd =
      app.add_subcommand("indices", "compute the per-window index battery");
  indices_cmd->add_option("--edges", indices.edges_file, "edge-list CSV")->required();
  indices_cmd->add_option("--out", indices.out, "output indices CSV")->required();
  indices_cmd->add_option("--n-null", indices.n_null,
                          "null-model replicates for small-worldness")
      ->default_val(20);
  indices_cmd->add_option("--strength", indices.strength,
                          "in | out | total strengths for the power-law fit")
      ->default_val("total");

  ClusterCmd cluster;
  CLI::App* cluster_cmd =
      app.add_subcommand("cluster", "complete-linkage clustering of index vectors");
  cluster_cmd->add_option("--indices", cluster.indices_file, "indices CSV")
      ->required();
  cluster_cmd->add_option("--out", cluster.out, "output Newick file")->required();
  cluster_cmd->add_option("--report", cluster.report, "merge table CSV");
  cluster_cmd->add_flag("--no-standardize", cluster.no_standardize,
                        "cluster on raw index values");

  AppendixCmd appendix;
  CLI::App* appendix_cmd = app.add_subcommand(
      "appendix", "edge categories, centroid distances, bearing histograms");
  appendix_cmd->add_option("--edges", appendix.edges_file, "edge-list CSV")
      ->required();
  appendix_cmd->add_option("--partition", appendix.partition_file, "GeoJSON partition")
      ->required();
  appendix_cmd->add_option("--out-dir", appendix.out_dir, "output directory")
      ->required();
  appendix_cmd->add_option("--bins", appendix.bins, "quantile categories")
      ->default_val(5);
  appendix_cmd->add_option("--sectors", appendix.sectors, "bearing sectors")
      ->default_val(16);

  TdumpCmd tdump;
  CLI::App* tdump_cmd =
      app.add_subcommand("convert-tdump", "convert HYSPLIT tdump to TrajCsvV1");
  tdump_cmd->add_option("--tdump", tdump.tdump_file, "tdump input")->required();
  tdump_cmd->add_option("--out", tdump.out, "output TrajCsvV1")->required();
  tdump_cmd->add_option("--receptor", tdump.receptor,
                        "assign this receptor region id to every trajectory");

  // global flags may appear after the subcommand name
  for (CLI::App* sub : {grid_cmd, buffers_cmd, sim_cmd, network_cmd, indices_cmd,
                        cluster_cmd, appendix_cmd, tdump_cmd}) {
    sub->fallthrough();
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "aeronet: " << e.what() << "\n";
    return 2;
  }

  try {
    if (grid_cmd->parsed()) return run_grid(grid, global);
    if (buffers_cmd->parsed()) return run_buffers(buffers, global);
    if (sim_cmd->parsed()) return run_simulate(sim, global);
    if (network_cmd->parsed()) return run_network(network, global);
    if (indices_cmd->parsed()) return run_indices(indices, global);
    if (cluster_cmd->parsed()) return run_cluster(cluster, global);
    if (appendix_cmd->parsed()) return run_appendix(appendix, global);
    if (tdump_cmd->parsed()) return run_tdump(tdump, global);
  } catch (const ValidationError& e) {
    std::cerr << "aeronet: " << e.what() << "\n";
    return 2;
  } catch (const DataError& e) {
    std::cerr << "aeronet: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "aeronet: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
