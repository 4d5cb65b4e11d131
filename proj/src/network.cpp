#include "aeronet/network.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include "aeronet/parallel.hpp"
#include "aeronet/summation.hpp"

namespace aeronet::net {

Direction parse_direction(std::string_view text) {
  if (text == "sampling") return Direction::sampling;
  if (text == "transport") return Direction::transport;
  throw ValidationError("unknown edge direction '" + std::string(text) +
                        "' (expected sampling | transport)");
}

std::string_view direction_name(Direction d) {
  return d == Direction::sampling ? "sampling" : "transport";
}

WindowedAdjacency::WindowedAdjacency(std::string window_id,
                                     std::vector<std::string> node_ids)
    : window_id_(std::move(window_id)), node_ids_(std::move(node_ids)) {
  const std::size_t n = node_ids_.size();
  w_.assign(n * n, 0.0);
  present_.assign(n * n, 0);
}

void WindowedAdjacency::set_edge(std::size_t i, std::size_t j, double weight) {
  if (i == j) throw DataError("adjacency diagonal must stay empty");
  if (!(weight >= 0.0) || !std::isfinite(weight)) {
    throw DataError("edge weights must be non-negative and finite");
  }
  w_[i * n() + j] = weight;
  present_[i * n() + j] = 1;
}

WindowedAdjacency WindowedAdjacency::transposed() const {
  WindowedAdjacency out(window_id_, node_ids_);
  out.direction = direction == Direction::sampling ? Direction::transport
                                                   : Direction::sampling;
  out.measure_descriptor = measure_descriptor;
  out.b_area_mode = b_area_mode;
  for (std::size_t i = 0; i < n(); ++i) {
    for (std::size_t j = 0; j < n(); ++j) {
      if (i != j && has_edge(i, j)) out.set_edge(j, i, weight(i, j));
    }
  }
  return out;
}

void NetworkSequence::validate() const {
  if (windows.empty()) return;
  const auto& ids = windows.front().node_ids();
  std::set<std::string> seen;
  for (std::size_t k = 0; k < windows.size(); ++k) {
    if (windows[k].node_ids() != ids) {
      throw DataError("window '" + windows[k].window_id() +
                      "' has a different node set");
    }
    if (!seen.insert(windows[k].window_id()).second) {
      throw DataError("duplicate window id '" + windows[k].window_id() + "'");
    }
    if (k > 0 && windows[k - 1].window_id() > windows[k].window_id()) {
      throw DataError("window ids out of order");
    }
  }
}

NetworkSequence build_networks(const traj::TrajectoryCorpus& corpus,
                               const geo::Partition& partition,
                               const conn::PointwiseMeasure& measure,
                               const conn::EstimatorConfig& cfg,
                               const BuildOptions& options) {
  conn::validate_measure_against(measure, corpus);
  if (!(cfg.t_length > 0.0)) throw ValidationError("|T| must be > 0");

  std::vector<std::string> node_ids;
  node_ids.reserve(partition.size());
  for (const geo::Region& r : partition.regions()) node_ids.push_back(r.id());

  const auto windows = traj::window_corpus(corpus, options.context);
  NetworkSequence seq;
  seq.windows.reserve(windows.size());

  const std::size_t n = partition.size();
  for (const auto& [window_id, window] : windows) {
    // receptor resolution, in corpus order
    std::vector<std::vector<const traj::TrajectorySegment*>> groups(n);
    std::size_t ambiguous = 0;
    for (const traj::TrajectorySegment& seg : window.segments) {
      std::size_t receptor;
      if (seg.receptor_region) {
        const auto idx = partition.index_of(*seg.receptor_region);
        if (!idx) throw UnresolvedReceptor(seg.traj_id);
        receptor = *idx;
      } else {
        const auto hits = partition.locate(seg.origin);
        if (hits.empty()) throw UnresolvedReceptor(seg.traj_id);
        if (hits.size() > 1) ++ambiguous;
        receptor = hits.front();  // lowest region id
      }
      groups[receptor].push_back(&seg);
    }
    if (ambiguous > 0) {
      std::cerr << "aeronet: window " << window_id << ": " << ambiguous
                << " origin(s) on shared boundaries resolved to the lowest region id\n";
    }

    WindowedAdjacency sampling(window_id, node_ids);
    sampling.direction = Direction::sampling;
    sampling.measure_descriptor = measure.descriptor();
    sampling.b_area_mode =
        cfg.b_area_mode == conn::EstimatorConfig::BAreaMode::unit ? "unit" : "km2";

    // per-receptor rows are independent work units
    parallel_for(n, options.threads, [&](std::size_t i) {
      const auto& group = groups[i];
      if (group.empty()) return;
      const double scale = cfg.t_length * cfg.b_area(partition.at(i));
      const double count = static_cast<double>(group.size());

      // candidate regions per segment, from the trajectory bounding box
      std::vector<std::vector<std::uint8_t>> candidate(group.size());
      for (std::size_t s = 0; s < group.size(); ++s) {
        candidate[s].assign(n, 0);
        const auto pts = group[s]->timed_points();
        geo::BBox box{pts[0].p.lon, pts[0].p.lat, pts[0].p.lon, pts[0].p.lat};
        for (const geo::TimedPoint& tp : pts) {
          box.min_lon = std::min(box.min_lon, tp.p.lon);
          box.max_lon = std::max(box.max_lon, tp.p.lon);
          box.min_lat = std::min(box.min_lat, tp.p.lat);
          box.max_lat = std::max(box.max_lat, tp.p.lat);
        }
        for (std::size_t j : partition.query(box)) candidate[s][j] = 1;
      }

      std::vector<double> values(group.size());
      for (std::size_t j = 0; j < n; ++j) {
        if (j == i) continue;
        for (std::size_t s = 0; s < group.size(); ++s) {
          values[s] = candidate[s][j]
                          ? conn::eval_pointwise(measure, *group[s], partition.at(j))
                          : 0.0;
        }
        std::vector<double> sorted = values;
        const double mean = canonical_sum(sorted) / count;
        sampling.set_edge(i, j, mean * scale);
      }
    });

    seq.windows.push_back(options.direction == Direction::transport
                              ? sampling.transposed()
                              : std::move(sampling));
  }
  seq.validate();
  return seq;
}

// ---------------------------------------------------------------------------
// edge-list serialization

namespace {

constexpr std::string_view kEdgesMagic = "# aeronet-edges v1";

std::string format_double(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

void check_id_charset(const std::string& id) {
  if (id.find_first_of(",;|\n") != std::string::npos) {
    throw ValidationError("id '" + id + "' contains a reserved delimiter");
  }
}

std::map<std::string, std::string> parse_header_pairs(std::string_view line) {
  std::map<std::string, std::string> out;
  std::size_t pos = kEdgesMagic.size();
  while (pos < line.size()) {
    if (line[pos] == ';' || line[pos] == ' ') {
      ++pos;
      continue;
    }
    const std::size_t eq = line.find('=', pos);
    if (eq == std::string_view::npos) break;
    const std::size_t end = line.find(';', eq);
    const std::string key(line.substr(pos, eq - pos));
    const std::string value(
        line.substr(eq + 1, (end == std::string_view::npos ? line.size() : end) -
                                (eq + 1)));
    out[key] = value;
    if (end == std::string_view::npos) break;
    pos = end + 1;
  }
  return out;
}

std::vector<std::string> split_on(const std::string& text, char sep) {
  std::vector<std::string> out;
  if (text.empty()) return out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = text.find(sep, start);
    if (pos == std::string::npos) {
      out.push_back(text.substr(start));
      return out;
    }
    out.push_back(text.substr(start, pos - start));
    start = pos + 1;
  }
}

}  // namespace

void write_edges(const NetworkSequence& seq, const std::filesystem::path& path,
                 std::string_view config_fingerprint) {
  seq.validate();
  if (seq.windows.empty()) throw DataError("cannot write an empty network sequence");
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write edge file '" + path.string() + "'");

  const WindowedAdjacency& first = seq.windows.front();
  for (const std::string& id : first.node_ids()) check_id_charset(id);

  out << kEdgesMagic << "; measure=" << first.measure_descriptor
      << "; direction=" << direction_name(first.direction)
      << "; b_area=" << first.b_area_mode << "; nodes=";
  for (std::size_t i = 0; i < first.node_ids().size(); ++i) {
    if (i) out << '|';
    out << first.node_ids()[i];
  }
  out << "; windows=";
  for (std::size_t k = 0; k < seq.windows.size(); ++k) {
    check_id_charset(seq.windows[k].window_id());
    if (k) out << '|';
    out << seq.windows[k].window_id();
  }
  if (!config_fingerprint.empty()) out << "; config=" << config_fingerprint;
  out << '\n';
  out << "window_id,src,dst,weight\n";
  for (const WindowedAdjacency& w : seq.windows) {
    const std::size_t n = w.n();
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        if (i == j || !w.has_edge(i, j)) continue;
        out << w.window_id() << ',' << w.node_ids()[i] << ',' << w.node_ids()[j]
            << ',' << format_double(w.weight(i, j)) << '\n';
      }
    }
  }
}

NetworkSequence read_edges(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open edge file '" + path.string() + "'");
  std::string line;
  if (!std::getline(in, line) || line.rfind(kEdgesMagic, 0) != 0) {
    throw FormatVersionMismatch("edge file '" + path.string() +
                                "' does not start with '" + std::string(kEdgesMagic) +
                                "'");
  }
  const auto header = parse_header_pairs(line);
  auto require = [&](const char* key) -> const std::string& {
    auto it = header.find(key);
    if (it == header.end()) {
      throw FormatVersionMismatch("edge file header lacks '" + std::string(key) + "'");
    }
    return it->second;
  };
  const std::vector<std::string> node_ids = split_on(require("nodes"), '|');
  const std::vector<std::string> window_ids = split_on(require("windows"), '|');
  const Direction direction = parse_direction(require("direction"));
  const std::string& measure = require("measure");
  const std::string& b_area = require("b_area");

  if (!std::getline(in, line) || line != "window_id,src,dst,weight") {
    throw FormatVersionMismatch("edge file '" + path.string() +
                                "' lacks the column header");
  }

  std::map<std::string, std::size_t> node_index;
  for (std::size_t i = 0; i < node_ids.size(); ++i) node_index[node_ids[i]] = i;

  NetworkSequence seq;
  std::map<std::string, std::size_t> window_index;
  for (const std::string& wid : window_ids) {
    window_index[wid] = seq.windows.size();
    WindowedAdjacency w(wid, node_ids);
    w.direction = direction;
    w.measure_descriptor = measure;
    w.b_area_mode = b_area;
    seq.windows.push_back(std::move(w));
  }

  std::size_t line_no = 2;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto fields = split_on(line, ',');
    if (fields.size() != 4) {
      throw DataError("edge file line " + std::to_string(line_no) +
                      ": expected 4 fields");
    }
    const auto wit = window_index.find(fields[0]);
    const auto sit = node_index.find(fields[1]);
    const auto dit = node_index.find(fields[2]);
    if (wit == window_index.end() || sit == node_index.end() ||
        dit == node_index.end()) {
      throw DataError("edge file line " + std::to_string(line_no) +
                      ": unknown window or node id");
    }
    double weight = 0.0;
    auto [ptr, ec] =
        std::from_chars(fields[3].data(), fields[3].data() + fields[3].size(), weight);
    if (ec != std::errc{} || ptr != fields[3].data() + fields[3].size()) {
      throw DataError("edge file line " + std::to_string(line_no) + ": bad weight");
    }
    seq.windows[wit->second].set_edge(sit->second, dit->second, weight);
  }
  seq.validate();
  return seq;
}

void write_dense_matrix(const WindowedAdjacency& w, const std::filesystem::path& path,
                        std::string_view config_fingerprint) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write matrix file '" + path.string() + "'");
  out << "# aeronet-matrix v1; window=" << w.window_id()
      << "; measure=" << w.measure_descriptor
      << "; direction=" << direction_name(w.direction);
  if (!config_fingerprint.empty()) out << "; config=" << config_fingerprint;
  out << '\n';
  out << "node";
  for (const std::string& id : w.node_ids()) out << ',' << id;
  out << '\n';
  for (std::size_t i = 0; i < w.n(); ++i) {
    out << w.node_ids()[i];
    for (std::size_t j = 0; j < w.n(); ++j) {
      out << ',';
      if (i != j && w.has_edge(i, j)) out << format_double(w.weight(i, j));
    }
    out << '\n';
  }
}

}  // namespace aeronet::net
