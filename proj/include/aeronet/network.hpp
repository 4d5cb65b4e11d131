#ifndef AERONET_NETWORK_HPP
#define AERONET_NETWORK_HPP

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "aeronet/connectivity.hpp"
#include "aeronet/geometry.hpp"
#include "aeronet/trajectory.hpp"

namespace aeronet::net {

/// Edge arrow semantics. `sampling` stores row = receptor (the region whose
/// trajectories were sampled); `transport` is its transpose, arrows running
/// source -> receptor (the way material actually moves for backward lags).
enum class Direction { sampling, transport };

Direction parse_direction(std::string_view text);
std::string_view direction_name(Direction d);

/// One time window's N x N non-negative weight matrix with zero diagonal.
/// Edges are present or absent; absent means "no samples", which downstream
/// metrics read as 0 but files keep distinct.
class WindowedAdjacency {
 public:
  WindowedAdjacency(std::string window_id, std::vector<std::string> node_ids);

  const std::string& window_id() const { return window_id_; }
  const std::vector<std::string>& node_ids() const { return node_ids_; }
  std::size_t n() const { return node_ids_.size(); }

  double weight(std::size_t i, std::size_t j) const { return w_[i * n() + j]; }
  bool has_edge(std::size_t i, std::size_t j) const {
    return present_[i * n() + j] != 0;
  }
  /// Sets a present edge; rejects the diagonal and negative/non-finite weights.
  void set_edge(std::size_t i, std::size_t j, double weight);

  WindowedAdjacency transposed() const;

  Direction direction = Direction::transport;
  std::string measure_descriptor;
  std::string b_area_mode = "unit";  ///< "unit" | "km2"

 private:
  std::string window_id_;
  std::vector<std::string> node_ids_;
  std::vector<double> w_;
  std::vector<std::uint8_t> present_;
};

/// Windowed adjacencies sharing one node set, windows unique and sorted.
struct NetworkSequence {
  std::vector<WindowedAdjacency> windows;
  void validate() const;
};

struct BuildOptions {
  traj::WindowContext context = traj::WindowContext::whole;
  Direction direction = Direction::transport;
  unsigned threads = 1;
};

/// Assembles one adjacency per time window: weight(i,j) is the integrated
/// connectivity estimated from segments arriving in region i against region j
/// (then transposed for the transport convention). Receptor resolution uses
/// the explicit receptor_region id when present, else a point-in-partition
/// lookup of the origin (ties broken by lowest region id, logged to stderr).
/// Throws UnresolvedReceptor when neither resolves.
NetworkSequence build_networks(const traj::TrajectoryCorpus& corpus,
                               const geo::Partition& partition,
                               const conn::PointwiseMeasure& measure,
                               const conn::EstimatorConfig& cfg,
                               const BuildOptions& options);

/// Sparse edge-list CSV, lossless: absent edges have no row, node order and
/// empty windows are carried in the header line.
void write_edges(const NetworkSequence& seq, const std::filesystem::path& path,
                 std::string_view config_fingerprint = {});
NetworkSequence read_edges(const std::filesystem::path& path);

/// Dense per-window matrix CSV; absent edges are empty cells.
void write_dense_matrix(const WindowedAdjacency& w, const std::filesystem::path& path,
                        std::string_view config_fingerprint = {});

}  // namespace aeronet::net

#endif
