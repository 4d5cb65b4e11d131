#ifndef AERONET_METRICS_HPP
#define AERONET_METRICS_HPP

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "aeronet/geometry.hpp"
#include "aeronet/network.hpp"

namespace aeronet::metrics {

/// Shortest-path edge cost: strong connectivity = short distance (reciprocal,
/// the default) or the weight itself (direct).
enum class CostMode { reciprocal, direct };
CostMode parse_cost_mode(std::string_view text);
std::string_view cost_mode_name(CostMode mode);

/// Weight sum over the number of possible edges.
double density(const net::WindowedAdjacency& w);

struct ShortestPathStats {
  double mean = 0.0;
  double sd = 0.0;        ///< population sd over reachable ordered pairs
  double diameter = 0.0;  ///< longest finite shortest path
  std::size_t unreachable_pairs = 0;
};

/// Dijkstra from every node over edges with positive weight.
ShortestPathStats shortest_paths(const net::WindowedAdjacency& w, CostMode mode,
                                 unsigned threads = 1);

/// Weighted global clustering on the symmetrized matrix max(w_ij, w_ji):
/// closed-triplet value over total-triplet value, triplet value = arithmetic
/// mean of its two edge weights.
double transitivity(const net::WindowedAdjacency& w);

/// Generates the replicate null graphs used by small_worldness: same node and
/// edge count, uniform edge placement, weights a permutation of the observed
/// positive weights.
net::WindowedAdjacency null_model(const net::WindowedAdjacency& w,
                                  std::uint64_t seed);

using NullGenerator = std::function<net::WindowedAdjacency(std::size_t replicate)>;

/// (C/C_null) / (L/L_null) against n_null seeded null-model replicates.
double small_worldness(const net::WindowedAdjacency& w, CostMode mode,
                       std::size_t n_null, std::uint64_t seed);
/// Same, with an injected replicate generator (test hook).
double small_worldness_with_null(const net::WindowedAdjacency& w, CostMode mode,
                                 std::size_t n_null, const NullGenerator& gen);

enum class StrengthMode { in, out, total };

struct PowerLawFit {
  double alpha = 0.0;
  double k_min = 0.0;
  double ks_distance = 0.0;
  std::size_t n_tail = 0;
};

/// Continuous power-law MLE with the cutoff chosen by minimizing the
/// Kolmogorov-Smirnov distance over observed values.
PowerLawFit fit_power_law(std::vector<double> values);

/// Fit on node strengths (weighted degrees) for the chosen mode.
PowerLawFit scale_free_alpha(const net::WindowedAdjacency& w, StrengthMode mode);

/// Pearson correlation between per-node in-strength and out-strength.
double degree_correlation(const net::WindowedAdjacency& w);

struct IndexVector {
  std::string window_id;
  std::optional<double> diameter;
  std::optional<double> density;
  std::optional<double> transitivity;
  std::optional<double> sp_mean;
  std::optional<double> sp_sd;
  std::optional<double> small_worldness;
  std::optional<double> scale_free_alpha;
  std::optional<double> degree_correlation;
  // provenance
  std::string cost_mode = "reciprocal";
  std::uint64_t null_seed = 0;
  std::size_t n_null = 0;
  std::size_t unreachable_pairs = 0;
  std::vector<std::string> issues;  ///< component errors, one per absent field
};

struct IndexOptions {
  CostMode cost_mode = CostMode::reciprocal;
  std::size_t n_null = 20;
  std::uint64_t seed = 0;
  StrengthMode strength_mode = StrengthMode::total;
  unsigned threads = 1;
};

/// Assembles the full index battery; a failing component leaves its field
/// absent and appends a note to `issues`.
IndexVector index_vector(const net::WindowedAdjacency& w, const IndexOptions& options);

void write_indices_csv(const std::vector<IndexVector>& rows,
                       const std::filesystem::path& path,
                       std::string_view config_fingerprint = {});
std::vector<IndexVector> read_indices_csv(const std::filesystem::path& path);

// -- clustering ---------------------------------------------------------------

struct Dendrogram {
  std::vector<std::string> leaves;
  struct Merge {
    std::size_t left;   ///< node index: 0..N-1 leaves, then N+k for merge k
    std::size_t right;
    double height;
  };
  std::vector<Merge> merges;  ///< N-1 merges, non-decreasing heights

  std::string to_newick() const;
};

/// Complete-linkage agglomerative clustering of labelled points under
/// Euclidean distance. Ties break on the lexicographically smallest cluster
/// labels (a cluster is labelled by its smallest leaf).
Dendrogram hclust_complete_points(const std::vector<std::string>& labels,
                                  const std::vector<std::vector<double>>& points);

/// Clustering of index vectors in the 8-dimensional index space. Fields
/// absent in any vector are dropped uniformly (reported via dropped_fields);
/// optional per-dimension z-score standardization. Throws IncompleteVectors
/// when fewer than 2 vectors or no usable dimension remains.
Dendrogram hclust_complete(const std::vector<IndexVector>& vectors, bool standardize,
                           std::vector<std::string>* dropped_fields = nullptr);

// -- appendix statistics --------------------------------------------------------

struct EdgeRef {
  std::string window_id;
  std::string src;
  std::string dst;
  double weight = 0.0;
};

struct EdgeCategories {
  std::vector<std::pair<EdgeRef, int>> edges;  ///< category is 1-based, 1 = weakest
  std::vector<double> bin_edges;               ///< n_bins-1 interior quantiles
  int n_bins = 5;
  bool degenerate = false;  ///< all weights equal: single bin, warn
};

/// Empirical-quantile categories over positive edge weights; ties go to the
/// lower bin. Throws TooFewEdges when fewer than n_bins positive edges exist.
EdgeCategories edge_quantile_categories(const net::WindowedAdjacency& w,
                                        int n_bins = 5);
/// Pooled across every window of the sequence.
EdgeCategories edge_quantile_categories(const net::NetworkSequence& seq,
                                        int n_bins = 5);

struct DistanceSample {
  int category;
  double distance_km;
};

/// Haversine distance between the src and dst region centroids of every
/// categorized edge.
std::vector<DistanceSample> distance_by_category(const EdgeCategories& categories,
                                                 const geo::Partition& partition);

struct FiveNumber {
  double min = 0.0, q1 = 0.0, median = 0.0, q3 = 0.0, max = 0.0;
};
std::map<int, FiveNumber> five_number_by_category(
    const std::vector<DistanceSample>& samples);

/// Per-category circular histogram of src->dst centroid bearings, n_sectors
/// equal sectors starting at north.
std::map<int, std::vector<std::size_t>> bearing_histogram(
    const EdgeCategories& categories, const geo::Partition& partition,
    int n_sectors = 16);

}  // namespace aeronet::metrics

#endif
