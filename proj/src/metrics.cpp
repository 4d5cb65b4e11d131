#include "aeronet/metrics.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <queue>
#include <random>
#include <set>
#include <sstream>

#include "aeronet/parallel.hpp"
#include "aeronet/summation.hpp"
#include "aeronet/timeutil.hpp"

namespace aeronet::metrics {

namespace {

std::string format_double(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

double parse_double(std::string_view field, const char* what) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (ec != std::errc{} || ptr != field.data() + field.size()) {
    throw DataError(std::string("bad ") + what + " '" + std::string(field) + "'");
  }
  return v;
}

// type-7 quantile of sorted values
double quantile_sorted(const std::vector<double>& x, double p) {
  if (x.empty()) throw std::invalid_argument("quantile of empty sample");
  if (x.size() == 1) return x[0];
  const double h = static_cast<double>(x.size() - 1) * p;
  const auto lo = static_cast<std::size_t>(h);
  if (lo + 1 >= x.size()) return x.back();
  return x[lo] + (h - static_cast<double>(lo)) * (x[lo + 1] - x[lo]);
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t replicate) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (replicate + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace

CostMode parse_cost_mode(std::string_view text) {
  if (text == "reciprocal") return CostMode::reciprocal;
  if (text == "direct") return CostMode::direct;
  throw ValidationError("unknown cost mode '" + std::string(text) +
                        "' (expected reciprocal | direct)");
}

std::string_view cost_mode_name(CostMode mode) {
  return mode == CostMode::reciprocal ? "reciprocal" : "direct";
}

double density(const net::WindowedAdjacency& w) {
  const std::size_t n = w.n();
  if (n < 2) throw TooFewNodes("density needs >= 2 nodes");
  KahanSum sum;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i != j && w.has_edge(i, j)) sum.add(w.weight(i, j));
    }
  }
  return sum.sum / (static_cast<double>(n) * static_cast<double>(n - 1));
}

ShortestPathStats shortest_paths(const net::WindowedAdjacency& w, CostMode mode,
                                 unsigned threads) {
  const std::size_t n = w.n();
  if (n < 2) throw TooFewNodes("shortest paths need >= 2 nodes");

  struct Arc {
    std::uint32_t to;
    double cost;
  };
  std::vector<std::vector<Arc>> adj(n);
  std::size_t n_edges = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j || !w.has_edge(i, j)) continue;
      const double weight = w.weight(i, j);
      if (weight <= 0.0) continue;
      const double cost = mode == CostMode::reciprocal ? 1.0 / weight : weight;
      adj[i].push_back(Arc{static_cast<std::uint32_t>(j), cost});
      ++n_edges;
    }
  }
  if (n_edges == 0) throw NoEdges("network has no positive-weight edges");

  struct SourceStats {
    double sum = 0.0;
    double sum_sq = 0.0;
    double max = 0.0;
    std::size_t reachable = 0;
  };
  std::vector<SourceStats> per_source(n);

  parallel_for(n, threads, [&](std::size_t src) {
    constexpr double kInf = std::numeric_limits<double>::infinity();
    std::vector<double> dist(n, kInf);
    dist[src] = 0.0;
    using Item = std::pair<double, std::uint32_t>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
    pq.emplace(0.0, static_cast<std::uint32_t>(src));
    while (!pq.empty()) {
      const auto [d, u] = pq.top();
      pq.pop();
      if (d > dist[u]) continue;
      for (const Arc& arc : adj[u]) {
        const double nd = d + arc.cost;
        if (nd < dist[arc.to]) {
          dist[arc.to] = nd;
          pq.emplace(nd, arc.to);
        }
      }
    }
    SourceStats st;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == src || dist[j] == kInf) continue;
      st.sum += dist[j];
      st.sum_sq += dist[j] * dist[j];
      st.max = std::max(st.max, dist[j]);
      ++st.reachable;
    }
    per_source[src] = st;
  });

  KahanSum total, total_sq;
  std::size_t reachable = 0;
  double diameter = 0.0;
  for (const SourceStats& st : per_source) {
    total.add(st.sum);
    total_sq.add(st.sum_sq);
    reachable += st.reachable;
    diameter = std::max(diameter, st.max);
  }
  ShortestPathStats out;
  out.unreachable_pairs = n * (n - 1) - reachable;
  const double m = static_cast<double>(reachable);
  out.mean = total.sum / m;
  out.sd = std::sqrt(std::max(0.0, total_sq.sum / m - out.mean * out.mean));
  out.diameter = diameter;
  return out;
}

double transitivity(const net::WindowedAdjacency& w) {
  const std::size_t n = w.n();
  if (n < 3) throw NoTriplets("transitivity needs >= 3 nodes");
  // symmetrized weights
  std::vector<double> s(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      double v = 0.0;
      if (w.has_edge(i, j)) v = w.weight(i, j);
      if (w.has_edge(j, i)) v = std::max(v, w.weight(j, i));
      s[i * n + j] = v;
      s[j * n + i] = v;
    }
  }
  std::vector<std::vector<std::uint32_t>> nbr(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i != j && s[i * n + j] > 0.0) nbr[i].push_back(static_cast<std::uint32_t>(j));
    }
  }
  double numer = 0.0;
  double denom = 0.0;
  for (std::size_t c = 0; c < n; ++c) {
    const auto& list = nbr[c];
    for (std::size_t a = 0; a < list.size(); ++a) {
      for (std::size_t b = a + 1; b < list.size(); ++b) {
        const double value = 0.5 * (s[c * n + list[a]] + s[c * n + list[b]]);
        denom += value;
        if (s[list[a] * n + list[b]] > 0.0) numer += value;
      }
    }
  }
  if (denom == 0.0) throw NoTriplets("network has no connected triplets");
  return numer / denom;
}

net::WindowedAdjacency null_model(const net::WindowedAdjacency& w,
                                  std::uint64_t seed) {
  const std::size_t n = w.n();
  std::vector<double> weights;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i != j && w.has_edge(i, j) && w.weight(i, j) > 0.0) {
        weights.push_back(w.weight(i, j));
      }
    }
  }
  const std::size_t e = weights.size();
  const std::size_t m = n * (n - 1);
  std::mt19937_64 rng(seed);

  // Floyd's sampling of e distinct ordered pairs out of m
  std::set<std::size_t> chosen;
  for (std::size_t k = m - e; k < m; ++k) {
    std::uniform_int_distribution<std::size_t> pick(0, k);
    const std::size_t r = pick(rng);
    if (!chosen.insert(r).second) chosen.insert(k);
  }
  std::shuffle(weights.begin(), weights.end(), rng);

  net::WindowedAdjacency out(w.window_id() + "|null", w.node_ids());
  out.direction = w.direction;
  out.measure_descriptor = w.measure_descriptor;
  out.b_area_mode = w.b_area_mode;
  std::size_t idx = 0;
  for (std::size_t p : chosen) {
    const std::size_t i = p / (n - 1);
    const std::size_t rem = p % (n - 1);
    const std::size_t j = rem < i ? rem : rem + 1;
    out.set_edge(i, j, weights[idx++]);
  }
  return out;
}

double small_worldness_with_null(const net::WindowedAdjacency& w, CostMode mode,
                                 std::size_t n_null, const NullGenerator& gen) {
  if (n_null < 1) throw std::invalid_argument("small_worldness: n_null must be >= 1");
  const double c_obs = transitivity(w);
  const double l_obs = shortest_paths(w, mode).mean;
  KahanSum c_sum, l_sum;
  for (std::size_t r = 0; r < n_null; ++r) {
    const net::WindowedAdjacency null_graph = gen(r);
    double c_r = 0.0;
    try {
      c_r = transitivity(null_graph);
    } catch (const NoTriplets&) {
      c_r = 0.0;
    }
    c_sum.add(c_r);
    l_sum.add(shortest_paths(null_graph, mode).mean);
  }
  const double c_null = c_sum.sum / static_cast<double>(n_null);
  const double l_null = l_sum.sum / static_cast<double>(n_null);
  if (c_null <= 0.0 || l_obs <= 0.0) {
    throw DegenerateNullModel("null model yields zero clustering or path length");
  }
  return (c_obs / c_null) / (l_obs / l_null);
}

double small_worldness(const net::WindowedAdjacency& w, CostMode mode,
                       std::size_t n_null, std::uint64_t seed) {
  return small_worldness_with_null(w, mode, n_null, [&](std::size_t r) {
    return null_model(w, mix_seed(seed, r));
  });
}

PowerLawFit fit_power_law(std::vector<double> values) {
  values.erase(std::remove_if(values.begin(), values.end(),
                              [](double v) { return !(v > 0.0) || !std::isfinite(v); }),
               values.end());
  const std::size_t n = values.size();
  if (n < 10) {
    throw InsufficientDegrees("power-law fit needs >= 10 positive values");
  }
  std::sort(values.begin(), values.end());
  std::vector<double> logs(n);
  for (std::size_t i = 0; i < n; ++i) logs[i] = std::log(values[i]);
  std::vector<double> suffix(n + 1, 0.0);
  for (std::size_t i = n; i-- > 0;) suffix[i] = suffix[i + 1] + logs[i];

  PowerLawFit best;
  bool found = false;
  for (std::size_t c = 0; c + 2 <= n; ++c) {
    if (c > 0 && values[c] == values[c - 1]) continue;  // same candidate k_min
    const double k_min = values[c];
    const double m = static_cast<double>(n - c);
    const double sum_ln = suffix[c] - m * logs[c];
    if (sum_ln <= 0.0) continue;  // zero log-spread in the tail
    const double alpha = 1.0 + m / sum_ln;
    double d = 0.0;
    for (std::size_t i = c; i < n; ++i) {
      const double f = 1.0 - std::exp((1.0 - alpha) * (logs[i] - logs[c]));
      const double lo = static_cast<double>(i - c) / m;
      const double hi = static_cast<double>(i - c + 1) / m;
      d = std::max(d, std::max(std::abs(f - lo), std::abs(f - hi)));
    }
    if (!found || d < best.ks_distance) {
      best = PowerLawFit{alpha, k_min, d, n - c};
      found = true;
    }
  }
  if (!found) {
    throw InsufficientDegrees("all strengths equal: zero log-spread");
  }
  return best;
}

PowerLawFit scale_free_alpha(const net::WindowedAdjacency& w, StrengthMode mode) {
  const std::size_t n = w.n();
  std::vector<double> strength(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j || !w.has_edge(i, j)) continue;
      const double v = w.weight(i, j);
      if (mode == StrengthMode::out || mode == StrengthMode::total) strength[i] += v;
      if (mode == StrengthMode::in || mode == StrengthMode::total) strength[j] += v;
    }
  }
  return fit_power_law(std::move(strength));
}

double degree_correlation(const net::WindowedAdjacency& w) {
  const std::size_t n = w.n();
  if (n < 3) throw TooFewNodes("degree correlation needs >= 3 nodes");
  std::vector<double> in(n, 0.0), out(n, 0.0);
  bool symmetric = true;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      const double forward = w.has_edge(i, j) ? w.weight(i, j) : 0.0;
      const double reverse = w.has_edge(j, i) ? w.weight(j, i) : 0.0;
      if (forward != reverse) symmetric = false;
      out[i] += forward;
      in[j] += forward;
    }
  }
  double mean_in = 0.0, mean_out = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mean_in += in[i];
    mean_out += out[i];
  }
  mean_in /= static_cast<double>(n);
  mean_out /= static_cast<double>(n);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = in[i] - mean_in;
    const double dy = out[i] - mean_out;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) {
    // perfectly reciprocal graphs correlate exactly even when every node has
    // the same strength; anything else is undefined
    if (symmetric) return 1.0;
    throw ZeroVariance("in- or out-strength has zero variance");
  }
  return sxy / std::sqrt(sxx * syy);
}

IndexVector index_vector(const net::WindowedAdjacency& w,
                         const IndexOptions& options) {
  IndexVector iv;
  iv.window_id = w.window_id();
  iv.cost_mode = std::string(cost_mode_name(options.cost_mode));
  iv.null_seed = options.seed;
  iv.n_null = options.n_null;

  auto guard = [&iv](const char* field, auto&& fn) {
    try {
      fn();
    } catch (const Error& e) {
      iv.issues.push_back(std::string(field) + ": " + e.what());
    }
  };
  guard("density", [&] { iv.density = density(w); });
  guard("shortest_paths", [&] {
    const ShortestPathStats sp = shortest_paths(w, options.cost_mode, options.threads);
    iv.sp_mean = sp.mean;
    iv.sp_sd = sp.sd;
    iv.diameter = sp.diameter;
    iv.unreachable_pairs = sp.unreachable_pairs;
  });
  guard("transitivity", [&] { iv.transitivity = transitivity(w); });
  guard("small_worldness", [&] {
    iv.small_worldness =
        small_worldness(w, options.cost_mode, options.n_null, options.seed);
  });
  guard("scale_free_alpha",
        [&] { iv.scale_free_alpha = scale_free_alpha(w, options.strength_mode).alpha; });
  guard("degree_correlation", [&] { iv.degree_correlation = degree_correlation(w); });
  return iv;
}

// ---------------------------------------------------------------------------
// indices CSV

namespace {

constexpr std::string_view kIndicesMagic = "# aeronet-indices v1";
constexpr std::string_view kIndicesHeader =
    "window_id,diam,dens,trans,sp_mean,sp_sd,sw,sf_alpha,dc,"
    "cost_mode,null_seed,n_null,unreachable_pairs";

std::string opt_str(const std::optional<double>& v) {
  return v ? format_double(*v) : std::string();
}

std::optional<double> opt_parse(std::string_view field, const char* what) {
  if (field.empty()) return std::nullopt;
  return parse_double(field, what);
}

}  // namespace

void write_indices_csv(const std::vector<IndexVector>& rows,
                       const std::filesystem::path& path,
                       std::string_view config_fingerprint) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write indices file '" + path.string() + "'");
  out << kIndicesMagic;
  if (!config_fingerprint.empty()) out << "; config=" << config_fingerprint;
  out << '\n' << kIndicesHeader << '\n';
  for (const IndexVector& iv : rows) {
    out << iv.window_id << ',' << opt_str(iv.diameter) << ',' << opt_str(iv.density)
        << ',' << opt_str(iv.transitivity) << ',' << opt_str(iv.sp_mean) << ','
        << opt_str(iv.sp_sd) << ',' << opt_str(iv.small_worldness) << ','
        << opt_str(iv.scale_free_alpha) << ',' << opt_str(iv.degree_correlation)
        << ',' << iv.cost_mode << ',' << iv.null_seed << ',' << iv.n_null << ','
        << iv.unreachable_pairs << '\n';
  }
}

std::vector<IndexVector> read_indices_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open indices file '" + path.string() + "'");
  std::string line;
  if (!std::getline(in, line) || line.rfind(kIndicesMagic, 0) != 0) {
    throw FormatVersionMismatch("indices file '" + path.string() +
                                "' does not start with '" +
                                std::string(kIndicesMagic) + "'");
  }
  if (!std::getline(in, line) || line != kIndicesHeader) {
    throw FormatVersionMismatch("indices file '" + path.string() +
                                "' lacks the column header");
  }
  std::vector<IndexVector> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
      const std::size_t pos = line.find(',', start);
      if (pos == std::string::npos) {
        fields.push_back(line.substr(start));
        break;
      }
      fields.push_back(line.substr(start, pos - start));
      start = pos + 1;
    }
    if (fields.size() != 13) {
      throw DataError("indices file row with " + std::to_string(fields.size()) +
                      " fields (expected 13)");
    }
    IndexVector iv;
    iv.window_id = fields[0];
    iv.diameter = opt_parse(fields[1], "diam");
    iv.density = opt_parse(fields[2], "dens");
    iv.transitivity = opt_parse(fields[3], "trans");
    iv.sp_mean = opt_parse(fields[4], "sp_mean");
    iv.sp_sd = opt_parse(fields[5], "sp_sd");
    iv.small_worldness = opt_parse(fields[6], "sw");
    iv.scale_free_alpha = opt_parse(fields[7], "sf_alpha");
    iv.degree_correlation = opt_parse(fields[8], "dc");
    iv.cost_mode = fields[9];
    iv.null_seed = static_cast<std::uint64_t>(std::strtoull(fields[10].c_str(), nullptr, 10));
    iv.n_null = static_cast<std::size_t>(std::strtoull(fields[11].c_str(), nullptr, 10));
    iv.unreachable_pairs =
        static_cast<std::size_t>(std::strtoull(fields[12].c_str(), nullptr, 10));
    rows.push_back(std::move(iv));
  }
  return rows;
}

// ---------------------------------------------------------------------------
// complete-linkage clustering

namespace {

struct Cluster {
  std::string label;  // smallest leaf label, for tie-breaking
  std::vector<std::size_t> members;
  std::size_t node;
};

}  // namespace

Dendrogram hclust_complete_points(const std::vector<std::string>& labels,
                                  const std::vector<std::vector<double>>& points) {
  const std::size_t n = labels.size();
  if (n < 2 || points.size() != n) {
    throw IncompleteVectors("clustering needs >= 2 labelled points");
  }
  const std::size_t dims = points[0].size();
  for (const auto& p : points) {
    if (p.size() != dims) throw IncompleteVectors("points differ in dimension");
  }

  std::vector<double> dist(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      double sq = 0.0;
      for (std::size_t d = 0; d < dims; ++d) {
        const double delta = points[i][d] - points[j][d];
        sq += delta * delta;
      }
      dist[i * n + j] = dist[j * n + i] = std::sqrt(sq);
    }
  }

  Dendrogram out;
  out.leaves = labels;
  std::vector<Cluster> active;
  active.reserve(n);
  for (std::size_t i = 0; i < n; ++i) active.push_back(Cluster{labels[i], {i}, i});

  auto cluster_distance = [&](const Cluster& a, const Cluster& b) {
    double worst = 0.0;
    for (std::size_t i : a.members) {
      for (std::size_t j : b.members) worst = std::max(worst, dist[i * n + j]);
    }
    return worst;
  };

  for (std::size_t merge = 0; merge + 1 < n; ++merge) {
    std::size_t best_a = 0, best_b = 1;
    double best_d = std::numeric_limits<double>::infinity();
    std::pair<std::string, std::string> best_labels;
    for (std::size_t a = 0; a < active.size(); ++a) {
      for (std::size_t b = a + 1; b < active.size(); ++b) {
        const double d = cluster_distance(active[a], active[b]);
        auto lab = std::minmax(active[a].label, active[b].label);
        std::pair<std::string, std::string> key{lab.first, lab.second};
        if (d < best_d || (d == best_d && key < best_labels)) {
          best_d = d;
          best_a = a;
          best_b = b;
          best_labels = key;
        }
      }
    }
    Cluster& ca = active[best_a];
    Cluster& cb = active[best_b];
    const bool a_first = ca.label <= cb.label;
    out.merges.push_back(Dendrogram::Merge{a_first ? ca.node : cb.node,
                                           a_first ? cb.node : ca.node, best_d});
    ca.label = std::min(ca.label, cb.label);
    ca.members.insert(ca.members.end(), cb.members.begin(), cb.members.end());
    ca.node = n + merge;
    active.erase(active.begin() + static_cast<std::ptrdiff_t>(best_b));
  }
  return out;
}

std::string Dendrogram::to_newick() const {
  const std::size_t n = leaves.size();
  auto node_height = [&](std::size_t node) {
    return node < n ? 0.0 : merges[node - n].height;
  };
  std::function<std::string(std::size_t, double)> render =
      [&](std::size_t node, double parent_height) -> std::string {
    const double branch = parent_height - node_height(node);
    if (node < n) return leaves[node] + ":" + format_double(branch);
    const Merge& m = merges[node - n];
    return "(" + render(m.left, m.height) + "," + render(m.right, m.height) +
           "):" + format_double(branch);
  };
  if (merges.empty()) {
    return n == 1 ? leaves[0] + ";" : ";";
  }
  const Merge& root = merges.back();
  return "(" + render(root.left, root.height) + "," + render(root.right, root.height) +
         ");";
}

Dendrogram hclust_complete(const std::vector<IndexVector>& vectors, bool standardize,
                           std::vector<std::string>* dropped_fields) {
  if (vectors.size() < 2) {
    throw IncompleteVectors("clustering needs >= 2 index vectors");
  }
  static const char* const kFieldNames[8] = {"diam",    "dens", "trans", "sp_mean",
                                             "sp_sd",   "sw",   "sf_alpha", "dc"};
  auto field = [](const IndexVector& iv, std::size_t k) -> const std::optional<double>& {
    switch (k) {
      case 0: return iv.diameter;
      case 1: return iv.density;
      case 2: return iv.transitivity;
      case 3: return iv.sp_mean;
      case 4: return iv.sp_sd;
      case 5: return iv.small_worldness;
      case 6: return iv.scale_free_alpha;
      default: return iv.degree_correlation;
    }
  };

  std::vector<std::size_t> kept;
  for (std::size_t k = 0; k < 8; ++k) {
    const bool complete = std::all_of(vectors.begin(), vectors.end(),
                                      [&](const IndexVector& iv) {
                                        return field(iv, k).has_value();
                                      });
    if (complete) {
      kept.push_back(k);
    } else if (dropped_fields) {
      dropped_fields->push_back(kFieldNames[k]);
    }
  }
  if (kept.empty()) {
    throw IncompleteVectors("no index is present across all windows");
  }

  std::vector<std::string> labels;
  std::vector<std::vector<double>> points;
  labels.reserve(vectors.size());
  points.reserve(vectors.size());
  for (const IndexVector& iv : vectors) {
    labels.push_back(iv.window_id);
    std::vector<double> p;
    p.reserve(kept.size());
    for (std::size_t k : kept) p.push_back(*field(iv, k));
    points.push_back(std::move(p));
  }

  if (standardize) {
    const auto m = static_cast<double>(points.size());
    for (std::size_t d = 0; d < kept.size(); ++d) {
      double mean = 0.0;
      for (const auto& p : points) mean += p[d];
      mean /= m;
      double var = 0.0;
      for (const auto& p : points) var += (p[d] - mean) * (p[d] - mean);
      const double sd = std::sqrt(var / m);
      for (auto& p : points) p[d] = sd > 0.0 ? (p[d] - mean) / sd : 0.0;
    }
  }
  return hclust_complete_points(labels, points);
}

// ---------------------------------------------------------------------------
// appendix statistics

namespace {

EdgeCategories categorize(std::vector<EdgeRef> refs, int n_bins) {
  if (n_bins < 2) throw std::invalid_argument("need >= 2 quantile bins");
  if (refs.size() < static_cast<std::size_t>(n_bins)) {
    throw TooFewEdges("need at least " + std::to_string(n_bins) +
                      " positive edges, got " + std::to_string(refs.size()));
  }
  EdgeCategories out;
  out.n_bins = n_bins;
  std::vector<double> weights;
  weights.reserve(refs.size());
  for (const EdgeRef& r : refs) weights.push_back(r.weight);
  std::sort(weights.begin(), weights.end());
  if (weights.front() == weights.back()) {
    out.degenerate = true;  // single degenerate bin
    for (EdgeRef& r : refs) out.edges.emplace_back(std::move(r), 1);
    return out;
  }
  for (int k = 1; k < n_bins; ++k) {
    out.bin_edges.push_back(
        quantile_sorted(weights, static_cast<double>(k) / n_bins));
  }
  for (EdgeRef& r : refs) {
    int cat = 1;
    for (double e : out.bin_edges) {
      if (e < r.weight) ++cat;  // ties stay in the lower bin
    }
    out.edges.emplace_back(std::move(r), cat);
  }
  return out;
}

std::vector<EdgeRef> positive_edges(const net::WindowedAdjacency& w) {
  std::vector<EdgeRef> refs;
  for (std::size_t i = 0; i < w.n(); ++i) {
    for (std::size_t j = 0; j < w.n(); ++j) {
      if (i == j || !w.has_edge(i, j) || !(w.weight(i, j) > 0.0)) continue;
      refs.push_back(EdgeRef{w.window_id(), w.node_ids()[i], w.node_ids()[j],
                             w.weight(i, j)});
    }
  }
  return refs;
}

}  // namespace

EdgeCategories edge_quantile_categories(const net::WindowedAdjacency& w, int n_bins) {
  return categorize(positive_edges(w), n_bins);
}

EdgeCategories edge_quantile_categories(const net::NetworkSequence& seq, int n_bins) {
  std::vector<EdgeRef> refs;
  for (const net::WindowedAdjacency& w : seq.windows) {
    auto part = positive_edges(w);
    refs.insert(refs.end(), std::make_move_iterator(part.begin()),
                std::make_move_iterator(part.end()));
  }
  return categorize(std::move(refs), n_bins);
}

namespace {

const geo::GeoPoint& centroid_of(const geo::Partition& partition,
                                 const std::string& id) {
  const auto idx = partition.index_of(id);
  if (!idx) {
    throw ValidationError("edge references region '" + id +
                          "' absent from the partition");
  }
  return partition.at(*idx).centroid();
}

}  // namespace

std::vector<DistanceSample> distance_by_category(const EdgeCategories& categories,
                                                 const geo::Partition& partition) {
  std::vector<DistanceSample> out;
  out.reserve(categories.edges.size());
  for (const auto& [edge, cat] : categories.edges) {
    out.push_back(DistanceSample{
        cat, geo::haversine_km(centroid_of(partition, edge.src),
                               centroid_of(partition, edge.dst))});
  }
  return out;
}

std::map<int, FiveNumber> five_number_by_category(
    const std::vector<DistanceSample>& samples) {
  std::map<int, std::vector<double>> grouped;
  for (const DistanceSample& s : samples) grouped[s.category].push_back(s.distance_km);
  std::map<int, FiveNumber> out;
  for (auto& [cat, values] : grouped) {
    std::sort(values.begin(), values.end());
    out[cat] = FiveNumber{values.front(), quantile_sorted(values, 0.25),
                          quantile_sorted(values, 0.5), quantile_sorted(values, 0.75),
                          values.back()};
  }
  return out;
}

std::map<int, std::vector<std::size_t>> bearing_histogram(
    const EdgeCategories& categories, const geo::Partition& partition,
    int n_sectors) {
  if (n_sectors < 1) throw std::invalid_argument("need >= 1 sectors");
  std::map<int, std::vector<std::size_t>> out;
  const double sector_width = 360.0 / n_sectors;
  for (const auto& [edge, cat] : categories.edges) {
    const double bearing = geo::initial_bearing_deg(
        centroid_of(partition, edge.src), centroid_of(partition, edge.dst));
    int sector = static_cast<int>(bearing / sector_width);
    if (sector >= n_sectors) sector = n_sectors - 1;  // bearing == 360-epsilon
    auto [it, inserted] = out.try_emplace(cat);
    if (inserted) it->second.assign(static_cast<std::size_t>(n_sectors), 0);
    ++it->second[static_cast<std::size_t>(sector)];
  }
  return out;
}

}  // namespace aeronet::metrics
