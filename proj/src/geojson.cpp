#include "aeronet/geojson.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "json.hpp"

namespace aeronet::geo {

using nlohmann::json;

namespace {

Ring parse_ring(const json& coords, const std::string& where) {
  if (!coords.is_array() || coords.size() < 4) {
    throw InvalidPartition(where + ": ring must be an array of >= 4 positions");
  }
  Ring ring;
  ring.reserve(coords.size());
  for (const json& pos : coords) {
    if (!pos.is_array() || pos.size() < 2) {
      throw InvalidPartition(where + ": position must be [lon, lat]");
    }
    ring.push_back(GeoPoint{pos[0].get<double>(), pos[1].get<double>(), std::nullopt});
  }
  return ring;
}

json ring_to_json(const Ring& ring) {
  json coords = json::array();
  for (const GeoPoint& p : ring) coords.push_back(json::array({p.lon, p.lat}));
  // GeoJSON rings are closed
  coords.push_back(json::array({ring.front().lon, ring.front().lat}));
  return coords;
}

}  // namespace

Partition load_partition_geojson(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw ValidationError("cannot open partition file '" + path.string() + "'");
  }
  json doc;
  try {
    in >> doc;
  } catch (const json::parse_error& e) {
    throw InvalidPartition("partition file '" + path.string() + "': " + e.what());
  }
  if (doc.value("type", "") != "FeatureCollection") {
    throw InvalidPartition("partition file '" + path.string() +
                           "' is not a FeatureCollection");
  }
  std::vector<Region> regions;
  for (const json& feature : doc.value("features", json::array())) {
    const json& props = feature.value("properties", json::object());
    if (!props.contains("id") || !props["id"].is_string()) {
      throw InvalidPartition("feature without string property \"id\" in '" +
                             path.string() + "'");
    }
    const std::string id = props["id"].get<std::string>();
    const json& geom = feature.value("geometry", json::object());
    if (geom.value("type", "") != "Polygon") {
      throw InvalidPartition("feature '" + id + "': only Polygon geometry supported");
    }
    const json& rings = geom.value("coordinates", json::array());
    if (rings.empty()) {
      throw InvalidPartition("feature '" + id + "': empty coordinates");
    }
    Ring exterior = parse_ring(rings[0], "feature '" + id + "'");
    std::vector<Ring> holes;
    for (std::size_t k = 1; k < rings.size(); ++k) {
      holes.push_back(parse_ring(rings[k], "feature '" + id + "'"));
    }
    regions.emplace_back(id, std::move(exterior), std::move(holes));
  }
  return Partition(std::move(regions));
}

void write_partition_geojson(const Partition& partition,
                             const std::filesystem::path& path,
                             std::string_view config_fingerprint) {
  json features = json::array();
  for (const Region& r : partition.regions()) {
    json rings = json::array();
    rings.push_back(ring_to_json(r.exterior()));
    for (const Ring& h : r.holes()) rings.push_back(ring_to_json(h));
    features.push_back(json{{"type", "Feature"},
                            {"properties", {{"id", r.id()}}},
                            {"geometry", {{"type", "Polygon"}, {"coordinates", rings}}}});
  }
  json doc{{"type", "FeatureCollection"}, {"features", features}};
  if (!config_fingerprint.empty()) {
    doc["aeronet"] = json{{"format", "partition v1"},
                          {"config", std::string(config_fingerprint)}};
  }
  std::ofstream out(path);
  if (!out) {
    throw ValidationError("cannot write partition file '" + path.string() + "'");
  }
  out << doc.dump(1, '\t') << '\n';
}

Partition make_grid_partition(double lon0, double lat0, double lon1, double lat1,
                              double cell_km, const Region* mask) {
  if (lon1 <= lon0 || lat1 <= lat0 || cell_km <= 0.0) {
    throw ValidationError("grid: need lon0 < lon1, lat0 < lat1, cell_km > 0");
  }
  const double dlat = cell_km / kKmPerDeg;
  const double mid_lat = 0.5 * (lat0 + lat1);
  const double coslat = std::max(0.05, std::cos(mid_lat * 3.14159265358979323846 / 180.0));
  const double dlon = cell_km / (kKmPerDeg * coslat);
  // the 1e-9 slack keeps rounding noise from spawning sliver rows
  const int rows = std::max(1, static_cast<int>(std::ceil((lat1 - lat0) / dlat - 1e-9)));
  const int cols = std::max(1, static_cast<int>(std::ceil((lon1 - lon0) / dlon - 1e-9)));

  std::vector<Region> regions;
  char id[32];
  for (int r = 0; r < rows; ++r) {
    const double la0 = lat0 + r * dlat;
    const double la1 = std::min(lat1, la0 + dlat);
    for (int c = 0; c < cols; ++c) {
      const double lo0 = lon0 + c * dlon;
      const double lo1 = std::min(lon1, lo0 + dlon);
      if (mask) {
        const GeoPoint center{0.5 * (lo0 + lo1), 0.5 * (la0 + la1), std::nullopt};
        if (!point_in_region(center, *mask)) continue;
      }
      std::snprintf(id, sizeof(id), "c%03d_%03d", r, c);
      regions.emplace_back(id, Ring{{lo0, la0, std::nullopt},
                                    {lo1, la0, std::nullopt},
                                    {lo1, la1, std::nullopt},
                                    {lo0, la1, std::nullopt}});
    }
  }
  return Partition(std::move(regions));
}

Partition make_buffer_partition(const std::vector<BufferCenter>& centers,
                                double radius_km, int vertices) {
  if (radius_km <= 0.0 || vertices < 3) {
    throw ValidationError("buffers: need radius_km > 0 and >= 3 vertices");
  }
  std::vector<Region> regions;
  regions.reserve(centers.size());
  for (const BufferCenter& c : centers) {
    Ring ring;
    ring.reserve(static_cast<std::size_t>(vertices));
    for (int k = 0; k < vertices; ++k) {
      const double bearing = 360.0 * k / vertices;
      ring.push_back(destination_point(c.center, bearing, radius_km));
    }
    regions.emplace_back(c.id, std::move(ring));
  }
  return Partition(std::move(regions));
}

}  // namespace aeronet::geo
