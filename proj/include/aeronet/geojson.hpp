#ifndef AERONET_GEOJSON_HPP
#define AERONET_GEOJSON_HPP

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "aeronet/geometry.hpp"

namespace aeronet::geo {

/// Loads a GeoJSON FeatureCollection of Polygon features. The region id is
/// read from the feature property "id" (string); missing or duplicated ids
/// are errors.
Partition load_partition_geojson(const std::filesystem::path& path);

/// Writes the partition back as a FeatureCollection. The optional config
/// fingerprint lands in a top-level "aeronet" member.
void write_partition_geojson(const Partition& partition,
                             const std::filesystem::path& path,
                             std::string_view config_fingerprint = {});

/// Regular lon-lat grid covering [lon0,lon1] x [lat0,lat1] with cells of
/// roughly cell_km size (latitude step cell_km, longitude step scaled by the
/// mid-latitude cosine). When a mask is given only cells whose centers lie
/// inside it are kept. Cell ids are "c<row>_<col>".
Partition make_grid_partition(double lon0, double lat0, double lon1, double lat1,
                              double cell_km, const Region* mask = nullptr);

struct BufferCenter {
  std::string id;
  GeoPoint center;
};

/// Geodesic circular buffers approximated by 64-gons. Overlapping buffers are
/// rejected by the Partition constructor.
Partition make_buffer_partition(const std::vector<BufferCenter>& centers,
                                double radius_km, int vertices = 64);

}  // namespace aeronet::geo

#endif
