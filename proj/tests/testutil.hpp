#ifndef AERONET_TESTS_TESTUTIL_HPP
#define AERONET_TESTS_TESTUTIL_HPP

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "aeronet/geometry.hpp"
#include "aeronet/trajectory.hpp"

namespace testutil {

inline aeronet::geo::Region square(const std::string& id, double lon0, double lat0,
                                   double size) {
  using aeronet::geo::GeoPoint;
  return aeronet::geo::Region(
      id, {GeoPoint{lon0, lat0, std::nullopt}, GeoPoint{lon0 + size, lat0, std::nullopt},
           GeoPoint{lon0 + size, lat0 + size, std::nullopt},
           GeoPoint{lon0, lat0 + size, std::nullopt}});
}

struct FixSpec {
  std::int64_t t;
  double lon;
  double lat;
  double alt = -1.0;  // < 0 means absent
};

/// Builds a valid segment; sample_time defaults to the last fix (backward).
inline aeronet::traj::TrajectorySegment make_segment(
    const std::string& id, const std::vector<FixSpec>& fixes, bool backward = true) {
  aeronet::traj::TrajectorySegment seg;
  seg.traj_id = id;
  for (const FixSpec& f : fixes) {
    aeronet::geo::GeoPoint p{f.lon, f.lat, std::nullopt};
    if (f.alt >= 0.0) p.alt = f.alt;
    seg.fixes.push_back(aeronet::traj::Fix{f.t, p});
  }
  seg.sample_time = backward ? seg.fixes.back().t : seg.fixes.front().t;
  seg.origin = backward ? seg.fixes.back().p : seg.fixes.front().p;
  return seg;
}

inline std::filesystem::path temp_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("aeronet_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path);
  out << text;
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in),
                     std::istreambuf_iterator<char>());
}

inline double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace testutil

#endif
