#include "aeronet/trajectory.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "aeronet/errors.hpp"
#include "aeronet/timeutil.hpp"

namespace aeronet::traj {

namespace {

constexpr double kOriginTolDeg = 1e-9;

double parse_double_strict(std::string_view field, std::size_t line,
                           const char* what) {
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc{} || ptr != field.data() + field.size() ||
      !std::isfinite(value)) {
    throw MalformedRow(line, std::string("bad ") + what + " '" +
                                 std::string(field) + "'");
  }
  return value;
}

std::string format_double(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

std::vector<std::string_view> split_csv(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(',', start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      break;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return out;
}

}  // namespace

std::int64_t TrajectorySegment::delta_seconds() const {
  if (fixes.size() <= 1) return 0;
  if (sample_time == fixes.front().t) return fixes.back().t - fixes.front().t;
  return fixes.front().t - fixes.back().t;
}

std::vector<geo::TimedPoint> TrajectorySegment::timed_points() const {
  std::vector<geo::TimedPoint> out;
  out.reserve(fixes.size());
  for (const Fix& f : fixes) {
    out.push_back(geo::TimedPoint{static_cast<double>(f.t), f.p});
  }
  return out;
}

void TrajectorySegment::validate() const {
  if (traj_id.empty()) throw InvalidSegment("segment with empty traj_id");
  if (fixes.empty()) throw InvalidSegment("segment '" + traj_id + "' has no fixes");
  for (std::size_t i = 0; i + 1 < fixes.size(); ++i) {
    if (fixes[i + 1].t <= fixes[i].t) throw NonMonotoneTime(traj_id);
  }
  if (sample_time != fixes.front().t && sample_time != fixes.back().t) {
    throw InvalidSegment("segment '" + traj_id +
                         "': sample_time is neither the first nor the last fix time");
  }
  const Fix& at_sample = (sample_time == fixes.front().t) ? fixes.front() : fixes.back();
  if (std::abs(origin.lon - at_sample.p.lon) > kOriginTolDeg ||
      std::abs(origin.lat - at_sample.p.lat) > kOriginTolDeg) {
    throw InvalidSegment("segment '" + traj_id +
                         "': origin does not match the fix at sample_time");
  }
  for (const auto& [name, column] : covariates) {
    if (column.size() != fixes.size()) {
      throw InvalidSegment("segment '" + traj_id + "': covariate '" + name +
                           "' has " + std::to_string(column.size()) +
                           " values for " + std::to_string(fixes.size()) + " fixes");
    }
  }
}

TrajectoryCorpus make_corpus(std::vector<TrajectorySegment> segments) {
  if (segments.empty()) throw EmptyCorpus("corpus contains no segments");
  TrajectoryCorpus corpus;
  corpus.segments = std::move(segments);

  std::set<std::string> names;
  std::int64_t delta = 0;
  bool saw_positive = false;
  bool saw_negative = false;
  for (TrajectorySegment& seg : corpus.segments) {
    seg.validate();
    const std::int64_t d = seg.delta_seconds();
    if (d > 0) saw_positive = true;
    if (d < 0) saw_negative = true;
    if (std::llabs(d) > std::llabs(delta)) delta = d;
    for (const auto& [name, column] : seg.covariates) names.insert(name);
  }
  if (saw_positive && saw_negative) {
    throw MixedDeltaSign("corpus mixes forward and backward segments");
  }
  corpus.delta_seconds = delta;
  corpus.covariate_names.assign(names.begin(), names.end());

  corpus.time_min = corpus.segments.front().sample_time;
  corpus.time_max = corpus.time_min;
  for (TrajectorySegment& seg : corpus.segments) {
    corpus.time_min = std::min(corpus.time_min, seg.sample_time);
    corpus.time_max = std::max(corpus.time_max, seg.sample_time);
    // flag segments that span noticeably less than the nominal lag
    const std::int64_t span = std::llabs(seg.delta_seconds());
    const std::int64_t want = std::llabs(delta);
    if (span < want) {
      std::int64_t spacing = want;  // single-fix segments are always flagged
      if (seg.fixes.size() > 1) {
        std::vector<std::int64_t> gaps;
        gaps.reserve(seg.fixes.size() - 1);
        for (std::size_t i = 0; i + 1 < seg.fixes.size(); ++i) {
          gaps.push_back(seg.fixes[i + 1].t - seg.fixes[i].t);
        }
        std::nth_element(gaps.begin(), gaps.begin() + gaps.size() / 2, gaps.end());
        spacing = gaps[gaps.size() / 2];
      }
      seg.truncated = (want - span) > spacing;
    }
  }
  return corpus;
}

namespace {

const char* const kRequiredColumns[7] = {"traj_id",    "receptor_region",
                                         "sample_time", "point_time",
                                         "lon_deg",     "lat_deg",
                                         "alt_m"};

struct PendingSegment {
  TrajectorySegment seg;
  std::size_t first_line = 0;
};

}  // namespace

TrajectoryCorpus parse_corpus(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;

  // optional leading comments, then the mandatory header
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    break;
  }
  if (line_no == 0 || line.empty() || line[0] == '#') {
    throw MalformedRow(line_no, "missing TrajCsvV1 header");
  }
  const std::vector<std::string_view> header = split_csv(line);
  if (header.size() < 7) throw MalformedRow(line_no, "header too short for TrajCsvV1");
  for (std::size_t i = 0; i < 7; ++i) {
    if (header[i] != kRequiredColumns[i]) {
      throw MalformedRow(line_no, "expected column '" +
                                      std::string(kRequiredColumns[i]) + "', got '" +
                                      std::string(header[i]) + "'");
    }
  }
  std::vector<std::string> cov_names;
  for (std::size_t i = 7; i < header.size(); ++i) {
    if (header[i].substr(0, 4) != "cov:" || header[i].size() == 4) {
      throw MalformedRow(line_no, "covariate column must be named 'cov:<name>', got '" +
                                      std::string(header[i]) + "'");
    }
    cov_names.emplace_back(header[i].substr(4));
  }

  std::vector<TrajectorySegment> segments;
  std::set<std::string> finished_ids;
  PendingSegment pending;
  bool has_pending = false;

  auto flush = [&]() {
    if (!has_pending) return;
    pending.seg.validate();
    finished_ids.insert(pending.seg.traj_id);
    segments.push_back(std::move(pending.seg));
    has_pending = false;
  };

  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::vector<std::string_view> fields = split_csv(line);
    if (fields.size() != header.size()) {
      throw MalformedRow(line_no, "expected " + std::to_string(header.size()) +
                                      " fields, got " + std::to_string(fields.size()));
    }
    const std::string traj_id(fields[0]);
    if (traj_id.empty()) throw MalformedRow(line_no, "empty traj_id");

    std::optional<std::string> receptor;
    if (!fields[1].empty()) receptor = std::string(fields[1]);

    std::int64_t sample_time, point_time;
    try {
      sample_time = timeutil::parse_iso8601_utc(fields[2]);
      point_time = timeutil::parse_iso8601_utc(fields[3]);
    } catch (const std::invalid_argument& e) {
      throw MalformedRow(line_no, e.what());
    }

    Fix fix;
    fix.t = point_time;
    fix.p.lon = parse_double_strict(fields[4], line_no, "lon_deg");
    fix.p.lat = parse_double_strict(fields[5], line_no, "lat_deg");
    if (fix.p.lon < -180.0 || fix.p.lon > 180.0 || fix.p.lat < -90.0 ||
        fix.p.lat > 90.0) {
      throw MalformedRow(line_no, "lon-lat out of range");
    }
    if (!fields[6].empty()) {
      fix.p.alt = parse_double_strict(fields[6], line_no, "alt_m");
    }
    std::vector<double> cov_values(cov_names.size());
    for (std::size_t k = 0; k < cov_names.size(); ++k) {
      cov_values[k] =
          parse_double_strict(fields[7 + k], line_no, cov_names[k].c_str());
    }

    if (has_pending && pending.seg.traj_id != traj_id) flush();
    if (!has_pending) {
      if (finished_ids.count(traj_id)) {
        throw MalformedRow(line_no,
                           "rows for trajectory '" + traj_id + "' are not contiguous");
      }
      pending = PendingSegment{};
      pending.seg.traj_id = traj_id;
      pending.seg.sample_time = sample_time;
      pending.seg.receptor_region = receptor;
      pending.first_line = line_no;
      for (const std::string& name : cov_names) {
        pending.seg.covariates.emplace(name, std::vector<double>{});
      }
      has_pending = true;
    } else {
      if (pending.seg.sample_time != sample_time) {
        throw MalformedRow(line_no, "sample_time changes within trajectory '" +
                                        traj_id + "'");
      }
      if (pending.seg.receptor_region != receptor) {
        throw MalformedRow(line_no, "receptor_region changes within trajectory '" +
                                        traj_id + "'");
      }
      if (fix.t <= pending.seg.fixes.back().t) throw NonMonotoneTime(traj_id);
    }
    pending.seg.fixes.push_back(fix);
    for (std::size_t k = 0; k < cov_names.size(); ++k) {
      pending.seg.covariates[cov_names[k]].push_back(cov_values[k]);
    }
    // origin is the fix at sample_time
    if (fix.t == sample_time) pending.seg.origin = fix.p;
  }
  flush();
  if (segments.empty()) throw EmptyCorpus("no data rows");
  return make_corpus(std::move(segments));
}

TrajectoryCorpus parse_corpus(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open corpus file '" + path.string() + "'");
  return parse_corpus(in);
}

void write_corpus(const TrajectoryCorpus& corpus, std::ostream& out,
                  std::string_view config_fingerprint) {
  if (!config_fingerprint.empty()) {
    out << "# aeronet-trajcsv v1; config=" << config_fingerprint << '\n';
  }
  out << "traj_id,receptor_region,sample_time,point_time,lon_deg,lat_deg,alt_m";
  for (const std::string& name : corpus.covariate_names) out << ",cov:" << name;
  out << '\n';
  for (const TrajectorySegment& seg : corpus.segments) {
    for (const std::string& name : corpus.covariate_names) {
      if (!seg.covariates.count(name)) {
        throw DataError("segment '" + seg.traj_id + "' lacks covariate '" + name +
                        "' present elsewhere in the corpus");
      }
    }
    const std::string sample = timeutil::format_iso8601_utc(seg.sample_time);
    for (std::size_t i = 0; i < seg.fixes.size(); ++i) {
      const Fix& f = seg.fixes[i];
      out << seg.traj_id << ',' << seg.receptor_region.value_or("") << ',' << sample
          << ',' << timeutil::format_iso8601_utc(f.t) << ',' << format_double(f.p.lon)
          << ',' << format_double(f.p.lat) << ',';
      if (f.p.alt) out << format_double(*f.p.alt);
      for (const std::string& name : corpus.covariate_names) {
        out << ',' << format_double(seg.covariates.at(name)[i]);
      }
      out << '\n';
    }
  }
}

void write_corpus(const TrajectoryCorpus& corpus, const std::filesystem::path& path,
                  std::string_view config_fingerprint) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write corpus file '" + path.string() + "'");
  write_corpus(corpus, out, config_fingerprint);
}

WindowContext parse_context(std::string_view text) {
  if (text == "whole") return WindowContext::whole;
  if (text == "yearly") return WindowContext::yearly;
  if (text == "monthly-pooled") return WindowContext::monthly_pooled;
  throw ValidationError("unknown temporal context '" + std::string(text) +
                        "' (expected whole | yearly | monthly-pooled)");
}

std::string_view context_name(WindowContext context) {
  switch (context) {
    case WindowContext::whole: return "whole";
    case WindowContext::yearly: return "yearly";
    case WindowContext::monthly_pooled: return "monthly-pooled";
  }
  return "?";
}

std::map<std::string, TrajectoryCorpus> window_corpus(const TrajectoryCorpus& corpus,
                                                      WindowContext context) {
  if (corpus.segments.empty()) throw EmptyCorpus("cannot window an empty corpus");
  std::map<std::string, TrajectoryCorpus> windows;
  for (const TrajectorySegment& seg : corpus.segments) {
    std::string key;
    switch (context) {
      case WindowContext::whole:
        key = "all";
        break;
      case WindowContext::yearly:
        key = std::to_string(timeutil::utc_year(seg.sample_time));
        break;
      case WindowContext::monthly_pooled: {
        const unsigned m = timeutil::utc_month(seg.sample_time);
        key = (m < 10 ? "0" : "") + std::to_string(m);
        break;
      }
    }
    auto [it, inserted] = windows.try_emplace(key);
    TrajectoryCorpus& w = it->second;
    if (inserted) {
      w.delta_seconds = corpus.delta_seconds;
      w.covariate_names = corpus.covariate_names;
      w.time_min = seg.sample_time;
      w.time_max = seg.sample_time;
    }
    w.time_min = std::min(w.time_min, seg.sample_time);
    w.time_max = std::max(w.time_max, seg.sample_time);
    w.segments.push_back(seg);
  }
  return windows;
}

// ---------------------------------------------------------------------------
// HYSPLIT tdump

namespace {

std::vector<std::string> tokenize(const std::string& line) {
  std::istringstream ss(line);
  std::vector<std::string> tokens;
  std::string tok;
  while (ss >> tok) tokens.push_back(tok);
  return tokens;
}

std::int64_t tdump_time(int yy, int mm, int dd, int hh, int minute = 0) {
  const int year = yy < 70 ? 2000 + yy : 1900 + yy;
  return timeutil::days_from_civil(year, static_cast<unsigned>(mm),
                                   static_cast<unsigned>(dd)) *
             86400 +
         hh * 3600 + minute * 60;
}

}  // namespace

TrajectoryCorpus parse_tdump(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open tdump file '" + path.string() + "'");
  std::string line;
  std::size_t line_no = 0;
  auto next_tokens = [&](const char* what) {
    while (std::getline(in, line)) {
      ++line_no;
      auto tokens = tokenize(line);
      if (!tokens.empty()) return tokens;
    }
    throw MalformedRow(line_no, std::string("unexpected end of tdump before ") + what);
  };

  auto grid_header = next_tokens("meteo grid count");
  const int n_grids = std::atoi(grid_header[0].c_str());
  for (int i = 0; i < n_grids; ++i) next_tokens("meteo grid line");

  auto traj_header = next_tokens("trajectory count");
  const int n_traj = std::atoi(traj_header[0].c_str());
  const bool backward = traj_header.size() > 1 && traj_header[1] == "BACKWARD";
  if (n_traj <= 0) throw EmptyCorpus("tdump declares no trajectories");

  std::vector<std::int64_t> start_times(static_cast<std::size_t>(n_traj));
  for (int i = 0; i < n_traj; ++i) {
    auto tokens = next_tokens("trajectory start line");
    if (tokens.size() < 4) throw MalformedRow(line_no, "short trajectory start line");
    start_times[static_cast<std::size_t>(i)] =
        tdump_time(std::atoi(tokens[0].c_str()), std::atoi(tokens[1].c_str()),
                   std::atoi(tokens[2].c_str()), std::atoi(tokens[3].c_str()));
  }

  auto diag_header = next_tokens("diagnostic variable count");
  const int n_diag = std::atoi(diag_header[0].c_str());
  std::vector<std::string> diag_names;
  for (int i = 0; i < n_diag && i + 1 < static_cast<int>(diag_header.size()); ++i) {
    std::string name = diag_header[static_cast<std::size_t>(i) + 1];
    for (char& c : name) c = static_cast<char>(std::tolower(c));
    diag_names.push_back(name);
  }

  struct Row {
    double age;
    Fix fix;
    std::vector<double> diags;
  };
  std::vector<std::vector<Row>> rows(static_cast<std::size_t>(n_traj));
  while (std::getline(in, line)) {
    ++line_no;
    auto tokens = tokenize(line);
    if (tokens.empty()) continue;
    if (tokens.size() < static_cast<std::size_t>(12 + n_diag)) {
      throw MalformedRow(line_no, "short tdump data row");
    }
    const int k = std::atoi(tokens[0].c_str());
    if (k < 1 || k > n_traj) throw MalformedRow(line_no, "trajectory index out of range");
    Row row;
    row.age = std::atof(tokens[8].c_str());
    row.fix.t = start_times[static_cast<std::size_t>(k - 1)] +
                static_cast<std::int64_t>(std::llround(row.age * 3600.0));
    row.fix.p.lat = std::atof(tokens[9].c_str());
    row.fix.p.lon = std::atof(tokens[10].c_str());
    row.fix.p.alt = std::atof(tokens[11].c_str());
    for (int d = 0; d < n_diag; ++d) {
      row.diags.push_back(std::atof(tokens[static_cast<std::size_t>(12 + d)].c_str()));
    }
    rows[static_cast<std::size_t>(k - 1)].push_back(std::move(row));
  }

  std::vector<TrajectorySegment> segments;
  for (int k = 0; k < n_traj; ++k) {
    auto& traj_rows = rows[static_cast<std::size_t>(k)];
    if (traj_rows.empty()) continue;
    std::sort(traj_rows.begin(), traj_rows.end(),
              [](const Row& a, const Row& b) { return a.fix.t < b.fix.t; });
    TrajectorySegment seg;
    char id[32];
    std::snprintf(id, sizeof(id), "t%03d", k + 1);
    seg.traj_id = id;
    seg.sample_time = start_times[static_cast<std::size_t>(k)];
    for (const std::string& name : diag_names) {
      seg.covariates.emplace(name, std::vector<double>{});
    }
    for (const Row& row : traj_rows) {
      seg.fixes.push_back(row.fix);
      for (std::size_t d = 0; d < diag_names.size(); ++d) {
        seg.covariates[diag_names[d]].push_back(row.diags[d]);
      }
    }
    seg.origin = backward ? seg.fixes.back().p : seg.fixes.front().p;
    segments.push_back(std::move(seg));
  }
  return make_corpus(std::move(segments));
}

}  // namespace aeronet::traj
