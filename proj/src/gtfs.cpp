#include "evfleet/gtfs.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>

namespace evfleet {

namespace fs = std::filesystem;

int CsvTable::column(const std::string& name) const {
  const auto it = std::find(header.begin(), header.end(), name);
  return it == header.end() ? -1 : static_cast<int>(it - header.begin());
}

namespace {

[[noreturn]] void malformed(const std::string& file, int line, const std::string& why) {
  throw Error(ErrorCode::MalformedRow, "schedule_ingest.parse_gtfs",
              file + " line " + std::to_string(line) + ": " + why);
}

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t");
  return s.substr(a, b - a + 1);
}

}  // namespace

CsvTable parse_csv(const std::string& text, const std::string& file_label) {
  CsvTable table;
  std::size_t pos = 0;
  if (text.compare(0, 3, "\xEF\xBB\xBF") == 0) pos = 3;
  int line = 1;
  std::vector<CsvRow> records;
  std::vector<int> lines;
  while (pos < text.size()) {
    CsvRow row;
    const int row_line = line;
    std::string field;
    bool quoted = false, was_quoted = false;
    for (;;) {
      if (pos >= text.size()) {
        if (quoted) malformed(file_label, row_line, "unterminated quoted field");
        row.push_back(was_quoted ? field : trim(field));
        break;
      }
      const char c = text[pos++];
      if (quoted) {
        if (c == '"') {
          if (pos < text.size() && text[pos] == '"') {
            field += '"';
            ++pos;
          } else {
            quoted = false;
          }
        } else {
          if (c == '\n') ++line;
          field += c;
        }
        continue;
      }
      if (c == '"' && trim(field).empty()) {
        quoted = was_quoted = true;
        field.clear();
      } else if (c == ',') {
        row.push_back(was_quoted ? field : trim(field));
        field.clear();
        was_quoted = false;
      } else if (c == '\n' || c == '\r') {
        if (c == '\r' && pos < text.size() && text[pos] == '\n') ++pos;
        ++line;
        row.push_back(was_quoted ? field : trim(field));
        break;
      } else {
        field += c;
      }
    }
    if (row.size() == 1 && row[0].empty()) continue;  // blank line
    records.push_back(std::move(row));
    lines.push_back(row_line);
  }
  if (records.empty()) malformed(file_label, 1, "missing header row");
  table.header = std::move(records.front());
  for (std::size_t r = 1; r < records.size(); ++r) {
    if (records[r].size() != table.header.size()) {
      malformed(file_label, lines[r],
                "expected " + std::to_string(table.header.size()) + " fields, found " +
                    std::to_string(records[r].size()));
    }
    table.rows.push_back(std::move(records[r]));
    table.line.push_back(lines[r]);
  }
  return table;
}

int parse_gtfs_time(const std::string& text) {
  int h = 0, m = 0, s = 0;
  char c1 = 0, c2 = 0;
  std::istringstream in(trim(text));
  if (!(in >> h >> c1 >> m >> c2 >> s) || c1 != ':' || c2 != ':' || h < 0 || m < 0 || m > 59 ||
      s < 0 || s > 59) {
    throw Error(ErrorCode::MalformedRow, "schedule_ingest.parse_gtfs_time", "bad time '" + text + "'");
  }
  std::string rest;
  if (in >> rest) {
    throw Error(ErrorCode::MalformedRow, "schedule_ingest.parse_gtfs_time", "bad time '" + text + "'");
  }
  return h * 3600 + m * 60 + s;
}

namespace {

struct FileReader {
  fs::path dir;

  std::optional<CsvTable> load(const std::string& name, bool required) const {
    const fs::path p = dir / name;
    std::ifstream in(p, std::ios::binary);
    if (!in) {
      if (required) {
        throw Error(ErrorCode::MissingFile, "schedule_ingest.parse_gtfs", p.string());
      }
      return std::nullopt;
    }
    std::ostringstream os;
    os << in.rdbuf();
    return parse_csv(os.str(), name);
  }
};

/// Positions of the named columns; throws if a required one is absent.
std::vector<int> columns(const CsvTable& t, const std::string& file,
                         const std::vector<std::string>& required,
                         const std::vector<std::string>& optional = {}) {
  std::vector<int> out;
  for (const auto& name : required) {
    const int c = t.column(name);
    if (c < 0) malformed(file, 1, "missing required column '" + name + "'");
    out.push_back(c);
  }
  for (const auto& name : optional) out.push_back(t.column(name));
  return out;
}

int to_int(const std::string& s, const std::string& file, int line, const char* what) {
  try {
    std::size_t used = 0;
    const int v = std::stoi(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    malformed(file, line, std::string("bad ") + what + " '" + s + "'");
  }
}

double to_double(const std::string& s, const std::string& file, int line, const char* what) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    malformed(file, line, std::string("bad ") + what + " '" + s + "'");
  }
}

[[noreturn]] void dangling(const std::string& file, int line, const std::string& what) {
  throw Error(ErrorCode::DanglingReference, "schedule_ingest.parse_gtfs",
              file + " line " + std::to_string(line) + ": unknown " + what);
}

/// 0 = Monday.
int weekday_of(int yyyymmdd) {
  using namespace std::chrono;
  const year_month_day ymd{year{yyyymmdd / 10000}, month{static_cast<unsigned>(yyyymmdd / 100 % 100)},
                           day{static_cast<unsigned>(yyyymmdd % 100)}};
  if (!ymd.ok()) {
    throw Error(ErrorCode::InvalidArgument, "schedule_ingest.active_services",
                "bad date " + std::to_string(yyyymmdd));
  }
  const weekday wd{sys_days{ymd}};
  return static_cast<int>((wd.c_encoding() + 6) % 7);
}

}  // namespace

std::set<std::string> RawGtfsFeed::active_services(int date) const {
  std::set<std::string> out;
  const int wd = weekday_of(date);
  for (const auto& c : calendar) {
    if (date >= c.start_date && date <= c.end_date && c.weekday[wd]) out.insert(c.service_id);
  }
  for (const auto& e : calendar_dates) {
    if (e.date != date) continue;
    if (e.added) out.insert(e.service_id);
    else out.erase(e.service_id);
  }
  return out;
}

RawGtfsFeed parse_gtfs(const fs::path& dir) {
  if (!fs::is_directory(dir)) {
    throw Error(ErrorCode::MissingFile, "schedule_ingest.parse_gtfs", dir.string() + " is not a directory");
  }
  const FileReader files{dir};
  RawGtfsFeed feed;

  const auto stops = files.load("stops.txt", true);
  {
    const auto c = columns(*stops, "stops.txt", {"stop_id", "stop_lat", "stop_lon"});
    for (std::size_t r = 0; r < stops->rows.size(); ++r) {
      const auto& row = stops->rows[r];
      const int ln = stops->line[r];
      GtfsStop s{row[c[0]], to_double(row[c[1]], "stops.txt", ln, "stop_lat"),
                 to_double(row[c[2]], "stops.txt", ln, "stop_lon")};
      if (!feed.stops.emplace(s.stop_id, s).second) malformed("stops.txt", ln, "duplicate stop_id");
    }
  }

  const auto calendar = files.load("calendar.txt", false);
  const auto calendar_dates = files.load("calendar_dates.txt", false);
  if (!calendar && !calendar_dates) {
    throw Error(ErrorCode::MissingFile, "schedule_ingest.parse_gtfs",
                (dir / "calendar.txt").string() + " (or calendar_dates.txt)");
  }
  std::set<std::string> services;
  if (calendar) {
    const auto c = columns(*calendar, "calendar.txt",
                           {"service_id", "monday", "tuesday", "wednesday", "thursday", "friday",
                            "saturday", "sunday", "start_date", "end_date"});
    for (std::size_t r = 0; r < calendar->rows.size(); ++r) {
      const auto& row = calendar->rows[r];
      const int ln = calendar->line[r];
      GtfsServicePattern p;
      p.service_id = row[c[0]];
      for (int d = 0; d < 7; ++d) p.weekday[d] = to_int(row[c[1 + d]], "calendar.txt", ln, "weekday flag") == 1;
      p.start_date = to_int(row[c[8]], "calendar.txt", ln, "start_date");
      p.end_date = to_int(row[c[9]], "calendar.txt", ln, "end_date");
      services.insert(p.service_id);
      feed.calendar.push_back(std::move(p));
    }
  }
  if (calendar_dates) {
    const auto c =
        columns(*calendar_dates, "calendar_dates.txt", {"service_id", "date", "exception_type"});
    for (std::size_t r = 0; r < calendar_dates->rows.size(); ++r) {
      const auto& row = calendar_dates->rows[r];
      const int ln = calendar_dates->line[r];
      const int type = to_int(row[c[2]], "calendar_dates.txt", ln, "exception_type");
      if (type != 1 && type != 2) malformed("calendar_dates.txt", ln, "exception_type must be 1 or 2");
      feed.calendar_dates.push_back(
          {row[c[0]], to_int(row[c[1]], "calendar_dates.txt", ln, "date"), type == 1});
      services.insert(row[c[0]]);
    }
  }

  if (const auto shapes = files.load("shapes.txt", false)) {
    const auto c = columns(*shapes, "shapes.txt",
                           {"shape_id", "shape_pt_lat", "shape_pt_lon", "shape_pt_sequence"});
    for (std::size_t r = 0; r < shapes->rows.size(); ++r) {
      const auto& row = shapes->rows[r];
      const int ln = shapes->line[r];
      feed.shapes[row[c[0]]].push_back({to_double(row[c[1]], "shapes.txt", ln, "shape_pt_lat"),
                                        to_double(row[c[2]], "shapes.txt", ln, "shape_pt_lon"),
                                        to_int(row[c[3]], "shapes.txt", ln, "shape_pt_sequence")});
    }
    for (auto& [id, pts] : feed.shapes) {
      std::stable_sort(pts.begin(), pts.end(), [](const GtfsShapePoint& a, const GtfsShapePoint& b) {
        return a.sequence < b.sequence;
      });
    }
  }

  const auto trips = files.load("trips.txt", true);
  std::set<std::string> trip_ids;
  {
    const auto c = columns(*trips, "trips.txt", {"trip_id", "route_id", "service_id"},
                           {"block_id", "shape_id"});
    for (std::size_t r = 0; r < trips->rows.size(); ++r) {
      const auto& row = trips->rows[r];
      const int ln = trips->line[r];
      GtfsTrip t{row[c[0]], row[c[1]], row[c[2]], c[3] >= 0 ? row[c[3]] : "",
                 c[4] >= 0 ? row[c[4]] : ""};
      if (!trip_ids.insert(t.trip_id).second) malformed("trips.txt", ln, "duplicate trip_id");
      if (!services.count(t.service_id)) dangling("trips.txt", ln, "service_id '" + t.service_id + "'");
      if (!t.shape_id.empty() && !feed.shapes.empty() && !feed.shapes.count(t.shape_id)) {
        dangling("trips.txt", ln, "shape_id '" + t.shape_id + "'");
      }
      feed.trips.push_back(std::move(t));
    }
  }

  const auto stop_times = files.load("stop_times.txt", true);
  {
    const auto c = columns(*stop_times, "stop_times.txt",
                           {"trip_id", "arrival_time", "departure_time", "stop_id", "stop_sequence"});
    for (std::size_t r = 0; r < stop_times->rows.size(); ++r) {
      const auto& row = stop_times->rows[r];
      const int ln = stop_times->line[r];
      if (!trip_ids.count(row[c[0]])) dangling("stop_times.txt", ln, "trip_id '" + row[c[0]] + "'");
      if (!feed.stops.count(row[c[3]])) dangling("stop_times.txt", ln, "stop_id '" + row[c[3]] + "'");
      GtfsStopTime st;
      st.trip_id = row[c[0]];
      st.stop_id = row[c[3]];
      st.sequence = to_int(row[c[4]], "stop_times.txt", ln, "stop_sequence");
      try {
        const std::string& arr = row[c[1]].empty() ? row[c[2]] : row[c[1]];
        const std::string& dep = row[c[2]].empty() ? row[c[1]] : row[c[2]];
        st.arrival_s = parse_gtfs_time(arr);
        st.departure_s = parse_gtfs_time(dep);
      } catch (const Error& e) {
        malformed("stop_times.txt", ln, "bad time '" + (row[c[1]].empty() ? row[c[2]] : row[c[1]]) + "' or '" + row[c[2]] + "'");
      }
      feed.stop_times[st.trip_id].push_back(std::move(st));
    }
    for (auto& [id, list] : feed.stop_times) {
      std::stable_sort(list.begin(), list.end(), [](const GtfsStopTime& a, const GtfsStopTime& b) {
        return a.sequence < b.sequence;
      });
    }
  }
  return feed;
}

double haversine_km(double lat1, double lon1, double lat2, double lon2) {
  constexpr double kEarthKm = 6371.0088;
  constexpr double kRad = 3.14159265358979323846 / 180.0;
  const double dlat = (lat2 - lat1) * kRad, dlon = (lon2 - lon1) * kRad;
  const double a = std::sin(dlat / 2) * std::sin(dlat / 2) +
                   std::cos(lat1 * kRad) * std::cos(lat2 * kRad) * std::sin(dlon / 2) *
                       std::sin(dlon / 2);
  return 2.0 * kEarthKm * std::asin(std::min(1.0, std::sqrt(a)));
}

TimeGrid ServiceDaySelection::grid() const {
  TimeGrid g;
  g.days = static_cast<int>(days.size());
  g.intervals_per_day = intervals_per_day;
  g.delta_t = delta_t;
  for (const auto& d : days) g.day_weight.push_back(d.weight);
  return g;
}

namespace {

double trip_km(const RawGtfsFeed& feed, const GtfsTrip& trip, const std::vector<GtfsStopTime>& st) {
  if (!trip.shape_id.empty()) {
    const auto it = feed.shapes.find(trip.shape_id);
    if (it != feed.shapes.end() && it->second.size() >= 2) {
      double km = 0.0;
      for (std::size_t n = 1; n < it->second.size(); ++n) {
        const auto& a = it->second[n - 1];
        const auto& b = it->second[n];
        km += haversine_km(a.lat, a.lon, b.lat, b.lon);
      }
      return km;
    }
  }
  double km = 0.0;
  for (std::size_t n = 1; n < st.size(); ++n) {
    const auto& a = feed.stops.at(st[n - 1].stop_id);
    const auto& b = feed.stops.at(st[n].stop_id);
    km += haversine_km(a.lat, a.lon, b.lat, b.lon);
  }
  return km;
}

}  // namespace

ExtractionReport extract_blocks_detailed(const RawGtfsFeed& feed, const ServiceDaySelection& sel) {
  constexpr const char* where = "schedule_ingest.extract_blocks";
  if (sel.days.empty()) throw Error(ErrorCode::EmptySelection, where, "no service day selected");
  if (sel.intervals_per_day < 1 || !(sel.delta_t > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, where, "bad time grid");
  }
  const double interval_s = sel.delta_t * 3600.0;
  const double day_s = interval_s * sel.intervals_per_day;
  ExtractionReport rep;

  for (std::size_t s = 0; s < sel.days.size(); ++s) {
    const auto& day = sel.days[s];
    const std::set<std::string> services =
        day.date ? feed.active_services(*day.date) : day.service_ids;

    struct Acc {
      int first_dep = 0, last_arr = 0;
      std::string first_stop, last_stop;
      double km = 0.0;
      bool any = false;
    };
    std::map<std::string, Acc> acc;
    for (const auto& trip : feed.trips) {
      if (!services.count(trip.service_id)) continue;
      if (trip.block_id.empty()) {
        rep.rejected.push_back("trip " + trip.trip_id + ": no block_id");
        continue;
      }
      const auto st = feed.stop_times.find(trip.trip_id);
      if (st == feed.stop_times.end() || st->second.size() < 2) {
        rep.rejected.push_back("trip " + trip.trip_id + ": fewer than two stop_times");
        continue;
      }
      const auto& list = st->second;
      Acc& a = acc[trip.block_id];
      const int dep = list.front().departure_s, arr = list.back().arrival_s;
      if (!a.any || dep < a.first_dep) {
        a.first_dep = dep;
        a.first_stop = list.front().stop_id;
      }
      if (!a.any || arr > a.last_arr) {
        a.last_arr = arr;
        a.last_stop = list.back().stop_id;
      }
      a.km += trip_km(feed, trip, list);
      a.any = true;
    }

    for (const auto& [block_id, a] : acc) {
      const std::string id = sel.days.size() > 1 ? block_id + "@d" + std::to_string(s + 1) : block_id;
      if (!sel.depot_stop_ids.empty() && sel.strict_depot &&
          (!sel.depot_stop_ids.count(a.first_stop) || !sel.depot_stop_ids.count(a.last_stop))) {
        rep.rejected.push_back("block " + id + ": does not start and end at the depot");
        continue;
      }
      if (!(a.km > 0.0)) {
        rep.rejected.push_back("block " + id + ": zero distance");
        continue;
      }
      if (a.last_arr > day_s || a.first_dep < 0) {
        throw Error(ErrorCode::BlockSpansDayBoundary, where,
                    "block " + id + " runs past the end of its service day");
      }
      const int start = static_cast<int>(std::floor(a.first_dep / interval_s)) + 1;
      const int end = std::max(start, static_cast<int>(std::ceil(a.last_arr / interval_s)));
      const int offset = static_cast<int>(s) * sel.intervals_per_day;
      rep.blocks.push_back({id, a.km, offset + start, offset + end});
    }
  }
  if (rep.blocks.empty()) {
    throw Error(ErrorCode::EmptySelection, where, "selection yields no blocks");
  }
  std::sort(rep.blocks.begin(), rep.blocks.end(), [](const Block& a, const Block& b) {
    return a.start_interval != b.start_interval ? a.start_interval < b.start_interval : a.id < b.id;
  });
  return rep;
}

BlockSet extract_blocks(const RawGtfsFeed& feed, const ServiceDaySelection& sel) {
  return extract_blocks_detailed(feed, sel).blocks;
}

BlockSet subsample(const BlockSet& blocks, int omega) {
  if (omega < 1) {
    throw Error(ErrorCode::InvalidArgument, "schedule_ingest.subsample", "omega must be >= 1");
  }
  BlockSet sorted = blocks;
  std::stable_sort(sorted.begin(), sorted.end(), [](const Block& a, const Block& b) {
    return a.start_interval != b.start_interval ? a.start_interval < b.start_interval : a.id < b.id;
  });
  BlockSet out;
  for (std::size_t k = 0; k < sorted.size(); k += static_cast<std::size_t>(omega)) {
    out.push_back(sorted[k]);
  }
  return out;
}

}  // namespace evfleet
