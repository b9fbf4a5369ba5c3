#pragma once

// GTFS static feed reading and block extraction.

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "evfleet/domain.hpp"

namespace evfleet {

/// One CSV record; fields already unquoted.
using CsvRow = std::vector<std::string>;

struct CsvTable {
  std::vector<std::string> header;
  std::vector<CsvRow> rows;
  std::vector<int> line;  // source line of each row (1-based, header is line 1)

  /// Column position, or -1.
  int column(const std::string& name) const;
};

/// RFC 4180 style: quoted fields, doubled quotes, CRLF, leading UTF-8 BOM.
CsvTable parse_csv(const std::string& text, const std::string& file_label);

struct GtfsTrip {
  std::string trip_id, route_id, service_id, block_id, shape_id;
};

struct GtfsStopTime {
  std::string trip_id, stop_id;
  int arrival_s = 0, departure_s = 0;  // seconds after service-day midnight, may exceed 24h
  int sequence = 0;
};

struct GtfsStop {
  std::string stop_id;
  double lat = 0.0, lon = 0.0;
};

struct GtfsServicePattern {
  std::string service_id;
  bool weekday[7] = {false, false, false, false, false, false, false};  // Monday first
  int start_date = 0, end_date = 0;  // YYYYMMDD
};

struct GtfsException {
  std::string service_id;
  int date = 0;
  bool added = false;  // exception_type 1 adds, 2 removes
};

struct GtfsShapePoint {
  double lat = 0.0, lon = 0.0;
  int sequence = 0;
};

struct RawGtfsFeed {
  std::vector<GtfsTrip> trips;
  std::map<std::string, std::vector<GtfsStopTime>> stop_times;  // by trip, sorted by sequence
  std::map<std::string, GtfsStop> stops;
  std::vector<GtfsServicePattern> calendar;
  std::vector<GtfsException> calendar_dates;
  std::map<std::string, std::vector<GtfsShapePoint>> shapes;  // sorted by sequence

  /// Services running on `date` (YYYYMMDD).
  std::set<std::string> active_services(int date) const;
};

RawGtfsFeed parse_gtfs(const std::filesystem::path& dir);

/// "HH:MM:SS" with hours allowed past 24.
int parse_gtfs_time(const std::string& text);

struct ServiceDay {
  std::optional<int> date;              // YYYYMMDD; services from the calendar files
  std::set<std::string> service_ids;    // used when date is unset
  std::string season;
  double weight = 1.0;                  // real days represented
};

struct ServiceDaySelection {
  std::vector<ServiceDay> days;
  std::set<std::string> depot_stop_ids;  // empty: every block belongs to the depot
  bool strict_depot = false;             // drop blocks not starting and ending at the depot
  int intervals_per_day = 24;
  double delta_t = 1.0;

  TimeGrid grid() const;
};

struct ExtractionReport {
  BlockSet blocks;
  std::vector<std::string> rejected;  // one line per dropped block or trip
};

/// Blocks sorted by (start, id). Multi-day selections suffix ids with "@d<day>".
BlockSet extract_blocks(const RawGtfsFeed& feed, const ServiceDaySelection& sel);
ExtractionReport extract_blocks_detailed(const RawGtfsFeed& feed, const ServiceDaySelection& sel);

/// Every omega-th block in chronological order, starting from the first.
BlockSet subsample(const BlockSet& blocks, int omega);

/// Great-circle distance in km.
double haversine_km(double lat1, double lon1, double lat2, double lon2);

}  // namespace evfleet
