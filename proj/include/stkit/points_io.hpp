#pragma once

#include "stkit/geo.hpp"
#include "stkit/observations.hpp"

#include <map>
#include <string>
#include <vector>

namespace stkit::ptio {

// CSV with header `well_id,lon,lat,date,value`; date as YYYY-MM, value in
// meters or empty for a gap. Wells keep first-appearance order; the time axis
// spans the min..max month found in the file. Malformed rows, conflicting
// coordinates and duplicate (well, month) pairs raise errors naming the line.
obs::PointObservationSet read_points(const std::string& path, double central_meridian);
// writes every (well, month) slot; gaps become empty value fields so the
// time axis survives a round trip
void write_points(const obs::PointObservationSet& o, const std::string& path);

struct PredictionRow {
    std::string well_id;
    size_t time_index = 0;
    double value = 0.0;
};

// CSV with header `well_id,time_index,value`
std::vector<PredictionRow> read_predictions(const std::string& path);
void write_predictions(const std::vector<PredictionRow>& rows, const std::string& path);

// CSV with header `well_id,specific_yield`, one row per well, Sy in (0, 1]
std::map<std::string, double> read_storage_coefficients(const std::string& path);
void write_storage_coefficients(const std::map<std::string, double>& sy,
                                const std::string& path);

// text file, one `lon lat` vertex per line, '#' comments, 3+ vertices
geo::Polygon read_polygon(const std::string& path);
void write_polygon(const geo::Polygon& poly, const std::string& path);

} // namespace stkit::ptio
