#pragma once

#include "stkit/geo.hpp"

#include <cstddef>
#include <string>
#include <vector>

namespace stkit::obs {

// calendar month, month in [1, 12]
struct MonthStamp {
    int year = 2000;
    int month = 1;

    bool operator==(const MonthStamp&) const = default;
};

MonthStamp add_months(MonthStamp m, int k);
// signed count of months from a to b (b - a)
int months_between(MonthStamp a, MonthStamp b);
MonthStamp parse_month(const std::string& s); // "YYYY-MM"
std::string format_month(MonthStamp m);

struct PointObservationSet {
    std::vector<geo::GeoPoint> points;
    MonthStamp start;
    size_t n_times = 0;
    std::vector<double> values;       // n_points x n_times, row-major
    std::vector<unsigned char> valid; // same layout

    size_t n_points() const { return points.size(); }
    double value(size_t i, size_t t) const { return values[i * n_times + t]; }
    bool is_valid(size_t i, size_t t) const { return valid[i * n_times + t] != 0; }
    void set(size_t i, size_t t, double v);
    void unset(size_t i, size_t t);
    // calendar month (1..12) of time index t
    int month_of(size_t t) const;
    MonthStamp stamp_of(size_t t) const { return add_months(start, int(t)); }

    static PointObservationSet create(std::vector<geo::GeoPoint> pts, MonthStamp start,
                                      size_t n_times);
};

// per-cell mean of valid observations at timestep t; empty cells masked out
geo::MaskedGrid rasterize(const PointObservationSet& o, const geo::GridSpec& grid, size_t t);

} // namespace stkit::obs
