#include "stkit/observations.hpp"

#include "stkit/common.hpp"

#include <charconv>
#include <cmath>
#include <limits>

namespace stkit::obs {

MonthStamp add_months(MonthStamp m, int k) {
    int idx = m.year * 12 + (m.month - 1) + k;
    MonthStamp r;
    r.year = idx / 12;
    r.month = idx % 12 + 1;
    if (r.month <= 0) { // negative wraparound
        r.month += 12;
        r.year -= 1;
    }
    return r;
}

int months_between(MonthStamp a, MonthStamp b) {
    return (b.year - a.year) * 12 + (b.month - a.month);
}

MonthStamp parse_month(const std::string& s) {
    require(s.size() == 7 && s[4] == '-', "bad month stamp, expected YYYY-MM: " + s);
    MonthStamp m;
    auto r1 = std::from_chars(s.data(), s.data() + 4, m.year);
    auto r2 = std::from_chars(s.data() + 5, s.data() + 7, m.month);
    require(r1.ec == std::errc() && r2.ec == std::errc(), "bad month stamp: " + s);
    require(m.month >= 1 && m.month <= 12, "month out of range in: " + s);
    return m;
}

std::string format_month(MonthStamp m) {
    char buf[8];
    std::snprintf(buf, sizeof buf, "%04d-%02d", m.year, m.month);
    return buf;
}

void PointObservationSet::set(size_t i, size_t t, double v) {
    require(i < n_points() && t < n_times, "observation index out of range");
    require(std::isfinite(v), "observation value must be finite");
    values[i * n_times + t] = v;
    valid[i * n_times + t] = 1;
}

void PointObservationSet::unset(size_t i, size_t t) {
    require(i < n_points() && t < n_times, "observation index out of range");
    values[i * n_times + t] = std::numeric_limits<double>::quiet_NaN();
    valid[i * n_times + t] = 0;
}

int PointObservationSet::month_of(size_t t) const {
    return add_months(start, int(t)).month;
}

PointObservationSet PointObservationSet::create(std::vector<geo::GeoPoint> pts,
                                                MonthStamp start, size_t n_times) {
    PointObservationSet o;
    o.points = std::move(pts);
    o.start = start;
    o.n_times = n_times;
    o.values.assign(o.points.size() * n_times, std::numeric_limits<double>::quiet_NaN());
    o.valid.assign(o.points.size() * n_times, 0);
    return o;
}

geo::MaskedGrid rasterize(const PointObservationSet& o, const geo::GridSpec& grid, size_t t) {
    require(t < o.n_times, "rasterize: timestep out of range");
    geo::MaskedGrid out(grid.n_rows, grid.n_cols);
    std::vector<double> sums(grid.n_rows * grid.n_cols, 0.0);
    std::vector<size_t> counts(grid.n_rows * grid.n_cols, 0);
    for (size_t i = 0; i < o.n_points(); ++i) {
        if (!o.is_valid(i, t)) continue;
        auto cell = grid.cell_of(o.points[i].lon, o.points[i].lat);
        if (!cell) continue;
        const size_t idx = cell->first * grid.n_cols + cell->second;
        sums[idx] += o.value(i, t);
        counts[idx] += 1;
    }
    for (size_t r = 0; r < grid.n_rows; ++r)
        for (size_t c = 0; c < grid.n_cols; ++c) {
            const size_t idx = r * grid.n_cols + c;
            if (counts[idx] > 0) out.set(r, c, sums[idx] / double(counts[idx]));
        }
    return out;
}

} // namespace stkit::obs
