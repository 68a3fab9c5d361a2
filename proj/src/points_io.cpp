#include "stkit/points_io.hpp"

#include "stkit/common.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <unordered_map>

namespace stkit::ptio {

namespace {

std::vector<std::string> read_lines(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error::validation("cannot open " + path);
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        lines.push_back(line);
    }
    return lines;
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    size_t start = 0;
    while (true) {
        const size_t comma = line.find(',', start);
        if (comma == std::string::npos) {
            out.push_back(line.substr(start));
            return out;
        }
        out.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
}

std::string where(const std::string& path, size_t line_no) {
    return path + " line " + std::to_string(line_no);
}

double parse_double(const std::string& s, const std::string& ctx) {
    double v = 0.0;
    const char* b = s.data();
    const char* e = b + s.size();
    auto r = std::from_chars(b, e, v);
    if (r.ec != std::errc() || r.ptr != e || !std::isfinite(v))
        throw Error::validation(ctx + ": bad number '" + s + "'");
    return v;
}

size_t parse_index(const std::string& s, const std::string& ctx) {
    size_t v = 0;
    const char* b = s.data();
    const char* e = b + s.size();
    auto r = std::from_chars(b, e, v);
    if (r.ec != std::errc() || r.ptr != e)
        throw Error::validation(ctx + ": bad index '" + s + "'");
    return v;
}

void check_header(const std::vector<std::string>& lines, const std::string& expected,
                  const std::string& path) {
    require(!lines.empty(), path + ": empty file");
    require(lines[0] == expected,
            path + ": expected header '" + expected + "', got '" + lines[0] + "'");
}

std::string fmt_value(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace

obs::PointObservationSet read_points(const std::string& path, double central_meridian) {
    const auto lines = read_lines(path);
    check_header(lines, "well_id,lon,lat,date,value", path);

    struct Row {
        size_t line_no;
        size_t well;
        int month_abs;
        bool has_value;
        double value;
    };
    std::vector<std::string> ids;
    std::vector<double> lons, lats;
    std::unordered_map<std::string, size_t> index_of;
    std::vector<Row> rows;
    int lo = 0, hi = 0;
    bool any = false;

    for (size_t k = 1; k < lines.size(); ++k) {
        if (lines[k].empty()) continue;
        const std::string ctx = where(path, k + 1);
        const auto f = split_csv(lines[k]);
        require(f.size() == 5, ctx + ": expected 5 fields, got " + std::to_string(f.size()));
        require(!f[0].empty(), ctx + ": empty well_id");
        const double lon = parse_double(f[1], ctx);
        const double lat = parse_double(f[2], ctx);
        obs::MonthStamp stamp;
        try {
            stamp = obs::parse_month(f[3]);
        } catch (const Error& e) {
            throw Error::validation(ctx + ": " + e.what());
        }

        size_t w;
        auto it = index_of.find(f[0]);
        if (it == index_of.end()) {
            w = ids.size();
            index_of.emplace(f[0], w);
            ids.push_back(f[0]);
            lons.push_back(lon);
            lats.push_back(lat);
        } else {
            w = it->second;
            require(lons[w] == lon && lats[w] == lat,
                    ctx + ": well " + f[0] + " re-appears with different coordinates");
        }

        Row r;
        r.line_no = k + 1;
        r.well = w;
        r.month_abs = stamp.year * 12 + stamp.month;
        r.has_value = !f[4].empty();
        r.value = r.has_value ? parse_double(f[4], ctx) : 0.0;
        if (!any) {
            lo = hi = r.month_abs;
            any = true;
        } else {
            lo = std::min(lo, r.month_abs);
            hi = std::max(hi, r.month_abs);
        }
        rows.push_back(r);
    }
    require(any, path + ": no observation rows");

    obs::MonthStamp start{(lo - 1) / 12, (lo - 1) % 12 + 1};
    const size_t n_times = size_t(hi - lo + 1);
    std::vector<geo::GeoPoint> pts;
    pts.reserve(ids.size());
    for (size_t w = 0; w < ids.size(); ++w)
        pts.push_back(geo::make_point(ids[w], lons[w], lats[w], central_meridian));
    auto o = obs::PointObservationSet::create(std::move(pts), start, n_times);

    std::vector<size_t> seen_at(o.n_points() * n_times, 0);
    for (const auto& r : rows) {
        const size_t t = size_t(r.month_abs - lo);
        size_t& seen = seen_at[r.well * n_times + t];
        if (seen != 0)
            throw Error::validation(where(path, r.line_no) + ": duplicate observation for well " +
                                    ids[r.well] + " at " + obs::format_month(o.stamp_of(t)) +
                                    " (first at line " + std::to_string(seen) + ")");
        seen = r.line_no;
        if (r.has_value) o.set(r.well, t, r.value);
    }
    return o;
}

void write_points(const obs::PointObservationSet& o, const std::string& path) {
    std::ostringstream out;
    out << "well_id,lon,lat,date,value\n";
    for (size_t i = 0; i < o.n_points(); ++i) {
        const auto& p = o.points[i];
        for (size_t t = 0; t < o.n_times; ++t) {
            out << p.id << ',' << fmt_value(p.lon) << ',' << fmt_value(p.lat) << ','
                << obs::format_month(o.stamp_of(t)) << ',';
            if (o.is_valid(i, t)) out << fmt_value(o.value(i, t));
            out << '\n';
        }
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error::runtime("cannot write " + path);
    f << out.str();
    if (!f) throw Error::runtime("write failed: " + path);
}

std::vector<PredictionRow> read_predictions(const std::string& path) {
    const auto lines = read_lines(path);
    check_header(lines, "well_id,time_index,value", path);
    std::vector<PredictionRow> rows;
    for (size_t k = 1; k < lines.size(); ++k) {
        if (lines[k].empty()) continue;
        const std::string ctx = where(path, k + 1);
        const auto f = split_csv(lines[k]);
        require(f.size() == 3, ctx + ": expected 3 fields, got " + std::to_string(f.size()));
        require(!f[0].empty(), ctx + ": empty well_id");
        PredictionRow r;
        r.well_id = f[0];
        r.time_index = parse_index(f[1], ctx);
        r.value = parse_double(f[2], ctx);
        rows.push_back(r);
    }
    return rows;
}

void write_predictions(const std::vector<PredictionRow>& rows, const std::string& path) {
    std::ostringstream out;
    out << "well_id,time_index,value\n";
    for (const auto& r : rows)
        out << r.well_id << ',' << r.time_index << ',' << fmt_value(r.value) << '\n';
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error::runtime("cannot write " + path);
    f << out.str();
    if (!f) throw Error::runtime("write failed: " + path);
}

std::map<std::string, double> read_storage_coefficients(const std::string& path) {
    const auto lines = read_lines(path);
    check_header(lines, "well_id,specific_yield", path);
    std::map<std::string, double> sy;
    for (size_t k = 1; k < lines.size(); ++k) {
        if (lines[k].empty()) continue;
        const std::string ctx = where(path, k + 1);
        const auto f = split_csv(lines[k]);
        require(f.size() == 2, ctx + ": expected 2 fields, got " + std::to_string(f.size()));
        require(!f[0].empty(), ctx + ": empty well_id");
        const double v = parse_double(f[1], ctx);
        require(v > 0.0 && v <= 1.0, ctx + ": specific yield must be in (0, 1]");
        require(!sy.count(f[0]), ctx + ": duplicate well " + f[0]);
        sy[f[0]] = v;
    }
    require(!sy.empty(), path + ": no storage coefficients");
    return sy;
}

void write_storage_coefficients(const std::map<std::string, double>& sy,
                                const std::string& path) {
    std::ostringstream out;
    out << "well_id,specific_yield\n";
    for (const auto& [id, v] : sy) out << id << ',' << fmt_value(v) << '\n';
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error::runtime("cannot write " + path);
    f << out.str();
    if (!f) throw Error::runtime("write failed: " + path);
}

geo::Polygon read_polygon(const std::string& path) {
    const auto lines = read_lines(path);
    geo::Polygon poly;
    for (size_t k = 0; k < lines.size(); ++k) {
        std::string s = lines[k];
        const size_t hash = s.find('#');
        if (hash != std::string::npos) s.resize(hash);
        std::istringstream iss(s);
        double lon, lat;
        if (!(iss >> lon)) continue; // blank or comment-only line
        const std::string ctx = where(path, k + 1);
        require(bool(iss >> lat), ctx + ": expected 'lon lat'");
        std::string extra;
        require(!(iss >> extra), ctx + ": trailing garbage '" + extra + "'");
        require(std::isfinite(lon) && std::isfinite(lat), ctx + ": non-finite vertex");
        poly.ring.emplace_back(lon, lat);
    }
    require(poly.ring.size() >= 3, path + ": polygon needs at least 3 vertices");
    return poly;
}

void write_polygon(const geo::Polygon& poly, const std::string& path) {
    std::ostringstream out;
    for (const auto& [lon, lat] : poly.ring)
        out << fmt_value(lon) << ' ' << fmt_value(lat) << '\n';
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error::runtime("cannot write " + path);
    f << out.str();
    if (!f) throw Error::runtime("write failed: " + path);
}

} // namespace stkit::ptio
