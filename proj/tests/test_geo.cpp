#include <doctest.h>

#include "stkit/common.hpp"
#include "stkit/geo.hpp"
#include "stkit/observations.hpp"
#include "stkit/rng.hpp"

#include <cmath>

using namespace stkit;
using geo::GridSpec;
using geo::MaskedGrid;
using geo::Polygon;

TEST_CASE("projection maps the central meridian to false easting") {
    auto [x, y] = geo::project(93.0, 0.0, 93.0);
    CHECK(x == doctest::Approx(500000.0).epsilon(1e-12));
    CHECK(std::fabs(y) < 1e-6);
}

TEST_CASE("projection matches a frozen high-precision reference") {
    // golden value computed with two independent 50-digit transverse Mercator
    // formulations (series orders beyond double precision), frozen here
    auto [x, y] = geo::project(90.4, 23.8, 93.0);
    CHECK(std::fabs(x - 235082.39013732) < 1e-3);
    CHECK(std::fabs(y - 2634510.79699714) < 1e-3);
}

TEST_CASE("projection scale factor is 0.9996 on the central meridian") {
    // meridian arc: northing difference over a small latitude step approaches
    // k0 * meridional radius of curvature * dphi
    auto [x1, y1] = geo::project(93.0, 23.0, 93.0);
    auto [x2, y2] = geo::project(93.0, 23.0001, 93.0);
    (void)x1;
    (void)x2;
    const double a = 6378137.0, f = 1.0 / 298.257223563;
    const double e2 = f * (2.0 - f);
    const double phi = 23.00005 * M_PI / 180.0;
    const double m = a * (1.0 - e2) / std::pow(1.0 - e2 * std::sin(phi) * std::sin(phi), 1.5);
    const double dphi = 0.0001 * M_PI / 180.0;
    CHECK((y2 - y1) / (m * dphi) == doctest::Approx(0.9996).epsilon(1e-7));
}

TEST_CASE("projection round trips across the valid domain") {
    Rng rng(321);
    for (int i = 0; i < 1000; ++i) {
        const double lon = rng.uniform(93.0 - 28.0, 93.0 + 28.0);
        const double lat = rng.uniform(-79.0, 83.0);
        auto [x, y] = geo::project(lon, lat, 93.0);
        auto [lon2, lat2] = geo::unproject(x, y, 93.0);
        CHECK(std::fabs(lon2 - lon) < 1e-6);
        CHECK(std::fabs(lat2 - lat) < 1e-6);
    }
}

TEST_CASE("projection rejects out-of-domain input") {
    CHECK_THROWS_AS((void)geo::project(93.0, -85.0, 93.0), Error);
    CHECK_THROWS_AS((void)geo::project(93.0, 87.0, 93.0), Error);
    CHECK_THROWS_AS((void)geo::project(150.0, 10.0, 93.0), Error);
}

TEST_CASE("cell_of implements half-open cells") {
    GridSpec g{.lon_min = 10.0, .lat_min = 20.0, .cell_size = 0.25, .n_cols = 4, .n_rows = 3};

    auto center = g.cell_of(10.125, 20.125);
    REQUIRE(center.has_value());
    CHECK(center->first == 0);
    CHECK(center->second == 0);

    // shared edge belongs to the upper cell
    auto edge = g.cell_of(10.25, 20.1);
    REQUIRE(edge.has_value());
    CHECK(edge->first == 0);
    CHECK(edge->second == 1);

    CHECK_FALSE(g.cell_of(9.99, 20.1).has_value());
    CHECK_FALSE(g.cell_of(10.1, 22.0).has_value());
    // upper boundary is exclusive
    CHECK_FALSE(g.cell_of(11.0, 20.1).has_value());
    CHECK(g.cell_of(10.999, 20.749).has_value());
}

TEST_CASE("cell_of covers the box without gaps or overlaps") {
    GridSpec g{.lon_min = -1.0, .lat_min = 5.0, .cell_size = 0.5, .n_cols = 6, .n_rows = 5};
    Rng rng(8);
    for (int i = 0; i < 2000; ++i) {
        const double lon = rng.uniform(-1.0, g.lon_max() - 1e-9);
        const double lat = rng.uniform(5.0, g.lat_max() - 1e-9);
        auto cell = g.cell_of(lon, lat);
        REQUIRE(cell.has_value());
        auto [r, c] = *cell;
        CHECK(r < g.n_rows);
        CHECK(c < g.n_cols);
        CHECK(lon >= g.lon_min + double(c) * g.cell_size);
        CHECK(lon < g.lon_min + double(c + 1) * g.cell_size);
        CHECK(lat >= g.lat_min + double(r) * g.cell_size);
        CHECK(lat < g.lat_min + double(r + 1) * g.cell_size);
    }
}

TEST_CASE("masked grid hides sentinel values") {
    MaskedGrid m(2, 3);
    CHECK(m.valid_count() == 0);
    CHECK_THROWS_AS((void)m.at(0, 0), Error);
    m.set(1, 2, 4.5);
    CHECK(m.valid(1, 2));
    CHECK(m.at(1, 2) == 4.5);
    CHECK(m.valid_count() == 1);
    m.clear(1, 2);
    CHECK_FALSE(m.valid(1, 2));
}

TEST_CASE("rasterize averages wells per cell and masks empty cells") {
    GridSpec g{.lon_min = 0.0, .lat_min = 0.0, .cell_size = 1.0, .n_cols = 2, .n_rows = 1};
    std::vector<geo::GeoPoint> pts = {
        {"a", 0.2, 0.5, 0, 0}, {"b", 0.7, 0.5, 0, 0}, {"c", 1.5, 0.5, 0, 0}};
    auto o = obs::PointObservationSet::create(pts, {2004, 1}, 2);
    o.set(0, 0, 1.0);
    o.set(1, 0, 2.0);
    o.set(2, 0, 6.0);
    o.set(0, 1, 1.0);
    o.set(1, 1, 3.0);

    auto m0 = rasterize(o, g, 0);
    CHECK(m0.at(0, 0) == doctest::Approx(1.5));
    CHECK(m0.at(0, 1) == doctest::Approx(6.0));

    auto m1 = rasterize(o, g, 1);
    CHECK(m1.at(0, 0) == doctest::Approx(2.0));
    CHECK_FALSE(m1.valid(0, 1));
}

TEST_CASE("rasterize is permutation invariant and mean stays within bounds") {
    GridSpec g{.lon_min = 0.0, .lat_min = 0.0, .cell_size = 0.5, .n_cols = 4, .n_rows = 4};
    Rng rng(55);
    std::vector<geo::GeoPoint> pts;
    std::vector<double> vals;
    for (int i = 0; i < 40; ++i) {
        pts.push_back({"w" + std::to_string(i), rng.uniform(0.0, 2.0), rng.uniform(0.0, 2.0), 0, 0});
        vals.push_back(rng.uniform(-5.0, 5.0));
    }
    auto o1 = obs::PointObservationSet::create(pts, {2004, 1}, 1);
    for (int i = 0; i < 40; ++i) o1.set(size_t(i), 0, vals[size_t(i)]);

    std::vector<geo::GeoPoint> rev(pts.rbegin(), pts.rend());
    auto o2 = obs::PointObservationSet::create(rev, {2004, 1}, 1);
    for (int i = 0; i < 40; ++i) o2.set(size_t(i), 0, vals[size_t(39 - i)]);

    auto m1 = rasterize(o1, g, 0);
    auto m2 = rasterize(o2, g, 0);
    for (size_t r = 0; r < 4; ++r)
        for (size_t c = 0; c < 4; ++c) {
            CHECK(m1.valid(r, c) == m2.valid(r, c));
            if (m1.valid(r, c)) {
                CHECK(m1.at(r, c) == doctest::Approx(m2.at(r, c)).epsilon(1e-12));
                double lo = 1e30, hi = -1e30;
                for (int i = 0; i < 40; ++i) {
                    auto cell = g.cell_of(pts[size_t(i)].lon, pts[size_t(i)].lat);
                    if (cell && cell->first == r && cell->second == c) {
                        lo = std::min(lo, vals[size_t(i)]);
                        hi = std::max(hi, vals[size_t(i)]);
                    }
                }
                CHECK(m1.at(r, c) >= lo - 1e-12);
                CHECK(m1.at(r, c) <= hi + 1e-12);
            }
        }
}

TEST_CASE("month arithmetic") {
    obs::MonthStamp a{2002, 4};
    CHECK(obs::add_months(a, 0) == a);
    CHECK(obs::add_months(a, 9) == obs::MonthStamp{2003, 1});
    CHECK(obs::add_months(a, 181) == obs::MonthStamp{2017, 5});
    CHECK(obs::months_between(a, obs::MonthStamp{2017, 5}) == 181);
    CHECK(obs::months_between(obs::MonthStamp{2017, 5}, a) == -181);
    CHECK(obs::parse_month("2002-04") == a);
    CHECK(obs::format_month(a) == "2002-04");
    CHECK_THROWS_AS((void)obs::parse_month("2002/04"), Error);
    CHECK_THROWS_AS((void)obs::parse_month("2002-13"), Error);
}

TEST_CASE("polygon containment with even-odd rule") {
    Polygon p{{{0, 0}, {4, 0}, {4, 4}, {0, 4}}};
    CHECK(p.contains(2, 2));
    CHECK_FALSE(p.contains(5, 2));
    CHECK_FALSE(p.contains(-1, 2));

    // concave: notch cut out
    Polygon c{{{0, 0}, {6, 0}, {6, 6}, {3, 6}, {3, 3}, {0, 3}}};
    CHECK(c.contains(1, 1));
    CHECK(c.contains(4, 4));
    CHECK_FALSE(c.contains(1, 5));

    GridSpec g{.lon_min = 0.0, .lat_min = 0.0, .cell_size = 2.0, .n_cols = 3, .n_rows = 3};
    auto mask = polygon_cell_mask(c, g);
    CHECK(mask[0 * 3 + 0] == 1); // center (1,1)
    CHECK(mask[2 * 3 + 0] == 0); // center (1,5)
    CHECK(mask[2 * 3 + 2] == 1); // center (5,5)
}
