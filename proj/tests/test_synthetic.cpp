#include "doctest.h"

#include "stkit/common.hpp"
#include "stkit/synthetic.hpp"

#include <cmath>

using namespace stkit;

namespace {

geo::GeoPoint at_xy(const char* id, double x, double y) {
    geo::GeoPoint p;
    p.id = id;
    p.x = x;
    p.y = y;
    return p;
}

double mean_of(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / double(v.size());
}

} // namespace

TEST_CASE("grf draws match the target variance and covariance") {
    vario::Model m{vario::Family::exponential, 0.1, 1.0, 50000.0};
    std::vector<geo::GeoPoint> pts = {at_xy("a", 0.0, 0.0), at_xy("b", 10000.0, 0.0),
                                      at_xy("c", 400000.0, 0.0)};
    Rng rng(91);
    const size_t T = 40000;
    auto draws = synth::sample_grf(pts, m, T, rng);
    REQUIRE(draws.size() == T);
    REQUIRE(draws[0].size() == 3);

    std::vector<double> a(T), b(T), c(T);
    for (size_t t = 0; t < T; ++t) {
        a[t] = draws[t][0];
        b[t] = draws[t][1];
        c[t] = draws[t][2];
    }
    const double ma = mean_of(a), mb = mean_of(b), mc = mean_of(c);
    double va = 0.0, cab = 0.0, cac = 0.0;
    for (size_t t = 0; t < T; ++t) {
        va += (a[t] - ma) * (a[t] - ma);
        cab += (a[t] - ma) * (b[t] - mb);
        cac += (a[t] - ma) * (c[t] - mc);
    }
    va /= double(T - 1);
    cab /= double(T - 1);
    cac /= double(T - 1);

    CHECK(std::abs(ma) < 0.02);
    // var = sill, cov(10 km) = psill * exp(-3 * 10 / 50)
    CHECK(va == doctest::Approx(1.1).epsilon(0.05));
    CHECK(cab == doctest::Approx(std::exp(-0.6)).epsilon(0.06));
    CHECK(std::abs(cac) < 0.03);
}

TEST_CASE("grf spherical correlation vanishes beyond the range") {
    vario::Model m{vario::Family::spherical, 0.0, 2.0, 20000.0};
    std::vector<geo::GeoPoint> pts = {at_xy("a", 0.0, 0.0), at_xy("b", 10000.0, 0.0),
                                      at_xy("c", 25000.0, 0.0)};
    Rng rng(17);
    const size_t T = 40000;
    auto draws = synth::sample_grf(pts, m, T, rng);
    double cab = 0.0, cac = 0.0;
    for (size_t t = 0; t < T; ++t) {
        cab += draws[t][0] * draws[t][1];
        cac += draws[t][0] * draws[t][2];
    }
    cab /= double(T);
    cac /= double(T);
    // spherical corr at h = r/2 is 1 - 1.5*0.5 + 0.5*0.125 = 0.3125
    CHECK(cab == doctest::Approx(2.0 * 0.3125).epsilon(0.08));
    CHECK(std::abs(cac) < 0.05);
}

TEST_CASE("grf rejects empty input and negative variance") {
    Rng rng(1);
    std::vector<geo::GeoPoint> none;
    CHECK_THROWS_AS(synth::sample_grf(none, {}, 3, rng), Error);
    vario::Model bad{vario::Family::exponential, -0.5, 1.0, 1000.0};
    std::vector<geo::GeoPoint> one = {at_xy("a", 0, 0)};
    CHECK_THROWS_AS(synth::sample_grf(one, bad, 3, rng), Error);
}

TEST_CASE("fixture has the requested layout and is deterministic") {
    synth::FixtureConfig cfg;
    auto f1 = synth::make_fixture(cfg, 7);
    auto f2 = synth::make_fixture(cfg, 7);
    auto f3 = synth::make_fixture(cfg, 8);

    CHECK(f1.train.size() == cfg.n_blob + cfg.n_uniform);
    CHECK(f1.holdout.size() == cfg.n_holdout);
    CHECK(f1.train_values.size() == cfg.n_times);
    CHECK(f1.train_values[0].size() == f1.train.size());
    CHECK(f1.holdout_values[0].size() == f1.holdout.size());

    for (size_t i = 0; i < f1.train.size(); ++i) {
        CHECK(f1.train[i].x == f2.train[i].x);
        CHECK(f1.train[i].id == f2.train[i].id);
    }
    CHECK(f1.train_values[13][5] == f2.train_values[13][5]);
    CHECK(f1.holdout_values[59][19] == f2.holdout_values[59][19]);
    CHECK(f1.train_values[13][5] != f3.train_values[13][5]);

    // stations stay inside the projected square
    const auto [x0, y0] = geo::project(cfg.anchor_lon, cfg.anchor_lat, cfg.central_meridian);
    for (const auto& p : f1.train) {
        CHECK(p.x >= x0);
        CHECK(p.x <= x0 + cfg.extent);
        CHECK(p.y >= y0);
        CHECK(p.y <= y0 + cfg.extent);
    }
}

TEST_CASE("fixture with cells samples stations and grid jointly") {
    synth::FixtureConfig cfg;
    cfg.n_blob = 6;
    cfg.n_uniform = 6;
    cfg.n_holdout = 4;
    cfg.n_times = 5;
    cfg.n_cells = 8;
    auto f = synth::make_fixture(cfg, 3);

    CHECK(f.grid.n_rows == 8);
    CHECK(f.grid.n_cols == 8);
    CHECK(f.stack.n_t == 5);
    CHECK(f.stack.n_c == 3);
    CHECK(f.stack.channel_index("proxy") == 0);
    CHECK(f.stack.channel_index("seasonal") == 1);
    CHECK(f.stack.channel_index("white") == 2);

    // every station lands inside the grid footprint
    for (const auto& p : f.train) CHECK(f.grid.cell_of(p.lon, p.lat).has_value());
    for (const auto& p : f.holdout) CHECK(f.grid.cell_of(p.lon, p.lat).has_value());

    // the proxy channel tracks the shared field at station cells: correlation
    // between a holdout series and the proxy at its cell should be strong
    const auto& h = f.holdout[0];
    const auto rc = f.grid.cell_of(h.lon, h.lat).value();
    double num = 0.0, dh = 0.0, dp = 0.0;
    for (size_t t = 0; t < cfg.n_times; ++t) {
        const double hv = f.holdout_values[t][0];
        const double pv = double(f.stack.at(t, 0, rc.first, rc.second));
        num += hv * pv;
        dh += hv * hv;
        dp += pv * pv;
    }
    CHECK(num / std::sqrt(dh * dp) > 0.3);
}

TEST_CASE("demo dataset invariants") {
    synth::DemoConfig cfg;
    auto d = synth::make_demo(cfg);

    CHECK(d.points.n_points() == cfg.n_wells);
    CHECK(d.points.n_times == cfg.n_times);
    CHECK(d.stack.n_t == cfg.n_times);
    CHECK(d.stack.n_c == 5);
    CHECK(d.stack.n_h == d.grid.n_rows);
    CHECK(d.stack.channel_index("dtws") == 4);
    CHECK(d.specific_yield.size() == cfg.n_wells);
    for (double sy : d.specific_yield) {
        CHECK(sy > 0.0);
        CHECK(sy < 1.0);
    }

    size_t missing = 0, total = cfg.n_wells * cfg.n_times;
    for (size_t i = 0; i < cfg.n_wells; ++i)
        for (size_t t = 0; t < cfg.n_times; ++t)
            if (!d.points.is_valid(i, t)) ++missing;
    CHECK(missing > 0);
    CHECK(double(missing) / double(total) < 0.2);
    for (size_t t = 0; t < 5; ++t) CHECK_FALSE(d.points.is_valid(1, t));

    // the deliberate record break in well 2 shifts the level
    double pre = 0.0, post = 0.0;
    size_t n_pre = 0, n_post = 0;
    const size_t cut = 2 * cfg.n_times / 3;
    for (size_t t = 0; t < cfg.n_times; ++t) {
        if (!d.points.is_valid(2, t)) continue;
        if (t < cut) {
            pre += d.points.value(2, t);
            ++n_pre;
        } else {
            post += d.points.value(2, t);
            ++n_post;
        }
    }
    CHECK(post / double(n_post) - pre / double(n_pre) > 4.0);

    // elevation is static
    CHECK(d.stack.at(0, 3, 4, 7) == d.stack.at(60, 3, 4, 7));

    // polygon covers the southwest and excludes the notched northeast corner
    const auto sw = d.grid.cell_center(0, 0);
    CHECK(d.area.contains(sw.first, sw.second));
    const double lon_ne = d.grid.lon_min + 0.9 * (d.grid.lon_max() - d.grid.lon_min);
    const double lat_ne = d.grid.lat_min + 0.9 * (d.grid.lat_max() - d.grid.lat_min);
    CHECK_FALSE(d.area.contains(lon_ne, lat_ne));

    // wells fall inside the grid
    for (const auto& p : d.points.points) CHECK(d.grid.cell_of(p.lon, p.lat).has_value());
}
