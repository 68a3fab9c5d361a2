#include "stkit/synthetic.hpp"

#include "stkit/common.hpp"
#include "stkit/solver.hpp"

#include <cmath>
#include <numbers>

namespace stkit::synth {

namespace {

double corr_of(const vario::Model& m, double h) {
    if (h <= 0.0) return 1.0;
    switch (m.family) {
    case vario::Family::exponential:
        return std::exp(-3.0 * h / m.range);
    case vario::Family::gaussian:
        return std::exp(-3.0 * h * h / (m.range * m.range));
    case vario::Family::spherical: {
        if (h >= m.range) return 0.0;
        const double u = h / m.range;
        return 1.0 - 1.5 * u + 0.5 * u * u * u;
    }
    }
    return 0.0;
}

} // namespace

std::vector<std::vector<double>> sample_grf(const std::vector<geo::GeoPoint>& pts,
                                            const vario::Model& m, size_t T, Rng& rng) {
    const size_t n = pts.size();
    require(n >= 1, "sample_grf: no points");
    require(m.partial_sill >= 0.0 && m.nugget >= 0.0, "sample_grf: negative variance");
    std::vector<double> C(n * n);
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < n; ++j) {
            const double dx = pts[i].x - pts[j].x;
            const double dy = pts[i].y - pts[j].y;
            C[i * n + j] = m.partial_sill * corr_of(m, std::sqrt(dx * dx + dy * dy));
            if (i == j) C[i * n + j] += 1e-10 + 1e-12 * m.partial_sill;
        }
    auto chol = solver::CholFactor::compute(std::move(C), n);

    const double nug_sd = std::sqrt(m.nugget);
    std::vector<std::vector<double>> out(T);
    std::vector<double> g(n);
    for (size_t t = 0; t < T; ++t) {
        for (auto& x : g) x = rng.normal();
        out[t] = chol.lower_mul(g);
        for (size_t i = 0; i < n; ++i) out[t][i] += nug_sd * rng.normal();
    }
    return out;
}

Fixture make_fixture(const FixtureConfig& cfg, uint64_t seed) {
    Rng rng(seed);
    const auto [x0, y0] = geo::project(cfg.anchor_lon, cfg.anchor_lat, cfg.central_meridian);

    auto place = [&](const std::string& id, double dx, double dy) {
        const auto [lon, lat] = geo::unproject(x0 + dx, y0 + dy, cfg.central_meridian);
        geo::GeoPoint p;
        p.id = id;
        p.lon = lon;
        p.lat = lat;
        p.x = x0 + dx;
        p.y = y0 + dy;
        return p;
    };

    Fixture f;
    for (size_t i = 0; i < cfg.n_blob; ++i) {
        const double ax = rng.uniform(0.05 * cfg.extent, 0.75 * cfg.extent);
        const double ay = rng.uniform(0.05 * cfg.extent, 0.75 * cfg.extent);
        f.train.push_back(place("w" + std::to_string(i), ax + rng.uniform(0.0, cfg.blob_box),
                                ay + rng.uniform(0.0, cfg.blob_box)));
    }
    for (size_t i = 0; i < cfg.n_uniform; ++i)
        f.train.push_back(place("w" + std::to_string(cfg.n_blob + i),
                                rng.uniform(0.0, cfg.extent), rng.uniform(0.0, cfg.extent)));
    for (size_t i = 0; i < cfg.n_holdout; ++i)
        f.holdout.push_back(place("h" + std::to_string(i), rng.uniform(0.0, cfg.extent),
                                  rng.uniform(0.0, cfg.extent)));

    std::vector<geo::GeoPoint> all = f.train;
    all.insert(all.end(), f.holdout.begin(), f.holdout.end());

    if (cfg.n_cells > 0) {
        // lon/lat grid spanning the projected square, sized from the NE corner
        const auto [lon1, lat1] =
            geo::unproject(x0 + cfg.extent, y0 + cfg.extent, cfg.central_meridian);
        f.grid.lon_min = cfg.anchor_lon;
        f.grid.lat_min = cfg.anchor_lat;
        f.grid.n_cols = cfg.n_cells;
        f.grid.n_rows = cfg.n_cells;
        f.grid.cell_size = std::max(lon1 - cfg.anchor_lon, lat1 - cfg.anchor_lat) /
                           double(cfg.n_cells);
        for (size_t r = 0; r < f.grid.n_rows; ++r)
            for (size_t c = 0; c < f.grid.n_cols; ++c) {
                const auto [lon, lat] = f.grid.cell_center(r, c);
                all.push_back(geo::make_point("cell", lon, lat, cfg.central_meridian));
            }
    }

    const auto values = sample_grf(all, cfg.model, cfg.n_times, rng);
    const size_t n_tr = f.train.size(), n_ho = f.holdout.size();
    f.train_values.assign(cfg.n_times, std::vector<double>(n_tr));
    f.holdout_values.assign(cfg.n_times, std::vector<double>(n_ho));
    for (size_t t = 0; t < cfg.n_times; ++t) {
        for (size_t i = 0; i < n_tr; ++i) f.train_values[t][i] = values[t][i];
        for (size_t i = 0; i < n_ho; ++i) f.holdout_values[t][i] = values[t][n_tr + i];
    }

    if (cfg.n_cells > 0) {
        f.stack = gridio::GridStack::create(uint32_t(cfg.n_times), 3, uint32_t(f.grid.n_rows),
                                            uint32_t(f.grid.n_cols),
                                            {"proxy", "seasonal", "white"});
        for (size_t t = 0; t < cfg.n_times; ++t) {
            size_t k = 0;
            for (size_t r = 0; r < f.grid.n_rows; ++r)
                for (size_t c = 0; c < f.grid.n_cols; ++c, ++k) {
                    const double field = values[t][n_tr + n_ho + k];
                    f.stack.set(t, 0, r, c, float(field + cfg.proxy_noise_sd * rng.normal()));
                    const double phase = 2.0 * std::numbers::pi * double(t % 12) / 12.0;
                    f.stack.set(t, 1, r, c,
                                float(std::sin(phase) * (1.0 + 0.2 * double(c) /
                                                                   double(f.grid.n_cols))));
                    f.stack.set(t, 2, r, c, float(rng.normal()));
                }
        }
    }
    return f;
}

Demo make_demo(const DemoConfig& cfg) {
    Rng rng(cfg.seed);
    FixtureConfig fx;
    fx.n_blob = cfg.n_wells / 3;
    fx.n_uniform = cfg.n_wells - fx.n_blob;
    fx.n_holdout = 0;
    fx.n_times = 1; // layout only; the field is drawn below with AR structure
    Fixture layout = make_fixture(fx, rng.next_u64());

    Demo d;
    const size_t n = cfg.n_wells;
    const size_t T = cfg.n_times;

    // AR(1) field over GRF innovations
    vario::Model m{vario::Family::exponential, 0.05, 1.0, 35000.0};
    std::vector<geo::GeoPoint> pts = layout.train;

    d.grid.lon_min = fx.anchor_lon;
    d.grid.lat_min = fx.anchor_lat;
    d.grid.n_cols = 11;
    d.grid.n_rows = 11;
    d.grid.cell_size = 0.05;
    std::vector<geo::GeoPoint> all = pts;
    for (size_t r = 0; r < d.grid.n_rows; ++r)
        for (size_t c = 0; c < d.grid.n_cols; ++c) {
            const auto [lon, lat] = d.grid.cell_center(r, c);
            all.push_back(geo::make_point("cell", lon, lat, fx.central_meridian));
        }
    const auto innov = sample_grf(all, m, T, rng);
    const double rho = 0.8;
    std::vector<std::vector<double>> field(T, std::vector<double>(all.size()));
    field[0] = innov[0];
    for (size_t t = 1; t < T; ++t)
        for (size_t i = 0; i < all.size(); ++i)
            field[t][i] = rho * field[t - 1][i] + std::sqrt(1.0 - rho * rho) * innov[t][i];

    d.points = obs::PointObservationSet::create(pts, cfg.start, T);
    std::vector<double> phase(n), level(n);
    for (size_t i = 0; i < n; ++i) {
        phase[i] = rng.uniform(0.0, 0.6);
        level[i] = rng.uniform(6.0, 14.0);
        d.specific_yield.push_back(rng.uniform(0.05, 0.25));
    }
    for (size_t i = 0; i < n; ++i)
        for (size_t t = 0; t < T; ++t) {
            const int month = d.points.month_of(t);
            const double seasonal =
                2.0 * std::sin(2.0 * std::numbers::pi * (double(month - 4) / 12.0) + phase[i]);
            double v = level[i] + seasonal + 1.5 * field[t][i];
            // well 2 gets a deliberate sensor change two-thirds through
            if (i == 2 && t >= 2 * T / 3) v += 9.0;
            d.points.set(i, t, v);
        }
    // knock out a fraction of observations, plus a leading gap on well 1
    for (size_t i = 0; i < n; ++i)
        for (size_t t = 0; t < T; ++t)
            if (rng.uniform() < cfg.gap_fraction) d.points.unset(i, t);
    for (size_t t = 0; t < 5 && n > 1; ++t) d.points.unset(1, t);

    d.stack = gridio::GridStack::create(uint32_t(T), 5, uint32_t(d.grid.n_rows),
                                        uint32_t(d.grid.n_cols),
                                        {"ndvi", "precip", "aet", "elevation", "dtws"});
    std::vector<double> elev(d.grid.n_rows * d.grid.n_cols);
    for (auto& e : elev) e = rng.uniform(2.0, 30.0);
    for (size_t t = 0; t < T; ++t) {
        const int month = int((cfg.start.month - 1 + t) % 12) + 1;
        const double season = std::sin(2.0 * std::numbers::pi * double(month - 4) / 12.0);
        size_t k = 0;
        for (size_t r = 0; r < d.grid.n_rows; ++r)
            for (size_t c = 0; c < d.grid.n_cols; ++c, ++k) {
                const double f = field[t][n + k];
                d.stack.set(t, 0, r, c, float(0.5 + 0.2 * season + 0.05 * rng.normal()));
                d.stack.set(t, 1, r, c,
                            float(std::max(0.0, 180.0 * std::max(0.0, season) +
                                                    25.0 * rng.normal())));
                d.stack.set(t, 2, r, c, float(60.0 + 30.0 * season + 6.0 * rng.normal()));
                d.stack.set(t, 3, r, c, float(elev[k]));
                d.stack.set(t, 4, r, c, float(-1.2 * f + 0.3 * rng.normal()));
            }
    }

    const double W = d.grid.lon_max() - d.grid.lon_min;
    const double H = d.grid.lat_max() - d.grid.lat_min;
    const double lon0 = d.grid.lon_min, lat0 = d.grid.lat_min;
    d.area.ring = {{lon0 + 0.01 * W, lat0 + 0.01 * H},
                   {lon0 + 0.99 * W, lat0 + 0.01 * H},
                   {lon0 + 0.99 * W, lat0 + 0.55 * H},
                   {lon0 + 0.60 * W, lat0 + 0.55 * H},
                   {lon0 + 0.60 * W, lat0 + 0.99 * H},
                   {lon0 + 0.01 * W, lat0 + 0.99 * H}};
    return d;
}

} // namespace stkit::synth
