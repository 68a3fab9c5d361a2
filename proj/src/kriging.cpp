#include "stkit/kriging.hpp"

#include "stkit/common.hpp"
#include "stkit/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace stkit::krige {

namespace {

std::vector<double> augmented_matrix(const std::vector<geo::GeoPoint>& pts,
                                     const vario::Model& model) {
    const size_t n = pts.size();
    const size_t m = n + 1;
    std::vector<double> a(m * m, 0.0);
    for (size_t i = 0; i < n; ++i) {
        for (size_t j = 0; j < i; ++j) {
            const double dx = pts[i].x - pts[j].x;
            const double dy = pts[i].y - pts[j].y;
            const double g = vario::gamma(model, std::sqrt(dx * dx + dy * dy));
            a[i * m + j] = g;
            a[j * m + i] = g;
        }
        a[i * m + i] = 0.0;
        a[i * m + n] = 1.0;
        a[n * m + i] = 1.0;
    }
    return a;
}

void check_duplicates(const std::vector<geo::GeoPoint>& pts) {
    std::map<std::pair<double, double>, size_t> seen;
    for (size_t i = 0; i < pts.size(); ++i) {
        auto key = std::make_pair(pts[i].x, pts[i].y);
        auto [it, inserted] = seen.emplace(key, i);
        if (!inserted)
            throw Error::validation("duplicate station coordinates: '" +
                                    pts[it->second].id + "' and '" + pts[i].id + "'");
    }
}

} // namespace

System System::build(std::vector<geo::GeoPoint> points, vario::Model model) {
    require(points.size() >= 2, "kriging needs at least two stations");
    check_duplicates(points);
    System s;
    s.pts_ = std::move(points);
    s.model_ = model;
    s.xs_.resize(s.pts_.size());
    s.ys_.resize(s.pts_.size());
    for (size_t i = 0; i < s.pts_.size(); ++i) {
        s.xs_[i] = s.pts_[i].x;
        s.ys_[i] = s.pts_[i].y;
    }
    auto a = augmented_matrix(s.pts_, model);
    s.factor_ = solver::LdltFactor::compute(std::move(a), s.pts_.size() + 1);
    return s;
}

System System::build_local(std::vector<geo::GeoPoint> points, vario::Model model,
                           LocalParams params) {
    require(points.size() >= 2, "kriging needs at least two stations");
    require(params.max_neighbors >= 2, "local kriging needs at least two neighbors");
    require(params.search_radius > 0.0, "search radius must be positive");
    check_duplicates(points);
    System s;
    s.pts_ = std::move(points);
    s.model_ = model;
    s.xs_.resize(s.pts_.size());
    s.ys_.resize(s.pts_.size());
    for (size_t i = 0; i < s.pts_.size(); ++i) {
        s.xs_[i] = s.pts_[i].x;
        s.ys_[i] = s.pts_[i].y;
    }
    s.local_ = params;
    return s;
}

std::vector<size_t> System::local_neighbors(double x, double y) const {
    require(local_.has_value(), "local_neighbors requires local mode");
    const size_t n = pts_.size();
    std::vector<double> d2(n);
    kernels::active().squared_dist(xs_.data(), ys_.data(), x, y, d2.data(), n);

    const double r2 = local_->search_radius * local_->search_radius;
    std::vector<size_t> idx;
    idx.reserve(n);
    for (size_t i = 0; i < n; ++i)
        if (d2[i] <= r2) idx.push_back(i);
    if (idx.empty())
        throw Error::runtime("no stations within search radius of target");

    std::sort(idx.begin(), idx.end(), [&](size_t a, size_t b) {
        if (d2[a] != d2[b]) return d2[a] < d2[b];
        return pts_[a].id < pts_[b].id;
    });
    if (idx.size() > local_->max_neighbors) idx.resize(local_->max_neighbors);
    return idx;
}

System::Plan System::plan_target(double x, double y) const {
    const size_t n = pts_.size();
    Plan p;
    if (!local_) {
        std::vector<double> d(n);
        kernels::active().squared_dist(xs_.data(), ys_.data(), x, y, d.data(), n);
        kernels::active().sqrt_arr(d.data(), d.data(), n);
        std::vector<double> rhs(n + 1, 1.0);
        vario::gamma_batch(model_, d.data(), rhs.data(), n);
        std::vector<double> sol = factor_->solve(rhs);
        p.mu = sol[n];
        sol.resize(n);
        p.weights = std::move(sol);
        p.station_idx.resize(n);
        for (size_t i = 0; i < n; ++i) p.station_idx[i] = i;
        const double var = p.mu + kernels::active().dot(p.weights.data(), rhs.data(), n);
        if (var < -1e-9)
            throw Error::runtime("kriging variance below -1e-9: solver inconsistency");
        p.variance = std::max(var, 0.0);
        return p;
    }

    auto idx = local_neighbors(x, y);
    const size_t k = idx.size();
    std::vector<geo::GeoPoint> sub(k);
    for (size_t i = 0; i < k; ++i) sub[i] = pts_[idx[i]];
    auto a = augmented_matrix(sub, model_);
    auto f = solver::LdltFactor::compute(std::move(a), k + 1);

    std::vector<double> d(k);
    for (size_t i = 0; i < k; ++i) {
        const double dx = sub[i].x - x;
        const double dy = sub[i].y - y;
        d[i] = std::sqrt(dx * dx + dy * dy);
    }
    std::vector<double> rhs(k + 1, 1.0);
    vario::gamma_batch(model_, d.data(), rhs.data(), k);
    std::vector<double> gstar(rhs.begin(), rhs.begin() + long(k));
    std::vector<double> sol = f.solve(rhs);
    p.mu = sol[k];
    sol.resize(k);
    p.weights = std::move(sol);
    p.station_idx = std::move(idx);
    double var = p.mu + kernels::active().dot(p.weights.data(), gstar.data(), k);
    if (var < -1e-9)
        throw Error::runtime("kriging variance below -1e-9: solver inconsistency");
    p.variance = std::max(var, 0.0);
    return p;
}

Estimate System::krige_point(std::span<const double> values, double x, double y,
                             bool want_weights) const {
    require(values.size() == pts_.size(), "krige_point: values size mismatch");
    for (double v : values)
        require(std::isfinite(v), "krige_point: non-finite observation value");

    Plan p = plan_target(x, y);
    Estimate e;
    e.variance = p.variance;
    double acc = 0.0;
    for (size_t i = 0; i < p.weights.size(); ++i)
        acc += p.weights[i] * values[p.station_idx[i]];
    e.value = acc;
    if (want_weights) {
        e.weights.assign(pts_.size(), 0.0);
        for (size_t i = 0; i < p.weights.size(); ++i)
            e.weights[p.station_idx[i]] = p.weights[i];
    }
    return e;
}

GridResult krige_grid(const System& sys,
                      const std::vector<std::vector<double>>& values_per_t,
                      const geo::GridSpec& grid, double central_meridian,
                      const geo::Polygon* study_area) {
    const size_t T = values_per_t.size();
    require(T >= 1, "krige_grid: need at least one timestep");
    for (const auto& v : values_per_t) {
        require(v.size() == sys.n_stations(), "krige_grid: values size mismatch");
        for (double x : v) require(std::isfinite(x), "krige_grid: non-finite value");
    }

    std::vector<unsigned char> inside;
    if (study_area) inside = geo::polygon_cell_mask(*study_area, grid);

    GridResult out;
    out.values.assign(T, geo::MaskedGrid(grid.n_rows, grid.n_cols));
    out.variances.assign(T, geo::MaskedGrid(grid.n_rows, grid.n_cols));

    for (size_t r = 0; r < grid.n_rows; ++r) {
        for (size_t c = 0; c < grid.n_cols; ++c) {
            if (study_area && inside[r * grid.n_cols + c] == 0) continue;
            auto [lon, lat] = grid.cell_center(r, c);
            auto [x, y] = geo::project(lon, lat, central_meridian);
            System::Plan plan;
            try {
                plan = sys.plan_target(x, y);
            } catch (const Error&) {
                continue; // unestimable cell stays masked
            }
            for (size_t t = 0; t < T; ++t) {
                double acc = 0.0;
                for (size_t i = 0; i < plan.weights.size(); ++i)
                    acc += plan.weights[i] * values_per_t[t][plan.station_idx[i]];
                out.values[t].set(r, c, acc);
                out.variances[t].set(r, c, plan.variance);
            }
        }
    }
    return out;
}

double idw_point(std::span<const geo::GeoPoint> pts, std::span<const double> values,
                 double x, double y, double power) {
    require(pts.size() == values.size(), "idw: size mismatch");
    require(!pts.empty(), "idw: no stations");
    double num = 0.0, den = 0.0;
    for (size_t i = 0; i < pts.size(); ++i) {
        const double dx = pts[i].x - x;
        const double dy = pts[i].y - y;
        const double d = std::sqrt(dx * dx + dy * dy);
        if (d < 1e-12) return values[i];
        const double w = 1.0 / std::pow(d, power);
        num += w * values[i];
        den += w;
    }
    return num / den;
}

} // namespace stkit::krige
