#include "stkit/features.hpp"

#include "stkit/common.hpp"

#include <cmath>

namespace stkit::features {

size_t value_block_length(const gridio::GridStack& g, const FeatureSpec& spec) {
    const size_t side = 2 * spec.patch_radius + 1;
    return size_t(g.n_c) * spec.lags * side * side;
}

size_t feature_length(const gridio::GridStack& g, const FeatureSpec& spec) {
    const size_t side = 2 * spec.patch_radius + 1;
    return value_block_length(g, spec) + spec.lags * side * side +
           (spec.site_scalars ? 3 : 0);
}

std::vector<double> extract_features(const gridio::GridStack& g, const geo::GridSpec& grid,
                                     const geo::GeoPoint& site, size_t t,
                                     const FeatureSpec& spec) {
    require(spec.lags >= 1, "extract_features: lags must be >= 1");
    if (t + 1 < spec.lags)
        throw Error::validation("extract_features: timestep " + std::to_string(t) +
                                " has fewer than " + std::to_string(spec.lags) +
                                " steps of history");
    require(t < g.n_t, "extract_features: timestep beyond stack");
    require(grid.n_rows == g.n_h && grid.n_cols == g.n_w,
            "extract_features: grid spec does not match stack dims");

    const long p = long(spec.patch_radius);
    const long anchor_row = long(std::floor((site.lat - grid.lat_min) / grid.cell_size));
    const long anchor_col = long(std::floor((site.lon - grid.lon_min) / grid.cell_size));
    const size_t side = size_t(2 * p + 1);
    const size_t cells = spec.lags * side * side;

    std::vector<unsigned char> validity(cells, 0);
    {
        size_t i = 0;
        for (size_t lag = 0; lag < spec.lags; ++lag)
            for (long dr = -p; dr <= p; ++dr)
                for (long dc = -p; dc <= p; ++dc, ++i) {
                    const long rr = anchor_row + dr;
                    const long cc = anchor_col + dc;
                    if (rr < 0 || cc < 0 || rr >= long(g.n_h) || cc >= long(g.n_w)) continue;
                    bool all_finite = true;
                    for (size_t c = 0; c < g.n_c && all_finite; ++c)
                        all_finite = std::isfinite(g.at(t - lag, c, size_t(rr), size_t(cc)));
                    validity[i] = all_finite ? 1 : 0;
                }
    }

    std::vector<double> fv;
    fv.reserve(feature_length(g, spec));
    for (size_t c = 0; c < g.n_c; ++c) {
        size_t i = 0;
        for (size_t lag = 0; lag < spec.lags; ++lag)
            for (long dr = -p; dr <= p; ++dr)
                for (long dc = -p; dc <= p; ++dc, ++i) {
                    if (!validity[i]) {
                        fv.push_back(0.0);
                        continue;
                    }
                    const long rr = anchor_row + dr;
                    const long cc = anchor_col + dc;
                    fv.push_back(double(g.at(t - lag, c, size_t(rr), size_t(cc))));
                }
    }
    for (unsigned char v : validity) fv.push_back(double(v));
    if (spec.site_scalars) {
        fv.push_back(site.x);
        fv.push_back(site.y);
        double elev = 0.0;
        if (spec.elevation_channel >= 0 && anchor_row >= 0 && anchor_col >= 0 &&
            anchor_row < long(g.n_h) && anchor_col < long(g.n_w)) {
            const float e = g.at(t, size_t(spec.elevation_channel), size_t(anchor_row),
                                 size_t(anchor_col));
            if (std::isfinite(e)) elev = double(e);
        }
        fv.push_back(elev);
    }
    return fv;
}

PatchTensor unflatten(const std::vector<double>& fv, const gridio::GridStack& g,
                      const FeatureSpec& spec) {
    require(fv.size() == feature_length(g, spec), "unflatten: length mismatch");
    const size_t side = 2 * spec.patch_radius + 1;
    const size_t cells = spec.lags * side * side;
    PatchTensor t;
    t.values.assign(fv.begin(), fv.begin() + long(g.n_c * cells));
    t.validity.resize(cells);
    for (size_t i = 0; i < cells; ++i)
        t.validity[i] = fv[g.n_c * cells + i] != 0.0 ? 1 : 0;
    if (spec.site_scalars)
        t.site.assign(fv.end() - 3, fv.end());
    return t;
}

} // namespace stkit::features
