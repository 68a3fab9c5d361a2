#pragma once

#include "stkit/geo.hpp"
#include "stkit/gridstack.hpp"

#include <cstddef>
#include <vector>

namespace stkit::features {

struct FeatureSpec {
    size_t patch_radius = 1; // p: patch is (2p+1) x (2p+1) cells
    size_t lags = 5;         // L: timesteps t, t-1, ..., t-L+1
    bool site_scalars = true; // append projected x, y and site-cell elevation
    int elevation_channel = -1; // source for the site elevation scalar, -1 = none
};

// Layout of the flattened vector, in order:
//   values   [C][L][2p+1][2p+1]   channel-major, then lag (0 = t, 1 = t-1, ...),
//                                 then patch row in storage order (south to
//                                 north), then patch col (west to east)
//   validity [L][2p+1][2p+1]      1 when the cell is inside the grid and every
//                                 channel is finite there; values are
//                                 zero-filled where the flag is 0
//   site     x, y, elevation      only when site_scalars is set
size_t feature_length(const gridio::GridStack& g, const FeatureSpec& spec);
size_t value_block_length(const gridio::GridStack& g, const FeatureSpec& spec);

// Extract the feature vector for a site at timestep t. The site's cell comes
// from grid.cell_of(lon, lat); a site outside the grid still yields features
// (every patch cell out of grid, validity all zero), keeping holdout sites
// near the border usable. t < L-1 is an error: not enough history.
std::vector<double> extract_features(const gridio::GridStack& g, const geo::GridSpec& grid,
                                     const geo::GeoPoint& site, size_t t,
                                     const FeatureSpec& spec);

struct PatchTensor {
    std::vector<double> values;         // [C][L][2p+1][2p+1]
    std::vector<unsigned char> validity; // [L][2p+1][2p+1]
    std::vector<double> site;           // empty or {x, y, elevation}
};

// exact inverse of the flattening
PatchTensor unflatten(const std::vector<double>& fv, const gridio::GridStack& g,
                      const FeatureSpec& spec);

} // namespace stkit::features
