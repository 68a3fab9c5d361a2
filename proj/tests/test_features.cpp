#include <doctest.h>

#include "stkit/common.hpp"
#include "stkit/features.hpp"
#include "stkit/rng.hpp"

#include <cmath>

using namespace stkit;
using features::FeatureSpec;

namespace {

gridio::GridStack filled_stack(Rng& rng, uint32_t T, uint32_t C, uint32_t H, uint32_t W) {
    std::vector<std::string> names;
    for (uint32_t c = 0; c < C; ++c) names.push_back("ch" + std::to_string(c));
    auto s = gridio::GridStack::create(T, C, H, W, names);
    for (auto& v : s.data) v = float(rng.uniform(-5.0, 5.0));
    return s;
}

geo::GridSpec spec_for(uint32_t H, uint32_t W) {
    return geo::GridSpec{.lon_min = 90.0, .lat_min = 23.0, .cell_size = 0.25, .n_cols = W, .n_rows = H};
}

geo::GeoPoint site_at_cell(const geo::GridSpec& g, size_t row, size_t col) {
    auto [lon, lat] = g.cell_center(row, col);
    geo::GeoPoint p;
    p.id = "s";
    p.lon = lon;
    p.lat = lat;
    p.x = 1000.0 * double(col);
    p.y = 1000.0 * double(row);
    return p;
}

} // namespace

TEST_CASE("point feature with no patch and no lags is the channel values") {
    Rng rng(2);
    auto stack = filled_stack(rng, 3, 5, 4, 4);
    auto grid = spec_for(4, 4);
    auto site = site_at_cell(grid, 2, 1);
    FeatureSpec fs{.patch_radius = 0, .lags = 1, .site_scalars = false};
    auto fv = features::extract_features(stack, grid, site, 2, fs);
    REQUIRE(fv.size() == 5 + 1);
    for (size_t c = 0; c < 5; ++c) CHECK(fv[c] == double(stack.at(2, c, 2, 1)));
    CHECK(fv[5] == 1.0);
}

TEST_CASE("corner patch zero-fills out-of-grid cells with validity 0") {
    Rng rng(7);
    auto stack = filled_stack(rng, 2, 2, 4, 4);
    auto grid = spec_for(4, 4);
    auto site = site_at_cell(grid, 0, 0);
    FeatureSpec fs{.patch_radius = 1, .lags = 1, .site_scalars = false};
    auto fv = features::extract_features(stack, grid, site, 0, fs);
    // patch rows dr=-1..1, cols dc=-1..1: 5 of 9 cells are off-grid
    REQUIRE(fv.size() == 2 * 9 + 9);
    const double* validity = fv.data() + 18;
    const unsigned char expect[9] = {0, 0, 0, 0, 1, 1, 0, 1, 1};
    size_t i = 0;
    for (long dr = -1; dr <= 1; ++dr)
        for (long dc = -1; dc <= 1; ++dc, ++i) {
            CHECK(validity[i] == double(expect[i]));
            for (size_t c = 0; c < 2; ++c) {
                const double v = fv[c * 9 + i];
                if (!expect[i])
                    CHECK(v == 0.0);
                else
                    CHECK(v == double(stack.at(0, c, size_t(dr), size_t(dc))));
            }
        }
}

TEST_CASE("full spatiotemporal feature length and lag order") {
    Rng rng(11);
    auto stack = filled_stack(rng, 8, 5, 6, 6);
    auto grid = spec_for(6, 6);
    auto site = site_at_cell(grid, 3, 3);
    FeatureSpec fs{.patch_radius = 1, .lags = 5, .site_scalars = true, .elevation_channel = 2};
    CHECK(features::value_block_length(stack, fs) == 225);
    CHECK(features::feature_length(stack, fs) == 225 + 45 + 3);
    auto fv = features::extract_features(stack, grid, site, 6, fs);
    REQUIRE(fv.size() == 273);
    // channel 0, lag 2, patch center
    const size_t idx = 0 * 45 + 2 * 9 + 1 * 3 + 1;
    CHECK(fv[idx] == double(stack.at(4, 0, 3, 3)));
    // channel 3, lag 0, patch NE corner (dr=+1, dc=+1)
    const size_t idx2 = 3 * 45 + 0 * 9 + 2 * 3 + 2;
    CHECK(fv[idx2] == double(stack.at(6, 3, 4, 4)));
    // site scalars at the tail
    CHECK(fv[270] == site.x);
    CHECK(fv[271] == site.y);
    CHECK(fv[272] == double(stack.at(6, 2, 3, 3)));

    CHECK_THROWS_AS((void)features::extract_features(stack, grid, site, 3, fs), Error);
}

TEST_CASE("missing grid cells are flagged invalid") {
    Rng rng(4);
    auto stack = filled_stack(rng, 2, 3, 5, 5);
    stack.set(1, 1, 2, 2, std::numeric_limits<float>::quiet_NaN());
    auto grid = spec_for(5, 5);
    auto site = site_at_cell(grid, 2, 2);
    FeatureSpec fs{.patch_radius = 0, .lags = 1, .site_scalars = false};
    auto fv = features::extract_features(stack, grid, site, 1, fs);
    REQUIRE(fv.size() == 4);
    // one NaN channel invalidates the cell for all channels
    CHECK(fv[3] == 0.0);
    CHECK(fv[0] == 0.0);
    CHECK(fv[1] == 0.0);
    CHECK(fv[2] == 0.0);
}

TEST_CASE("unflatten inverts the flattening") {
    Rng rng(9);
    auto stack = filled_stack(rng, 6, 4, 7, 7);
    auto grid = spec_for(7, 7);
    auto site = site_at_cell(grid, 1, 5);
    FeatureSpec fs{.patch_radius = 2, .lags = 3, .site_scalars = true, .elevation_channel = 0};
    auto fv = features::extract_features(stack, grid, site, 4, fs);
    auto pt = features::unflatten(fv, stack, fs);
    REQUIRE(pt.values.size() == 4 * 3 * 25);
    REQUIRE(pt.validity.size() == 3 * 25);
    REQUIRE(pt.site.size() == 3);
    // rebuild the flat vector from the tensor and compare
    std::vector<double> re(pt.values);
    for (auto v : pt.validity) re.push_back(double(v));
    for (auto v : pt.site) re.push_back(v);
    CHECK(re == fv);
}

TEST_CASE("site outside the grid yields all-invalid features") {
    Rng rng(14);
    auto stack = filled_stack(rng, 2, 2, 4, 4);
    auto grid = spec_for(4, 4);
    geo::GeoPoint far{"far", 150.0, -40.0, 0.0, 0.0};
    FeatureSpec fs{.patch_radius = 1, .lags = 1, .site_scalars = false};
    auto fv = features::extract_features(stack, grid, far, 1, fs);
    for (double v : fv) CHECK(v == 0.0);
}
