#pragma once

#include "stkit/geo.hpp"
#include "stkit/gridstack.hpp"
#include "stkit/observations.hpp"
#include "stkit/rng.hpp"
#include "stkit/variogram.hpp"

#include <vector>

namespace stkit::synth {

// T independent draws of a zero-mean Gaussian field at the given points.
// The smooth part has covariance partial_sill * corr(h) with corr matching
// the variogram family (practical-range convention); the nugget is iid noise
// added on top. Sampling goes through a Cholesky factor of the dense
// covariance, fully separate from the kriging solve path.
std::vector<std::vector<double>> sample_grf(const std::vector<geo::GeoPoint>& pts,
                                            const vario::Model& m, size_t T, Rng& rng);

struct FixtureConfig {
    double anchor_lon = 90.0;
    double anchor_lat = 23.2;
    double central_meridian = 93.0;
    double extent = 55000.0; // meters
    size_t n_blob = 35;      // clustered stations
    size_t n_uniform = 45;
    size_t n_holdout = 20;
    double blob_box = 8000.0;
    vario::Model model{vario::Family::exponential, 0.1, 1.0, 50000.0};
    size_t n_times = 60;
    // when > 0, a predictor stack over an n_cells x n_cells grid is sampled
    // jointly with the stations
    size_t n_cells = 0;
    double proxy_noise_sd = 0.3;
};

struct Fixture {
    std::vector<geo::GeoPoint> train;
    std::vector<geo::GeoPoint> holdout;
    std::vector<std::vector<double>> train_values;   // [t][station]
    std::vector<std::vector<double>> holdout_values; // [t][station]
    geo::GridSpec grid;        // set when n_cells > 0
    gridio::GridStack stack;   // channels: proxy, seasonal, white
};

// Station layout: n_blob stations clustered in small boxes anchored in the
// lower-left 75% of the domain, n_uniform spread uniformly, holdout uniform.
// The field (and the stack's proxy channel) is sampled jointly across every
// site so train, holdout and grid cells share one realization per timestep.
Fixture make_fixture(const FixtureConfig& cfg, uint64_t seed);

struct DemoConfig {
    size_t n_wells = 40;
    size_t n_times = 96;
    obs::MonthStamp start{2002, 4};
    double gap_fraction = 0.06;
    uint64_t seed = 20240901;
};

struct Demo {
    obs::PointObservationSet points; // depth-to-water, meters, with gaps
    gridio::GridStack stack;
    geo::GridSpec grid;
    geo::Polygon area;
    std::vector<double> specific_yield; // per well
};

// Self-contained toy dataset for the CLI walkthrough: seasonal + AR(1) field
// well series with gaps and one deliberate record break, five predictor
// channels, a study-area polygon with a notch, and storage coefficients.
Demo make_demo(const DemoConfig& cfg);

} // namespace stkit::synth
