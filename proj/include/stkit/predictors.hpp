#pragma once

#include "stkit/features.hpp"
#include "stkit/geo.hpp"
#include "stkit/gridstack.hpp"
#include "stkit/net.hpp"
#include "stkit/observations.hpp"
#include "stkit/points_io.hpp"
#include "stkit/rng.hpp"

#include <memory>
#include <string>
#include <vector>

namespace stkit::model {

// Tally of everything a predictor read while fitting. The training view
// throws on any access outside its window, so a clean fit plus these counters
// proves training inputs stayed inside [0, t_end) on the model wells.
struct AccessAudit {
    size_t value_reads = 0;
    size_t grid_reads = 0;
    long max_value_t = -1; // largest timestep of any observation read
    long max_grid_t = -1;  // largest timestep of any grid read

    void merge(const AccessAudit& other);
};

// Read-gated window over one fold's training data. Observation values and
// grid timesteps are reachable only for t < t_end; the well list is the model
// set, so holdout wells are not addressable at all.
class TrainView {
public:
    TrainView(const obs::PointObservationSet& model_obs, const gridio::GridStack* stack,
              const geo::GridSpec* grid, size_t t_end, AccessAudit* audit);

    size_t n_wells() const { return obs_->n_points(); }
    const geo::GeoPoint& site(size_t j) const { return obs_->points[j]; }
    size_t t_end() const { return t_end_; }
    int month_of(size_t t) const { return obs_->month_of(t); }
    bool is_valid(size_t j, size_t t) const;
    double value(size_t j, size_t t) const;

    bool has_grids() const { return stack_ != nullptr; }
    const gridio::GridStack& stack() const;
    const geo::GridSpec& grid() const;
    std::vector<double> grid_features(size_t j, size_t t,
                                      const features::FeatureSpec& spec) const;
    // per-channel value at the site's cell at t; 0 where missing or off-grid
    std::vector<double> site_channels(size_t j, size_t t) const;

private:
    const obs::PointObservationSet* obs_;
    const gridio::GridStack* stack_;
    const geo::GridSpec* grid_;
    size_t t_end_;
    AccessAudit* audit_;
};

// Prediction-time inputs: covariate grids over the full axis plus the model
// wells' observations. Holdout wells never appear here; their values exist
// only in the scoring path.
struct PredictContext {
    const obs::PointObservationSet* model_obs = nullptr;
    const gridio::GridStack* stack = nullptr;
    const geo::GridSpec* grid = nullptr;
    size_t n_times = 0;
};

// A fitted model produces point estimates either per training well (indexed
// like the TrainView it was fitted on) or at arbitrary sites. NaN means the
// prediction is undefined there (missing inputs); scoring skips such cells.
class Predictor {
public:
    virtual ~Predictor() = default;
    virtual std::string name() const = 0;
    // false: only predict_well works and interpolation goes through kriging
    // of the well predictions; true: predict_site works anywhere
    virtual bool site_capable() const = 0;
    virtual void fit(const TrainView& train, Rng& rng) = 0;
    virtual double predict_well(size_t well, size_t t, const PredictContext& ctx) const;
    virtual double predict_site(const geo::GeoPoint& site, size_t t,
                                const PredictContext& ctx) const;
    // fitted coefficients where the model has them; empty otherwise
    virtual std::vector<double> parameters() const { return {}; }
};

// per-well calendar-month mean of the training window
std::unique_ptr<Predictor> make_climatology();
// last observed value: obs[t-1], undefined when t = 0 or t-1 is a gap
std::unique_ptr<Predictor> make_persistence();

struct RidgeConfig {
    double alpha = 1.0;
    features::FeatureSpec feat;
};

// closed-form ridge regression on gridded patch features
std::unique_ptr<Predictor> make_ridge(const RidgeConfig& cfg);

struct RbfQuantileConfig {
    std::vector<size_t> levels = {3, 5, 7}; // centers per axis, coarse to fine
    double bandwidth_scale = 1.0;
    // append the site cell's channel values to the embedding; off by default,
    // keeping the model a function of scalar coordinates alone
    bool use_site_channels = false;
    net::NetConfig net;
    // tail of the training window held out for early stopping
    double eval_fraction = 0.15;
};

// quantile network on a multi-resolution RBF embedding of normalized
// (x, y, t); the median head is the point estimate
std::unique_ptr<Predictor> make_rbf_quantile(const RbfQuantileConfig& cfg);

// externally produced predictions scored through the same harness; rows are
// keyed (well_id, time_index)
std::unique_ptr<Predictor> make_external(std::string name,
                                         std::vector<ptio::PredictionRow> rows);

} // namespace stkit::model
