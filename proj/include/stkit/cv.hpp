#pragma once

#include "stkit/geo.hpp"
#include "stkit/gridstack.hpp"
#include "stkit/kriging.hpp"
#include "stkit/metrics.hpp"
#include "stkit/observations.hpp"
#include "stkit/predictors.hpp"
#include "stkit/variogram.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace stkit::cv {

// random spatial holdout: wells in holdout_idx are scored for interpolation
// only and never enter any training input
struct SplitSpec {
    std::vector<size_t> model_idx;   // ascending
    std::vector<size_t> holdout_idx; // ascending
};

// holdout count = round-half-up(fraction * n); uniform without replacement
SplitSpec spatial_split(size_t n_wells, double fraction, uint64_t seed);

// expanding-window fold: train [0, train_end), val and test of eval_len each
struct FoldSpec {
    size_t index = 0; // 1-based
    size_t train_end = 0;
    size_t val_begin = 0, val_end = 0;
    size_t test_begin = 0, test_end = 0;
};

// train_end of fold k is T - 2*eval_len - (n_folds - k)*eval_len, so folds
// stride by eval_len and the last test window ends at T
std::vector<FoldSpec> temporal_folds(size_t T, size_t n_folds, size_t eval_len);

struct PredictorSetup {
    std::string kind;  // climatology | persistence | ridge | rbf_quantile | external
    std::string label; // report name; defaults to kind
    model::RidgeConfig ridge;
    model::RbfQuantileConfig rbf;
    std::string external_path; // predictions csv for kind = external
};

struct ExperimentConfig {
    double holdout_fraction = 0.08;
    size_t n_folds = 10;
    size_t eval_len = 8;
    uint64_t seed = 1;
    std::vector<PredictorSetup> predictors;
    // variogram fit for interpolating well-indexed predictions
    vario::Family family = vario::Family::exponential;
    size_t variogram_bins = 15;
    // retain each predictor's last-fold series for report plots
    bool keep_last_fold_predictions = false;
};

struct FoldFailure {
    size_t fold = 0;
    std::string predictor;
    std::string message;
};

struct ExperimentResult {
    SplitSpec split;
    std::vector<FoldSpec> folds;
    metrics::MetricsReport report;
    std::vector<FoldFailure> failures;
    model::AccessAudit audit;                 // totals across folds
    std::vector<model::AccessAudit> fold_audits; // one per fold
    // label -> [well][t] over every well in all_obs order, last fold only,
    // NaN where undefined; filled when keep_last_fold_predictions is set
    std::map<std::string, std::vector<std::vector<double>>> last_fold_predictions;
};

// Runs every predictor through every fold. Per fold: fit on model wells over
// [0, train_end), score the prediction role on model wells and the
// interpolation role on holdout wells, each over the train/val/test ranges.
// Well-indexed predictors reach holdout sites through ordinary kriging of
// their model-well predictions under a variogram fitted on the training
// window. A failing (fold, predictor) pair is recorded and the run continues.
ExperimentResult run_experiment(const obs::PointObservationSet& all_obs,
                                const gridio::GridStack* stack, const geo::GridSpec* grid,
                                const ExperimentConfig& cfg);

// Scores an externally produced grid series against the wells under the same
// split geometry as run_experiment: the product is sampled at each well's
// cell, both series are anomaly-normalized to the baseline index range
// [baseline_begin, baseline_end), and fold rows are emitted for the
// prediction role (model wells) and interpolation role (holdout wells).
// Wells outside the grid or without baseline coverage drop out.
metrics::MetricsReport evaluate_external(const gridio::GridStack& product, size_t channel,
                                         const obs::PointObservationSet& all_obs,
                                         const geo::GridSpec& grid, size_t baseline_begin,
                                         size_t baseline_end, const ExperimentConfig& cfg,
                                         const std::string& label);

} // namespace stkit::cv
