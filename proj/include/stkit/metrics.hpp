#pragma once

#include "stkit/geo.hpp"

#include <cstddef>
#include <string>
#include <vector>

namespace stkit::metrics {

// pooled coefficient of determination: 1 - SS_res / SS_tot
// throws when fewer than two points or the observations have zero variance
double r2(const std::vector<double>& pred, const std::vector<double>& obs);

double mse(const std::vector<double>& pred, const std::vector<double>& obs);

// mean squared difference over cells valid in BOTH grids; empty joint mask throws
double masked_mse(const geo::MaskedGrid& pred, const geo::MaskedGrid& truth);

// normalized average pooling: each valid cell becomes the mean of the valid
// cells in its pool_size x pool_size window, clipped at the edges. Masked
// cells stay masked.
geo::MaskedGrid lowpass(const geo::MaskedGrid& grid, size_t pool_size);

struct CompositeLossConfig {
    double w_main = 1.0;
    double w_trend = 0.5;
    double w_mean = 0.5;
    size_t pool_size = 3;
};

// w_main * masked_mse
//   + w_trend * masked_mse of low-passed grids
//   + w_mean  * mean over timesteps of squared spatial-mean difference
// Spatial means are taken over the joint mask so both fields are averaged
// over the same support.
double composite_loss(const std::vector<geo::MaskedGrid>& pred,
                      const std::vector<geo::MaskedGrid>& truth,
                      const CompositeLossConfig& cfg);

struct MetricsRow {
    int fold = 0;
    std::string predictor;
    std::string role;  // "prediction" or "interpolation"
    std::string split; // "train", "val", "test"
    double r2 = 0.0;
    double mse = 0.0;
    size_t n = 0;
};

struct MetricsSummaryRow {
    std::string predictor;
    std::string role;
    std::string split;
    double r2_mean = 0.0;
    double r2_std = 0.0;
    double mse_mean = 0.0;
    double mse_std = 0.0;
    size_t n_folds = 0;
};

struct MetricsReport {
    std::vector<MetricsRow> rows;
    std::vector<MetricsSummaryRow> summary;
};

// cross-fold mean and sample standard deviation per (predictor, role, split),
// in first-appearance order
std::vector<MetricsSummaryRow> summarize(const std::vector<MetricsRow>& rows);

} // namespace stkit::metrics
