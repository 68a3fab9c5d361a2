#pragma once

#include "stkit/rng.hpp"

#include <cstddef>
#include <vector>

namespace stkit::net {

struct NetConfig {
    std::vector<size_t> hidden = {64, 64};
    std::vector<double> quantiles = {0.1, 0.5, 0.9}; // ascending, in (0, 1)
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    size_t batch = 32;
    size_t max_epochs = 200;
    size_t patience = 20; // epochs without eval improvement before stopping
};

// mean over levels of q*(y-p)+ + (1-q)*(p-y)+
double pinball_loss(const std::vector<double>& pred, double target,
                    const std::vector<double>& levels);

// Feed-forward tanh network with one linear output unit per quantile level,
// trained by minibatch Adam on the pinball loss. All randomness (init and
// shuffling) comes from the caller's Rng, so a fixed seed gives bit-identical
// parameters.
class QuantileNet {
public:
    QuantileNet(size_t n_inputs, NetConfig cfg, Rng& rng);

    size_t n_inputs() const { return sizes_.front(); }
    size_t n_quantiles() const { return cfg_.quantiles.size(); }
    const NetConfig& config() const { return cfg_; }

    // raw heads, one per configured level
    std::vector<double> forward(const std::vector<double>& x) const;
    // heads sorted ascending; raw heads may cross, reported quantiles do not
    std::vector<double> predict_quantiles(const std::vector<double>& x) const;
    // the sorted head at the 0.5 level's rank
    double predict_median(const std::vector<double>& x) const;

    // pinball loss of one sample; gradients accumulate into grad (same layout
    // as params())
    double loss_and_grad(const double* x, double target, std::vector<double>& grad) const;

    std::vector<double>& params() { return params_; }
    const std::vector<double>& params() const { return params_; }

    struct FitResult {
        size_t epochs_run = 0;
        size_t best_epoch = 0;
        double best_eval_loss = 0.0;
    };
    // Trains on rows train_idx of X, early-stops on rows eval_idx. X is
    // sample-major. Restores the best-eval parameters before returning.
    FitResult fit(const std::vector<std::vector<double>>& X, const std::vector<double>& y,
                  const std::vector<size_t>& train_idx, const std::vector<size_t>& eval_idx,
                  Rng& rng);

private:
    struct Layer {
        size_t w_off, b_off, in, out;
    };
    void forward_into(const double* x, std::vector<std::vector<double>>& acts) const;

    NetConfig cfg_;
    std::vector<size_t> sizes_;
    std::vector<Layer> layers_;
    std::vector<double> params_;
};

} // namespace stkit::net
