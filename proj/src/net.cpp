#include "stkit/net.hpp"

#include "stkit/common.hpp"
#include "stkit/kernels.hpp"

#include <algorithm>
#include <cmath>

namespace stkit::net {

double pinball_loss(const std::vector<double>& pred, double target,
                    const std::vector<double>& levels) {
    require(pred.size() == levels.size(), "pinball_loss: size mismatch");
    double acc = 0.0;
    for (size_t j = 0; j < levels.size(); ++j) {
        const double q = levels[j];
        const double d = target - pred[j];
        acc += d > 0 ? q * d : (q - 1.0) * d;
    }
    return acc / double(levels.size());
}

QuantileNet::QuantileNet(size_t n_inputs, NetConfig cfg, Rng& rng) : cfg_(std::move(cfg)) {
    require(n_inputs >= 1, "net: need at least one input");
    require(!cfg_.quantiles.empty(), "net: need at least one quantile level");
    for (size_t j = 0; j < cfg_.quantiles.size(); ++j) {
        const double q = cfg_.quantiles[j];
        require(q > 0.0 && q < 1.0, "net: quantile levels must lie in (0, 1)");
        if (j > 0) require(q > cfg_.quantiles[j - 1], "net: quantile levels must be ascending");
    }
    sizes_.push_back(n_inputs);
    for (size_t h : cfg_.hidden) {
        require(h >= 1, "net: hidden width must be >= 1");
        sizes_.push_back(h);
    }
    sizes_.push_back(cfg_.quantiles.size());

    size_t off = 0;
    for (size_t l = 0; l + 1 < sizes_.size(); ++l) {
        Layer lay{off, off + sizes_[l] * sizes_[l + 1], sizes_[l], sizes_[l + 1]};
        off = lay.b_off + lay.out;
        layers_.push_back(lay);
    }
    params_.assign(off, 0.0);
    for (const auto& lay : layers_) {
        // Glorot-style scale
        const double s = std::sqrt(6.0 / double(lay.in + lay.out));
        for (size_t i = 0; i < lay.in * lay.out; ++i)
            params_[lay.w_off + i] = rng.uniform(-s, s);
    }
}

void QuantileNet::forward_into(const double* x, std::vector<std::vector<double>>& acts) const {
    acts.resize(layers_.size() + 1);
    acts[0].assign(x, x + sizes_[0]);
    for (size_t l = 0; l < layers_.size(); ++l) {
        const auto& lay = layers_[l];
        acts[l + 1].resize(lay.out);
        kernels::active().matvec(params_.data() + lay.w_off, acts[l].data(), acts[l + 1].data(),
                                 lay.out, lay.in);
        for (size_t i = 0; i < lay.out; ++i) acts[l + 1][i] += params_[lay.b_off + i];
        if (l + 1 < layers_.size())
            for (auto& v : acts[l + 1]) v = std::tanh(v);
    }
}

std::vector<double> QuantileNet::forward(const std::vector<double>& x) const {
    require(x.size() == sizes_[0], "net: input size mismatch");
    std::vector<std::vector<double>> acts;
    forward_into(x.data(), acts);
    return acts.back();
}

std::vector<double> QuantileNet::predict_quantiles(const std::vector<double>& x) const {
    auto out = forward(x);
    std::sort(out.begin(), out.end());
    return out;
}

double QuantileNet::predict_median(const std::vector<double>& x) const {
    const auto q = predict_quantiles(x);
    size_t rank = 0;
    double best = 1.0;
    for (size_t j = 0; j < cfg_.quantiles.size(); ++j) {
        const double d = std::fabs(cfg_.quantiles[j] - 0.5);
        if (d < best) {
            best = d;
            rank = j;
        }
    }
    return q[rank];
}

double QuantileNet::loss_and_grad(const double* x, double target,
                                  std::vector<double>& grad) const {
    require(grad.size() == params_.size(), "net: gradient buffer size mismatch");
    std::vector<std::vector<double>> acts;
    forward_into(x, acts);
    const auto& out = acts.back();

    const size_t nq = cfg_.quantiles.size();
    std::vector<double> delta(nq);
    double loss = 0.0;
    for (size_t j = 0; j < nq; ++j) {
        const double q = cfg_.quantiles[j];
        const double d = target - out[j];
        loss += d > 0 ? q * d : (q - 1.0) * d;
        // d loss / d out
        delta[j] = (d > 0 ? -q : (d < 0 ? 1.0 - q : 0.0)) / double(nq);
    }
    loss /= double(nq);

    for (size_t l = layers_.size(); l-- > 0;) {
        const auto& lay = layers_[l];
        const auto& a_in = acts[l];
        for (size_t i = 0; i < lay.out; ++i) {
            kernels::active().axpy(delta[i], a_in.data(), grad.data() + lay.w_off + i * lay.in,
                                   lay.in);
            grad[lay.b_off + i] += delta[i];
        }
        if (l == 0) break;
        std::vector<double> prev(lay.in, 0.0);
        kernels::active().matvec_t_acc(params_.data() + lay.w_off, delta.data(), prev.data(),
                                       lay.out, lay.in);
        for (size_t i = 0; i < lay.in; ++i) prev[i] *= 1.0 - a_in[i] * a_in[i];
        delta = std::move(prev);
    }
    return loss;
}

QuantileNet::FitResult QuantileNet::fit(const std::vector<std::vector<double>>& X,
                                        const std::vector<double>& y,
                                        const std::vector<size_t>& train_idx,
                                        const std::vector<size_t>& eval_idx, Rng& rng) {
    require(X.size() == y.size(), "net: X and y length mismatch");
    require(!train_idx.empty(), "net: empty training set");
    require(!eval_idx.empty(), "net: empty early-stopping set");

    auto eval_loss = [&]() {
        double acc = 0.0;
        for (size_t i : eval_idx) acc += pinball_loss(forward(X[i]), y[i], cfg_.quantiles);
        return acc / double(eval_idx.size());
    };

    std::vector<size_t> order = train_idx;
    std::vector<double> grad(params_.size(), 0.0);
    std::vector<double> m(params_.size(), 0.0), v(params_.size(), 0.0);
    size_t adam_t = 0;

    FitResult res;
    res.best_eval_loss = eval_loss();
    std::vector<double> best_params = params_;

    size_t since_best = 0;
    for (size_t epoch = 1; epoch <= cfg_.max_epochs; ++epoch) {
        // Fisher-Yates
        for (size_t i = order.size(); i > 1; --i)
            std::swap(order[i - 1], order[rng.index(i)]);

        for (size_t start = 0; start < order.size(); start += cfg_.batch) {
            const size_t end = std::min(order.size(), start + cfg_.batch);
            std::fill(grad.begin(), grad.end(), 0.0);
            double batch_loss = 0.0;
            for (size_t k = start; k < end; ++k)
                batch_loss += loss_and_grad(X[order[k]].data(), y[order[k]], grad);
            if (!std::isfinite(batch_loss))
                throw Error::runtime("net: non-finite training loss at epoch " +
                                     std::to_string(epoch));
            const double inv = 1.0 / double(end - start);
            for (auto& g : grad) g *= inv;
            ++adam_t;
            const double bc1 = 1.0 - std::pow(cfg_.beta1, double(adam_t));
            const double bc2 = 1.0 - std::pow(cfg_.beta2, double(adam_t));
            kernels::active().adam_update(params_.data(), m.data(), v.data(), grad.data(),
                                          params_.size(), cfg_.lr, cfg_.beta1, cfg_.beta2,
                                          cfg_.eps, bc1, bc2);
        }

        res.epochs_run = epoch;
        const double el = eval_loss();
        if (!std::isfinite(el))
            throw Error::runtime("net: non-finite evaluation loss at epoch " +
                                 std::to_string(epoch));
        if (el < res.best_eval_loss - 1e-12) {
            res.best_eval_loss = el;
            res.best_epoch = epoch;
            best_params = params_;
            since_best = 0;
        } else if (++since_best >= cfg_.patience) {
            break;
        }
    }
    params_ = std::move(best_params);
    return res;
}

} // namespace stkit::net
