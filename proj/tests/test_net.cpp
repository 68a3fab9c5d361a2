#include <doctest.h>

#include "stkit/common.hpp"
#include "stkit/kernels.hpp"
#include "stkit/net.hpp"

#include <cmath>

using namespace stkit;
using net::NetConfig;
using net::QuantileNet;

TEST_CASE("pinball loss hand values") {
    CHECK(net::pinball_loss({4.0}, 4.0, {0.5}) == 0.0);
    CHECK(net::pinball_loss({2.0}, 4.0, {0.5}) == doctest::Approx(1.0));
    CHECK(net::pinball_loss({5.0}, 4.0, {0.9}) == doctest::Approx(0.1));
    CHECK(net::pinball_loss({2.0, 5.0}, 4.0, {0.5, 0.9}) == doctest::Approx(0.55));
}

TEST_CASE("zero-weight net predicts its output bias") {
    Rng rng(1);
    NetConfig cfg;
    cfg.hidden = {4};
    QuantileNet n(3, cfg, rng);
    std::fill(n.params().begin(), n.params().end(), 0.0);
    // output biases live in the last nq slots of the parameter vector
    auto& p = n.params();
    p[p.size() - 3] = 1.5;
    p[p.size() - 2] = 2.5;
    p[p.size() - 1] = 3.5;
    auto out = n.forward({0.7, -0.3, 9.9});
    CHECK(out[0] == 1.5);
    CHECK(out[1] == 2.5);
    CHECK(out[2] == 3.5);
}

TEST_CASE("analytic gradients match central finite differences") {
    double worst = 0.0;
    size_t checked = 0;
    for (int rep = 0; rep < 25; ++rep) {
        Rng rng(600 + rep);
        NetConfig cfg;
        cfg.hidden = {4};
        QuantileNet n(2, cfg, rng);
        std::vector<double> x = {rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
        const double y = rng.uniform(-1.5, 1.5);
        // keep clear of the pinball kinks, where the loss is not differentiable
        auto out = n.forward(x);
        bool near_kink = false;
        for (double o : out) near_kink = near_kink || std::fabs(y - o) < 1e-3;
        if (near_kink) continue;

        std::vector<double> grad(n.params().size(), 0.0);
        (void)n.loss_and_grad(x.data(), y, grad);

        const double eps = 1e-5;
        for (size_t i = 0; i < n.params().size(); ++i) {
            const double save = n.params()[i];
            n.params()[i] = save + eps;
            const double lp = net::pinball_loss(n.forward(x), y, cfg.quantiles);
            n.params()[i] = save - eps;
            const double lm = net::pinball_loss(n.forward(x), y, cfg.quantiles);
            n.params()[i] = save;
            const double fd = (lp - lm) / (2 * eps);
            const double rel = std::fabs(fd - grad[i]) /
                               std::max({std::fabs(fd), std::fabs(grad[i]), 1e-6});
            worst = std::max(worst, rel);
            ++checked;
        }
    }
    CHECK(checked > 20 * 17);
    CHECK(worst < 1e-4);
}

TEST_CASE("adam step with zero gradient leaves parameters unchanged") {
    std::vector<double> w = {1.0, -2.0, 3.0};
    auto w0 = w;
    std::vector<double> m(3, 0.0), v(3, 0.0), g(3, 0.0);
    kernels::active().adam_update(w.data(), m.data(), v.data(), g.data(), 3, 0.01, 0.9, 0.999,
                                  1e-8, 1.0 - 0.9, 1.0 - 0.999);
    CHECK(w == w0);
}

TEST_CASE("reported quantiles are sorted even when raw heads cross") {
    Rng rng(77);
    NetConfig cfg;
    cfg.hidden = {4};
    QuantileNet n(2, cfg, rng);
    auto& p = n.params();
    std::fill(p.begin(), p.end(), 0.0);
    p[p.size() - 3] = 9.0; // q=0.1 head above the others
    p[p.size() - 2] = 1.0;
    p[p.size() - 1] = 5.0;
    auto q = n.predict_quantiles({0.0, 0.0});
    CHECK(q[0] == 1.0);
    CHECK(q[1] == 5.0);
    CHECK(q[2] == 9.0);
    CHECK(n.predict_median({0.0, 0.0}) == 5.0);
}

TEST_CASE("training is deterministic and learns a simple line") {
    auto run = [&]() {
        Rng data_rng(42);
        std::vector<std::vector<double>> X;
        std::vector<double> y;
        for (int i = 0; i < 300; ++i) {
            const double x = data_rng.uniform(0.0, 1.0);
            X.push_back({x});
            y.push_back(2.0 * x + 1.0 + 0.05 * data_rng.normal());
        }
        std::vector<size_t> train_idx, eval_idx;
        for (size_t i = 0; i < 240; ++i) train_idx.push_back(i);
        for (size_t i = 240; i < 300; ++i) eval_idx.push_back(i);

        Rng rng(7);
        NetConfig cfg;
        cfg.hidden = {8};
        cfg.lr = 0.02;
        cfg.max_epochs = 150;
        cfg.patience = 30;
        QuantileNet n(1, cfg, rng);
        auto res = n.fit(X, y, train_idx, eval_idx, rng);
        return std::pair{n, res};
    };

    auto [n1, r1] = run();
    auto [n2, r2] = run();
    CHECK(n1.params() == n2.params());
    CHECK(r1.best_epoch == r2.best_epoch);

    double err = 0.0;
    for (double x : {0.1, 0.3, 0.5, 0.7, 0.9})
        err = std::max(err, std::fabs(n1.predict_median({x}) - (2.0 * x + 1.0)));
    CHECK(err < 0.25);

    // quantile heads should straddle the median prediction
    auto q = n1.predict_quantiles({0.5});
    CHECK(q[0] <= q[1]);
    CHECK(q[1] <= q[2]);

    // restored parameters reproduce the reported best eval loss
    double el = 0.0;
    Rng data_rng(42);
    std::vector<std::vector<double>> X;
    std::vector<double> y;
    for (int i = 0; i < 300; ++i) {
        const double x = data_rng.uniform(0.0, 1.0);
        X.push_back({x});
        y.push_back(2.0 * x + 1.0 + 0.05 * data_rng.normal());
    }
    for (size_t i = 240; i < 300; ++i)
        el += net::pinball_loss(n1.forward(X[i]), y[i], n1.config().quantiles);
    el /= 60.0;
    CHECK(el == doctest::Approx(r1.best_eval_loss).epsilon(1e-12));
}

TEST_CASE("config validation") {
    Rng rng(1);
    NetConfig bad;
    bad.quantiles = {0.5, 0.1};
    CHECK_THROWS_AS((void)QuantileNet(2, bad, rng), Error);
    NetConfig bad2;
    bad2.quantiles = {0.0, 0.5};
    CHECK_THROWS_AS((void)QuantileNet(2, bad2, rng), Error);
}
