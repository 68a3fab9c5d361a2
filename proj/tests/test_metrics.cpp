#include <doctest.h>

#include "stkit/common.hpp"
#include "stkit/metrics.hpp"
#include "stkit/rng.hpp"

#include <cmath>
#include <vector>

using namespace stkit;
using geo::MaskedGrid;

namespace {

MaskedGrid grid_from(const std::vector<std::vector<double>>& rows) {
    MaskedGrid g(rows.size(), rows[0].size());
    for (size_t r = 0; r < rows.size(); ++r)
        for (size_t c = 0; c < rows[r].size(); ++c)
            if (std::isfinite(rows[r][c])) g.set(r, c, rows[r][c]);
    return g;
}

constexpr double kHole = std::numeric_limits<double>::quiet_NaN();

MaskedGrid random_grid(Rng& rng, size_t rows, size_t cols, double mask_prob) {
    MaskedGrid g(rows, cols);
    for (size_t r = 0; r < rows; ++r)
        for (size_t c = 0; c < cols; ++c)
            if (rng.uniform(0.0, 1.0) >= mask_prob) g.set(r, c, rng.uniform(-3.0, 3.0));
    return g;
}

} // namespace

TEST_CASE("r2 basics") {
    std::vector<double> obs = {1.0, 2.0, 3.0};
    CHECK(metrics::r2(obs, obs) == doctest::Approx(1.0));
    std::vector<double> at_mean(3, 2.0);
    CHECK(metrics::r2(at_mean, obs) == doctest::Approx(0.0));
    std::vector<double> rev = {3.0, 2.0, 1.0};
    CHECK(metrics::r2(rev, obs) == doctest::Approx(-3.0));
    CHECK_THROWS_AS((void)metrics::r2({1.0, 2.0}, {5.0, 5.0}), Error);
    CHECK_THROWS_AS((void)metrics::r2({1.0}, {1.0}), Error);
}

TEST_CASE("r2 never exceeds one and co-shift leaves it unchanged") {
    Rng rng(3);
    for (int rep = 0; rep < 50; ++rep) {
        const size_t n = 2 + rng.index(60);
        std::vector<double> obs(n), pred(n);
        for (size_t i = 0; i < n; ++i) {
            obs[i] = rng.uniform(-5.0, 5.0);
            pred[i] = rng.uniform(-5.0, 5.0);
        }
        double lo = *std::min_element(obs.begin(), obs.end());
        double hi = *std::max_element(obs.begin(), obs.end());
        if (hi - lo < 1e-9) continue;
        const double v = metrics::r2(pred, obs);
        CHECK(v <= 1.0 + 1e-12);
        auto obs2 = obs;
        auto pred2 = pred;
        const double shift = rng.uniform(-10.0, 10.0);
        for (auto& x : obs2) x += shift;
        for (auto& x : pred2) x += shift;
        CHECK(metrics::r2(pred2, obs2) == doctest::Approx(v).epsilon(1e-9));
    }
}

TEST_CASE("masked_mse hand examples") {
    auto a = grid_from({{1.0, 2.0}, {3.0, 4.0}});
    CHECK(metrics::masked_mse(a, a) == 0.0);

    auto p = grid_from({{2.0, 3.0}, {4.0, 5.0}});
    CHECK(metrics::masked_mse(p, a) == doctest::Approx(1.0));

    auto t2 = grid_from({{0.0, kHole}, {1.0, 1.0}});
    auto p2 = grid_from({{2.0, 7.0}, {1.0, 1.0}});
    CHECK(metrics::masked_mse(p2, t2) == doctest::Approx(4.0 / 3.0));
    CHECK(metrics::masked_mse(t2, p2) == doctest::Approx(4.0 / 3.0));

    auto empty_a = grid_from({{1.0, kHole}});
    auto empty_b = grid_from({{kHole, 1.0}});
    CHECK_THROWS_AS((void)metrics::masked_mse(empty_a, empty_b), Error);
}

TEST_CASE("masked_mse zero iff equal on joint mask") {
    auto t = grid_from({{1.0, 5.0}, {2.0, kHole}});
    auto p = grid_from({{1.0, kHole}, {2.0, 99.0}});
    CHECK(metrics::masked_mse(p, t) == 0.0);
}

TEST_CASE("lowpass behavior") {
    auto c = grid_from({{2.0, 2.0, 2.0}, {2.0, 2.0, 2.0}, {2.0, 2.0, 2.0}});
    auto lc = metrics::lowpass(c, 3);
    for (size_t r = 0; r < 3; ++r)
        for (size_t cc = 0; cc < 3; ++cc) CHECK(lc.at(r, cc) == doctest::Approx(2.0));

    auto single = grid_from({{kHole, kHole}, {kHole, 7.5}});
    auto ls = metrics::lowpass(single, 3);
    CHECK(ls.at(1, 1) == 7.5);
    CHECK(!ls.valid(0, 0));

    auto spike = grid_from({{0.0, 0.0, 0.0}, {0.0, 9.0, 0.0}, {0.0, 0.0, 0.0}});
    auto lsp = metrics::lowpass(spike, 3);
    CHECK(lsp.at(1, 1) == doctest::Approx(1.0));
    // corner window holds 4 cells, one of them the spike
    CHECK(lsp.at(0, 0) == doctest::Approx(9.0 / 4.0));

    CHECK_THROWS_AS((void)metrics::lowpass(c, 2), Error);
    CHECK_THROWS_AS((void)metrics::lowpass(c, 1), Error);
}

TEST_CASE("lowpass output stays within the local value range") {
    Rng rng(21);
    for (int rep = 0; rep < 10; ++rep) {
        auto g = random_grid(rng, 8, 9, 0.3);
        auto l = metrics::lowpass(g, 3);
        for (size_t r = 0; r < 8; ++r)
            for (size_t c = 0; c < 9; ++c) {
                CHECK(l.valid(r, c) == g.valid(r, c));
                if (!g.valid(r, c)) continue;
                double lo = 1e30, hi = -1e30;
                for (long rr = long(r) - 1; rr <= long(r) + 1; ++rr)
                    for (long cc = long(c) - 1; cc <= long(c) + 1; ++cc) {
                        if (rr < 0 || cc < 0 || rr >= 8 || cc >= 9) continue;
                        if (!g.valid(size_t(rr), size_t(cc))) continue;
                        lo = std::min(lo, g.at(size_t(rr), size_t(cc)));
                        hi = std::max(hi, g.at(size_t(rr), size_t(cc)));
                    }
                CHECK(l.at(r, c) >= lo - 1e-12);
                CHECK(l.at(r, c) <= hi + 1e-12);
            }
    }
}

TEST_CASE("composite loss hand example and reductions") {
    auto truth = grid_from({{1.0, 1.0}, {1.0, 1.0}});
    auto pred = grid_from({{3.0, 1.0}, {1.0, 1.0}});
    metrics::CompositeLossConfig cfg{1.0, 0.0, 1.0, 3};
    const double loss = metrics::composite_loss({pred}, {truth}, cfg);
    CHECK(loss == doctest::Approx(1.25).epsilon(1e-12));

    metrics::CompositeLossConfig zero_extra{1.0, 0.0, 0.0, 3};
    Rng rng(5);
    for (int rep = 0; rep < 100; ++rep) {
        auto t = random_grid(rng, 5, 6, 0.25);
        auto p = random_grid(rng, 5, 6, 0.25);
        bool any = false;
        for (size_t i = 0; i < t.cell_count(); ++i)
            any = any || (t.mask_raw()[i] && p.mask_raw()[i]);
        if (!any) continue;
        CHECK(metrics::composite_loss({p}, {t}, zero_extra) ==
              doctest::Approx(metrics::masked_mse(p, t)).epsilon(1e-12));
        metrics::CompositeLossConfig full{1.0, 0.5, 0.5, 3};
        CHECK(metrics::composite_loss({p}, {p}, full) == 0.0);
    }
}

TEST_CASE("composite loss is weight-linear") {
    Rng rng(17);
    auto t1 = random_grid(rng, 6, 6, 0.2);
    auto p1 = random_grid(rng, 6, 6, 0.2);
    auto t2 = random_grid(rng, 6, 6, 0.2);
    auto p2 = random_grid(rng, 6, 6, 0.2);
    metrics::CompositeLossConfig cfg{1.0, 0.5, 0.5, 3};
    metrics::CompositeLossConfig dbl{2.0, 1.0, 1.0, 3};
    const double a = metrics::composite_loss({p1, p2}, {t1, t2}, cfg);
    const double b = metrics::composite_loss({p1, p2}, {t1, t2}, dbl);
    CHECK(b == doctest::Approx(2.0 * a).epsilon(1e-12));
    CHECK(a >= 0.0);

    metrics::CompositeLossConfig none{0.0, 0.0, 0.0, 3};
    CHECK_THROWS_AS((void)metrics::composite_loss({p1}, {t1}, none), Error);
}

TEST_CASE("summarize groups folds and computes sample std") {
    std::vector<metrics::MetricsRow> rows = {
        {1, "base", "prediction", "test", 0.5, 1.0, 10},
        {2, "base", "prediction", "test", 0.7, 2.0, 10},
        {3, "base", "prediction", "test", 0.9, 3.0, 10},
        {1, "base", "prediction", "val", 0.4, 4.0, 10},
    };
    auto s = metrics::summarize(rows);
    REQUIRE(s.size() == 2);
    CHECK(s[0].split == "test");
    CHECK(s[0].n_folds == 3);
    CHECK(s[0].r2_mean == doctest::Approx(0.7));
    CHECK(s[0].r2_std == doctest::Approx(0.2));
    CHECK(s[0].mse_mean == doctest::Approx(2.0));
    CHECK(s[0].mse_std == doctest::Approx(1.0));
    CHECK(s[1].split == "val");
    CHECK(s[1].n_folds == 1);
    CHECK(s[1].r2_std == 0.0);
}
