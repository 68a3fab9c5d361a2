#include "stkit/metrics.hpp"

#include "stkit/common.hpp"
#include "stkit/kernels.hpp"

#include <cmath>

namespace stkit::metrics {

double r2(const std::vector<double>& pred, const std::vector<double>& obs) {
    require(pred.size() == obs.size(), "r2: length mismatch");
    const size_t n = obs.size();
    require(n >= 2, "r2: need at least two observations");
    const double mean = kernels::active().sum(obs.data(), n) / double(n);
    double ss_res = kernels::active().sum_sq_diff(pred.data(), obs.data(), n);
    double ss_tot = 0.0;
    for (size_t i = 0; i < n; ++i) {
        const double d = obs[i] - mean;
        ss_tot += d * d;
    }
    if (ss_tot <= 0.0) throw Error::validation("r2: observations have zero variance");
    return 1.0 - ss_res / ss_tot;
}

double mse(const std::vector<double>& pred, const std::vector<double>& obs) {
    require(pred.size() == obs.size(), "mse: length mismatch");
    require(!obs.empty(), "mse: empty input");
    return kernels::active().sum_sq_diff(pred.data(), obs.data(), obs.size()) / double(obs.size());
}

namespace {

std::vector<unsigned char> joint_mask(const geo::MaskedGrid& a, const geo::MaskedGrid& b) {
    require(a.rows() == b.rows() && a.cols() == b.cols(), "masked grids differ in shape");
    const size_t n = a.cell_count();
    std::vector<unsigned char> m(n);
    for (size_t i = 0; i < n; ++i) m[i] = a.mask_raw()[i] & b.mask_raw()[i];
    return m;
}

} // namespace

double masked_mse(const geo::MaskedGrid& pred, const geo::MaskedGrid& truth) {
    const auto m = joint_mask(pred, truth);
    const auto ss = kernels::active().masked_sum_sq_diff(
        pred.values_raw().data(), truth.values_raw().data(), m.data(), m.size());
    if (ss.count == 0) throw Error::validation("masked_mse: no cell is valid in both grids");
    return ss.sum / double(ss.count);
}

geo::MaskedGrid lowpass(const geo::MaskedGrid& grid, size_t pool_size) {
    require(pool_size >= 3 && pool_size % 2 == 1, "lowpass: pool size must be odd and >= 3");
    const size_t rows = grid.rows(), cols = grid.cols();
    const long half = long(pool_size) / 2;
    geo::MaskedGrid out(rows, cols);
    for (size_t r = 0; r < rows; ++r) {
        for (size_t c = 0; c < cols; ++c) {
            if (!grid.valid(r, c)) continue;
            double acc = 0.0;
            size_t cnt = 0;
            const long r0 = std::max<long>(0, long(r) - half);
            const long r1 = std::min<long>(long(rows) - 1, long(r) + half);
            const long c0 = std::max<long>(0, long(c) - half);
            const long c1 = std::min<long>(long(cols) - 1, long(c) + half);
            for (long rr = r0; rr <= r1; ++rr)
                for (long cc = c0; cc <= c1; ++cc)
                    if (grid.valid(size_t(rr), size_t(cc))) {
                        acc += grid.at(size_t(rr), size_t(cc));
                        ++cnt;
                    }
            out.set(r, c, acc / double(cnt));
        }
    }
    return out;
}

double composite_loss(const std::vector<geo::MaskedGrid>& pred,
                      const std::vector<geo::MaskedGrid>& truth,
                      const CompositeLossConfig& cfg) {
    require(pred.size() == truth.size(), "composite_loss: timestep count mismatch");
    require(!pred.empty(), "composite_loss: empty sequence");
    require(cfg.w_main >= 0 && cfg.w_trend >= 0 && cfg.w_mean >= 0,
            "composite_loss: weights must be nonnegative");
    require(cfg.w_main + cfg.w_trend + cfg.w_mean > 0, "composite_loss: all weights are zero");

    const size_t T = pred.size();
    double ss_main = 0.0, ss_trend = 0.0, ss_mean = 0.0;
    size_t n_main = 0, n_trend = 0;
    for (size_t t = 0; t < T; ++t) {
        const auto m = joint_mask(pred[t], truth[t]);

        const auto main_t = kernels::active().masked_sum_sq_diff(
            pred[t].values_raw().data(), truth[t].values_raw().data(), m.data(), m.size());
        if (main_t.count == 0)
            throw Error::validation("composite_loss: empty joint mask at a timestep");
        ss_main += main_t.sum;
        n_main += main_t.count;

        if (cfg.w_trend > 0) {
            const auto lp = lowpass(pred[t], cfg.pool_size);
            const auto lt = lowpass(truth[t], cfg.pool_size);
            const auto trend_t = kernels::active().masked_sum_sq_diff(
                lp.values_raw().data(), lt.values_raw().data(), m.data(), m.size());
            ss_trend += trend_t.sum;
            n_trend += trend_t.count;
        }
        if (cfg.w_mean > 0) {
            const auto sp = kernels::active().masked_sum(pred[t].values_raw().data(), m.data(), m.size());
            const auto st = kernels::active().masked_sum(truth[t].values_raw().data(), m.data(), m.size());
            const double diff = sp.sum / double(sp.count) - st.sum / double(st.count);
            ss_mean += diff * diff;
        }
    }
    double loss = 0.0;
    if (n_main > 0) loss += cfg.w_main * ss_main / double(n_main);
    if (cfg.w_trend > 0) loss += cfg.w_trend * ss_trend / double(n_trend);
    if (cfg.w_mean > 0) loss += cfg.w_mean * ss_mean / double(T);
    return loss;
}

std::vector<MetricsSummaryRow> summarize(const std::vector<MetricsRow>& rows) {
    std::vector<MetricsSummaryRow> out;
    auto find = [&](const MetricsRow& r) -> MetricsSummaryRow* {
        for (auto& s : out)
            if (s.predictor == r.predictor && s.role == r.role && s.split == r.split) return &s;
        return nullptr;
    };
    // two passes: means, then sample std
    for (const auto& r : rows) {
        MetricsSummaryRow* s = find(r);
        if (!s) {
            out.push_back({r.predictor, r.role, r.split, 0, 0, 0, 0, 0});
            s = &out.back();
        }
        s->r2_mean += r.r2;
        s->mse_mean += r.mse;
        s->n_folds += 1;
    }
    for (auto& s : out) {
        s.r2_mean /= double(s.n_folds);
        s.mse_mean /= double(s.n_folds);
    }
    for (const auto& r : rows) {
        MetricsSummaryRow* s = find(r);
        s->r2_std += (r.r2 - s->r2_mean) * (r.r2 - s->r2_mean);
        s->mse_std += (r.mse - s->mse_mean) * (r.mse - s->mse_mean);
    }
    for (auto& s : out) {
        if (s.n_folds >= 2) {
            s.r2_std = std::sqrt(s.r2_std / double(s.n_folds - 1));
            s.mse_std = std::sqrt(s.mse_std / double(s.n_folds - 1));
        } else {
            s.r2_std = 0.0;
            s.mse_std = 0.0;
        }
    }
    return out;
}

} // namespace stkit::metrics
