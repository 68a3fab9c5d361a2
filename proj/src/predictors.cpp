#include "stkit/predictors.hpp"

#include "stkit/common.hpp"
#include "stkit/kernels.hpp"
#include "stkit/rbf.hpp"
#include "stkit/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <unordered_map>

namespace stkit::model {

namespace {
constexpr double NA = std::numeric_limits<double>::quiet_NaN();
}

void AccessAudit::merge(const AccessAudit& other) {
    value_reads += other.value_reads;
    grid_reads += other.grid_reads;
    max_value_t = std::max(max_value_t, other.max_value_t);
    max_grid_t = std::max(max_grid_t, other.max_grid_t);
}

TrainView::TrainView(const obs::PointObservationSet& model_obs, const gridio::GridStack* stack,
                     const geo::GridSpec* grid, size_t t_end, AccessAudit* audit)
    : obs_(&model_obs), stack_(stack), grid_(grid), t_end_(t_end), audit_(audit) {
    require(t_end_ >= 1 && t_end_ <= model_obs.n_times, "training window out of range");
    if (stack_) {
        require(grid_ != nullptr, "grid stack needs a grid spec");
        require(stack_->n_t >= t_end_, "grid stack shorter than the training window");
    }
}

bool TrainView::is_valid(size_t j, size_t t) const {
    if (j >= n_wells() || t >= t_end_)
        throw Error::runtime("train view: access outside the training window");
    return obs_->is_valid(j, t);
}

double TrainView::value(size_t j, size_t t) const {
    if (j >= n_wells() || t >= t_end_)
        throw Error::runtime("train view: access outside the training window");
    if (!obs_->is_valid(j, t)) throw Error::runtime("train view: read of a gap");
    if (audit_) {
        audit_->value_reads += 1;
        audit_->max_value_t = std::max(audit_->max_value_t, long(t));
    }
    return obs_->value(j, t);
}

const gridio::GridStack& TrainView::stack() const {
    if (!stack_) throw Error::runtime("train view: no grid stack attached");
    return *stack_;
}

const geo::GridSpec& TrainView::grid() const {
    if (!grid_) throw Error::runtime("train view: no grid spec attached");
    return *grid_;
}

std::vector<double> TrainView::grid_features(size_t j, size_t t,
                                             const features::FeatureSpec& spec) const {
    if (j >= n_wells() || t >= t_end_)
        throw Error::runtime("train view: access outside the training window");
    if (audit_) {
        audit_->grid_reads += 1;
        audit_->max_grid_t = std::max(audit_->max_grid_t, long(t));
    }
    return features::extract_features(stack(), grid(), obs_->points[j], t, spec);
}

std::vector<double> TrainView::site_channels(size_t j, size_t t) const {
    if (j >= n_wells() || t >= t_end_)
        throw Error::runtime("train view: access outside the training window");
    if (audit_) {
        audit_->grid_reads += 1;
        audit_->max_grid_t = std::max(audit_->max_grid_t, long(t));
    }
    const auto& s = stack();
    std::vector<double> out(s.n_c, 0.0);
    const auto cell = grid().cell_of(obs_->points[j].lon, obs_->points[j].lat);
    if (!cell) return out;
    for (size_t c = 0; c < s.n_c; ++c) {
        const float v = s.at(t, c, cell->first, cell->second);
        if (std::isfinite(v)) out[c] = double(v);
    }
    return out;
}

double Predictor::predict_well(size_t, size_t, const PredictContext&) const {
    throw Error::runtime(name() + ": not a well-indexed predictor");
}

double Predictor::predict_site(const geo::GeoPoint&, size_t, const PredictContext&) const {
    throw Error::runtime(name() + ": cannot predict at arbitrary sites");
}

namespace {

class Climatology final : public Predictor {
public:
    std::string name() const override { return "climatology"; }
    bool site_capable() const override { return false; }

    void fit(const TrainView& train, Rng&) override {
        const size_t n = train.n_wells();
        mean_.assign(n * 12, 0.0);
        std::vector<size_t> count(n * 12, 0);
        for (size_t j = 0; j < n; ++j)
            for (size_t t = 0; t < train.t_end(); ++t) {
                if (!train.is_valid(j, t)) continue;
                const size_t m = size_t(train.month_of(t) - 1);
                mean_[j * 12 + m] += train.value(j, t);
                count[j * 12 + m] += 1;
            }
        for (size_t k = 0; k < mean_.size(); ++k)
            mean_[k] = count[k] > 0 ? mean_[k] / double(count[k]) : NA;
    }

    double predict_well(size_t well, size_t t, const PredictContext& ctx) const override {
        require(ctx.model_obs != nullptr, "climatology: missing observation context");
        require(well * 12 < mean_.size(), "climatology: unknown well");
        return mean_[well * 12 + size_t(ctx.model_obs->month_of(t) - 1)];
    }

private:
    std::vector<double> mean_;
};

class Persistence final : public Predictor {
public:
    std::string name() const override { return "persistence"; }
    bool site_capable() const override { return false; }

    void fit(const TrainView& train, Rng&) override { n_wells_ = train.n_wells(); }

    double predict_well(size_t well, size_t t, const PredictContext& ctx) const override {
        require(ctx.model_obs != nullptr, "persistence: missing observation context");
        require(well < n_wells_, "persistence: unknown well");
        if (t == 0) return NA;
        if (!ctx.model_obs->is_valid(well, t - 1)) return NA;
        return ctx.model_obs->value(well, t - 1);
    }

private:
    size_t n_wells_ = 0;
};

class Ridge final : public Predictor {
public:
    explicit Ridge(RidgeConfig cfg) : cfg_(std::move(cfg)) {
        require(cfg_.alpha >= 0.0, "ridge: alpha must be nonnegative");
    }

    std::string name() const override { return "ridge"; }
    bool site_capable() const override { return true; }

    void fit(const TrainView& train, Rng&) override {
        require(train.has_grids(), "ridge needs a grid stack");
        const size_t lag_min = cfg_.feat.lags - 1;
        std::vector<std::vector<double>> X;
        std::vector<double> y;
        for (size_t j = 0; j < train.n_wells(); ++j)
            for (size_t t = lag_min; t < train.t_end(); ++t) {
                if (!train.is_valid(j, t)) continue;
                X.push_back(train.grid_features(j, t, cfg_.feat));
                y.push_back(train.value(j, t));
            }
        require(!X.empty(), "ridge: no training samples in the window");

        // no explicit intercept: the validity block already supplies constant
        // columns on fully valid patches, and the penalty applies uniformly
        const size_t d = X[0].size();
        std::vector<double> A(d * d, 0.0), b(d, 0.0);
        const auto& ops = kernels::active();
        for (size_t r = 0; r < X.size(); ++r) {
            const double* row = X[r].data();
            for (size_t i = 0; i < d; ++i)
                ops.axpy(row[i], row + i, A.data() + i * d + i, d - i);
            ops.axpy(y[r], row, b.data(), d);
        }
        for (size_t i = 0; i < d; ++i) {
            A[i * d + i] += cfg_.alpha;
            for (size_t k = i + 1; k < d; ++k) A[k * d + i] = A[i * d + k];
        }
        try {
            beta_ = solver::CholFactor::compute(std::move(A), d).solve(b);
        } catch (const Error&) {
            throw Error::runtime("ridge: normal matrix is singular; use alpha > 0");
        }
    }

    double predict_site(const geo::GeoPoint& site, size_t t,
                        const PredictContext& ctx) const override {
        require(!beta_.empty(), "ridge: not fitted");
        require(ctx.stack != nullptr && ctx.grid != nullptr, "ridge needs a grid stack");
        if (t + 1 < cfg_.feat.lags) return NA;
        const auto x = features::extract_features(*ctx.stack, *ctx.grid, site, t, cfg_.feat);
        require(x.size() == beta_.size(), "ridge: feature length mismatch");
        return kernels::active().dot(x.data(), beta_.data(), x.size());
    }

    std::vector<double> parameters() const override { return beta_; }

private:
    RidgeConfig cfg_;
    std::vector<double> beta_;
};

class RbfQuantile final : public Predictor {
public:
    explicit RbfQuantile(RbfQuantileConfig cfg) : cfg_(std::move(cfg)) {
        require(cfg_.eval_fraction > 0.0 && cfg_.eval_fraction < 1.0,
                "rbf_quantile: eval_fraction must be in (0, 1)");
    }

    std::string name() const override { return "rbf_quantile"; }
    bool site_capable() const override { return true; }

    void fit(const TrainView& train, Rng& rng) override {
        if (cfg_.use_site_channels)
            require(train.has_grids(), "rbf_quantile: site channels need a grid stack");
        emb_ = rbf::make_embedding(3, cfg_.levels, cfg_.bandwidth_scale);

        x_lo_ = y_lo_ = std::numeric_limits<double>::infinity();
        double x_hi = -x_lo_, y_hi = x_lo_;
        for (size_t j = 0; j < train.n_wells(); ++j) {
            const auto& p = train.site(j);
            x_lo_ = std::min(x_lo_, p.x);
            x_hi = std::max(x_hi, p.x);
            y_lo_ = std::min(y_lo_, p.y);
            y_hi = std::max(y_hi, p.y);
        }
        x_span_ = x_hi > x_lo_ ? x_hi - x_lo_ : 1.0;
        y_span_ = y_hi > y_lo_ ? y_hi - y_lo_ : 1.0;
        t_span_ = train.t_end() > 1 ? double(train.t_end() - 1) : 1.0;

        std::vector<std::vector<double>> X;
        std::vector<double> y;
        std::vector<size_t> sample_t;
        for (size_t j = 0; j < train.n_wells(); ++j)
            for (size_t t = 0; t < train.t_end(); ++t) {
                if (!train.is_valid(j, t)) continue;
                auto x = inputs(train.site(j), t);
                if (cfg_.use_site_channels) {
                    const auto ch = train.site_channels(j, t);
                    x.insert(x.end(), ch.begin(), ch.end());
                }
                X.push_back(std::move(x));
                y.push_back(train.value(j, t));
                sample_t.push_back(t);
            }
        require(!X.empty(), "rbf_quantile: no training samples in the window");

        // early stopping evaluates on the most recent slice of the window so
        // selection never sees anything beyond it
        const size_t tail = std::max<size_t>(
            1, size_t(std::llround(cfg_.eval_fraction * double(train.t_end()))));
        const size_t t_split = train.t_end() > tail ? train.t_end() - tail : 0;
        std::vector<size_t> fit_idx, eval_idx;
        for (size_t r = 0; r < X.size(); ++r)
            (sample_t[r] < t_split ? fit_idx : eval_idx).push_back(r);
        if (fit_idx.empty() || eval_idx.empty()) {
            fit_idx.resize(X.size());
            for (size_t r = 0; r < X.size(); ++r) fit_idx[r] = r;
            eval_idx = fit_idx;
        }

        net_.emplace(X[0].size(), cfg_.net, rng);
        net_->fit(X, y, fit_idx, eval_idx, rng);
    }

    double predict_site(const geo::GeoPoint& site, size_t t,
                        const PredictContext& ctx) const override {
        require(net_.has_value(), "rbf_quantile: not fitted");
        auto x = inputs(site, t);
        if (cfg_.use_site_channels) {
            require(ctx.stack != nullptr && ctx.grid != nullptr,
                    "rbf_quantile: site channels need a grid stack");
            std::vector<double> ch(ctx.stack->n_c, 0.0);
            const auto cell = ctx.grid->cell_of(site.lon, site.lat);
            if (cell)
                for (size_t c = 0; c < ctx.stack->n_c; ++c) {
                    const float v = ctx.stack->at(t, c, cell->first, cell->second);
                    if (std::isfinite(v)) ch[c] = double(v);
                }
            x.insert(x.end(), ch.begin(), ch.end());
        }
        return net_->predict_median(x);
    }

    std::vector<double> parameters() const override {
        return net_ ? net_->params() : std::vector<double>{};
    }

private:
    std::vector<double> inputs(const geo::GeoPoint& p, size_t t) const {
        const std::vector<double> u = {(p.x - x_lo_) / x_span_, (p.y - y_lo_) / y_span_,
                                       double(t) / t_span_};
        return emb_.embed(u);
    }

    RbfQuantileConfig cfg_;
    rbf::Embedding emb_;
    double x_lo_ = 0.0, x_span_ = 1.0, y_lo_ = 0.0, y_span_ = 1.0, t_span_ = 1.0;
    std::optional<net::QuantileNet> net_;
};

class External final : public Predictor {
public:
    External(std::string name, std::vector<ptio::PredictionRow> rows)
        : name_(std::move(name)) {
        for (auto& r : rows) table_[key(r.well_id, r.time_index)] = r.value;
    }

    std::string name() const override { return name_; }
    bool site_capable() const override { return false; }

    void fit(const TrainView& train, Rng&) override {
        ids_.clear();
        for (size_t j = 0; j < train.n_wells(); ++j) ids_.push_back(train.site(j).id);
    }

    double predict_well(size_t well, size_t t, const PredictContext&) const override {
        require(well < ids_.size(), name_ + ": unknown well");
        auto it = table_.find(key(ids_[well], t));
        return it == table_.end() ? NA : it->second;
    }

private:
    static std::string key(const std::string& id, size_t t) {
        return id + "\x1f" + std::to_string(t);
    }

    std::string name_;
    std::unordered_map<std::string, double> table_;
    std::vector<std::string> ids_;
};

} // namespace

std::unique_ptr<Predictor> make_climatology() { return std::make_unique<Climatology>(); }
std::unique_ptr<Predictor> make_persistence() { return std::make_unique<Persistence>(); }
std::unique_ptr<Predictor> make_ridge(const RidgeConfig& cfg) {
    return std::make_unique<Ridge>(cfg);
}
std::unique_ptr<Predictor> make_rbf_quantile(const RbfQuantileConfig& cfg) {
    return std::make_unique<RbfQuantile>(cfg);
}
std::unique_ptr<Predictor> make_external(std::string name,
                                         std::vector<ptio::PredictionRow> rows) {
    return std::make_unique<External>(std::move(name), std::move(rows));
}

} // namespace stkit::model
