#include "stkit/cv.hpp"

#include "stkit/common.hpp"
#include "stkit/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

namespace stkit::cv {

namespace {
constexpr double NA = std::numeric_limits<double>::quiet_NaN();
}

SplitSpec spatial_split(size_t n_wells, double fraction, uint64_t seed) {
    require(n_wells >= 2, "spatial split needs at least two wells");
    require(fraction > 0.0 && fraction < 1.0, "holdout fraction must be in (0, 1)");
    const size_t h = size_t(std::floor(fraction * double(n_wells) + 0.5));
    require(h >= 1, "holdout fraction selects no wells");
    require(h < n_wells, "holdout fraction selects every well");

    std::vector<size_t> idx(n_wells);
    std::iota(idx.begin(), idx.end(), size_t(0));
    Rng rng(seed);
    for (size_t i = 0; i < h; ++i)
        std::swap(idx[i], idx[i + size_t(rng.index(uint64_t(n_wells - i)))]);

    SplitSpec s;
    s.holdout_idx.assign(idx.begin(), idx.begin() + long(h));
    s.model_idx.assign(idx.begin() + long(h), idx.end());
    std::sort(s.holdout_idx.begin(), s.holdout_idx.end());
    std::sort(s.model_idx.begin(), s.model_idx.end());
    return s;
}

std::vector<FoldSpec> temporal_folds(size_t T, size_t n_folds, size_t eval_len) {
    require(n_folds >= 1, "need at least one fold");
    require(eval_len >= 1, "eval_len must be positive");
    const size_t t_min = (n_folds + 2) * eval_len;
    if (T < t_min)
        throw Error::validation(
            "not enough timesteps for the fold layout: have " + std::to_string(T) +
            ", need at least (n_folds + 2) * eval_len = " + std::to_string(t_min));

    std::vector<FoldSpec> folds;
    for (size_t k = 1; k <= n_folds; ++k) {
        FoldSpec f;
        f.index = k;
        f.train_end = T - 2 * eval_len - (n_folds - k) * eval_len;
        f.val_begin = f.train_end;
        f.val_end = f.val_begin + eval_len;
        f.test_begin = f.val_end;
        f.test_end = f.test_begin + eval_len;
        folds.push_back(f);
    }
    return folds;
}

namespace {

obs::PointObservationSet restrict_wells(const obs::PointObservationSet& o,
                                        const std::vector<size_t>& wells) {
    std::vector<geo::GeoPoint> pts;
    pts.reserve(wells.size());
    for (size_t w : wells) {
        require(w < o.n_points(), "split index out of range");
        pts.push_back(o.points[w]);
    }
    auto r = obs::PointObservationSet::create(std::move(pts), o.start, o.n_times);
    for (size_t j = 0; j < wells.size(); ++j)
        for (size_t t = 0; t < o.n_times; ++t)
            if (o.is_valid(wells[j], t)) r.set(j, t, o.value(wells[j], t));
    return r;
}

std::unique_ptr<model::Predictor> build_predictor(const PredictorSetup& s) {
    if (s.kind == "climatology") return model::make_climatology();
    if (s.kind == "persistence") return model::make_persistence();
    if (s.kind == "ridge") return model::make_ridge(s.ridge);
    if (s.kind == "rbf_quantile") return model::make_rbf_quantile(s.rbf);
    if (s.kind == "external") {
        require(!s.external_path.empty(), "external predictor needs a predictions csv path");
        return model::make_external(s.label.empty() ? "external" : s.label,
                                    ptio::read_predictions(s.external_path));
    }
    throw Error::validation("unknown predictor kind: " + s.kind);
}

// ordinary kriging of per-well predictions onto target sites, one system per
// distinct set of wells that actually have a prediction at a timestep
std::vector<std::vector<double>> krige_well_predictions(
    const std::vector<geo::GeoPoint>& wells, const std::vector<std::vector<double>>& pred,
    const std::vector<geo::GeoPoint>& targets, size_t t_hi, const vario::Model& m) {
    std::vector<std::vector<double>> out(targets.size(), std::vector<double>(t_hi, NA));
    std::map<std::vector<char>, std::vector<size_t>> groups;
    for (size_t t = 0; t < t_hi; ++t) {
        std::vector<char> key(wells.size());
        for (size_t j = 0; j < wells.size(); ++j) key[j] = std::isfinite(pred[j][t]) ? 1 : 0;
        groups[std::move(key)].push_back(t);
    }

    for (const auto& [key, ts] : groups) {
        std::vector<geo::GeoPoint> sub;
        std::vector<size_t> sub_idx;
        for (size_t j = 0; j < wells.size(); ++j)
            if (key[j]) {
                sub.push_back(wells[j]);
                sub_idx.push_back(j);
            }
        if (sub.empty()) continue;
        auto sys = krige::System::build(sub, m);
        for (size_t g = 0; g < targets.size(); ++g) {
            const auto plan = sys.plan_target(targets[g].x, targets[g].y);
            for (size_t t : ts) {
                double v = 0.0;
                for (size_t i = 0; i < plan.weights.size(); ++i)
                    v += plan.weights[i] * pred[sub_idx[plan.station_idx[i]]][t];
                out[g][t] = v;
            }
        }
    }
    return out;
}

struct Range {
    const char* name;
    size_t begin, end;
};

void score_role(std::vector<metrics::MetricsRow>& rows, int fold, const std::string& name,
                const char* role, const FoldSpec& f,
                const std::vector<std::vector<double>>& pred,
                const obs::PointObservationSet& truth,
                const std::vector<size_t>* truth_wells) {
    const Range ranges[3] = {{"train", 0, f.train_end},
                             {"val", f.val_begin, f.val_end},
                             {"test", f.test_begin, f.test_end}};
    for (const auto& rg : ranges) {
        std::vector<double> p, o;
        for (size_t g = 0; g < pred.size(); ++g) {
            const size_t w = truth_wells ? (*truth_wells)[g] : g;
            for (size_t t = rg.begin; t < rg.end; ++t) {
                if (!truth.is_valid(w, t) || !std::isfinite(pred[g][t])) continue;
                p.push_back(pred[g][t]);
                o.push_back(truth.value(w, t));
            }
        }
        metrics::MetricsRow row;
        row.fold = fold;
        row.predictor = name;
        row.role = role;
        row.split = rg.name;
        row.n = p.size();
        row.mse = p.empty() ? NA : metrics::mse(p, o);
        try {
            row.r2 = metrics::r2(p, o);
        } catch (const Error&) {
            row.r2 = NA;
        }
        rows.push_back(row);
    }
}

} // namespace

ExperimentResult run_experiment(const obs::PointObservationSet& all_obs,
                                const gridio::GridStack* stack, const geo::GridSpec* grid,
                                const ExperimentConfig& cfg) {
    require(!cfg.predictors.empty(), "no predictors configured");
    if (stack) {
        require(grid != nullptr, "grid stack needs a grid spec");
        require(stack->n_t >= all_obs.n_times, "grid stack shorter than the observation axis");
        require(stack->n_h == grid->n_rows && stack->n_w == grid->n_cols,
                "grid stack dims do not match the grid spec");
    }

    ExperimentResult res;
    res.split = spatial_split(all_obs.n_points(), cfg.holdout_fraction, cfg.seed);
    res.folds = temporal_folds(all_obs.n_times, cfg.n_folds, cfg.eval_len);

    const auto model_obs = restrict_wells(all_obs, res.split.model_idx);
    std::vector<geo::GeoPoint> holdout_pts;
    for (size_t w : res.split.holdout_idx) holdout_pts.push_back(all_obs.points[w]);

    model::PredictContext ctx;
    ctx.model_obs = &model_obs;
    ctx.stack = stack;
    ctx.grid = grid;
    ctx.n_times = all_obs.n_times;

    const Rng root(cfg.seed);

    for (const auto& fold : res.folds) {
        model::AccessAudit fold_audit;
        const model::TrainView view(model_obs, stack, grid, fold.train_end, &fold_audit);

        // variogram for interpolating well-indexed predictions, fitted on the
        // training window only; shared by every such predictor in this fold
        bool vario_tried = false;
        std::optional<vario::Model> vario_model;
        std::string vario_error;
        auto fold_variogram = [&]() -> const vario::Model& {
            if (!vario_tried) {
                vario_tried = true;
                try {
                    std::vector<std::vector<double>> vals(fold.train_end);
                    std::vector<std::vector<unsigned char>> ok(fold.train_end);
                    for (size_t t = 0; t < fold.train_end; ++t) {
                        vals[t].resize(model_obs.n_points());
                        ok[t].resize(model_obs.n_points());
                        for (size_t j = 0; j < model_obs.n_points(); ++j) {
                            ok[t][j] = model_obs.is_valid(j, t) ? 1 : 0;
                            vals[t][j] = ok[t][j] ? model_obs.value(j, t) : 0.0;
                        }
                    }
                    const double max_lag = vario::default_max_lag(model_obs.points);
                    const auto emp = vario::empirical_variogram_masked(
                        model_obs.points, vals, ok, cfg.variogram_bins, max_lag);
                    vario_model = vario::fit(emp, cfg.family).model;
                } catch (const Error& e) {
                    vario_error = e.what();
                }
            }
            if (!vario_model)
                throw Error::runtime("interpolation variogram fit failed: " + vario_error);
            return *vario_model;
        };

        size_t p_index = 0;
        for (const auto& setup : cfg.predictors) {
            const uint64_t stream = fold.index * 64 + p_index;
            ++p_index;
            Rng rng = root.fork(stream);
            std::string label;
            try {
                auto predictor = build_predictor(setup);
                label = setup.label.empty() ? predictor->name() : setup.label;
                predictor->fit(view, rng);

                const size_t t_hi = fold.test_end;
                std::vector<std::vector<double>> mp(model_obs.n_points(),
                                                    std::vector<double>(t_hi, NA));
                for (size_t j = 0; j < model_obs.n_points(); ++j)
                    for (size_t t = 0; t < t_hi; ++t)
                        mp[j][t] = predictor->site_capable()
                                       ? predictor->predict_site(model_obs.points[j], t, ctx)
                                       : predictor->predict_well(j, t, ctx);

                std::vector<std::vector<double>> hp;
                if (predictor->site_capable()) {
                    hp.assign(holdout_pts.size(), std::vector<double>(t_hi, NA));
                    for (size_t g = 0; g < holdout_pts.size(); ++g)
                        for (size_t t = 0; t < t_hi; ++t)
                            hp[g][t] = predictor->predict_site(holdout_pts[g], t, ctx);
                } else {
                    hp = krige_well_predictions(model_obs.points, mp, holdout_pts, t_hi,
                                                fold_variogram());
                }

                score_role(res.report.rows, int(fold.index), label, "prediction", fold, mp,
                           model_obs, nullptr);
                score_role(res.report.rows, int(fold.index), label, "interpolation", fold, hp,
                           all_obs, &res.split.holdout_idx);
            } catch (const Error& e) {
                res.failures.push_back(
                    {fold.index, label.empty() ? setup.kind : label, e.what()});
            }
        }
        res.fold_audits.push_back(fold_audit);
        res.audit.merge(fold_audit);
    }

    res.report.summary = metrics::summarize(res.report.rows);
    return res;
}

metrics::MetricsReport evaluate_external(const gridio::GridStack& product, size_t channel,
                                         const obs::PointObservationSet& all_obs,
                                         const geo::GridSpec& grid, size_t baseline_begin,
                                         size_t baseline_end, const ExperimentConfig& cfg,
                                         const std::string& label) {
    const size_t T = all_obs.n_times;
    require(product.n_t == T, "time axis mismatch: product has " +
                                  std::to_string(product.n_t) + " timesteps, observations have " +
                                  std::to_string(T));
    require(channel < product.n_c, "product channel out of range");
    require(product.n_h == grid.n_rows && product.n_w == grid.n_cols,
            "product dims do not match the grid spec");
    require(baseline_begin < baseline_end && baseline_end <= T,
            "baseline range must be non-empty and inside the time axis");

    const size_t n = all_obs.n_points();
    obs::PointObservationSet truth = all_obs;
    std::vector<std::vector<double>> prod(n, std::vector<double>(T, NA));

    for (size_t j = 0; j < n; ++j) {
        double obs_sum = 0.0;
        size_t obs_n = 0;
        for (size_t t = baseline_begin; t < baseline_end; ++t)
            if (all_obs.is_valid(j, t)) {
                obs_sum += all_obs.value(j, t);
                ++obs_n;
            }
        const auto cell = grid.cell_of(all_obs.points[j].lon, all_obs.points[j].lat);
        double prod_sum = 0.0;
        size_t prod_n = 0;
        if (cell) {
            for (size_t t = baseline_begin; t < baseline_end; ++t) {
                const double v = product.at(t, channel, cell->first, cell->second);
                if (std::isfinite(v)) {
                    prod_sum += v;
                    ++prod_n;
                }
            }
        }
        if (obs_n == 0 || prod_n == 0) {
            // no baseline coverage: the well cannot be normalized, drop it
            for (size_t t = 0; t < T; ++t) truth.unset(j, t);
            continue;
        }
        const double obs_mean = obs_sum / double(obs_n);
        const double prod_mean = prod_sum / double(prod_n);
        for (size_t t = 0; t < T; ++t) {
            if (truth.is_valid(j, t)) truth.set(j, t, all_obs.value(j, t) - obs_mean);
            const double v = product.at(t, channel, cell->first, cell->second);
            if (std::isfinite(v)) prod[j][t] = v - prod_mean;
        }
    }

    const auto split = spatial_split(n, cfg.holdout_fraction, cfg.seed);
    const auto folds = temporal_folds(T, cfg.n_folds, cfg.eval_len);

    std::vector<std::vector<double>> model_pred, holdout_pred;
    for (size_t w : split.model_idx) model_pred.push_back(prod[w]);
    for (size_t w : split.holdout_idx) holdout_pred.push_back(prod[w]);

    metrics::MetricsReport report;
    for (const auto& fold : folds) {
        score_role(report.rows, int(fold.index), label, "prediction", fold, model_pred,
                   truth, &split.model_idx);
        score_role(report.rows, int(fold.index), label, "interpolation", fold,
                   holdout_pred, truth, &split.holdout_idx);
    }
    report.summary = metrics::summarize(report.rows);
    return report;
}

} // namespace stkit::cv
