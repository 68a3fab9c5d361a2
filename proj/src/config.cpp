#include "stkit/config.hpp"

#include "stkit/common.hpp"
#include "stkit/variogram.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

namespace stkit::config {

namespace {

std::string trim(const std::string& s) {
    size_t b = s.find_first_not_of(" \t");
    if (b == std::string::npos) return "";
    size_t e = s.find_last_not_of(" \t");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    size_t start = 0;
    while (true) {
        const size_t comma = s.find(',', start);
        if (comma == std::string::npos) {
            out.push_back(trim(s.substr(start)));
            return out;
        }
        out.push_back(trim(s.substr(start, comma - start)));
        start = comma + 1;
    }
}

double parse_double(const std::string& s, const std::string& key) {
    double v = 0.0;
    const char* b = s.data();
    auto [p, ec] = std::from_chars(b, b + s.size(), v);
    if (ec != std::errc{} || p != b + s.size() || !std::isfinite(v))
        throw Error::validation(key + ": not a number: '" + s + "'");
    return v;
}

long long parse_int(const std::string& s, const std::string& key) {
    long long v = 0;
    const char* b = s.data();
    auto [p, ec] = std::from_chars(b, b + s.size(), v);
    if (ec != std::errc{} || p != b + s.size())
        throw Error::validation(key + ": not an integer: '" + s + "'");
    return v;
}

size_t parse_size(const std::string& s, const std::string& key) {
    long long v = parse_int(s, key);
    if (v < 0) throw Error::validation(key + ": must not be negative: '" + s + "'");
    return size_t(v);
}

uint64_t parse_u64(const std::string& s, const std::string& key) {
    uint64_t v = 0;
    const char* b = s.data();
    auto [p, ec] = std::from_chars(b, b + s.size(), v);
    if (ec != std::errc{} || p != b + s.size())
        throw Error::validation(key + ": not an unsigned integer: '" + s + "'");
    return v;
}

bool parse_bool(const std::string& s, const std::string& key) {
    if (s == "true") return true;
    if (s == "false") return false;
    throw Error::validation(key + ": expected true or false, got '" + s + "'");
}

obs::MonthStamp parse_stamp(const std::string& s, const std::string& key) {
    try {
        return obs::parse_month(s);
    } catch (const Error& e) {
        throw Error::validation(key + ": " + e.what());
    }
}

std::vector<size_t> parse_size_list(const std::string& s, const std::string& key) {
    std::vector<size_t> out;
    for (const auto& tok : split_list(s)) out.push_back(parse_size(tok, key));
    return out;
}

std::vector<double> parse_double_list(const std::string& s, const std::string& key) {
    std::vector<double> out;
    for (const auto& tok : split_list(s)) out.push_back(parse_double(tok, key));
    return out;
}

// roster token: a predictor kind, or external:<label>:<predictions csv>
cv::PredictorSetup parse_roster_token(const std::string& tok) {
    cv::PredictorSetup s;
    if (tok.rfind("external:", 0) == 0) {
        const size_t second = tok.find(':', 9);
        if (second == std::string::npos || second == 9 || second + 1 >= tok.size())
            throw Error::validation("predictors: external entries are "
                                    "external:<label>:<path>, got '" + tok + "'");
        s.kind = "external";
        s.label = tok.substr(9, second - 9);
        s.external_path = tok.substr(second + 1);
        return s;
    }
    if (tok != "climatology" && tok != "persistence" && tok != "ridge" &&
        tok != "rbf_quantile")
        throw Error::validation("predictors: unknown kind '" + tok + "'");
    s.kind = tok;
    return s;
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string fmt_list(const std::vector<size_t>& v) {
    std::string out;
    for (size_t i = 0; i < v.size(); ++i)
        out += (i ? ", " : "") + std::to_string(v[i]);
    return out;
}

std::string fmt_list(const std::vector<double>& v) {
    std::string out;
    for (size_t i = 0; i < v.size(); ++i) out += (i ? ", " : "") + fmt(v[i]);
    return out;
}

void check_ranges(const RunConfig& c) {
    require(c.cv.holdout_fraction > 0.0 && c.cv.holdout_fraction < 1.0,
            "cv.holdout_fraction must lie in (0, 1)");
    require(c.cv.n_folds >= 1, "cv.n_folds must be at least 1");
    require(c.cv.eval_len >= 1, "cv.eval_len must be at least 1");
    require(c.cv.variogram_bins >= 4, "variogram.bins must be at least 4");
    require(c.variogram_max_lag >= 0.0, "variogram.max_lag must not be negative");
    require(c.loss.w_main >= 0.0 && c.loss.w_trend >= 0.0 && c.loss.w_mean >= 0.0,
            "loss weights must not be negative");
    require(c.loss.pool_size >= 1, "loss.pool_size must be at least 1");
    require(c.segment.window >= 2, "segment.window must be at least 2");
    require(c.segment.z_threshold > 0.0, "segment.z_threshold must be positive");
    require(c.local.max_neighbors >= 2, "kriging.max_neighbors must be at least 2");
    require(c.local.search_radius > 0.0, "kriging.search_radius must be positive");
    if (c.grid) {
        require(c.grid->cell_size > 0.0, "grid.cell_size must be positive");
        require(c.grid->n_cols >= 1 && c.grid->n_rows >= 1,
                "grid dimensions must be at least 1 x 1");
    }
    if (c.baseline_begin.has_value() != c.baseline_end.has_value())
        throw Error::validation("baseline.begin and baseline.end must be set together");
    if (c.baseline_begin &&
        obs::months_between(*c.baseline_begin, *c.baseline_end) <= 0)
        throw Error::validation("baseline.end must come after baseline.begin");
    for (const auto& p : c.cv.predictors) {
        require(p.ridge.alpha >= 0.0, "ridge.alpha must not be negative");
        require(p.ridge.feat.lags >= 1, "ridge.lags must be at least 1");
        require(!p.rbf.levels.empty(), "rbf.levels must not be empty");
        require(p.rbf.bandwidth_scale > 0.0, "rbf.bandwidth_scale must be positive");
        require(p.rbf.eval_fraction > 0.0 && p.rbf.eval_fraction < 1.0,
                "rbf.eval_fraction must lie in (0, 1)");
        require(!p.rbf.net.hidden.empty(), "rbf.hidden must not be empty");
        for (size_t w : p.rbf.net.hidden)
            require(w >= 1, "rbf.hidden widths must be at least 1");
        require(!p.rbf.net.quantiles.empty(), "rbf.quantiles must not be empty");
        for (size_t i = 0; i < p.rbf.net.quantiles.size(); ++i) {
            const double q = p.rbf.net.quantiles[i];
            require(q > 0.0 && q < 1.0, "rbf.quantiles must lie in (0, 1)");
            if (i) require(p.rbf.net.quantiles[i - 1] < q,
                           "rbf.quantiles must be ascending");
        }
        require(p.rbf.net.lr > 0.0, "rbf.lr must be positive");
        require(p.rbf.net.batch >= 1, "rbf.batch must be at least 1");
        require(p.rbf.net.max_epochs >= 1, "rbf.max_epochs must be at least 1");
    }
}

} // namespace

RunConfig parse_text(const std::string& text, const std::string& origin) {
    RunConfig c;
    geo::GridSpec grid;
    bool grid_seen = false;
    model::RidgeConfig ridge;
    model::RbfQuantileConfig rbf;
    std::vector<std::string> roster;

    std::vector<std::pair<std::string, std::string>> kv;
    std::istringstream in(text);
    std::string line;
    size_t line_no = 0;
    std::set<std::string> seen;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        const size_t eq = t.find('=');
        if (eq == std::string::npos)
            throw Error::validation(origin + " line " + std::to_string(line_no) +
                                    ": expected key = value");
        const std::string key = trim(t.substr(0, eq));
        const std::string val = trim(t.substr(eq + 1));
        if (key.empty())
            throw Error::validation(origin + " line " + std::to_string(line_no) +
                                    ": empty key");
        if (key.rfind("deviation.", 0) == 0) continue; // manifests parse as configs
        if (!seen.insert(key).second)
            throw Error::validation(origin + " line " + std::to_string(line_no) +
                                    ": duplicate key '" + key + "'");
        if (val.empty())
            throw Error::validation(origin + " line " + std::to_string(line_no) +
                                    ": empty value for '" + key + "'");
        kv.emplace_back(key, val);
    }

    for (const auto& [key, val] : kv) {
        if (key == "points") c.points_path = val;
        else if (key == "grids") c.grids_path = val;
        else if (key == "storage") c.storage_path = val;
        else if (key == "polygon") c.polygon_path = val;
        else if (key == "central_meridian") c.central_meridian = parse_double(val, key);
        else if (key == "grid.lon_min") { grid.lon_min = parse_double(val, key); grid_seen = true; }
        else if (key == "grid.lat_min") { grid.lat_min = parse_double(val, key); grid_seen = true; }
        else if (key == "grid.cell_size") { grid.cell_size = parse_double(val, key); grid_seen = true; }
        else if (key == "grid.n_cols") { grid.n_cols = parse_size(val, key); grid_seen = true; }
        else if (key == "grid.n_rows") { grid.n_rows = parse_size(val, key); grid_seen = true; }
        else if (key == "baseline.begin") c.baseline_begin = parse_stamp(val, key);
        else if (key == "baseline.end") c.baseline_end = parse_stamp(val, key);
        else if (key == "segment.window") c.segment.window = parse_size(val, key);
        else if (key == "segment.z_threshold") c.segment.z_threshold = parse_double(val, key);
        else if (key == "fill_gaps") c.fill_gaps = parse_bool(val, key);
        else if (key == "cv.holdout_fraction") c.cv.holdout_fraction = parse_double(val, key);
        else if (key == "cv.n_folds") c.cv.n_folds = parse_size(val, key);
        else if (key == "cv.eval_len") c.cv.eval_len = parse_size(val, key);
        else if (key == "cv.seed") c.cv.seed = parse_u64(val, key);
        else if (key == "predictors") roster = split_list(val);
        else if (key == "ridge.alpha") ridge.alpha = parse_double(val, key);
        else if (key == "ridge.patch_radius") ridge.feat.patch_radius = parse_size(val, key);
        else if (key == "ridge.lags") ridge.feat.lags = parse_size(val, key);
        else if (key == "ridge.site_scalars") ridge.feat.site_scalars = parse_bool(val, key);
        else if (key == "ridge.elevation_channel") ridge.feat.elevation_channel = int(parse_int(val, key));
        else if (key == "rbf.levels") rbf.levels = parse_size_list(val, key);
        else if (key == "rbf.bandwidth_scale") rbf.bandwidth_scale = parse_double(val, key);
        else if (key == "rbf.site_channels") rbf.use_site_channels = parse_bool(val, key);
        else if (key == "rbf.eval_fraction") rbf.eval_fraction = parse_double(val, key);
        else if (key == "rbf.hidden") rbf.net.hidden = parse_size_list(val, key);
        else if (key == "rbf.quantiles") rbf.net.quantiles = parse_double_list(val, key);
        else if (key == "rbf.lr") rbf.net.lr = parse_double(val, key);
        else if (key == "rbf.batch") rbf.net.batch = parse_size(val, key);
        else if (key == "rbf.max_epochs") rbf.net.max_epochs = parse_size(val, key);
        else if (key == "rbf.patience") rbf.net.patience = parse_size(val, key);
        else if (key == "loss.w_main") c.loss.w_main = parse_double(val, key);
        else if (key == "loss.w_trend") c.loss.w_trend = parse_double(val, key);
        else if (key == "loss.w_mean") c.loss.w_mean = parse_double(val, key);
        else if (key == "loss.pool_size") c.loss.pool_size = parse_size(val, key);
        else if (key == "variogram.family") c.cv.family = vario::family_from_string(val);
        else if (key == "variogram.bins") c.cv.variogram_bins = parse_size(val, key);
        else if (key == "variogram.max_lag") c.variogram_max_lag = parse_double(val, key);
        else if (key == "kriging.mode") {
            if (val == "global") c.kriging_local = false;
            else if (val == "local") c.kriging_local = true;
            else throw Error::validation("kriging.mode: expected global or local, got '" + val + "'");
        }
        else if (key == "kriging.max_neighbors") c.local.max_neighbors = parse_size(val, key);
        else if (key == "kriging.search_radius") c.local.search_radius = parse_double(val, key);
        else throw Error::validation(origin + ": unknown key '" + key + "'");
    }

    if (grid_seen) {
        require(grid.n_cols > 0 && grid.n_rows > 0,
                "grid.* keys are set but grid.n_cols / grid.n_rows are missing");
        c.grid = grid;
    }

    if (roster.empty())
        roster = {"climatology", "persistence", "ridge", "rbf_quantile"};
    for (const auto& tok : roster) {
        auto s = parse_roster_token(tok);
        s.ridge = ridge;
        s.rbf = rbf;
        c.cv.predictors.push_back(s);
    }

    check_ranges(c);
    return c;
}

RunConfig parse_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error::validation("cannot open config " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    RunConfig c = parse_text(buf.str(), path);

    auto must_exist = [](const std::string& p, const char* key) {
        if (!p.empty() && !std::filesystem::exists(p))
            throw Error::validation(std::string(key) + ": no such file: " + p);
    };
    must_exist(c.points_path, "points");
    must_exist(c.grids_path, "grids");
    must_exist(c.storage_path, "storage");
    must_exist(c.polygon_path, "polygon");
    for (const auto& p : c.cv.predictors)
        if (p.kind == "external") must_exist(p.external_path, "predictors (external)");
    return c;
}

std::string manifest_text(const RunConfig& c) {
    std::ostringstream out;
    out << "# run manifest: effective configuration\n";
    auto put = [&](const std::string& key, const std::string& val) {
        if (!val.empty()) out << key << " = " << val << "\n";
    };
    put("points", c.points_path);
    put("grids", c.grids_path);
    put("storage", c.storage_path);
    put("polygon", c.polygon_path);
    put("central_meridian", fmt(c.central_meridian));
    if (c.grid) {
        put("grid.lon_min", fmt(c.grid->lon_min));
        put("grid.lat_min", fmt(c.grid->lat_min));
        put("grid.cell_size", fmt(c.grid->cell_size));
        put("grid.n_cols", std::to_string(c.grid->n_cols));
        put("grid.n_rows", std::to_string(c.grid->n_rows));
    }
    if (c.baseline_begin) {
        put("baseline.begin", obs::format_month(*c.baseline_begin));
        put("baseline.end", obs::format_month(*c.baseline_end));
    }
    put("segment.window", std::to_string(c.segment.window));
    put("segment.z_threshold", fmt(c.segment.z_threshold));
    put("fill_gaps", c.fill_gaps ? "true" : "false");
    put("cv.holdout_fraction", fmt(c.cv.holdout_fraction));
    put("cv.n_folds", std::to_string(c.cv.n_folds));
    put("cv.eval_len", std::to_string(c.cv.eval_len));
    put("cv.seed", std::to_string(c.cv.seed));

    std::string roster;
    for (const auto& p : c.cv.predictors) {
        if (!roster.empty()) roster += ", ";
        if (p.kind == "external")
            roster += "external:" + p.label + ":" + p.external_path;
        else
            roster += p.kind;
    }
    put("predictors", roster);

    const model::RidgeConfig* ridge = nullptr;
    const model::RbfQuantileConfig* rbf = nullptr;
    for (const auto& p : c.cv.predictors) {
        if (p.kind == "ridge" && !ridge) ridge = &p.ridge;
        if (p.kind == "rbf_quantile" && !rbf) rbf = &p.rbf;
    }
    if (ridge) {
        put("ridge.alpha", fmt(ridge->alpha));
        put("ridge.patch_radius", std::to_string(ridge->feat.patch_radius));
        put("ridge.lags", std::to_string(ridge->feat.lags));
        put("ridge.site_scalars", ridge->feat.site_scalars ? "true" : "false");
        put("ridge.elevation_channel", std::to_string(ridge->feat.elevation_channel));
    }
    if (rbf) {
        put("rbf.levels", fmt_list(rbf->levels));
        put("rbf.bandwidth_scale", fmt(rbf->bandwidth_scale));
        put("rbf.site_channels", rbf->use_site_channels ? "true" : "false");
        put("rbf.eval_fraction", fmt(rbf->eval_fraction));
        put("rbf.hidden", fmt_list(rbf->net.hidden));
        put("rbf.quantiles", fmt_list(rbf->net.quantiles));
        put("rbf.lr", fmt(rbf->net.lr));
        put("rbf.batch", std::to_string(rbf->net.batch));
        put("rbf.max_epochs", std::to_string(rbf->net.max_epochs));
        put("rbf.patience", std::to_string(rbf->net.patience));
    }
    put("loss.w_main", fmt(c.loss.w_main));
    put("loss.w_trend", fmt(c.loss.w_trend));
    put("loss.w_mean", fmt(c.loss.w_mean));
    put("loss.pool_size", std::to_string(c.loss.pool_size));
    put("variogram.family", vario::to_string(c.cv.family));
    put("variogram.bins", std::to_string(c.cv.variogram_bins));
    put("variogram.max_lag", fmt(c.variogram_max_lag));
    put("kriging.mode", c.kriging_local ? "local" : "global");
    put("kriging.max_neighbors", std::to_string(c.local.max_neighbors));
    if (std::isfinite(c.local.search_radius))
        put("kriging.search_radius", fmt(c.local.search_radius));

    out << "# standing method notes\n";
    out << "deviation.gap_fill = gaps are filled by deterministic monthly climatology "
           "plus linear interpolation of the deseasonalized remainder; no stochastic "
           "imputation\n";
    out << "deviation.scaling_fit = min-max scaling statistics are fitted on the "
           "training window only and applied unchanged to later windows\n";
    out << "deviation.fold_stride = expanding-window folds advance by eval_len months "
           "and the final test window ends at the last timestep\n";
    out << "deviation.loss_weights = composite loss weights w_main, w_trend, w_mean "
           "and pool_size are configuration inputs; defaults 1, 0.5, 0.5, 3\n";
    return out.str();
}

void write_manifest(const RunConfig& cfg, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error::runtime("cannot write manifest " + path);
    out << manifest_text(cfg);
    if (!out) throw Error::runtime("write failed: " + path);
}

} // namespace stkit::config
