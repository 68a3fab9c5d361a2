#include "stkit/preprocess.hpp"

#include "stkit/common.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

namespace stkit::preprocess {

namespace {

struct WinStats {
    double mean = 0.0;
    double sd = 0.0;
    size_t count = 0;
};

WinStats window_stats(const std::vector<double>& v, const std::vector<unsigned char>& valid,
                      size_t lo, size_t hi) {
    WinStats s;
    double acc = 0.0;
    for (size_t t = lo; t < hi; ++t)
        if (valid[t]) {
            acc += v[t];
            ++s.count;
        }
    if (s.count == 0) return s;
    s.mean = acc / double(s.count);
    double ss = 0.0;
    for (size_t t = lo; t < hi; ++t)
        if (valid[t]) ss += (v[t] - s.mean) * (v[t] - s.mean);
    s.sd = s.count >= 2 ? std::sqrt(ss / double(s.count - 1)) : 0.0;
    return s;
}

} // namespace

std::vector<size_t> segment_series(const std::vector<double>& values,
                                   const std::vector<unsigned char>& valid,
                                   const SegmentOptions& opt) {
    require(values.size() == valid.size(), "segment_series: mask length mismatch");
    require(opt.window >= 12, "segment_series: window must be at least 12 months");
    const size_t T = values.size();
    const size_t w = opt.window;
    if (T < 2 * w) return {};

    const size_t min_side = std::max<size_t>(2, w / 2);
    std::vector<double> z_mean(T, 0.0), z_sd(T, 0.0);
    for (size_t t = w; t + w <= T; ++t) {
        const WinStats left = window_stats(values, valid, t - w, t);
        const WinStats right = window_stats(values, valid, t, t + w);
        if (left.count < min_side || right.count < min_side) continue;
        const WinStats both = window_stats(values, valid, t - w, t + w);
        if (both.sd < 1e-12) continue;
        z_mean[t] = std::fabs(right.mean - left.mean) * std::sqrt(double(w) / 2.0) / both.sd;
        z_sd[t] = std::fabs(right.sd - left.sd) * std::sqrt(double(w)) / both.sd;
    }

    const size_t t_end = T - w + 1;
    auto collapse = [&](const std::vector<double>& z) {
        std::vector<size_t> out;
        size_t t = w;
        while (t < t_end) {
            if (z[t] <= opt.z_threshold) {
                ++t;
                continue;
            }
            size_t best = t;
            while (t < t_end && z[t] > opt.z_threshold) {
                if (z[t] > z[best]) best = t;
                ++t;
            }
            out.push_back(best);
        }
        return out;
    };

    // A mean step inflates the rolling sd of every window straddling it, so
    // sd boundaries within one window of a mean boundary are echoes of the
    // same change and are dropped.
    const auto mean_b = collapse(z_mean);
    std::vector<size_t> boundaries = mean_b;
    for (size_t s : collapse(z_sd)) {
        bool echo = false;
        for (size_t mb : mean_b) echo = echo || (s > mb ? s - mb : mb - s) < w;
        if (!echo) boundaries.push_back(s);
    }
    std::sort(boundaries.begin(), boundaries.end());
    boundaries.erase(std::unique(boundaries.begin(), boundaries.end()), boundaries.end());
    return boundaries;
}

obs::PointObservationSet apply_segmentation(const obs::PointObservationSet& in,
                                            const SegmentOptions& opt) {
    const size_t T = in.n_times;
    std::vector<geo::GeoPoint> pts;
    std::vector<std::pair<size_t, std::pair<size_t, size_t>>> spans; // source idx, [t0, t1)
    for (size_t i = 0; i < in.n_points(); ++i) {
        std::vector<double> v(T);
        std::vector<unsigned char> m(T);
        for (size_t t = 0; t < T; ++t) {
            v[t] = in.value(i, t);
            m[t] = in.is_valid(i, t) ? 1 : 0;
        }
        const auto cuts = segment_series(v, m, opt);
        if (cuts.empty()) {
            pts.push_back(in.points[i]);
            spans.push_back({i, {0, T}});
            continue;
        }
        size_t t0 = 0;
        for (size_t k = 0; k <= cuts.size(); ++k) {
            const size_t t1 = k < cuts.size() ? cuts[k] : T;
            geo::GeoPoint p = in.points[i];
            p.id += "#" + std::to_string(k + 1);
            pts.push_back(p);
            spans.push_back({i, {t0, t1}});
            t0 = t1;
        }
    }
    auto out = obs::PointObservationSet::create(std::move(pts), in.start, T);
    for (size_t j = 0; j < spans.size(); ++j) {
        const auto [i, span] = spans[j];
        for (size_t t = span.first; t < span.second; ++t)
            if (in.is_valid(i, t)) out.set(j, t, in.value(i, t));
    }
    return out;
}

obs::PointObservationSet keep_best_segment_per_well(const obs::PointObservationSet& in) {
    auto base_id = [](const std::string& id) {
        const auto pos = id.rfind('#');
        return pos == std::string::npos ? id : id.substr(0, pos);
    };
    std::map<std::string, size_t> best; // base id -> point index
    std::vector<size_t> counts(in.n_points(), 0);
    for (size_t i = 0; i < in.n_points(); ++i) {
        for (size_t t = 0; t < in.n_times; ++t) counts[i] += in.is_valid(i, t);
        const auto key = base_id(in.points[i].id);
        auto it = best.find(key);
        if (it == best.end() || counts[i] >= counts[it->second]) best[key] = i;
    }
    std::vector<size_t> keep;
    for (size_t i = 0; i < in.n_points(); ++i)
        if (best[base_id(in.points[i].id)] == i) keep.push_back(i);

    std::vector<geo::GeoPoint> pts;
    for (size_t i : keep) pts.push_back(in.points[i]);
    auto out = obs::PointObservationSet::create(std::move(pts), in.start, in.n_times);
    for (size_t j = 0; j < keep.size(); ++j)
        for (size_t t = 0; t < in.n_times; ++t)
            if (in.is_valid(keep[j], t)) out.set(j, t, in.value(keep[j], t));
    return out;
}

std::vector<double> fill_gaps(const std::vector<double>& values,
                              const std::vector<unsigned char>& valid, int month0) {
    require(values.size() == valid.size(), "fill_gaps: mask length mismatch");
    require(month0 >= 1 && month0 <= 12, "fill_gaps: month0 out of range");
    const size_t T = values.size();

    double clim[12] = {};
    size_t clim_n[12] = {};
    size_t n_valid = 0;
    for (size_t t = 0; t < T; ++t) {
        if (!valid[t]) continue;
        const int m = (month0 - 1 + int(t)) % 12;
        clim[m] += values[t];
        clim_n[m] += 1;
        ++n_valid;
    }
    if (n_valid < 24) throw Error::validation("fill_gaps: fewer than 24 valid months");
    for (int m = 0; m < 12; ++m) {
        if (clim_n[m] == 0)
            throw Error::validation("fill_gaps: calendar month " + std::to_string(m + 1) +
                                    " never observed");
        clim[m] /= double(clim_n[m]);
    }

    // deseasonalized anchors, linearly interpolated across gaps
    std::vector<double> out(values);
    long prev = -1;
    for (size_t t = 0; t <= T; ++t) {
        const bool at_end = t == T;
        if (!at_end && !valid[t]) continue;
        const long cur = at_end ? long(T) : long(t);
        for (long g = prev + 1; g < cur; ++g) {
            const int mg = (month0 - 1 + int(g)) % 12;
            double resid;
            if (prev < 0 || at_end) {
                resid = 0.0;
            } else {
                const int mp = (month0 - 1 + int(prev)) % 12;
                const int mc = (month0 - 1 + int(cur)) % 12;
                const double rp = values[size_t(prev)] - clim[mp];
                const double rc = values[size_t(cur)] - clim[mc];
                const double f = double(g - prev) / double(cur - prev);
                resid = rp + f * (rc - rp);
            }
            out[size_t(g)] = clim[mg] + resid;
        }
        prev = cur;
    }
    return out;
}

std::vector<double> gwl_to_gws(const std::vector<double>& depth, double sy) {
    require(sy > 0.0 && sy <= 1.0, "gwl_to_gws: specific yield must be in (0, 1]");
    std::vector<double> out(depth.size());
    for (size_t t = 0; t < depth.size(); ++t) out[t] = -sy * depth[t];
    return out;
}

std::vector<double> anomaly_normalize(const std::vector<double>& series, size_t b0, size_t b1) {
    require(b0 < b1 && b1 <= series.size(), "anomaly_normalize: bad baseline range");
    require(b1 - b0 >= 12, "anomaly_normalize: baseline shorter than 12 months");
    double mean = 0.0;
    for (size_t t = b0; t < b1; ++t) mean += series[t];
    mean /= double(b1 - b0);
    std::vector<double> out(series.size());
    for (size_t t = 0; t < series.size(); ++t) out[t] = series[t] - mean;
    return out;
}

ScalingParams minmax_fit(const std::vector<std::vector<double>>& channels,
                         const std::vector<size_t>& fit_subset) {
    require(!fit_subset.empty(), "minmax_fit: empty fit subset");
    ScalingParams p;
    for (size_t c = 0; c < channels.size(); ++c) {
        double lo = std::numeric_limits<double>::infinity();
        double hi = -lo;
        for (size_t s : fit_subset) {
            require(s < channels[c].size(), "minmax_fit: fit index out of range");
            lo = std::min(lo, channels[c][s]);
            hi = std::max(hi, channels[c][s]);
        }
        if (!(hi > lo))
            throw Error::validation("minmax_fit: channel " + std::to_string(c) +
                                    " is constant on the fit subset");
        p.min.push_back(lo);
        p.max.push_back(hi);
    }
    return p;
}

double minmax_transform_value(const ScalingParams& p, size_t channel, double x) {
    return (x - p.min[channel]) / (p.max[channel] - p.min[channel]);
}

double minmax_invert_value(const ScalingParams& p, size_t channel, double y) {
    return p.min[channel] + y * (p.max[channel] - p.min[channel]);
}

std::vector<std::vector<double>> minmax_transform(const ScalingParams& p,
                                                  const std::vector<std::vector<double>>& channels) {
    require(p.min.size() == channels.size(), "minmax_transform: channel count mismatch");
    auto out = channels;
    for (size_t c = 0; c < channels.size(); ++c)
        for (auto& x : out[c]) x = minmax_transform_value(p, c, x);
    return out;
}

std::vector<std::vector<double>> minmax_invert(const ScalingParams& p,
                                               const std::vector<std::vector<double>>& scaled) {
    require(p.min.size() == scaled.size(), "minmax_invert: channel count mismatch");
    auto out = scaled;
    for (size_t c = 0; c < scaled.size(); ++c)
        for (auto& y : out[c]) y = minmax_invert_value(p, c, y);
    return out;
}

} // namespace stkit::preprocess
