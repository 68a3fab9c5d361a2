#include "stkit/report.hpp"

#include "stkit/common.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

namespace stkit::report {

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string fmt2(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"') out += '"';
        out += ch;
    }
    out += '"';
    return out;
}

std::string xml_escape(const std::string& s) {
    std::string out;
    for (char ch : s) {
        switch (ch) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        default: out += ch;
        }
    }
    return out;
}

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                    "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};
constexpr size_t kPaletteSize = sizeof kPalette / sizeof kPalette[0];

constexpr double kWidth = 880.0, kHeight = 460.0;
constexpr double kLeft = 64.0, kRight = 20.0, kTop = 44.0, kBottom = 44.0;

struct YScale {
    double lo, hi;
    double y(double v) const {
        return kHeight - kBottom - (v - lo) / (hi - lo) * (kHeight - kTop - kBottom);
    }
};

YScale make_scale(double lo, double hi) {
    if (!(hi > lo)) {
        lo -= 0.5;
        hi += 0.5;
    }
    const double pad = 0.05 * (hi - lo);
    return {lo - pad, hi + pad};
}

void draw_frame(std::ostringstream& svg, const std::string& title, const YScale& ys) {
    svg << "<rect x=\"0\" y=\"0\" width=\"" << kWidth << "\" height=\"" << kHeight
        << "\" fill=\"white\"/>\n";
    svg << "<text x=\"" << kLeft << "\" y=\"24\" font-family=\"sans-serif\" "
           "font-size=\"15\" fill=\"#333\">"
        << xml_escape(title) << "</text>\n";
    for (int i = 0; i <= 4; ++i) {
        const double v = ys.lo + (ys.hi - ys.lo) * i / 4.0;
        const double yy = ys.y(v);
        svg << "<line x1=\"" << fmt2(kLeft) << "\" y1=\"" << fmt2(yy) << "\" x2=\""
            << fmt2(kWidth - kRight) << "\" y2=\"" << fmt2(yy)
            << "\" stroke=\"#ddd\" stroke-width=\"1\"/>\n";
        char lab[32];
        std::snprintf(lab, sizeof lab, "%.3g", v);
        svg << "<text x=\"" << fmt2(kLeft - 8) << "\" y=\"" << fmt2(yy + 4)
            << "\" font-family=\"sans-serif\" font-size=\"11\" fill=\"#666\" "
               "text-anchor=\"end\">"
            << lab << "</text>\n";
    }
    svg << "<line x1=\"" << fmt2(kLeft) << "\" y1=\"" << fmt2(kTop) << "\" x2=\""
        << fmt2(kLeft) << "\" y2=\"" << fmt2(kHeight - kBottom)
        << "\" stroke=\"#333\" stroke-width=\"1\"/>\n";
    svg << "<line x1=\"" << fmt2(kLeft) << "\" y1=\"" << fmt2(kHeight - kBottom)
        << "\" x2=\"" << fmt2(kWidth - kRight) << "\" y2=\"" << fmt2(kHeight - kBottom)
        << "\" stroke=\"#333\" stroke-width=\"1\"/>\n";
}

} // namespace

std::string long_csv(const metrics::MetricsReport& r) {
    std::ostringstream out;
    out << "fold,predictor,role,split,metric,value\n";
    for (const auto& row : r.rows) {
        const std::string head = std::to_string(row.fold) + "," +
                                 csv_field(row.predictor) + "," + row.role + "," +
                                 row.split + ",";
        out << head << "r2," << fmt(row.r2) << "\n";
        out << head << "mse," << fmt(row.mse) << "\n";
        out << head << "n," << row.n << "\n";
    }
    return out.str();
}

std::string summary_csv(const metrics::MetricsReport& r) {
    std::ostringstream out;
    out << "predictor,role,split,metric,mean,std,n_folds\n";
    for (const auto& s : r.summary) {
        const std::string head =
            csv_field(s.predictor) + "," + s.role + "," + s.split + ",";
        out << head << "r2," << fmt(s.r2_mean) << "," << fmt(s.r2_std) << ","
            << s.n_folds << "\n";
        out << head << "mse," << fmt(s.mse_mean) << "," << fmt(s.mse_std) << ","
            << s.n_folds << "\n";
    }
    return out.str();
}

std::string failures_csv(const std::vector<cv::FoldFailure>& failures) {
    std::ostringstream out;
    out << "fold,predictor,message\n";
    for (const auto& f : failures)
        out << f.fold << "," << csv_field(f.predictor) << "," << csv_field(f.message)
            << "\n";
    return out.str();
}

std::string timeseries_svg(const std::string& title, const std::vector<Series>& series) {
    require(!series.empty(), "timeseries plot: no series");
    size_t T = 0;
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (const auto& s : series) {
        T = std::max(T, s.values.size());
        for (double v : s.values)
            if (std::isfinite(v)) {
                lo = std::min(lo, v);
                hi = std::max(hi, v);
            }
    }
    require(T > 0 && std::isfinite(lo), "timeseries plot: no finite values");
    const YScale ys = make_scale(lo, hi);
    const double xstep = (kWidth - kLeft - kRight) / double(T > 1 ? T - 1 : 1);
    auto xat = [&](size_t t) { return kLeft + xstep * double(t); };

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth
        << "\" height=\"" << kHeight << "\" viewBox=\"0 0 " << kWidth << " " << kHeight
        << "\">\n";
    draw_frame(svg, title, ys);

    const size_t tick = std::max<size_t>(1, T / 8);
    for (size_t t = 0; t < T; t += tick)
        svg << "<text x=\"" << fmt2(xat(t)) << "\" y=\"" << fmt2(kHeight - kBottom + 16)
            << "\" font-family=\"sans-serif\" font-size=\"11\" fill=\"#666\" "
               "text-anchor=\"middle\">"
            << t << "</text>\n";

    for (size_t s = 0; s < series.size(); ++s) {
        const char* color = kPalette[s % kPaletteSize];
        const auto& v = series[s].values;
        std::vector<std::pair<double, double>> seg;
        auto emit_seg = [&]() {
            if (seg.empty()) return;
            if (seg.size() == 1) {
                svg << "<circle cx=\"" << fmt2(seg[0].first) << "\" cy=\""
                    << fmt2(seg[0].second) << "\" r=\"2.5\" fill=\"" << color
                    << "\"/>\n";
            } else {
                svg << "<polyline points=\"";
                for (size_t i = 0; i < seg.size(); ++i) {
                    if (i) svg << " ";
                    svg << fmt2(seg[i].first) << "," << fmt2(seg[i].second);
                }
                svg << "\" fill=\"none\" stroke=\"" << color
                    << "\" stroke-width=\"1.5\"/>\n";
            }
            seg.clear();
        };
        for (size_t t = 0; t < v.size(); ++t) {
            if (std::isfinite(v[t]))
                seg.emplace_back(xat(t), ys.y(v[t]));
            else
                emit_seg();
        }
        emit_seg();

        const double lx = kLeft + 8 + 150.0 * double(s % 5);
        const double ly = kTop - 8 - 14.0 * double(s / 5);
        svg << "<text x=\"" << fmt2(lx) << "\" y=\"" << fmt2(ly)
            << "\" font-family=\"sans-serif\" font-size=\"12\" fill=\"" << color << "\">"
            << xml_escape(series[s].label) << "</text>\n";
    }
    svg << "</svg>\n";
    return svg.str();
}

BoxStats box_stats(const std::string& label, std::vector<double> samples) {
    samples.erase(std::remove_if(samples.begin(), samples.end(),
                                 [](double v) { return !std::isfinite(v); }),
                  samples.end());
    require(!samples.empty(), "box stats: no finite samples for " + label);
    std::sort(samples.begin(), samples.end());
    auto quantile = [&](double q) {
        const double pos = q * double(samples.size() - 1);
        const size_t i = size_t(pos);
        const double frac = pos - double(i);
        if (i + 1 >= samples.size()) return samples.back();
        return samples[i] * (1.0 - frac) + samples[i + 1] * frac;
    };
    BoxStats b;
    b.label = label;
    b.lo = samples.front();
    b.q1 = quantile(0.25);
    b.median = quantile(0.5);
    b.q3 = quantile(0.75);
    b.hi = samples.back();
    return b;
}

std::string boxplot_svg(const std::string& title, const std::vector<BoxStats>& boxes) {
    require(!boxes.empty(), "box plot: no boxes");
    double lo = boxes[0].lo, hi = boxes[0].hi;
    for (const auto& b : boxes) {
        lo = std::min(lo, b.lo);
        hi = std::max(hi, b.hi);
    }
    const YScale ys = make_scale(lo, hi);

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth
        << "\" height=\"" << kHeight << "\" viewBox=\"0 0 " << kWidth << " " << kHeight
        << "\">\n";
    draw_frame(svg, title, ys);

    const double span = kWidth - kLeft - kRight;
    const double slot = span / double(boxes.size());
    const double half = std::min(30.0, slot * 0.3);
    for (size_t i = 0; i < boxes.size(); ++i) {
        const auto& b = boxes[i];
        const char* color = kPalette[i % kPaletteSize];
        const double cx = kLeft + slot * (double(i) + 0.5);
        svg << "<line x1=\"" << fmt2(cx) << "\" y1=\"" << fmt2(ys.y(b.lo)) << "\" x2=\""
            << fmt2(cx) << "\" y2=\"" << fmt2(ys.y(b.hi)) << "\" stroke=\"" << color
            << "\" stroke-width=\"1\"/>\n";
        for (double v : {b.lo, b.hi})
            svg << "<line x1=\"" << fmt2(cx - half * 0.5) << "\" y1=\"" << fmt2(ys.y(v))
                << "\" x2=\"" << fmt2(cx + half * 0.5) << "\" y2=\"" << fmt2(ys.y(v))
                << "\" stroke=\"" << color << "\" stroke-width=\"1\"/>\n";
        svg << "<rect x=\"" << fmt2(cx - half) << "\" y=\"" << fmt2(ys.y(b.q3))
            << "\" width=\"" << fmt2(2 * half) << "\" height=\""
            << fmt2(ys.y(b.q1) - ys.y(b.q3)) << "\" fill=\"" << color
            << "\" fill-opacity=\"0.25\" stroke=\"" << color << "\"/>\n";
        svg << "<line x1=\"" << fmt2(cx - half) << "\" y1=\"" << fmt2(ys.y(b.median))
            << "\" x2=\"" << fmt2(cx + half) << "\" y2=\"" << fmt2(ys.y(b.median))
            << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
        svg << "<text x=\"" << fmt2(cx) << "\" y=\"" << fmt2(kHeight - kBottom + 16)
            << "\" font-family=\"sans-serif\" font-size=\"11\" fill=\"#333\" "
               "text-anchor=\"middle\">"
            << xml_escape(b.label) << "</text>\n";
    }
    svg << "</svg>\n";
    return svg.str();
}

void write_text(const std::string& body, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error::runtime("cannot write " + path);
    out << body;
    if (!out) throw Error::runtime("write failed: " + path);
}

} // namespace stkit::report
