#pragma once

#include "stkit/cv.hpp"
#include "stkit/metrics.hpp"

#include <string>
#include <vector>

namespace stkit::report {

// long format, one line per metric: fold,predictor,role,split,metric,value
std::string long_csv(const metrics::MetricsReport& r);

// cross-fold aggregate: predictor,role,split,metric,mean,std,n_folds
std::string summary_csv(const metrics::MetricsReport& r);

// fold,predictor,message (message quoted if it contains commas)
std::string failures_csv(const std::vector<cv::FoldFailure>& failures);

struct Series {
    std::string label;
    std::vector<double> values; // NaN breaks the polyline
};

// fixed-geometry line chart over the time index; every coordinate is
// printed with a fixed format so identical inputs give identical bytes
std::string timeseries_svg(const std::string& title, const std::vector<Series>& series);

struct BoxStats {
    std::string label;
    double lo = 0.0, q1 = 0.0, median = 0.0, q3 = 0.0, hi = 0.0;
};

// whiskers at min/max, box at the linearly interpolated quartiles
BoxStats box_stats(const std::string& label, std::vector<double> samples);

std::string boxplot_svg(const std::string& title, const std::vector<BoxStats>& boxes);

void write_text(const std::string& body, const std::string& path);

} // namespace stkit::report
