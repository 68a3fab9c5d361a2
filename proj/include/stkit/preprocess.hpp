#pragma once

#include "stkit/observations.hpp"

#include <cstddef>
#include <vector>

namespace stkit::preprocess {

struct SegmentOptions {
    size_t window = 24;      // rolling window, months
    double z_threshold = 4.0;
};

// Detect suspected record changes: indices t where the series splits into
// [.., t) and [t, ..). A candidate boundary compares the windows left and
// right of t via mean-shift and sd-shift statistics, each scaled to be
// roughly standard normal for stationary noise. Runs above the threshold
// collapse to their peak, so one change yields one boundary; sd boundaries
// within one window of a mean boundary are treated as echoes of that mean
// change. Series shorter than two windows pass through.
std::vector<size_t> segment_series(const std::vector<double>& values,
                                   const std::vector<unsigned char>& valid,
                                   const SegmentOptions& opt);

// Split wells at detected boundaries. A split well becomes one well per
// segment with "#1", "#2", ... appended to the id; values outside the
// segment are invalidated. Unsplit wells pass through untouched.
obs::PointObservationSet apply_segmentation(const obs::PointObservationSet& in,
                                            const SegmentOptions& opt);

// Keep one segment per original well: the one with the most valid months
// (ties go to the later segment). Restores unique station coordinates after
// apply_segmentation.
obs::PointObservationSet keep_best_segment_per_well(const obs::PointObservationSet& in);

// Fill missing months. Monthly climatology (mean per calendar month over
// valid values) carries the seasonal part; the deseasonalized remainder is
// linearly interpolated between the nearest valid months, and is zero before
// the first and after the last valid month. Valid entries pass through
// bit-exact. month0 is the calendar month (1..12) of index 0.
// Requires >= 24 valid months and at least one valid value in every
// calendar month; otherwise throws a validation error so the caller can
// exclude the series.
std::vector<double> fill_gaps(const std::vector<double>& values,
                              const std::vector<unsigned char>& valid, int month0);

// storage change in meters of water: storage[t] = -sy * depth[t]
// (depth to water grows as storage shrinks)
std::vector<double> gwl_to_gws(const std::vector<double>& depth, double sy);

// subtract the mean over the baseline index range [b0, b1)
std::vector<double> anomaly_normalize(const std::vector<double>& series, size_t b0, size_t b1);

struct ScalingParams {
    std::vector<double> min;
    std::vector<double> max;
};

// Per-channel min-max statistics over fit_subset only; transform is affine
// with no clamping, so out-of-range inputs map outside [0, 1].
ScalingParams minmax_fit(const std::vector<std::vector<double>>& channels,
                         const std::vector<size_t>& fit_subset);
std::vector<std::vector<double>> minmax_transform(const ScalingParams& p,
                                                  const std::vector<std::vector<double>>& channels);
std::vector<std::vector<double>> minmax_invert(const ScalingParams& p,
                                               const std::vector<std::vector<double>>& scaled);
double minmax_transform_value(const ScalingParams& p, size_t channel, double x);
double minmax_invert_value(const ScalingParams& p, size_t channel, double y);

} // namespace stkit::preprocess
