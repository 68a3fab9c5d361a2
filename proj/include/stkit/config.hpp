#pragma once

#include "stkit/cv.hpp"
#include "stkit/geo.hpp"
#include "stkit/kriging.hpp"
#include "stkit/metrics.hpp"
#include "stkit/observations.hpp"
#include "stkit/preprocess.hpp"

#include <optional>
#include <string>

namespace stkit::config {

// One run, one file: flat key = value lines, '#' comments, unknown keys are
// errors. Every effective setting lands in the run manifest.
struct RunConfig {
    std::string points_path;
    std::string grids_path;
    std::string storage_path;
    std::string polygon_path;

    double central_meridian = 90.0;

    std::optional<geo::GridSpec> grid;

    // anomaly baseline, half open [begin, end)
    std::optional<obs::MonthStamp> baseline_begin;
    std::optional<obs::MonthStamp> baseline_end;

    preprocess::SegmentOptions segment;
    bool fill_gaps = true;

    // holdout/fold geometry, seed, predictor roster, variogram family + bins
    cv::ExperimentConfig cv;

    metrics::CompositeLossConfig loss;

    double variogram_max_lag = 0.0; // 0 = half the max pairwise distance

    bool kriging_local = false;
    krige::LocalParams local;
};

// parse_file also requires every referenced path to exist
RunConfig parse_text(const std::string& text, const std::string& origin);
RunConfig parse_file(const std::string& path);

// Effective settings in fixed order plus the standing method notes
// (deviation.* keys). No timestamps, so identical runs write identical
// manifests. The text is itself parseable as a config.
std::string manifest_text(const RunConfig& cfg);
void write_manifest(const RunConfig& cfg, const std::string& path);

} // namespace stkit::config
