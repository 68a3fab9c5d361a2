#pragma once

#include "stkit/geo.hpp"
#include "stkit/solver.hpp"
#include "stkit/variogram.hpp"

#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <vector>

namespace stkit::krige {

struct Estimate {
    double value = 0.0;
    double variance = 0.0;
    std::vector<double> weights; // filled only on request
};

struct LocalParams {
    size_t max_neighbors = 25;
    double search_radius = std::numeric_limits<double>::infinity();
};

// Ordinary kriging over a fixed station set. The augmented system
//   [ G  1 ] [ w  ]   [ g* ]
//   [ 1' 0 ] [ mu ] = [ 1  ]
// is factorized once in global mode and reused for every target and timestep.
class System {
public:
    static System build(std::vector<geo::GeoPoint> points, vario::Model model);
    static System build_local(std::vector<geo::GeoPoint> points, vario::Model model,
                              LocalParams params);

    size_t n_stations() const { return pts_.size(); }
    bool is_local() const { return local_.has_value(); }
    const std::vector<geo::GeoPoint>& stations() const { return pts_; }
    const vario::Model& model() const { return model_; }

    // weights and lagrange multiplier for one target location
    struct Plan {
        std::vector<double> weights;
        std::vector<size_t> station_idx; // global mode: 0..n-1
        double mu = 0.0;
        double variance = 0.0; // depends on geometry only
    };
    Plan plan_target(double x, double y) const;

    Estimate krige_point(std::span<const double> values, double x, double y,
                         bool want_weights = false) const;

    // nearest stations by projected distance, ties broken by id
    std::vector<size_t> local_neighbors(double x, double y) const;

private:
    System() = default;
    std::vector<geo::GeoPoint> pts_;
    std::vector<double> xs_, ys_;
    vario::Model model_;
    std::optional<LocalParams> local_;
    std::optional<solver::LdltFactor> factor_; // global mode only
};

struct GridResult {
    std::vector<geo::MaskedGrid> values;    // one per timestep
    std::vector<geo::MaskedGrid> variances; // same layout
};

// kriges every cell center for every timestep; cells outside the study-area
// polygon (if given) are masked out, as are cells a local search cannot serve.
// central_meridian must match the one used to project the station coordinates.
GridResult krige_grid(const System& sys,
                      const std::vector<std::vector<double>>& values_per_t,
                      const geo::GridSpec& grid, double central_meridian,
                      const geo::Polygon* study_area);

// inverse-distance-weighted baseline over the same stations
double idw_point(std::span<const geo::GeoPoint> pts, std::span<const double> values,
                 double x, double y, double power);

} // namespace stkit::krige
