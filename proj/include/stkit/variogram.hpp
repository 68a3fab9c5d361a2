#pragma once

#include "stkit/geo.hpp"

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace stkit::vario {

enum class Family { spherical, exponential, gaussian };

Family family_from_string(const std::string& s);
std::string to_string(Family f);

struct Model {
    Family family = Family::exponential;
    double nugget = 0.0;
    double partial_sill = 1.0;
    double range = 1.0; // meters, practical range

    double sill() const { return nugget + partial_sill; }
};

// gamma(0) = 0 exactly; the nugget appears as the h->0+ limit.
// exponential and gaussian use the practical-range scaling (factor 3),
// so gamma(range) is about 95% of the sill.
double gamma(const Model& m, double h);
void gamma_batch(const Model& m, const double* h, double* out, size_t n);

struct Empirical {
    std::vector<double> bin_centers;   // mean pair distance per bin
    std::vector<double> semivariance;
    std::vector<size_t> pair_counts;

    size_t n_bins() const { return bin_centers.size(); }
};

// equal-width bins on [0, max_lag]; pairs with distance > max_lag discarded;
// empty bins removed from the result
Empirical empirical_variogram(std::span<const geo::GeoPoint> pts,
                              std::span<const double> values, size_t n_bins,
                              double max_lag);

// pools squared differences across several value vectors over the same points
// (one vector per timestep) before binning
Empirical empirical_variogram_pooled(std::span<const geo::GeoPoint> pts,
                                     const std::vector<std::vector<double>>& value_sets,
                                     size_t n_bins, double max_lag);

// like the pooled form, but a pair contributes at timestep t only when both
// stations are flagged valid there; invalid slots are never read
Empirical empirical_variogram_masked(std::span<const geo::GeoPoint> pts,
                                     const std::vector<std::vector<double>>& value_sets,
                                     const std::vector<std::vector<unsigned char>>& valid_sets,
                                     size_t n_bins, double max_lag);

// half the maximum pairwise distance: the default max_lag
double default_max_lag(std::span<const geo::GeoPoint> pts);

// config-format round trip: "family nugget partial_sill range", bit exact
std::string to_config(const Model& m);
Model model_from_config(const std::string& s);

struct FitResult {
    Model model;
    double objective = 0.0;
    bool degenerate = false;
};

// Cressie-weighted least squares via deterministic multi-start Nelder-Mead
FitResult fit(const Empirical& emp, Family family);

} // namespace stkit::vario
