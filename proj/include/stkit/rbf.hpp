#pragma once

#include <cstddef>
#include <vector>

namespace stkit::rbf {

// Multi-resolution Gaussian radial basis embedding over [0, 1]^D. Each level
// lays an m^D tensor grid of centers with spacing 1/(m-1) and bandwidth
// bandwidth_scale * spacing; levels are concatenated coarse to fine.
// phi_k(u) = exp(-|u - c_k|^2 / (2 bw_k^2)), so phi = 1 exactly at a center
// and phi = e^-1 at distance bw*sqrt(2).
struct Embedding {
    size_t dims = 0;
    std::vector<double> centers;    // K x dims, row-major
    std::vector<double> bandwidths; // K

    size_t size() const { return bandwidths.size(); }
    std::vector<double> embed(const std::vector<double>& u) const;
    void embed_into(const double* u, double* out) const;
};

Embedding make_embedding(size_t dims, const std::vector<size_t>& level_counts,
                         double bandwidth_scale = 1.0);

} // namespace stkit::rbf
