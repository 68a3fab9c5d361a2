#include "stkit/rbf.hpp"

#include "stkit/common.hpp"

#include <cmath>

namespace stkit::rbf {

Embedding make_embedding(size_t dims, const std::vector<size_t>& level_counts,
                         double bandwidth_scale) {
    require(dims >= 1, "rbf: dims must be >= 1");
    require(!level_counts.empty(), "rbf: need at least one level");
    require(bandwidth_scale > 0.0, "rbf: bandwidth scale must be positive");
    Embedding e;
    e.dims = dims;
    for (size_t m : level_counts) {
        require(m >= 2, "rbf: each level needs at least 2 centers per axis");
        const double spacing = 1.0 / double(m - 1);
        const double bw = bandwidth_scale * spacing;
        size_t total = 1;
        for (size_t d = 0; d < dims; ++d) total *= m;
        for (size_t k = 0; k < total; ++k) {
            size_t rem = k;
            // first axis varies fastest
            for (size_t d = 0; d < dims; ++d) {
                e.centers.push_back(double(rem % m) * spacing);
                rem /= m;
            }
            e.bandwidths.push_back(bw);
        }
    }
    return e;
}

void Embedding::embed_into(const double* u, double* out) const {
    const size_t K = size();
    for (size_t k = 0; k < K; ++k) {
        double d2 = 0.0;
        const double* c = centers.data() + k * dims;
        for (size_t d = 0; d < dims; ++d) {
            const double diff = u[d] - c[d];
            d2 += diff * diff;
        }
        out[k] = std::exp(-d2 / (2.0 * bandwidths[k] * bandwidths[k]));
    }
}

std::vector<double> Embedding::embed(const std::vector<double>& u) const {
    require(u.size() == dims, "rbf: coordinate dimension mismatch");
    for (double x : u) require(std::isfinite(x), "rbf: non-finite coordinate");
    std::vector<double> out(size());
    embed_into(u.data(), out.data());
    return out;
}

} // namespace stkit::rbf
