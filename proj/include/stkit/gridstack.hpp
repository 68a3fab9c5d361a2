#pragma once

#include "stkit/geo.hpp"

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace stkit::gridio {

// In-memory stack of gridded predictor channels: T timesteps x C channels x
// H rows x W cols, float32 storage, quiet NaN marks missing cells.
struct GridStack {
    uint32_t n_t = 0, n_c = 0, n_h = 0, n_w = 0;
    std::vector<std::string> channel_names;
    std::vector<float> data; // t-major, then c, h, w

    size_t index(size_t t, size_t c, size_t h, size_t w) const {
        return ((t * n_c + c) * n_h + h) * n_w + w;
    }
    float at(size_t t, size_t c, size_t h, size_t w) const { return data[index(t, c, h, w)]; }
    void set(size_t t, size_t c, size_t h, size_t w, float v) { data[index(t, c, h, w)] = v; }

    static GridStack create(uint32_t t, uint32_t c, uint32_t h, uint32_t w,
                            std::vector<std::string> names);

    // channel c at timestep t as a masked grid (NaN cells masked)
    geo::MaskedGrid layer(size_t t, size_t c) const;
    void set_layer(size_t t, size_t c, const geo::MaskedGrid& g);

    int channel_index(const std::string& name) const; // -1 when absent
};

// Binary container: magic "GSTK", version, dims, channel-name table, then
// the float32 little-endian payload. Round trips are bit-exact, NaN included.
void write_grids(const GridStack& s, const std::string& path);
GridStack read_grids(const std::string& path);

} // namespace stkit::gridio
