#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace stkit::geo {

struct GeoPoint {
    std::string id;
    double lon = 0.0;
    double lat = 0.0;
    double x = 0.0;
    double y = 0.0;
};

// Transverse Mercator on the WGS84 ellipsoid, UTM-style parameters.
// Kruger series in n to fourth order; good to well under a millimeter
// inside +-30 degrees of the central meridian.
std::pair<double, double> project(double lon, double lat, double central_meridian);
std::pair<double, double> unproject(double x, double y, double central_meridian);
GeoPoint make_point(std::string id, double lon, double lat, double central_meridian);

struct GridSpec {
    double lon_min = 0.0;
    double lat_min = 0.0;
    double cell_size = 0.25;
    size_t n_cols = 0;
    size_t n_rows = 0;

    double lon_max() const { return lon_min + cell_size * double(n_cols); }
    double lat_max() const { return lat_min + cell_size * double(n_rows); }
    // half-open cells: [edge, next_edge) on both axes
    std::optional<std::pair<size_t, size_t>> cell_of(double lon, double lat) const;
    std::pair<double, double> cell_center(size_t row, size_t col) const;
};

class MaskedGrid {
public:
    MaskedGrid() = default;
    MaskedGrid(size_t rows, size_t cols);

    size_t rows() const { return rows_; }
    size_t cols() const { return cols_; }
    size_t cell_count() const { return rows_ * cols_; }
    bool valid(size_t r, size_t c) const { return mask_[r * cols_ + c] != 0; }
    double at(size_t r, size_t c) const;
    void set(size_t r, size_t c, double v);
    void clear(size_t r, size_t c);
    size_t valid_count() const;

    const std::vector<double>& values_raw() const { return values_; }
    const std::vector<unsigned char>& mask_raw() const { return mask_; }

private:
    size_t rows_ = 0;
    size_t cols_ = 0;
    std::vector<double> values_;
    std::vector<unsigned char> mask_;
};

// closed ring of lon/lat vertices; no self-intersection handling beyond even-odd
struct Polygon {
    std::vector<std::pair<double, double>> ring;
    bool contains(double lon, double lat) const;
};

// true where the cell center falls inside the polygon
std::vector<unsigned char> polygon_cell_mask(const Polygon& poly, const GridSpec& grid);

} // namespace stkit::geo
