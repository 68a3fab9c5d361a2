#include "stkit/geo.hpp"

#include "stkit/common.hpp"

#include <cmath>
#include <limits>

namespace stkit::geo {

namespace {

constexpr double kA = 6378137.0;
constexpr double kF = 1.0 / 298.257223563;
constexpr double kK0 = 0.9996;
constexpr double kFalseEasting = 500000.0;
constexpr double kDeg = 3.14159265358979323846 / 180.0;

// third flattening and derived series coefficients
constexpr double kN = kF / (2.0 - kF);
const double kN2 = kN * kN;
const double kN3 = kN2 * kN;
const double kN4 = kN2 * kN2;
const double kRectA = kA / (1.0 + kN) * (1.0 + kN2 / 4.0 + kN4 / 64.0);
const double kE = std::sqrt(kF * (2.0 - kF));

const double kAlpha[4] = {
    kN / 2.0 - 2.0 / 3.0 * kN2 + 5.0 / 16.0 * kN3 + 41.0 / 180.0 * kN4,
    13.0 / 48.0 * kN2 - 3.0 / 5.0 * kN3 + 557.0 / 1440.0 * kN4,
    61.0 / 240.0 * kN3 - 103.0 / 140.0 * kN4,
    49561.0 / 161280.0 * kN4,
};
const double kBeta[4] = {
    kN / 2.0 - 2.0 / 3.0 * kN2 + 37.0 / 96.0 * kN3 - 1.0 / 360.0 * kN4,
    1.0 / 48.0 * kN2 + 1.0 / 15.0 * kN3 - 437.0 / 1440.0 * kN4,
    17.0 / 480.0 * kN3 - 37.0 / 840.0 * kN4,
    4397.0 / 161280.0 * kN4,
};

void check_domain(double lon, double lat, double central_meridian) {
    require(lat > -80.0 && lat < 84.0, "projection latitude outside (-80, 84)");
    double dl = lon - central_meridian;
    require(std::fabs(dl) <= 30.0, "longitude more than 30 degrees from central meridian");
    require(lon >= -180.0 && lon <= 180.0, "longitude outside [-180, 180]");
}

} // namespace

std::pair<double, double> project(double lon, double lat, double central_meridian) {
    check_domain(lon, lat, central_meridian);

    const double phi = lat * kDeg;
    const double dlam = (lon - central_meridian) * kDeg;

    // conformal latitude via exact formula
    const double sphi = std::sin(phi);
    const double t = std::sinh(std::asinh(std::tan(phi)) - kE * std::atanh(kE * sphi));

    const double xi0 = std::atan2(t, std::cos(dlam));
    const double eta0 = std::asinh(std::sin(dlam) / std::sqrt(t * t + std::cos(dlam) * std::cos(dlam)));

    double xi = xi0;
    double eta = eta0;
    for (int j = 0; j < 4; ++j) {
        const double a2j = 2.0 * double(j + 1);
        xi += kAlpha[j] * std::sin(a2j * xi0) * std::cosh(a2j * eta0);
        eta += kAlpha[j] * std::cos(a2j * xi0) * std::sinh(a2j * eta0);
    }

    const double easting = kFalseEasting + kK0 * kRectA * eta;
    const double northing = kK0 * kRectA * xi;
    return {easting, northing};
}

std::pair<double, double> unproject(double x, double y, double central_meridian) {
    const double eta = (x - kFalseEasting) / (kK0 * kRectA);
    const double xi = y / (kK0 * kRectA);

    double xi0 = xi;
    double eta0 = eta;
    for (int j = 0; j < 4; ++j) {
        const double a2j = 2.0 * double(j + 1);
        xi0 -= kBeta[j] * std::sin(a2j * xi) * std::cosh(a2j * eta);
        eta0 -= kBeta[j] * std::cos(a2j * xi) * std::sinh(a2j * eta);
    }

    const double t = std::sin(xi0) / std::sqrt(std::sinh(eta0) * std::sinh(eta0) +
                                               std::cos(xi0) * std::cos(xi0));
    const double dlam = std::atan2(std::sinh(eta0), std::cos(xi0));

    // invert the conformal latitude by fixed point; contraction factor ~e^2
    double phi = std::atan(t);
    const double asinh_t = std::asinh(t);
    for (int it = 0; it < 12; ++it) {
        phi = std::atan(std::sinh(asinh_t + kE * std::atanh(kE * std::sin(phi))));
    }

    return {central_meridian + dlam / kDeg, phi / kDeg};
}

GeoPoint make_point(std::string id, double lon, double lat, double central_meridian) {
    auto [x, y] = project(lon, lat, central_meridian);
    return GeoPoint{std::move(id), lon, lat, x, y};
}

std::optional<std::pair<size_t, size_t>> GridSpec::cell_of(double lon, double lat) const {
    const double fc = std::floor((lon - lon_min) / cell_size);
    const double fr = std::floor((lat - lat_min) / cell_size);
    if (fc < 0.0 || fr < 0.0 || fc >= double(n_cols) || fr >= double(n_rows))
        return std::nullopt;
    return std::make_pair(size_t(fr), size_t(fc));
}

std::pair<double, double> GridSpec::cell_center(size_t row, size_t col) const {
    return {lon_min + (double(col) + 0.5) * cell_size,
            lat_min + (double(row) + 0.5) * cell_size};
}

MaskedGrid::MaskedGrid(size_t rows, size_t cols)
    : rows_(rows), cols_(cols),
      values_(rows * cols, std::numeric_limits<double>::quiet_NaN()),
      mask_(rows * cols, 0) {}

double MaskedGrid::at(size_t r, size_t c) const {
    require(r < rows_ && c < cols_, "MaskedGrid: index out of range");
    require(mask_[r * cols_ + c] != 0, "MaskedGrid: access to masked cell");
    return values_[r * cols_ + c];
}

void MaskedGrid::set(size_t r, size_t c, double v) {
    require(r < rows_ && c < cols_, "MaskedGrid: index out of range");
    values_[r * cols_ + c] = v;
    mask_[r * cols_ + c] = 1;
}

void MaskedGrid::clear(size_t r, size_t c) {
    require(r < rows_ && c < cols_, "MaskedGrid: index out of range");
    values_[r * cols_ + c] = std::numeric_limits<double>::quiet_NaN();
    mask_[r * cols_ + c] = 0;
}

size_t MaskedGrid::valid_count() const {
    size_t n = 0;
    for (auto b : mask_) n += b != 0;
    return n;
}

bool Polygon::contains(double lon, double lat) const {
    bool inside = false;
    const size_t n = ring.size();
    for (size_t i = 0, j = n - 1; i < n; j = i++) {
        const auto [xi, yi] = ring[i];
        const auto [xj, yj] = ring[j];
        if ((yi > lat) != (yj > lat)) {
            const double xcross = xj + (lat - yj) / (yi - yj) * (xi - xj);
            if (lon < xcross) inside = !inside;
        }
    }
    return inside;
}

std::vector<unsigned char> polygon_cell_mask(const Polygon& poly, const GridSpec& grid) {
    std::vector<unsigned char> mask(grid.n_rows * grid.n_cols, 0);
    for (size_t r = 0; r < grid.n_rows; ++r)
        for (size_t c = 0; c < grid.n_cols; ++c) {
            auto [lon, lat] = grid.cell_center(r, c);
            mask[r * grid.n_cols + c] = poly.contains(lon, lat) ? 1 : 0;
        }
    return mask;
}

} // namespace stkit::geo
