#include <doctest.h>

#include "stkit/common.hpp"
#include "stkit/preprocess.hpp"
#include "stkit/rng.hpp"

#include <cmath>
#include <numbers>
#include <vector>

using namespace stkit;
namespace pp = stkit::preprocess;

namespace {
std::vector<unsigned char> all_valid(size_t n) { return std::vector<unsigned char>(n, 1); }
}

TEST_CASE("segmentation finds a single step at the right month") {
    std::vector<double> v(120, 0.0);
    for (size_t t = 60; t < 120; ++t) v[t] = 10.0;
    // hand oracle with window 60: the only candidate is t=60; window means are
    // 0 and 10, the pooled sd over all 120 samples is sqrt(3000/119) ~ 5.02,
    // so z = 10*sqrt(30)/5.02 ~ 10.9
    auto b = pp::segment_series(v, all_valid(120), {60, 3.0});
    REQUIRE(b.size() == 1);
    CHECK(b[0] == 60);

    // smaller window: many candidates fire, the run collapses to one peak
    auto b2 = pp::segment_series(v, all_valid(120), {24, 4.0});
    REQUIRE(b2.size() == 1);
    CHECK(b2[0] == 60);
}

TEST_CASE("segmentation quiet cases") {
    std::vector<double> flat(100, 3.0);
    CHECK(pp::segment_series(flat, all_valid(100), {24, 3.0}).empty());

    std::vector<double> seasonal(120);
    for (size_t t = 0; t < 120; ++t)
        seasonal[t] = 4.0 * std::sin(2.0 * std::numbers::pi * double(t) / 12.0);
    CHECK(pp::segment_series(seasonal, all_valid(120), {24, 4.0}).empty());

    std::vector<double> shortone(40, 1.0);
    shortone[20] = 500.0;
    CHECK(pp::segment_series(shortone, all_valid(40), {24, 3.0}).empty());

    CHECK_THROWS_AS((void)pp::segment_series(flat, all_valid(100), {6, 3.0}), Error);
}

TEST_CASE("segmentation detects a variance change") {
    Rng rng(5150);
    std::vector<double> v(144);
    for (size_t t = 0; t < 72; ++t) v[t] = rng.normal() * 0.5;
    for (size_t t = 72; t < 144; ++t) v[t] = rng.normal() * 6.0;
    auto b = pp::segment_series(v, all_valid(144), {36, 4.0});
    REQUIRE(b.size() == 1);
    CHECK(b[0] >= 66);
    CHECK(b[0] <= 78);
}

TEST_CASE("segmentation false positive rate on stationary noise") {
    size_t with_boundary = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        Rng rng(40000 + trial);
        std::vector<double> v(120);
        for (auto& x : v) x = rng.normal();
        if (!pp::segment_series(v, all_valid(120), {12, 6.0}).empty()) ++with_boundary;
    }
    CHECK(with_boundary <= 10);
}

TEST_CASE("apply_segmentation splits wells and keep_best keeps the long half") {
    std::vector<geo::GeoPoint> pts(2);
    pts[0] = {"w1", 90.1, 23.3, 1000.0, 2000.0};
    pts[1] = {"w2", 90.2, 23.4, 3000.0, 4000.0};
    auto set = obs::PointObservationSet::create(pts, {2002, 4}, 120);
    for (size_t t = 0; t < 120; ++t) {
        set.set(0, t, t < 40 ? 0.0 + 0.01 * double(t % 7) : 25.0 + 0.01 * double(t % 7));
        set.set(1, t, 1.0);
    }
    auto segd = pp::apply_segmentation(set, {20, 4.0});
    REQUIRE(segd.n_points() == 3);
    CHECK(segd.points[0].id == "w1#1");
    CHECK(segd.points[1].id == "w1#2");
    CHECK(segd.points[2].id == "w2");
    // segment 1 holds months [0, 40), segment 2 the rest
    CHECK(segd.is_valid(0, 39));
    CHECK(!segd.is_valid(0, 40));
    CHECK(!segd.is_valid(1, 39));
    CHECK(segd.is_valid(1, 40));
    CHECK(segd.value(1, 40) == set.value(0, 40));

    auto best = pp::keep_best_segment_per_well(segd);
    REQUIRE(best.n_points() == 2);
    CHECK(best.points[0].id == "w1#2");
    CHECK(best.points[1].id == "w2");
    CHECK(best.points[0].x == 1000.0);
}

TEST_CASE("fill_gaps passthrough and preconditions") {
    Rng rng(9);
    std::vector<double> v(48);
    for (auto& x : v) x = rng.uniform(-2.0, 2.0);
    auto filled = pp::fill_gaps(v, all_valid(48), 4);
    CHECK(filled == v);

    std::vector<unsigned char> sparse(48, 0);
    for (size_t t = 0; t < 20; ++t) sparse[t] = 1;
    CHECK_THROWS_AS((void)pp::fill_gaps(v, sparse, 1), Error);

    // 24+ valid months but one calendar month never observed
    std::vector<unsigned char> nojan(48, 1);
    for (size_t t = 0; t < 48; t += 12) nojan[t] = 0;
    CHECK_THROWS_AS((void)pp::fill_gaps(v, nojan, 1), Error);
}

TEST_CASE("fill_gaps reproduces a pure seasonal cycle") {
    std::vector<double> v(60);
    for (size_t t = 0; t < 60; ++t)
        v[t] = 3.0 + 2.0 * std::sin(2.0 * std::numbers::pi * double(t) / 12.0);
    auto mask = all_valid(60);
    mask[25] = 0;
    mask[26] = 0;
    mask[40] = 0;
    auto filled = pp::fill_gaps(v, mask, 1);
    for (size_t t = 0; t < 60; ++t) CHECK(std::fabs(filled[t] - v[t]) < 1e-6);
}

TEST_CASE("fill_gaps with flat climatology reduces to linear interpolation") {
    std::vector<double> v(48, 6.0);
    auto mask = all_valid(48);
    mask[20] = 0;
    mask[21] = 0;
    auto filled = pp::fill_gaps(v, mask, 1);
    CHECK(filled[20] == doctest::Approx(6.0).epsilon(1e-12));
    CHECK(filled[21] == doctest::Approx(6.0).epsilon(1e-12));
}

TEST_CASE("fill_gaps trend gap matches the hand-worked oracle") {
    // v[t] = 0.5 t over 48 months, gap at t = 27 (month 4). Removing t = 27
    // leaves that month's climatology at 0.5*(3+15+39)/3 = 9.5. Neighbor
    // residuals: 13 - clim[3](=10) = 3 and 14 - clim[5](=11) = 3, so the
    // interpolated residual is 3 and the fill is 9.5 + 3 = 12.5.
    std::vector<double> v(48);
    for (size_t t = 0; t < 48; ++t) v[t] = 0.5 * double(t);
    auto mask = all_valid(48);
    mask[27] = 0;
    auto filled = pp::fill_gaps(v, mask, 1);
    CHECK(filled[27] == doctest::Approx(12.5).epsilon(1e-12));
    for (size_t t = 0; t < 48; ++t)
        if (mask[t]) CHECK(filled[t] == v[t]);
}

TEST_CASE("fill_gaps leading and trailing gaps use climatology") {
    std::vector<double> v(48);
    for (size_t t = 0; t < 48; ++t)
        v[t] = 5.0 + std::cos(2.0 * std::numbers::pi * double(t % 12) / 12.0);
    auto mask = all_valid(48);
    mask[0] = 0;
    mask[47] = 0;
    auto filled = pp::fill_gaps(v, mask, 1);
    // climatology of the remaining 3 copies of each month equals the cycle
    CHECK(filled[0] == doctest::Approx(v[0]).epsilon(1e-12));
    CHECK(filled[47] == doctest::Approx(v[47]).epsilon(1e-12));
}

TEST_CASE("gwl_to_gws sign and linearity") {
    std::vector<double> depth(10, 10.0);
    auto s = pp::gwl_to_gws(depth, 0.1);
    for (double x : s) CHECK(x == doctest::Approx(-1.0));

    std::vector<double> d2 = {10.0, 8.0};
    auto s2 = pp::gwl_to_gws(d2, 0.05);
    CHECK(s2[1] - s2[0] == doctest::Approx(0.1));

    Rng rng(33);
    std::vector<double> d3(20);
    for (auto& x : d3) x = rng.uniform(-4.0, 4.0);
    auto one = pp::gwl_to_gws(d3, 0.2);
    auto d3s = d3;
    for (auto& x : d3s) x *= 3.0;
    auto three = pp::gwl_to_gws(d3s, 0.2);
    for (size_t i = 0; i < 20; ++i) CHECK(three[i] == doctest::Approx(3.0 * one[i]));

    CHECK_THROWS_AS((void)pp::gwl_to_gws(depth, 0.0), Error);
    CHECK_THROWS_AS((void)pp::gwl_to_gws(depth, 1.5), Error);
}

TEST_CASE("anomaly_normalize centers on the baseline") {
    std::vector<double> v(36, 4.0);
    auto a = pp::anomaly_normalize(v, 0, 12);
    for (double x : a) CHECK(x == 0.0);

    std::vector<double> w(24);
    for (size_t t = 0; t < 24; ++t) w[t] = t < 12 ? 5.0 : 7.5;
    auto b = pp::anomaly_normalize(w, 0, 12);
    CHECK(b[20] == doctest::Approx(2.5));

    Rng rng(77);
    std::vector<double> r(40);
    for (auto& x : r) x = rng.uniform(0.0, 9.0);
    auto c = pp::anomaly_normalize(r, 0, 40);
    double sum = 0.0;
    for (double x : c) sum += x;
    CHECK(std::fabs(sum) < 1e-9);

    CHECK_THROWS_AS((void)pp::anomaly_normalize(w, 0, 8), Error);
}

TEST_CASE("minmax statistics come from the fit subset only") {
    std::vector<std::vector<double>> ch = {{0.0, 10.0, 20.0, 5.0}};
    auto p = pp::minmax_fit(ch, {0, 1});
    CHECK(pp::minmax_transform_value(p, 0, 5.0) == doctest::Approx(0.5));
    CHECK(pp::minmax_transform_value(p, 0, 20.0) == doctest::Approx(2.0));

    auto ch2 = ch;
    ch2[0][2] = -999.0; // outside the fit subset
    auto p2 = pp::minmax_fit(ch2, {0, 1});
    CHECK(p2.min[0] == p.min[0]);
    CHECK(p2.max[0] == p.max[0]);

    CHECK_THROWS_AS((void)pp::minmax_fit({{3.0, 3.0, 9.0}}, {0, 1}), Error);
    CHECK_THROWS_AS((void)pp::minmax_fit(ch, {}), Error);
}

TEST_CASE("minmax round trips") {
    Rng rng(15);
    std::vector<std::vector<double>> ch(3, std::vector<double>(50));
    for (auto& c : ch)
        for (auto& x : c) x = rng.uniform(-20.0, 40.0);
    std::vector<size_t> fit = {0, 3, 7, 11, 19, 30, 44};
    auto p = pp::minmax_fit(ch, fit);
    auto scaled = pp::minmax_transform(p, ch);
    for (size_t s : fit)
        for (size_t c = 0; c < 3; ++c) {
            CHECK(scaled[c][s] >= -1e-12);
            CHECK(scaled[c][s] <= 1.0 + 1e-12);
        }
    auto back = pp::minmax_invert(p, scaled);
    for (size_t c = 0; c < 3; ++c)
        for (size_t s = 0; s < 50; ++s) CHECK(back[c][s] == doctest::Approx(ch[c][s]).epsilon(1e-12));
}
