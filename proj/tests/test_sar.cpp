#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "vinesar/sar.hpp"

using namespace vinesar;
using namespace vinesar::sar;

namespace {

GridSpec grid(int w, int h) { return {w, h, 0.0, 0.0, 5.0, -20.0, "EPSG:32632"}; }

}  // namespace

TEST(Eigen, HandExamples) {
    auto e = eigen_decompose(2, 2, 0, 0);
    EXPECT_DOUBLE_EQ(e.lambda1, 2.0);
    EXPECT_DOUBLE_EQ(e.lambda2, 2.0);
    e = eigen_decompose(1, 1, 1, 0);
    EXPECT_DOUBLE_EQ(e.lambda1, 2.0);
    EXPECT_EQ(e.lambda2, 0.0);
    e = eigen_decompose(1, 0.5, 0, 0);
    EXPECT_DOUBLE_EQ(e.lambda1, 1.0);
    EXPECT_DOUBLE_EQ(e.lambda2, 0.5);
    e = eigen_decompose(0.5, 1, 0, 0);
    EXPECT_DOUBLE_EQ(e.lambda1, 1.0);
    EXPECT_DOUBLE_EQ(e.lambda2, 0.5);
}

TEST(Eigen, ErrorsAndNoiseClamp) {
    EXPECT_THROW(eigen_decompose(NAN, 1, 0, 0), std::domain_error);
    EXPECT_THROW(eigen_decompose(1, 1, 2, 0), std::domain_error);  // det = -3
    EXPECT_THROW(eigen_decompose(-1, 0, 0, 0), std::domain_error);
    // Float noise in a rank-one matrix: det slightly negative, within tolerance.
    const auto e = eigen_decompose(1.0, 1.0, 1.0 + 1e-9, 0.0);
    EXPECT_EQ(e.lambda2, 0.0);
    EXPECT_NEAR(e.lambda1, 2.0, 1e-8);
}

TEST(Eigen, SumAndProductMatchTraceAndDet) {
    std::mt19937_64 rng(5);
    for (int i = 0; i < 20000; ++i) {
        double l1, l2;
        const auto c = oracle::random_psd(rng, &l1, &l2);
        if (l2 < 1e-4 * l1) continue;  // keep away from the rank-one snap
        const auto e = eigen_decompose(c.c11, c.c22, c.re, c.im);
        const double trace = c.c11 + c.c22;
        const double det = c.c11 * c.c22 - (c.re * c.re + c.im * c.im);
        EXPECT_NEAR(e.lambda1 + e.lambda2, trace, 1e-9 * trace);
        EXPECT_NEAR(e.lambda1 * e.lambda2, det, 1e-9 * trace * trace);
        EXPECT_GE(e.lambda1, e.lambda2);
        EXPECT_NEAR(e.lambda1, l1, 1e-9 * trace);
    }
}

TEST(Dprvi, ScalarExamples) {
    EXPECT_DOUBLE_EQ(*dprvi_from_eigen({2, 2}), 1.0);
    EXPECT_EQ(*dprvi_from_eigen({2, 0}), 0.0);
    EXPECT_NEAR(*dprvi_from_eigen({1, 0.5}), 7.0 / 9.0, 1e-15);
    EXPECT_NEAR(dprvi_from_ratio(0.5), 0.5 * 3.5 / 2.25, 1e-15);
    EXPECT_FALSE(dprvi_from_eigen({0, 0}).has_value());

    EXPECT_DOUBLE_EQ(*dprvi_grd(1.0, 1.0), 1.0);
    EXPECT_EQ(*dprvi_grd(0.0, 1.0), 0.0);
    EXPECT_NEAR(*dprvi_grd(0.5, 1.0), 7.0 / 9.0, 1e-15);
    EXPECT_FALSE(dprvi_grd(0.5, 0.0).has_value());
    EXPECT_THROW(dprvi_grd(-0.1, 1.0), std::domain_error);
    bool clamped = false;
    EXPECT_DOUBLE_EQ(*dprvi_grd(2.0, 1.0, &clamped), 1.0);
    EXPECT_TRUE(clamped);
}

TEST(Dprvi, IdentityAndRangeProperty) {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 100000; ++i) {
        double l1 = std::exp(20.0 * u(rng) - 10.0), l2 = l1 * u(rng);
        if (i % 1000 == 0) l2 = 0.0;
        const auto p = dp_params({l1, l2});
        ASSERT_TRUE(p.has_value());
        const double d = *dprvi_from_eigen({l1, l2});
        // Reference straight from the definitions.
        const double m = (l1 - l2) / (l1 + l2), beta = l1 / (l1 + l2), q = l2 / l1;
        EXPECT_NEAR(1.0 - m * beta, q * (q + 3) / ((q + 1) * (q + 1)), 1e-12);
        EXPECT_NEAR(d, q * (q + 3) / ((q + 1) * (q + 1)), 1e-12);
        EXPECT_GE(d, 0.0);
        EXPECT_LE(d, 1.0);
        EXPECT_GE(p->m, 0.0);
        EXPECT_LE(p->m, 1.0);
        EXPECT_GE(p->beta, 0.5);
        EXPECT_LE(p->beta, 1.0);
        EXPECT_NEAR(p->beta, (1.0 + p->m) / 2.0, 1e-12);
    }
}

TEST(Dprvi, ScaleInvariance) {
    std::mt19937_64 rng(23);
    for (int i = 0; i < 2000; ++i) {
        const auto c = oracle::random_psd(rng);
        const double k = std::exp(std::uniform_real_distribution<double>(-6, 6)(rng));
        const auto a = dprvi_from_eigen(eigen_decompose(c.c11, c.c22, c.re, c.im));
        const auto b = dprvi_from_eigen(eigen_decompose(k * c.c11, k * c.c22, k * c.re, k * c.im));
        EXPECT_NEAR(*a, *b, 1e-9);
    }
}

TEST(Multilook, MeansAndShape) {
    C2Raster c2 = C2Raster::filled(grid(2, 2), {0, 1, 0, 0});
    c2.c11 = {1, 2, 3, 4};
    const auto out = multilook(c2, 2, 2);
    ASSERT_EQ(out.spec.width, 1);
    ASSERT_EQ(out.spec.height, 1);
    EXPECT_FLOAT_EQ(out.c11[0], 2.5f);
    EXPECT_DOUBLE_EQ(out.spec.pixel_size_x, 10.0);
    EXPECT_DOUBLE_EQ(out.spec.pixel_size_y, -40.0);

    const C2Raster constant = C2Raster::filled(grid(9, 7), {0.3, 0.2, 0.05, -0.01});
    const auto ml = multilook(constant, 4, 1);
    EXPECT_EQ(ml.spec.width, 2);
    EXPECT_EQ(ml.spec.height, 7);
    for (float v : ml.c12_im) EXPECT_FLOAT_EQ(v, -0.01f);
    EXPECT_EQ(multilook(constant, 1, 1).c11, constant.c11);

    EXPECT_THROW(multilook(constant, 10, 1), std::invalid_argument);
    EXPECT_THROW(multilook(constant, 0, 1), std::invalid_argument);
}

TEST(Multilook, NodataInBlock) {
    C2Raster c2 = C2Raster::filled(grid(4, 1), {1, 1, 0, 0});
    c2.c11 = {1, 3, 5, 7};
    c2.set_nodata(0);
    c2.set_nodata(2);
    c2.set_nodata(3);
    const auto out = multilook(c2, 2, 1);
    EXPECT_FLOAT_EQ(out.c11[0], 3.0f);
    EXPECT_FALSE(out.is_valid(1));
}

TEST(Boxcar, CenterIsBruteForceMean) {
    C2Raster c2 = C2Raster::filled(grid(3, 3), {1, 1, 0, 0});
    c2.c11 = {1, 2, 3, 4, 5, 6, 7, 8, 10};
    const auto out = boxcar_filter(c2, 3);
    EXPECT_FLOAT_EQ(out.c11[4], 46.0f / 9.0f);
    EXPECT_FLOAT_EQ(out.c11[0], (1 + 2 + 4 + 5) / 4.0f);  // corner: valid intersection only
    EXPECT_EQ(boxcar_filter(c2, 1).c11, c2.c11);
    EXPECT_THROW(boxcar_filter(c2, 2), std::invalid_argument);
}

TEST(DprviRaster, UniformScenesAndNodata) {
    C2Raster c2 = C2Raster::filled(grid(5, 4), {1, 0.5, 0, 0});
    c2.timestamp = parse_date("2023-06-20");
    c2.orbit = Orbit::Descending;
    c2.set_nodata(3);
    c2.c11[7] = 0.0f;
    c2.c22[7] = 0.0f;  // zero power
    const auto r = dprvi_raster(c2);
    EXPECT_EQ(r.invalid_pixels, 2u);
    EXPECT_EQ(r.raster.timestamp, c2.timestamp);
    EXPECT_EQ(r.raster.orbit, Orbit::Descending);
    EXPECT_EQ(r.raster.spec, c2.spec);
    for (std::size_t i = 0; i < r.raster.values.size(); ++i) {
        if (i == 3 || i == 7) {
            EXPECT_TRUE(std::isnan(r.raster.values[i]));
        } else {
            EXPECT_NEAR(r.raster.values[i], 7.0 / 9.0, 1e-6);
        }
    }
    const auto zero = dprvi_raster(C2Raster::filled(grid(3, 3), {1, 0, 0, 0}));
    for (float v : zero.raster.values) EXPECT_EQ(v, 0.0f);
}

TEST(DprviRaster, GrdForm) {
    Raster vv = Raster::filled(grid(3, 1), 1.0f, "VV");
    Raster vh = Raster::filled(grid(3, 1), 0.5f, "VH");
    vh.values[1] = 1.5f;
    vv.values[2] = 0.0f;
    const auto r = dprvi_grd_raster(vh, vv);
    EXPECT_NEAR(r.raster.values[0], 7.0 / 9.0, 1e-6);
    EXPECT_FLOAT_EQ(r.raster.values[1], 1.0f);
    EXPECT_TRUE(std::isnan(r.raster.values[2]));
    EXPECT_EQ(r.clamped_pixels, 1u);
    EXPECT_EQ(r.invalid_pixels, 1u);
}

TEST(C2Bundle, RoundTripKeepsChannelOrder) {
    C2Raster c2 = C2Raster::filled(grid(2, 2), {0.4, 0.1, 0.02, -0.03});
    c2.channel1 = "VH";
    c2.channel2 = "VV";
    c2.timestamp = parse_date("2023-05-28");
    c2.orbit = Orbit::Ascending;
    const auto back = c2_from_bundle(to_bundle(c2));
    EXPECT_EQ(back.c12_im, c2.c12_im);
    EXPECT_EQ(back.channel1, "VH");
    EXPECT_EQ(back.channel2, "VV");
    EXPECT_EQ(back.timestamp, c2.timestamp);

    RasterBundle partial = to_bundle(c2);
    partial.bands.pop_back();
    partial.data.pop_back();
    EXPECT_THROW(c2_from_bundle(partial), std::runtime_error);
}
