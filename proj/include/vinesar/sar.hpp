#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "vinesar/raster.hpp"

namespace vinesar::sar {

/// Relative tolerance for positive-semidefiniteness checks and for treating a
/// covariance as rank-deficient (|det| <= kPsdTolerance * trace^2).
inline constexpr double kPsdTolerance = 1e-6;

/// One 2x2 Hermitian covariance [[c11, c12], [conj(c12), c22]].
struct C2Pixel {
    double c11 = 0.0;
    double c22 = 0.0;
    double c12_re = 0.0;
    double c12_im = 0.0;

    double trace() const { return c11 + c22; }
    double det() const { return c11 * c22 - (c12_re * c12_re + c12_im * c12_im); }
};

/// Dual-pol covariance raster: four co-registered bands on one grid.
/// Channel labels record which polarization sits in C11 and C22.
struct C2Raster {
    GridSpec spec;
    std::vector<float> c11, c22, c12_re, c12_im;
    std::optional<Date> timestamp;
    Orbit orbit = Orbit::None;
    std::string channel1 = "VV";
    std::string channel2 = "VH";

    static C2Raster filled(const GridSpec& spec, const C2Pixel& value);

    /// A pixel is valid when all four bands are finite.
    bool is_valid(std::size_t i) const;
    C2Pixel pixel(std::size_t i) const { return {c11[i], c22[i], c12_re[i], c12_im[i]}; }
    void set_pixel(std::size_t i, const C2Pixel& p);
    void set_nodata(std::size_t i);

    void validate() const;
};

/// Band names of the 4-band bundle form.
inline constexpr const char* kC2BandNames[4] = {"C11", "C22", "C12_re", "C12_im"};

RasterBundle to_bundle(const C2Raster& c2);
/// Throws if the bundle lacks any of the C11, C22, C12_re, C12_im bands.
C2Raster c2_from_bundle(const RasterBundle& bundle);

struct EigenPair {
    double lambda1 = 0.0;
    double lambda2 = 0.0;
};

/// Degree of polarization m, degree of dominance beta, and eigenvalue ratio q.
struct DpParams {
    double m = 0.0;
    double beta = 0.0;
    double q = 0.0;
};

/// Closed-form eigenvalues of the 2x2 Hermitian covariance, lambda1 >= lambda2 >= 0.
/// A determinant within kPsdTolerance * trace^2 of zero yields lambda2 = 0 exactly;
/// a more negative determinant or diagonal is rejected as corrupted data
/// (std::domain_error), as are non-finite inputs.
EigenPair eigen_decompose(double c11, double c22, double c12_re, double c12_im);
inline EigenPair eigen_decompose(const C2Pixel& p) {
    return eigen_decompose(p.c11, p.c22, p.c12_re, p.c12_im);
}

/// std::nullopt when lambda1 + lambda2 == 0.
std::optional<DpParams> dp_params(const EigenPair& e);

/// 1 - m * beta; std::nullopt for zero total power.
std::optional<double> dprvi_from_eigen(const EigenPair& e);

/// q (q + 3) / (q + 1)^2 for an eigenvalue or intensity ratio q in [0, 1].
double dprvi_from_ratio(double q);

/// Intensity-ratio form for detected (GRD) data, q = sigma_vh / sigma_vv clamped to [0, 1].
/// Linear power inputs. std::nullopt when sigma_vv == 0; negative or non-finite input throws.
std::optional<double> dprvi_grd(double sigma_vh, double sigma_vv, bool* clamped = nullptr);

/// Block-mean multilooking; output is floor(width/win_x) x floor(height/win_y).
C2Raster multilook(const C2Raster& c2, int win_x, int win_y);

/// Sliding-window (odd `win`) mean over the in-raster part of the window.
/// Invalid pixels are excluded from the means and stay invalid.
C2Raster boxcar_filter(const C2Raster& c2, int win);

struct IndexResult {
    Raster raster;
    std::size_t invalid_pixels = 0;  // nodata inputs, zero power, or PSD violations
    std::size_t clamped_pixels = 0;  // GRD ratio clamped to 1
};

/// Per-pixel eigen-decomposition and DpRVI; nodata propagates.
IndexResult dprvi_raster(const C2Raster& c2);

/// Intensity-ratio DpRVI over co-registered VH and VV rasters.
IndexResult dprvi_grd_raster(const Raster& sigma_vh, const Raster& sigma_vv);

}  // namespace vinesar::sar
