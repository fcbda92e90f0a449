#pragma once

#include <cstddef>
#include <optional>

#include "vinesar/raster.hpp"

namespace vinesar::optical {

/// Valid surface-reflectance range; values outside are treated as nodata.
inline constexpr double kMinReflectance = 0.0;
inline constexpr double kMaxReflectance = 1.2;

/// Valid LAI range in m^2/m^2.
inline constexpr double kMinLai = 0.0;
inline constexpr double kMaxLai = 10.0;

/// BOA reflectance bands (fractions, not x10000 integers) on one grid.
struct BandSet {
    std::optional<Raster> b4;   // red
    std::optional<Raster> b5;   // red edge
    std::optional<Raster> b8;   // NIR
    std::optional<Raster> b11;  // SWIR
    std::optional<Raster> b12;  // SWIR
    std::optional<Date> timestamp;

    /// Builds a BandSet from a bundle carrying any of B4, B5, B8, B11, B12.
    static BandSet from_bundle(const RasterBundle& bundle);
};

struct IndexResult {
    Raster raster;
    std::size_t invalid_pixels = 0;
};

/// (B8 - B4) / (B8 + B4). Throws if B4 or B8 is missing or the bands are misaligned.
IndexResult ndvi(const BandSet& bands);

/// (4 B8 - S) / (4 B8 + S), S = B4 + B5 + B11 + B12. Throws if any band is missing
/// or misaligned.
IndexResult svhi(const BandSet& bands);

/// Scalar forms; std::nullopt on a zero denominator or out-of-range reflectance.
std::optional<double> ndvi_value(double b4, double b8);
std::optional<double> svhi_value(double b4, double b5, double b8, double b11, double b12);

struct LaiResult {
    Raster raster;
    std::size_t rejected_pixels = 0;
};

/// Range-checks an externally retrieved LAI raster; out-of-range pixels become nodata.
LaiResult ingest_lai(const Raster& raster);

}  // namespace vinesar::optical
