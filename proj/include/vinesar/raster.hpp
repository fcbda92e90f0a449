#pragma once

#include <cmath>
#include <cstddef>
#include <filesystem>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "vinesar/date.hpp"

namespace vinesar {

enum class Orbit { None, Ascending, Descending };

/// "ASC", "DES" or "" for Orbit::None.
std::string_view orbit_tag(Orbit orbit);
/// Accepts "ASC"/"DES" (any case), "Ascending"/"Descending" and "" / "NONE".
Orbit parse_orbit(std::string_view text);

inline constexpr float kNaN = std::numeric_limits<float>::quiet_NaN();

/// Georeferenced pixel grid. Pixel (col,row) has its center at
/// (origin_x + (col + 0.5) * pixel_size_x, origin_y + (row + 0.5) * pixel_size_y).
struct GridSpec {
    int width = 0;
    int height = 0;
    double origin_x = 0.0;
    double origin_y = 0.0;
    double pixel_size_x = 1.0;
    double pixel_size_y = -1.0;
    std::string crs;

    bool operator==(const GridSpec&) const = default;

    /// Throws std::invalid_argument on non-positive size or zero pixel size.
    void validate() const;

    std::size_t pixel_count() const {
        return static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
    }
    double center_x(int col) const { return origin_x + (col + 0.5) * pixel_size_x; }
    double center_y(int row) const { return origin_y + (row + 0.5) * pixel_size_y; }

    /// Map extent as [min_x, max_x] x [min_y, max_y].
    double min_x() const;
    double max_x() const;
    double min_y() const;
    double max_y() const;
};

std::string describe(const GridSpec& spec);

class AlignmentError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Single-band float grid.
struct Raster {
    GridSpec spec;
    std::vector<float> values;
    float nodata = kNaN;
    std::string band_name;
    std::optional<Date> timestamp;
    Orbit orbit = Orbit::None;

    static Raster filled(const GridSpec& spec, float value, std::string band_name = {});

    /// NaN is never valid; a finite nodata sentinel is also excluded.
    bool is_valid(float v) const { return !std::isnan(v) && (std::isnan(nodata) || v != nodata); }
    bool valid_at(std::size_t i) const { return is_valid(values[i]); }

    float at(int col, int row) const {
        return values[static_cast<std::size_t>(row) * spec.width + col];
    }

    /// Throws std::invalid_argument if values.size() != width*height.
    void validate() const;
};

/// One band entry of a bundle header.
struct BandInfo {
    std::string name;
    std::string description;
};

/// In-memory form of the JSON header + flat f32le binary interchange format.
struct RasterBundle {
    GridSpec spec;
    std::vector<BandInfo> bands;
    std::vector<std::vector<float>> data;  // one vector per band, row-major
    float nodata = kNaN;
    std::optional<Date> timestamp;
    Orbit orbit = Orbit::None;

    /// Index of the band named `name`, if any.
    std::optional<std::size_t> find_band(std::string_view name) const;
    Raster band_raster(std::size_t index) const;
};

/// `<stem>.json` and `<stem>.bin` for a path given with or without extension.
std::filesystem::path header_path(const std::filesystem::path& path);
std::filesystem::path binary_path(const std::filesystem::path& path);

RasterBundle read_bundle(const std::filesystem::path& path);
void write_bundle(const RasterBundle& bundle, const std::filesystem::path& path);

/// Loads a single-band bundle, or the named band of a multi-band bundle.
Raster load_raster(const std::filesystem::path& path, std::string_view band = {});
void save_raster(const Raster& raster, const std::filesystem::path& path);

RasterBundle to_bundle(const Raster& raster);

enum class ResampleMethod { Nearest, Bilinear };

ResampleMethod parse_resample_method(std::string_view text);

/// Resamples onto `target` (same CRS, overlapping extent). Target pixels whose
/// center falls outside the source extent become nodata.
Raster resample(const Raster& raster, const GridSpec& target, ResampleMethod method);

/// Throws AlignmentError naming the first raster whose spec differs from the first one.
void assert_aligned(std::span<const Raster> rasters);
void assert_aligned(std::span<const GridSpec> specs, std::span<const std::string> labels);

}  // namespace vinesar
