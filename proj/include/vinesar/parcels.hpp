#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "vinesar/csv.hpp"
#include "vinesar/raster.hpp"

namespace vinesar::parcels {

enum class Orientation { EW, NS, Other };

std::string_view orientation_tag(Orientation o);
Orientation parse_orientation(std::string_view text);

struct Point {
    double x = 0.0;
    double y = 0.0;
    bool operator==(const Point&) const = default;
};

/// Closed ring: first vertex repeated as last.
using Ring = std::vector<Point>;

struct Parcel {
    std::string id;
    std::vector<Ring> rings;  // rings[0] exterior, the rest holes
    Orientation orientation = Orientation::Other;
};

/// Throws std::invalid_argument for rings with fewer than 4 vertices, open rings,
/// or self-intersecting rings.
void validate_ring(const Ring& ring, std::string_view context);

/// Reads a GeoJSON FeatureCollection of Polygon features with `id` and optional
/// `orientation` properties. Coordinates are used as planar working-CRS coordinates.
std::vector<Parcel> load_parcels(const std::filesystem::path& path);
std::vector<Parcel> parse_parcels(std::string_view geojson);

struct ParcelMask {
    std::string parcel_id;
    GridSpec spec;
    std::vector<std::uint8_t> mask;  // row-major, 1 = inside
    int erosion_applied = 0;

    std::size_t count() const;
    bool empty() const { return count() == 0; }
};

/// Pixel is inside iff its center is inside the polygon under the even-odd rule
/// over all rings (holes subtract).
ParcelMask rasterize(const Parcel& parcel, const GridSpec& spec);

/// `pixels` iterations of 4-neighbour erosion; pixels outside the grid count as outside.
ParcelMask erode(const ParcelMask& mask, int pixels);

struct ZonalStats {
    std::string parcel_id;
    std::string band_name;
    std::optional<Date> timestamp;
    Orbit orbit = Orbit::None;
    std::size_t count = 0;
    double mean = 0.0;
    double std = 0.0;  // population
    double min = 0.0;
    double max = 0.0;
};

class EmptyStatsError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Statistics of valid raster pixels under the mask. Throws AlignmentError on a
/// spec mismatch and EmptyStatsError when no valid pixel is covered.
ZonalStats zonal_stats(const Raster& raster, const ParcelMask& mask);

/// Statistics for several masks over one raster, computed in parallel. Entries
/// are std::nullopt where zonal_stats would throw EmptyStatsError.
std::vector<std::optional<ZonalStats>> zonal_stats_many(const Raster& raster,
                                                        std::span<const ParcelMask> masks);

/// `parcel_id,band,timestamp,orbit,count,mean,std,min,max`
csv::Table zonal_table(std::span<const ZonalStats> stats);
std::vector<ZonalStats> zonal_from_table(const csv::Table& table);

}  // namespace vinesar::parcels
