#include "vinesar/parcels.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace vinesar::parcels {

using nlohmann::json;

std::string_view orientation_tag(Orientation o) {
    switch (o) {
        case Orientation::EW: return "EW";
        case Orientation::NS: return "NS";
        case Orientation::Other: break;
    }
    return "Other";
}

Orientation parse_orientation(std::string_view text) {
    if (text == "EW") return Orientation::EW;
    if (text == "NS") return Orientation::NS;
    if (text == "Other" || text.empty()) return Orientation::Other;
    throw std::invalid_argument("unknown orientation: '" + std::string(text) + "'");
}

namespace {

int orient(const Point& a, const Point& b, const Point& c) {
    const double v = (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
    return (v > 0) - (v < 0);
}

bool on_segment(const Point& a, const Point& b, const Point& p) {
    return std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) && std::min(a.y, b.y) <= p.y &&
           p.y <= std::max(a.y, b.y);
}

bool segments_intersect(const Point& p1, const Point& p2, const Point& q1, const Point& q2) {
    const int o1 = orient(p1, p2, q1);
    const int o2 = orient(p1, p2, q2);
    const int o3 = orient(q1, q2, p1);
    const int o4 = orient(q1, q2, p2);
    if (o1 != o2 && o3 != o4) return true;
    if (o1 == 0 && on_segment(p1, p2, q1)) return true;
    if (o2 == 0 && on_segment(p1, p2, q2)) return true;
    if (o3 == 0 && on_segment(q1, q2, p1)) return true;
    if (o4 == 0 && on_segment(q1, q2, p2)) return true;
    return false;
}

}  // namespace

void validate_ring(const Ring& ring, std::string_view context) {
    if (ring.size() < 4) {
        throw std::invalid_argument(std::string(context) + ": ring needs at least 4 vertices");
    }
    if (!(ring.front() == ring.back())) {
        throw std::invalid_argument(std::string(context) + ": ring is not closed");
    }
    for (const auto& p : ring) {
        if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
            throw std::invalid_argument(std::string(context) + ": non-finite coordinate");
        }
    }
    const std::size_t edges = ring.size() - 1;
    for (std::size_t i = 0; i < edges; ++i) {
        for (std::size_t j = i + 1; j < edges; ++j) {
            const bool adjacent = j == i + 1 || (i == 0 && j == edges - 1);
            if (adjacent) continue;
            if (segments_intersect(ring[i], ring[i + 1], ring[j], ring[j + 1])) {
                throw std::invalid_argument(std::string(context) + ": ring self-intersects (edges " +
                                            std::to_string(i) + " and " + std::to_string(j) + ")");
            }
        }
    }
}

std::vector<Parcel> parse_parcels(std::string_view geojson) {
    json doc;
    try {
        doc = json::parse(geojson);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument(std::string("malformed GeoJSON: ") + e.what());
    }
    if (!doc.is_object() || doc.value("type", "") != "FeatureCollection" ||
        !doc.contains("features") || !doc["features"].is_array()) {
        throw std::invalid_argument("GeoJSON must be a FeatureCollection");
    }

    std::vector<Parcel> parcels;
    std::size_t index = 0;
    for (const auto& feature : doc["features"]) {
        const std::string where = "feature #" + std::to_string(index++);
        try {
            const auto& props = feature.at("properties");
            if (!props.is_object() || !props.contains("id") || props["id"].is_null()) {
                throw std::invalid_argument(where + ": missing 'id' property");
            }
            Parcel p;
            p.id = props["id"].is_string() ? props["id"].get<std::string>() : props["id"].dump();
            if (props.contains("orientation") && !props["orientation"].is_null()) {
                p.orientation = parse_orientation(props["orientation"].get<std::string>());
            }
            const auto& geom = feature.at("geometry");
            if (geom.at("type").get<std::string>() != "Polygon") {
                throw std::invalid_argument(where + " (" + p.id + "): only Polygon geometries are supported");
            }
            for (const auto& jring : geom.at("coordinates")) {
                Ring ring;
                for (const auto& pt : jring) {
                    if (!pt.is_array() || pt.size() < 2) {
                        throw std::invalid_argument(where + " (" + p.id + "): bad coordinate");
                    }
                    ring.push_back({pt[0].get<double>(), pt[1].get<double>()});
                }
                validate_ring(ring, where + " (" + p.id + ")");
                p.rings.push_back(std::move(ring));
            }
            if (p.rings.empty()) throw std::invalid_argument(where + " (" + p.id + "): no rings");
            parcels.push_back(std::move(p));
        } catch (const json::exception& e) {
            throw std::invalid_argument(where + ": " + e.what());
        }
    }
    return parcels;
}

std::vector<Parcel> load_parcels(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open parcels file: " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_parcels(buf.str());
}

std::size_t ParcelMask::count() const {
    return static_cast<std::size_t>(std::count(mask.begin(), mask.end(), std::uint8_t{1}));
}

ParcelMask rasterize(const Parcel& parcel, const GridSpec& spec) {
    spec.validate();
    ParcelMask out;
    out.parcel_id = parcel.id;
    out.spec = spec;
    out.mask.assign(spec.pixel_count(), 0);

#pragma omp parallel for schedule(static)
    for (int row = 0; row < spec.height; ++row) {
        const double y = spec.center_y(row);
        std::vector<double> crossings;
        for (const auto& ring : parcel.rings) {
            for (std::size_t k = 0; k + 1 < ring.size(); ++k) {
                const Point& pj = ring[k];
                const Point& pi = ring[k + 1];
                if ((pi.y > y) != (pj.y > y)) {
                    crossings.push_back((pj.x - pi.x) * (y - pi.y) / (pj.y - pi.y) + pi.x);
                }
            }
        }
        if (crossings.empty()) continue;
        std::sort(crossings.begin(), crossings.end());
        std::uint8_t* dst = out.mask.data() + static_cast<std::size_t>(row) * spec.width;
        for (int col = 0; col < spec.width; ++col) {
            const double x = spec.center_x(col);
            // Inside iff an odd number of crossings lie strictly to the right.
            const auto right = crossings.end() - std::upper_bound(crossings.begin(), crossings.end(), x);
            dst[col] = static_cast<std::uint8_t>(right % 2);
        }
    }
    return out;
}

ParcelMask erode(const ParcelMask& mask, int pixels) {
    if (pixels < 0) throw std::invalid_argument("erosion iterations must be >= 0");
    ParcelMask out = mask;
    out.erosion_applied = mask.erosion_applied + pixels;
    const int w = mask.spec.width;
    const int h = mask.spec.height;
    std::vector<std::uint8_t> next(out.mask.size());
    for (int it = 0; it < pixels; ++it) {
        const auto& cur = out.mask;
#pragma omp parallel for schedule(static)
        for (int row = 0; row < h; ++row) {
            for (int col = 0; col < w; ++col) {
                const std::size_t i = static_cast<std::size_t>(row) * w + col;
                const bool keep = cur[i] && row > 0 && cur[i - w] && row + 1 < h && cur[i + w] &&
                                  col > 0 && cur[i - 1] && col + 1 < w && cur[i + 1];
                next[i] = keep ? 1 : 0;
            }
        }
        out.mask.swap(next);
    }
    return out;
}

namespace {

std::optional<ZonalStats> compute_stats(const Raster& raster, const ParcelMask& mask) {
    ZonalStats s;
    s.parcel_id = mask.parcel_id;
    s.band_name = raster.band_name;
    s.timestamp = raster.timestamp;
    s.orbit = raster.orbit;
    double sum = 0.0;
    double lo = 0.0, hi = 0.0;
    std::size_t n = 0;
    for (std::size_t i = 0; i < raster.values.size(); ++i) {
        if (!mask.mask[i] || !raster.valid_at(i)) continue;
        const double v = raster.values[i];
        if (n == 0) {
            lo = hi = v;
        } else {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        sum += v;
        ++n;
    }
    if (n == 0) return std::nullopt;
    const double mean = sum / static_cast<double>(n);
    double ss = 0.0;
    for (std::size_t i = 0; i < raster.values.size(); ++i) {
        if (!mask.mask[i] || !raster.valid_at(i)) continue;
        const double d = raster.values[i] - mean;
        ss += d * d;
    }
    s.count = n;
    // Rounding can put the mean a few ulps outside [min, max] for near-constant data.
    s.mean = std::clamp(mean, lo, hi);
    s.std = std::sqrt(ss / static_cast<double>(n));
    s.min = lo;
    s.max = hi;
    return s;
}

void check_alignment(const Raster& raster, const ParcelMask& mask) {
    raster.validate();
    if (!(raster.spec == mask.spec)) {
        throw AlignmentError("mask for parcel " + mask.parcel_id + " is on grid " +
                             describe(mask.spec) + ", raster is on " + describe(raster.spec));
    }
    if (mask.mask.size() != raster.values.size()) {
        throw std::invalid_argument("mask size does not match its grid");
    }
}

}  // namespace

ZonalStats zonal_stats(const Raster& raster, const ParcelMask& mask) {
    check_alignment(raster, mask);
    auto s = compute_stats(raster, mask);
    if (!s) {
        throw EmptyStatsError("parcel " + mask.parcel_id + " has no valid pixels in " +
                              raster.band_name);
    }
    return *s;
}

std::vector<std::optional<ZonalStats>> zonal_stats_many(const Raster& raster,
                                                        std::span<const ParcelMask> masks) {
    for (const auto& m : masks) check_alignment(raster, m);
    std::vector<std::optional<ZonalStats>> out(masks.size());
    const auto n = static_cast<std::ptrdiff_t>(masks.size());
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t k = 0; k < n; ++k) {
        out[k] = compute_stats(raster, masks[k]);
    }
    return out;
}

csv::Table zonal_table(std::span<const ZonalStats> stats) {
    csv::Table t;
    t.header = {"parcel_id", "band", "timestamp", "orbit", "count", "mean", "std", "min", "max"};
    for (const auto& s : stats) {
        t.rows.push_back({s.parcel_id, s.band_name, s.timestamp ? format_date(*s.timestamp) : "",
                          std::string(orbit_tag(s.orbit)), std::to_string(s.count),
                          csv::format_number(s.mean), csv::format_number(s.std),
                          csv::format_number(s.min), csv::format_number(s.max)});
    }
    return t;
}

std::vector<ZonalStats> zonal_from_table(const csv::Table& t) {
    const auto c_id = t.column("parcel_id"), c_band = t.column("band"),
               c_ts = t.column("timestamp"), c_orbit = t.column("orbit"),
               c_count = t.column("count"), c_mean = t.column("mean"), c_std = t.column("std"),
               c_min = t.column("min"), c_max = t.column("max");
    std::vector<ZonalStats> out;
    for (const auto& row : t.rows) {
        ZonalStats s;
        s.parcel_id = row[c_id];
        s.band_name = row[c_band];
        if (!row[c_ts].empty()) s.timestamp = parse_date(row[c_ts]);
        s.orbit = parse_orbit(row[c_orbit]);
        s.count = static_cast<std::size_t>(std::stoull(row[c_count]));
        s.mean = csv::parse_number(row[c_mean]);
        s.std = csv::parse_number(row[c_std]);
        s.min = csv::parse_number(row[c_min]);
        s.max = csv::parse_number(row[c_max]);
        out.push_back(std::move(s));
    }
    return out;
}

}  // namespace vinesar::parcels
