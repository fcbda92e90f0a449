#include "vinesar/raster.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace vinesar {

using nlohmann::ordered_json;

std::string_view orbit_tag(Orbit orbit) {
    switch (orbit) {
        case Orbit::Ascending: return "ASC";
        case Orbit::Descending: return "DES";
        case Orbit::None: break;
    }
    return "";
}

Orbit parse_orbit(std::string_view text) {
    std::string upper(text);
    std::transform(upper.begin(), upper.end(), upper.begin(),
                   [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
    if (upper == "ASC" || upper == "ASCENDING") return Orbit::Ascending;
    if (upper == "DES" || upper == "DESCENDING") return Orbit::Descending;
    if (upper.empty() || upper == "NONE") return Orbit::None;
    throw std::invalid_argument("unknown orbit: '" + std::string(text) + "'");
}

void GridSpec::validate() const {
    if (width < 1 || height < 1) {
        throw std::invalid_argument("grid dimensions must be positive: " + describe(*this));
    }
    if (pixel_size_x == 0.0 || pixel_size_y == 0.0 || !std::isfinite(pixel_size_x) ||
        !std::isfinite(pixel_size_y)) {
        throw std::invalid_argument("pixel size must be finite and non-zero: " + describe(*this));
    }
}

double GridSpec::min_x() const { return std::min(origin_x, origin_x + width * pixel_size_x); }
double GridSpec::max_x() const { return std::max(origin_x, origin_x + width * pixel_size_x); }
double GridSpec::min_y() const { return std::min(origin_y, origin_y + height * pixel_size_y); }
double GridSpec::max_y() const { return std::max(origin_y, origin_y + height * pixel_size_y); }

std::string describe(const GridSpec& spec) {
    std::ostringstream out;
    out.precision(17);
    out << spec.width << "x" << spec.height << " @(" << spec.origin_x << ", " << spec.origin_y
        << ") px(" << spec.pixel_size_x << ", " << spec.pixel_size_y << ") " << spec.crs;
    return out.str();
}

Raster Raster::filled(const GridSpec& spec, float value, std::string band_name) {
    spec.validate();
    Raster r;
    r.spec = spec;
    r.values.assign(spec.pixel_count(), value);
    r.band_name = std::move(band_name);
    return r;
}

void Raster::validate() const {
    spec.validate();
    if (values.size() != spec.pixel_count()) {
        throw std::invalid_argument("raster '" + band_name + "' holds " +
                                    std::to_string(values.size()) + " values, grid needs " +
                                    std::to_string(spec.pixel_count()));
    }
}

std::optional<std::size_t> RasterBundle::find_band(std::string_view name) const {
    for (std::size_t i = 0; i < bands.size(); ++i) {
        if (bands[i].name == name) return i;
    }
    return std::nullopt;
}

Raster RasterBundle::band_raster(std::size_t index) const {
    Raster r;
    r.spec = spec;
    r.values = data.at(index);
    r.nodata = nodata;
    r.band_name = bands.at(index).name;
    r.timestamp = timestamp;
    r.orbit = orbit;
    return r;
}

std::filesystem::path header_path(const std::filesystem::path& path) {
    auto p = path;
    return p.replace_extension(".json");
}

std::filesystem::path binary_path(const std::filesystem::path& path) {
    auto p = path;
    return p.replace_extension(".bin");
}

namespace {

template <typename T>
T required(const ordered_json& j, const char* key, const std::filesystem::path& path) {
    if (!j.contains(key)) {
        throw std::runtime_error(path.string() + ": header missing '" + key + "'");
    }
    return j.at(key).get<T>();
}

float byteswap_float(float v) {
    std::uint32_t bits;
    std::memcpy(&bits, &v, sizeof bits);
    bits = ((bits & 0x000000FFu) << 24) | ((bits & 0x0000FF00u) << 8) |
           ((bits & 0x00FF0000u) >> 8) | ((bits & 0xFF000000u) >> 24);
    std::memcpy(&v, &bits, sizeof bits);
    return v;
}

}  // namespace

RasterBundle read_bundle(const std::filesystem::path& path) {
    const auto hpath = header_path(path);
    std::ifstream hin(hpath);
    if (!hin) throw std::runtime_error("cannot open raster header: " + hpath.string());

    ordered_json header;
    try {
        header = ordered_json::parse(hin);
    } catch (const ordered_json::parse_error& e) {
        throw std::runtime_error(hpath.string() + ": " + e.what());
    }

    RasterBundle b;
    try {
        b.spec.width = required<int>(header, "width", hpath);
        b.spec.height = required<int>(header, "height", hpath);
        b.spec.origin_x = required<double>(header, "origin_x", hpath);
        b.spec.origin_y = required<double>(header, "origin_y", hpath);
        b.spec.pixel_size_x = required<double>(header, "pixel_size_x", hpath);
        b.spec.pixel_size_y = required<double>(header, "pixel_size_y", hpath);
        b.spec.crs = header.value("crs", std::string{});

        const auto dtype = required<std::string>(header, "dtype", hpath);
        if (dtype != "f32le") {
            throw std::runtime_error(hpath.string() + ": unsupported dtype '" + dtype + "'");
        }
        for (const auto& band : required<ordered_json>(header, "bands", hpath)) {
            b.bands.push_back({band.at("name").get<std::string>(),
                               band.value("description", std::string{})});
        }
        if (b.bands.empty()) throw std::runtime_error(hpath.string() + ": no bands declared");

        if (header.contains("nodata")) {
            const auto& nd = header["nodata"];
            if (nd.is_null()) {
                b.nodata = kNaN;
            } else if (nd.is_string()) {
                const auto s = nd.get<std::string>();
                if (s != "nan" && s != "NaN") {
                    throw std::runtime_error(hpath.string() + ": invalid nodata '" + s + "'");
                }
                b.nodata = kNaN;
            } else {
                b.nodata = nd.get<float>();
            }
        }
        if (header.contains("timestamp") && !header["timestamp"].is_null()) {
            b.timestamp = parse_date(header["timestamp"].get<std::string>());
        }
        if (header.contains("orbit") && !header["orbit"].is_null()) {
            b.orbit = parse_orbit(header["orbit"].get<std::string>());
        }
    } catch (const ordered_json::exception& e) {
        throw std::runtime_error(hpath.string() + ": " + e.what());
    }
    b.spec.validate();

    const auto bpath = binary_path(path);
    std::ifstream bin(bpath, std::ios::binary | std::ios::ate);
    if (!bin) throw std::runtime_error("cannot open raster binary: " + bpath.string());
    const auto bytes = static_cast<std::size_t>(bin.tellg());
    const std::size_t npix = b.spec.pixel_count();
    const std::size_t expected = npix * b.bands.size() * sizeof(float);
    if (bytes != expected) {
        throw std::runtime_error(bpath.string() + ": size mismatch, expected " +
                                 std::to_string(expected) + " bytes, found " +
                                 std::to_string(bytes));
    }
    bin.seekg(0);
    b.data.resize(b.bands.size());
    for (auto& band : b.data) {
        band.resize(npix);
        bin.read(reinterpret_cast<char*>(band.data()),
                 static_cast<std::streamsize>(npix * sizeof(float)));
        if constexpr (std::endian::native == std::endian::big) {
            for (auto& v : band) v = byteswap_float(v);
        }
    }
    if (!bin) throw std::runtime_error("read failed: " + bpath.string());
    return b;
}

void write_bundle(const RasterBundle& b, const std::filesystem::path& path) {
    b.spec.validate();
    if (b.bands.size() != b.data.size()) {
        throw std::invalid_argument("bundle band list and data disagree");
    }
    for (const auto& band : b.data) {
        if (band.size() != b.spec.pixel_count()) {
            throw std::invalid_argument("bundle band has wrong pixel count");
        }
    }

    ordered_json header;
    header["width"] = b.spec.width;
    header["height"] = b.spec.height;
    header["origin_x"] = b.spec.origin_x;
    header["origin_y"] = b.spec.origin_y;
    header["pixel_size_x"] = b.spec.pixel_size_x;
    header["pixel_size_y"] = b.spec.pixel_size_y;
    header["crs"] = b.spec.crs;
    header["bands"] = ordered_json::array();
    for (const auto& band : b.bands) {
        ordered_json entry{{"name", band.name}};
        if (!band.description.empty()) entry["description"] = band.description;
        header["bands"].push_back(std::move(entry));
    }
    header["dtype"] = "f32le";
    header["nodata"] = std::isnan(b.nodata) ? ordered_json(nullptr) : ordered_json(b.nodata);
    if (b.timestamp) header["timestamp"] = format_date(*b.timestamp);
    if (b.orbit != Orbit::None) header["orbit"] = std::string(orbit_tag(b.orbit));

    const auto hpath = header_path(path);
    const auto bpath = binary_path(path);
    if (hpath.has_parent_path()) std::filesystem::create_directories(hpath.parent_path());

    std::ofstream hout(hpath, std::ios::binary);
    if (!hout) throw std::runtime_error("cannot write raster header: " + hpath.string());
    hout << header.dump(2) << '\n';
    if (!hout) throw std::runtime_error("write failed: " + hpath.string());

    std::ofstream bout(bpath, std::ios::binary);
    if (!bout) throw std::runtime_error("cannot write raster binary: " + bpath.string());
    for (const auto& band : b.data) {
        if constexpr (std::endian::native == std::endian::big) {
            std::vector<float> swapped(band);
            for (auto& v : swapped) v = byteswap_float(v);
            bout.write(reinterpret_cast<const char*>(swapped.data()),
                       static_cast<std::streamsize>(swapped.size() * sizeof(float)));
        } else {
            bout.write(reinterpret_cast<const char*>(band.data()),
                       static_cast<std::streamsize>(band.size() * sizeof(float)));
        }
    }
    if (!bout) throw std::runtime_error("write failed: " + bpath.string());
}

RasterBundle to_bundle(const Raster& raster) {
    raster.validate();
    RasterBundle b;
    b.spec = raster.spec;
    b.bands.push_back({raster.band_name, {}});
    b.data.push_back(raster.values);
    b.nodata = raster.nodata;
    b.timestamp = raster.timestamp;
    b.orbit = raster.orbit;
    return b;
}

Raster load_raster(const std::filesystem::path& path, std::string_view band) {
    const auto bundle = read_bundle(path);
    if (band.empty()) {
        if (bundle.bands.size() != 1) {
            throw std::runtime_error(header_path(path).string() + ": holds " +
                                     std::to_string(bundle.bands.size()) +
                                     " bands, name the band to load");
        }
        return bundle.band_raster(0);
    }
    const auto idx = bundle.find_band(band);
    if (!idx) {
        throw std::runtime_error(header_path(path).string() + ": no band '" + std::string(band) +
                                 "'");
    }
    return bundle.band_raster(*idx);
}

void save_raster(const Raster& raster, const std::filesystem::path& path) {
    write_bundle(to_bundle(raster), path);
}

ResampleMethod parse_resample_method(std::string_view text) {
    if (text == "nearest" || text == "Nearest") return ResampleMethod::Nearest;
    if (text == "bilinear" || text == "Bilinear") return ResampleMethod::Bilinear;
    throw std::invalid_argument("unknown resample method: '" + std::string(text) + "'");
}

namespace {

void check_resample_inputs(const Raster& raster, const GridSpec& target) {
    raster.validate();
    target.validate();
    if (raster.spec.crs != target.crs) {
        throw std::invalid_argument("resample crs mismatch: '" + raster.spec.crs + "' vs '" +
                                    target.crs + "'");
    }
    const auto& s = raster.spec;
    const bool disjoint = target.max_x() <= s.min_x() || target.min_x() >= s.max_x() ||
                          target.max_y() <= s.min_y() || target.min_y() >= s.max_y();
    if (disjoint) {
        throw std::invalid_argument("resample target does not overlap source: " + describe(s) +
                                    " vs " + describe(target));
    }
}

// Fractional source pixel coordinate, with pixel centers at integers.
inline double source_u(const GridSpec& s, double x) {
    return (x - s.origin_x) / s.pixel_size_x - 0.5;
}
inline double source_v(const GridSpec& s, double y) {
    return (y - s.origin_y) / s.pixel_size_y - 0.5;
}

inline float sample_pixel(const Raster& src, const GridSpec& target, int col, int row,
                          ResampleMethod method) {
    const auto& s = src.spec;
    const double u = source_u(s, target.center_x(col));
    const double v = source_v(s, target.center_y(row));
    // Nearest: the source pixel containing the target center.
    const double fc = std::floor(u + 0.5);
    const double fr = std::floor(v + 0.5);
    if (fc < 0 || fr < 0 || fc >= s.width || fr >= s.height) return src.nodata;
    const int nc = static_cast<int>(fc);
    const int nr = static_cast<int>(fr);
    const float nearest = src.at(nc, nr);
    if (method == ResampleMethod::Nearest) return nearest;

    const double c0f = std::floor(u);
    const double r0f = std::floor(v);
    const double tx = u - c0f;
    const double ty = v - r0f;
    const int c0 = std::clamp(static_cast<int>(c0f), 0, s.width - 1);
    const int c1 = std::clamp(static_cast<int>(c0f) + 1, 0, s.width - 1);
    const int r0 = std::clamp(static_cast<int>(r0f), 0, s.height - 1);
    const int r1 = std::clamp(static_cast<int>(r0f) + 1, 0, s.height - 1);
    const float v00 = src.at(c0, r0), v10 = src.at(c1, r0);
    const float v01 = src.at(c0, r1), v11 = src.at(c1, r1);
    if (!src.is_valid(v00) || !src.is_valid(v10) || !src.is_valid(v01) || !src.is_valid(v11)) {
        return nearest;
    }
    const double top = v00 + (static_cast<double>(v10) - v00) * tx;
    const double bottom = v01 + (static_cast<double>(v11) - v01) * tx;
    return static_cast<float>(top + (bottom - top) * ty);
}

}  // namespace

Raster resample(const Raster& raster, const GridSpec& target, ResampleMethod method) {
    check_resample_inputs(raster, target);
    Raster out;
    out.spec = target;
    out.values.resize(target.pixel_count());
    out.nodata = raster.nodata;
    out.band_name = raster.band_name;
    out.timestamp = raster.timestamp;
    out.orbit = raster.orbit;

#pragma omp parallel for schedule(static)
    for (int row = 0; row < target.height; ++row) {
        float* dst = out.values.data() + static_cast<std::size_t>(row) * target.width;
        for (int col = 0; col < target.width; ++col) {
            dst[col] = sample_pixel(raster, target, col, row, method);
        }
    }
    return out;
}

void assert_aligned(std::span<const GridSpec> specs, std::span<const std::string> labels) {
    if (specs.empty()) throw std::invalid_argument("assert_aligned: empty stack");
    for (std::size_t i = 1; i < specs.size(); ++i) {
        if (!(specs[i] == specs[0])) {
            const std::string label =
                i < labels.size() && !labels[i].empty() ? labels[i] : "#" + std::to_string(i);
            throw AlignmentError("raster " + label + " is not aligned with the stack: " +
                                 describe(specs[i]) + " vs " + describe(specs[0]));
        }
    }
}

void assert_aligned(std::span<const Raster> rasters) {
    std::vector<GridSpec> specs;
    std::vector<std::string> labels;
    for (std::size_t i = 0; i < rasters.size(); ++i) {
        specs.push_back(rasters[i].spec);
        std::string label = "#" + std::to_string(i);
        if (!rasters[i].band_name.empty()) label += " (" + rasters[i].band_name;
        if (rasters[i].timestamp) {
            label += (rasters[i].band_name.empty() ? " (" : " ") +
                     format_date(*rasters[i].timestamp);
        }
        if (!rasters[i].band_name.empty() || rasters[i].timestamp) label += ")";
        labels.push_back(std::move(label));
    }
    assert_aligned(specs, labels);
}

}  // namespace vinesar
