#pragma once

// Synthetic twelve-acquisition campaign used by the pipeline and acceptance
// tests: scene campaign JSON, parcel GeoJSON, weather CSV and optical stacks.

#include <algorithm>
#include <array>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "vinesar/csv.hpp"
#include "vinesar/date.hpp"
#include "vinesar/raster.hpp"

namespace campaign {

namespace fs = std::filesystem;

struct Acquisition {
    const char* date;
    const char* orbit;
    double cdd;
};

// Sentinel-1 pairs with their cumulative degree days.
inline constexpr std::array<Acquisition, 12> kAcquisitions{{
    {"2023-03-28", "DES", 21},  {"2023-03-29", "ASC", 21},  {"2023-04-21", "DES", 39},
    {"2023-04-22", "ASC", 40},  {"2023-05-27", "DES", 75},  {"2023-05-28", "ASC", 76},
    {"2023-06-20", "DES", 99},  {"2023-06-21", "ASC", 100}, {"2023-07-26", "DES", 135},
    {"2023-07-27", "ASC", 136}, {"2023-08-19", "DES", 159}, {"2023-08-20", "ASC", 160},
}};

inline constexpr std::array<const char*, 6> kOpticalDates{
    "2023-03-27", "2023-04-26", "2023-05-26", "2023-06-25", "2023-07-25", "2023-08-24"};

inline const std::array<std::string, 12> kParcelIds{"EW1", "EW2", "EW3", "EW4", "EW5", "EW6",
                                                   "NS1", "NS2", "NS3", "NS4", "NS5", "NS6"};

// Planted DpRVI vertex (CDD) per parcel, always on an ascending acquisition.
inline constexpr std::array<double, 12> kVertexCdd{100, 100, 136, 136, 136, 136,
                                                   160, 76,  136, 100, 40,  76};

// Layout: SAR raw pixels 5 m x 20 m; 4x1 multilook gives 20 m squares.
inline constexpr double kOriginX = 500000.0;
inline constexpr double kOriginY = 5000000.0;
inline constexpr int kMlWidth = 42;
inline constexpr int kMlHeight = 32;
inline constexpr int kBlock = 8;  // parcel side in 20 m pixels

inline int parcel_col(int k) { return 2 + 10 * (k % 4); }
inline int parcel_row(int k) { return 2 + 10 * (k / 4); }

inline double planted_dprvi(int parcel, double cdd) {
    const double d = cdd - kVertexCdd[parcel];
    return 0.85 - 4.0e-5 * d * d;
}

/// Eigenvalue ratio q giving DpRVI d, from d = 1 - m(1+m)/2 and q = (1-m)/(1+m).
inline double ratio_for_dprvi(double d) {
    const double m = (-1.0 + std::sqrt(1.0 + 8.0 * (1.0 - d))) / 2.0;
    return (1.0 - m) / (1.0 + m);
}

/// Greenness in [0, 1] per optical date and parcel; peaks in early summer.
inline double greenness(int parcel, int date_index) {
    const double t = date_index - 3.0 + 0.15 * (parcel % 5);
    return std::clamp(0.9 - 0.08 * t * t + 0.01 * ((parcel * 7 + date_index * 3) % 5), 0.0, 1.0);
}

struct Files {
    fs::path root;
    fs::path scene;
    fs::path parcels;
    fs::path weather;
    fs::path optical_in;
    fs::path config;
};

inline void write_text(const fs::path& p, const std::string& s) {
    fs::create_directories(p.parent_path());
    std::ofstream(p, std::ios::binary) << s;
}

inline std::string scene_json(int looks, std::uint64_t seed) {
    nlohmann::ordered_json j;
    j["width"] = 4 * kMlWidth;
    j["height"] = kMlHeight;
    j["origin_x"] = kOriginX;
    j["origin_y"] = kOriginY;
    j["pixel_size_x"] = 5.0;
    j["pixel_size_y"] = -20.0;
    j["crs"] = "EPSG:32632";
    j["background"] = {1.0, 0.1, 0.0, 0.0};
    j["looks"] = looks;
    j["seed"] = seed;
    auto scenes = nlohmann::ordered_json::array();
    for (const auto& a : kAcquisitions) {
        nlohmann::ordered_json s;
        s["date"] = a.date;
        s["orbit"] = a.orbit;
        auto regions = nlohmann::ordered_json::array();
        for (int k = 0; k < 12; ++k) {
            const int c0 = 4 * parcel_col(k), r0 = parcel_row(k);
            const double q = ratio_for_dprvi(planted_dprvi(k, a.cdd));
            regions.push_back({{"rect", {c0, r0, c0 + 4 * kBlock, r0 + kBlock}},
                               {"c2", {1.0, q, 0.0, 0.0}}});
        }
        s["regions"] = regions;
        scenes.push_back(s);
    }
    j["scenes"] = scenes;
    return j.dump(2);
}

inline std::string parcels_json() {
    nlohmann::ordered_json fc;
    fc["type"] = "FeatureCollection";
    auto features = nlohmann::ordered_json::array();
    for (int k = 0; k < 12; ++k) {
        const double x0 = kOriginX + 20.0 * parcel_col(k), x1 = x0 + 20.0 * kBlock;
        const double y0 = kOriginY - 20.0 * parcel_row(k), y1 = y0 - 20.0 * kBlock;
        nlohmann::ordered_json f;
        f["type"] = "Feature";
        f["properties"] = {{"id", kParcelIds[k]}, {"orientation", k < 6 ? "EW" : "NS"}};
        f["geometry"] = {{"type", "Polygon"},
                         {"coordinates", {{{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}, {x0, y0}}}}};
        features.push_back(f);
    }
    fc["features"] = features;
    return fc.dump(2);
}

/// Jan 1 .. Aug 31; degree days fall only on acquisition dates so the running
/// sum hits each listed CDD exactly.
inline std::string weather_csv() {
    vinesar::csv::Table t;
    t.header = {"date", "tmin_c", "tmax_c", "precip_mm"};
    double prev = 0.0;
    const auto start = vinesar::parse_date("2023-01-01");
    for (int i = 0; i < 243; ++i) {
        const auto d = vinesar::add_days(start, i);
        double g = 0.0;
        for (const auto& a : kAcquisitions) {
            if (vinesar::parse_date(a.date) == d) {
                g = a.cdd - prev;
                prev = a.cdd;
            }
        }
        // Cool days (mean 6 C) add nothing; acquisition days carry the whole increment.
        const double tmin = g > 0.0 ? 10.0 + g : 5.0;
        const double tmax = g > 0.0 ? 10.0 + g : 7.0;
        t.rows.push_back({vinesar::format_date(d), vinesar::csv::format_number(tmin),
                          vinesar::csv::format_number(tmax), "0"});
    }
    return vinesar::csv::to_string(t);
}

/// Two bundles per date: B4/B8 at 10 m and B5/B11/B12 at 20 m, plus LAI at 10 m.
inline void write_optical(const fs::path& dir) {
    using vinesar::GridSpec;
    const GridSpec g10{2 * kMlWidth, 2 * kMlHeight, kOriginX, kOriginY, 10.0, -10.0, "EPSG:32632"};
    const GridSpec g20{kMlWidth, kMlHeight, kOriginX, kOriginY, 20.0, -20.0, "EPSG:32632"};
    auto parcel_at = [](const GridSpec& g, int col, int row) {
        const double x = g.center_x(col), y = g.center_y(row);
        for (int k = 0; k < 12; ++k) {
            const double x0 = kOriginX + 20.0 * parcel_col(k), y0 = kOriginY - 20.0 * parcel_row(k);
            if (x > x0 && x < x0 + 20.0 * kBlock && y < y0 && y > y0 - 20.0 * kBlock) return k;
        }
        return -1;
    };
    for (int di = 0; di < 6; ++di) {
        const auto date = vinesar::parse_date(kOpticalDates[di]);
        vinesar::RasterBundle b10, b20, lai;
        b10.spec = lai.spec = g10;
        b20.spec = g20;
        b10.timestamp = b20.timestamp = lai.timestamp = date;
        b10.bands = {{"B4", "red"}, {"B8", "nir"}};
        b20.bands = {{"B5", "red edge"}, {"B11", "swir"}, {"B12", "swir"}};
        lai.bands = {{"LAI", ""}};
        b10.data.assign(2, std::vector<float>(g10.pixel_count()));
        lai.data.assign(1, std::vector<float>(g10.pixel_count()));
        b20.data.assign(3, std::vector<float>(g20.pixel_count()));
        for (int r = 0; r < g10.height; ++r)
            for (int c = 0; c < g10.width; ++c) {
                const int k = parcel_at(g10, c, r);
                const double g = k < 0 ? 0.05 : greenness(k, di);
                const std::size_t i = static_cast<std::size_t>(r) * g10.width + c;
                b10.data[0][i] = static_cast<float>(0.10 - 0.06 * g);
                b10.data[1][i] = static_cast<float>(0.20 + 0.30 * g);
                lai.data[0][i] = static_cast<float>(0.25 + 2.21 * g);
            }
        for (int r = 0; r < g20.height; ++r)
            for (int c = 0; c < g20.width; ++c) {
                const int k = parcel_at(g20, c, r);
                const double g = k < 0 ? 0.05 : greenness(k, di);
                const std::size_t i = static_cast<std::size_t>(r) * g20.width + c;
                b20.data[0][i] = static_cast<float>(0.12 + 0.02 * g);
                b20.data[1][i] = static_cast<float>(0.22 - 0.06 * g);
                b20.data[2][i] = static_cast<float>(0.16 - 0.05 * g);
            }
        const std::string tag = kOpticalDates[di];
        vinesar::write_bundle(b10, dir / ("S2_10m_" + tag + ".json"));
        vinesar::write_bundle(b20, dir / ("S2_20m_" + tag + ".json"));
        vinesar::write_bundle(lai, dir / ("S2_LAI_" + tag + ".json"));
    }
}

/// Writes every input under `root` (wiped first) and a config.json pointing at them.
inline Files write_inputs(const fs::path& root, int looks = 16, std::uint64_t seed = 2023) {
    fs::remove_all(root);
    fs::create_directories(root);
    Files f{root, root / "campaign.json", root / "parcels.geojson", root / "weather.csv",
            root / "s2", root / "config.json"};
    write_text(f.scene, scene_json(looks, seed));
    write_text(f.parcels, parcels_json());
    write_text(f.weather, weather_csv());
    fs::create_directories(f.optical_in);
    write_optical(f.optical_in);
    nlohmann::ordered_json cfg;
    cfg["scene"] = "campaign.json";
    cfg["parcels"] = "parcels.geojson";
    cfg["weather"] = "weather.csv";
    cfg["multilook"] = "4x1";
    cfg["erode"] = 1;
    cfg["t_base"] = 10.0;
    cfg["max_gap_days"] = 7;
    cfg["abscissa"] = "CDD";
    write_text(f.config, cfg.dump(2));
    return f;
}

/// Acquisition of `orbit` closest in CDD to the planted vertex.
inline std::string expected_peak(int parcel, const std::string& orbit) {
    const Acquisition* best = nullptr;
    for (const auto& a : kAcquisitions) {
        if (orbit != a.orbit) continue;
        if (!best || std::abs(a.cdd - kVertexCdd[parcel]) < std::abs(best->cdd - kVertexCdd[parcel])) {
            best = &a;
        }
    }
    return best->date;
}

/// Acquisition dates of one orbit, in order.
inline std::vector<std::string> orbit_dates(const std::string& orbit) {
    std::vector<std::string> out;
    for (const auto& a : kAcquisitions)
        if (orbit == a.orbit) out.emplace_back(a.date);
    return out;
}

}  // namespace campaign
