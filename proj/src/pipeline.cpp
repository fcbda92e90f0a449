#include "vinesar/pipeline.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "json.hpp"
#include "vinesar/optical.hpp"
#include "vinesar/parcels.hpp"
#include "vinesar/phenology.hpp"
#include "vinesar/sar.hpp"
#include "vinesar/synth.hpp"

namespace vinesar::pipeline {

using nlohmann::json;

std::pair<int, int> parse_window(std::string_view text) {
    const auto x = text.find_first_of("xX");
    int w = 0, h = 0;
    auto parse = [&](std::string_view part, int& v) {
        auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), v);
        return ec == std::errc{} && ptr == part.data() + part.size();
    };
    if (x == std::string_view::npos || !parse(text.substr(0, x), w) ||
        !parse(text.substr(x + 1), h) || w < 1 || h < 1) {
        throw std::invalid_argument("window must look like WxH with positive integers, got '" +
                                    std::string(text) + "'");
    }
    return {w, h};
}

PipelineConfig load_config(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config: " + path.string());
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument(path.string() + ": " + e.what());
    }
    const fs::path base = path.parent_path();
    auto resolve = [&](const std::string& p) {
        fs::path fp(p);
        return fp.is_absolute() || base.empty() ? fp : base / fp;
    };

    PipelineConfig c;
    try {
        if (j.contains("rasters")) {
            if (j["rasters"].is_array()) {
                for (const auto& r : j["rasters"]) c.rasters.push_back(resolve(r.get<std::string>()));
            } else {
                c.rasters.push_back(resolve(j["rasters"].get<std::string>()));
            }
        }
        if (j.contains("parcels")) c.parcels = resolve(j["parcels"].get<std::string>());
        if (j.contains("weather")) c.weather = resolve(j["weather"].get<std::string>());
        if (j.contains("scene")) c.scene = resolve(j["scene"].get<std::string>());
        if (j.contains("zonal_csv")) c.zonal_csv = resolve(j["zonal_csv"].get<std::string>());
        if (j.contains("out")) c.out = resolve(j["out"].get<std::string>());
        if (j.contains("multilook")) {
            const auto& m = j["multilook"];
            if (m.is_string()) {
                std::tie(c.multilook_x, c.multilook_y) = parse_window(m.get<std::string>());
            } else {
                c.multilook_x = m.at(0).get<int>();
                c.multilook_y = m.at(1).get<int>();
            }
        }
        if (j.contains("boxcar") && !j["boxcar"].is_null()) c.boxcar = j["boxcar"].get<int>();
        if (j.contains("erode")) c.erode = j["erode"].get<int>();
        if (j.contains("resample")) c.resample = parse_resample_method(j["resample"].get<std::string>());
        if (j.contains("t_base")) c.t_base = j["t_base"].get<double>();
        if (j.contains("cdd_start") && !j["cdd_start"].is_null()) {
            c.cdd_start = parse_date(j["cdd_start"].get<std::string>());
        }
        if (j.contains("k_biom")) c.k_biom = j["k_biom"].get<double>();
        if (j.contains("max_gap_days")) c.max_gap_days = j["max_gap_days"].get<int>();
        if (j.contains("abscissa")) c.abscissa = trend::parse_abscissa(j["abscissa"].get<std::string>());
        if (j.contains("trend_index")) c.trend_index = j["trend_index"].get<std::string>();
        if (j.contains("correlations")) {
            c.correlations.clear();
            for (const auto& p : j["correlations"]) {
                c.correlations.emplace_back(p.at(0).get<std::string>(), p.at(1).get<std::string>());
            }
        }
        if (j.contains("seed") && !j["seed"].is_null()) c.seed = j["seed"].get<std::uint64_t>();
    } catch (const json::exception& e) {
        throw std::invalid_argument(path.string() + ": " + e.what());
    }
    return c;
}

namespace {

void require_file(const fs::path& p, const char* what) {
    if (p.empty()) throw std::invalid_argument(std::string("no ") + what + " configured");
    if (!fs::exists(p)) throw std::invalid_argument(std::string(what) + " not found: " + p.string());
}

void require_rasters(const PipelineConfig& c) {
    if (c.rasters.empty()) throw std::invalid_argument("no raster inputs configured");
    for (const auto& p : c.rasters) {
        if (!fs::exists(p)) throw std::invalid_argument("raster input not found: " + p.string());
    }
}

bool is_bundle_header(const fs::path& p) {
    if (p.extension() != ".json") return false;
    std::ifstream in(p);
    const json j = json::parse(in, nullptr, /*allow_exceptions=*/false);
    return j.is_object() && j.contains("dtype") && j.contains("bands");
}

std::string write_text(const fs::path& path, const std::string& text) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << text;
    if (!out) throw std::runtime_error("write failed: " + path.string());
    return text;
}

std::string write_table(const fs::path& path, const csv::Table& t) {
    return write_text(path, csv::to_string(t));
}

}  // namespace

std::vector<fs::path> list_bundles(const std::vector<fs::path>& inputs) {
    std::vector<fs::path> out;
    for (const auto& in : inputs) {
        if (fs::is_directory(in)) {
            for (const auto& entry : fs::directory_iterator(in)) {
                if (entry.is_regular_file() && is_bundle_header(entry.path())) out.push_back(entry.path());
            }
        } else if (is_bundle_header(header_path(in))) {
            out.push_back(header_path(in));
        } else {
            throw std::invalid_argument("not a raster bundle: " + in.string());
        }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

std::string index_stem(std::string_view index, const std::optional<Date>& timestamp, Orbit orbit,
                       std::string_view fallback) {
    std::string stem(index);
    if (!timestamp) return stem + "_" + std::string(fallback);
    stem += "_" + format_date(*timestamp);
    if (orbit != Orbit::None) stem += "_" + std::string(orbit_tag(orbit));
    return stem;
}

// ---------------------------------------------------------------------------

CommandReport cmd_synth(const PipelineConfig& config) {
    require_file(config.scene, "scene file");
    const auto scenes = synth::load_scenes(config.scene, config.seed);
    CommandReport report;
    std::set<std::string> stems;
    for (std::size_t k = 0; k < scenes.size(); ++k) {
        const auto stem = synth::scene_stem(scenes[k], k);
        if (!stems.insert(stem).second) {
            throw std::invalid_argument("two scenes map to the same output name " + stem);
        }
        const auto result = synth::generate_scene(scenes[k]);
        if (result.overlapping_pixels > 0) {
            report.warnings.push_back(stem + ": " + std::to_string(result.overlapping_pixels) +
                                      " pixels covered by overlapping regions (first region wins)");
        }
        const auto path = config.out / (stem + ".json");
        write_bundle(sar::to_bundle(result.c2), path);
        report.outputs.push_back(path);
        report.payload += path.string() + "\n";
    }
    return report;
}

CommandReport cmd_sar_index(const PipelineConfig& config) {
    require_rasters(config);
    if (config.multilook_x < 1 || config.multilook_y < 1) {
        throw std::invalid_argument("multilook window must be >= 1");
    }
    if (config.boxcar && (*config.boxcar < 1 || *config.boxcar % 2 == 0)) {
        throw std::invalid_argument("boxcar window must be odd and >= 1");
    }

    CommandReport report;
    std::vector<Raster> outputs;
    std::vector<std::string> stems;
    for (const auto& path : list_bundles(config.rasters)) {
        const auto bundle = read_bundle(path);
        sar::C2Raster c2;
        bool grd = false;
        if (bundle.find_band("C11")) {
            c2 = sar::c2_from_bundle(bundle);
        } else if (bundle.find_band("VV") && bundle.find_band("VH")) {
            // Detected data: carry the intensities through the C2 window operations.
            grd = true;
            const auto vv = bundle.band_raster(*bundle.find_band("VV"));
            const auto vh = bundle.band_raster(*bundle.find_band("VH"));
            c2 = sar::C2Raster::filled(bundle.spec, {});
            c2.timestamp = bundle.timestamp;
            c2.orbit = bundle.orbit;
            for (std::size_t i = 0; i < vv.values.size(); ++i) {
                if (vv.valid_at(i) && vh.valid_at(i)) {
                    c2.set_pixel(i, {vv.values[i], vh.values[i], 0.0, 0.0});
                } else {
                    c2.set_nodata(i);
                }
            }
        } else {
            report.skipped.push_back(path.filename().string() + ": neither C2 nor VV/VH bands");
            continue;
        }

        c2 = sar::multilook(c2, config.multilook_x, config.multilook_y);
        if (config.boxcar) c2 = sar::boxcar_filter(c2, *config.boxcar);

        sar::IndexResult result;
        if (grd) {
            Raster vv{c2.spec, c2.c11, kNaN, "VV", c2.timestamp, c2.orbit};
            Raster vh{c2.spec, c2.c22, kNaN, "VH", c2.timestamp, c2.orbit};
            result = sar::dprvi_grd_raster(vh, vv);
            if (result.clamped_pixels > 0) {
                report.warnings.push_back(path.filename().string() + ": " +
                                          std::to_string(result.clamped_pixels) +
                                          " pixels with VH > VV clamped to q = 1");
            }
        } else {
            result = sar::dprvi_raster(c2);
        }
        if (result.invalid_pixels > 0) {
            report.warnings.push_back(path.filename().string() + ": " +
                                      std::to_string(result.invalid_pixels) + " nodata pixels");
        }
        stems.push_back(index_stem("DpRVI", result.raster.timestamp, result.raster.orbit,
                                   path.stem().string()));
        outputs.push_back(std::move(result.raster));
    }
    if (outputs.empty()) throw std::runtime_error("sar-index: no SAR bundles found");
    assert_aligned(std::span<const Raster>(outputs));

    for (std::size_t k = 0; k < outputs.size(); ++k) {
        const auto path = config.out / (stems[k] + ".json");
        save_raster(outputs[k], path);
        report.outputs.push_back(path);
        report.payload += path.string() + "\n";
    }
    return report;
}

CommandReport cmd_optical(const PipelineConfig& config) {
    require_rasters(config);
    CommandReport report;

    struct DateGroup {
        std::map<std::string, Raster> bands;
        std::vector<Raster> lai;
    };
    std::map<std::string, DateGroup> groups;  // keyed by ISO date (or file stem)
    static const std::vector<std::string> kBands{"B4", "B5", "B8", "B11", "B12"};

    for (const auto& path : list_bundles(config.rasters)) {
        const auto bundle = read_bundle(path);
        const std::string key =
            bundle.timestamp ? format_date(*bundle.timestamp) : path.stem().string();
        auto& group = groups[key];
        for (std::size_t b = 0; b < bundle.bands.size(); ++b) {
            const auto& name = bundle.bands[b].name;
            if (name == "LAI") {
                group.lai.push_back(bundle.band_raster(b));
            } else if (std::find(kBands.begin(), kBands.end(), name) != kBands.end()) {
                if (!group.bands.emplace(name, bundle.band_raster(b)).second) {
                    report.warnings.push_back(key + ": duplicate band " + name + " in " +
                                              path.filename().string() + " ignored");
                }
            }
        }
    }

    for (auto& [key, group] : groups) {
        for (const auto& lai : group.lai) {
            auto result = optical::ingest_lai(lai);
            if (result.rejected_pixels > 0) {
                report.warnings.push_back(key + ": " + std::to_string(result.rejected_pixels) +
                                          " LAI pixels outside [0, 10] set to nodata");
            }
            const auto path = config.out / (index_stem("LAI", result.raster.timestamp,
                                                       Orbit::None, key) + ".json");
            save_raster(result.raster, path);
            report.outputs.push_back(path);
            report.payload += path.string() + "\n";
        }
        if (group.bands.empty()) continue;

        std::vector<std::string> missing;
        for (const auto& b : kBands) {
            if (!group.bands.count(b)) missing.push_back(b);
        }
        if (!missing.empty()) {
            std::string list;
            for (const auto& m : missing) list += (list.empty() ? "" : ",") + m;
            report.skipped.push_back(key + ": missing band(s) " + list);
            continue;
        }

        // The NIR band defines the output grid; coarser bands are brought onto it.
        const GridSpec target = group.bands.at("B8").spec;
        optical::BandSet set;
        std::optional<Date> ts;
        for (auto& [name, raster] : group.bands) {
            if (!(raster.spec == target)) raster = resample(raster, target, config.resample);
            if (!ts) ts = raster.timestamp;
        }
        set.b4 = group.bands.at("B4");
        set.b5 = group.bands.at("B5");
        set.b8 = group.bands.at("B8");
        set.b11 = group.bands.at("B11");
        set.b12 = group.bands.at("B12");
        set.timestamp = ts;

        for (auto* fn : {&optical::ndvi, &optical::svhi}) {
            auto result = fn(set);
            const auto path = config.out / (index_stem(result.raster.band_name,
                                                       result.raster.timestamp, Orbit::None, key) +
                                            ".json");
            save_raster(result.raster, path);
            report.outputs.push_back(path);
            report.payload += path.string() + "\n";
        }
    }
    if (report.outputs.empty()) throw std::runtime_error("optical-index: nothing produced");
    return report;
}

CommandReport cmd_zonal(const PipelineConfig& config) {
    require_rasters(config);
    require_file(config.parcels, "parcels file");
    if (config.erode < 0) throw std::invalid_argument("erosion must be >= 0");
    const auto parcel_list = parcels::load_parcels(config.parcels);
    if (parcel_list.empty()) throw std::invalid_argument("parcels file has no features");

    CommandReport report;
    std::vector<std::pair<GridSpec, std::vector<parcels::ParcelMask>>> mask_cache;
    auto masks_for = [&](const GridSpec& spec) -> const std::vector<parcels::ParcelMask>& {
        for (const auto& [s, m] : mask_cache) {
            if (s == spec) return m;
        }
        std::vector<parcels::ParcelMask> masks(parcel_list.size());
        const auto n = static_cast<std::ptrdiff_t>(parcel_list.size());
#pragma omp parallel for schedule(dynamic)
        for (std::ptrdiff_t k = 0; k < n; ++k) {
            masks[k] = parcels::erode(parcels::rasterize(parcel_list[k], spec), config.erode);
        }
        for (const auto& m : masks) {
            if (m.empty()) {
                report.skipped.push_back("parcel " + m.parcel_id + ": empty mask on grid " +
                                         describe(spec));
            }
        }
        mask_cache.emplace_back(spec, std::move(masks));
        return mask_cache.back().second;
    };

    std::vector<parcels::ZonalStats> rows;
    for (const auto& path : list_bundles(config.rasters)) {
        const auto bundle = read_bundle(path);
        if (bundle.bands.size() != 1) continue;  // index products are single-band
        const auto raster = bundle.band_raster(0);
        const auto& masks = masks_for(raster.spec);
        const auto stats = parcels::zonal_stats_many(raster, masks);
        for (std::size_t k = 0; k < stats.size(); ++k) {
            if (stats[k]) {
                rows.push_back(*stats[k]);
            } else if (!masks[k].empty()) {
                report.skipped.push_back("parcel " + masks[k].parcel_id + ": no valid pixels in " +
                                         path.filename().string());
            }
        }
    }

    std::map<std::string, std::size_t> parcel_rank;
    for (std::size_t k = 0; k < parcel_list.size(); ++k) parcel_rank.emplace(parcel_list[k].id, k);
    std::stable_sort(rows.begin(), rows.end(), [&](const auto& l, const auto& r) {
        if (l.band_name != r.band_name) return l.band_name < r.band_name;
        if (l.timestamp != r.timestamp) {
            if (!l.timestamp || !r.timestamp) return !l.timestamp;
            return days_between(*l.timestamp, *r.timestamp) > 0;
        }
        if (l.orbit != r.orbit) return orbit_tag(l.orbit) < orbit_tag(r.orbit);
        return parcel_rank.at(l.parcel_id) < parcel_rank.at(r.parcel_id);
    });

    const auto path = config.out / "zonal.csv";
    report.payload = write_table(path, parcels::zonal_table(rows));
    report.outputs.push_back(path);
    return report;
}

namespace {

phenology::DegreeDaySeries degree_days_from(const PipelineConfig& config) {
    require_file(config.weather, "weather file");
    const auto records = phenology::load_weather(config.weather);
    return config.cdd_start ? phenology::accumulate_cdd(records, config.t_base, *config.cdd_start)
                            : phenology::accumulate_cdd(records, config.t_base);
}

void report_gaps(const phenology::DegreeDaySeries& series, CommandReport& report) {
    if (series.missing_days.empty()) return;
    report.warnings.push_back(std::to_string(series.missing_days.size()) +
                              " days without weather records contribute 0 degree days (first: " +
                              format_date(series.missing_days.front()) + ")");
}

}  // namespace

CommandReport cmd_degree_days(const PipelineConfig& config) {
    CommandReport report;
    const auto series = degree_days_from(config);
    report_gaps(series, report);

    const auto dd_path = config.out / "degree_days.csv";
    report.payload = write_table(dd_path, phenology::degree_day_table(series));
    report.outputs.push_back(dd_path);

    const auto proxy = phenology::biomass_proxy(series, config.k_biom);
    csv::Table bb;
    bb.header = {"date", "bb"};
    for (const auto& e : proxy.entries) {
        bb.rows.push_back({format_date(e.date), csv::format_number(e.bb)});
    }
    const auto bb_path = config.out / "biomass.csv";
    write_table(bb_path, bb);
    report.outputs.push_back(bb_path);
    return report;
}

namespace {

struct SeriesKey {
    std::string parcel;
    std::string index;
    Orbit orbit;
    bool operator<(const SeriesKey& o) const {
        return std::tie(parcel, index, orbit) < std::tie(o.parcel, o.index, o.orbit);
    }
};

parcels::Orientation orientation_from_id(std::string_view id) {
    if (id.starts_with("EW")) return parcels::Orientation::EW;
    if (id.starts_with("NS")) return parcels::Orientation::NS;
    return parcels::Orientation::Other;
}

std::string opt_number(const std::optional<double>& v) {
    return v ? csv::format_number(*v) : std::string{};
}

}  // namespace

CommandReport cmd_trend(const PipelineConfig& config) {
    const fs::path zonal_path = config.zonal_csv.empty() ? config.out / "zonal.csv" : config.zonal_csv;
    require_file(zonal_path, "zonal csv");
    const auto stats = parcels::zonal_from_table(csv::read(zonal_path));

    CommandReport report;
    std::optional<phenology::DegreeDaySeries> dd;
    if (config.abscissa == trend::Abscissa::CDD) {
        dd = degree_days_from(config);
        report_gaps(*dd, report);
    }

    std::map<std::string, parcels::Orientation> orientation;
    if (!config.parcels.empty()) {
        require_file(config.parcels, "parcels file");
        for (const auto& p : parcels::load_parcels(config.parcels)) orientation[p.id] = p.orientation;
    }
    auto orientation_of = [&](const std::string& id) {
        const auto it = orientation.find(id);
        return it != orientation.end() ? it->second : orientation_from_id(id);
    };

    // Group rows, remembering first-appearance order of parcels.
    std::map<SeriesKey, std::vector<parcels::ZonalStats>> grouped;
    std::vector<std::string> parcel_order;
    for (const auto& s : stats) {
        if (std::find(parcel_order.begin(), parcel_order.end(), s.parcel_id) == parcel_order.end()) {
            parcel_order.push_back(s.parcel_id);
        }
        grouped[{s.parcel_id, s.band_name, s.orbit}].push_back(s);
    }
    const Orbit kOrbits[] = {Orbit::Ascending, Orbit::Descending, Orbit::None};

    // Parabolic trend per parcel and orbit.
    csv::Table trend_t;
    trend_t.header = {"parcel_id", "orbit", "peak_date", "fit_r", "fit_r2", "a", "b", "c",
                      "vertex_x", "n"};
    struct GroupAcc {
        std::size_t n = 0;
        double r = 0.0, r2 = 0.0;
    };
    std::map<std::pair<parcels::Orientation, Orbit>, GroupAcc> groups;

    for (const auto& parcel : parcel_order) {
        for (const Orbit orbit : kOrbits) {
            const auto it = grouped.find({parcel, config.trend_index, orbit});
            if (it == grouped.end()) continue;
            const std::string unit = parcel + "/" + std::string(orbit_tag(orbit));
            trend::TimeSeries series;
            try {
                series = trend::assemble_series(it->second, config.abscissa, dd ? &*dd : nullptr);
            } catch (const std::exception& e) {
                report.skipped.push_back(unit + ": " + e.what());
                continue;
            }
            const auto pk = trend::peak(series);
            if (pk.tie) report.warnings.push_back(unit + ": tied peak, earliest date reported");
            std::vector<std::string> row{parcel, std::string(orbit_tag(orbit)), format_date(pk.date)};
            try {
                const auto fit = trend::fit_parabola(series);
                if (fit.degenerate) report.warnings.push_back(unit + ": degenerate fit");
                row.insert(row.end(), {csv::format_number(fit.r), csv::format_number(fit.r_squared),
                                       csv::format_number(fit.a), csv::format_number(fit.b),
                                       csv::format_number(fit.c), opt_number(fit.vertex_x),
                                       std::to_string(fit.n)});
                auto& acc = groups[{orientation_of(parcel), orbit}];
                ++acc.n;
                acc.r += fit.r;
                acc.r2 += fit.r_squared;
            } catch (const trend::RankDeficientError& e) {
                report.skipped.push_back(unit + ": " + e.what());
                row.insert(row.end(), {"", "", "", "", "", "", std::to_string(series.samples.size())});
            }
            trend_t.rows.push_back(std::move(row));
        }
    }
    const auto trend_path = config.out / "trend.csv";
    report.payload = write_table(trend_path, trend_t);
    report.outputs.push_back(trend_path);

    csv::Table groups_t;
    groups_t.header = {"orientation", "orbit", "n_parcels", "mean_fit_r", "mean_fit_r2"};
    for (const auto& [key, acc] : groups) {
        groups_t.rows.push_back({std::string(parcels::orientation_tag(key.first)),
                                 std::string(orbit_tag(key.second)), std::to_string(acc.n),
                                 csv::format_number(acc.r / acc.n),
                                 csv::format_number(acc.r2 / acc.n)});
    }
    const auto groups_path = config.out / "trend_groups.csv";
    write_table(groups_path, groups_t);
    report.outputs.push_back(groups_path);

    // Cross-index correlation on date-paired parcel means.
    csv::Table corr_t;
    corr_t.header = {"index_a", "index_b", "parcel_id", "orbit", "n", "r", "max_gap_days"};
    for (const auto& [ia, ib] : config.correlations) {
        std::vector<trend::ScatterRecord> scatter;
        std::map<Orbit, std::pair<std::vector<double>, std::vector<double>>> pooled;
        bool any = false;
        for (const auto& parcel : parcel_order) {
            for (const Orbit orbit : kOrbits) {
                const auto a_it = grouped.find({parcel, ia, orbit});
                if (a_it == grouped.end()) continue;
                auto b_it = grouped.find({parcel, ib, orbit});
                if (b_it == grouped.end()) b_it = grouped.find({parcel, ib, Orbit::None});
                if (b_it == grouped.end()) continue;
                any = true;
                const std::string unit = ia + "~" + ib + " " + parcel + "/" +
                                         std::string(orbit_tag(orbit));
                trend::TimeSeries sa, sb;
                try {
                    sa = trend::assemble_series(a_it->second, trend::Abscissa::DoY);
                    sb = trend::assemble_series(b_it->second, trend::Abscissa::DoY);
                } catch (const std::exception& e) {
                    report.skipped.push_back(unit + ": " + e.what());
                    continue;
                }
                const auto pairs = trend::pair_dates(sa, sb, config.max_gap_days);
                const auto recs = trend::scatter_export(pairs, {parcel, ia, ib});
                scatter.insert(scatter.end(), recs.begin(), recs.end());
                std::vector<double> xa, xb;
                for (const auto& p : pairs) {
                    xa.push_back(p.y_a);
                    xb.push_back(p.y_b);
                }
                auto& pool = pooled[orbit];
                pool.first.insert(pool.first.end(), xa.begin(), xa.end());
                pool.second.insert(pool.second.end(), xb.begin(), xb.end());
                std::string r_text;
                try {
                    r_text = csv::format_number(trend::pearson(xa, xb));
                } catch (const std::invalid_argument& e) {
                    report.skipped.push_back(unit + ": " + e.what());
                }
                corr_t.rows.push_back({ia, ib, parcel, std::string(orbit_tag(orbit)),
                                       std::to_string(pairs.size()), r_text,
                                       std::to_string(config.max_gap_days)});
            }
        }
        if (!any) {
            report.skipped.push_back(ia + "~" + ib + ": no parcel has both indices");
            continue;
        }
        for (const Orbit orbit : kOrbits) {
            const auto it = pooled.find(orbit);
            if (it == pooled.end()) continue;
            std::string r_text;
            try {
                r_text = csv::format_number(trend::pearson(it->second.first, it->second.second));
            } catch (const std::invalid_argument& e) {
                report.skipped.push_back(ia + "~" + ib + " ALL/" + std::string(orbit_tag(orbit)) +
                                         ": " + e.what());
            }
            corr_t.rows.push_back({ia, ib, "ALL", std::string(orbit_tag(orbit)),
                                   std::to_string(it->second.first.size()), r_text,
                                   std::to_string(config.max_gap_days)});
        }
        const auto scatter_path = config.out / ("scatter_" + ia + "_" + ib + ".csv");
        write_table(scatter_path, trend::scatter_table(scatter));
        report.outputs.push_back(scatter_path);
    }
    const auto corr_path = config.out / "correlation.csv";
    write_table(corr_path, corr_t);
    report.outputs.push_back(corr_path);
    return report;
}

CommandReport cmd_report(const PipelineConfig& config) {
    const auto trend_path = config.out / "trend.csv";
    require_file(trend_path, "trend csv");
    const auto trend_t = csv::read(trend_path);

    std::ostringstream md;
    md << "# Vineyard index trend report\n\n";
    for (const Orbit orbit : {Orbit::Ascending, Orbit::Descending, Orbit::None}) {
        const auto tag = std::string(orbit_tag(orbit));
        std::vector<const std::vector<std::string>*> rows;
        for (const auto& row : trend_t.rows) {
            if (row[trend_t.column("orbit")] == tag) rows.push_back(&row);
        }
        if (rows.empty()) continue;
        md << "## " << (tag.empty() ? "No orbit" : tag) << "\n\n";
        md << "| Parcel | Peak | Fit r | Fit R^2 | Vertex x | n |\n";
        md << "|---|---|---|---|---|---|\n";
        for (const auto* row : rows) {
            auto cell = [&](const char* col) { return (*row)[trend_t.column(col)]; };
            auto fixed = [&](const char* col) {
                const auto text = cell(col);
                if (text.empty()) return std::string("-");
                char buf[32];
                std::snprintf(buf, sizeof buf, "%.2f", csv::parse_number(text));
                return std::string(buf);
            };
            md << "| " << cell("parcel_id") << " | " << cell("peak_date") << " | " << fixed("fit_r")
               << " | " << fixed("fit_r2") << " | " << fixed("vertex_x") << " | " << cell("n")
               << " |\n";
        }
        md << "\n";
    }

    const auto groups_path = config.out / "trend_groups.csv";
    if (fs::exists(groups_path)) {
        const auto g = csv::read(groups_path);
        md << "## Group means\n\n| Orientation | Orbit | Parcels | Mean fit r | Mean fit R^2 |\n"
              "|---|---|---|---|---|\n";
        for (const auto& row : g.rows) {
            char r[32], r2[32];
            std::snprintf(r, sizeof r, "%.2f", csv::parse_number(row[g.column("mean_fit_r")]));
            std::snprintf(r2, sizeof r2, "%.2f", csv::parse_number(row[g.column("mean_fit_r2")]));
            md << "| " << row[g.column("orientation")] << " | " << row[g.column("orbit")] << " | "
               << row[g.column("n_parcels")] << " | " << r << " | " << r2 << " |\n";
        }
        md << "\n";
    }

    const auto corr_path = config.out / "correlation.csv";
    if (fs::exists(corr_path)) {
        const auto c = csv::read(corr_path);
        md << "## Pooled correlations\n\n| Index A | Index B | Orbit | n | r |\n|---|---|---|---|---|\n";
        for (const auto& row : c.rows) {
            if (row[c.column("parcel_id")] != "ALL") continue;
            const auto& r = row[c.column("r")];
            char buf[32] = "-";
            if (!r.empty()) std::snprintf(buf, sizeof buf, "%.3f", csv::parse_number(r));
            md << "| " << row[c.column("index_a")] << " | " << row[c.column("index_b")] << " | "
               << row[c.column("orbit")] << " | " << row[c.column("n")] << " | " << buf << " |\n";
        }
        md << "\n";
    }

    CommandReport report;
    const auto path = config.out / "report.md";
    report.payload = write_text(path, md.str());
    report.outputs.push_back(path);
    return report;
}

}  // namespace vinesar::pipeline
