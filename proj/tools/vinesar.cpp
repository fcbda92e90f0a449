// vinesar: vineyard SAR/optical index pipeline.
//
//   vinesar synth --config cfg.json --out c2/
//   vinesar sar-index --in c2/ --out dprvi/ --multilook 4x1
//   vinesar zonal --in dprvi/ --parcels parcels.geojson --out tables/
//   vinesar trend --out tables/ --weather weather.csv
//
// Logs go to stderr; data goes to files unless --stdout is given.

#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "vinesar/pipeline.hpp"

namespace {

using vinesar::pipeline::CommandReport;
using vinesar::pipeline::PipelineConfig;

struct Overrides {
    std::string config;
    std::string out;
    std::vector<std::string> inputs;
    std::string parcels;
    std::string weather;
    std::string scene;
    std::string zonal;
    std::string multilook;
    std::optional<int> boxcar;
    std::optional<int> erode;
    std::optional<double> tbase;
    std::optional<int> max_gap;
    std::optional<std::uint64_t> seed;
    std::string abscissa;
    std::string resample;
    bool to_stdout = false;
};

void add_common_flags(CLI::App* cmd, Overrides& o) {
    cmd->add_option("--config", o.config, "JSON configuration file");
    cmd->add_option("--out", o.out, "Output directory");
    cmd->add_option("--in", o.inputs, "Input bundle file or directory (repeatable)");
    cmd->add_option("--parcels", o.parcels, "Parcel GeoJSON");
    cmd->add_option("--weather", o.weather, "Weather CSV (date,tmin_c,tmax_c,precip_mm)");
    cmd->add_option("--scene", o.scene, "Synthetic scene or campaign JSON");
    cmd->add_option("--zonal", o.zonal, "Zonal statistics CSV (trend input)");
    cmd->add_option("--multilook", o.multilook, "Multilook window WxH (range x azimuth)");
    cmd->add_option("--boxcar", o.boxcar, "Odd boxcar speckle-filter window");
    cmd->add_option("--erode", o.erode, "Inward parcel buffer in pixels");
    cmd->add_option("--tbase", o.tbase, "Degree-day base temperature (C)");
    cmd->add_option("--max-gap", o.max_gap, "Maximum date gap for cross-sensor pairing (days)");
    cmd->add_option("--seed", o.seed, "Seed for synthetic scenes");
    cmd->add_option("--abscissa", o.abscissa, "Trend abscissa: CDD or DoY");
    cmd->add_option("--resample", o.resample, "Optical band resampling: nearest or bilinear");
    cmd->add_flag("--stdout", o.to_stdout, "Echo the primary output to stdout");
}

PipelineConfig build_config(const Overrides& o) {
    PipelineConfig c = o.config.empty() ? PipelineConfig{} : vinesar::pipeline::load_config(o.config);
    if (!o.out.empty()) c.out = o.out;
    if (!o.inputs.empty()) c.rasters.assign(o.inputs.begin(), o.inputs.end());
    if (!o.parcels.empty()) c.parcels = o.parcels;
    if (!o.weather.empty()) c.weather = o.weather;
    if (!o.scene.empty()) c.scene = o.scene;
    if (!o.zonal.empty()) c.zonal_csv = o.zonal;
    if (!o.multilook.empty()) {
        std::tie(c.multilook_x, c.multilook_y) = vinesar::pipeline::parse_window(o.multilook);
    }
    if (o.boxcar) c.boxcar = *o.boxcar;
    if (o.erode) c.erode = *o.erode;
    if (o.tbase) c.t_base = *o.tbase;
    if (o.max_gap) c.max_gap_days = *o.max_gap;
    if (o.seed) c.seed = *o.seed;
    if (!o.abscissa.empty()) c.abscissa = vinesar::trend::parse_abscissa(o.abscissa);
    if (!o.resample.empty()) c.resample = vinesar::parse_resample_method(o.resample);
    c.to_stdout = o.to_stdout;
    return c;
}

int emit(const std::string& name, const CommandReport& report, bool to_stdout) {
    for (const auto& w : report.warnings) std::cerr << name << ": warning: " << w << "\n";
    for (const auto& s : report.skipped) std::cerr << name << ": skipped: " << s << "\n";
    std::cerr << name << ": wrote " << report.outputs.size() << " file(s)";
    if (!report.skipped.empty()) std::cerr << ", skipped " << report.skipped.size() << " unit(s)";
    std::cerr << "\n";
    if (to_stdout) std::cout << report.payload;
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Dual-pol SAR and optical vegetation index pipeline for vineyard parcels"};
    app.require_subcommand(1);

    Overrides o;
    using Runner = CommandReport (*)(const PipelineConfig&);
    const std::pair<const char*, std::pair<const char*, Runner>> commands[] = {
        {"synth", {"Generate synthetic dual-pol C2 scenes", vinesar::pipeline::cmd_synth}},
        {"sar-index", {"Multilook, filter and compute DpRVI per date", vinesar::pipeline::cmd_sar_index}},
        {"optical-index", {"Compute NDVI and SVHI, ingest LAI", vinesar::pipeline::cmd_optical}},
        {"zonal", {"Per-parcel zonal statistics CSV", vinesar::pipeline::cmd_zonal}},
        {"degree-days", {"Growing degree days and cumulative CDD", vinesar::pipeline::cmd_degree_days}},
        {"trend", {"Parabolic trends, peaks and correlations", vinesar::pipeline::cmd_trend}},
        {"report", {"Markdown summary of trend outputs", vinesar::pipeline::cmd_report}},
    };
    std::vector<std::pair<CLI::App*, Runner>> subs;
    for (const auto& [name, info] : commands) {
        auto* sub = app.add_subcommand(name, info.first);
        add_common_flags(sub, o);
        subs.emplace_back(sub, info.second);
    }

    CLI11_PARSE(app, argc, argv);

    for (const auto& [sub, run] : subs) {
        if (!sub->parsed()) continue;
        const std::string name = sub->get_name();
        try {
            const auto config = build_config(o);
            return emit(name, run(config), config.to_stdout);
        } catch (const std::exception& e) {
            std::cerr << name << ": error: " << e.what() << "\n";
            return 1;
        }
    }
    return 1;
}
