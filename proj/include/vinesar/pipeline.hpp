#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "vinesar/raster.hpp"
#include "vinesar/trend.hpp"

namespace vinesar::pipeline {

namespace fs = std::filesystem;

/// Settings shared by every subcommand. Loaded from a JSON file; CLI flags
/// override individual fields afterwards.
struct PipelineConfig {
    std::vector<fs::path> rasters;  // bundle files or directories of bundles
    fs::path parcels;
    fs::path weather;
    fs::path scene;
    fs::path zonal_csv;  // trend input; defaults to <out>/zonal.csv
    fs::path out = "out";

    int multilook_x = 4;  // range
    int multilook_y = 1;  // azimuth
    std::optional<int> boxcar;
    int erode = 1;
    ResampleMethod resample = ResampleMethod::Nearest;

    double t_base = 10.0;
    std::optional<Date> cdd_start;
    double k_biom = 1.0;

    int max_gap_days = 7;
    trend::Abscissa abscissa = trend::Abscissa::CDD;
    std::string trend_index = "DpRVI";
    std::vector<std::pair<std::string, std::string>> correlations{
        {"DpRVI", "LAI"}, {"DpRVI", "NDVI"}, {"NDVI", "SVHI"}};

    std::optional<std::uint64_t> seed;
    bool to_stdout = false;
};

/// Relative paths inside the file are resolved against the file's directory.
PipelineConfig load_config(const fs::path& path);

/// Parses "WxH" (e.g. "4x1").
std::pair<int, int> parse_window(std::string_view text);

/// Outcome of one subcommand. Fatal errors are thrown instead.
struct CommandReport {
    std::vector<fs::path> outputs;
    std::vector<std::string> warnings;
    std::vector<std::string> skipped;  // units (dates, parcels, series) left out
    std::string payload;               // primary CSV/text, echoed with --stdout
};

CommandReport cmd_synth(const PipelineConfig& config);
CommandReport cmd_sar_index(const PipelineConfig& config);
CommandReport cmd_optical(const PipelineConfig& config);
CommandReport cmd_zonal(const PipelineConfig& config);
CommandReport cmd_degree_days(const PipelineConfig& config);
CommandReport cmd_trend(const PipelineConfig& config);
CommandReport cmd_report(const PipelineConfig& config);

/// Bundle headers found in the given files/directories, sorted by path.
std::vector<fs::path> list_bundles(const std::vector<fs::path>& inputs);

/// `<index>_<date>[_<orbit>]`, or `<index>_<fallback>` without a timestamp.
std::string index_stem(std::string_view index, const std::optional<Date>& timestamp, Orbit orbit,
                       std::string_view fallback);

}  // namespace vinesar::pipeline
