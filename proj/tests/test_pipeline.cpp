#include <gtest/gtest.h>

#include <cstdio>
#include <fstream>
#include <sstream>

#include "campaign.hpp"
#include "vinesar/pipeline.hpp"
#include "vinesar/sar.hpp"

using namespace vinesar;
using namespace vinesar::pipeline;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    return fs::temp_directory_path() / "vinesar_pipeline_tests" / name;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

struct Run {
    int status;
    std::string out;
};

Run run_cli(const std::string& args) {
    const std::string cmd = std::string(VINESAR_CLI_PATH) + " " + args + " 2>&1";
    FILE* pipe = popen(cmd.c_str(), "r");
    std::string out;
    char buf[512];
    while (pipe && fgets(buf, sizeof buf, pipe)) out += buf;
    const int status = pipe ? pclose(pipe) : -1;
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

std::size_t count_files(const fs::path& dir, const std::string& prefix, const std::string& ext) {
    std::size_t n = 0;
    for (const auto& e : fs::directory_iterator(dir)) {
        const auto name = e.path().filename().string();
        if (name.starts_with(prefix) && e.path().extension() == ext) ++n;
    }
    return n;
}

// Full in-process pipeline over the synthetic campaign, shared by several tests.
class Campaign : public ::testing::Test {
protected:
    static void SetUpTestSuite() {
        files_ = campaign::write_inputs(scratch("campaign"));
        base_ = load_config(files_.config);
        base_.out = files_.root / "c2";
        cmd_synth(base_);

        auto sar = base_;
        sar.rasters = {files_.root / "c2"};
        sar.out = files_.root / "dprvi";
        cmd_sar_index(sar);

        auto opt = base_;
        opt.rasters = {files_.optical_in};
        opt.out = files_.root / "optical";
        cmd_optical(opt);

        auto zon = base_;
        zon.rasters = {files_.root / "dprvi", files_.root / "optical"};
        zon.out = files_.root / "tables";
        cmd_zonal(zon);
        cmd_degree_days(zon);
        cmd_trend(zon);
        cmd_report(zon);
    }

    static campaign::Files files_;
    static PipelineConfig base_;
};

campaign::Files Campaign::files_;
PipelineConfig Campaign::base_;

}  // namespace

TEST(Config, ParseWindowAndRelativePaths) {
    EXPECT_EQ(parse_window("4x1"), (std::pair{4, 1}));
    EXPECT_EQ(parse_window("3X5"), (std::pair{3, 5}));
    EXPECT_THROW(parse_window("4"), std::invalid_argument);
    EXPECT_THROW(parse_window("0x1"), std::invalid_argument);

    const auto dir = scratch("config");
    fs::create_directories(dir);
    std::ofstream(dir / "c.json") << R"({"parcels":"p.geojson","out":"o","multilook":[2,3],
      "boxcar":5,"abscissa":"DoY","seed":12})";
    const auto c = load_config(dir / "c.json");
    EXPECT_EQ(c.parcels, dir / "p.geojson");
    EXPECT_EQ(c.out, dir / "o");
    EXPECT_EQ(c.multilook_x, 2);
    EXPECT_EQ(c.multilook_y, 3);
    EXPECT_EQ(c.boxcar, 5);
    EXPECT_EQ(c.abscissa, trend::Abscissa::DoY);
    EXPECT_EQ(c.seed, 12u);
}

TEST_F(Campaign, SynthWritesTwelveDatedBundles) {
    EXPECT_EQ(count_files(files_.root / "c2", "C2_", ".json"), 12u);
    for (const auto& a : campaign::kAcquisitions) {
        EXPECT_TRUE(fs::exists(files_.root / "c2" / ("C2_" + std::string(a.date) + "_" + a.orbit + ".json")));
        EXPECT_TRUE(fs::exists(files_.root / "c2" / ("C2_" + std::string(a.date) + "_" + a.orbit + ".bin")));
    }
}

TEST_F(Campaign, SarIndexEmitsTwelveAlignedBundles) {
    std::vector<Raster> stack;
    for (const auto& a : campaign::kAcquisitions) {
        stack.push_back(load_raster(files_.root / "dprvi" /
                                    ("DpRVI_" + std::string(a.date) + "_" + a.orbit)));
        EXPECT_EQ(stack.back().spec.width, campaign::kMlWidth);
        EXPECT_DOUBLE_EQ(stack.back().spec.pixel_size_x, 20.0);
    }
    EXPECT_NO_THROW(assert_aligned(std::span<const Raster>(stack)));
}

TEST_F(Campaign, OpticalProducts) {
    EXPECT_EQ(count_files(files_.root / "optical", "NDVI_", ".json"), 6u);
    EXPECT_EQ(count_files(files_.root / "optical", "SVHI_", ".json"), 6u);
    EXPECT_EQ(count_files(files_.root / "optical", "LAI_", ".json"), 6u);
    const auto ndvi = load_raster(files_.root / "optical" / "NDVI_2023-06-25");
    EXPECT_EQ(ndvi.spec.width, 2 * campaign::kMlWidth);
}

TEST_F(Campaign, ZonalRowsPerIndex) {
    const auto t = csv::read(files_.root / "tables" / "zonal.csv");
    std::map<std::string, int> per_band;
    for (const auto& row : t.rows) per_band[row[t.column("band")]]++;
    EXPECT_EQ(per_band["DpRVI"], 144);
    EXPECT_EQ(per_band["NDVI"], 72);
    EXPECT_EQ(per_band["SVHI"], 72);
    EXPECT_EQ(per_band["LAI"], 72);
}

TEST_F(Campaign, DegreeDaysHitTableValues) {
    const auto t = csv::read(files_.root / "tables" / "degree_days.csv");
    std::map<std::string, double> cdd;
    for (const auto& row : t.rows) cdd[row[0]] = csv::parse_number(row[3]);
    for (const auto& a : campaign::kAcquisitions) EXPECT_DOUBLE_EQ(cdd.at(a.date), a.cdd) << a.date;
}

TEST_F(Campaign, TrendRecoversPlantedParabola) {
    const auto t = csv::read(files_.root / "tables" / "trend.csv");
    ASSERT_EQ(t.rows.size(), 24u);
    for (const auto& row : t.rows) {
        const auto id = row[t.column("parcel_id")];
        const int k = static_cast<int>(std::find(campaign::kParcelIds.begin(),
                                                 campaign::kParcelIds.end(), id) -
                                       campaign::kParcelIds.begin());
        const auto orbit = row[t.column("orbit")];
        EXPECT_GE(csv::parse_number(row[t.column("fit_r")]), 0.95) << id;
        const auto dates = campaign::orbit_dates(orbit);
        const auto at = [&](const std::string& d) {
            return std::find(dates.begin(), dates.end(), d) - dates.begin();
        };
        EXPECT_LE(std::abs(at(row[t.column("peak_date")]) - at(campaign::expected_peak(k, orbit))), 1)
            << id << " " << orbit;
        EXPECT_NEAR(csv::parse_number(row[t.column("vertex_x")]), campaign::kVertexCdd[k], 25.0)
            << id << " " << orbit;
    }
    const auto groups = csv::read(files_.root / "tables" / "trend_groups.csv");
    EXPECT_EQ(groups.rows.size(), 4u);
    const auto report = slurp(files_.root / "tables" / "report.md");
    EXPECT_NE(report.find("| EW3 | 2023-07-27 |"), std::string::npos);
}

TEST_F(Campaign, NdviSvhiCorrelationIsHigh) {
    const auto t = csv::read(files_.root / "tables" / "correlation.csv");
    bool pooled = false;
    for (const auto& row : t.rows) {
        if (row[t.column("index_a")] == "NDVI" && row[t.column("index_b")] == "SVHI" &&
            row[t.column("parcel_id")] == "ALL") {
            pooled = true;
            EXPECT_EQ(row[t.column("n")], "72");
            EXPECT_GE(csv::parse_number(row[t.column("r")]), 0.95);
        }
    }
    EXPECT_TRUE(pooled);
    EXPECT_TRUE(fs::exists(files_.root / "tables" / "scatter_DpRVI_LAI.csv"));
}

TEST_F(Campaign, NdviOnlyZonalHasSeventyTwoRows) {
    auto c = base_;
    c.rasters.clear();
    for (const auto* d : campaign::kOpticalDates) {
        c.rasters.push_back(files_.root / "optical" / ("NDVI_" + std::string(d) + ".json"));
    }
    c.out = files_.root / "ndvi_only";
    cmd_zonal(c);
    EXPECT_EQ(csv::read(c.out / "zonal.csv").rows.size(), 72u);
}

TEST(SarIndex, UniformTrueCovarianceGivesSevenNinths) {
    const auto dir = scratch("uniform");
    fs::remove_all(dir);
    auto c2 = sar::C2Raster::filled({8, 4, 0, 0, 5, -20, "EPSG:32632"}, {1.0, 0.5, 0.0, 0.0});
    c2.timestamp = parse_date("2023-06-21");
    c2.orbit = Orbit::Ascending;
    write_bundle(sar::to_bundle(c2), dir / "in" / "C2_x.json");
    PipelineConfig cfg;
    cfg.rasters = {dir / "in"};
    cfg.out = dir / "out";
    for (auto [wx, wy] : {std::pair{1, 1}, {4, 1}}) {
        cfg.multilook_x = wx;
        cfg.multilook_y = wy;
        cmd_sar_index(cfg);
        const auto r = load_raster(cfg.out / "DpRVI_2023-06-21_ASC");
        EXPECT_EQ(r.spec.width, 8 / wx);
        for (float v : r.values) EXPECT_NEAR(v, 7.0 / 9.0, 1e-6);
    }
}

TEST(SarIndex, MisalignedDatesAbort) {
    const auto dir = scratch("misaligned");
    fs::remove_all(dir);
    auto a = sar::C2Raster::filled({8, 4, 0, 0, 5, -20, "EPSG:32632"}, {1.0, 0.5, 0.0, 0.0});
    a.timestamp = parse_date("2023-03-28");
    auto b = a;
    b.timestamp = parse_date("2023-04-21");
    b.spec.origin_x += 10.0;
    write_bundle(sar::to_bundle(a), dir / "in" / "a.json");
    write_bundle(sar::to_bundle(b), dir / "in" / "b.json");
    PipelineConfig cfg;
    cfg.rasters = {dir / "in"};
    cfg.out = dir / "out";
    EXPECT_THROW(cmd_sar_index(cfg), AlignmentError);
}

TEST(Optical, RasterScaleExamplesAndMissingBand) {
    const auto dir = scratch("optical_small");
    fs::remove_all(dir);
    const GridSpec g{4, 4, 0, 40, 10, -10, "EPSG:32632"};
    RasterBundle equal{g, {{"B4", ""}, {"B5", ""}, {"B8", ""}, {"B11", ""}, {"B12", ""}},
                       std::vector<std::vector<float>>(5, std::vector<float>(16, 0.2f))};
    equal.timestamp = parse_date("2023-05-26");
    write_bundle(equal, dir / "in" / "eq.json");
    RasterBundle red0{g, {{"B4", ""}, {"B8", ""}}, {std::vector<float>(16, 0.0f),
                                                    std::vector<float>(16, 0.4f)}};
    red0.timestamp = parse_date("2023-06-25");
    write_bundle(red0, dir / "in" / "red0.json");

    PipelineConfig cfg;
    cfg.rasters = {dir / "in"};
    cfg.out = dir / "out";
    const auto rep = cmd_optical(cfg);
    for (float v : load_raster(cfg.out / "SVHI_2023-05-26").values) EXPECT_EQ(v, 0.0f);
    for (float v : load_raster(cfg.out / "NDVI_2023-05-26").values) EXPECT_EQ(v, 0.0f);
    ASSERT_EQ(rep.skipped.size(), 1u);
    EXPECT_NE(rep.skipped[0].find("2023-06-25"), std::string::npos);
    EXPECT_FALSE(fs::exists(cfg.out / "NDVI_2023-06-25.json"));
}

TEST(Trend, ShortSeriesIsFlaggedNotFatal) {
    const auto dir = scratch("short");
    fs::remove_all(dir);
    fs::create_directories(dir);
    std::vector<parcels::ZonalStats> rows;
    for (int i = 0; i < 2; ++i) {
        rows.push_back({"EW1", "DpRVI", add_days(parse_date("2023-03-29"), 30 * i), Orbit::Ascending,
                        9, 0.4 + 0.1 * i, 0, 0, 1});
    }
    for (int i = 0; i < 4; ++i) {
        rows.push_back({"NS1", "DpRVI", add_days(parse_date("2023-03-29"), 30 * i), Orbit::Ascending,
                        9, 0.4 + 0.1 * i - 0.03 * i * i, 0, 0, 1});
    }
    csv::write(dir / "zonal.csv", parcels::zonal_table(rows));
    PipelineConfig cfg;
    cfg.out = dir;
    cfg.abscissa = trend::Abscissa::DoY;
    const auto rep = cmd_trend(cfg);
    const auto t = csv::read(dir / "trend.csv");
    ASSERT_EQ(t.rows.size(), 2u);
    EXPECT_EQ(t.rows[0][t.column("fit_r")], "");
    EXPECT_EQ(t.rows[0][t.column("n")], "2");
    EXPECT_NE(t.rows[1][t.column("fit_r")], "");
    EXPECT_FALSE(rep.skipped.empty());
}

TEST(Cli, InvalidSceneFailsWithMessage) {
    const auto dir = scratch("cli_bad");
    fs::remove_all(dir);
    fs::create_directories(dir);
    std::ofstream(dir / "bad.json") << R"({"width": 4, "height": 4, "looks": 0})";
    const auto r = run_cli("synth --scene " + (dir / "bad.json").string() + " --out " +
                           (dir / "out").string());
    EXPECT_NE(r.status, 0);
    EXPECT_NE(r.out.find("error"), std::string::npos);

    EXPECT_NE(run_cli("synth --scene " + (dir / "missing.json").string()).status, 0);
    EXPECT_NE(run_cli("no-such-command").status, 0);
}

TEST(Cli, SeededRerunIsByteIdentical) {
    const auto files = campaign::write_inputs(scratch("cli_det"), 4, 11);
    const std::string cfg = " --config " + files.config.string();
    auto run_all = [&](const std::string& tag) {
        const auto root = files.root / tag;
        const auto c2 = (root / "c2").string(), dp = (root / "dprvi").string(),
                   tab = (root / "tables").string();
        EXPECT_EQ(run_cli("synth" + cfg + " --seed 99 --out " + c2).status, 0);
        EXPECT_EQ(run_cli("sar-index" + cfg + " --in " + c2 + " --out " + dp).status, 0);
        EXPECT_EQ(run_cli("zonal" + cfg + " --in " + dp + " --out " + tab).status, 0);
        EXPECT_EQ(run_cli("trend" + cfg + " --out " + tab).status, 0);
        return root;
    };
    const auto a = run_all("a"), b = run_all("b");
    std::size_t compared = 0;
    for (const auto& e : fs::recursive_directory_iterator(a)) {
        if (!e.is_regular_file()) continue;
        const auto rel = fs::relative(e.path(), a);
        ASSERT_TRUE(fs::exists(b / rel)) << rel;
        EXPECT_EQ(slurp(e.path()), slurp(b / rel)) << rel;
        ++compared;
    }
    EXPECT_GT(compared, 24u);
}

TEST(Cli, StdoutFlagEchoesCsv) {
    const auto files = campaign::write_inputs(scratch("cli_stdout"), 4, 1);
    const auto r = run_cli("degree-days --config " + files.config.string() + " --out " +
                           (files.root / "t").string() + " --tbase 10 --stdout");
    EXPECT_EQ(r.status, 0);
    EXPECT_NE(r.out.find("date,doy,gdd,cdd"), std::string::npos);
    const auto quiet = run_cli("degree-days --config " + files.config.string() + " --out " +
                               (files.root / "t").string());
    EXPECT_EQ(quiet.out.find("date,doy,gdd,cdd"), std::string::npos);
}
