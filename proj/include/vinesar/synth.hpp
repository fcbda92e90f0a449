#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "vinesar/sar.hpp"

namespace vinesar::synth {

/// Half-open pixel rectangle [x0, x1) x [y0, y1) in (column, row) coordinates.
struct PixelRect {
    int x0 = 0;
    int y0 = 0;
    int x1 = 0;
    int y1 = 0;

    bool contains(int col, int row) const { return col >= x0 && col < x1 && row >= y0 && row < y1; }
};

struct Region {
    PixelRect rect;
    sar::C2Pixel c2;
};

/// Synthetic dual-pol scene: every pixel draws a `looks`-look sample covariance
/// from the true covariance of the first region containing it, else `background`.
struct SceneSpec {
    GridSpec spec;
    sar::C2Pixel background{1.0, 1.0, 0.0, 0.0};
    std::vector<Region> regions;
    int looks = 1;
    std::uint64_t seed = 0;
    std::optional<Date> date;
    Orbit orbit = Orbit::None;

    /// Throws std::invalid_argument for a non-PSD or zero-trace covariance,
    /// looks < 1, or an invalid grid.
    void validate() const;
};

/// Throws std::invalid_argument unless `c2` is PSD (within sar::kPsdTolerance)
/// with positive trace.
void validate_true_c2(const sar::C2Pixel& c2);

using Rng = std::mt19937_64;

/// Seed of the independent stream used for pixel `index`.
std::uint64_t pixel_seed(std::uint64_t scene_seed, std::uint64_t index);

/// Mean of `looks` outer products of circular complex Gaussian 2-vectors with
/// covariance `true_c2` (drawn through its Cholesky factor).
sar::C2Pixel sample_c2(const sar::C2Pixel& true_c2, int looks, Rng& rng);

struct SceneResult {
    sar::C2Raster c2;
    std::size_t overlapping_pixels = 0;  // covered by more than one region
};

SceneResult generate_scene(const SceneSpec& scene);

/// Parses a scene or a campaign. A campaign document carries a `scenes` array
/// whose entries override the top-level fields; scenes without their own seed
/// derive one from the top-level seed and their position.
std::vector<SceneSpec> parse_scenes(std::string_view json_text,
                                    std::optional<std::uint64_t> seed_override = std::nullopt);
std::vector<SceneSpec> load_scenes(const std::filesystem::path& path,
                                   std::optional<std::uint64_t> seed_override = std::nullopt);

/// Bundle stem for a scene: `C2_<date>_<ASC|DES>`, `C2_<date>` or `C2_scene<k>`.
std::string scene_stem(const SceneSpec& scene, std::size_t index);

}  // namespace vinesar::synth
