#include "vinesar/synth.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace vinesar::synth {

using nlohmann::json;

void validate_true_c2(const sar::C2Pixel& c2) {
    const double scale = std::abs(c2.c11) + std::abs(c2.c22);
    const double tol = sar::kPsdTolerance * scale;
    if (!std::isfinite(c2.c11) || !std::isfinite(c2.c22) || !std::isfinite(c2.c12_re) ||
        !std::isfinite(c2.c12_im)) {
        throw std::invalid_argument("true covariance has non-finite elements");
    }
    if (!(c2.trace() > 0.0)) throw std::invalid_argument("true covariance must have positive trace");
    if (c2.c11 < 0.0 || c2.c22 < 0.0 || c2.det() < -tol * scale) {
        throw std::invalid_argument("true covariance is not positive semidefinite");
    }
}

void SceneSpec::validate() const {
    spec.validate();
    if (looks < 1) throw std::invalid_argument("scene looks must be >= 1");
    validate_true_c2(background);
    for (const auto& r : regions) {
        if (r.rect.x1 <= r.rect.x0 || r.rect.y1 <= r.rect.y0) {
            throw std::invalid_argument("scene region rectangle is empty");
        }
        validate_true_c2(r.c2);
    }
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

}  // namespace

std::uint64_t pixel_seed(std::uint64_t scene_seed, std::uint64_t index) {
    return splitmix64(scene_seed ^ splitmix64(index));
}

sar::C2Pixel sample_c2(const sar::C2Pixel& true_c2, int looks, Rng& rng) {
    if (looks < 1) throw std::invalid_argument("sample_c2: looks must be >= 1");
    validate_true_c2(true_c2);

    // Lower Cholesky factor of [[c11, c12], [conj(c12), c22]].
    double l11 = 0.0, l21_re = 0.0, l21_im = 0.0, l22 = 0.0;
    if (true_c2.c11 > 0.0) {
        l11 = std::sqrt(true_c2.c11);
        l21_re = true_c2.c12_re / l11;
        l21_im = -true_c2.c12_im / l11;
        const double cross = true_c2.c12_re * true_c2.c12_re + true_c2.c12_im * true_c2.c12_im;
        l22 = std::sqrt(std::max(0.0, true_c2.c22 - cross / true_c2.c11));
    } else {
        l22 = std::sqrt(true_c2.c22);
    }

    // Circular complex Gaussian with unit variance: real and imaginary parts N(0, 1/2).
    std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
    double s11 = 0.0, s22 = 0.0, sre = 0.0, sim = 0.0;
    for (int l = 0; l < looks; ++l) {
        const double z1r = normal(rng), z1i = normal(rng);
        const double z2r = normal(rng), z2i = normal(rng);
        const double k1r = l11 * z1r;
        const double k1i = l11 * z1i;
        const double k2r = l21_re * z1r - l21_im * z1i + l22 * z2r;
        const double k2i = l21_re * z1i + l21_im * z1r + l22 * z2i;
        s11 += k1r * k1r + k1i * k1i;
        s22 += k2r * k2r + k2i * k2i;
        // k1 * conj(k2)
        sre += k1r * k2r + k1i * k2i;
        sim += k1i * k2r - k1r * k2i;
    }
    const double inv = 1.0 / looks;
    return {s11 * inv, s22 * inv, sre * inv, sim * inv};
}

SceneResult generate_scene(const SceneSpec& scene) {
    scene.validate();
    SceneResult result;
    result.c2 = sar::C2Raster::filled(scene.spec, {});
    result.c2.timestamp = scene.date;
    result.c2.orbit = scene.orbit;

    const int w = scene.spec.width;
    std::size_t overlapping = 0;
#pragma omp parallel for schedule(static) reduction(+ : overlapping)
    for (int row = 0; row < scene.spec.height; ++row) {
        for (int col = 0; col < w; ++col) {
            const sar::C2Pixel* truth = &scene.background;
            int hits = 0;
            for (const auto& region : scene.regions) {
                if (region.rect.contains(col, row)) {
                    if (hits++ == 0) truth = &region.c2;
                }
            }
            if (hits > 1) ++overlapping;
            const std::size_t i = static_cast<std::size_t>(row) * w + col;
            Rng rng(pixel_seed(scene.seed, i));
            result.c2.set_pixel(i, sample_c2(*truth, scene.looks, rng));
        }
    }
    result.overlapping_pixels = overlapping;
    return result;
}

namespace {

sar::C2Pixel parse_c2(const json& j) {
    if (!j.is_array() || j.size() != 4) {
        throw std::invalid_argument("c2 must be [c11, c22, c12_re, c12_im]");
    }
    return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>(), j[3].get<double>()};
}

void apply_fields(const json& j, SceneSpec& s) {
    if (j.contains("width")) s.spec.width = j["width"].get<int>();
    if (j.contains("height")) s.spec.height = j["height"].get<int>();
    if (j.contains("origin_x")) s.spec.origin_x = j["origin_x"].get<double>();
    if (j.contains("origin_y")) s.spec.origin_y = j["origin_y"].get<double>();
    if (j.contains("pixel_size_x")) s.spec.pixel_size_x = j["pixel_size_x"].get<double>();
    if (j.contains("pixel_size_y")) s.spec.pixel_size_y = j["pixel_size_y"].get<double>();
    if (j.contains("crs")) s.spec.crs = j["crs"].get<std::string>();
    if (j.contains("background")) s.background = parse_c2(j["background"]);
    if (j.contains("looks")) s.looks = j["looks"].get<int>();
    if (j.contains("date") && !j["date"].is_null()) s.date = parse_date(j["date"].get<std::string>());
    if (j.contains("orbit") && !j["orbit"].is_null()) s.orbit = parse_orbit(j["orbit"].get<std::string>());
    if (j.contains("regions")) {
        s.regions.clear();
        for (const auto& r : j["regions"]) {
            const auto& rect = r.at("rect");
            if (!rect.is_array() || rect.size() != 4) {
                throw std::invalid_argument("region rect must be [x0, y0, x1, y1]");
            }
            s.regions.push_back({{rect[0].get<int>(), rect[1].get<int>(), rect[2].get<int>(),
                                  rect[3].get<int>()},
                                 parse_c2(r.at("c2"))});
        }
    }
}

}  // namespace

std::vector<SceneSpec> parse_scenes(std::string_view json_text,
                                    std::optional<std::uint64_t> seed_override) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument(std::string("malformed scene JSON: ") + e.what());
    }
    if (!doc.is_object()) throw std::invalid_argument("scene JSON must be an object");

    std::vector<SceneSpec> scenes;
    try {
        SceneSpec base;
        apply_fields(doc, base);
        std::uint64_t base_seed = doc.value("seed", std::uint64_t{0});
        if (seed_override) base_seed = *seed_override;
        base.seed = base_seed;

        if (doc.contains("scenes")) {
            std::uint64_t k = 0;
            for (const auto& entry : doc["scenes"]) {
                SceneSpec s = base;
                apply_fields(entry, s);
                s.seed = entry.contains("seed") && !seed_override
                             ? entry["seed"].get<std::uint64_t>()
                             : splitmix64(base_seed + k);
                ++k;
                scenes.push_back(std::move(s));
            }
            if (scenes.empty()) throw std::invalid_argument("campaign has no scenes");
        } else {
            scenes.push_back(std::move(base));
        }
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("invalid scene JSON: ") + e.what());
    }
    for (const auto& s : scenes) s.validate();
    return scenes;
}

std::vector<SceneSpec> load_scenes(const std::filesystem::path& path,
                                   std::optional<std::uint64_t> seed_override) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open scene file: " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_scenes(buf.str(), seed_override);
}

std::string scene_stem(const SceneSpec& scene, std::size_t index) {
    if (!scene.date) return "C2_scene" + std::to_string(index);
    std::string stem = "C2_" + format_date(*scene.date);
    if (scene.orbit != Orbit::None) stem += "_" + std::string(orbit_tag(scene.orbit));
    return stem;
}

}  // namespace vinesar::synth
