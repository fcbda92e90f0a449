#include "vinesar/optical.hpp"

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

namespace vinesar::optical {

namespace {

inline bool reflectance_ok(double v) {
    return std::isfinite(v) && v >= kMinReflectance && v <= kMaxReflectance;
}

const Raster& require(const std::optional<Raster>& band, const char* name) {
    if (!band) throw std::invalid_argument(std::string("missing band ") + name);
    band->validate();
    return *band;
}

Raster output_like(const Raster& ref, std::string name, const std::optional<Date>& timestamp) {
    Raster out;
    out.spec = ref.spec;
    out.values.assign(ref.spec.pixel_count(), kNaN);
    out.band_name = std::move(name);
    out.timestamp = timestamp ? timestamp : ref.timestamp;
    return out;
}

}  // namespace

BandSet BandSet::from_bundle(const RasterBundle& bundle) {
    BandSet set;
    set.timestamp = bundle.timestamp;
    const std::array<std::pair<const char*, std::optional<Raster>*>, 5> slots{{
        {"B4", &set.b4}, {"B5", &set.b5}, {"B8", &set.b8}, {"B11", &set.b11}, {"B12", &set.b12}}};
    for (const auto& [name, slot] : slots) {
        if (auto idx = bundle.find_band(name)) *slot = bundle.band_raster(*idx);
    }
    return set;
}

std::optional<double> ndvi_value(double b4, double b8) {
    if (!reflectance_ok(b4) || !reflectance_ok(b8)) return std::nullopt;
    const double den = b8 + b4;
    if (den == 0.0) return std::nullopt;
    return (b8 - b4) / den;
}

std::optional<double> svhi_value(double b4, double b5, double b8, double b11, double b12) {
    if (!reflectance_ok(b4) || !reflectance_ok(b5) || !reflectance_ok(b8) ||
        !reflectance_ok(b11) || !reflectance_ok(b12)) {
        return std::nullopt;
    }
    const double s = b4 + b5 + b11 + b12;
    const double den = 4.0 * b8 + s;
    if (den == 0.0) return std::nullopt;
    return (4.0 * b8 - s) / den;
}

IndexResult ndvi(const BandSet& bands) {
    const Raster& red = require(bands.b4, "B4");
    const Raster& nir = require(bands.b8, "B8");
    const std::array<Raster, 2> stack{red, nir};
    assert_aligned(stack);

    IndexResult result{output_like(nir, "NDVI", bands.timestamp)};
    const auto n = static_cast<std::ptrdiff_t>(nir.spec.pixel_count());
    std::size_t invalid = 0;
    float* dst = result.raster.values.data();
#pragma omp parallel for schedule(static) reduction(+ : invalid)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        if (!red.valid_at(i) || !nir.valid_at(i)) {
            ++invalid;
            continue;
        }
        const auto v = ndvi_value(red.values[i], nir.values[i]);
        if (!v) {
            ++invalid;
            continue;
        }
        dst[i] = static_cast<float>(*v);
    }
    result.invalid_pixels = invalid;
    return result;
}

IndexResult svhi(const BandSet& bands) {
    const Raster& b4 = require(bands.b4, "B4");
    const Raster& b5 = require(bands.b5, "B5");
    const Raster& b8 = require(bands.b8, "B8");
    const Raster& b11 = require(bands.b11, "B11");
    const Raster& b12 = require(bands.b12, "B12");
    const std::array<GridSpec, 5> specs{b4.spec, b5.spec, b8.spec, b11.spec, b12.spec};
    const std::array<std::string, 5> labels{"B4", "B5", "B8", "B11", "B12"};
    assert_aligned(specs, labels);

    IndexResult result{output_like(b8, "SVHI", bands.timestamp)};
    const auto n = static_cast<std::ptrdiff_t>(b8.spec.pixel_count());
    std::size_t invalid = 0;
    float* dst = result.raster.values.data();
#pragma omp parallel for schedule(static) reduction(+ : invalid)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        if (!b4.valid_at(i) || !b5.valid_at(i) || !b8.valid_at(i) || !b11.valid_at(i) ||
            !b12.valid_at(i)) {
            ++invalid;
            continue;
        }
        const auto v = svhi_value(b4.values[i], b5.values[i], b8.values[i], b11.values[i],
                                  b12.values[i]);
        if (!v) {
            ++invalid;
            continue;
        }
        dst[i] = static_cast<float>(*v);
    }
    result.invalid_pixels = invalid;
    return result;
}

LaiResult ingest_lai(const Raster& raster) {
    raster.validate();
    LaiResult result{raster};
    result.raster.band_name = "LAI";
    const auto n = static_cast<std::ptrdiff_t>(raster.spec.pixel_count());
    std::size_t rejected = 0;
    float* v = result.raster.values.data();
#pragma omp parallel for schedule(static) reduction(+ : rejected)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        if (!raster.is_valid(v[i])) continue;
        if (!(v[i] >= kMinLai && v[i] <= kMaxLai)) {
            v[i] = raster.nodata;
            ++rejected;
        }
    }
    result.rejected_pixels = rejected;
    return result;
}

}  // namespace vinesar::optical
