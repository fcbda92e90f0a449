#include "vinesar/serial.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace vinesar::serial {

Raster resample(const Raster& raster, const GridSpec& target, ResampleMethod method) {
    raster.validate();
    target.validate();
    if (raster.spec.crs != target.crs) throw std::invalid_argument("resample crs mismatch");
    const auto& s = raster.spec;
    if (target.max_x() <= s.min_x() || target.min_x() >= s.max_x() || target.max_y() <= s.min_y() ||
        target.min_y() >= s.max_y()) {
        throw std::invalid_argument("resample target does not overlap source");
    }

    Raster out = raster;
    out.spec = target;
    out.values.assign(target.pixel_count(), raster.nodata);
    for (int row = 0; row < target.height; ++row) {
        for (int col = 0; col < target.width; ++col) {
            const double x = target.center_x(col);
            const double y = target.center_y(row);
            const double u = (x - s.origin_x) / s.pixel_size_x - 0.5;
            const double v = (y - s.origin_y) / s.pixel_size_y - 0.5;
            const double nc = std::floor(u + 0.5), nr = std::floor(v + 0.5);
            if (nc < 0 || nr < 0 || nc >= s.width || nr >= s.height) continue;
            const float nearest = raster.at(static_cast<int>(nc), static_cast<int>(nr));
            float value = nearest;
            if (method == ResampleMethod::Bilinear) {
                const int c0 = static_cast<int>(std::floor(u));
                const int r0 = static_cast<int>(std::floor(v));
                const double tx = u - std::floor(u), ty = v - std::floor(v);
                auto px = [&](int c, int r) {
                    return raster.at(std::clamp(c, 0, s.width - 1), std::clamp(r, 0, s.height - 1));
                };
                const float q[4] = {px(c0, r0), px(c0 + 1, r0), px(c0, r0 + 1), px(c0 + 1, r0 + 1)};
                if (std::all_of(q, q + 4, [&](float f) { return raster.is_valid(f); })) {
                    const double top = q[0] + (static_cast<double>(q[1]) - q[0]) * tx;
                    const double bottom = q[2] + (static_cast<double>(q[3]) - q[2]) * tx;
                    value = static_cast<float>(top + (bottom - top) * ty);
                }
            }
            out.values[static_cast<std::size_t>(row) * target.width + col] = value;
        }
    }
    return out;
}

sar::C2Raster multilook(const sar::C2Raster& c2, int win_x, int win_y) {
    c2.validate();
    if (win_x < 1 || win_y < 1 || win_x > c2.spec.width || win_y > c2.spec.height) {
        throw std::invalid_argument("bad multilook window");
    }
    GridSpec spec = c2.spec;
    spec.width /= win_x;
    spec.height /= win_y;
    spec.pixel_size_x *= win_x;
    spec.pixel_size_y *= win_y;
    sar::C2Raster out = sar::C2Raster::filled(spec, {});
    out.timestamp = c2.timestamp;
    out.orbit = c2.orbit;
    out.channel1 = c2.channel1;
    out.channel2 = c2.channel2;
    for (int orow = 0; orow < spec.height; ++orow) {
        for (int ocol = 0; ocol < spec.width; ++ocol) {
            double s11 = 0, s22 = 0, sre = 0, sim = 0;
            int n = 0;
            for (int dy = 0; dy < win_y; ++dy) {
                for (int dx = 0; dx < win_x; ++dx) {
                    const std::size_t i =
                        static_cast<std::size_t>(orow * win_y + dy) * c2.spec.width + ocol * win_x + dx;
                    if (!c2.is_valid(i)) continue;
                    s11 += c2.c11[i];
                    s22 += c2.c22[i];
                    sre += c2.c12_re[i];
                    sim += c2.c12_im[i];
                    ++n;
                }
            }
            const std::size_t o = static_cast<std::size_t>(orow) * spec.width + ocol;
            if (n == 0) {
                out.set_nodata(o);
            } else {
                out.set_pixel(o, {s11 / n, s22 / n, sre / n, sim / n});
            }
        }
    }
    return out;
}

sar::C2Raster boxcar_filter(const sar::C2Raster& c2, int win) {
    c2.validate();
    if (win < 1 || win % 2 == 0) throw std::invalid_argument("boxcar window must be odd");
    const int w = c2.spec.width, h = c2.spec.height, half = win / 2;
    sar::C2Raster out = c2;
    for (int row = 0; row < h; ++row) {
        for (int col = 0; col < w; ++col) {
            const std::size_t o = static_cast<std::size_t>(row) * w + col;
            if (!c2.is_valid(o)) {
                out.set_nodata(o);
                continue;
            }
            double s11 = 0, s22 = 0, sre = 0, sim = 0;
            int n = 0;
            for (int r = std::max(0, row - half); r <= std::min(h - 1, row + half); ++r) {
                for (int c = std::max(0, col - half); c <= std::min(w - 1, col + half); ++c) {
                    const std::size_t i = static_cast<std::size_t>(r) * w + c;
                    if (!c2.is_valid(i)) continue;
                    s11 += c2.c11[i];
                    s22 += c2.c22[i];
                    sre += c2.c12_re[i];
                    sim += c2.c12_im[i];
                    ++n;
                }
            }
            out.set_pixel(o, {s11 / n, s22 / n, sre / n, sim / n});
        }
    }
    return out;
}

sar::IndexResult dprvi_raster(const sar::C2Raster& c2) {
    c2.validate();
    sar::IndexResult result;
    result.raster.spec = c2.spec;
    result.raster.values.assign(c2.spec.pixel_count(), kNaN);
    result.raster.band_name = "DpRVI";
    result.raster.timestamp = c2.timestamp;
    result.raster.orbit = c2.orbit;
    for (std::size_t i = 0; i < c2.spec.pixel_count(); ++i) {
        try {
            const auto v = sar::dprvi_from_eigen(sar::eigen_decompose(c2.pixel(i)));
            if (v) {
                result.raster.values[i] = static_cast<float>(*v);
                continue;
            }
        } catch (const std::domain_error&) {
        }
        ++result.invalid_pixels;
    }
    return result;
}

optical::IndexResult ndvi(const optical::BandSet& bands) {
    if (!bands.b4 || !bands.b8) throw std::invalid_argument("missing band");
    const Raster& red = *bands.b4;
    const Raster& nir = *bands.b8;
    if (!(red.spec == nir.spec)) throw AlignmentError("B4/B8 misaligned");
    optical::IndexResult result{Raster::filled(nir.spec, kNaN, "NDVI")};
    result.raster.timestamp = bands.timestamp ? bands.timestamp : nir.timestamp;
    for (std::size_t i = 0; i < nir.values.size(); ++i) {
        std::optional<double> v;
        if (red.is_valid(i) && nir.is_valid(i)) v = optical::ndvi_value(red.values[i], nir.values[i]);
        if (v) {
            result.raster.values[i] = static_cast<float>(*v);
        } else {
            ++result.invalid_pixels;
        }
    }
    return result;
}

optical::IndexResult svhi(const optical::BandSet& bands) {
    if (!bands.b4 || !bands.b5 || !bands.b8 || !bands.b11 || !bands.b12) {
        throw std::invalid_argument("missing band");
    }
    const Raster* b[5] = {&*bands.b4, &*bands.b5, &*bands.b8, &*bands.b11, &*bands.b12};
    for (const auto* r : b) {
        if (!(r->spec == b[2]->spec)) throw AlignmentError("bands misaligned");
    }
    optical::IndexResult result{Raster::filled(b[2]->spec, kNaN, "SVHI")};
    result.raster.timestamp = bands.timestamp ? bands.timestamp : b[2]->timestamp;
    for (std::size_t i = 0; i < b[2]->values.size(); ++i) {
        std::optional<double> v;
        if (std::all_of(b, b + 5, [i](const Raster* r) { return r->valid_at(i); })) {
            v = optical::svhi_value(b[0]->values[i], b[1]->values[i], b[2]->values[i],
                                    b[3]->values[i], b[4]->values[i]);
        }
        if (v) {
            result.raster.values[i] = static_cast<float>(*v);
        } else {
            ++result.invalid_pixels;
        }
    }
    return result;
}

parcels::ParcelMask rasterize(const parcels::Parcel& parcel, const GridSpec& spec) {
    spec.validate();
    parcels::ParcelMask out;
    out.parcel_id = parcel.id;
    out.spec = spec;
    out.mask.assign(spec.pixel_count(), 0);
    for (int row = 0; row < spec.height; ++row) {
        for (int col = 0; col < spec.width; ++col) {
            const double x = spec.center_x(col);
            const double y = spec.center_y(row);
            bool inside = false;
            for (const auto& ring : parcel.rings) {
                for (std::size_t k = 0; k + 1 < ring.size(); ++k) {
                    const auto& pj = ring[k];
                    const auto& pi = ring[k + 1];
                    if (((pi.y > y) != (pj.y > y)) &&
                        (x < (pj.x - pi.x) * (y - pi.y) / (pj.y - pi.y) + pi.x)) {
                        inside = !inside;
                    }
                }
            }
            out.mask[static_cast<std::size_t>(row) * spec.width + col] = inside ? 1 : 0;
        }
    }
    return out;
}

parcels::ParcelMask erode(const parcels::ParcelMask& mask, int pixels) {
    if (pixels < 0) throw std::invalid_argument("erosion iterations must be >= 0");
    parcels::ParcelMask out = mask;
    out.erosion_applied = mask.erosion_applied + pixels;
    const int w = mask.spec.width, h = mask.spec.height;
    auto at = [&](const std::vector<std::uint8_t>& m, int c, int r) {
        return c >= 0 && r >= 0 && c < w && r < h && m[static_cast<std::size_t>(r) * w + c];
    };
    for (int it = 0; it < pixels; ++it) {
        const auto cur = out.mask;
        for (int r = 0; r < h; ++r) {
            for (int c = 0; c < w; ++c) {
                out.mask[static_cast<std::size_t>(r) * w + c] =
                    at(cur, c, r) && at(cur, c - 1, r) && at(cur, c + 1, r) && at(cur, c, r - 1) &&
                    at(cur, c, r + 1);
            }
        }
    }
    return out;
}

synth::SceneResult generate_scene(const synth::SceneSpec& scene) {
    scene.validate();
    synth::SceneResult result;
    result.c2 = sar::C2Raster::filled(scene.spec, {});
    result.c2.timestamp = scene.date;
    result.c2.orbit = scene.orbit;
    for (int row = 0; row < scene.spec.height; ++row) {
        for (int col = 0; col < scene.spec.width; ++col) {
            const sar::C2Pixel* truth = &scene.background;
            int hits = 0;
            for (const auto& region : scene.regions) {
                if (region.rect.contains(col, row) && hits++ == 0) truth = &region.c2;
            }
            if (hits > 1) ++result.overlapping_pixels;
            const std::size_t i = static_cast<std::size_t>(row) * scene.spec.width + col;
            synth::Rng rng(synth::pixel_seed(scene.seed, i));
            result.c2.set_pixel(i, synth::sample_c2(*truth, scene.looks, rng));
        }
    }
    return result;
}

}  // namespace vinesar::serial
