#include "vinesar/sar.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace vinesar::sar {

C2Raster C2Raster::filled(const GridSpec& spec, const C2Pixel& value) {
    spec.validate();
    C2Raster c2;
    c2.spec = spec;
    const auto n = spec.pixel_count();
    c2.c11.assign(n, static_cast<float>(value.c11));
    c2.c22.assign(n, static_cast<float>(value.c22));
    c2.c12_re.assign(n, static_cast<float>(value.c12_re));
    c2.c12_im.assign(n, static_cast<float>(value.c12_im));
    return c2;
}

bool C2Raster::is_valid(std::size_t i) const {
    return std::isfinite(c11[i]) && std::isfinite(c22[i]) && std::isfinite(c12_re[i]) &&
           std::isfinite(c12_im[i]);
}

void C2Raster::set_pixel(std::size_t i, const C2Pixel& p) {
    c11[i] = static_cast<float>(p.c11);
    c22[i] = static_cast<float>(p.c22);
    c12_re[i] = static_cast<float>(p.c12_re);
    c12_im[i] = static_cast<float>(p.c12_im);
}

void C2Raster::set_nodata(std::size_t i) {
    c11[i] = c22[i] = c12_re[i] = c12_im[i] = kNaN;
}

void C2Raster::validate() const {
    spec.validate();
    const auto n = spec.pixel_count();
    if (c11.size() != n || c22.size() != n || c12_re.size() != n || c12_im.size() != n) {
        throw std::invalid_argument("C2 raster bands do not match grid " + describe(spec));
    }
}

RasterBundle to_bundle(const C2Raster& c2) {
    c2.validate();
    RasterBundle b;
    b.spec = c2.spec;
    b.bands = {{kC2BandNames[0], c2.channel1},
               {kC2BandNames[1], c2.channel2},
               {kC2BandNames[2], c2.channel1 + "*conj(" + c2.channel2 + ")"},
               {kC2BandNames[3], c2.channel1 + "*conj(" + c2.channel2 + ")"}};
    b.data = {c2.c11, c2.c22, c2.c12_re, c2.c12_im};
    b.timestamp = c2.timestamp;
    b.orbit = c2.orbit;
    return b;
}

C2Raster c2_from_bundle(const RasterBundle& bundle) {
    C2Raster c2;
    c2.spec = bundle.spec;
    c2.timestamp = bundle.timestamp;
    c2.orbit = bundle.orbit;
    std::vector<float>* targets[4] = {&c2.c11, &c2.c22, &c2.c12_re, &c2.c12_im};
    for (int k = 0; k < 4; ++k) {
        const auto idx = bundle.find_band(kC2BandNames[k]);
        if (!idx) {
            throw std::runtime_error(std::string("C2 bundle lacks band ") + kC2BandNames[k]);
        }
        *targets[k] = bundle.data[*idx];
        // A finite non-NaN sentinel is mapped to NaN so validity is a finiteness test.
        if (!std::isnan(bundle.nodata)) {
            for (auto& v : *targets[k]) {
                if (v == bundle.nodata) v = kNaN;
            }
        }
    }
    const auto& d1 = bundle.bands[*bundle.find_band("C11")].description;
    const auto& d2 = bundle.bands[*bundle.find_band("C22")].description;
    if (!d1.empty()) c2.channel1 = d1;
    if (!d2.empty()) c2.channel2 = d2;
    c2.validate();
    return c2;
}

namespace {

enum class EigenStatus { Ok, NonFinite, NotPsd };

inline EigenStatus eigen_checked(double c11, double c22, double re, double im, EigenPair& out) {
    if (!std::isfinite(c11) || !std::isfinite(c22) || !std::isfinite(re) || !std::isfinite(im)) {
        return EigenStatus::NonFinite;
    }
    const double scale = std::abs(c11) + std::abs(c22);
    const double tol = kPsdTolerance * scale;
    if (c11 < -tol || c22 < -tol) return EigenStatus::NotPsd;
    const double trace = c11 + c22;
    const double cross = re * re + im * im;
    const double det = c11 * c22 - cross;
    if (det < -tol * scale) return EigenStatus::NotPsd;
    if (det <= tol * scale) {
        out = {std::max(trace, 0.0), 0.0};
        return EigenStatus::Ok;
    }
    const double diff = c11 - c22;
    const double root = std::sqrt(diff * diff + 4.0 * cross);
    const double l1 = 0.5 * (trace + root);
    // det / lambda1 avoids the cancellation in (trace - root) / 2.
    const double l2 = std::clamp(det / l1, 0.0, l1);
    out = {l1, l2};
    return EigenStatus::Ok;
}

inline std::optional<double> dprvi_value(const EigenPair& e) {
    const double total = e.lambda1 + e.lambda2;
    if (!(total > 0.0)) return std::nullopt;
    const double m = (e.lambda1 - e.lambda2) / total;
    const double beta = e.lambda1 / total;
    return 1.0 - m * beta;
}

}  // namespace

EigenPair eigen_decompose(double c11, double c22, double c12_re, double c12_im) {
    EigenPair e;
    switch (eigen_checked(c11, c22, c12_re, c12_im, e)) {
        case EigenStatus::Ok: return e;
        case EigenStatus::NonFinite:
            throw std::domain_error("eigen_decompose: non-finite covariance element");
        case EigenStatus::NotPsd: break;
    }
    throw std::domain_error("eigen_decompose: covariance is not positive semidefinite");
}

std::optional<DpParams> dp_params(const EigenPair& e) {
    const double total = e.lambda1 + e.lambda2;
    if (!(total > 0.0)) return std::nullopt;
    DpParams p;
    p.m = (e.lambda1 - e.lambda2) / total;
    p.beta = e.lambda1 / total;
    p.q = e.lambda1 > 0.0 ? e.lambda2 / e.lambda1 : 0.0;
    return p;
}

std::optional<double> dprvi_from_eigen(const EigenPair& e) { return dprvi_value(e); }

double dprvi_from_ratio(double q) { return q * (q + 3.0) / ((q + 1.0) * (q + 1.0)); }

std::optional<double> dprvi_grd(double sigma_vh, double sigma_vv, bool* clamped) {
    if (!std::isfinite(sigma_vh) || !std::isfinite(sigma_vv)) {
        throw std::domain_error("dprvi_grd: non-finite intensity");
    }
    if (sigma_vh < 0.0 || sigma_vv < 0.0) {
        throw std::domain_error("dprvi_grd: negative intensity (inputs must be linear power)");
    }
    if (clamped) *clamped = false;
    if (sigma_vv == 0.0) return std::nullopt;
    double q = sigma_vh / sigma_vv;
    if (q > 1.0) {
        q = 1.0;
        if (clamped) *clamped = true;
    }
    return dprvi_from_ratio(q);
}

C2Raster multilook(const C2Raster& c2, int win_x, int win_y) {
    c2.validate();
    if (win_x < 1 || win_y < 1) throw std::invalid_argument("multilook window must be >= 1");
    if (win_x > c2.spec.width || win_y > c2.spec.height) {
        throw std::invalid_argument("multilook window larger than raster");
    }
    GridSpec out_spec = c2.spec;
    out_spec.width = c2.spec.width / win_x;
    out_spec.height = c2.spec.height / win_y;
    out_spec.pixel_size_x = c2.spec.pixel_size_x * win_x;
    out_spec.pixel_size_y = c2.spec.pixel_size_y * win_y;

    C2Raster out = C2Raster::filled(out_spec, {});
    out.timestamp = c2.timestamp;
    out.orbit = c2.orbit;
    out.channel1 = c2.channel1;
    out.channel2 = c2.channel2;

    const int in_w = c2.spec.width;
#pragma omp parallel for schedule(static)
    for (int orow = 0; orow < out_spec.height; ++orow) {
        for (int ocol = 0; ocol < out_spec.width; ++ocol) {
            double s11 = 0, s22 = 0, sre = 0, sim = 0;
            int n = 0;
            for (int dy = 0; dy < win_y; ++dy) {
                const std::size_t base =
                    static_cast<std::size_t>(orow * win_y + dy) * in_w + ocol * win_x;
                for (int dx = 0; dx < win_x; ++dx) {
                    const std::size_t i = base + dx;
                    if (!c2.is_valid(i)) continue;
                    s11 += c2.c11[i];
                    s22 += c2.c22[i];
                    sre += c2.c12_re[i];
                    sim += c2.c12_im[i];
                    ++n;
                }
            }
            const std::size_t o = static_cast<std::size_t>(orow) * out_spec.width + ocol;
            if (n == 0) {
                out.set_nodata(o);
            } else {
                out.set_pixel(o, {s11 / n, s22 / n, sre / n, sim / n});
            }
        }
    }
    return out;
}

C2Raster boxcar_filter(const C2Raster& c2, int win) {
    c2.validate();
    if (win < 1 || win % 2 == 0) throw std::invalid_argument("boxcar window must be odd and >= 1");
    const int w = c2.spec.width;
    const int h = c2.spec.height;
    const int half = win / 2;
    const std::size_t n = c2.spec.pixel_count();

    // Separable pass: horizontal window sums of each band and of the valid count,
    // then vertical sums of those.
    const std::vector<float>* bands[4] = {&c2.c11, &c2.c22, &c2.c12_re, &c2.c12_im};
    std::vector<double> hsum(4 * n, 0.0);
    std::vector<int> hcount(n, 0);

#pragma omp parallel for schedule(static)
    for (int row = 0; row < h; ++row) {
        for (int col = 0; col < w; ++col) {
            const std::size_t o = static_cast<std::size_t>(row) * w + col;
            const int c0 = std::max(0, col - half);
            const int c1 = std::min(w - 1, col + half);
            for (int c = c0; c <= c1; ++c) {
                const std::size_t i = static_cast<std::size_t>(row) * w + c;
                if (!c2.is_valid(i)) continue;
                for (int k = 0; k < 4; ++k) hsum[k * n + o] += (*bands[k])[i];
                ++hcount[o];
            }
        }
    }

    C2Raster out = C2Raster::filled(c2.spec, {});
    out.timestamp = c2.timestamp;
    out.orbit = c2.orbit;
    out.channel1 = c2.channel1;
    out.channel2 = c2.channel2;

#pragma omp parallel for schedule(static)
    for (int row = 0; row < h; ++row) {
        for (int col = 0; col < w; ++col) {
            const std::size_t o = static_cast<std::size_t>(row) * w + col;
            if (!c2.is_valid(o)) {
                out.set_nodata(o);
                continue;
            }
            const int r0 = std::max(0, row - half);
            const int r1 = std::min(h - 1, row + half);
            double sums[4] = {0, 0, 0, 0};
            int count = 0;
            for (int r = r0; r <= r1; ++r) {
                const std::size_t i = static_cast<std::size_t>(r) * w + col;
                for (int k = 0; k < 4; ++k) sums[k] += hsum[k * n + i];
                count += hcount[i];
            }
            out.set_pixel(o, {sums[0] / count, sums[1] / count, sums[2] / count, sums[3] / count});
        }
    }
    return out;
}

IndexResult dprvi_raster(const C2Raster& c2) {
    c2.validate();
    IndexResult result;
    result.raster.spec = c2.spec;
    result.raster.values.assign(c2.spec.pixel_count(), kNaN);
    result.raster.band_name = "DpRVI";
    result.raster.timestamp = c2.timestamp;
    result.raster.orbit = c2.orbit;

    const auto n = static_cast<std::ptrdiff_t>(c2.spec.pixel_count());
    std::size_t invalid = 0;
    float* dst = result.raster.values.data();
#pragma omp parallel for schedule(static) reduction(+ : invalid)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        EigenPair e;
        if (eigen_checked(c2.c11[i], c2.c22[i], c2.c12_re[i], c2.c12_im[i], e) !=
            EigenStatus::Ok) {
            ++invalid;
            continue;
        }
        const auto v = dprvi_value(e);
        if (!v) {
            ++invalid;
            continue;
        }
        dst[i] = static_cast<float>(*v);
    }
    result.invalid_pixels = invalid;
    return result;
}

IndexResult dprvi_grd_raster(const Raster& sigma_vh, const Raster& sigma_vv) {
    sigma_vh.validate();
    sigma_vv.validate();
    if (!(sigma_vh.spec == sigma_vv.spec)) {
        throw AlignmentError("VH and VV rasters are not aligned");
    }
    IndexResult result;
    result.raster.spec = sigma_vv.spec;
    result.raster.values.assign(sigma_vv.spec.pixel_count(), kNaN);
    result.raster.band_name = "DpRVI";
    result.raster.timestamp = sigma_vv.timestamp;
    result.raster.orbit = sigma_vv.orbit;

    const auto n = static_cast<std::ptrdiff_t>(sigma_vv.spec.pixel_count());
    std::size_t invalid = 0;
    std::size_t clamped = 0;
    float* dst = result.raster.values.data();
#pragma omp parallel for schedule(static) reduction(+ : invalid, clamped)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        const float vh = sigma_vh.values[i];
        const float vv = sigma_vv.values[i];
        if (!sigma_vh.is_valid(vh) || !sigma_vv.is_valid(vv) || vh < 0.0f || vv <= 0.0f ||
            !std::isfinite(vh) || !std::isfinite(vv)) {
            ++invalid;
            continue;
        }
        double q = static_cast<double>(vh) / vv;
        if (q > 1.0) {
            q = 1.0;
            ++clamped;
        }
        dst[i] = static_cast<float>(dprvi_from_ratio(q));
    }
    result.invalid_pixels = invalid;
    result.clamped_pixels = clamped;
    return result;
}

}  // namespace vinesar::sar
