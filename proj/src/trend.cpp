#include "vinesar/trend.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdlib>

namespace vinesar::trend {

Abscissa parse_abscissa(std::string_view text) {
    if (text == "DoY" || text == "doy" || text == "DOY") return Abscissa::DoY;
    if (text == "CDD" || text == "cdd") return Abscissa::CDD;
    throw std::invalid_argument("unknown abscissa: '" + std::string(text) + "'");
}

TimeSeries assemble_series(std::span<const parcels::ZonalStats> stats, Abscissa abscissa,
                           const phenology::DegreeDaySeries* cdd_series) {
    if (stats.empty()) throw std::invalid_argument("assemble_series: no statistics");
    if (abscissa == Abscissa::CDD && cdd_series == nullptr) {
        throw std::invalid_argument("assemble_series: CDD abscissa needs a degree-day series");
    }
    TimeSeries series;
    series.parcel_id = stats.front().parcel_id;
    series.index_name = stats.front().band_name;
    series.orbit = stats.front().orbit;
    for (const auto& s : stats) {
        if (s.parcel_id != series.parcel_id || s.band_name != series.index_name ||
            s.orbit != series.orbit) {
            throw std::invalid_argument("assemble_series: statistics mix parcels, indices or orbits");
        }
        if (!s.timestamp) {
            throw std::invalid_argument("assemble_series: statistic without a timestamp");
        }
        Sample sample;
        sample.date = *s.timestamp;
        sample.doy = day_of_year(sample.date);
        sample.x = abscissa == Abscissa::DoY ? static_cast<double>(sample.doy)
                                             : phenology::lookup_cdd(*cdd_series, sample.date);
        sample.y = s.mean;
        series.samples.push_back(sample);
    }
    std::sort(series.samples.begin(), series.samples.end(),
              [](const Sample& l, const Sample& r) { return days_between(l.date, r.date) > 0; });
    for (std::size_t i = 1; i < series.samples.size(); ++i) {
        if (series.samples[i].date == series.samples[i - 1].date) {
            throw std::invalid_argument("assemble_series: duplicate date " +
                                        format_date(series.samples[i].date) + " for parcel " +
                                        series.parcel_id);
        }
    }
    return series;
}

namespace {

// Gaussian elimination with partial pivoting on a 3x3 system.
std::array<double, 3> solve3(std::array<std::array<double, 4>, 3> m) {
    for (int col = 0; col < 3; ++col) {
        int pivot = col;
        for (int r = col + 1; r < 3; ++r) {
            if (std::abs(m[r][col]) > std::abs(m[pivot][col])) pivot = r;
        }
        if (m[pivot][col] == 0.0) throw RankDeficientError("fit_parabola: singular normal equations");
        std::swap(m[col], m[pivot]);
        for (int r = col + 1; r < 3; ++r) {
            const double f = m[r][col] / m[col][col];
            for (int k = col; k < 4; ++k) m[r][k] -= f * m[col][k];
        }
    }
    std::array<double, 3> x{};
    for (int r = 2; r >= 0; --r) {
        double s = m[r][3];
        for (int k = r + 1; k < 3; ++k) s -= m[r][k] * x[k];
        x[r] = s / m[r][r];
    }
    return x;
}

}  // namespace

ParabolicFit fit_parabola(std::span<const double> xs, std::span<const double> ys) {
    if (xs.size() != ys.size()) throw std::invalid_argument("fit_parabola: length mismatch");
    std::vector<double> distinct(xs.begin(), xs.end());
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    if (distinct.size() < 3) {
        throw RankDeficientError("fit_parabola: need at least 3 distinct abscissae, got " +
                                 std::to_string(distinct.size()));
    }
    const std::size_t n = xs.size();

    // Work in t = (x - center) / scale to keep the normal equations well conditioned.
    const double center = 0.5 * (distinct.front() + distinct.back());
    const double scale = 0.5 * (distinct.back() - distinct.front());
    double s[5] = {0, 0, 0, 0, 0};
    double ty[3] = {0, 0, 0};
    for (std::size_t i = 0; i < n; ++i) {
        const double t = (xs[i] - center) / scale;
        double p = 1.0;
        for (int k = 0; k < 5; ++k) {
            s[k] += p;
            if (k < 3) ty[k] += p * ys[i];
            p *= t;
        }
    }
    // Unknowns ordered (a', b', c') for a' t^2 + b' t + c'.
    const auto coef = solve3({{{s[4], s[3], s[2], ty[2]},
                               {s[3], s[2], s[1], ty[1]},
                               {s[2], s[1], s[0], ty[0]}}});

    ParabolicFit fit;
    fit.n = n;
    const double inv = 1.0 / scale;
    fit.a = coef[0] * inv * inv;
    fit.b = coef[1] * inv - 2.0 * coef[0] * center * inv * inv;
    fit.c = coef[0] * center * center * inv * inv - coef[1] * center * inv + coef[2];
    if (fit.a != 0.0) fit.vertex_x = -fit.b / (2.0 * fit.a);

    std::vector<double> fitted(n);
    double ymean = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double t = (xs[i] - center) / scale;
        fitted[i] = (coef[0] * t + coef[1]) * t + coef[2];
        ymean += ys[i];
    }
    ymean /= static_cast<double>(n);
    double ss_tot = 0.0, ss_res = 0.0, ss_fit = 0.0, fmean = 0.0;
    for (std::size_t i = 0; i < n; ++i) fmean += fitted[i];
    fmean /= static_cast<double>(n);
    double ymag = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        ss_tot += (ys[i] - ymean) * (ys[i] - ymean);
        ss_res += (ys[i] - fitted[i]) * (ys[i] - fitted[i]);
        ss_fit += (fitted[i] - fmean) * (fitted[i] - fmean);
        ymag = std::max(ymag, std::abs(ys[i]));
    }

    if (ss_tot == 0.0) {
        fit.degenerate = true;
        const double tol = 1e-12 * std::max(1.0, ymag);
        const bool exact = std::all_of(fitted.begin(), fitted.end(), [&](double f) {
            return std::abs(f - ymean) <= tol;
        });
        fit.r = exact ? 1.0 : 0.0;
        fit.r_squared = fit.r * fit.r;
    } else if (ss_fit == 0.0) {
        fit.degenerate = true;
        fit.r = 0.0;
        fit.r_squared = 0.0;
    } else {
        fit.r = pearson(ys, fitted);
        fit.r_squared = std::clamp(1.0 - ss_res / ss_tot, 0.0, 1.0);
    }
    return fit;
}

ParabolicFit fit_parabola(const TimeSeries& series) {
    std::vector<double> xs, ys;
    for (const auto& s : series.samples) {
        xs.push_back(s.x);
        ys.push_back(s.y);
    }
    return fit_parabola(xs, ys);
}

double pearson(std::span<const double> xs, std::span<const double> ys) {
    if (xs.size() != ys.size()) throw std::invalid_argument("pearson: length mismatch");
    if (xs.size() < 2) throw std::invalid_argument("pearson: need at least 2 samples");
    const double n = static_cast<double>(xs.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double dx = xs[i] - mx;
        const double dy = ys[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0.0 || syy == 0.0) throw std::invalid_argument("pearson: zero variance");
    return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

Peak peak(const TimeSeries& series) {
    if (series.samples.empty()) throw std::invalid_argument("peak: empty series");
    Peak best{series.samples.front().date, series.samples.front().y, false};
    for (std::size_t i = 1; i < series.samples.size(); ++i) {
        const auto& s = series.samples[i];
        if (s.y > best.value) {
            best = {s.date, s.y, false};
        } else if (s.y == best.value) {
            best.tie = true;
        }
    }
    return best;
}

std::vector<DatePair> pair_dates(const TimeSeries& a, const TimeSeries& b, int max_gap_days) {
    std::vector<DatePair> pairs;
    std::vector<bool> used(b.samples.size(), false);
    for (const auto& sa : a.samples) {
        std::optional<std::size_t> best;
        int best_gap = 0;
        for (std::size_t j = 0; j < b.samples.size(); ++j) {
            if (used[j]) continue;
            const int gap = std::abs(days_between(sa.date, b.samples[j].date));
            if (!best || gap < best_gap) {
                best = j;
                best_gap = gap;
            }
        }
        if (best && best_gap <= max_gap_days) {
            used[*best] = true;
            const auto& sb = b.samples[*best];
            pairs.push_back({sa.date, sb.date, sa.y, sb.y, best_gap});
        }
    }
    return pairs;
}

std::vector<ScatterRecord> scatter_export(std::span<const DatePair> pairs,
                                          const ScatterLabels& labels) {
    std::vector<ScatterRecord> out;
    out.reserve(pairs.size());
    for (const auto& p : pairs) {
        out.push_back({labels.parcel_id, p.date_a, p.date_b, labels.index_a, p.y_a, labels.index_b,
                       p.y_b, std::string(month_tag(p.date_a))});
    }
    return out;
}

csv::Table scatter_table(std::span<const ScatterRecord> records) {
    csv::Table t;
    t.header = {"parcel_id", "date_a", "date_b", "index_a", "value_a",
                "index_b",   "value_b", "month"};
    for (const auto& r : records) {
        t.rows.push_back({r.parcel_id, format_date(r.date_a), format_date(r.date_b), r.index_a,
                          csv::format_number(r.value_a), r.index_b, csv::format_number(r.value_b),
                          r.month});
    }
    return t;
}

std::vector<ScatterRecord> scatter_from_table(const csv::Table& t) {
    const auto c_id = t.column("parcel_id"), c_da = t.column("date_a"), c_db = t.column("date_b"),
               c_ia = t.column("index_a"), c_va = t.column("value_a"), c_ib = t.column("index_b"),
               c_vb = t.column("value_b"), c_m = t.column("month");
    std::vector<ScatterRecord> out;
    for (const auto& row : t.rows) {
        out.push_back({row[c_id], parse_date(row[c_da]), parse_date(row[c_db]), row[c_ia],
                       csv::parse_number(row[c_va]), row[c_ib], csv::parse_number(row[c_vb]),
                       row[c_m]});
    }
    return out;
}

}  // namespace vinesar::trend
