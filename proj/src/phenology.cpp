#include "vinesar/phenology.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace vinesar::phenology {

std::vector<WeatherRecord> weather_from_table(const csv::Table& t) {
    const auto c_date = t.column("date"), c_tmin = t.column("tmin_c"), c_tmax = t.column("tmax_c");
    std::optional<std::size_t> c_precip;
    try {
        c_precip = t.column("precip_mm");
    } catch (const std::out_of_range&) {
    }

    std::vector<WeatherRecord> out;
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        const auto& row = t.rows[r];
        const std::string where = "weather row " + std::to_string(r + 2);
        WeatherRecord rec;
        rec.date = parse_date(row[c_date]);
        rec.tmin = csv::parse_number(row[c_tmin]);
        rec.tmax = csv::parse_number(row[c_tmax]);
        if (!std::isfinite(rec.tmin) || !std::isfinite(rec.tmax)) {
            throw std::invalid_argument(where + ": non-finite temperature");
        }
        if (rec.tmin > rec.tmax) throw std::invalid_argument(where + ": tmin > tmax");
        if (c_precip && !row[*c_precip].empty()) {
            const double p = csv::parse_number(row[*c_precip]);
            if (!(p >= 0.0)) throw std::invalid_argument(where + ": negative precipitation");
            rec.precip = p;
        }
        if (!out.empty() && days_between(out.back().date, rec.date) <= 0) {
            throw std::invalid_argument(where + ": dates must be strictly increasing");
        }
        out.push_back(rec);
    }
    return out;
}

std::vector<WeatherRecord> load_weather(const std::filesystem::path& path) {
    return weather_from_table(csv::read(path));
}

csv::Table weather_table(std::span<const WeatherRecord> records) {
    csv::Table t;
    t.header = {"date", "tmin_c", "tmax_c", "precip_mm"};
    for (const auto& r : records) {
        t.rows.push_back({format_date(r.date), csv::format_number(r.tmin),
                          csv::format_number(r.tmax),
                          r.precip ? csv::format_number(*r.precip) : ""});
    }
    return t;
}

double gdd(double tmax, double tmin, double t_base) {
    if (tmin > tmax) throw std::invalid_argument("gdd: tmin > tmax");
    const double raw = 0.5 * (tmax + tmin) - t_base;
    return raw > 0.0 ? raw : 0.0;
}

DegreeDaySeries accumulate_cdd(std::span<const WeatherRecord> records, double t_base, Date start) {
    if (records.empty()) throw std::invalid_argument("accumulate_cdd: no weather records");
    const Date first = records.front().date;
    const Date last = records.back().date;
    if (days_between(first, start) < 0 || days_between(start, last) < 0) {
        throw std::invalid_argument("accumulate_cdd: start " + format_date(start) +
                                    " outside record range " + format_date(first) + ".." +
                                    format_date(last));
    }

    DegreeDaySeries series;
    series.t_base = t_base;
    series.start_date = start;

    std::size_t k = 0;
    while (k < records.size() && days_between(records[k].date, start) > 0) ++k;

    double cdd = 0.0;
    const int span_days = days_between(start, last);
    series.entries.reserve(static_cast<std::size_t>(span_days) + 1);
    for (int offset = 0; offset <= span_days; ++offset) {
        const Date day = add_days(start, offset);
        double g = 0.0;
        if (k < records.size() && days_between(records[k].date, day) == 0) {
            g = gdd(records[k].tmax, records[k].tmin, t_base);
            ++k;
        } else {
            series.missing_days.push_back(day);
        }
        cdd += g;
        series.entries.push_back({day, day_of_year(day), g, cdd});
    }
    return series;
}

DegreeDaySeries accumulate_cdd(std::span<const WeatherRecord> records, double t_base) {
    if (records.empty()) throw std::invalid_argument("accumulate_cdd: no weather records");
    using namespace std::chrono;
    const Date first = records.front().date;
    Date start{first.year() / January / 1};
    if (days_between(first, start) < 0) start = first;
    return accumulate_cdd(records, t_base, start);
}

double lookup_cdd(const DegreeDaySeries& series, Date d) {
    if (series.entries.empty()) throw std::out_of_range("lookup_cdd: empty series");
    const int offset = days_between(series.entries.front().date, d);
    if (offset < 0 || static_cast<std::size_t>(offset) >= series.entries.size()) {
        throw std::out_of_range("lookup_cdd: " + format_date(d) + " outside series " +
                                format_date(series.entries.front().date) + ".." +
                                format_date(series.entries.back().date));
    }
    return series.entries[static_cast<std::size_t>(offset)].cdd;
}

csv::Table degree_day_table(const DegreeDaySeries& series) {
    csv::Table t;
    t.header = {"date", "doy", "gdd", "cdd"};
    for (const auto& e : series.entries) {
        t.rows.push_back({format_date(e.date), std::to_string(e.doy), csv::format_number(e.gdd),
                          csv::format_number(e.cdd)});
    }
    return t;
}

BiomassProxy biomass_proxy(const DegreeDaySeries& series, double k_biom) {
    if (!(k_biom > 0.0)) throw std::invalid_argument("biomass_proxy: k_biom must be positive");
    BiomassProxy proxy;
    proxy.k_biom = k_biom;
    proxy.entries.reserve(series.entries.size());
    for (const auto& e : series.entries) {
        proxy.entries.push_back({e.date, k_biom * std::sqrt(e.cdd)});
    }
    return proxy;
}

}  // namespace vinesar::phenology
