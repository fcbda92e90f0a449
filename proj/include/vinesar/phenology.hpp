#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <vector>

#include "vinesar/csv.hpp"
#include "vinesar/date.hpp"

namespace vinesar::phenology {

/// Default base temperature for grapevine, degrees C.
inline constexpr double kVineBaseTemperature = 10.0;

struct WeatherRecord {
    Date date;
    double tmin = 0.0;  // degrees C
    double tmax = 0.0;  // degrees C
    std::optional<double> precip;  // mm/day
};

/// Reads `date,tmin_c,tmax_c,precip_mm` (precip may be empty). Validates
/// tmin <= tmax, precip >= 0 and strictly increasing dates.
std::vector<WeatherRecord> load_weather(const std::filesystem::path& path);
std::vector<WeatherRecord> weather_from_table(const csv::Table& table);
csv::Table weather_table(std::span<const WeatherRecord> records);

/// Daily degree days: max(0, (tmax + tmin)/2 - t_base). Throws if tmin > tmax.
double gdd(double tmax, double tmin, double t_base = kVineBaseTemperature);

struct DegreeDayEntry {
    Date date;
    int doy = 0;
    double gdd = 0.0;
    double cdd = 0.0;
};

struct DegreeDaySeries {
    std::vector<DegreeDayEntry> entries;  // one per calendar day, no gaps
    double t_base = kVineBaseTemperature;
    Date start_date;
    std::vector<Date> missing_days;  // days without a record; they contribute 0
};

/// Running degree-day sum from `start` through the last record. Throws if
/// `start` lies outside the record range or the range is empty.
DegreeDaySeries accumulate_cdd(std::span<const WeatherRecord> records, double t_base, Date start);

/// Start defaults to January 1 of the first record's year (clamped to the first record).
DegreeDaySeries accumulate_cdd(std::span<const WeatherRecord> records,
                               double t_base = kVineBaseTemperature);

/// CDD on exactly day `d`; throws std::out_of_range outside the series.
double lookup_cdd(const DegreeDaySeries& series, Date d);

/// `date,doy,gdd,cdd`
csv::Table degree_day_table(const DegreeDaySeries& series);

struct BiomassEntry {
    Date date;
    double bb = 0.0;
};

struct BiomassProxy {
    double k_biom = 1.0;
    std::vector<BiomassEntry> entries;
};

/// bb = k_biom * sqrt(cdd). Throws if k_biom <= 0.
BiomassProxy biomass_proxy(const DegreeDaySeries& series, double k_biom);

}  // namespace vinesar::phenology
