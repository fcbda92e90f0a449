#pragma once

#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "vinesar/csv.hpp"
#include "vinesar/parcels.hpp"
#include "vinesar/phenology.hpp"

namespace vinesar::trend {

enum class Abscissa { DoY, CDD };

Abscissa parse_abscissa(std::string_view text);

struct Sample {
    Date date;
    int doy = 0;
    double x = 0.0;
    double y = 0.0;
};

/// Index time series for one parcel and orbit, sorted by date.
struct TimeSeries {
    std::string parcel_id;
    std::string index_name;
    Orbit orbit = Orbit::None;
    std::vector<Sample> samples;
};

/// Builds a series from per-date parcel means. Throws std::invalid_argument on
/// mixed parcel/index/orbit or duplicate dates; CDD abscissa needs `cdd_series`
/// covering every date.
TimeSeries assemble_series(std::span<const parcels::ZonalStats> stats, Abscissa abscissa,
                           const phenology::DegreeDaySeries* cdd_series = nullptr);

class RankDeficientError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// y = a x^2 + b x + c by least squares.
struct ParabolicFit {
    double a = 0.0;
    double b = 0.0;
    double c = 0.0;
    double r = 0.0;          // Pearson r between observed and fitted y
    double r_squared = 0.0;  // 1 - SS_res / SS_tot
    std::optional<double> vertex_x;
    std::size_t n = 0;
    bool degenerate = false;  // observed or fitted y has zero variance

    double operator()(double x) const { return (a * x + b) * x + c; }
};

/// Needs at least 3 distinct abscissae (RankDeficientError otherwise).
ParabolicFit fit_parabola(std::span<const double> xs, std::span<const double> ys);
ParabolicFit fit_parabola(const TimeSeries& series);

/// Pearson correlation. Throws std::invalid_argument on length mismatch, n < 2
/// or zero variance in either input.
double pearson(std::span<const double> xs, std::span<const double> ys);

struct Peak {
    Date date;
    double value = 0.0;
    bool tie = false;  // another sample shares the maximum; the earliest wins
};

/// Throws std::invalid_argument on an empty series.
Peak peak(const TimeSeries& series);

struct DatePair {
    Date date_a;
    Date date_b;
    double y_a = 0.0;
    double y_b = 0.0;
    int gap_days = 0;
};

/// Greedy chronological nearest-date matching: each sample of `a` takes the
/// unused sample of `b` with the smallest |gap| (earlier b on ties), accepted
/// when the gap is at most max_gap_days.
std::vector<DatePair> pair_dates(const TimeSeries& a, const TimeSeries& b, int max_gap_days);

struct CorrelationResult {
    std::string index_a;
    std::string index_b;
    std::string parcel_id;
    Orbit orbit = Orbit::None;
    std::size_t n = 0;
    double r = 0.0;
    int max_gap_days = 0;
};

struct ScatterLabels {
    std::string parcel_id;
    std::string index_a;
    std::string index_b;
};

struct ScatterRecord {
    std::string parcel_id;
    Date date_a;
    Date date_b;
    std::string index_a;
    double value_a = 0.0;
    std::string index_b;
    double value_b = 0.0;
    std::string month;
};

std::vector<ScatterRecord> scatter_export(std::span<const DatePair> pairs,
                                          const ScatterLabels& labels);

/// `parcel_id,date_a,date_b,index_a,value_a,index_b,value_b,month`
csv::Table scatter_table(std::span<const ScatterRecord> records);
std::vector<ScatterRecord> scatter_from_table(const csv::Table& table);

}  // namespace vinesar::trend
