#ifndef CONTAGION_DATAIO_HPP
#define CONTAGION_DATAIO_HPP

#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "model.hpp"
#include "stats.hpp"

namespace contagion {

enum class MeasurementKind : int {
    prevalence = 0,
    consumption = 1,
};

struct Observation {
    int country_id = 0;
    int year = 0;
    double value = 0.0;
    MeasurementKind kind = MeasurementKind::prevalence;

    friend bool operator==(const Observation&, const Observation&) = default;
};

struct CountryMeta {
    int country_id = 0;
    std::string name;
    std::string abbrev; // 3-letter code
    int idv = 0;        // Hofstede individualism index, 0..100
};

struct YearSeries {
    std::vector<int> years;
    std::vector<double> values;
};

// Prevalence reconstructed from consumption through the fitted linear map.
// Values outside [0, 1] are retained (clamping would bias the least-squares
// objective downstream) and the offending years flagged.
struct EstimatedPrevalence {
    int country_id = 0;
    std::vector<double> times;  // years where consumption exists
    std::vector<double> values; // x_hat = C_hat * c + B_hat
    RegressionResult regression;
    bool estimated = false;   // false when fewer than 3 pairs were available
    bool passed_gate = false; // r2 >= 0.7 and p < 0.001 and n_obs >= 15
    std::optional<int> removed_year; // year dropped by outlier screening
    std::vector<int> out_of_range_years;
    std::string diagnostic;
};

struct GateThresholds {
    double min_r2 = 0.7;
    double max_p = 1e-3;
    int min_obs = 15;
};

// Measurement CSV: 4 columns country_id,year,value,kind; no header; LF or
// CRLF. kind 0 is prevalence (value in [0,1]), kind 1 is consumption in
// grams/person/day (value >= 0). Parse errors carry the 1-based line number.
std::vector<Observation> parse_measurements(std::string_view text);

// Inverse of parse_measurements; values are printed exactly (round-trip safe).
std::string serialize_measurements(std::span<const Observation> obs);

// Article CSV: 3 columns year,annual,cumulative; no header. The cumulative
// column must satisfy cumulative[k] = cumulative[k-1] + annual[k].
ArticleSeries parse_articles(std::string_view text);

// Country metadata CSV: country_id,name,abbrev,idv with a header line.
std::vector<CountryMeta> parse_country_meta(std::string_view text);

// Peak-year table CSV: country_id,t_max with a header line.
std::map<int, int> parse_peak_years(std::string_view text);

// Fitted-parameter table CSV with a header line
// scope,country_id,abbrev,a,x0,u0,u_inf,b,delta,E: one "universal" row
// (b, delta, total E) and one "local" row per country.
struct FittedParamsTable {
    UniversalParams universal;
    double total_error = 0.0;
    struct Local {
        std::string abbrev;
        CountryParams params; // t0 unused when coming from a table
        double error = 0.0;
    };
    std::map<int, Local> locals;
};
FittedParamsTable parse_fitted_params(std::string_view text);

// All observations of one kind for one country, ascending by year; duplicate
// (country, year, kind) rows are averaged.
YearSeries series_for(std::span<const Observation> obs, int country_id, MeasurementKind kind);

// Years present in both series for the country, ascending; duplicates within
// a year averaged. xs = consumption, ys = prevalence.
struct PairedSeries {
    std::vector<int> years;
    std::vector<double> consumption;
    std::vector<double> prevalence;
};
PairedSeries pair_by_year(std::span<const Observation> obs, int country_id);

// Regress prevalence on consumption, optionally screen one outlier through
// the Grubbs test on x / x_hat (refitting after removal), apply the quality
// gate, and emit x_hat over the full consumption record.
EstimatedPrevalence estimate_prevalence(std::span<const Observation> obs, int country_id,
                                        bool screen_outliers, double alpha,
                                        const GateThresholds& gate = {});

// Distinct country ids appearing in the observations, ascending.
std::vector<int> country_ids(std::span<const Observation> obs);

} // namespace contagion

#endif
