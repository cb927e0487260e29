#include "dataio.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>

#include "errors.hpp"

namespace contagion {

namespace {

struct Line {
    std::size_t number; // 1-based
    std::string_view text;
};

std::vector<Line> split_lines(std::string_view text) {
    std::vector<Line> lines;
    std::size_t lineno = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t nl = text.find('\n', pos);
        std::string_view raw = nl == std::string_view::npos ? text.substr(pos)
                                                            : text.substr(pos, nl - pos);
        ++lineno;
        if (!raw.empty() && raw.back() == '\r')
            raw.remove_suffix(1);
        if (!raw.empty())
            lines.push_back({lineno, raw});
        if (nl == std::string_view::npos)
            break;
        pos = nl + 1;
    }
    return lines;
}

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t pos = 0;
    while (true) {
        const std::size_t comma = line.find(',', pos);
        if (comma == std::string_view::npos) {
            out.push_back(line.substr(pos));
            break;
        }
        out.push_back(line.substr(pos, comma - pos));
        pos = comma + 1;
    }
    return out;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t'))
        s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t'))
        s.remove_suffix(1);
    return s;
}

[[noreturn]] void parse_fail(std::size_t lineno, const std::string& what) {
    throw error(errc::parse, "line " + std::to_string(lineno) + ": " + what);
}

long parse_int(std::string_view field, std::size_t lineno, const char* what) {
    field = trim(field);
    long value = 0;
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc() || ptr != field.data() + field.size())
        parse_fail(lineno, std::string("expected integer ") + what + ", got '" + std::string(field) + "'");
    return value;
}

double parse_real(std::string_view field, std::size_t lineno, const char* what) {
    field = trim(field);
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc() || ptr != field.data() + field.size() || !std::isfinite(value))
        parse_fail(lineno, std::string("expected real ") + what + ", got '" + std::string(field) + "'");
    return value;
}

std::string format_exact(double v) {
    char buf[32];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

// A wrong header usually means the wrong file; catch it before misreading
// every row. Field comparison tolerates surrounding whitespace.
void check_header(const Line& ln, std::string_view expected) {
    const auto got = split_fields(ln.text);
    const auto want = split_fields(expected);
    bool ok = got.size() == want.size();
    for (std::size_t i = 0; ok && i < got.size(); ++i)
        ok = trim(got[i]) == want[i];
    if (!ok)
        parse_fail(ln.number, "expected header '" + std::string(expected) + "', got '" +
                                  std::string(trim(ln.text)) + "'");
}

} // namespace

std::vector<Observation> parse_measurements(std::string_view text) {
    std::vector<Observation> out;
    for (const Line& ln : split_lines(text)) {
        const auto fields = split_fields(ln.text);
        if (fields.size() != 4)
            parse_fail(ln.number, "expected 4 columns country_id,year,value,kind");
        Observation ob;
        ob.country_id = static_cast<int>(parse_int(fields[0], ln.number, "country_id"));
        ob.year = static_cast<int>(parse_int(fields[1], ln.number, "year"));
        ob.value = parse_real(fields[2], ln.number, "value");
        const long kind = parse_int(fields[3], ln.number, "kind");
        if (kind != 0 && kind != 1)
            throw error(errc::validation,
                        "line " + std::to_string(ln.number) + ": kind must be 0 or 1");
        ob.kind = static_cast<MeasurementKind>(kind);
        if (ob.kind == MeasurementKind::prevalence && (ob.value < 0.0 || ob.value > 1.0))
            throw error(errc::validation, "line " + std::to_string(ln.number) +
                                              ": prevalence outside [0,1]");
        if (ob.kind == MeasurementKind::consumption && ob.value < 0.0)
            throw error(errc::validation,
                        "line " + std::to_string(ln.number) + ": negative consumption");
        out.push_back(ob);
    }
    return out;
}

std::string serialize_measurements(std::span<const Observation> obs) {
    std::string out;
    for (const Observation& ob : obs) {
        out += std::to_string(ob.country_id);
        out += ',';
        out += std::to_string(ob.year);
        out += ',';
        out += format_exact(ob.value);
        out += ',';
        out += std::to_string(static_cast<int>(ob.kind));
        out += '\n';
    }
    return out;
}

ArticleSeries parse_articles(std::string_view text) {
    std::vector<int> years;
    std::vector<long long> annual, cumulative;
    for (const Line& ln : split_lines(text)) {
        const auto fields = split_fields(ln.text);
        if (fields.size() != 3)
            parse_fail(ln.number, "expected 3 columns year,annual,cumulative");
        years.push_back(static_cast<int>(parse_int(fields[0], ln.number, "year")));
        annual.push_back(parse_int(fields[1], ln.number, "annual count"));
        cumulative.push_back(parse_int(fields[2], ln.number, "cumulative count"));
    }
    if (years.empty())
        throw error(errc::invalid_argument, "article file contains no rows");
    return ArticleSeries(std::move(years), std::move(annual), std::move(cumulative));
}

std::vector<CountryMeta> parse_country_meta(std::string_view text) {
    const auto lines = split_lines(text);
    if (lines.empty())
        throw error(errc::invalid_argument, "country metadata file is empty");
    check_header(lines[0], "country_id,name,abbrev,idv");
    std::vector<CountryMeta> out;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const Line& ln = lines[i];
        const auto fields = split_fields(ln.text);
        if (fields.size() != 4)
            parse_fail(ln.number, "expected 4 columns country_id,name,abbrev,idv");
        CountryMeta m;
        m.country_id = static_cast<int>(parse_int(fields[0], ln.number, "country_id"));
        m.name = std::string(trim(fields[1]));
        m.abbrev = std::string(trim(fields[2]));
        m.idv = static_cast<int>(parse_int(fields[3], ln.number, "idv"));
        if (m.idv < 0 || m.idv > 100)
            throw error(errc::validation,
                        "line " + std::to_string(ln.number) + ": idv outside [0,100]");
        out.push_back(std::move(m));
    }
    return out;
}

std::map<int, int> parse_peak_years(std::string_view text) {
    const auto lines = split_lines(text);
    if (lines.empty())
        throw error(errc::invalid_argument, "peak-year file is empty");
    check_header(lines[0], "country_id,t_max");
    std::map<int, int> out;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const Line& ln = lines[i];
        const auto fields = split_fields(ln.text);
        if (fields.size() != 2)
            parse_fail(ln.number, "expected 2 columns country_id,t_max");
        const int id = static_cast<int>(parse_int(fields[0], ln.number, "country_id"));
        out[id] = static_cast<int>(parse_int(fields[1], ln.number, "t_max"));
    }
    return out;
}

FittedParamsTable parse_fitted_params(std::string_view text) {
    const auto lines = split_lines(text);
    if (lines.empty())
        throw error(errc::invalid_argument, "fitted-parameter file is empty");
    check_header(lines[0], "scope,country_id,abbrev,a,x0,u0,u_inf,b,delta,E");
    FittedParamsTable table;
    bool saw_universal = false;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const Line& ln = lines[i];
        const auto fields = split_fields(ln.text);
        if (fields.size() != 10)
            parse_fail(ln.number, "expected 10 columns scope,country_id,abbrev,a,x0,u0,u_inf,b,delta,E");
        const std::string_view scope = trim(fields[0]);
        if (scope == "universal") {
            table.universal.b = parse_real(fields[7], ln.number, "b");
            table.universal.delta = parse_real(fields[8], ln.number, "delta");
            table.total_error = parse_real(fields[9], ln.number, "E");
            saw_universal = true;
        } else if (scope == "local") {
            const int id = static_cast<int>(parse_int(fields[1], ln.number, "country_id"));
            FittedParamsTable::Local local;
            local.abbrev = std::string(trim(fields[2]));
            local.params.a = parse_real(fields[3], ln.number, "a");
            local.params.x0 = parse_real(fields[4], ln.number, "x0");
            local.params.u0 = parse_real(fields[5], ln.number, "u0");
            local.params.u_inf = parse_real(fields[6], ln.number, "u_inf");
            local.error = parse_real(fields[9], ln.number, "E");
            table.locals[id] = std::move(local);
        } else {
            parse_fail(ln.number, "scope must be 'universal' or 'local'");
        }
    }
    if (!saw_universal)
        throw error(errc::validation, "fitted-parameter file has no universal row");
    return table;
}

YearSeries series_for(std::span<const Observation> obs, int country_id, MeasurementKind kind) {
    std::map<int, std::pair<double, int>> by_year; // year -> (sum, count)
    for (const Observation& ob : obs) {
        if (ob.country_id != country_id || ob.kind != kind)
            continue;
        auto& [sum, count] = by_year[ob.year];
        sum += ob.value;
        ++count;
    }
    YearSeries s;
    s.years.reserve(by_year.size());
    s.values.reserve(by_year.size());
    for (const auto& [year, agg] : by_year) {
        s.years.push_back(year);
        s.values.push_back(agg.first / agg.second);
    }
    return s;
}

PairedSeries pair_by_year(std::span<const Observation> obs, int country_id) {
    const YearSeries cons = series_for(obs, country_id, MeasurementKind::consumption);
    const YearSeries prev = series_for(obs, country_id, MeasurementKind::prevalence);
    PairedSeries out;
    std::size_t i = 0, j = 0;
    while (i < cons.years.size() && j < prev.years.size()) {
        if (cons.years[i] < prev.years[j]) {
            ++i;
        } else if (cons.years[i] > prev.years[j]) {
            ++j;
        } else {
            out.years.push_back(cons.years[i]);
            out.consumption.push_back(cons.values[i]);
            out.prevalence.push_back(prev.values[j]);
            ++i;
            ++j;
        }
    }
    return out;
}

std::vector<int> country_ids(std::span<const Observation> obs) {
    std::vector<int> ids;
    for (const Observation& ob : obs)
        ids.push_back(ob.country_id);
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    return ids;
}

EstimatedPrevalence estimate_prevalence(std::span<const Observation> obs, int country_id,
                                        bool screen_outliers, double alpha,
                                        const GateThresholds& gate) {
    EstimatedPrevalence est;
    est.country_id = country_id;

    PairedSeries pairs = pair_by_year(obs, country_id);
    if (pairs.years.size() < 3) {
        est.diagnostic = "estimation skipped: only " + std::to_string(pairs.years.size()) +
                         " paired year(s), need at least 3";
        return est;
    }

    RegressionResult reg = ols(pairs.consumption, pairs.prevalence);

    if (screen_outliers) {
        // Grubbs on the ratios x / x_hat of the initial fit; drop at most one
        // point, then refit.
        std::vector<double> ratios(pairs.years.size());
        for (std::size_t k = 0; k < pairs.years.size(); ++k) {
            const double xhat = reg.C_hat * pairs.consumption[k] + reg.B_hat;
            ratios[k] = xhat != 0.0 ? pairs.prevalence[k] / xhat
                                    : std::numeric_limits<double>::infinity();
        }
        if (const auto hit = grubbs(ratios, alpha)) {
            est.removed_year = pairs.years[hit->index];
            pairs.years.erase(pairs.years.begin() + static_cast<std::ptrdiff_t>(hit->index));
            pairs.consumption.erase(pairs.consumption.begin() +
                                    static_cast<std::ptrdiff_t>(hit->index));
            pairs.prevalence.erase(pairs.prevalence.begin() +
                                   static_cast<std::ptrdiff_t>(hit->index));
            if (pairs.years.size() < 3) {
                est.diagnostic = "estimation skipped: fewer than 3 pairs after screening";
                return est;
            }
            reg = ols(pairs.consumption, pairs.prevalence);
        }
    }

    est.estimated = true;
    est.regression = reg;
    est.passed_gate =
        reg.r2 >= gate.min_r2 && reg.p < gate.max_p && reg.n_obs >= gate.min_obs;

    const YearSeries cons = series_for(obs, country_id, MeasurementKind::consumption);
    est.times.reserve(cons.years.size());
    est.values.reserve(cons.years.size());
    for (std::size_t k = 0; k < cons.years.size(); ++k) {
        const double xhat = reg.C_hat * cons.values[k] + reg.B_hat;
        est.times.push_back(static_cast<double>(cons.years[k]));
        est.values.push_back(xhat);
        if (xhat < 0.0 || xhat > 1.0)
            est.out_of_range_years.push_back(cons.years[k]);
    }
    return est;
}

} // namespace contagion
