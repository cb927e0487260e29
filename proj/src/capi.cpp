#include "contagion/contagion.h"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "analysis.hpp"
#include "calibrate.hpp"
#include "dataio.hpp"
#include "errors.hpp"
#include "integrate.hpp"
#include "model.hpp"
#include "report.hpp"
#include "svg.hpp"
#include "synth.hpp"

using namespace contagion;

namespace {

thread_local std::string g_last_error;

ctg_status fail(ctg_status status, const std::string& message) {
    g_last_error = message;
    return status;
}

ctg_status status_of(const error& e) {
    switch (e.code()) {
    case errc::invalid_argument:
        return CTG_ERROR_INVALID_ARGUMENT;
    case errc::parse:
        return CTG_ERROR_PARSE;
    case errc::validation:
        return CTG_ERROR_VALIDATION;
    case errc::numeric:
        return CTG_ERROR_NUMERIC;
    case errc::not_found:
        return CTG_ERROR_NOT_FOUND;
    case errc::io:
        return CTG_ERROR_IO;
    }
    return CTG_ERROR_INTERNAL;
}

// Runs the body and converts exceptions into status codes.
template <typename Fn> ctg_status guarded(Fn&& body) {
    try {
        body();
        return CTG_OK;
    } catch (const error& e) {
        return fail(status_of(e), e.what());
    } catch (const std::bad_alloc&) {
        return fail(CTG_ERROR_INTERNAL, "out of memory");
    } catch (const std::exception& e) {
        return fail(CTG_ERROR_INTERNAL, e.what());
    }
}

char* dup_string(const std::string& text) {
    char* out = static_cast<char*>(std::malloc(text.size() + 1));
    if (!out)
        throw std::bad_alloc();
    std::memcpy(out, text.c_str(), text.size() + 1);
    return out;
}

void require(bool ok, const char* what) {
    if (!ok)
        throw error(errc::invalid_argument, what);
}

std::map<int, std::string> abbrev_map(const std::vector<CountryMeta>& meta) {
    std::map<int, std::string> out;
    for (const CountryMeta& m : meta)
        out[m.country_id] = m.abbrev;
    return out;
}

IntegratorConfig integrator_overrides(double rtol, double atol, double h_init, double h_max) {
    IntegratorConfig cfg;
    if (rtol > 0.0)
        cfg.rtol = rtol;
    if (atol > 0.0)
        cfg.atol = atol;
    if (h_init > 0.0)
        cfg.h_init = h_init;
    if (h_max > 0.0)
        cfg.h_max = h_max;
    return cfg;
}

UtilityLaw law_from(int law) {
    switch (law) {
    case CTG_UTILITY_DISCOUNTED:
        return UtilityLaw::discounted;
    case CTG_UTILITY_CONSTANT:
        return UtilityLaw::constant;
    case CTG_UTILITY_STEP:
        return UtilityLaw::step;
    default:
        throw error(errc::invalid_argument, "unknown utility law selector");
    }
}

} // namespace

struct ctg_dataset {
    std::vector<Observation> observations;
    std::shared_ptr<const ArticleSeries> articles;
    std::vector<CountryMeta> meta;
    std::optional<FittedParamsTable> fitted;
    std::map<int, int> peak_years;
};

struct ctg_estimates {
    std::vector<EstimatedPrevalence> items;
    std::vector<CountryMeta> meta;
};

struct ctg_fit_result {
    FitResult fit;
    FitConfig config;
    std::vector<EstimatedPrevalence> ests;
    std::shared_ptr<const ArticleSeries> articles;
    std::map<int, std::string> abbrev;
};

struct ctg_report {
    StudyReport study;
    std::vector<CountryAnalysis> analyses;
    std::map<int, std::string> abbrev;
    struct Pair {
        std::string title;
        const char* x_label;
        const char* y_label;
        std::vector<double> xs, ys;
        std::vector<std::string> labels;
        const CorrelationResult* cell;
    };
    std::map<std::string, Pair> pairs;
};

extern "C" {

const char* ctg_version(void) { return "1.0.0"; }

const char* ctg_last_error(void) { return g_last_error.c_str(); }

void ctg_string_free(char* text) { std::free(text); }

/* ---------------- dataset ---------------- */

ctg_status ctg_dataset_create(ctg_dataset** out) {
    return guarded([&] {
        require(out != nullptr, "out is null");
        *out = new ctg_dataset();
    });
}

void ctg_dataset_free(ctg_dataset* dataset) { delete dataset; }

ctg_status ctg_dataset_load_measurements(ctg_dataset* dataset, const char* csv_text) {
    return guarded([&] {
        require(dataset && csv_text, "dataset or text is null");
        dataset->observations = parse_measurements(csv_text);
    });
}

ctg_status ctg_dataset_load_articles(ctg_dataset* dataset, const char* csv_text) {
    return guarded([&] {
        require(dataset && csv_text, "dataset or text is null");
        dataset->articles = std::make_shared<const ArticleSeries>(parse_articles(csv_text));
    });
}

ctg_status ctg_dataset_load_country_meta(ctg_dataset* dataset, const char* csv_text) {
    return guarded([&] {
        require(dataset && csv_text, "dataset or text is null");
        dataset->meta = parse_country_meta(csv_text);
    });
}

ctg_status ctg_dataset_load_fitted_params(ctg_dataset* dataset, const char* csv_text) {
    return guarded([&] {
        require(dataset && csv_text, "dataset or text is null");
        dataset->fitted = parse_fitted_params(csv_text);
    });
}

ctg_status ctg_dataset_load_peak_years(ctg_dataset* dataset, const char* csv_text) {
    return guarded([&] {
        require(dataset && csv_text, "dataset or text is null");
        dataset->peak_years = parse_peak_years(csv_text);
    });
}

ctg_status ctg_dataset_country_ids(const ctg_dataset* dataset, int* ids, size_t* count) {
    return guarded([&] {
        require(dataset && count, "dataset or count is null");
        const std::vector<int> all = country_ids(dataset->observations);
        if (!ids) {
            *count = all.size();
            return;
        }
        require(*count >= all.size(), "buffer too small for the country list");
        std::copy(all.begin(), all.end(), ids);
        *count = all.size();
    });
}

ctg_status ctg_dataset_country_abbrev(const ctg_dataset* dataset, int country_id, char** out) {
    return guarded([&] {
        require(dataset && out, "dataset or out is null");
        const auto map = abbrev_map(dataset->meta);
        const auto it = map.find(country_id);
        *out = dup_string(it == map.end() ? std::to_string(country_id) : it->second);
    });
}

ctg_status ctg_dataset_counts_csv(const ctg_dataset* dataset, char** out) {
    return guarded([&] {
        require(dataset && out, "dataset or out is null");
        *out = dup_string(counts_table_csv(dataset->observations, dataset->meta));
    });
}

ctg_status ctg_dataset_fitted_params(const ctg_dataset* dataset, const char* country,
                                     int* country_id, double* a, double* x0, double* u0,
                                     double* u_inf, double* b, double* delta) {
    return guarded([&] {
        require(dataset != nullptr, "dataset is null");
        if (!dataset->fitted)
            throw error(errc::not_found, "no fitted-parameter table loaded");
        const FittedParamsTable& table = *dataset->fitted;
        if (b)
            *b = table.universal.b;
        if (delta)
            *delta = table.universal.delta;
        if (!country)
            return;
        for (const auto& [id, local] : table.locals) {
            if (local.abbrev != country && std::to_string(id) != country)
                continue;
            if (country_id)
                *country_id = id;
            if (a)
                *a = local.params.a;
            if (x0)
                *x0 = local.params.x0;
            if (u0)
                *u0 = local.params.u0;
            if (u_inf)
                *u_inf = local.params.u_inf;
            return;
        }
        throw error(errc::not_found,
                    std::string("country '") + country + "' not in the fitted-parameter table");
    });
}

ctg_status ctg_dataset_articles_at(const ctg_dataset* dataset, double year, double* out) {
    return guarded([&] {
        require(dataset && out, "dataset or out is null");
        if (!dataset->articles)
            throw error(errc::not_found, "no article series loaded");
        *out = dataset->articles->cumulative_at(year);
    });
}

/* ---------------- model ---------------- */

ctg_status ctg_rhs(double x, double u_x, double a, double b, double* out) {
    return guarded([&] {
        require(out != nullptr, "out is null");
        *out = rhs(x, u_x, a, b);
    });
}

/* ---------------- simulate ---------------- */

void ctg_simulate_options_init(ctg_simulate_options* options) {
    if (!options)
        return;
    *options = ctg_simulate_options{};
    options->a = 0.963;
    options->x0 = 0.063;
    options->u0 = 0.513;
    options->u_inf = 0.470;
    options->b = 1.049;
    options->delta = 0.9981;
    options->law = CTG_UTILITY_DISCOUNTED;
    options->t_star = 1964.0;
    options->t0 = 1920.0;
    options->t1 = 2010.0;
    options->output_step = 1.0;
}

ctg_status ctg_simulate(const ctg_dataset* dataset, const ctg_simulate_options* options,
                        const ctg_estimates* overlay, int overlay_country_id, char** out_csv,
                        char** out_svg) {
    return guarded([&] {
        require(options != nullptr, "options is null");
        require(options->t1 > options->t0, "t1 must exceed t0");
        require(options->output_step > 0.0, "output_step must be positive");

        const UtilityLaw law = law_from(options->law);
        CountryParams local;
        local.a = options->a;
        local.x0 = options->x0;
        local.u0 = options->u0;
        local.u_inf = options->u_inf;
        local.t0 = options->t0;
        const UniversalParams universal{options->b, options->delta};

        std::shared_ptr<const ArticleSeries> articles;
        if (law == UtilityLaw::discounted) {
            if (!dataset || !dataset->articles)
                throw error(errc::not_found,
                            "the discounted law needs a dataset with an article series");
            articles = dataset->articles;
        }
        const UtilityModel utility =
            make_utility(law, local, universal, options->t_star, articles);

        std::vector<double> times;
        for (double t = options->t0; t < options->t1 + 1e-9; t += options->output_step)
            times.push_back(t);
        if (times.back() < options->t1 - 1e-9)
            times.push_back(options->t1);

        const IntegratorConfig integrator = integrator_overrides(
            options->rtol, options->atol, options->h_init, options->h_max);
        const Trajectory traj = integrate(local, universal, utility, times, integrator);

        const EstimatedPrevalence* est = nullptr;
        if (overlay)
            for (const EstimatedPrevalence& e : overlay->items)
                if (e.country_id == overlay_country_id)
                    est = &e;

        if (out_csv)
            *out_csv = dup_string(trajectory_csv(traj));
        if (out_svg)
            *out_svg = dup_string(trajectory_svg(traj, est, "simulated prevalence"));
    });
}

/* ---------------- estimates ---------------- */

ctg_status ctg_estimate_run(const ctg_dataset* dataset, const int* country_ids_in,
                            size_t n_country_ids, const char* screen_abbrevs,
                            double grubbs_alpha, ctg_estimates** out) {
    return guarded([&] {
        require(dataset && out, "dataset or out is null");
        if (dataset->observations.empty())
            throw error(errc::validation, "no measurements loaded");

        std::vector<int> ids;
        if (country_ids_in && n_country_ids > 0)
            ids.assign(country_ids_in, country_ids_in + n_country_ids);
        else
            ids = country_ids(dataset->observations);

        std::set<int> screened;
        if (screen_abbrevs && *screen_abbrevs) {
            std::map<std::string, int> by_abbrev;
            for (const CountryMeta& m : dataset->meta)
                by_abbrev[m.abbrev] = m.country_id;
            std::istringstream list(screen_abbrevs);
            std::string token;
            while (std::getline(list, token, ',')) {
                const auto it = by_abbrev.find(token);
                if (it == by_abbrev.end())
                    throw error(errc::not_found,
                                "unknown country abbreviation '" + token + "'");
                screened.insert(it->second);
            }
        }
        const double alpha = grubbs_alpha > 0.0 ? grubbs_alpha : 0.05;

        auto result = std::make_unique<ctg_estimates>();
        result->meta = dataset->meta;
        for (int id : ids)
            result->items.push_back(estimate_prevalence(dataset->observations, id,
                                                        screened.count(id) > 0, alpha));
        *out = result.release();
    });
}

void ctg_estimates_free(ctg_estimates* estimates) { delete estimates; }

ctg_status ctg_estimates_count(const ctg_estimates* estimates, size_t* out) {
    return guarded([&] {
        require(estimates && out, "estimates or out is null");
        *out = estimates->items.size();
    });
}

ctg_status ctg_estimates_info(const ctg_estimates* estimates, size_t index, int* country_id,
                              int* passed_gate, int* n_obs, double* r2, double* p) {
    return guarded([&] {
        require(estimates != nullptr, "estimates is null");
        require(index < estimates->items.size(), "index out of range");
        const EstimatedPrevalence& e = estimates->items[index];
        if (country_id)
            *country_id = e.country_id;
        if (passed_gate)
            *passed_gate = e.passed_gate ? 1 : 0;
        if (n_obs)
            *n_obs = e.regression.n_obs;
        if (r2)
            *r2 = e.regression.r2;
        if (p)
            *p = e.regression.p;
    });
}

ctg_status ctg_estimates_table_csv(const ctg_estimates* estimates, char** out) {
    return guarded([&] {
        require(estimates && out, "estimates or out is null");
        *out = dup_string(estimates_table_csv(estimates->items, estimates->meta));
    });
}

ctg_status ctg_estimates_xhat_csv(const ctg_estimates* estimates, int country_id, char** out) {
    return guarded([&] {
        require(estimates && out, "estimates or out is null");
        for (const EstimatedPrevalence& e : estimates->items)
            if (e.country_id == country_id) {
                if (!e.estimated)
                    throw error(errc::validation, "country " + std::to_string(country_id) +
                                                      " has no reconstruction");
                *out = dup_string(xhat_csv(e));
                return;
            }
        throw error(errc::not_found,
                    "country " + std::to_string(country_id) + " not in this run");
    });
}

/* ---------------- fit ---------------- */

void ctg_fit_options_init(ctg_fit_options* options) {
    if (!options)
        return;
    *options = ctg_fit_options{};
    options->law = CTG_UTILITY_DISCOUNTED;
    options->tol = 1e-6;
    options->max_itn = 150;
    options->gated_only = 1;
}

ctg_status ctg_fit_run(const ctg_dataset* dataset, const ctg_estimates* estimates,
                       const ctg_fit_options* options, ctg_fit_result** out) {
    return guarded([&] {
        require(dataset && estimates && options && out, "argument is null");

        FitConfig config;
        config.law = law_from(options->law);
        if (options->tol > 0.0)
            config.tol = options->tol;
        if (options->max_itn > 0)
            config.max_itn = options->max_itn;
        if (options->max_fevals > 0)
            config.inner.max_fevals = options->max_fevals;
        config.integrator = integrator_overrides(options->rtol, options->atol, options->h_init,
                                                 options->h_max);

        if (config.law == UtilityLaw::discounted && !dataset->articles)
            throw error(errc::not_found,
                        "the discounted law needs a dataset with an article series");

        std::vector<EstimatedPrevalence> selected;
        for (const EstimatedPrevalence& e : estimates->items)
            if (e.estimated && (!options->gated_only || e.passed_gate))
                selected.push_back(e);
        if (selected.empty())
            throw error(errc::validation, "no countries eligible for fitting");

        auto result = std::make_unique<ctg_fit_result>();
        result->config = config;
        result->ests = selected;
        result->articles = dataset->articles;
        result->abbrev = abbrev_map(dataset->meta);
        result->fit = alternate_fit(selected, dataset->articles, config);
        *out = result.release();
    });
}

void ctg_fit_result_free(ctg_fit_result* fit) { delete fit; }

ctg_status ctg_fit_universal(const ctg_fit_result* fit, double* b, double* delta,
                             double* total_error) {
    return guarded([&] {
        require(fit != nullptr, "fit is null");
        if (b)
            *b = fit->fit.universal.b;
        if (delta)
            *delta = fit->fit.universal.delta;
        if (total_error)
            *total_error = fit->fit.total_error;
    });
}

ctg_status ctg_fit_country_count(const ctg_fit_result* fit, size_t* out) {
    return guarded([&] {
        require(fit && out, "fit or out is null");
        *out = fit->fit.locals.size();
    });
}

ctg_status ctg_fit_local(const ctg_fit_result* fit, size_t index, int* country_id, double* a,
                         double* x0, double* u0, double* u_inf, double* error_out) {
    return guarded([&] {
        require(fit != nullptr, "fit is null");
        require(index < fit->fit.locals.size(), "index out of range");
        auto it = fit->fit.locals.begin();
        std::advance(it, index);
        if (country_id)
            *country_id = it->first;
        if (a)
            *a = it->second.params.a;
        if (x0)
            *x0 = it->second.params.x0;
        if (u0)
            *u0 = it->second.params.u0;
        if (u_inf)
            *u_inf = it->second.params.u_inf;
        if (error_out)
            *error_out = it->second.error;
    });
}

ctg_status ctg_fit_convergence(const ctg_fit_result* fit, int* outer_iterations, int* converged) {
    return guarded([&] {
        require(fit != nullptr, "fit is null");
        if (outer_iterations)
            *outer_iterations = fit->fit.outer_iterations;
        if (converged)
            *converged = fit->fit.converged ? 1 : 0;
    });
}

ctg_status ctg_fit_table_csv(const ctg_fit_result* fit, char** out) {
    return guarded([&] {
        require(fit && out, "fit or out is null");
        *out = dup_string(fitted_params_csv(fit->fit, fit->abbrev));
    });
}

ctg_status ctg_fit_iterations_csv(const ctg_fit_result* fit, char** out) {
    return guarded([&] {
        require(fit && out, "fit or out is null");
        *out = dup_string(iteration_log_csv(fit->fit));
    });
}

ctg_status ctg_fit_manifest_json(const ctg_fit_result* fit, char** out) {
    return guarded([&] {
        require(fit && out, "fit or out is null");
        *out = dup_string(fit_manifest_json(fit->fit, fit->config, fit->abbrev));
    });
}

ctg_status ctg_fit_curve_svg(const ctg_fit_result* fit, int country_id, char** out) {
    return guarded([&] {
        require(fit && out, "fit or out is null");
        const auto lit = fit->fit.locals.find(country_id);
        if (lit == fit->fit.locals.end())
            throw error(errc::not_found,
                        "country " + std::to_string(country_id) + " not in this fit");
        const EstimatedPrevalence* est = nullptr;
        for (const EstimatedPrevalence& e : fit->ests)
            if (e.country_id == country_id)
                est = &e;
        require(est != nullptr, "fit result lost its estimate");

        std::vector<double> times;
        for (double t = est->times.front(); t < est->times.back() + 1e-9; t += 1.0)
            times.push_back(t);
        const UtilityModel utility = make_utility(fit->config.law, lit->second.params,
                                                  fit->fit.universal, lit->second.t_star,
                                                  fit->articles);
        const Trajectory traj = integrate(lit->second.params, fit->fit.universal, utility, times,
                                          fit->config.integrator);
        auto ait = fit->abbrev.find(country_id);
        const std::string title =
            ait == fit->abbrev.end() ? "country " + std::to_string(country_id) : ait->second;
        *out = dup_string(fit_curve_svg(*est, traj, title));
    });
}

/* ---------------- analyze ---------------- */

namespace {

// Peak year for one country: recomputed from consumption when present,
// otherwise taken from the bundled table.
std::optional<int> resolve_peak(const ctg_dataset& ds, int country_id) {
    const YearSeries series =
        series_for(ds.observations, country_id, MeasurementKind::consumption);
    if (!series.years.empty())
        return peak_year(series);
    const auto it = ds.peak_years.find(country_id);
    if (it != ds.peak_years.end())
        return it->second;
    return std::nullopt;
}

} // namespace

ctg_status ctg_analyze_run(const ctg_dataset* dataset, const ctg_estimates* estimates,
                           const ctg_fit_result* fit, int tables_only, ctg_report** out) {
    return guarded([&] {
        require(dataset && out, "dataset or out is null");
        if (dataset->meta.empty())
            throw error(errc::validation, "no country metadata loaded");

        auto report = std::make_unique<ctg_report>();
        report->abbrev = abbrev_map(dataset->meta);

        std::map<int, const CountryMeta*> meta;
        for (const CountryMeta& m : dataset->meta)
            meta[m.country_id] = &m;

        // Core set: conformity + peak year (+ slope when data is present).
        if (tables_only) {
            if (!dataset->fitted)
                throw error(errc::validation, "no fitted-parameter table loaded");
            if (dataset->peak_years.empty())
                throw error(errc::validation, "no peak-year table loaded");
            for (const auto& [id, local] : dataset->fitted->locals) {
                const auto mit = meta.find(id);
                if (mit == meta.end())
                    throw error(errc::validation,
                                "country " + std::to_string(id) + " missing from metadata");
                const auto pit = dataset->peak_years.find(id);
                if (pit == dataset->peak_years.end())
                    throw error(errc::validation,
                                "country " + std::to_string(id) + " missing from peak years");
                CountryAnalysis row;
                row.country_id = id;
                row.a = local.params.a;
                row.idv = mit->second->idv;
                row.t_max = pit->second;
                row.s_x = std::nan("");
                row.t0_used = std::nan("");
                report->analyses.push_back(row);
            }
        } else {
            require(estimates && fit, "estimates and fit are required unless tables_only");
            for (const auto& [id, local] : fit->fit.locals) {
                const auto mit = meta.find(id);
                if (mit == meta.end())
                    throw error(errc::validation,
                                "country " + std::to_string(id) + " missing from metadata");
                const EstimatedPrevalence* est = nullptr;
                for (const EstimatedPrevalence& e : estimates->items)
                    if (e.country_id == id)
                        est = &e;
                if (!est || !est->estimated)
                    throw error(errc::validation, "country " + std::to_string(id) +
                                                      " has no reconstruction for analysis");
                const std::optional<int> peak = resolve_peak(*dataset, id);
                if (!peak)
                    throw error(errc::validation, "country " + std::to_string(id) +
                                                      " has no consumption data or peak year");
                CountryAnalysis row;
                row.country_id = id;
                row.a = local.params.a;
                row.idv = mit->second->idv;
                row.t_max = *peak;
                const SlopeResult slope = average_slope(*est, *peak);
                row.s_x = slope.s_x;
                row.t0_used = slope.t0_used;
                report->analyses.push_back(row);
            }
        }

        // Wide set: every country with metadata and a resolvable peak year.
        std::vector<std::pair<double, int>> wide;
        for (const CountryMeta& m : dataset->meta) {
            const std::optional<int> peak = resolve_peak(*dataset, m.country_id);
            if (peak)
                wide.emplace_back(static_cast<double>(m.idv), *peak);
        }

        report->study = correlation_study(report->analyses, wide);

        // Scatter-plot backing data for each cell.
        auto add_pair = [&report](const std::string& key, std::string title,
                                  const char* x_label, const char* y_label,
                                  const CorrelationResult* cell) {
            ctg_report::Pair p;
            p.title = std::move(title);
            p.x_label = x_label;
            p.y_label = y_label;
            p.cell = cell;
            report->pairs.emplace(key, std::move(p));
        };
        add_pair("idv_a", "individualism vs conformity", "individualism (IDV)", "conformity a",
                 &report->study.idv_a);
        add_pair("idv_sx", "individualism vs prevalence slope", "individualism (IDV)",
                 "average slope s_x (1/yr)", &report->study.idv_sx);
        add_pair("idv_tmax7", "individualism vs peak year (core set)", "individualism (IDV)",
                 "peak year t_max", &report->study.idv_tmax7);
        add_pair("idv_tmax25", "individualism vs peak year (wide set)", "individualism (IDV)",
                 "peak year t_max", &report->study.idv_tmax25);
        add_pair("a_sx", "conformity vs prevalence slope", "conformity a",
                 "average slope s_x (1/yr)", &report->study.a_sx);
        add_pair("a_tmax", "conformity vs peak year", "conformity a", "peak year t_max",
                 &report->study.a_tmax);

        for (const CountryAnalysis& row : report->analyses) {
            const std::string label = report->abbrev.count(row.country_id)
                                          ? report->abbrev[row.country_id]
                                          : std::to_string(row.country_id);
            auto push = [&](const char* key, double x, double y) {
                ctg_report::Pair& p = report->pairs.at(key);
                p.xs.push_back(x);
                p.ys.push_back(y);
                p.labels.push_back(label);
            };
            push("idv_a", row.idv, row.a);
            push("idv_tmax7", row.idv, row.t_max);
            push("a_tmax", row.a, row.t_max);
            if (std::isfinite(row.s_x)) {
                push("idv_sx", row.idv, row.s_x);
                push("a_sx", row.a, row.s_x);
            }
        }
        for (const auto& [idv, t_max] : wide) {
            ctg_report::Pair& p = report->pairs.at("idv_tmax25");
            p.xs.push_back(idv);
            p.ys.push_back(t_max);
            p.labels.emplace_back();
        }

        *out = report.release();
    });
}

void ctg_report_free(ctg_report* report) { delete report; }

ctg_status ctg_report_correlation(const ctg_report* report, const char* pair, double* rho,
                                  double* p, int* n) {
    return guarded([&] {
        require(report && pair, "report or pair is null");
        const auto it = report->pairs.find(pair);
        if (it == report->pairs.end())
            throw error(errc::not_found, std::string("unknown pair '") + pair + "'");
        if (rho)
            *rho = it->second.cell->rho;
        if (p)
            *p = it->second.cell->p;
        if (n)
            *n = it->second.cell->n;
    });
}

ctg_status ctg_report_correlations_csv(const ctg_report* report, char** out) {
    return guarded([&] {
        require(report && out, "report or out is null");
        *out = dup_string(correlations_csv(report->study));
    });
}

ctg_status ctg_report_analysis_csv(const ctg_report* report, char** out) {
    return guarded([&] {
        require(report && out, "report or out is null");
        *out = dup_string(analysis_table_csv(report->analyses, report->abbrev));
    });
}

ctg_status ctg_report_scatter_svg(const ctg_report* report, const char* pair, char** out) {
    return guarded([&] {
        require(report && pair && out, "argument is null");
        const auto it = report->pairs.find(pair);
        if (it == report->pairs.end())
            throw error(errc::not_found, std::string("unknown pair '") + pair + "'");
        const ctg_report::Pair& p = it->second;
        if (p.xs.empty())
            throw error(errc::validation,
                        std::string("no data for pair '") + pair + "' in this run");
        const bool label_points = p.xs.size() <= 12;
        *out = dup_string(render_scatter_with_fit(
            p.title, p.x_label, p.y_label, p.xs, p.ys,
            label_points ? std::span<const std::string>(p.labels)
                         : std::span<const std::string>()));
    });
}

ctg_status ctg_report_notes(const ctg_report* report, char** out) {
    return guarded([&] {
        require(report && out, "report or out is null");
        std::string text;
        for (const std::string& note : report->study.notes)
            text += note + "\n";
        *out = dup_string(text);
    });
}

/* ---------------- synth ---------------- */

void ctg_synth_options_init(ctg_synth_options* options) {
    if (!options)
        return;
    *options = ctg_synth_options{};
    options->law = CTG_UTILITY_DISCOUNTED;
    options->b = 1.0;
    options->delta = 0.998;
    options->first_year = 1920;
    options->n_years = 91;
    options->survey_first_year = 1950;
    options->noise_sd = 0.01;
    options->seed = 1;
}

ctg_status ctg_synth_run(const ctg_dataset* dataset, const ctg_synth_options* options,
                         char** out_measurements_csv, char** out_meta_csv,
                         char** out_manifest_json) {
    return guarded([&] {
        require(dataset && options, "dataset or options is null");
        if (!dataset->fitted)
            throw error(errc::validation, "no fitted-parameter table loaded (synthesis truth)");

        std::map<int, const CountryMeta*> meta;
        for (const CountryMeta& m : dataset->meta)
            meta[m.country_id] = &m;

        SynthConfig config;
        config.law = law_from(options->law);
        config.universal = {options->b, options->delta};
        config.first_year = options->first_year;
        config.n_years = options->n_years;
        config.survey_first_year = options->survey_first_year;
        config.noise_sd = options->noise_sd;
        config.seed = options->seed;

        std::vector<SynthCountry> countries;
        for (const auto& [id, local] : dataset->fitted->locals) {
            SynthCountry c;
            c.country_id = id;
            c.abbrev = local.abbrev;
            const auto mit = meta.find(id);
            if (mit != meta.end()) {
                c.name = mit->second->name;
                c.idv = mit->second->idv;
                if (c.abbrev.empty())
                    c.abbrev = mit->second->abbrev;
            } else {
                c.name = c.abbrev;
            }
            c.params = local.params;
            c.t_star = options->first_year + 0.5 * (options->n_years - 1);
            countries.push_back(std::move(c));
        }

        const SynthResult result = generate_synthetic(countries, dataset->articles, config);
        if (out_measurements_csv)
            *out_measurements_csv = dup_string(serialize_measurements(result.observations));
        if (out_meta_csv)
            *out_meta_csv = dup_string(country_meta_csv(result.meta));
        if (out_manifest_json)
            *out_manifest_json = dup_string(result.manifest_json);
    });
}

} /* extern "C" */
