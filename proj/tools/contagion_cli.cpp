// Command-line front end. Links only the public C API.

#include <CLI11.hpp>

#include <contagion/contagion.h>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;

namespace {

// Thrown after the error has already been printed.
struct BailOut {
    int exit_code;
};

int exit_code_for(ctg_status status) {
    switch (status) {
    case CTG_OK:
        return 0;
    case CTG_ERROR_NUMERIC:
    case CTG_ERROR_INTERNAL:
        return 1;
    default:
        return 2; // parse, validation, bad arguments, missing files
    }
}

void check(ctg_status status) {
    if (status != CTG_OK) {
        std::cerr << "error: " << ctg_last_error() << "\n";
        throw BailOut{exit_code_for(status)};
    }
}

[[noreturn]] void die(int exit_code, const std::string& message) {
    std::cerr << "error: " << message << "\n";
    throw BailOut{exit_code};
}

// Owning wrapper for strings returned by the library.
class CtgString {
  public:
    CtgString() = default;
    ~CtgString() { ctg_string_free(ptr_); }
    CtgString(const CtgString&) = delete;
    CtgString& operator=(const CtgString&) = delete;

    char** out() { return &ptr_; }
    std::string str() const { return ptr_ ? ptr_ : ""; }

  private:
    char* ptr_ = nullptr;
};

template <typename T, void (*Free)(T*)> class Handle {
  public:
    Handle() = default;
    ~Handle() { Free(ptr_); }
    Handle(const Handle&) = delete;
    Handle& operator=(const Handle&) = delete;
    Handle(Handle&& other) noexcept : ptr_(other.ptr_) { other.ptr_ = nullptr; }
    Handle& operator=(Handle&& other) noexcept {
        if (this != &other) {
            Free(ptr_);
            ptr_ = other.ptr_;
            other.ptr_ = nullptr;
        }
        return *this;
    }

    T** out() { return &ptr_; }
    T* get() const { return ptr_; }

  private:
    T* ptr_ = nullptr;
};

using Dataset = Handle<ctg_dataset, ctg_dataset_free>;
using Estimates = Handle<ctg_estimates, ctg_estimates_free>;
using Fit = Handle<ctg_fit_result, ctg_fit_result_free>;
using Report = Handle<ctg_report, ctg_report_free>;

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        die(2, "cannot open " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

void write_file(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        die(2, "cannot write " + path.string());
    out << text;
    if (!out)
        die(2, "write failed for " + path.string());
    std::cout << "wrote " << path.string() << "\n";
}

// Loads one CSV slot of the dataset; returns false when the file is absent.
bool load_optional(ctg_dataset* dataset, const fs::path& path,
                   ctg_status (*loader)(ctg_dataset*, const char*)) {
    if (!fs::exists(path))
        return false;
    check(loader(dataset, read_file(path).c_str()));
    return true;
}

void load_required(ctg_dataset* dataset, const fs::path& path,
                   ctg_status (*loader)(ctg_dataset*, const char*)) {
    if (!load_optional(dataset, path, loader))
        die(2, "missing input file " + path.string());
}

// Everything the subcommands consume; filled from flags/config by CLI11.
struct Options {
    std::string data_dir = "data";
    std::string out_dir = "out";
    std::string countries;        // comma list of ids or abbreviations
    std::string utility = "discounted";
    std::string screen_outliers;  // comma list of abbreviations
    double tol = 1e-6;
    int max_itn = 150;
    std::uint64_t seed = 1;
    bool tables_only = false;
    double grubbs_alpha = 0.05;
    double rtol = 0.0;
    double atol = 0.0;

    // simulate
    double a = 0.963, x0 = 0.063, u0 = 0.513, u_inf = 0.470;
    double b = 1.049, delta = 0.9981, t_star = 1964.0;
    double year_from = 1920.0, year_to = 2010.0, year_step = 1.0;
    std::string country; // simulate from the fitted table instead of flags
    bool explicit_params = false; // set when any simulate param flag is used

    // synth
    double noise_sd = 0.01;
    int first_year = 1920;
    int n_years = 91;
    int survey_first_year = 1950;
    double synth_b = 1.0;
    double synth_delta = 0.998;
};

int utility_code(const std::string& name) {
    if (name == "discounted")
        return CTG_UTILITY_DISCOUNTED;
    if (name == "constant")
        return CTG_UTILITY_CONSTANT;
    if (name == "step")
        return CTG_UTILITY_STEP;
    die(2, "unknown utility law '" + name + "' (expected discounted, constant, or step)");
}

fs::path data_path(const Options& opt, const char* name) {
    return fs::path(opt.data_dir) / name;
}

void ensure_out_dir(const Options& opt) {
    std::error_code ec;
    fs::create_directories(opt.out_dir, ec);
    if (ec)
        die(2, "cannot create output directory " + opt.out_dir + ": " + ec.message());
}

std::map<int, std::string> abbrevs_for(const ctg_dataset* dataset) {
    size_t count = 0;
    check(ctg_dataset_country_ids(dataset, nullptr, &count));
    std::vector<int> ids(count);
    if (count > 0)
        check(ctg_dataset_country_ids(dataset, ids.data(), &count));
    std::map<int, std::string> out;
    for (int id : ids) {
        CtgString abbrev;
        check(ctg_dataset_country_abbrev(dataset, id, abbrev.out()));
        out[id] = abbrev.str();
    }
    return out;
}

// Resolves --countries tokens (numeric ids or abbreviations) against the
// measurements actually loaded.
std::vector<int> select_countries(const ctg_dataset* dataset, const std::string& tokens) {
    const std::map<int, std::string> abbrev = abbrevs_for(dataset);
    std::vector<int> out;
    std::istringstream list(tokens);
    std::string token;
    while (std::getline(list, token, ',')) {
        if (token.empty())
            continue;
        bool found = false;
        for (const auto& [id, ab] : abbrev) {
            if (token == ab || token == std::to_string(id)) {
                out.push_back(id);
                found = true;
                break;
            }
        }
        if (!found)
            die(2, "unknown country '" + token + "'");
    }
    return out;
}

Estimates run_estimates(const ctg_dataset* dataset, const Options& opt) {
    std::vector<int> ids;
    if (!opt.countries.empty())
        ids = select_countries(dataset, opt.countries);
    Estimates estimates;
    check(ctg_estimate_run(dataset, ids.empty() ? nullptr : ids.data(), ids.size(),
                           opt.screen_outliers.empty() ? nullptr : opt.screen_outliers.c_str(),
                           opt.grubbs_alpha, estimates.out()));
    return estimates;
}

Fit run_fit(const ctg_dataset* dataset, const ctg_estimates* estimates, const Options& opt) {
    ctg_fit_options fit_options;
    ctg_fit_options_init(&fit_options);
    fit_options.law = utility_code(opt.utility);
    fit_options.tol = opt.tol;
    fit_options.max_itn = opt.max_itn;
    fit_options.rtol = opt.rtol;
    fit_options.atol = opt.atol;
    Fit fit;
    check(ctg_fit_run(dataset, estimates, &fit_options, fit.out()));
    return fit;
}

/* ---------------- subcommands ---------------- */

int cmd_ingest(const Options& opt) {
    Dataset dataset;
    check(ctg_dataset_create(dataset.out()));
    load_required(dataset.get(), data_path(opt, "measurements.csv"),
                  ctg_dataset_load_measurements);
    load_required(dataset.get(), data_path(opt, "articles.csv"), ctg_dataset_load_articles);
    load_required(dataset.get(), data_path(opt, "country_meta.csv"),
                  ctg_dataset_load_country_meta);
    load_optional(dataset.get(), data_path(opt, "fitted_params.csv"),
                  ctg_dataset_load_fitted_params);
    load_optional(dataset.get(), data_path(opt, "peak_years.csv"), ctg_dataset_load_peak_years);

    CtgString counts;
    check(ctg_dataset_counts_csv(dataset.get(), counts.out()));
    std::cout << counts.str();
    return 0;
}

int cmd_estimate(const Options& opt) {
    Dataset dataset;
    check(ctg_dataset_create(dataset.out()));
    load_required(dataset.get(), data_path(opt, "measurements.csv"),
                  ctg_dataset_load_measurements);
    load_optional(dataset.get(), data_path(opt, "country_meta.csv"),
                  ctg_dataset_load_country_meta);

    const Estimates estimates = run_estimates(dataset.get(), opt);

    ensure_out_dir(opt);
    CtgString table;
    check(ctg_estimates_table_csv(estimates.get(), table.out()));
    write_file(fs::path(opt.out_dir) / "estimates.csv", table.str());

    size_t count = 0;
    check(ctg_estimates_count(estimates.get(), &count));
    for (size_t i = 0; i < count; ++i) {
        int id = 0, gate = 0;
        check(ctg_estimates_info(estimates.get(), i, &id, &gate, nullptr, nullptr, nullptr));
        CtgString xhat;
        if (ctg_estimates_xhat_csv(estimates.get(), id, xhat.out()) != CTG_OK)
            continue; // nothing reconstructable for this country
        CtgString abbrev;
        check(ctg_dataset_country_abbrev(dataset.get(), id, abbrev.out()));
        write_file(fs::path(opt.out_dir) / ("xhat_" + abbrev.str() + ".csv"), xhat.str());
    }
    return 0;
}

int cmd_fit(const Options& opt) {
    Dataset dataset;
    check(ctg_dataset_create(dataset.out()));
    load_required(dataset.get(), data_path(opt, "measurements.csv"),
                  ctg_dataset_load_measurements);
    load_optional(dataset.get(), data_path(opt, "country_meta.csv"),
                  ctg_dataset_load_country_meta);
    if (utility_code(opt.utility) == CTG_UTILITY_DISCOUNTED)
        load_required(dataset.get(), data_path(opt, "articles.csv"), ctg_dataset_load_articles);

    const Estimates estimates = run_estimates(dataset.get(), opt);
    const Fit fit = run_fit(dataset.get(), estimates.get(), opt);

    ensure_out_dir(opt);
    CtgString table, iterations, manifest;
    check(ctg_fit_table_csv(fit.get(), table.out()));
    check(ctg_fit_iterations_csv(fit.get(), iterations.out()));
    check(ctg_fit_manifest_json(fit.get(), manifest.out()));
    write_file(fs::path(opt.out_dir) / "fitted_params.csv", table.str());
    write_file(fs::path(opt.out_dir) / "fit_iterations.csv", iterations.str());
    write_file(fs::path(opt.out_dir) / "fit_manifest.json", manifest.str());

    size_t count = 0;
    check(ctg_fit_country_count(fit.get(), &count));
    for (size_t i = 0; i < count; ++i) {
        int id = 0;
        check(ctg_fit_local(fit.get(), i, &id, nullptr, nullptr, nullptr, nullptr, nullptr));
        CtgString svg, abbrev;
        check(ctg_fit_curve_svg(fit.get(), id, svg.out()));
        check(ctg_dataset_country_abbrev(dataset.get(), id, abbrev.out()));
        write_file(fs::path(opt.out_dir) / ("curve_" + abbrev.str() + ".svg"), svg.str());
    }

    double b = 0.0, delta = 0.0, total = 0.0;
    int itn = 0, converged = 0;
    check(ctg_fit_universal(fit.get(), &b, &delta, &total));
    check(ctg_fit_convergence(fit.get(), &itn, &converged));
    std::cout << "b = " << b << ", delta = " << delta << ", total error = " << total << " ("
              << itn << " iterations, " << (converged ? "converged" : "iteration cap") << ")\n";
    return 0;
}

int cmd_simulate(const Options& opt) {
    Dataset dataset;
    check(ctg_dataset_create(dataset.out()));
    const bool have_articles =
        load_optional(dataset.get(), data_path(opt, "articles.csv"), ctg_dataset_load_articles);
    load_optional(dataset.get(), data_path(opt, "country_meta.csv"),
                  ctg_dataset_load_country_meta);

    ctg_simulate_options sim;
    ctg_simulate_options_init(&sim);
    sim.law = utility_code(opt.utility);
    sim.a = opt.a;
    sim.x0 = opt.x0;
    sim.u0 = opt.u0;
    sim.u_inf = opt.u_inf;
    sim.b = opt.b;
    sim.delta = opt.delta;
    sim.t_star = opt.t_star;
    sim.t0 = opt.year_from;
    sim.t1 = opt.year_to;
    sim.output_step = opt.year_step;
    sim.rtol = opt.rtol;
    sim.atol = opt.atol;

    Estimates estimates; // overlay, when data is around
    int overlay_id = -1;

    if (!opt.country.empty()) {
        // Parameters come from the fitted table; flags must not fight it.
        if (opt.explicit_params)
            die(2, "--country and explicit parameter flags are mutually exclusive");
        load_required(dataset.get(), data_path(opt, "fitted_params.csv"),
                      ctg_dataset_load_fitted_params);
        int row_id = -1;
        check(ctg_dataset_fitted_params(dataset.get(), opt.country.c_str(), &row_id, &sim.a,
                                        &sim.x0, &sim.u0, &sim.u_inf, &sim.b, &sim.delta));

        if (fs::exists(data_path(opt, "measurements.csv"))) {
            load_required(dataset.get(), data_path(opt, "measurements.csv"),
                          ctg_dataset_load_measurements);
            check(ctg_estimate_run(dataset.get(), &row_id, 1, nullptr, 0.05, estimates.out()));
            overlay_id = row_id;
        }
    }

    if (sim.law == CTG_UTILITY_DISCOUNTED && !have_articles)
        die(2, "missing input file " + data_path(opt, "articles.csv").string());

    CtgString csv, svg;
    check(ctg_simulate(dataset.get(), &sim, estimates.get(), overlay_id, csv.out(), svg.out()));

    ensure_out_dir(opt);
    write_file(fs::path(opt.out_dir) / "simulate.csv", csv.str());
    write_file(fs::path(opt.out_dir) / "simulate.svg", svg.str());
    return 0;
}

int cmd_analyze(const Options& opt) {
    Dataset dataset;
    check(ctg_dataset_create(dataset.out()));
    load_required(dataset.get(), data_path(opt, "country_meta.csv"),
                  ctg_dataset_load_country_meta);
    load_optional(dataset.get(), data_path(opt, "peak_years.csv"), ctg_dataset_load_peak_years);

    Estimates estimates;
    Fit fit;
    Report report;
    if (opt.tables_only) {
        load_required(dataset.get(), data_path(opt, "fitted_params.csv"),
                      ctg_dataset_load_fitted_params);
        check(ctg_analyze_run(dataset.get(), nullptr, nullptr, 1, report.out()));
    } else {
        load_required(dataset.get(), data_path(opt, "measurements.csv"),
                      ctg_dataset_load_measurements);
        if (utility_code(opt.utility) == CTG_UTILITY_DISCOUNTED)
            load_required(dataset.get(), data_path(opt, "articles.csv"),
                          ctg_dataset_load_articles);
        estimates = run_estimates(dataset.get(), opt);
        fit = run_fit(dataset.get(), estimates.get(), opt);
        check(ctg_analyze_run(dataset.get(), estimates.get(), fit.get(), 0, report.out()));
    }

    ensure_out_dir(opt);
    CtgString correlations, table, notes;
    check(ctg_report_correlations_csv(report.get(), correlations.out()));
    check(ctg_report_analysis_csv(report.get(), table.out()));
    check(ctg_report_notes(report.get(), notes.out()));
    write_file(fs::path(opt.out_dir) / "correlations.csv", correlations.str());
    write_file(fs::path(opt.out_dir) / "analysis.csv", table.str());

    for (const char* pair :
         {"idv_a", "idv_sx", "idv_tmax7", "idv_tmax25", "a_sx", "a_tmax"}) {
        int n = 0;
        check(ctg_report_correlation(report.get(), pair, nullptr, nullptr, &n));
        if (n == 0)
            continue; // cell not computable in this run
        CtgString svg;
        check(ctg_report_scatter_svg(report.get(), pair, svg.out()));
        write_file(fs::path(opt.out_dir) / ("scatter_" + std::string(pair) + ".svg"), svg.str());
    }

    std::cout << correlations.str();
    if (!notes.str().empty())
        std::cout << "notes:\n" << notes.str();
    return 0;
}

int cmd_synth(const Options& opt) {
    Dataset dataset;
    check(ctg_dataset_create(dataset.out()));
    load_required(dataset.get(), data_path(opt, "fitted_params.csv"),
                  ctg_dataset_load_fitted_params);
    load_optional(dataset.get(), data_path(opt, "country_meta.csv"),
                  ctg_dataset_load_country_meta);
    if (utility_code(opt.utility) == CTG_UTILITY_DISCOUNTED)
        load_required(dataset.get(), data_path(opt, "articles.csv"), ctg_dataset_load_articles);

    ctg_synth_options synth;
    ctg_synth_options_init(&synth);
    synth.law = utility_code(opt.utility);
    synth.b = opt.synth_b;
    synth.delta = opt.synth_delta;
    synth.first_year = opt.first_year;
    synth.n_years = opt.n_years;
    synth.survey_first_year = opt.survey_first_year;
    synth.noise_sd = opt.noise_sd;
    synth.seed = opt.seed;

    CtgString measurements, meta, manifest;
    check(ctg_synth_run(dataset.get(), &synth, measurements.out(), meta.out(), manifest.out()));

    ensure_out_dir(opt);
    write_file(fs::path(opt.out_dir) / "synthetic_measurements.csv", measurements.str());
    write_file(fs::path(opt.out_dir) / "synthetic_country_meta.csv", meta.str());
    write_file(fs::path(opt.out_dir) / "synthetic_truth.json", manifest.str());
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Social-contagion smoking-prevalence toolkit"};
    app.fallthrough();
    app.set_config("--config", "", "Flat key = value config file; flags win over file values");

    Options opt;
    app.add_option("--data-dir", opt.data_dir, "Directory with the input CSV files")
        ->envname("CONTAGION_FIT_DATA")
        ->capture_default_str();
    app.add_option("--out-dir", opt.out_dir, "Directory for generated artifacts")
        ->capture_default_str();
    app.add_option("--countries", opt.countries,
                   "Comma-separated country ids or abbreviations to include");
    app.add_option("--utility", opt.utility, "Utility law: discounted, constant, or step")
        ->capture_default_str();
    app.add_option("--screen-outliers", opt.screen_outliers,
                   "Comma-separated abbreviations to screen for a single outlier");
    app.add_option("--grubbs-alpha", opt.grubbs_alpha, "Outlier screening level")
        ->capture_default_str();
    app.add_option("--tol", opt.tol, "Fit: stop when the total error change drops below this")
        ->capture_default_str();
    app.add_option("--max-itn", opt.max_itn, "Fit: outer iteration cap")->capture_default_str();
    app.add_option("--rtol", opt.rtol, "Integrator relative tolerance (0: default)");
    app.add_option("--atol", opt.atol, "Integrator absolute tolerance (0: default)");
    app.add_flag("--tables-only", opt.tables_only,
                 "Analyze from the bundled parameter/peak tables without measurements");
    app.add_option("--seed", opt.seed, "Random seed for synth")->capture_default_str();

    auto* sim_a = app.add_option("--a", opt.a, "Simulate: conformity a");
    auto* sim_x0 = app.add_option("--x0", opt.x0, "Simulate: initial prevalence");
    auto* sim_u0 = app.add_option("--u0", opt.u0, "Simulate: initial utility");
    auto* sim_ui = app.add_option("--u-inf", opt.u_inf, "Simulate: long-run utility");
    auto* sim_b = app.add_option("--b", opt.b, "Simulate: rate b");
    auto* sim_d = app.add_option("--delta", opt.delta, "Simulate: discount factor");
    auto* sim_ts = app.add_option("--t-star", opt.t_star, "Simulate: step-law switch year");
    app.add_option("--from", opt.year_from, "Simulate: first year")->capture_default_str();
    app.add_option("--to", opt.year_to, "Simulate: last year")->capture_default_str();
    app.add_option("--step", opt.year_step, "Simulate: output spacing in years")
        ->capture_default_str();
    app.add_option("--country", opt.country,
                   "Simulate: take parameters for this country from the fitted table");

    app.add_option("--noise-sd", opt.noise_sd, "Synth: prevalence noise sd")
        ->capture_default_str();
    app.add_option("--first-year", opt.first_year, "Synth: first year")->capture_default_str();
    app.add_option("--n-years", opt.n_years, "Synth: number of annual points")
        ->capture_default_str();
    app.add_option("--survey-first-year", opt.survey_first_year,
                   "Synth: first year with prevalence surveys")
        ->capture_default_str();
    app.add_option("--synth-b", opt.synth_b, "Synth: shared rate b")->capture_default_str();
    app.add_option("--synth-delta", opt.synth_delta, "Synth: discount factor")
        ->capture_default_str();

    auto* ingest = app.add_subcommand("ingest", "Parse and validate the data directory");
    auto* estimate = app.add_subcommand("estimate", "Reconstruct prevalence from consumption");
    auto* fit = app.add_subcommand("fit", "Calibrate the model to the reconstructions");
    auto* simulate = app.add_subcommand("simulate", "Forward-simulate one parameter set");
    auto* analyze = app.add_subcommand("analyze", "Slope/peak-year correlation study");
    auto* synth = app.add_subcommand("synth", "Generate a synthetic dataset with known truth");
    app.require_subcommand(1);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    opt.explicit_params = sim_a->count() || sim_x0->count() || sim_u0->count() ||
                          sim_ui->count() || sim_b->count() || sim_d->count() ||
                          sim_ts->count();

    try {
        if (ingest->parsed())
            return cmd_ingest(opt);
        if (estimate->parsed())
            return cmd_estimate(opt);
        if (fit->parsed())
            return cmd_fit(opt);
        if (simulate->parsed())
            return cmd_simulate(opt);
        if (analyze->parsed())
            return cmd_analyze(opt);
        if (synth->parsed())
            return cmd_synth(opt);
    } catch (const BailOut& b) {
        return b.exit_code;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
