#include <doctest.h>

#include <limits>
#include <map>
#include <nlohmann/json.hpp>
#include <string>
#include <vector>

#include "analysis.hpp"
#include "calibrate.hpp"
#include "dataio.hpp"
#include "report.hpp"

using namespace contagion;

namespace {

std::vector<CountryMeta> two_countries() {
    return {
        {1, "Australia", "AUS", 90},
        {25, "United States", "USA", 91},
    };
}

FitResult sample_fit() {
    FitResult fit;
    fit.law = UtilityLaw::discounted;
    fit.universal = UniversalParams{1.049, 0.9981};
    fit.total_error = 0.163;
    fit.outer_iterations = 2;
    fit.converged = true;
    fit.outer_errors = {0.25, 0.163};
    LocalFit usa;
    usa.params = CountryParams{0.963, 0.063, 0.513, 0.470, 1931.0};
    usa.error = 0.024;
    fit.locals[25] = usa;
    LocalFit aus;
    aus.params = CountryParams{1.035, 0.033, 0.551, 0.484, 1920.0};
    aus.error = 0.032;
    fit.locals[1] = aus;
    return fit;
}

bool contains(const std::string& hay, const std::string& needle) {
    return hay.find(needle) != std::string::npos;
}

} // namespace

TEST_CASE("counts table lists both measurement kinds per country") {
    const std::vector<Observation> obs{
        {1, 1950, 0.2, MeasurementKind::prevalence},
        {1, 1951, 0.21, MeasurementKind::prevalence},
        {1, 1950, 6.5, MeasurementKind::consumption},
        {25, 1950, 4.0, MeasurementKind::consumption},
    };
    const std::string csv = counts_table_csv(obs, two_countries());
    CHECK(contains(csv, "country_id,name,abbrev,n_prevalence,n_consumption\n"));
    CHECK(contains(csv, "1,Australia,AUS,2,1\n"));
    CHECK(contains(csv, "25,United States,USA,0,1\n"));
}

TEST_CASE("country metadata round-trips through its parser") {
    const auto meta = two_countries();
    const auto parsed = parse_country_meta(country_meta_csv(meta));
    REQUIRE(parsed.size() == meta.size());
    for (std::size_t i = 0; i < meta.size(); ++i) {
        CHECK(parsed[i].country_id == meta[i].country_id);
        CHECK(parsed[i].name == meta[i].name);
        CHECK(parsed[i].abbrev == meta[i].abbrev);
        CHECK(parsed[i].idv == meta[i].idv);
    }
}

TEST_CASE("estimates table shows dashes for countries that could not be fit") {
    EstimatedPrevalence good;
    good.country_id = 1;
    good.estimated = true;
    good.passed_gate = true;
    good.regression = RegressionResult{0.04, 0.02, 0.001, 0.005, 0.98, 1e-6, 20};
    good.times = {1950.0};
    good.values = {0.28};

    EstimatedPrevalence bad;
    bad.country_id = 25;
    bad.estimated = false;
    bad.diagnostic = "only 2 paired years";

    const std::string csv = estimates_table_csv(std::vector{good, bad}, two_countries());
    CHECK(contains(csv, "country_id,abbrev,C_hat,"));
    CHECK(contains(csv, "1,AUS,0.04,"));
    CHECK(contains(csv, "25,USA,-,-,-,-,-,-,-,no,-,only 2 paired years\n"));
}

TEST_CASE("reconstructed prevalence emits year,x_hat rows") {
    EstimatedPrevalence est;
    est.country_id = 1;
    est.estimated = true;
    est.times = {1950.0, 1951.0};
    est.values = {0.25, 0.2625};
    CHECK(xhat_csv(est) == "year,x_hat\n1950,0.25\n1951,0.2625\n");
}

TEST_CASE("fitted parameters round-trip through their parser") {
    const FitResult fit = sample_fit();
    const std::map<int, std::string> abbrev{{1, "AUS"}, {25, "USA"}};
    const std::string csv = fitted_params_csv(fit, abbrev);

    const FittedParamsTable table = parse_fitted_params(csv);
    CHECK(table.universal.b == doctest::Approx(1.049).epsilon(1e-12));
    CHECK(table.universal.delta == doctest::Approx(0.9981).epsilon(1e-12));
    CHECK(table.total_error == doctest::Approx(0.163).epsilon(1e-12));
    REQUIRE(table.locals.size() == 2);
    CHECK(table.locals.at(25).abbrev == "USA");
    CHECK(table.locals.at(25).params.a == doctest::Approx(0.963).epsilon(1e-12));
    CHECK(table.locals.at(25).params.u_inf == doctest::Approx(0.470).epsilon(1e-12));
    CHECK(table.locals.at(1).error == doctest::Approx(0.032).epsilon(1e-12));
}

TEST_CASE("iteration log lists the outer-iteration errors in order") {
    CHECK(iteration_log_csv(sample_fit()) ==
          "iteration,total_error\n1,0.25\n2,0.163\n");
}

TEST_CASE("fit manifest is valid JSON carrying the run record") {
    const FitResult fit = sample_fit();
    FitConfig config;
    config.tol = 1e-6;
    const std::map<int, std::string> abbrev{{1, "AUS"}, {25, "USA"}};
    const std::string text = fit_manifest_json(fit, config, abbrev);

    const auto j = nlohmann::json::parse(text);
    CHECK(j.at("law") == "discounted");
    CHECK(j.at("universal").at("b").get<double>() == doctest::Approx(1.049));
    CHECK(j.at("converged") == true);
    CHECK(j.at("outer_errors").size() == 2);
    CHECK(j.at("locals").at("USA").at("a").get<double>() == doctest::Approx(0.963));
    CHECK(j.at("settings").at("tol").get<double>() == doctest::Approx(1e-6));
    // t_star only matters under the step law.
    CHECK_FALSE(j.at("locals").at("USA").contains("t_star"));

    FitResult step_fit = fit;
    step_fit.law = UtilityLaw::step;
    step_fit.locals[25].t_star = 1964.0;
    const auto j2 = nlohmann::json::parse(fit_manifest_json(step_fit, config, abbrev));
    CHECK(j2.at("locals").at("USA").at("t_star").get<double>() == doctest::Approx(1964.0));
}

TEST_CASE("simulated trajectories emit year,x rows") {
    Trajectory traj;
    traj.times = {1920.0, 1921.0};
    traj.values = {0.05, 0.0525};
    CHECK(trajectory_csv(traj) == "year,x\n1920,0.05\n1921,0.0525\n");
}

TEST_CASE("correlation table writes six rows with dashes for omitted cells") {
    StudyReport report;
    report.idv_a = CorrelationResult{-0.87, 0.011, 7};
    report.idv_tmax7 = CorrelationResult{-0.76, 0.047, 7};
    report.idv_tmax25 = CorrelationResult{-0.53, 0.006, 25};
    report.a_tmax = CorrelationResult{0.87, 0.012, 7};
    // slope cells left at n = 0 (omitted)

    const std::string csv = correlations_csv(report);
    CHECK(contains(csv, "pair,n,rho,p\n"));
    CHECK(contains(csv, "IDV~a,7,-0.87,0.011\n"));
    CHECK(contains(csv, "IDV~s_x,-,-,-\n"));
    CHECK(contains(csv, "IDV~t_max_7,7,-0.76,0.047\n"));
    CHECK(contains(csv, "IDV~t_max_25,25,-0.53,0.006\n"));
    CHECK(contains(csv, "a~s_x,-,-,-\n"));
    CHECK(contains(csv, "a~t_max,7,0.87,0.012\n"));
}

TEST_CASE("analysis table dashes out quantities that were not computed") {
    CountryAnalysis with;
    with.country_id = 25;
    with.idv = 91.0;
    with.a = 0.963;
    with.s_x = 0.004;
    with.t0_used = 1931.0;
    with.t_max = 1963;

    CountryAnalysis without; // wide-set country: no fit, no slope
    without.country_id = 14;
    without.idv = 46.0;
    without.a = 0.0;
    without.s_x = std::numeric_limits<double>::quiet_NaN();
    without.t_max = 1977;

    const std::map<int, std::string> abbrev{{25, "USA"}, {14, "JPN"}};
    const std::string csv = analysis_table_csv(std::vector{with, without}, abbrev);
    CHECK(contains(csv, "country_id,abbrev,idv,a,s_x,slope_start,t_max\n"));
    CHECK(contains(csv, "25,USA,91,0.963,0.004,1931,1963\n"));
    CHECK(contains(csv, "14,JPN,46,-,-,-,1977\n"));
}

TEST_CASE("csv emitters are deterministic") {
    const FitResult fit = sample_fit();
    const std::map<int, std::string> abbrev{{1, "AUS"}, {25, "USA"}};
    CHECK(fitted_params_csv(fit, abbrev) == fitted_params_csv(fit, abbrev));
    CHECK(fit_manifest_json(fit, FitConfig{}, abbrev) == fit_manifest_json(fit, FitConfig{}, abbrev));
}

TEST_CASE("commas inside free-text fields are made CSV-safe") {
    std::vector<CountryMeta> meta{{3, "Korea, Republic of", "KOR", 18}};
    const std::string csv = country_meta_csv(meta);
    CHECK_FALSE(contains(csv, "Korea, Republic"));
    CHECK(contains(csv, "Korea; Republic of"));
    const auto parsed = parse_country_meta(csv);
    CHECK(parsed[0].abbrev == "KOR");
}

TEST_CASE("fit curve and trajectory charts embed both series") {
    EstimatedPrevalence est;
    est.country_id = 1;
    est.estimated = true;
    est.times = {1950.0, 1960.0, 1970.0};
    est.values = {0.2, 0.3, 0.35};
    Trajectory model;
    model.times = {1950.0, 1955.0, 1960.0, 1965.0, 1970.0};
    model.values = {0.21, 0.25, 0.29, 0.33, 0.34};

    const std::string curve = fit_curve_svg(est, model, "AUS calibration");
    CHECK(contains(curve, "AUS calibration"));
    CHECK(contains(curve, "<polyline"));
    CHECK(contains(curve, "<circle"));

    const std::string with_overlay = trajectory_svg(model, &est, "simulated");
    CHECK(contains(with_overlay, "<circle"));
    const std::string without_overlay = trajectory_svg(model, nullptr, "simulated");
    CHECK_FALSE(contains(without_overlay, "<circle"));
}
