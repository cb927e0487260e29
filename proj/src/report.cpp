#include "report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include <nlohmann/json.hpp>

#include "svg.hpp"

namespace contagion {

namespace {

std::string num(double v) {
    if (!std::isfinite(v))
        return "-";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

// Commas inside free text would break the column structure.
std::string csv_safe(std::string text) {
    std::replace(text.begin(), text.end(), ',', ';');
    return text;
}

std::map<int, const CountryMeta*> meta_by_id(std::span<const CountryMeta> meta) {
    std::map<int, const CountryMeta*> out;
    for (const CountryMeta& m : meta)
        out[m.country_id] = &m;
    return out;
}

std::string abbrev_or_id(const std::map<int, std::string>& abbrev, int id) {
    const auto it = abbrev.find(id);
    return it == abbrev.end() ? std::to_string(id) : it->second;
}

const char* law_name(UtilityLaw law) {
    switch (law) {
    case UtilityLaw::discounted:
        return "discounted";
    case UtilityLaw::constant:
        return "constant";
    case UtilityLaw::step:
        return "step";
    }
    return "?";
}

} // namespace

std::string counts_table_csv(std::span<const Observation> obs, std::span<const CountryMeta> meta) {
    const auto lookup = meta_by_id(meta);
    std::map<int, std::pair<int, int>> counts; // id -> (prevalence, consumption)
    for (const Observation& o : obs) {
        auto& c = counts[o.country_id];
        (o.kind == MeasurementKind::prevalence ? c.first : c.second)++;
    }
    std::ostringstream out;
    out << "country_id,name,abbrev,n_prevalence,n_consumption\n";
    for (const auto& [id, c] : counts) {
        const auto it = lookup.find(id);
        out << id << ',' << (it != lookup.end() ? csv_safe(it->second->name) : std::string("-"))
            << ',' << (it != lookup.end() ? it->second->abbrev : std::string("-")) << ','
            << c.first << ',' << c.second << '\n';
    }
    return out.str();
}

std::string country_meta_csv(std::span<const CountryMeta> meta) {
    std::ostringstream out;
    out << "country_id,name,abbrev,idv\n";
    for (const CountryMeta& m : meta)
        out << m.country_id << ',' << csv_safe(m.name) << ',' << m.abbrev << ',' << m.idv << '\n';
    return out.str();
}

std::string estimates_table_csv(std::span<const EstimatedPrevalence> ests,
                                std::span<const CountryMeta> meta) {
    const auto lookup = meta_by_id(meta);
    std::ostringstream out;
    out << "country_id,abbrev,C_hat,C_ci95,B_hat,B_ci95,r2,p,n_obs,passed_gate,removed_year,"
           "note\n";
    for (const EstimatedPrevalence& e : ests) {
        const auto it = lookup.find(e.country_id);
        out << e.country_id << ','
            << (it != lookup.end() ? it->second->abbrev : std::string("-")) << ',';
        if (e.estimated) {
            const RegressionResult& r = e.regression;
            out << num(r.C_hat) << ',' << num(r.ci95_C) << ',' << num(r.B_hat) << ','
                << num(r.ci95_B) << ',' << num(r.r2) << ',' << num(r.p) << ',' << r.n_obs << ','
                << (e.passed_gate ? "yes" : "no") << ','
                << (e.removed_year ? std::to_string(*e.removed_year) : std::string("-")) << ','
                << csv_safe(e.diagnostic) << '\n';
        } else {
            out << "-,-,-,-,-,-,-,no,-," << csv_safe(e.diagnostic) << '\n';
        }
    }
    return out.str();
}

std::string xhat_csv(const EstimatedPrevalence& est) {
    std::ostringstream out;
    out << "year,x_hat\n";
    for (std::size_t i = 0; i < est.times.size(); ++i)
        out << num(est.times[i]) << ',' << num(est.values[i]) << '\n';
    return out.str();
}

std::string fitted_params_csv(const FitResult& fit, const std::map<int, std::string>& abbrev) {
    std::ostringstream out;
    out << "scope,country_id,abbrev,a,x0,u0,u_inf,b,delta,E\n";
    out << "universal,-,-,-,-,-,-," << num(fit.universal.b) << ',' << num(fit.universal.delta)
        << ',' << num(fit.total_error) << '\n';
    for (const auto& [id, lf] : fit.locals)
        out << "local," << id << ',' << abbrev_or_id(abbrev, id) << ',' << num(lf.params.a) << ','
            << num(lf.params.x0) << ',' << num(lf.params.u0) << ',' << num(lf.params.u_inf)
            << ",-,-," << num(lf.error) << '\n';
    return out.str();
}

std::string iteration_log_csv(const FitResult& fit) {
    std::ostringstream out;
    out << "iteration,total_error\n";
    for (std::size_t i = 0; i < fit.outer_errors.size(); ++i)
        out << i + 1 << ',' << num(fit.outer_errors[i]) << '\n';
    return out.str();
}

std::string fit_manifest_json(const FitResult& fit, const FitConfig& config,
                              const std::map<int, std::string>& abbrev) {
    nlohmann::ordered_json j;
    j["law"] = law_name(fit.law);
    j["universal"] = {{"b", fit.universal.b}, {"delta", fit.universal.delta}};
    j["total_error"] = fit.total_error;
    j["outer_iterations"] = fit.outer_iterations;
    j["converged"] = fit.converged;
    j["outer_errors"] = fit.outer_errors;

    nlohmann::ordered_json locals = nlohmann::ordered_json::object();
    for (const auto& [id, lf] : fit.locals) {
        nlohmann::ordered_json entry = {
            {"country_id", id},      {"a", lf.params.a},
            {"x0", lf.params.x0},    {"u0", lf.params.u0},
            {"u_inf", lf.params.u_inf}, {"t0", lf.params.t0},
            {"error", lf.error},     {"flagged", lf.flagged},
        };
        if (fit.law == UtilityLaw::step)
            entry["t_star"] = lf.t_star;
        locals[abbrev_or_id(abbrev, id)] = std::move(entry);
    }
    j["locals"] = std::move(locals);

    j["settings"] = {
        {"tol", config.tol},
        {"max_itn", config.max_itn},
        {"integrator",
         {{"rtol", config.integrator.rtol},
          {"atol", config.integrator.atol},
          {"h_init", config.integrator.h_init},
          {"h_max", config.integrator.h_max}}},
        {"inner",
         {{"max_fevals", config.inner.max_fevals},
          {"fd_rel_step", config.inner.fd_rel_step},
          {"step_tol", config.inner.step_tol},
          {"obj_tol", config.inner.obj_tol},
          {"lambda_init", config.inner.lambda_init}}},
    };
    j["warnings"] = fit.warnings;
    return j.dump(2) + "\n";
}

std::string trajectory_csv(const Trajectory& traj) {
    std::ostringstream out;
    out << "year,x\n";
    for (std::size_t i = 0; i < traj.times.size(); ++i)
        out << num(traj.times[i]) << ',' << num(traj.values[i]) << '\n';
    return out.str();
}

std::string correlations_csv(const StudyReport& report) {
    std::ostringstream out;
    out << "pair,n,rho,p\n";
    const std::pair<const char*, const CorrelationResult*> cells[] = {
        {"IDV~a", &report.idv_a},        {"IDV~s_x", &report.idv_sx},
        {"IDV~t_max_7", &report.idv_tmax7}, {"IDV~t_max_25", &report.idv_tmax25},
        {"a~s_x", &report.a_sx},         {"a~t_max", &report.a_tmax},
    };
    for (const auto& [name, cell] : cells) {
        out << name << ',';
        if (cell->n > 0)
            out << cell->n << ',' << num(cell->rho) << ',' << num(cell->p) << '\n';
        else
            out << "-,-,-\n";
    }
    return out.str();
}

std::string analysis_table_csv(std::span<const CountryAnalysis> analyses,
                               const std::map<int, std::string>& abbrev) {
    std::ostringstream out;
    out << "country_id,abbrev,idv,a,s_x,slope_start,t_max\n";
    for (const CountryAnalysis& c : analyses) {
        out << c.country_id << ',' << abbrev_or_id(abbrev, c.country_id) << ',' << num(c.idv)
            << ',';
        out << (std::isfinite(c.a) && c.a != 0.0 ? num(c.a) : std::string("-")) << ',';
        if (std::isfinite(c.s_x))
            out << num(c.s_x) << ',' << num(c.t0_used) << ',';
        else
            out << "-,-,";
        out << c.t_max << '\n';
    }
    return out.str();
}

std::string fit_curve_svg(const EstimatedPrevalence& est, const Trajectory& model,
                          const std::string& title) {
    SvgChart chart;
    chart.title = title;
    chart.x_label = "year";
    chart.y_label = "smoking prevalence";

    SvgSeries curve;
    curve.x = model.times;
    curve.y = model.values;
    curve.label = "model";
    curve.draw_line = true;
    curve.draw_markers = false;
    chart.series.push_back(std::move(curve));

    SvgSeries data;
    data.x = est.times;
    data.y = est.values;
    data.label = "estimated prevalence";
    data.color = "#b2401f";
    chart.series.push_back(std::move(data));
    return render_chart(chart);
}

std::string trajectory_svg(const Trajectory& model, const EstimatedPrevalence* overlay,
                           const std::string& title) {
    SvgChart chart;
    chart.title = title;
    chart.x_label = "year";
    chart.y_label = "smoking prevalence";

    SvgSeries curve;
    curve.x = model.times;
    curve.y = model.values;
    curve.label = "model";
    curve.draw_line = true;
    curve.draw_markers = false;
    chart.series.push_back(std::move(curve));

    if (overlay && overlay->estimated) {
        SvgSeries data;
        data.x = overlay->times;
        data.y = overlay->values;
        data.label = "estimated prevalence";
        data.color = "#b2401f";
        chart.series.push_back(std::move(data));
    }
    return render_chart(chart);
}

} // namespace contagion
