#pragma once

#include <map>
#include <span>
#include <string>

#include "analysis.hpp"
#include "calibrate.hpp"
#include "dataio.hpp"
#include "integrate.hpp"

namespace contagion {

// All emitters return complete file contents (CSV, JSON, or SVG) and are
// deterministic: equal inputs give byte-identical strings.

// Observation counts per country: country_id,name,abbrev,n_prevalence,
// n_consumption, ordered by id.
std::string counts_table_csv(std::span<const Observation> obs, std::span<const CountryMeta> meta);

// Metadata table in the same layout parse_country_meta reads.
std::string country_meta_csv(std::span<const CountryMeta> meta);

// Regression and gate summary, one row per reconstruction; rows that could
// not be estimated show dashes.
std::string estimates_table_csv(std::span<const EstimatedPrevalence> ests,
                                std::span<const CountryMeta> meta);

// Reconstructed prevalence for one country: year,x_hat rows.
std::string xhat_csv(const EstimatedPrevalence& est);

// Fitted-parameter table in the same layout parse_fitted_params reads.
std::string fitted_params_csv(const FitResult& fit, const std::map<int, std::string>& abbrev);

// Total error after each outer iteration.
std::string iteration_log_csv(const FitResult& fit);

// Machine-readable record of a calibration run (parameters, errors,
// convergence, warnings, settings).
std::string fit_manifest_json(const FitResult& fit, const FitConfig& config,
                              const std::map<int, std::string>& abbrev);

// year,x rows of a simulated trajectory.
std::string trajectory_csv(const Trajectory& traj);

// Six-cell correlation table: pair,n,rho,p; omitted cells show dashes.
std::string correlations_csv(const StudyReport& report);

// Per-country analysis rows: country_id,abbrev,idv,a,s_x,slope_start,t_max.
// Countries without slopes/conformity (wide set) show dashes there.
std::string analysis_table_csv(std::span<const CountryAnalysis> analyses,
                               const std::map<int, std::string>& abbrev);

// Model curve over the reconstruction's years with the data as markers.
std::string fit_curve_svg(const EstimatedPrevalence& est, const Trajectory& model,
                          const std::string& title);

// Simulated trajectory, optionally overlaying a reconstruction.
std::string trajectory_svg(const Trajectory& model, const EstimatedPrevalence* overlay,
                           const std::string& title);

} // namespace contagion
