#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "dataio.hpp"
#include "integrate.hpp"
#include "model.hpp"

namespace contagion {

// Ground truth for one synthetic country. Consumption is derived from the
// model curve through x = C*c + B, so the downstream regression has an exact
// target. Negative per-country overrides fall back to the run-wide setting.
struct SynthCountry {
    int country_id = 0;
    std::string name;
    std::string abbrev;
    int idv = 50;
    CountryParams params; // t0 is ignored; the run's first year applies
    double t_star = 0.0;  // step law only
    double C = 0.04;      // consumption-to-prevalence slope, must be > 0
    double B = 0.0;       // consumption-to-prevalence intercept
    double noise_sd = -1.0;
    int survey_first_year = -1;
};

struct SynthConfig {
    UtilityLaw law = UtilityLaw::discounted;
    UniversalParams universal{1.0, 0.998};
    int first_year = 1920;
    int n_years = 91;
    int survey_first_year = 1950; // first year with prevalence surveys
    double noise_sd = 0.01;      // Gaussian sd added to prevalence surveys
    std::uint64_t seed = 1;
    IntegratorConfig integrator;
};

struct SynthResult {
    std::vector<Observation> observations;
    std::vector<CountryMeta> meta;
    std::map<int, int> true_peak_year; // from the noiseless consumption curve
    std::string manifest_json;         // full ground-truth record
};

// Deterministic synthetic dataset: same countries, config, and seed give the
// same observations byte for byte. The article series is needed only under
// the discounted law.
SynthResult generate_synthetic(std::span<const SynthCountry> countries,
                               std::shared_ptr<const ArticleSeries> articles,
                               const SynthConfig& config);

} // namespace contagion
