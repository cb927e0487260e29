#include "synth.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include <nlohmann/json.hpp>

#include "calibrate.hpp"
#include "errors.hpp"

namespace contagion {

namespace {

// Gaussian deviates pinned to the engine's raw output so the byte stream
// does not depend on the standard library's distribution internals.
class GaussianSource {
  public:
    explicit GaussianSource(std::uint64_t seed) : engine_(seed) {}

    double next(double sd) {
        if (have_spare_) {
            have_spare_ = false;
            return spare_ * sd;
        }
        double u1 = 0.0;
        do {
            u1 = uniform();
        } while (u1 <= 0.0);
        const double u2 = uniform();
        const double radius = std::sqrt(-2.0 * std::log(u1));
        const double angle = 2.0 * pi * u2;
        spare_ = radius * std::sin(angle);
        have_spare_ = true;
        return radius * std::cos(angle) * sd;
    }

  private:
    static constexpr double pi = 3.141592653589793238462643383279502884;

    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

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

SynthResult generate_synthetic(std::span<const SynthCountry> countries,
                               std::shared_ptr<const ArticleSeries> articles,
                               const SynthConfig& config) {
    if (countries.empty())
        throw error(errc::invalid_argument, "no countries to synthesize");
    if (config.n_years < 2)
        throw error(errc::invalid_argument, "need at least two years");
    if (config.law == UtilityLaw::discounted && !articles)
        throw error(errc::invalid_argument, "discounted utility needs an article series");
    {
        std::set<int> ids;
        for (const SynthCountry& c : countries) {
            if (!ids.insert(c.country_id).second)
                throw error(errc::invalid_argument,
                            "duplicate country " + std::to_string(c.country_id));
            if (!(c.C > 0.0))
                throw error(errc::invalid_argument, c.abbrev + ": mapping slope must be positive");
        }
    }

    const int last_year = config.first_year + config.n_years - 1;
    std::vector<double> years(config.n_years);
    for (int k = 0; k < config.n_years; ++k)
        years[k] = config.first_year + k;

    GaussianSource noise(config.seed);
    SynthResult result;
    nlohmann::ordered_json manifest;
    manifest["law"] = law_name(config.law);
    manifest["universal"] = {{"b", config.universal.b}, {"delta", config.universal.delta}};
    manifest["seed"] = config.seed;
    manifest["first_year"] = config.first_year;
    manifest["n_years"] = config.n_years;
    manifest["noise_sd"] = config.noise_sd;
    nlohmann::ordered_json truth = nlohmann::ordered_json::object();

    for (const SynthCountry& c : countries) {
        CountryParams p = c.params;
        p.t0 = years.front();
        const UtilityModel utility =
            make_utility(config.law, p, config.universal, c.t_star, articles);
        const Trajectory traj =
            integrate(p, config.universal, utility, years, config.integrator);

        const double sd = c.noise_sd < 0.0 ? config.noise_sd : c.noise_sd;
        const int survey_start =
            c.survey_first_year < 0 ? config.survey_first_year : c.survey_first_year;

        // Noiseless consumption via the inverse mapping; its peak is the
        // model curve's peak because the mapping is increasing.
        std::size_t peak = 0;
        for (std::size_t k = 0; k < traj.values.size(); ++k) {
            const double consumption = std::max((traj.values[k] - c.B) / c.C, 0.0);
            result.observations.push_back({c.country_id, static_cast<int>(years[k]), consumption,
                                           MeasurementKind::consumption});
            if (traj.values[k] > traj.values[peak])
                peak = k;
        }
        result.true_peak_year[c.country_id] = static_cast<int>(years[peak]);

        for (std::size_t k = 0; k < traj.values.size(); ++k) {
            if (years[k] < survey_start)
                continue;
            const double x = std::clamp(traj.values[k] + noise.next(sd), 0.0, 1.0);
            result.observations.push_back(
                {c.country_id, static_cast<int>(years[k]), x, MeasurementKind::prevalence});
        }

        result.meta.push_back({c.country_id, c.name, c.abbrev, c.idv});

        nlohmann::ordered_json entry = {
            {"country_id", c.country_id},
            {"a", p.a},
            {"x0", p.x0},
            {"u0", p.u0},
            {"u_inf", p.u_inf},
            {"C", c.C},
            {"B", c.B},
            {"idv", c.idv},
            {"noise_sd", sd},
            {"survey_first_year", survey_start},
            {"peak_year", result.true_peak_year[c.country_id]},
        };
        if (config.law == UtilityLaw::step)
            entry["t_star"] = c.t_star;
        truth[c.abbrev.empty() ? std::to_string(c.country_id) : c.abbrev] = std::move(entry);
    }
    manifest["last_year"] = last_year;
    manifest["countries"] = std::move(truth);
    result.manifest_json = manifest.dump(2) + "\n";
    return result;
}

} // namespace contagion
