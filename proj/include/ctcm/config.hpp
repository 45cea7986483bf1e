#ifndef CTCM_CONFIG_HPP
#define CTCM_CONFIG_HPP

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ctcm/distributions.hpp"
#include "ctcm/simulate.hpp"

namespace ctcm {

// Parse or semantic problem in a run configuration. Messages carry the JSON
// path of the offending field and, for syntax errors, the line and column.
class ConfigError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// One engine column of a sweep: the global-clock process, or the
// clock-per-site process with explicit wait laws.
struct EngineSpec {
    std::optional<SemiMarkovConfig> waits;
    std::string label; // wait family name; "exponential" for the global clock
};

// A sweep crosses n_values with theta_d_values for the global-clock engine;
// clock-per-site engines carry their own rates (reciprocal mean waits) and
// run once per n. All times are stored in seconds; the JSON fields are given
// in hours and converted on load.
struct ExperimentConfig {
    double theta_a = 0.05;
    std::vector<double> theta_d_values = {0.2, 0.05, 0.0125};
    std::vector<int> n_values = {1, 2, 4, 8, 16, 32};
    PerturbationDistribution eta =
        UniformBox{.center = {1.0, 1.0}, .half_width = {1.0, 1.0}};
    std::vector<EngineSpec> engines = {EngineSpec{.waits = std::nullopt, .label = "exponential"}};
    double burn_in_s = 10.0 * 3600.0;
    double window_end_s = 75.0 * 3600.0;
    double horizon_s = 75.0 * 3600.0;
    int ensemble_size = 2000;
    std::uint64_t seed = 1;
    std::string csv_path;   // empty: stdout
    std::string jsonl_path; // empty: no per-trajectory dump
};

ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config_file(const std::string& path);

// Shared JSON fragments, reused by tests and the CLI.
PerturbationDistribution parse_eta_json(const std::string& json_text);
WaitDistribution parse_wait_json(const std::string& json_text);

} // namespace ctcm

#endif
