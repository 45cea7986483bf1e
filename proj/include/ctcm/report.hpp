#ifndef CTCM_REPORT_HPP
#define CTCM_REPORT_HPP

#include <ostream>
#include <string>
#include <vector>

#include "ctcm/analysis.hpp"
#include "ctcm/config.hpp"

namespace ctcm {

// Shortest decimal form that round-trips the exact double, so repeated runs
// with the same seed produce byte-identical files.
std::string format_double(double v);

// One sweep cell: a (n, rates, engine) combination aggregated over the
// ensemble. window_s is the length of the averaging window in seconds.
struct SweepRow {
    int n = 0;
    double theta_a = 0.0;
    double theta_d = 0.0;
    std::string engine;
    std::string distribution;
    int m = 0;
    double burn_in_s = 0.0;
    double window_s = 0.0;
    std::vector<double> est;
    std::vector<double> se;
    std::vector<double> theory;
    double tv_to_sigma = 0.0;
};

// Runs the full sweep of a configuration. The per-trajectory JSON-lines dump
// is written on the fly when `jsonl` is given; the returned rows hold the
// aggregates for the CSV. threads <= 0 uses the environment default.
std::vector<SweepRow> run_experiment(const ExperimentConfig& cfg, int threads,
                                     std::ostream* jsonl);

void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows, int dim);

// Closed-form reference tables for the configured grid: the stationary
// attach-count law and the expected velocity, no simulation involved.
void write_theory_csv(std::ostream& os, const ExperimentConfig& cfg);
void print_theory(std::ostream& os, const ExperimentConfig& cfg);

} // namespace ctcm

#endif
