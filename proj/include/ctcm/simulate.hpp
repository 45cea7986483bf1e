#ifndef CTCM_SIMULATE_HPP
#define CTCM_SIMULATE_HPP

#include <cstdint>
#include <optional>
#include <vector>

#include "ctcm/model.hpp"
#include "ctcm/trajectory.hpp"

namespace ctcm {

struct SimOptions {
    // Per-jump self-checks: movement bound g(next) <= g(current) + eta_radius
    // and the centroid class invariant. Tolerance is scaled by the current
    // coordinate magnitude, so long drifted runs do not trip on accumulated
    // double rounding. Violations throw std::runtime_error.
    bool audit = true;
    double audit_tol = 1e-9;
    // Snap the centroid to the exact attached mean every so many jumps.
    std::uint64_t renorm_interval = 1'000'000;
    // Stop after this many jumps regardless of horizon; 0 means horizon only.
    std::uint64_t max_jumps = 0;
    // Guard for path-recording runs; longer runs belong in the ensemble driver.
    std::uint64_t max_recorded_states = 20'000'000;
};

// Global-clock engine: an exponential holding time at the total jump rate,
// then one site flip drawn by the selection probabilities.
Trajectory simulate_markov(const ModelParams& p, const State& initial, double horizon, Rng& rng,
                           const SimOptions& opt = {});

// Per-site wait laws for the clock-per-site engine. attach_wait is the time a
// detached site waits before attaching; detach_wait the reverse.
struct SemiMarkovConfig {
    WaitDistribution attach_wait;
    WaitDistribution detach_wait;
};

// Clock-per-site engine: every site holds a pending event time, the earliest
// fires (ties broken by lower site index), and only the fired site draws a
// fresh wait. Initial clocks are drawn at t = 0 in site order. On an attach
// event the perturbation is drawn before the site's next wait. Exponential
// waits at rates (theta_a, theta_d) reproduce the global-clock law.
Trajectory simulate_semi_markov(const ModelParams& p, const SemiMarkovConfig& waits,
                                const State& initial, double horizon, Rng& rng,
                                const SimOptions& opt = {});

// ---------------------------------------------------------------------------
// Ensembles. Trajectory i is computed from an RNG substream derived from
// (seed, i) alone, so results are identical for any thread count.

struct EnsembleSpec {
    ModelParams params;
    std::optional<SemiMarkovConfig> waits; // unset: global-clock engine
    State initial;
    double horizon = 0.0;
    std::vector<double> probe_times; // ascending, within [0, horizon]
    SimOptions options;
};

struct TrajectorySummary {
    std::uint64_t jump_count = 0;
    std::vector<int> probe_counts;        // attach count at each probe
    std::vector<double> probe_centroids;  // probe-major, dim entries per probe
    std::vector<double> final_centroid;
    std::vector<double> occupancy;        // time fraction spent at each count
};

struct EnsembleResult {
    int n = 0;
    int dim = 0;
    double horizon = 0.0;
    std::vector<double> probe_times;
    std::vector<TrajectorySummary> trajectories;
};

EnsembleResult run_ensemble_serial(const EnsembleSpec& spec, int count, std::uint64_t seed);
EnsembleResult run_ensemble_parallel(const EnsembleSpec& spec, int count, std::uint64_t seed,
                                     int threads);

// Dispatches to the serial or parallel driver. threads <= 0 consults the
// CTCM_THREADS environment variable, then the OpenMP default.
EnsembleResult simulate_ensemble(const EnsembleSpec& spec, int count, std::uint64_t seed,
                                 int threads = 0);

int resolve_thread_count(int requested);

} // namespace ctcm

#endif
