#include "ctcm/simulate.hpp"

#include <cstdlib>
#include <stdexcept>
#include <string>

#include "engines.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace ctcm {

namespace {

void check_run_inputs(const ModelParams& p, const State& initial, double horizon) {
    check_compatible(initial, p);
    if (!(horizon >= 0.0))
        throw std::invalid_argument("horizon must be nonnegative");
}

void check_spec(const EnsembleSpec& spec) {
    check_run_inputs(spec.params, spec.initial, spec.horizon);
    if (spec.waits) {
        validate(spec.waits->attach_wait);
        validate(spec.waits->detach_wait);
    }
    double prev = 0.0;
    for (double t : spec.probe_times) {
        if (t < prev || t > spec.horizon)
            throw std::invalid_argument("probe times must be ascending within [0, horizon]");
        prev = t;
    }
}

TrajectorySummary run_one_summary(const EnsembleSpec& spec, std::uint64_t seed, int index) {
    Rng rng = substream_rng(seed, static_cast<std::uint64_t>(index));
    State s = spec.initial;
    detail::SummaryCollector col(spec.probe_times, spec.params.n, spec.params.dim);
    const double end =
        spec.waits ? detail::run_semi_markov_engine(spec.params, *spec.waits, s, spec.horizon,
                                                    rng, spec.options, col)
                   : detail::run_markov_engine(spec.params, s, spec.horizon, rng, spec.options,
                                               col);
    col.finish(end);
    return std::move(col.out);
}

EnsembleResult make_result_shell(const EnsembleSpec& spec, int count) {
    EnsembleResult res;
    res.n = spec.params.n;
    res.dim = spec.params.dim;
    res.horizon = spec.horizon;
    res.probe_times = spec.probe_times;
    res.trajectories.resize(static_cast<std::size_t>(count));
    return res;
}

} // namespace

Trajectory simulate_markov(const ModelParams& p, const State& initial, double horizon, Rng& rng,
                           const SimOptions& opt) {
    check_run_inputs(p, initial, horizon);
    State s = initial;
    detail::PathRecorder rec(initial, opt.max_recorded_states);
    rec.traj.horizon = detail::run_markov_engine(p, s, horizon, rng, opt, rec);
    return std::move(rec.traj);
}

Trajectory simulate_semi_markov(const ModelParams& p, const SemiMarkovConfig& waits,
                                const State& initial, double horizon, Rng& rng,
                                const SimOptions& opt) {
    check_run_inputs(p, initial, horizon);
    validate(waits.attach_wait);
    validate(waits.detach_wait);
    State s = initial;
    detail::PathRecorder rec(initial, opt.max_recorded_states);
    rec.traj.horizon = detail::run_semi_markov_engine(p, waits, s, horizon, rng, opt, rec);
    return std::move(rec.traj);
}

EnsembleResult run_ensemble_serial(const EnsembleSpec& spec, int count, std::uint64_t seed) {
    check_spec(spec);
    EnsembleResult res = make_result_shell(spec, count);
    for (int i = 0; i < count; ++i) res.trajectories[i] = run_one_summary(spec, seed, i);
    return res;
}

EnsembleResult run_ensemble_parallel(const EnsembleSpec& spec, int count, std::uint64_t seed,
                                     int threads) {
    check_spec(spec);
    EnsembleResult res = make_result_shell(spec, count);
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) num_threads(threads)
    for (int i = 0; i < count; ++i) res.trajectories[i] = run_one_summary(spec, seed, i);
#else
    (void)threads;
    for (int i = 0; i < count; ++i) res.trajectories[i] = run_one_summary(spec, seed, i);
#endif
    return res;
}

int resolve_thread_count(int requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("CTCM_THREADS")) {
        const int v = std::atoi(env);
        if (v > 0) return v;
    }
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

EnsembleResult simulate_ensemble(const EnsembleSpec& spec, int count, std::uint64_t seed,
                                 int threads) {
    const int t = resolve_thread_count(threads);
    return t <= 1 ? run_ensemble_serial(spec, count, seed)
                  : run_ensemble_parallel(spec, count, seed, t);
}

} // namespace ctcm
