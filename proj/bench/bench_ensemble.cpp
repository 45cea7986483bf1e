// Compares the serial reference ensemble driver against the OpenMP driver on
// one sweep cell and verifies they produce identical summaries.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <string>

#include "ctcm/model.hpp"
#include "ctcm/simulate.hpp"

using namespace ctcm;

namespace {

double run_and_time(const EnsembleSpec& spec, int count, int threads, EnsembleResult& out) {
    const auto t0 = std::chrono::steady_clock::now();
    out = threads <= 1 ? run_ensemble_serial(spec, count, 42)
                       : run_ensemble_parallel(spec, count, 42, threads);
    const auto t1 = std::chrono::steady_clock::now();
    return std::chrono::duration<double>(t1 - t0).count();
}

bool identical(const EnsembleResult& a, const EnsembleResult& b) {
    if (a.trajectories.size() != b.trajectories.size()) return false;
    for (std::size_t i = 0; i < a.trajectories.size(); ++i) {
        const auto& x = a.trajectories[i];
        const auto& y = b.trajectories[i];
        if (x.jump_count != y.jump_count || x.final_centroid != y.final_centroid ||
            x.probe_centroids != y.probe_centroids || x.occupancy != y.occupancy)
            return false;
    }
    return true;
}

} // namespace

int main(int argc, char** argv) {
    const int count = argc > 1 ? std::atoi(argv[1]) : 256;
    const int threads = argc > 2 ? std::atoi(argv[2]) : resolve_thread_count(0);
    const double horizon = argc > 3 ? std::atof(argv[3]) * 3600.0 : 8.0 * 3600.0;

    ModelParams params(0.05, 0.2, 16, UniformBox{.center = {1.0, 1.0}, .half_width = {1.0, 1.0}});
    EnsembleSpec spec{.params = params,
                      .waits = std::nullopt,
                      .initial = make_initial_all_attached(params),
                      .horizon = horizon,
                      .probe_times = {horizon},
                      .options = {}};

    EnsembleResult serial, parallel;
    const double t_serial = run_and_time(spec, count, 1, serial);
    const double t_parallel = run_and_time(spec, count, threads, parallel);

    std::uint64_t jumps = 0;
    for (const auto& tr : serial.trajectories) jumps += tr.jump_count;

    std::printf("trajectories: %d, horizon: %.0f s, jumps: %llu\n", count, horizon,
                static_cast<unsigned long long>(jumps));
    std::printf("serial:   %8.3f s  (%6.1f ns/jump)\n", t_serial, 1e9 * t_serial / jumps);
    std::printf("parallel: %8.3f s  (threads=%d, speedup %.2fx)\n", t_parallel, threads,
                t_serial / t_parallel);
    if (!identical(serial, parallel)) {
        std::printf("MISMATCH: parallel summaries differ from serial reference\n");
        return 1;
    }
    std::printf("parallel summaries identical to serial reference\n");
    return 0;
}
