#include <cmath>
#include <cstdlib>
#include <limits>
#include <vector>

#include <doctest.h>

#include "ctcm/analysis.hpp"
#include "ctcm/model.hpp"
#include "ctcm/simulate.hpp"
#include "ctcm/stats.hpp"

using namespace ctcm;

namespace {

const double kInf = std::numeric_limits<double>::infinity();

ModelParams small_params() {
    return ModelParams(0.05, 0.2, 4, UniformBox{.center = {1.0, 1.0}, .half_width = {1.0, 1.0}});
}

// constant waits turn the clock-per-site engine into a deterministic machine
SemiMarkovConfig const_waits(double attach_after, double detach_after) {
    return SemiMarkovConfig{TruncatedNormalWait{attach_after, 0.0},
                            TruncatedNormalWait{detach_after, 0.0}};
}

} // namespace

TEST_CASE("markov paths: anchored start, increasing times, horizon cover") {
    const ModelParams p = small_params();
    Rng rng = make_rng(71);
    const Trajectory traj = simulate_markov(p, make_initial_all_attached(p), 2000.0, rng);

    REQUIRE(!traj.times.empty());
    CHECK(traj.times.front() == 0.0);
    CHECK(traj.horizon == 2000.0);
    for (std::size_t i = 0; i + 1 < traj.times.size(); ++i)
        CHECK(traj.times[i] < traj.times[i + 1]);
    CHECK(traj.times.back() < traj.horizon);

    // right-continuity: the value at a jump time is the post-jump state
    const std::size_t k = traj.times.size() / 2;
    REQUIRE(k >= 1);
    CHECK(state_at(traj, traj.times[k]).attached == traj.states[k].attached);
    CHECK(&state_at(traj, traj.horizon) == &traj.states.back());
    CHECK_THROWS_AS(state_at(traj, -1.0), std::out_of_range);
    CHECK_THROWS_AS(state_at(traj, traj.horizon + 1.0), std::out_of_range);
}

TEST_CASE("markov jump cap and recording guard") {
    const ModelParams p = small_params();
    Rng rng = make_rng(72);
    SimOptions opt;
    opt.max_jumps = 50;
    const Trajectory traj = simulate_markov(p, make_initial_all_attached(p), kInf, rng, opt);
    CHECK(traj.jump_count() == 50);
    CHECK(traj.horizon == traj.times.back());

    Rng rng2 = make_rng(72);
    SimOptions tight;
    tight.max_recorded_states = 10;
    CHECK_THROWS_AS(simulate_markov(p, make_initial_all_attached(p), kInf, rng2, tight),
                    std::length_error);

    Rng rng3 = make_rng(72);
    CHECK_THROWS_AS(simulate_markov(p, make_initial_all_attached(p), -1.0, rng3),
                    std::invalid_argument);
}

TEST_CASE("markov holding times per occupancy level have the right means") {
    const ModelParams p(0.05, 0.2, 1, PointMass{{1.0}});
    Rng rng = make_rng(73);
    SimOptions opt;
    opt.max_jumps = 4000;
    const Trajectory traj = simulate_markov(p, make_initial_all_attached(p), kInf, rng, opt);

    std::vector<double> holds_attached, holds_detached;
    for (std::size_t i = 0; i + 1 < traj.times.size(); ++i) {
        const double h = traj.times[i + 1] - traj.times[i];
        (project(traj.states[i]) == 1 ? holds_attached : holds_detached).push_back(h);
    }
    // Exp(0.2) while attached, Exp(0.05) while detached; sd equals mean
    const double m1 = sample_mean(holds_attached);
    CHECK(std::abs(m1 - 5.0) < 4.0 * 5.0 / std::sqrt(static_cast<double>(holds_attached.size())));
    const double m0 = sample_mean(holds_detached);
    CHECK(std::abs(m0 - 20.0) <
          4.0 * 20.0 / std::sqrt(static_cast<double>(holds_detached.size())));
}

TEST_CASE("deterministic clock-per-site path follows the hand-computed schedule") {
    // one site, attach after 5, detach after 7, perturbation fixed at (2,-1)
    const ModelParams p(1.0 / 5.0, 1.0 / 7.0, 1, PointMass{{2.0, -1.0}});
    Rng rng = make_rng(74);
    const Trajectory traj =
        simulate_semi_markov(p, const_waits(5.0, 7.0), make_initial_all_attached(p), 20.0, rng);

    // detach at 7, attach at 12, detach at 19
    REQUIRE(traj.times.size() == 4);
    CHECK(traj.times == std::vector<double>{0.0, 7.0, 12.0, 19.0});
    CHECK(project(traj.states[0]) == 1);
    CHECK(project(traj.states[1]) == 0);
    CHECK(project(traj.states[2]) == 1);
    CHECK(project(traj.states[3]) == 0);

    // the attach at t=12 moves the centroid from the origin to (2,-1)
    CHECK(traj.states[2].centroid == std::vector<double>{2.0, -1.0});
    CHECK(traj.states[3].centroid == std::vector<double>{2.0, -1.0});

    // right-continuity at an event time
    CHECK(project(state_at(traj, 7.0)) == 0);
    CHECK(project(state_at(traj, 6.999)) == 1);
}

TEST_CASE("simultaneous clock events fire in ascending site order") {
    const ModelParams p(0.1, 0.1, 2, PointMass{{2.0, -1.0}});
    Rng rng = make_rng(75);
    const Trajectory traj =
        simulate_semi_markov(p, const_waits(5.0, 7.0), make_initial_all_attached(p), 10.0, rng);

    // both sites detach at t=7; site 0 first
    REQUIRE(traj.times.size() == 3);
    CHECK(traj.times[1] == 7.0);
    CHECK(traj.times[2] == 7.0);
    CHECK(traj.states[1].attached == std::vector<std::uint8_t>{0, 1});
    CHECK(traj.states[2].attached == std::vector<std::uint8_t>{0, 0});
    // the composite value at the tied time is the final one
    CHECK(project(state_at(traj, 7.0)) == 0);
}

TEST_CASE("initial clocks are drawn by site status") {
    // site 0 attached (detach clock 7), site 1 detached (attach clock 5)
    const ModelParams p(0.1, 0.1, 2, PointMass{{2.0, -1.0}});
    State initial = make_initial_all_attached(p);
    initial.attached[1] = 0; // site 1 starts detached, parked at the origin
    Rng rng = make_rng(76);
    const Trajectory traj =
        simulate_semi_markov(p, const_waits(5.0, 7.0), initial, 6.0, rng);
    REQUIRE(traj.times.size() == 2);
    CHECK(traj.times[1] == 5.0);
    CHECK(traj.states[1].attached == std::vector<std::uint8_t>{1, 1});
}

TEST_CASE("ensemble summaries: probes, occupancy, determinism") {
    const ModelParams p(1.0 / 5.0, 1.0 / 7.0, 1, PointMass{{2.0, -1.0}});
    EnsembleSpec spec{.params = p,
                      .waits = const_waits(5.0, 7.0),
                      .initial = make_initial_all_attached(p),
                      .horizon = 20.0,
                      .probe_times = {6.999, 7.0, 12.0, 20.0},
                      .options = {}};
    const EnsembleResult res = run_ensemble_serial(spec, 3, 99);
    REQUIRE(res.trajectories.size() == 3);
    for (const TrajectorySummary& tr : res.trajectories) {
        CHECK(tr.jump_count == 3);
        CHECK(tr.probe_counts == std::vector<int>{1, 0, 1, 0});
        // attached on [0,7) and [12,19): 14 of 20 seconds
        CHECK(tr.occupancy[1] == doctest::Approx(0.7).epsilon(1e-12));
        CHECK(tr.occupancy[0] == doctest::Approx(0.3).epsilon(1e-12));
        CHECK(tr.final_centroid == std::vector<double>{2.0, -1.0});
        // probe at t=12 sees the post-attach centroid
        CHECK(tr.probe_centroids[2 * 2 + 0] == 2.0);
        CHECK(tr.probe_centroids[2 * 2 + 1] == -1.0);
    }
}

TEST_CASE("ensemble: parallel equals serial and substreams ignore ensemble size") {
    const ModelParams p = small_params();
    EnsembleSpec spec{.params = p,
                      .waits = std::nullopt,
                      .initial = make_initial_all_attached(p),
                      .horizon = 500.0,
                      .probe_times = {250.0, 500.0},
                      .options = {}};
    const EnsembleResult serial = run_ensemble_serial(spec, 20, 1234);
    const EnsembleResult parallel = run_ensemble_parallel(spec, 20, 1234, 4);
    REQUIRE(serial.trajectories.size() == parallel.trajectories.size());
    for (std::size_t i = 0; i < serial.trajectories.size(); ++i) {
        CHECK(serial.trajectories[i].final_centroid == parallel.trajectories[i].final_centroid);
        CHECK(serial.trajectories[i].jump_count == parallel.trajectories[i].jump_count);
        CHECK(serial.trajectories[i].probe_centroids == parallel.trajectories[i].probe_centroids);
    }

    const EnsembleResult small = run_ensemble_serial(spec, 10, 1234);
    for (std::size_t i = 0; i < small.trajectories.size(); ++i)
        CHECK(small.trajectories[i].final_centroid == serial.trajectories[i].final_centroid);

    double occ_sum = 0.0;
    for (double o : serial.trajectories[0].occupancy) occ_sum += o;
    CHECK(occ_sum == doctest::Approx(1.0).epsilon(1e-12));

    EnsembleSpec bad = spec;
    bad.probe_times = {600.0};
    CHECK_THROWS_AS(run_ensemble_serial(bad, 2, 1), std::invalid_argument);
}

TEST_CASE("engine audit flags an understated perturbation radius") {
    ModelParams p = small_params();
    p.eta_radius *= 0.45;
    Rng rng = make_rng(77);
    SimOptions opt;
    opt.max_jumps = 2000;
    CHECK_THROWS_AS(simulate_markov(p, make_initial_all_attached(p), kInf, rng, opt),
                    std::runtime_error);
}

TEST_CASE("centroid renormalization keeps the class invariant tight on long runs") {
    const ModelParams p = small_params();
    Rng rng = make_rng(78);
    SimOptions opt;
    opt.max_jumps = 50000;
    opt.renorm_interval = 5000;
    const Trajectory traj = simulate_markov(p, make_initial_all_attached(p), kInf, rng, opt);
    CHECK(centroid_residual(traj.states.back()) <= 1e-9);
}

TEST_CASE("thread count resolution prefers explicit, then environment") {
    CHECK(resolve_thread_count(3) == 3);
    setenv("CTCM_THREADS", "5", 1);
    CHECK(resolve_thread_count(0) == 5);
    unsetenv("CTCM_THREADS");
    CHECK(resolve_thread_count(0) >= 1);
}
