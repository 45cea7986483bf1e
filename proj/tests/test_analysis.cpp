#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include <doctest.h>

#include "ctcm/analysis.hpp"
#include "ctcm/model.hpp"
#include "ctcm/simulate.hpp"

using namespace ctcm;

TEST_CASE("stationary law for a single site") {
    // sigma = (theta_d, theta_a) / (theta_a + theta_d)
    const CountDistribution sigma = steady_state(1, 0.05, 0.2);
    CHECK(sigma.probs[0] == doctest::Approx(0.8).epsilon(1e-14));
    CHECK(sigma.probs[1] == doctest::Approx(0.2).epsilon(1e-14));
}

TEST_CASE("stationary law normalizes and matches the binomial recurrence") {
    Rng rng = make_rng(81);
    for (int rep = 0; rep < 20; ++rep) {
        const int n = 1 + static_cast<int>(rng.uniform01() * 64);
        const double ta = 0.01 + rng.uniform01();
        const double td = 0.01 + rng.uniform01();
        const CountDistribution sigma = steady_state(n, ta, td);

        const double total = std::accumulate(sigma.probs.begin(), sigma.probs.end(), 0.0);
        CHECK(std::abs(total - 1.0) <= 1e-13);

        const double p = ta / (ta + td), q = 1.0 - p;
        double pmf = std::pow(q, n);
        for (int k = 0; k <= n; ++k) {
            CHECK(std::abs(sigma.probs[k] - pmf) <= 1e-13);
            if (k < n) pmf *= (static_cast<double>(n - k) / (k + 1)) * (p / q);
        }
    }
    CHECK_THROWS_AS(steady_state(0, 0.1, 0.1), std::invalid_argument);
    CHECK_THROWS_AS(steady_state(3, 0.0, 0.1), std::invalid_argument);
}

TEST_CASE("balance residual vanishes at the stationary law and flags others") {
    const CountDistribution sigma = steady_state(12, 0.05, 0.2);
    CHECK(invariance_residual(sigma, 0.05, 0.2) <= 1e-13);

    CountDistribution off = sigma;
    off.probs[0] += 0.01;
    CHECK(invariance_residual(off, 0.05, 0.2) > 1e-4);
}

TEST_CASE("expected velocity closed form") {
    // n=1: theta_d * theta_a / (theta_a + theta_d) = 0.2 * 0.05 / 0.25 = 0.04
    const ModelParams p1(0.05, 0.2, 1, PointMass{{1.0, 2.0}});
    const std::vector<double> v1 = expected_velocity(p1);
    CHECK(v1[0] == doctest::Approx(0.04).epsilon(1e-14));
    CHECK(v1[1] == doctest::Approx(0.08).epsilon(1e-14));

    // the factor grows with n toward theta_d
    double prev = 0.0;
    for (int n = 1; n <= 40; n += 3) {
        const ModelParams p(0.05, 0.2, n, PointMass{{1.0}});
        const double v = expected_velocity(p)[0];
        CHECK(v > prev);
        CHECK(v < 0.2);
        prev = v;
    }
}

TEST_CASE("drift assembled from the stationary law matches the closed form") {
    for (const auto& [ta, td] : std::vector<std::pair<double, double>>{
             {0.05, 0.2}, {0.05, 0.05}, {0.3, 0.02}}) {
        for (int n : {1, 2, 5, 17, 33, 64}) {
            const ModelParams p(ta, td, n, PointMass{{1.0}});
            const double closed = expected_velocity(p)[0];
            const double assembled = drift_oracle(p)[0];
            CHECK(std::abs(closed - assembled) <= 1e-12 * std::abs(closed));
        }
    }
}

TEST_CASE("total variation distance") {
    CountDistribution a{{1.0, 0.0}}, b{{0.5, 0.5}}, c{{0.2, 0.3, 0.5}};
    CHECK(tv_distance(a, b) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(tv_distance(a, a) == 0.0);
    CHECK_THROWS_AS(tv_distance(a, c), std::invalid_argument);
}

TEST_CASE("velocity estimator on a hand-built ensemble") {
    EnsembleResult res;
    res.n = 2;
    res.dim = 2;
    res.horizon = 20.0;
    res.probe_times = {10.0, 20.0};
    TrajectorySummary t1, t2;
    t1.probe_centroids = {1.0, 0.0, 3.0, 2.0}; // v = (0.2, 0.2)
    t2.probe_centroids = {1.0, 0.0, 1.0, 0.0}; // v = (0, 0)
    res.trajectories = {t1, t2};

    const VelocityEstimate est = estimate_velocity(res, 10.0, 20.0);
    CHECK(est.count == 2);
    CHECK(est.value[0] == doctest::Approx(0.1).epsilon(1e-14));
    CHECK(est.value[1] == doctest::Approx(0.1).epsilon(1e-14));
    // sample sd of {0.2, 0} is 0.1414...; se = sd / sqrt(2) = 0.1
    CHECK(est.se[0] == doctest::Approx(0.1).epsilon(1e-12));
    CHECK(est.se[1] == doctest::Approx(0.1).epsilon(1e-12));

    // identical trajectories: zero standard error
    res.trajectories = {t1, t1};
    const VelocityEstimate same = estimate_velocity(res, 10.0, 20.0);
    CHECK(same.se[0] == 0.0);
    CHECK(same.value[0] == doctest::Approx(0.2).epsilon(1e-14));

    CHECK_THROWS_AS(estimate_velocity(res, 10.0, 15.0), std::invalid_argument);
    CHECK_THROWS_AS(estimate_velocity(res, 10.0, 10.0), std::invalid_argument);
}

TEST_CASE("empirical count distribution from summaries and from paths") {
    EnsembleResult res;
    res.n = 2;
    res.dim = 1;
    res.horizon = 10.0;
    res.probe_times = {10.0};
    TrajectorySummary a, b, c;
    a.probe_counts = {2};
    b.probe_counts = {1};
    c.probe_counts = {2};
    res.trajectories = {a, b, c};
    const CountDistribution dist = empirical_count_distribution(res, 10.0);
    CHECK(dist.probs[0] == 0.0);
    CHECK(dist.probs[1] == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
    CHECK(dist.probs[2] == doctest::Approx(2.0 / 3.0).epsilon(1e-15));

    const ModelParams p(1.0 / 5.0, 1.0 / 7.0, 1, PointMass{{1.0}});
    const SemiMarkovConfig waits{TruncatedNormalWait{5.0, 0.0}, TruncatedNormalWait{7.0, 0.0}};
    Rng rng = make_rng(82);
    std::vector<Trajectory> paths;
    for (int i = 0; i < 3; ++i)
        paths.push_back(
            simulate_semi_markov(p, waits, make_initial_all_attached(p), 20.0, rng));
    const CountDistribution at8 = empirical_count_distribution(paths, 8.0);
    CHECK(at8.probs[0] == 1.0); // every path has detached at t=7
    const CountDistribution at13 = empirical_count_distribution(paths, 13.0);
    CHECK(at13.probs[1] == 1.0); // and re-attached at t=12
}

TEST_CASE("growth bound checker accepts valid paths and flags tampering") {
    const ModelParams p(0.05, 0.2, 8,
                        UniformBox{.center = {1.0, 1.0}, .half_width = {1.0, 1.0}});
    Rng rng = make_rng(83);
    SimOptions opt;
    opt.max_jumps = 3000;
    Trajectory traj = simulate_markov(p, make_initial_all_attached(p),
                                      std::numeric_limits<double>::infinity(), rng, opt);
    const BoundsReport clean = check_growth_bounds(traj, p);
    CHECK(clean.ok());
    CHECK(clean.step_checks == 3000);
    CHECK(clean.pair_checks > 0);
    CHECK(clean.max_residual <= 1e-9);

    // understating the support radius must break the movement bound
    ModelParams lying = p;
    lying.eta_radius *= 0.45;
    const BoundsReport caught = check_growth_bounds(traj, lying);
    CHECK(!caught.ok());

    // a corrupted centroid must break the consistency check; the constraint
    // only binds states with at least one attached site, so pick one
    std::size_t idx = 100;
    while (project(traj.states[idx]) == 0) ++idx;
    traj.states[idx].centroid[0] += 1e-6;
    const BoundsReport tampered = check_growth_bounds(traj, p);
    CHECK(!tampered.ok());
    CHECK(tampered.max_residual > 1e-7);
}
