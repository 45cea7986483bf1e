#ifndef CTCM_ANALYSIS_HPP
#define CTCM_ANALYSIS_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "ctcm/model.hpp"
#include "ctcm/simulate.hpp"
#include "ctcm/trajectory.hpp"

namespace ctcm {

// Probability vector over attach counts 0..n.
struct CountDistribution {
    std::vector<double> probs;

    int n() const { return static_cast<int>(probs.size()) - 1; }
};

// Stationary law of the attach count: Binomial(n, theta_a / (theta_a +
// theta_d)). Computed in log space so it stays exact-to-rounding for any n.
CountDistribution steady_state(int n, double theta_a, double theta_d);

// Max absolute defect of the stationary balance equations
// theta_a (n-k+1) p(k-1) + theta_d (k+1) p(k+1) = (theta_d k + theta_a (n-k)) p(k)
// over all k. Zero (to rounding) exactly for the stationary law.
double invariance_residual(const CountDistribution& dist, double theta_a, double theta_d);

// Asymptotic centroid velocity: eta_mean * theta_d * (1 - (theta_d /
// (theta_a + theta_d))^n), one entry per coordinate.
std::vector<double> expected_velocity(const ModelParams& p);

// Same quantity assembled the long way, as a check: sum over attach counts of
// stationary weight * total jump rate * up-step probability * mean centroid
// increment of an attach move at that count.
std::vector<double> drift_oracle(const ModelParams& p);

struct VelocityEstimate {
    std::vector<double> value; // per coordinate
    std::vector<double> se;    // standard error of the mean, 0 for count < 2
    int count = 0;
    double t0 = 0.0;
    double t1 = 0.0;
};

// Endpoint estimator (centroid(t1) - centroid(t0)) / (t1 - t0) averaged over
// the ensemble. t0 and t1 must be probe times of the result; throws
// std::invalid_argument otherwise (e.g. horizon too short for the window).
VelocityEstimate estimate_velocity(const EnsembleResult& res, double t0, double t1);

// Distribution of the attach count at probe time t across the ensemble.
CountDistribution empirical_count_distribution(const EnsembleResult& res, double t);
CountDistribution empirical_count_distribution(const std::vector<Trajectory>& trajs, double t);

// Total variation distance between two laws on the same support.
double tv_distance(const CountDistribution& a, const CountDistribution& b);

struct BoundsReport {
    std::uint64_t step_checks = 0;
    std::uint64_t pair_checks = 0;
    std::uint64_t violations = 0;
    double max_step_excess = 0.0;      // over the one-jump movement bound
    double max_pair_excess = 0.0;      // over the k-jump displacement bound
    double max_residual = 0.0;         // centroid consistency defect
    std::string first_message;

    bool ok() const { return violations == 0; }
};

// Audits a recorded path against the growth bounds: per jump the max
// coordinate norm may grow by at most the perturbation radius; between jumps
// k1 < k2 the centroid may move by at most 2 g(initial) + (k1 + k2) * radius;
// and every state must satisfy the centroid class invariant. pair_samples
// index pairs are drawn from a fixed-seed stream.
BoundsReport check_growth_bounds(const Trajectory& traj, const ModelParams& p,
                                 double tol = 1e-9, int pair_samples = 256);

} // namespace ctcm

#endif
