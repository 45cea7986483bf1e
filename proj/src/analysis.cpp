#include "ctcm/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "ctcm/rng.hpp"

namespace ctcm {

namespace {

bool near_time(double a, double b) { return std::abs(a - b) <= 1e-9 * std::max(1.0, std::abs(b)); }

std::size_t find_probe(const EnsembleResult& res, double t, const char* what) {
    for (std::size_t i = 0; i < res.probe_times.size(); ++i)
        if (near_time(res.probe_times[i], t)) return i;
    std::ostringstream msg;
    msg << what << ": time " << t << " is not a probe time of this ensemble"
        << " (horizon " << res.horizon << ")";
    throw std::invalid_argument(msg.str());
}

} // namespace

CountDistribution steady_state(int n, double theta_a, double theta_d) {
    if (n < 1) throw std::invalid_argument("steady_state: n must be at least 1");
    if (!(theta_a > 0.0) || !(theta_d > 0.0))
        throw std::invalid_argument("steady_state: rates must be positive");
    const double log_a = std::log(theta_a), log_d = std::log(theta_d);
    const double log_sum = std::log(theta_a + theta_d);
    const double lg_n = std::lgamma(n + 1.0);
    CountDistribution dist;
    dist.probs.resize(static_cast<std::size_t>(n) + 1);
    double total = 0.0;
    for (int k = 0; k <= n; ++k) {
        const double log_choose = lg_n - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
        dist.probs[k] = std::exp(log_choose + k * log_a + (n - k) * log_d - n * log_sum);
        total += dist.probs[k];
    }
    for (double& p : dist.probs) p /= total;
    return dist;
}

double invariance_residual(const CountDistribution& dist, double theta_a, double theta_d) {
    const int n = dist.n();
    if (n < 1) throw std::invalid_argument("invariance_residual: distribution too short");
    double worst = 0.0;
    for (int k = 0; k <= n; ++k) {
        double inflow = 0.0;
        if (k >= 1) inflow += theta_a * (n - k + 1) * dist.probs[k - 1];
        if (k <= n - 1) inflow += theta_d * (k + 1) * dist.probs[k + 1];
        const double outflow = (theta_d * k + theta_a * (n - k)) * dist.probs[k];
        worst = std::max(worst, std::abs(inflow - outflow));
    }
    return worst;
}

std::vector<double> expected_velocity(const ModelParams& p) {
    const double stick = p.theta_d / (p.theta_a + p.theta_d);
    const double factor = p.theta_d * (1.0 - std::pow(stick, p.n));
    std::vector<double> v(p.eta_mean);
    for (double& x : v) x *= factor;
    return v;
}

std::vector<double> drift_oracle(const ModelParams& p) {
    const CountDistribution sigma = steady_state(p.n, p.theta_a, p.theta_d);
    double factor = 0.0;
    for (int i = 0; i < p.n; ++i) {
        const double total_rate = p.theta_d * i + p.theta_a * (p.n - i);
        const double up_prob = p.theta_a * (p.n - i) / total_rate;
        const double mean_step = 1.0 / (i + 1); // centroid shift per unit eta mean
        factor += sigma.probs[i] * total_rate * up_prob * mean_step;
    }
    std::vector<double> v(p.eta_mean);
    for (double& x : v) x *= factor;
    return v;
}

VelocityEstimate estimate_velocity(const EnsembleResult& res, double t0, double t1) {
    if (!(t1 > t0)) throw std::invalid_argument("estimate_velocity: need t1 > t0");
    const std::size_t i0 = find_probe(res, t0, "estimate_velocity");
    const std::size_t i1 = find_probe(res, t1, "estimate_velocity");
    const int m = static_cast<int>(res.trajectories.size());
    if (m < 1) throw std::invalid_argument("estimate_velocity: empty ensemble");

    const double span = res.probe_times[i1] - res.probe_times[i0];
    const std::size_t d = static_cast<std::size_t>(res.dim);
    VelocityEstimate est;
    est.count = m;
    est.t0 = res.probe_times[i0];
    est.t1 = res.probe_times[i1];
    est.value.assign(d, 0.0);
    est.se.assign(d, 0.0);

    for (const auto& traj : res.trajectories)
        for (std::size_t j = 0; j < d; ++j)
            est.value[j] += (traj.probe_centroids[i1 * d + j] - traj.probe_centroids[i0 * d + j]) / span;
    for (std::size_t j = 0; j < d; ++j) est.value[j] /= m;

    if (m >= 2) {
        for (const auto& traj : res.trajectories)
            for (std::size_t j = 0; j < d; ++j) {
                const double v =
                    (traj.probe_centroids[i1 * d + j] - traj.probe_centroids[i0 * d + j]) / span;
                est.se[j] += (v - est.value[j]) * (v - est.value[j]);
            }
        for (std::size_t j = 0; j < d; ++j)
            est.se[j] = std::sqrt(est.se[j] / (static_cast<double>(m) - 1.0)) /
                        std::sqrt(static_cast<double>(m));
    }
    return est;
}

CountDistribution empirical_count_distribution(const EnsembleResult& res, double t) {
    const std::size_t idx = find_probe(res, t, "empirical_count_distribution");
    if (res.trajectories.empty())
        throw std::invalid_argument("empirical_count_distribution: empty ensemble");
    CountDistribution dist;
    dist.probs.assign(static_cast<std::size_t>(res.n) + 1, 0.0);
    for (const auto& traj : res.trajectories) dist.probs[traj.probe_counts[idx]] += 1.0;
    for (double& p : dist.probs) p /= static_cast<double>(res.trajectories.size());
    return dist;
}

CountDistribution empirical_count_distribution(const std::vector<Trajectory>& trajs, double t) {
    if (trajs.empty())
        throw std::invalid_argument("empirical_count_distribution: empty ensemble");
    CountDistribution dist;
    dist.probs.assign(trajs.front().states.front().attached.size() + 1, 0.0);
    for (const auto& traj : trajs) dist.probs[project(state_at(traj, t))] += 1.0;
    for (double& p : dist.probs) p /= static_cast<double>(trajs.size());
    return dist;
}

double tv_distance(const CountDistribution& a, const CountDistribution& b) {
    if (a.probs.size() != b.probs.size())
        throw std::invalid_argument("tv_distance: support size mismatch");
    double acc = 0.0;
    for (std::size_t k = 0; k < a.probs.size(); ++k) acc += std::abs(a.probs[k] - b.probs[k]);
    return 0.5 * acc;
}

BoundsReport check_growth_bounds(const Trajectory& traj, const ModelParams& p, double tol,
                                 int pair_samples) {
    if (traj.states.empty()) throw std::invalid_argument("check_growth_bounds: empty trajectory");
    const double radius = p.eta_radius;
    BoundsReport rep;

    auto record = [&rep](const std::string& msg) {
        ++rep.violations;
        if (rep.first_message.empty()) rep.first_message = msg;
    };

    std::vector<double> g(traj.states.size());
    for (std::size_t k = 0; k < traj.states.size(); ++k) {
        g[k] = max_position_norm(traj.states[k]);
        const double resid = centroid_residual(traj.states[k]);
        rep.max_residual = std::max(rep.max_residual, resid);
        if (resid > tol) {
            std::ostringstream msg;
            msg << "centroid consistency defect " << resid << " at state " << k;
            record(msg.str());
        }
    }

    for (std::size_t k = 0; k + 1 < traj.states.size(); ++k) {
        ++rep.step_checks;
        const double excess = g[k + 1] - (g[k] + radius);
        rep.max_step_excess = std::max(rep.max_step_excess, excess);
        if (excess > tol) {
            std::ostringstream msg;
            msg << "one-jump movement bound exceeded by " << excess << " at jump " << (k + 1);
            record(msg.str());
        }
    }

    if (traj.states.size() >= 2 && pair_samples > 0) {
        const double g0 = g[0];
        const int d = traj.states.front().dim();
        Rng rng = make_rng(0xB0B5);
        for (int s = 0; s < pair_samples; ++s) {
            std::size_t k1 = static_cast<std::size_t>(rng.uniform01() * traj.states.size());
            std::size_t k2 = static_cast<std::size_t>(rng.uniform01() * traj.states.size());
            if (k1 == k2) continue;
            if (k1 > k2) std::swap(k1, k2);
            double move = 0.0;
            for (int j = 0; j < d; ++j)
                move = std::max(move, std::abs(traj.states[k2].centroid[j] -
                                               traj.states[k1].centroid[j]));
            ++rep.pair_checks;
            const double excess = move - (2.0 * g0 + static_cast<double>(k1 + k2) * radius);
            rep.max_pair_excess = std::max(rep.max_pair_excess, excess);
            if (excess > tol) {
                std::ostringstream msg;
                msg << "displacement bound exceeded by " << excess << " for jumps " << k1 << ","
                    << k2;
                record(msg.str());
            }
        }
    }
    return rep;
}

} // namespace ctcm
