#ifndef CTCM_MODEL_HPP
#define CTCM_MODEL_HPP

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "ctcm/distributions.hpp"
#include "ctcm/rng.hpp"

namespace ctcm {

// Full configuration of one motion process: n binding sites in `dim` space
// coordinates, attach rate theta_a per detached site, detach rate theta_d per
// attached site, and the perturbation law eta for fresh attachment points.
// eta_mean, eta_radius and rate_bound are caches derived from the inputs.
struct ModelParams {
    double theta_a = 0.0;
    double theta_d = 0.0;
    int n = 0;
    int dim = 0;
    PerturbationDistribution eta;
    std::vector<double> eta_mean;
    double eta_radius = 0.0; // max infinity norm over the support of eta
    double rate_bound = 0.0; // n * max(theta_a, theta_d)

    ModelParams(double theta_a_, double theta_d_, int n_, PerturbationDistribution eta_);
};

// One point of the process: per-site attachment flags, per-site coordinates
// (detached sites keep their last position), and the centroid slot. The class
// invariant is that the attached positions average to the centroid.
struct State {
    std::vector<std::uint8_t> attached; // n flags
    std::vector<double> positions;      // n * dim, site-major
    std::vector<double> centroid;       // dim

    int n() const { return static_cast<int>(attached.size()); }
    int dim() const { return static_cast<int>(centroid.size()); }
    int attach_count() const;
    std::span<const double> site(int i) const {
        return {positions.data() + static_cast<std::size_t>(i) * centroid.size(), centroid.size()};
    }
    std::span<double> site(int i) {
        return {positions.data() + static_cast<std::size_t>(i) * centroid.size(), centroid.size()};
    }
};

// All sites attached at the origin. Trivially satisfies the class invariant.
State make_initial_all_attached(const ModelParams& p);

void check_compatible(const State& s, const ModelParams& p); // throws std::invalid_argument

// Total jump intensity theta_d |psi| + theta_a (n - |psi|). Strictly positive.
double rate(const State& s, const ModelParams& p);

// Probability that the next jump flips site i; sums to 1.
std::vector<double> site_selection_probs(const State& s, const ModelParams& p);

int project(const State& s); // attach count

// Status flip alone, positions and centroid untouched. Building block for the
// jump maps; does not preserve the class invariant by itself.
State flip_status(const State& s, int i);

// Detachment of attached site i. The site keeps its coordinates; the centroid
// moves to the mean of the remaining attached sites, or stays put when site i
// was the last one attached.
State detach(const State& s, const ModelParams& p, int i);
void detach_in_place(State& s, int i);

// Attachment of detached site i at displacement x from the current centroid.
State attach(const State& s, const ModelParams& p, int i, std::span<const double> x);
void attach_in_place(State& s, int i, std::span<const double> x);

// One transition of the embedded jump chain: pick a site by the selection
// probabilities, then detach or attach it. Draw order: one uniform for the
// site, then the perturbation draws if the site attaches.
State sample_jump(const State& s, const ModelParams& p, Rng& rng);
int step_in_place(State& s, const ModelParams& p, Rng& rng, std::span<double> pert_scratch);

// Max absolute coordinate over all n+1 slots (detached positions included).
double max_position_norm(const State& s);

// Infinity norm of sum_i psi_i (position_i - centroid); zero in exact math.
double centroid_residual(const State& s);

// How the attach integral in a one-step expectation is evaluated. Point-mass
// and discrete-mixture perturbations are always summed exactly; for a
// continuous eta, affine_exact evaluates the integrand at the mean of eta
// (exact when f is affine in the perturbation) and monte_carlo averages over
// sample_count draws seeded per attach term.
struct EtaQuadrature {
    enum class Rule { affine_exact, monte_carlo };
    Rule rule = Rule::affine_exact;
    int sample_count = 0;
    std::uint64_t seed = 0;
};

// Expectation of f after exactly one jump from s, via the transition kernel:
// sum over attached sites of r_i f(detach_i) plus sum over detached sites of
// r_i * integral of f(attach_i at z) over eta.
std::vector<double> expect_one_step(const State& s, const ModelParams& p,
                                    const std::function<std::vector<double>(const State&)>& f,
                                    const EtaQuadrature& quad = {});

} // namespace ctcm

#endif
