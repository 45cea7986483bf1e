#ifndef CTCM_DISTRIBUTIONS_HPP
#define CTCM_DISTRIBUTIONS_HPP

#include <memory>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "ctcm/rng.hpp"

namespace ctcm {

// ---------------------------------------------------------------------------
// Site perturbation laws (displacement of a newly attached site relative to
// the current centroid). Each law knows its exact mean and a hard bound on
// the infinity norm of its support; both feed the movement-bound checks.

struct UniformBox {
    std::vector<double> center;
    std::vector<double> half_width;
};

struct PointMass {
    std::vector<double> value;
};

struct DiscreteMixture {
    std::vector<double> weights;            // nonnegative, sum to 1
    std::vector<std::vector<double>> atoms; // equal dimension
};

using PerturbationDistribution = std::variant<UniformBox, PointMass, DiscreteMixture>;

std::size_t dim(const PerturbationDistribution& eta);
std::vector<double> mean(const PerturbationDistribution& eta);
double support_radius(const PerturbationDistribution& eta);
void validate(const PerturbationDistribution& eta); // throws std::invalid_argument
void sample_perturbation(const PerturbationDistribution& eta, Rng& rng, std::span<double> out);
std::vector<double> sample_perturbation(const PerturbationDistribution& eta, Rng& rng);

// ---------------------------------------------------------------------------
// Holding-time laws for the per-site clock engine. All waits are positive.

struct ExponentialWait {
    double rate; // > 0
};

// Normal(location, scale) conditioned on being nonnegative, sampled by
// rejection. scale == 0 degenerates to a unit mass at `location`.
struct TruncatedNormalWait {
    double location;
    double scale;
};

// Continuous law whose density is proportional to mean^x e^-mean / Gamma(x+1)
// on [0, x_max]; samples rounded to the nearest integer follow a Poisson law.
// The rate parameter is solved numerically so the continuous mean matches the
// requested mean. Sampling goes through a 10^4-entry inverse-CDF table with
// linear interpolation; x_max is wide enough that the dropped tail carries
// less than 1e-10 of the mass.
class ContinuousPoissonWait {
  public:
    explicit ContinuousPoissonWait(double mean_value);

    double sample(Rng& rng) const;
    double mean() const { return mean_; }
    double lambda() const { return lambda_; }
    double x_max() const { return x_max_; }

  private:
    double mean_ = 0.0;
    double lambda_ = 0.0;
    double x_max_ = 0.0;
    std::shared_ptr<const std::vector<double>> inv_cdf_;
};

using WaitDistribution = std::variant<ExponentialWait, TruncatedNormalWait, ContinuousPoissonWait>;

double sample_wait(const WaitDistribution& w, Rng& rng);
double wait_mean(const WaitDistribution& w);
void validate(const WaitDistribution& w); // throws std::invalid_argument
std::string wait_label(const WaitDistribution& w);

double truncated_normal_mean(double location, double scale);

} // namespace ctcm

#endif
