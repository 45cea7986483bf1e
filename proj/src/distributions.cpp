#include "ctcm/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ctcm {

namespace {

double stdnormal_pdf(double z) {
    return std::exp(-0.5 * z * z) * 0.39894228040143267794; // 1/sqrt(2 pi)
}

double stdnormal_cdf(double z) {
    return 0.5 * std::erfc(-z * 0.70710678118654752440); // 1/sqrt(2)
}

} // namespace

// --------------------------------------------------------------------------
// perturbations

std::size_t dim(const PerturbationDistribution& eta) {
    return std::visit(
        [](const auto& d) -> std::size_t {
            using T = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<T, UniformBox>) return d.center.size();
            else if constexpr (std::is_same_v<T, PointMass>) return d.value.size();
            else return d.atoms.empty() ? 0 : d.atoms.front().size();
        },
        eta);
}

std::vector<double> mean(const PerturbationDistribution& eta) {
    return std::visit(
        [](const auto& d) -> std::vector<double> {
            using T = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<T, UniformBox>) {
                return d.center;
            } else if constexpr (std::is_same_v<T, PointMass>) {
                return d.value;
            } else {
                std::vector<double> m(d.atoms.empty() ? 0 : d.atoms.front().size(), 0.0);
                for (std::size_t a = 0; a < d.atoms.size(); ++a)
                    for (std::size_t j = 0; j < m.size(); ++j)
                        m[j] += d.weights[a] * d.atoms[a][j];
                return m;
            }
        },
        eta);
}

double support_radius(const PerturbationDistribution& eta) {
    return std::visit(
        [](const auto& d) -> double {
            using T = std::decay_t<decltype(d)>;
            double r = 0.0;
            if constexpr (std::is_same_v<T, UniformBox>) {
                for (std::size_t j = 0; j < d.center.size(); ++j)
                    r = std::max(r, std::max(std::abs(d.center[j] - d.half_width[j]),
                                             std::abs(d.center[j] + d.half_width[j])));
            } else if constexpr (std::is_same_v<T, PointMass>) {
                for (double v : d.value) r = std::max(r, std::abs(v));
            } else {
                for (const auto& atom : d.atoms)
                    for (double v : atom) r = std::max(r, std::abs(v));
            }
            return r;
        },
        eta);
}

void validate(const PerturbationDistribution& eta) {
    std::visit(
        [](const auto& d) {
            using T = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<T, UniformBox>) {
                if (d.center.empty()) throw std::invalid_argument("uniform-box: empty center");
                if (d.center.size() != d.half_width.size())
                    throw std::invalid_argument("uniform-box: center/half_width size mismatch");
                for (double h : d.half_width)
                    if (!(h >= 0.0)) throw std::invalid_argument("uniform-box: negative half_width");
            } else if constexpr (std::is_same_v<T, PointMass>) {
                if (d.value.empty()) throw std::invalid_argument("point-mass: empty value");
            } else {
                if (d.atoms.empty()) throw std::invalid_argument("discrete-mixture: no atoms");
                if (d.weights.size() != d.atoms.size())
                    throw std::invalid_argument("discrete-mixture: weights/atoms size mismatch");
                const std::size_t m = d.atoms.front().size();
                if (m == 0) throw std::invalid_argument("discrete-mixture: empty atom");
                double sum = 0.0;
                for (double w : d.weights) {
                    if (!(w >= 0.0)) throw std::invalid_argument("discrete-mixture: negative weight");
                    sum += w;
                }
                if (std::abs(sum - 1.0) > 1e-12)
                    throw std::invalid_argument("discrete-mixture: weights do not sum to 1");
                for (const auto& atom : d.atoms)
                    if (atom.size() != m)
                        throw std::invalid_argument("discrete-mixture: ragged atom dimensions");
            }
        },
        eta);
}

void sample_perturbation(const PerturbationDistribution& eta, Rng& rng, std::span<double> out) {
    std::visit(
        [&](const auto& d) {
            using T = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<T, UniformBox>) {
                for (std::size_t j = 0; j < d.center.size(); ++j)
                    out[j] = d.center[j] + d.half_width[j] * (2.0 * rng.uniform01() - 1.0);
            } else if constexpr (std::is_same_v<T, PointMass>) {
                std::copy(d.value.begin(), d.value.end(), out.begin());
            } else {
                const double u = rng.uniform01();
                double cum = 0.0;
                std::size_t pick = d.atoms.size() - 1;
                for (std::size_t a = 0; a < d.weights.size(); ++a) {
                    cum += d.weights[a];
                    if (u < cum) { pick = a; break; }
                }
                std::copy(d.atoms[pick].begin(), d.atoms[pick].end(), out.begin());
            }
        },
        eta);
}

std::vector<double> sample_perturbation(const PerturbationDistribution& eta, Rng& rng) {
    std::vector<double> out(dim(eta));
    sample_perturbation(eta, rng, out);
    return out;
}

// --------------------------------------------------------------------------
// waits

double truncated_normal_mean(double location, double scale) {
    if (scale == 0.0) return location;
    const double a = location / scale;
    return location + scale * stdnormal_pdf(a) / stdnormal_cdf(a);
}

ContinuousPoissonWait::ContinuousPoissonWait(double mean_value) : mean_(mean_value) {
    if (!(mean_value > 0.0) || !std::isfinite(mean_value))
        throw std::invalid_argument("continuous-poisson: mean must be positive");

    x_max_ = mean_value + 14.0 * std::sqrt(mean_value + 1.0) + 40.0;
    constexpr int grid_n = 32769;
    const double dx = x_max_ / (grid_n - 1);

    std::vector<double> density(grid_n), cdf(grid_n);
    // Continuous mean is increasing in the rate; bisect until it matches.
    auto grid_mean = [&](double lam) {
        const double log_lam = std::log(lam);
        double mass = 0.0, moment = 0.0;
        double prev_g = std::exp(-lam); // x = 0
        density[0] = prev_g;
        for (int i = 1; i < grid_n; ++i) {
            const double x = i * dx;
            const double g = std::exp(x * log_lam - lam - std::lgamma(x + 1.0));
            density[i] = g;
            mass += 0.5 * (prev_g + g) * dx;
            moment += 0.5 * (prev_g * (x - dx) + g * x) * dx;
            prev_g = g;
        }
        cdf[0] = 0.0;
        double acc = 0.0;
        for (int i = 1; i < grid_n; ++i) {
            acc += 0.5 * (density[i - 1] + density[i]) * dx;
            cdf[i] = acc;
        }
        return moment / mass;
    };

    double lo = std::max(mean_value - 4.0, 1e-8), hi = mean_value + 4.0;
    if (grid_mean(lo) > mean_value) lo = 1e-12;
    for (int it = 0; it < 200 && (hi - lo) > 1e-13 * (1.0 + hi); ++it) {
        const double mid = 0.5 * (lo + hi);
        (grid_mean(mid) < mean_value ? lo : hi) = mid;
    }
    lambda_ = 0.5 * (lo + hi);
    grid_mean(lambda_);

    const double total = cdf.back();
    // Density decays faster than exponentially, so the mass in the last grid
    // stretch bounds the dropped tail.
    const int guard = grid_n - 1 - static_cast<int>(2.0 * std::sqrt(mean_value) / dx) - 1;
    if (guard > 0 && (total - cdf[guard]) / total > 1e-10)
        throw std::logic_error("continuous-poisson: truncation bound too tight");

    constexpr int table_n = 10000;
    auto table = std::make_shared<std::vector<double>>(table_n);
    int k = 1;
    for (int j = 0; j < table_n; ++j) {
        const double target = total * static_cast<double>(j) / (table_n - 1);
        while (k < grid_n - 1 && cdf[k] < target) ++k;
        const double c0 = cdf[k - 1], c1 = cdf[k];
        const double f = (c1 > c0) ? (target - c0) / (c1 - c0) : 0.0;
        (*table)[j] = ((k - 1) + f) * dx;
    }
    inv_cdf_ = std::move(table);
}

double ContinuousPoissonWait::sample(Rng& rng) const {
    const auto& t = *inv_cdf_;
    const double u = rng.uniform01() * static_cast<double>(t.size() - 1);
    const std::size_t j = static_cast<std::size_t>(u);
    const double f = u - static_cast<double>(j);
    return t[j] + f * (t[j + 1] - t[j]);
}

double sample_wait(const WaitDistribution& w, Rng& rng) {
    return std::visit(
        [&](const auto& d) -> double {
            using T = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<T, ExponentialWait>) {
                return rng.exponential() / d.rate;
            } else if constexpr (std::is_same_v<T, TruncatedNormalWait>) {
                if (d.scale == 0.0) return d.location;
                double x = rng.normal(d.location, d.scale);
                while (x < 0.0) x = rng.normal(d.location, d.scale);
                return x;
            } else {
                return d.sample(rng);
            }
        },
        w);
}

double wait_mean(const WaitDistribution& w) {
    return std::visit(
        [](const auto& d) -> double {
            using T = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<T, ExponentialWait>) return 1.0 / d.rate;
            else if constexpr (std::is_same_v<T, TruncatedNormalWait>)
                return truncated_normal_mean(d.location, d.scale);
            else return d.mean();
        },
        w);
}

void validate(const WaitDistribution& w) {
    std::visit(
        [](const auto& d) {
            using T = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<T, ExponentialWait>) {
                if (!(d.rate > 0.0) || !std::isfinite(d.rate))
                    throw std::invalid_argument("exponential wait: rate must be positive");
            } else if constexpr (std::is_same_v<T, TruncatedNormalWait>) {
                if (!(d.scale >= 0.0) || !std::isfinite(d.scale))
                    throw std::invalid_argument("truncated-normal wait: scale must be nonnegative");
                if (d.scale == 0.0 && !(d.location > 0.0))
                    throw std::invalid_argument("truncated-normal wait: degenerate wait must be positive");
                if (!std::isfinite(d.location))
                    throw std::invalid_argument("truncated-normal wait: location must be finite");
            } else {
                if (!(d.mean() > 0.0))
                    throw std::invalid_argument("continuous-poisson wait: mean must be positive");
            }
        },
        w);
}

std::string wait_label(const WaitDistribution& w) {
    return std::visit(
        [](const auto& d) -> std::string {
            using T = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<T, ExponentialWait>) return "exponential";
            else if constexpr (std::is_same_v<T, TruncatedNormalWait>) return "truncated-normal";
            else return "continuous-poisson";
        },
        w);
}

} // namespace ctcm
