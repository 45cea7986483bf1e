#include "ctcm/model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ctcm {

ModelParams::ModelParams(double theta_a_, double theta_d_, int n_, PerturbationDistribution eta_)
    : theta_a(theta_a_), theta_d(theta_d_), n(n_), eta(std::move(eta_)) {
    if (!(theta_a > 0.0) || !std::isfinite(theta_a))
        throw std::invalid_argument("theta_a must be positive");
    if (!(theta_d > 0.0) || !std::isfinite(theta_d))
        throw std::invalid_argument("theta_d must be positive");
    if (n < 1) throw std::invalid_argument("n must be at least 1");
    validate(eta);
    dim = static_cast<int>(ctcm::dim(eta));
    eta_mean = mean(eta);
    eta_radius = support_radius(eta);
    rate_bound = n * std::max(theta_a, theta_d);
}

int State::attach_count() const {
    int k = 0;
    for (std::uint8_t a : attached) k += a;
    return k;
}

State make_initial_all_attached(const ModelParams& p) {
    State s;
    s.attached.assign(p.n, 1);
    s.positions.assign(static_cast<std::size_t>(p.n) * p.dim, 0.0);
    s.centroid.assign(p.dim, 0.0);
    return s;
}

void check_compatible(const State& s, const ModelParams& p) {
    if (s.n() != p.n || s.dim() != p.dim ||
        s.positions.size() != static_cast<std::size_t>(p.n) * p.dim)
        throw std::invalid_argument("state does not match model dimensions");
}

double rate(const State& s, const ModelParams& p) {
    check_compatible(s, p);
    const int k = s.attach_count();
    return p.theta_d * k + p.theta_a * (p.n - k);
}

std::vector<double> site_selection_probs(const State& s, const ModelParams& p) {
    const double c = rate(s, p);
    std::vector<double> r(p.n);
    for (int i = 0; i < p.n; ++i)
        r[i] = (s.attached[i] ? p.theta_d : p.theta_a) / c;
    return r;
}

int project(const State& s) { return s.attach_count(); }

State flip_status(const State& s, int i) {
    State out = s;
    out.attached[i] ^= 1;
    return out;
}

void detach_in_place(State& s, int i) {
    const int k = s.attach_count(); // includes site i
    s.attached[i] = 0;
    if (k >= 2) {
        const int d = s.dim();
        const double w = 1.0 / (k - 1);
        const double* vi = s.positions.data() + static_cast<std::size_t>(i) * d;
        for (int j = 0; j < d; ++j) s.centroid[j] -= (vi[j] - s.centroid[j]) * w;
    }
}

State detach(const State& s, const ModelParams& p, int i) {
    check_compatible(s, p);
    if (i < 0 || i >= p.n) throw std::invalid_argument("site index out of range");
    if (!s.attached[i]) throw std::invalid_argument("detach: site is not attached");
    State out = s;
    detach_in_place(out, i);
    return out;
}

void attach_in_place(State& s, int i, std::span<const double> x) {
    const int k = s.attach_count(); // excludes site i
    const int d = s.dim();
    s.attached[i] = 1;
    double* vi = s.positions.data() + static_cast<std::size_t>(i) * d;
    const double w = 1.0 / (k + 1);
    for (int j = 0; j < d; ++j) {
        vi[j] = x[j] + s.centroid[j];
        s.centroid[j] += x[j] * w;
    }
}

State attach(const State& s, const ModelParams& p, int i, std::span<const double> x) {
    check_compatible(s, p);
    if (i < 0 || i >= p.n) throw std::invalid_argument("site index out of range");
    if (s.attached[i]) throw std::invalid_argument("attach: site is already attached");
    if (x.size() != static_cast<std::size_t>(p.dim))
        throw std::invalid_argument("attach: perturbation dimension mismatch");
    State out = s;
    attach_in_place(out, i, x);
    return out;
}

int step_in_place(State& s, const ModelParams& p, Rng& rng, std::span<double> pert_scratch) {
    const int k = s.attach_count();
    const double c = p.theta_d * k + p.theta_a * (p.n - k);
    const double target = rng.uniform01() * c;
    double cum = 0.0;
    int pick = p.n - 1;
    for (int i = 0; i < p.n; ++i) {
        cum += s.attached[i] ? p.theta_d : p.theta_a;
        if (target < cum) { pick = i; break; }
    }
    if (s.attached[pick]) {
        detach_in_place(s, pick);
    } else {
        sample_perturbation(p.eta, rng, pert_scratch);
        attach_in_place(s, pick, pert_scratch);
    }
    return pick;
}

State sample_jump(const State& s, const ModelParams& p, Rng& rng) {
    check_compatible(s, p);
    State out = s;
    std::vector<double> scratch(p.dim);
    step_in_place(out, p, rng, scratch);
    return out;
}

double max_position_norm(const State& s) {
    double g = 0.0;
    for (double v : s.positions) g = std::max(g, std::abs(v));
    for (double v : s.centroid) g = std::max(g, std::abs(v));
    return g;
}

double centroid_residual(const State& s) {
    const int d = s.dim();
    double worst = 0.0;
    for (int j = 0; j < d; ++j) {
        double acc = 0.0;
        for (int i = 0; i < s.n(); ++i)
            if (s.attached[i]) acc += s.positions[static_cast<std::size_t>(i) * d + j] - s.centroid[j];
        worst = std::max(worst, std::abs(acc));
    }
    return worst;
}

std::vector<double> expect_one_step(const State& s, const ModelParams& p,
                                    const std::function<std::vector<double>(const State&)>& f,
                                    const EtaQuadrature& quad) {
    check_compatible(s, p);
    const std::vector<double> r = site_selection_probs(s, p);

    std::vector<double> acc;
    auto add_scaled = [&acc](double w, const std::vector<double>& v) {
        if (acc.empty()) acc.assign(v.size(), 0.0);
        if (v.size() != acc.size())
            throw std::invalid_argument("expect_one_step: f returns inconsistent sizes");
        for (std::size_t j = 0; j < v.size(); ++j) acc[j] += w * v[j];
    };

    for (int i = 0; i < p.n; ++i) {
        if (s.attached[i]) {
            add_scaled(r[i], f(detach(s, p, i)));
            continue;
        }
        if (const auto* pm = std::get_if<PointMass>(&p.eta)) {
            add_scaled(r[i], f(attach(s, p, i, pm->value)));
        } else if (const auto* mix = std::get_if<DiscreteMixture>(&p.eta)) {
            for (std::size_t a = 0; a < mix->atoms.size(); ++a)
                add_scaled(r[i] * mix->weights[a], f(attach(s, p, i, mix->atoms[a])));
        } else if (quad.rule == EtaQuadrature::Rule::affine_exact) {
            add_scaled(r[i], f(attach(s, p, i, p.eta_mean)));
        } else {
            if (quad.sample_count < 1)
                throw std::invalid_argument("expect_one_step: monte_carlo needs sample_count >= 1");
            Rng rng = substream_rng(quad.seed, static_cast<std::uint64_t>(i));
            std::vector<double> z(p.dim);
            const double w = r[i] / quad.sample_count;
            for (int m = 0; m < quad.sample_count; ++m) {
                sample_perturbation(p.eta, rng, z);
                add_scaled(w, f(attach(s, p, i, z)));
            }
        }
    }
    return acc;
}

} // namespace ctcm
