#include "ctcm/validation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "ctcm/analysis.hpp"
#include "ctcm/config.hpp"
#include "ctcm/model.hpp"
#include "ctcm/report.hpp"
#include "ctcm/simulate.hpp"
#include "ctcm/stats.hpp"

namespace ctcm {

namespace {

constexpr double kHour = 3600.0;

PerturbationDistribution default_eta() {
    return UniformBox{.center = {1.0, 1.0}, .half_width = {1.0, 1.0}};
}

std::string join_failures(const std::vector<std::string>& msgs, std::size_t cap = 4) {
    std::ostringstream out;
    for (std::size_t i = 0; i < msgs.size() && i < cap; ++i) {
        if (i) out << "; ";
        out << msgs[i];
    }
    if (msgs.size() > cap) out << "; and " << (msgs.size() - cap) << " more";
    return out.str();
}

struct VelocityCheck {
    bool pass = true;
    std::string message;
};

// Shared acceptance tolerance for velocity cells: every coordinate within
// 3 standard errors of the closed form and within 5% relative where nonzero.
VelocityCheck check_velocity_cell(const ModelParams& params,
                                  const std::optional<SemiMarkovConfig>& waits, int ensemble,
                                  double burn_in, double window_end, std::uint64_t seed,
                                  int threads) {
    EnsembleSpec spec{.params = params,
                      .waits = waits,
                      .initial = make_initial_all_attached(params),
                      .horizon = window_end,
                      .probe_times = {burn_in, window_end},
                      .options = {}};
    const EnsembleResult res = simulate_ensemble(spec, ensemble, seed, threads);
    const VelocityEstimate est = estimate_velocity(res, burn_in, window_end);
    const std::vector<double> theory = expected_velocity(params);

    VelocityCheck out;
    for (std::size_t j = 0; j < theory.size(); ++j) {
        const double err = std::abs(est.value[j] - theory[j]);
        const bool se_ok = err <= 3.0 * est.se[j];
        const bool rel_ok = theory[j] == 0.0 || err <= 0.05 * std::abs(theory[j]);
        if (se_ok && rel_ok) continue;
        out.pass = false;
        std::ostringstream msg;
        msg << "n=" << params.n << " theta_d=" << format_double(params.theta_d) << " coord " << j
            << ": est " << format_double(est.value[j]) << " theory " << format_double(theory[j])
            << " se " << format_double(est.se[j]);
        out.message = msg.str();
        return out;
    }
    return out;
}

// --- criterion 1 -----------------------------------------------------------

CriterionResult criterion_velocity_grid(const ValidationOptions& opt) {
    CriterionResult res{1, "velocity reproduction across the (n, theta_d) grid", true, ""};
    const std::vector<int> ns = opt.quick ? std::vector<int>{2, 8}
                                          : std::vector<int>{1, 2, 4, 8, 16, 32};
    const std::vector<double> tds =
        opt.quick ? std::vector<double>{0.05} : std::vector<double>{0.2, 0.05, 0.0125};
    const int m = opt.quick ? 200 : 2000;
    const double burn = opt.quick ? 2.0 * kHour : 10.0 * kHour;
    const double window_end = opt.quick ? 12.0 * kHour : 75.0 * kHour;

    std::vector<std::string> failures;
    for (int n : ns) {
        for (double td : tds) {
            ModelParams params(0.05, td, n, default_eta());
            const VelocityCheck check =
                check_velocity_cell(params, std::nullopt, m, burn, window_end, 101, opt.threads);
            if (!check.pass) failures.push_back(check.message);
        }
    }
    if (!failures.empty()) {
        res.pass = false;
        res.detail = join_failures(failures);
    }
    return res;
}

// --- criterion 2 -----------------------------------------------------------

std::vector<double> binomial_pmf_by_recurrence(int n, double p) {
    std::vector<double> pmf(static_cast<std::size_t>(n) + 1);
    const double q = 1.0 - p;
    pmf[0] = std::pow(q, n);
    for (int k = 1; k <= n; ++k)
        pmf[k] = pmf[k - 1] * (static_cast<double>(n - k + 1) / k) * (p / q);
    return pmf;
}

CriterionResult criterion_stationary_law(const ValidationOptions& opt) {
    CriterionResult res{2, "stationary law exactness and empirical convergence", true, ""};
    std::vector<std::string> failures;

    const std::vector<std::pair<double, double>> rate_pairs = {
        {0.05, 0.2}, {0.05, 0.05}, {0.05, 0.0125}, {0.3, 0.07}};
    for (int n = 1; n <= 64; ++n) {
        for (const auto& [ta, td] : rate_pairs) {
            const CountDistribution sigma = steady_state(n, ta, td);
            const std::vector<double> ref = binomial_pmf_by_recurrence(n, ta / (ta + td));
            double worst = 0.0;
            for (int k = 0; k <= n; ++k)
                worst = std::max(worst, std::abs(sigma.probs[k] - ref[k]));
            if (worst > 1e-12) {
                std::ostringstream msg;
                msg << "pmf defect " << worst << " at n=" << n << " rates (" << ta << "," << td
                    << ")";
                failures.push_back(msg.str());
            }
            const double resid = invariance_residual(sigma, ta, td);
            if (resid > 1e-12) {
                std::ostringstream msg;
                msg << "balance residual " << resid << " at n=" << n << " rates (" << ta << ","
                    << td << ")";
                failures.push_back(msg.str());
            }
        }
    }

    const int m = opt.quick ? 2000 : 10000;
    const double t = opt.quick ? 1.0 * kHour : 10.0 * kHour;
    const double tv_limit = opt.quick ? 0.04 : 0.02;
    ModelParams params(0.05, 0.05, 8, default_eta());
    EnsembleSpec spec{.params = params,
                      .waits = std::nullopt,
                      .initial = make_initial_all_attached(params),
                      .horizon = t,
                      .probe_times = {t},
                      .options = {}};
    const EnsembleResult ens = simulate_ensemble(spec, m, 202, opt.threads);
    const double tv =
        tv_distance(empirical_count_distribution(ens, t), steady_state(8, 0.05, 0.05));
    if (!(tv < tv_limit)) {
        std::ostringstream msg;
        msg << "empirical TV to stationary law " << tv << " at t=" << t << "s (limit " << tv_limit
            << ")";
        failures.push_back(msg.str());
    }

    if (!failures.empty()) {
        res.pass = false;
        res.detail = join_failures(failures);
    }
    return res;
}

// --- criterion 3 -----------------------------------------------------------

CriterionResult criterion_drift_identity(const ValidationOptions&) {
    CriterionResult res{3, "drift identity between closed form and assembled sum", true, ""};
    std::vector<int> ns = {1,  2,  3,  4,  5,  6,  7,  8,  9,  10,
                           12, 16, 20, 24, 32, 40, 48, 56, 64};
    std::vector<std::pair<double, double>> pairs = {
        {0.05, 0.2}, {0.05, 0.05}, {0.05, 0.0125}, {0.2, 0.0125}, {0.0125, 0.2}};
    std::vector<std::pair<int, std::pair<double, double>>> grid;
    for (int n : ns)
        for (const auto& pr : pairs) grid.push_back({n, pr});
    for (int n : {11, 13, 14, 15, 17}) grid.push_back({n, {0.05, 0.05}});

    double worst = 0.0;
    std::string worst_at;
    for (const auto& [n, pr] : grid) {
        ModelParams params(pr.first, pr.second, n, PointMass{{1.0}});
        const std::vector<double> closed = expected_velocity(params);
        const std::vector<double> assembled = drift_oracle(params);
        const double rel = std::abs(closed[0] - assembled[0]) / std::abs(closed[0]);
        if (rel > worst) {
            worst = rel;
            std::ostringstream at;
            at << "n=" << n << " rates (" << pr.first << "," << pr.second << ")";
            worst_at = at.str();
        }
    }
    if (worst > 1e-10) {
        res.pass = false;
        std::ostringstream msg;
        msg << "worst relative gap " << worst << " at " << worst_at << " over " << grid.size()
            << " combinations";
        res.detail = msg.str();
    }
    return res;
}

// --- criterion 4 -----------------------------------------------------------

CriterionResult criterion_one_step(const ValidationOptions& opt) {
    CriterionResult res{4, "one-step expectations against Monte Carlo and projection", true, ""};
    const int draws = opt.quick ? 100000 : 1000000;
    std::vector<std::string> failures;

    Rng walk_rng = make_rng(404);
    int made = 0;
    for (int n : {1, 3, 8}) {
        ModelParams params(0.07, 0.11, n, default_eta());
        const int per_n = n == 8 ? 6 : 7;
        for (int rep = 0; rep < per_n; ++rep, ++made) {
            State s = make_initial_all_attached(params);
            std::vector<double> scratch(static_cast<std::size_t>(params.dim));
            const int prewalk = 3 + (made * 7) % 40;
            for (int step = 0; step < prewalk; ++step)
                step_in_place(s, params, walk_rng, scratch);

            const int k = project(s);
            const double c = rate(s, params);
            const int d = params.dim;

            auto f_centroid = [](const State& x) { return x.centroid; };
            auto f_indicator = [n](const State& x) {
                std::vector<double> e(static_cast<std::size_t>(n) + 1, 0.0);
                e[static_cast<std::size_t>(project(x))] = 1.0;
                return e;
            };
            const std::vector<double> exact_centroid = expect_one_step(s, params, f_centroid);
            const std::vector<double> exact_indicator = expect_one_step(s, params, f_indicator);

            // Projection rows of the embedded count chain, exactly.
            std::vector<double> mu_hat(static_cast<std::size_t>(n) + 1, 0.0);
            if (k > 0) mu_hat[k - 1] = params.theta_d * k / c;
            if (k < n) mu_hat[k + 1] = params.theta_a * (n - k) / c;
            for (int j = 0; j <= n; ++j) {
                if (std::abs(exact_indicator[j] - mu_hat[j]) > 1e-13) {
                    std::ostringstream msg;
                    msg << "state " << made << ": count-indicator expectation differs from the "
                        << "projected chain row by "
                        << std::abs(exact_indicator[j] - mu_hat[j]);
                    failures.push_back(msg.str());
                    break;
                }
            }

            // Mean centroid increment, assembled independently: only attach
            // moves shift the centroid in expectation, by eta_mean/(k+1).
            const double attach_prob = params.theta_a * (n - k) / c;
            for (int j = 0; j < d; ++j) {
                const double predicted =
                    s.centroid[j] + attach_prob * params.eta_mean[j] / (k + 1);
                if (std::abs(exact_centroid[j] - predicted) >
                    1e-12 * std::max(1.0, std::abs(s.centroid[j]))) {
                    std::ostringstream msg;
                    msg << "state " << made << ": centroid drift differs from the independent "
                        << "assembly by " << std::abs(exact_centroid[j] - predicted);
                    failures.push_back(msg.str());
                    break;
                }
            }

            // Monte Carlo cross-check of the full kernel expectation.
            Rng mc_rng = substream_rng(8404, static_cast<std::uint64_t>(made));
            std::vector<double> mean_c(static_cast<std::size_t>(d), 0.0);
            std::vector<double> m2_c(static_cast<std::size_t>(d), 0.0);
            std::vector<double> mean_i(static_cast<std::size_t>(n) + 1, 0.0);
            State next = s;
            for (int it = 1; it <= draws; ++it) {
                next = s;
                step_in_place(next, params, mc_rng, scratch);
                for (int j = 0; j < d; ++j) {
                    const double delta = next.centroid[j] - mean_c[j];
                    mean_c[j] += delta / it;
                    m2_c[j] += delta * (next.centroid[j] - mean_c[j]);
                }
                mean_i[static_cast<std::size_t>(project(next))] += 1.0;
            }
            for (int j = 0; j < d; ++j) {
                const double se = std::sqrt(m2_c[j] / (draws - 1.0) / draws);
                const double err = std::abs(mean_c[j] - exact_centroid[j]);
                if (err > 4.0 * se + 1e-12) {
                    std::ostringstream msg;
                    msg << "state " << made << " coord " << j << ": Monte Carlo centroid off by "
                        << err << " (se " << se << ")";
                    failures.push_back(msg.str());
                }
            }
            for (int j = 0; j <= n; ++j) {
                const double phat = mean_i[j] / draws;
                const double se = std::sqrt(std::max(phat * (1.0 - phat), 0.0) / draws);
                const double err = std::abs(phat - exact_indicator[j]);
                if (err > 4.0 * se + 1e-12) {
                    std::ostringstream msg;
                    msg << "state " << made << " count " << j << ": Monte Carlo occupancy off by "
                        << err << " (se " << se << ")";
                    failures.push_back(msg.str());
                }
            }
        }
    }
    if (!failures.empty()) {
        res.pass = false;
        res.detail = join_failures(failures);
    }
    return res;
}

// --- criterion 5 -----------------------------------------------------------

CriterionResult criterion_growth_bounds(const ValidationOptions& opt) {
    CriterionResult res{5, "growth bounds and centroid consistency on recorded paths", true, ""};
    const int paths = opt.quick ? 100 : 1000;
    const std::uint64_t jumps = opt.quick ? 2000 : 10000;
    const double inf = std::numeric_limits<double>::infinity();

    ModelParams params(0.05, 0.2, 8, default_eta());
    SemiMarkovConfig exp_waits{ExponentialWait{0.05}, ExponentialWait{0.2}};
    SimOptions sim;
    sim.max_jumps = jumps;

    std::vector<std::string> failures;
    std::uint64_t total_steps = 0, total_pairs = 0;
    for (int i = 0; i < paths; ++i) {
        Rng rng = substream_rng(505, static_cast<std::uint64_t>(i));
        const Trajectory traj =
            (i % 2 == 0) ? simulate_markov(params, make_initial_all_attached(params), inf, rng, sim)
                         : simulate_semi_markov(params, exp_waits,
                                                make_initial_all_attached(params), inf, rng, sim);
        const BoundsReport rep = check_growth_bounds(traj, params);
        total_steps += rep.step_checks;
        total_pairs += rep.pair_checks;
        if (!rep.ok()) {
            std::ostringstream msg;
            msg << "path " << i << ": " << rep.violations << " violations (" << rep.first_message
                << ")";
            failures.push_back(msg.str());
        }
    }
    if (!failures.empty()) {
        res.pass = false;
        res.detail = join_failures(failures);
    } else {
        std::ostringstream note;
        note << total_steps << " step checks, " << total_pairs << " pair checks clean";
        res.detail = note.str();
    }
    return res;
}

// --- criterion 6 -----------------------------------------------------------

std::vector<double> holding_times(const Trajectory& traj) {
    std::vector<double> holds;
    holds.reserve(traj.times.size());
    for (std::size_t i = 0; i + 1 < traj.times.size(); ++i)
        holds.push_back(traj.times[i + 1] - traj.times[i]);
    return holds;
}

// Chi-square of observed up/down moves of the attach count against the
// projected-chain rows, levels with thin expected counts dropped.
struct TransitionTest {
    double stat = 0.0;
    double df = 0.0;
};

TransitionTest transition_chi_square(const Trajectory& traj, const ModelParams& p) {
    const int n = p.n;
    std::vector<double> up(static_cast<std::size_t>(n) + 1, 0.0);
    std::vector<double> down(static_cast<std::size_t>(n) + 1, 0.0);
    int prev = project(traj.states.front());
    for (std::size_t i = 1; i < traj.states.size(); ++i) {
        const int cur = project(traj.states[i]);
        (cur > prev ? up[prev] : down[prev]) += 1.0;
        prev = cur;
    }
    TransitionTest out;
    for (int k = 1; k < n; ++k) { // boundary levels move deterministically
        const double visits = up[k] + down[k];
        const double c = p.theta_d * k + p.theta_a * (n - k);
        const double e_up = visits * (p.theta_a * (n - k) / c);
        const double e_down = visits * (p.theta_d * k / c);
        if (e_up < 5.0 || e_down < 5.0) continue;
        out.stat += (up[k] - e_up) * (up[k] - e_up) / e_up +
                    (down[k] - e_down) * (down[k] - e_down) / e_down;
        out.df += 1.0;
    }
    return out;
}

CriterionResult criterion_engine_equivalence(const ValidationOptions& opt) {
    CriterionResult res{6, "clock-per-site engine reproduces the global-clock law", true, ""};
    const std::uint64_t events = opt.quick ? 20000 : 100000;
    std::vector<std::string> failures;

    ModelParams params(0.05, 0.2, 8, default_eta());
    SemiMarkovConfig exp_waits{ExponentialWait{0.05}, ExponentialWait{0.2}};
    const double inf = std::numeric_limits<double>::infinity();
    SimOptions sim;
    sim.max_jumps = events;

    Rng rng_a = make_rng(8606);
    Rng rng_b = make_rng(709606);
    const Trajectory markov_path =
        simulate_markov(params, make_initial_all_attached(params), inf, rng_a, sim);
    const Trajectory semi_path = simulate_semi_markov(
        params, exp_waits, make_initial_all_attached(params), inf, rng_b, sim);

    const std::vector<double> holds_a = holding_times(markov_path);
    const std::vector<double> holds_b = holding_times(semi_path);
    const double d = ks_statistic(holds_a, holds_b);
    const double d_crit = ks_critical_1pct(holds_a.size(), holds_b.size());
    if (!(d <= d_crit)) {
        std::ostringstream msg;
        msg << "holding-time KS statistic " << d << " above the 1% critical value " << d_crit;
        failures.push_back(msg.str());
    }

    for (const auto& [label, path] :
         {std::pair<const char*, const Trajectory*>{"clock-per-site", &semi_path},
          std::pair<const char*, const Trajectory*>{"global-clock", &markov_path}}) {
        const TransitionTest t = transition_chi_square(*path, params);
        const double crit = chi_square_critical_99(t.df);
        if (!(t.df > 0.0) || !(t.stat <= crit)) {
            std::ostringstream msg;
            msg << label << " transition chi-square " << t.stat << " above the 1% critical value "
                << crit << " (df " << t.df << ")";
            failures.push_back(msg.str());
        }
    }

    {
        const int m = opt.quick ? 200 : 2000;
        const double burn = opt.quick ? 2.0 * kHour : 10.0 * kHour;
        const double window_end = opt.quick ? 12.0 * kHour : 75.0 * kHour;
        ModelParams cell(0.05, 0.05, 8, default_eta());
        SemiMarkovConfig waits{ExponentialWait{0.05}, ExponentialWait{0.05}};
        const VelocityCheck check =
            check_velocity_cell(cell, waits, m, burn, window_end, 606, opt.threads);
        if (!check.pass) failures.push_back("velocity cell via per-site clocks: " + check.message);
    }

    if (!failures.empty()) {
        res.pass = false;
        res.detail = join_failures(failures);
    }
    return res;
}

// --- criterion 7 -----------------------------------------------------------

CriterionResult criterion_alternative_waits(const ValidationOptions& opt) {
    CriterionResult res{7, "alternative wait families run and exponential matches", true, ""};
    std::vector<std::string> failures;

    ExperimentConfig cfg;
    cfg.n_values.clear();
    if (opt.quick) {
        cfg.n_values = {1, 3};
        cfg.ensemble_size = 100;
        cfg.burn_in_s = 2.0 * kHour;
        cfg.window_end_s = 12.0 * kHour;
        cfg.horizon_s = cfg.window_end_s;
    } else {
        for (int n = 1; n <= 10; ++n) cfg.n_values.push_back(n);
        cfg.ensemble_size = 1000;
    }
    cfg.seed = 707;
    cfg.engines = {
        EngineSpec{.waits = SemiMarkovConfig{ExponentialWait{1.0 / 20.0},
                                             ExponentialWait{1.0 / 60.0}},
                   .label = "exponential"},
        EngineSpec{.waits = SemiMarkovConfig{TruncatedNormalWait{20.0, 1.0},
                                             TruncatedNormalWait{60.0, 1.0}},
                   .label = "truncated-normal"},
        EngineSpec{.waits = SemiMarkovConfig{ContinuousPoissonWait(20.0),
                                             ContinuousPoissonWait(60.0)},
                   .label = "continuous-poisson"},
    };

    try {
        const std::vector<SweepRow> rows = run_experiment(cfg, opt.threads, nullptr);
        std::ostringstream csv;
        write_sweep_csv(csv, rows, 2);
        const std::size_t expected_rows = cfg.n_values.size() * cfg.engines.size();
        if (rows.size() != expected_rows || csv.str().empty()) {
            std::ostringstream msg;
            msg << "sweep produced " << rows.size() << " rows, expected " << expected_rows;
            failures.push_back(msg.str());
        }
        for (const SweepRow& row : rows) {
            if (row.distribution != "exponential") continue;
            for (std::size_t j = 0; j < row.theory.size(); ++j) {
                const double err = std::abs(row.est[j] - row.theory[j]);
                const bool se_ok = err <= 3.0 * row.se[j];
                const bool rel_ok = row.theory[j] == 0.0 || err <= 0.05 * std::abs(row.theory[j]);
                if (se_ok && rel_ok) continue;
                std::ostringstream msg;
                msg << "exponential column n=" << row.n << " coord " << j << ": est "
                    << format_double(row.est[j]) << " theory " << format_double(row.theory[j])
                    << " se " << format_double(row.se[j]);
                failures.push_back(msg.str());
            }
        }
    } catch (const std::exception& e) {
        failures.push_back(std::string("sweep did not complete: ") + e.what());
    }

    if (!failures.empty()) {
        res.pass = false;
        res.detail = join_failures(failures);
    }
    return res;
}

// --- criterion 8 -----------------------------------------------------------

CriterionResult criterion_determinism(const ValidationOptions& opt) {
    CriterionResult res{8, "byte-identical outputs for identical config and seed", true, ""};

    ExperimentConfig cfg;
    cfg.n_values = {2};
    cfg.theta_d_values = {0.05};
    cfg.ensemble_size = 50;
    cfg.burn_in_s = 0.5 * kHour;
    cfg.window_end_s = 2.0 * kHour;
    cfg.horizon_s = cfg.window_end_s;
    cfg.seed = 808;

    auto render = [&cfg](int threads) {
        std::ostringstream csv, jsonl;
        const std::vector<SweepRow> rows = run_experiment(cfg, threads, &jsonl);
        write_sweep_csv(csv, rows, 2);
        return std::pair<std::string, std::string>(csv.str(), jsonl.str());
    };

    const auto first = render(opt.threads);
    const auto second = render(opt.threads);
    const auto serial = render(1);
    const auto parallel = render(4);

    std::vector<std::string> failures;
    if (first != second) failures.push_back("repeated run changed the output bytes");
    if (serial != parallel)
        failures.push_back("serial and 4-thread runs disagree");
    if (first.first.empty() || first.second.empty())
        failures.push_back("empty output");
    if (!failures.empty()) {
        res.pass = false;
        res.detail = join_failures(failures);
    }
    return res;
}

} // namespace

std::vector<CriterionResult> run_validation(const ValidationOptions& opt) {
    std::vector<CriterionResult> out;
    out.push_back(criterion_velocity_grid(opt));
    out.push_back(criterion_stationary_law(opt));
    out.push_back(criterion_drift_identity(opt));
    out.push_back(criterion_one_step(opt));
    out.push_back(criterion_growth_bounds(opt));
    out.push_back(criterion_engine_equivalence(opt));
    out.push_back(criterion_alternative_waits(opt));
    out.push_back(criterion_determinism(opt));
    return out;
}

int report_validation(std::ostream& os, const std::vector<CriterionResult>& results) {
    int failed = 0;
    for (const CriterionResult& r : results) {
        os << (r.pass ? "[PASS]" : "[FAIL]") << " criterion " << r.id << ": " << r.name;
        if (!r.detail.empty()) os << " (" << r.detail << ")";
        os << '\n';
        if (!r.pass) ++failed;
    }
    return failed == 0 ? 0 : 1;
}

bool fault_injection_catches_understated_radius(std::ostream& os) {
    ModelParams params(0.05, 0.2, 8, default_eta());
    params.eta_radius *= 0.45; // deliberate understatement of the support bound

    SimOptions sim;
    sim.audit = false; // let the offline checker do the catching
    sim.max_jumps = 2000;
    Rng rng = make_rng(909);
    const Trajectory traj = simulate_markov(params, make_initial_all_attached(params),
                                            std::numeric_limits<double>::infinity(), rng, sim);
    const BoundsReport rep = check_growth_bounds(traj, params);
    if (rep.ok()) {
        os << "fault injection NOT caught: bounds check accepted an understated radius\n";
        return false;
    }
    os << "fault injection caught: " << rep.violations << " flagged steps ("
       << rep.first_message << ")\n";
    return true;
}

} // namespace ctcm
