#include "ctcm/report.hpp"

#include <charconv>
#include <stdexcept>

#include <json.hpp>

namespace ctcm {

std::string format_double(double v) {
    char buf[40];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

namespace {

struct Cell {
    int n;
    double theta_a;
    double theta_d;
    const EngineSpec* engine;
};

std::vector<Cell> sweep_cells(const ExperimentConfig& cfg) {
    std::vector<Cell> cells;
    for (int n : cfg.n_values) {
        for (const EngineSpec& eng : cfg.engines) {
            if (eng.waits) {
                // Clock-per-site engines carry their own time scales; the
                // theta_d grid applies to the global-clock engine only.
                const double ta = 1.0 / wait_mean(eng.waits->attach_wait);
                const double td = 1.0 / wait_mean(eng.waits->detach_wait);
                cells.push_back({n, ta, td, &eng});
            } else {
                for (double td : cfg.theta_d_values)
                    cells.push_back({n, cfg.theta_a, td, &eng});
            }
        }
    }
    return cells;
}

void dump_jsonl(std::ostream& os, const Cell& cell, const EnsembleResult& res,
                std::size_t burn_idx, std::size_t end_idx) {
    const std::size_t d = static_cast<std::size_t>(res.dim);
    for (std::size_t i = 0; i < res.trajectories.size(); ++i) {
        const TrajectorySummary& tr = res.trajectories[i];
        nlohmann::json line;
        line["n"] = cell.n;
        line["theta_a"] = cell.theta_a;
        line["theta_d"] = cell.theta_d;
        line["engine"] = cell.engine->waits ? "semi-markov" : "markov";
        line["distribution"] = cell.engine->label;
        line["trajectory_id"] = i;
        line["t_burn_centroid"] = std::vector<double>(
            tr.probe_centroids.begin() + static_cast<std::ptrdiff_t>(burn_idx * d),
            tr.probe_centroids.begin() + static_cast<std::ptrdiff_t>((burn_idx + 1) * d));
        line["t_end_centroid"] = std::vector<double>(
            tr.probe_centroids.begin() + static_cast<std::ptrdiff_t>(end_idx * d),
            tr.probe_centroids.begin() + static_cast<std::ptrdiff_t>((end_idx + 1) * d));
        line["jump_count"] = tr.jump_count;
        line["occupancy"] = tr.occupancy;
        os << line.dump() << '\n';
    }
}

} // namespace

std::vector<SweepRow> run_experiment(const ExperimentConfig& cfg, int threads,
                                     std::ostream* jsonl) {
    std::vector<SweepRow> rows;
    for (const Cell& cell : sweep_cells(cfg)) {
        ModelParams params(cell.theta_a, cell.theta_d, cell.n, cfg.eta);

        EnsembleSpec spec{.params = params,
                          .waits = cell.engine->waits,
                          .initial = make_initial_all_attached(params),
                          .horizon = cfg.horizon_s,
                          .probe_times = {cfg.burn_in_s, cfg.window_end_s},
                          .options = {}};
        const EnsembleResult res = simulate_ensemble(spec, cfg.ensemble_size, cfg.seed, threads);

        const VelocityEstimate est = estimate_velocity(res, cfg.burn_in_s, cfg.window_end_s);
        const CountDistribution sigma = steady_state(cell.n, cell.theta_a, cell.theta_d);
        const CountDistribution at_burn = empirical_count_distribution(res, cfg.burn_in_s);

        SweepRow row;
        row.n = cell.n;
        row.theta_a = cell.theta_a;
        row.theta_d = cell.theta_d;
        row.engine = cell.engine->waits ? "semi-markov" : "markov";
        row.distribution = cell.engine->label;
        row.m = cfg.ensemble_size;
        row.burn_in_s = cfg.burn_in_s;
        row.window_s = cfg.window_end_s - cfg.burn_in_s;
        row.est = est.value;
        row.se = est.se;
        row.theory = expected_velocity(params);
        row.tv_to_sigma = tv_distance(at_burn, sigma);
        rows.push_back(std::move(row));

        if (jsonl) dump_jsonl(*jsonl, cell, res, 0, 1);
    }
    return rows;
}

void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows, int dim) {
    os << "# times in seconds, velocities in length units per second\n";
    os << "n,theta_a,theta_d,engine,distribution,M,burn_in_s,window_s";
    for (int j = 0; j < dim; ++j) os << ",est_v" << j;
    for (int j = 0; j < dim; ++j) os << ",se_v" << j;
    for (int j = 0; j < dim; ++j) os << ",theory_v" << j;
    os << ",tv_to_sigma\n";
    for (const SweepRow& r : rows) {
        os << r.n << ',' << format_double(r.theta_a) << ',' << format_double(r.theta_d) << ','
           << r.engine << ',' << r.distribution << ',' << r.m << ','
           << format_double(r.burn_in_s) << ',' << format_double(r.window_s);
        for (int j = 0; j < dim; ++j) os << ',' << format_double(r.est[j]);
        for (int j = 0; j < dim; ++j) os << ',' << format_double(r.se[j]);
        for (int j = 0; j < dim; ++j) os << ',' << format_double(r.theory[j]);
        os << ',' << format_double(r.tv_to_sigma) << '\n';
    }
}

void write_theory_csv(std::ostream& os, const ExperimentConfig& cfg) {
    const int dim = static_cast<int>(ctcm::dim(cfg.eta));
    os << "# stationary attach-count law and expected velocity per (n, rates)\n";
    os << "n,theta_a,theta_d,k,sigma_k";
    for (int j = 0; j < dim; ++j) os << ",theory_v" << j;
    os << '\n';
    for (int n : cfg.n_values) {
        for (double td : cfg.theta_d_values) {
            ModelParams params(cfg.theta_a, td, n, cfg.eta);
            const CountDistribution sigma = steady_state(n, cfg.theta_a, td);
            const std::vector<double> v = expected_velocity(params);
            for (int k = 0; k <= n; ++k) {
                os << n << ',' << format_double(cfg.theta_a) << ',' << format_double(td) << ','
                   << k << ',' << format_double(sigma.probs[k]);
                for (int j = 0; j < dim; ++j) os << ',' << format_double(v[j]);
                os << '\n';
            }
        }
    }
}

void print_theory(std::ostream& os, const ExperimentConfig& cfg) {
    for (int n : cfg.n_values) {
        for (double td : cfg.theta_d_values) {
            ModelParams params(cfg.theta_a, td, n, cfg.eta);
            const CountDistribution sigma = steady_state(n, cfg.theta_a, td);
            const std::vector<double> v = expected_velocity(params);
            os << "n=" << n << " theta_a=" << format_double(cfg.theta_a)
               << " theta_d=" << format_double(td) << '\n';
            os << "  stationary attach-count law:";
            for (double p : sigma.probs) os << ' ' << format_double(p);
            os << '\n';
            os << "  expected velocity:";
            for (double x : v) os << ' ' << format_double(x);
            os << "\n\n";
        }
    }
}

} // namespace ctcm
