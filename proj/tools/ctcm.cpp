// Command-line front end: `simulate` runs a sweep from a JSON config and
// writes the aggregate CSV (plus an optional per-trajectory JSON-lines dump),
// `theory` prints the closed-form references for the same grid, and
// `validate` runs the self-check battery.
//
// Exit codes: 0 success, 1 validation or simulation failure, 2 bad config.

#include <chrono>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "ctcm/config.hpp"
#include "ctcm/report.hpp"
#include "ctcm/validation.hpp"

namespace {

struct CommonFlags {
    std::string config_path;
    std::string out_path;
    std::optional<std::uint64_t> seed;
    int threads = 0;
};

void add_common(CLI::App* cmd, CommonFlags& flags) {
    cmd->add_option("--config", flags.config_path, "JSON run configuration");
    cmd->add_option("--out", flags.out_path, "output path (overrides the config)");
    cmd->add_option("--seed", flags.seed, "master seed (overrides the config)");
    cmd->add_option("--threads", flags.threads,
                    "worker threads; 0 consults CTCM_THREADS, then the OpenMP default");
}

ctcm::ExperimentConfig load_or_default(const CommonFlags& flags) {
    ctcm::ExperimentConfig cfg;
    if (!flags.config_path.empty()) cfg = ctcm::load_config_file(flags.config_path);
    if (flags.seed) cfg.seed = *flags.seed;
    if (!flags.out_path.empty()) cfg.csv_path = flags.out_path;
    return cfg;
}

int cmd_simulate(const CommonFlags& flags) {
    const ctcm::ExperimentConfig cfg = load_or_default(flags);

    std::ofstream jsonl_file;
    std::ostream* jsonl = nullptr;
    if (!cfg.jsonl_path.empty()) {
        jsonl_file.open(cfg.jsonl_path, std::ios::binary);
        if (!jsonl_file) {
            std::cerr << "cannot open '" << cfg.jsonl_path << "' for writing\n";
            return 1;
        }
        jsonl = &jsonl_file;
    }

    const std::vector<ctcm::SweepRow> rows = ctcm::run_experiment(cfg, flags.threads, jsonl);
    const int dim = static_cast<int>(ctcm::dim(cfg.eta));
    if (cfg.csv_path.empty()) {
        ctcm::write_sweep_csv(std::cout, rows, dim);
    } else {
        std::ofstream csv(cfg.csv_path, std::ios::binary);
        if (!csv) {
            std::cerr << "cannot open '" << cfg.csv_path << "' for writing\n";
            return 1;
        }
        ctcm::write_sweep_csv(csv, rows, dim);
        std::cerr << "wrote " << rows.size() << " rows to " << cfg.csv_path << '\n';
    }
    return 0;
}

int cmd_theory(const CommonFlags& flags) {
    const ctcm::ExperimentConfig cfg = load_or_default(flags);
    if (flags.out_path.empty()) {
        ctcm::print_theory(std::cout, cfg);
        return 0;
    }
    std::ofstream out(flags.out_path, std::ios::binary);
    if (!out) {
        std::cerr << "cannot open '" << flags.out_path << "' for writing\n";
        return 1;
    }
    ctcm::write_theory_csv(out, cfg);
    return 0;
}

int cmd_validate(const std::string& level, int threads, bool inject_fault) {
    if (inject_fault)
        return ctcm::fault_injection_catches_understated_radius(std::cout) ? 0 : 1;

    ctcm::ValidationOptions opt;
    opt.quick = level != "full";
    opt.threads = threads;

    const auto start = std::chrono::steady_clock::now();
    const std::vector<ctcm::CriterionResult> results = ctcm::run_validation(opt);
    const int code = ctcm::report_validation(std::cout, results);
    const auto elapsed =
        std::chrono::duration_cast<std::chrono::seconds>(std::chrono::steady_clock::now() - start);
    std::cout << "level " << (opt.quick ? "quick" : "full") << " finished in " << elapsed.count()
              << "s\n";
    return code;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"centroid motion model: simulation, closed forms, self-checks"};
    app.require_subcommand(1);

    CommonFlags sim_flags, theory_flags;
    std::string level = "quick";
    int validate_threads = 0;
    bool inject_fault = false;

    CLI::App* sim = app.add_subcommand("simulate", "run the configured sweep");
    add_common(sim, sim_flags);

    CLI::App* theory = app.add_subcommand("theory", "closed-form reference tables");
    add_common(theory, theory_flags);

    CLI::App* validate = app.add_subcommand("validate", "self-check battery");
    validate->add_option("--level", level, "quick or full")
        ->check(CLI::IsMember({"quick", "full"}));
    validate->add_option("--threads", validate_threads, "worker threads");
    validate->add_flag("--inject-fault", inject_fault,
                       "negative control: an understated perturbation radius must be flagged");

    CLI11_PARSE(app, argc, argv);

    try {
        if (sim->parsed()) return cmd_simulate(sim_flags);
        if (theory->parsed()) return cmd_theory(theory_flags);
        return cmd_validate(level, validate_threads, inject_fault);
    } catch (const ctcm::ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
