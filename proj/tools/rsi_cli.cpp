// Experiment CLI for randomized subspace iteration: generate test matrices,
// run bound-evaluation sweeps, re-check stored results, and print the
// Gaussian-guess constants.

#include <cstdio>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <rsi/bounds.hpp>
#include <rsi/harness.hpp>

namespace {

std::vector<std::string> split_list(const std::string& csv) {
    std::vector<std::string> out;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty()) out.push_back(item);
    return out;
}

rsi::ExperimentConfig load_or_default(const std::string& config_path) {
    return config_path.empty() ? rsi::default_config() : rsi::load_config(config_path);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"randomized subspace iteration bound evaluation"};
    app.require_subcommand(1);

    std::string config_path, out_dir, experiments_csv, csv_path;
    std::uint64_t seed_override = 0;
    bool have_seed = false, dump_matrices = false;
    int jobs = 1;
    double slack = 1e-8;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", config_path, "JSON sweep configuration");
        cmd->add_option("--out", out_dir, "output directory (overrides config)");
        cmd->add_option("--jobs", jobs, "concurrent runs within the sweep");
        cmd->add_option("--seed", seed_override, "replace the seed grid with a single seed")
            ->each([&](const std::string&) { have_seed = true; });
        cmd->add_option("--experiments", experiments_csv,
                        "comma-separated experiment list (overrides config)");
        cmd->add_flag("--dump-matrices", dump_matrices,
                      "write generated matrices in Matrix Market form");
    };

    CLI::App* cmd_generate = app.add_subcommand("generate", "generate test matrices only");
    add_common(cmd_generate);

    CLI::App* cmd_run = app.add_subcommand("run", "run the full sweep");
    add_common(cmd_run);

    CLI::App* cmd_check =
        app.add_subcommand("check", "re-verify the master property from a results CSV");
    cmd_check->add_option("--csv", csv_path, "path to results.csv")->required();
    cmd_check->add_option("--slack", slack, "allowed absolute slack (default 1e-8)");

    int c_n = 300, c_k = 25, c_rho = 20;
    double c_delta = 0.1, c_epsilon = 0.0, c_gamma = 0.0;
    CLI::App* cmd_constants =
        app.add_subcommand("constants", "print C_e, C_d and the required iteration count");
    cmd_constants->add_option("--n", c_n, "ambient dimension");
    cmd_constants->add_option("--k", c_k, "target rank");
    cmd_constants->add_option("--rho", c_rho, "oversampling (>= 2)");
    cmd_constants->add_option("--delta", c_delta, "failure probability in (0,1)");
    cmd_constants->add_option("--epsilon", c_epsilon, "target accuracy for the iteration count");
    cmd_constants->add_option("--gamma-k", c_gamma, "singular value ratio sigma_{k+1}/sigma_k");

    CLI11_PARSE(app, argc, argv);

    try {
        if (app.got_subcommand(cmd_generate) || app.got_subcommand(cmd_run)) {
            rsi::ExperimentConfig cfg = load_or_default(config_path);
            if (!out_dir.empty()) cfg.output_dir = out_dir;
            if (have_seed) cfg.seeds = {seed_override};
            if (!experiments_csv.empty()) {
                cfg.experiments.clear();
                for (const std::string& e : split_list(experiments_csv))
                    cfg.experiments.push_back(rsi::experiment_from_string(e));
            }
            if (dump_matrices) cfg.dump_matrices = true;
            cfg.jobs = jobs;
            if (app.got_subcommand(cmd_generate)) {
                cfg.experiments.clear();
                cfg.dump_matrices = true;
            }
            const std::string dir = rsi::run(cfg);
            std::cout << "wrote " << dir << "\n";
            return 0;
        }
        if (app.got_subcommand(cmd_check)) {
            const std::vector<std::string> violations = rsi::check_csv_file(csv_path, slack);
            if (violations.empty()) {
                std::cout << "OK: all structural bounds dominate their measured values\n";
                return 0;
            }
            std::cout << violations.size() << " violation(s):\n";
            for (const auto& v : violations) std::cout << "  " << v << "\n";
            return 1;
        }
        if (app.got_subcommand(cmd_constants)) {
            const rsi::GaussianConstants c =
                rsi::gaussian_constants(c_n, c_k, c_rho, c_delta);
            std::printf("C_e = %.10g\n", c.c_e);
            std::printf("C_d = %.10g (delta = %g)\n", c.c_d, c_delta);
            if (c_epsilon > 0.0 && c_gamma > 0.0) {
                const int q = rsi::required_iterations(c_epsilon, c.c_e, c_gamma);
                std::printf("required q for epsilon = %g at gamma_k = %g: %d\n", c_epsilon,
                            c_gamma, q);
            }
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
