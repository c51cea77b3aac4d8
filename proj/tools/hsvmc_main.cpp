// Command-line experiment runner: density sweeps over the dilute hard-sphere
// gas with CSV/JSON output, plus a built-in verification suite (--selftest).
// Exit codes: 0 success, 1 any row failure, 2 configuration error.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hsvmc/selftest.hpp"
#include "hsvmc/sweep.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Variational Monte Carlo for dilute hard-sphere bosons on a periodic box"};

    std::string config_path;
    std::vector<double> densities;
    int n_particles = 0;
    double epsilon = 0.0;
    double ell = 0.0;
    std::uint32_t chains = 0;
    std::uint32_t sweeps = 0;
    std::uint32_t burn_in = 0;
    std::uint32_t block_size = 0;
    std::uint64_t seed = 0;
    std::string out_path;
    std::string format_name;
    bool selftest = false;

    app.add_option("--config", config_path,
                   "Settings file with one 'key = value' per line; flags override it");
    app.add_option("--density", densities,
                   "rho a^3 for one row (repeatable; a leading 0 adds a free-gas smoke row)");
    app.add_option("--n", n_particles, "Particle count");
    app.add_option("--epsilon", epsilon,
                   "Range exponent in ell = (rho a)^{-1/2} (rho a^3)^epsilon");
    app.add_option("--ell", ell, "Fix the pair range instead of deriving it from the density");
    app.add_option("--chains", chains, "Independent chains per row");
    app.add_option("--sweeps", sweeps, "Measured sweeps per chain");
    app.add_option("--burn-in", burn_in, "Discarded equilibration sweeps per chain");
    app.add_option("--block-size", block_size, "Sweeps per statistics block");
    app.add_option("--seed", seed, "Seed for the counter-based random stream");
    app.add_option("--out", out_path, "Output file path (default: stdout)");
    app.add_option("--format", format_name, "Output format: csv or json")
        ->check(CLI::IsMember({"csv", "json"}));
    app.add_flag("--selftest", selftest,
                 "Run the built-in verification suite and exit nonzero on failure");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& err) {
        return app.exit(err);
    } catch (const CLI::CallForAllHelp& err) {
        return app.exit(err);
    } catch (const CLI::CallForVersion& err) {
        return app.exit(err);
    } catch (const CLI::ParseError& err) {
        app.exit(err);
        return 2;
    }

    if (selftest) {
        const std::vector<hsvmc::CheckResult> results = hsvmc::run_selftest(std::cout);
        std::size_t passed = 0;
        for (const auto& result : results) passed += result.passed ? 1 : 0;
        const bool good = hsvmc::all_passed(results);
        std::cout << (good ? "selftest passed" : "selftest FAILED") << " (" << passed << "/"
                  << results.size() << " checks)\n";
        return good ? 0 : 1;
    }

    try {
        hsvmc::SweepConfig config;
        if (app.count("--config")) {
            std::ifstream file(config_path);
            if (!file) throw hsvmc::ConfigError("cannot open config file: " + config_path);
            config = hsvmc::parse_config(file);
        }
        if (app.count("--density")) config.densities = densities;
        if (app.count("--n")) config.n_particles = n_particles;
        if (app.count("--epsilon")) config.epsilon = epsilon;
        if (app.count("--ell")) config.ell_override = ell;
        if (app.count("--chains")) config.n_chains = chains;
        if (app.count("--sweeps")) config.sweeps = sweeps;
        if (app.count("--burn-in")) config.burn_in = burn_in;
        if (app.count("--block-size")) config.block_size = block_size;
        if (app.count("--seed")) config.seed = seed;
        if (app.count("--out")) config.output_path = out_path;
        if (app.count("--format"))
            config.format = format_name == "json" ? hsvmc::OutputFormat::kJson
                                                  : hsvmc::OutputFormat::kCsv;

        hsvmc::validate(config);

        // Open the sink before sampling so a bad path fails before the run.
        std::ofstream file_out;
        if (!config.output_path.empty()) {
            file_out.open(config.output_path);
            if (!file_out)
                throw hsvmc::ConfigError("cannot open output file: " + config.output_path);
        }

        const std::vector<hsvmc::SweepRow> rows = hsvmc::run_sweep(config);

        std::ostream& sink = config.output_path.empty() ? std::cout : file_out;
        hsvmc::write_rows(sink, config, rows);
        sink.flush();
        if (!sink) {
            std::cerr << "error: failed writing " << config.output_path << "\n";
            return 1;
        }
        if (!config.output_path.empty())
            std::cerr << "wrote " << rows.size() << " rows to " << config.output_path << "\n";

        for (const auto& row : rows)
            if (row.status.rfind("error", 0) == 0) {
                std::cerr << "row rho_a3=" << row.rho_a3 << " failed: " << row.status << "\n";
                return 1;
            }
        return 0;
    } catch (const hsvmc::ConfigError& err) {
        std::cerr << "config error: " << err.what() << "\n";
        return 2;
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << "\n";
        return 1;
    }
}
