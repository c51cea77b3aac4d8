#pragma once
// Density-sweep driver.  For each rho a^3 it derives the pair range and
// truncation order from the error budget, solves the pair profile, runs the
// sampler, and collects one table row comparing the measured energy per
// particle against the leading term 4 pi rho a and the Lee-Huang-Yang
// corrected prediction.  Writers emit CSV or JSON with the provenance
// (epsilon, M, ell, seed, solver residual) echoed for every row.

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <istream>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "hsvmc/cluster.hpp"
#include "hsvmc/errors.hpp"
#include "hsvmc/sampler.hpp"
#include "hsvmc/scattering.hpp"

namespace hsvmc {

/// 128 / (15 sqrt(pi)): coefficient of (rho a^3)^{1/2} in the Lee-Huang-Yang
/// correction to the ground-state energy per particle, relative to 4 pi rho a.
inline const double kLhyCoefficient = 128.0 / (15.0 * std::sqrt(M_PI));

enum class OutputFormat { kCsv, kJson };

struct SweepConfig {
    std::vector<double> densities;       // rho a^3 per row, strictly increasing;
                                         // one leading 0 requests a free-gas smoke row
    int n_particles = 100;
    double epsilon = 0.1;                // range exponent: ell = (rho a)^{-1/2} (rho a^3)^epsilon
    std::optional<double> ell_override;  // fixed pair range instead of the derived one
    std::uint32_t n_chains = 4;
    std::uint32_t sweeps = 2000;
    std::uint32_t burn_in = 500;
    std::uint32_t block_size = 50;
    std::uint64_t seed = 1;
    std::string output_path;             // empty: stdout
    OutputFormat format = OutputFormat::kCsv;
};

struct RowProvenance {
    double epsilon = 0.0;
    int truncation_order = 0;  // M from the error budget; 0 when no budget was built
    double ell = 0.0;
    std::uint64_t seed = 0;
    double solver_residual = 0.0;
};

struct SweepRow {
    double rho_a3 = 0.0;
    double ell_over_a = 0.0;
    int n_particles = 0;
    double energy_per_particle = 0.0;
    double stderror = 0.0;
    double two_body = 0.0;
    double three_body = 0.0;
    double ratio_to_leading = 0.0;  // energy_per_particle / (4 pi rho a)
    double lhy_prediction = 0.0;    // 1 + kLhyCoefficient * sqrt(rho a^3)
    double acceptance = 0.0;
    double widom_ratio = 0.0;
    std::string status = "ok";      // "ok", "free_gas", or "error: <reason>"
    RowProvenance provenance;
};

/// Reject configurations that cannot produce a meaningful sweep.  Geometry is
/// checked up front for every density so a bad row is a config error rather
/// than a surprise after hours of sampling.
inline void validate(const SweepConfig& config) {
    if (config.densities.empty()) throw ConfigError("sweep: no densities given");
    for (std::size_t i = 0; i + 1 < config.densities.size(); ++i)
        if (!(config.densities[i] < config.densities[i + 1]))
            throw ConfigError("sweep: densities must be strictly increasing");
    for (std::size_t i = 0; i < config.densities.size(); ++i) {
        const double density = config.densities[i];
        if (density == 0.0 && i == 0) continue;  // free-gas smoke row
        if (!(density > 0.0))
            throw ConfigError(
                "sweep: densities must be positive (a single leading 0 requests the free-gas row)");
        if (!(density <= 1e-2))
            throw ConfigError("sweep: rho a^3 above 1e-2 is outside the dilute regime");
    }
    if (config.n_particles < 2) throw ConfigError("sweep: need at least two particles");
    if (!(config.epsilon > 0.0 && config.epsilon < 0.25))
        throw ConfigError("sweep: epsilon must lie in (0, 0.25)");
    if (config.n_chains < 1 || config.n_chains > 0xFFFF)
        throw ConfigError("sweep: chains must lie in [1, 65535]");
    if (config.sweeps == 0 || config.block_size == 0 || config.sweeps % config.block_size != 0)
        throw ConfigError("sweep: sweeps must be a positive multiple of block_size");
    if (static_cast<std::uint64_t>(config.sweeps / config.block_size) * config.n_chains < 2)
        throw ConfigError("sweep: need at least two measurement blocks in total");
    if (config.ell_override && !(*config.ell_override > 1.0))
        throw ConfigError("sweep: ell override must exceed the hard-core radius");
    for (double density : config.densities) {
        if (density == 0.0) continue;
        const double ell = config.ell_override ? *config.ell_override
                                               : error_budget(density, 1.0, config.epsilon).ell;
        const double box_side = std::cbrt(config.n_particles / density);
        if (!(2.0 * ell <= box_side)) {
            std::ostringstream msg;
            msg << "sweep: 2 ell = " << 2.0 * ell << " exceeds the box side " << box_side
                << " at rho a^3 = " << density << "; raise n or epsilon";
            throw ConfigError(msg.str());
        }
    }
}

namespace detail {

inline double sweep_nan() { return std::numeric_limits<double>::quiet_NaN(); }

/// The non-interacting smoke row is exact rather than sampled: with every pair
/// factor equal to one, each local-energy sample is identically zero, every
/// proposed move is accepted, and every trial insertion carries unit weight.
inline SweepRow free_gas_row(const SweepConfig& config) {
    SweepRow row;
    row.rho_a3 = 0.0;
    row.ell_over_a = sweep_nan();
    row.n_particles = config.n_particles;
    row.energy_per_particle = 0.0;
    row.stderror = 0.0;
    row.two_body = 0.0;
    row.three_body = 0.0;
    row.ratio_to_leading = sweep_nan();  // leading term vanishes with the interaction
    row.lhy_prediction = 1.0;
    row.acceptance = 1.0;
    row.widom_ratio = 1.0;
    row.status = "free_gas";
    row.provenance = {config.epsilon, 0, sweep_nan(), config.seed, 0.0};
    return row;
}

inline SweepRow measured_row(const SweepConfig& config, double density) {
    SweepRow row;
    row.rho_a3 = density;
    row.n_particles = config.n_particles;
    row.ell_over_a = sweep_nan();
    row.energy_per_particle = sweep_nan();
    row.stderror = sweep_nan();
    row.two_body = sweep_nan();
    row.three_body = sweep_nan();
    row.ratio_to_leading = sweep_nan();
    row.lhy_prediction = sweep_nan();
    row.acceptance = sweep_nan();
    row.widom_ratio = sweep_nan();
    row.provenance = {config.epsilon, 0, sweep_nan(), config.seed, sweep_nan()};
    try {
        const ErrorBudget budget = error_budget(density, 1.0, config.epsilon);
        const double ell = config.ell_override.value_or(budget.ell);
        const ScatteringSolution sol = ScatteringSolution::solve(1.0, ell);
        row.ell_over_a = ell;
        row.provenance.truncation_order = budget.M;
        row.provenance.ell = ell;
        row.provenance.solver_residual = sol.residual();

        ChainParams params;
        params.n_particles = static_cast<std::size_t>(config.n_particles);
        params.box_side = std::cbrt(config.n_particles / density);
        params.n_chains = config.n_chains;
        params.sweeps = config.sweeps;
        params.burn_in = config.burn_in;
        params.block_size = config.block_size;
        params.seed = config.seed;

        const EnergyEstimate energy = run_chain(params, sol);
        // One trial insertion per particle per sweep keeps the insertion
        // statistics in step with the system size.
        const RatioEstimate widom =
            widom_ratio(params, sol, static_cast<std::size_t>(config.n_particles));

        const double leading = 4.0 * M_PI * density;  // 4 pi rho a in units of a = 1
        row.energy_per_particle = energy.mean;
        row.stderror = energy.stderror;
        row.two_body = energy.two_body;
        row.three_body = energy.three_body;
        row.ratio_to_leading = energy.mean / leading;
        row.lhy_prediction = 1.0 + kLhyCoefficient * std::sqrt(density);
        row.acceptance = energy.acceptance;
        row.widom_ratio = widom.ratio;
        row.status = "ok";
    } catch (const std::exception& err) {
        row.status = std::string("error: ") + err.what();
    }
    return row;
}

/// Shortest round-trip decimal form; "nan" for undefined entries.
inline std::string format_double(double value) {
    char buffer[64];
    const auto result = std::to_chars(buffer, buffer + sizeof buffer, value);
    return std::string(buffer, result.ptr);
}

/// Status text goes into an unquoted CSV cell, so keep the delimiter out.
inline std::string csv_safe(std::string text) {
    std::replace(text.begin(), text.end(), ',', ';');
    std::replace(text.begin(), text.end(), '\n', ' ');
    return text;
}

}  // namespace detail

/// Run every density in order.  Row-level failures are captured in the row's
/// status field and the sweep continues; only a bad config throws.
inline std::vector<SweepRow> run_sweep(const SweepConfig& config) {
    validate(config);
    std::vector<SweepRow> rows;
    rows.reserve(config.densities.size());
    for (double density : config.densities)
        rows.push_back(density == 0.0 ? detail::free_gas_row(config)
                                      : detail::measured_row(config, density));
    return rows;
}

struct ExponentFit {
    double prefactor = 0.0;      // C in ratio = 1 + C (rho a^3)^p
    double exponent = 0.0;       // p
    double residual_norm = 0.0;  // euclidean norm of the log-log residuals
};

/// Least squares of log(ratio_to_leading - 1) against log(rho a^3), restricted
/// to rows whose excess over the leading term is resolved beyond twice its
/// standard error.
inline ExponentFit fit_exponent(const std::vector<SweepRow>& rows) {
    std::vector<double> xs;
    std::vector<double> ys;
    for (const SweepRow& row : rows) {
        if (row.status != "ok") continue;
        const double excess = row.ratio_to_leading - 1.0;
        const double sigma = row.stderror / (4.0 * M_PI * row.rho_a3);
        if (!(excess > 2.0 * sigma)) continue;
        xs.push_back(std::log(row.rho_a3));
        ys.push_back(std::log(excess));
    }
    if (xs.size() < 3)
        throw InsufficientData(
            "fit_exponent: need three rows with excess above twice its standard error");
    const auto n = static_cast<double>(xs.size());
    double mean_x = 0.0;
    double mean_y = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mean_x += xs[i];
        mean_y += ys[i];
    }
    mean_x /= n;
    mean_y /= n;
    double sxx = 0.0;
    double sxy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - mean_x) * (xs[i] - mean_x);
        sxy += (xs[i] - mean_x) * (ys[i] - mean_y);
    }
    if (!(sxx > 0.0))
        throw InsufficientData("fit_exponent: densities of the usable rows coincide");
    ExponentFit fit;
    fit.exponent = sxy / sxx;
    const double intercept = mean_y - fit.exponent * mean_x;
    fit.prefactor = std::exp(intercept);
    double sum_sq = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double r = ys[i] - (intercept + fit.exponent * xs[i]);
        sum_sq += r * r;
    }
    fit.residual_norm = std::sqrt(sum_sq);
    return fit;
}

/// CSV with '#' comment lines: one file-level line echoing the run settings,
/// then one provenance line per row, then the fixed header and data rows.
inline void write_csv(std::ostream& out, const SweepConfig& config,
                      const std::vector<SweepRow>& rows) {
    out << "# hard-sphere sweep: epsilon=" << detail::format_double(config.epsilon)
        << " n=" << config.n_particles << " chains=" << config.n_chains
        << " sweeps=" << config.sweeps << " burn_in=" << config.burn_in
        << " block_size=" << config.block_size << " seed=" << config.seed;
    if (config.ell_override)
        out << " ell_override=" << detail::format_double(*config.ell_override);
    out << "\n";
    for (const SweepRow& row : rows)
        out << "# row rho_a3=" << detail::format_double(row.rho_a3)
            << " epsilon=" << detail::format_double(row.provenance.epsilon)
            << " M=" << row.provenance.truncation_order
            << " ell=" << detail::format_double(row.provenance.ell)
            << " seed=" << row.provenance.seed
            << " residual=" << detail::format_double(row.provenance.solver_residual) << "\n";
    out << "rho_a3,ell_over_a,N,E_per_N,stderr,two_body,three_body,ratio_to_leading,"
           "lhy_prediction,acceptance,widom_ratio,status\n";
    for (const SweepRow& row : rows)
        out << detail::format_double(row.rho_a3) << ',' << detail::format_double(row.ell_over_a)
            << ',' << row.n_particles << ',' << detail::format_double(row.energy_per_particle)
            << ',' << detail::format_double(row.stderror) << ','
            << detail::format_double(row.two_body) << ',' << detail::format_double(row.three_body)
            << ',' << detail::format_double(row.ratio_to_leading) << ','
            << detail::format_double(row.lhy_prediction) << ','
            << detail::format_double(row.acceptance) << ','
            << detail::format_double(row.widom_ratio) << ',' << detail::csv_safe(row.status)
            << "\n";
}

/// JSON array of row objects with the same field names as the CSV columns plus
/// a nested provenance object.  Non-finite entries serialize as null.
inline void write_json(std::ostream& out, const std::vector<SweepRow>& rows) {
    nlohmann::ordered_json doc = nlohmann::ordered_json::array();
    for (const SweepRow& row : rows) {
        nlohmann::ordered_json obj;
        obj["rho_a3"] = row.rho_a3;
        obj["ell_over_a"] = row.ell_over_a;
        obj["N"] = row.n_particles;
        obj["E_per_N"] = row.energy_per_particle;
        obj["stderr"] = row.stderror;
        obj["two_body"] = row.two_body;
        obj["three_body"] = row.three_body;
        obj["ratio_to_leading"] = row.ratio_to_leading;
        obj["lhy_prediction"] = row.lhy_prediction;
        obj["acceptance"] = row.acceptance;
        obj["widom_ratio"] = row.widom_ratio;
        obj["status"] = row.status;
        obj["provenance"] = {{"epsilon", row.provenance.epsilon},
                             {"M", row.provenance.truncation_order},
                             {"ell", row.provenance.ell},
                             {"seed", row.provenance.seed},
                             {"residual", row.provenance.solver_residual}};
        doc.push_back(std::move(obj));
    }
    out << doc.dump(2) << "\n";
}

inline void write_rows(std::ostream& out, const SweepConfig& config,
                       const std::vector<SweepRow>& rows) {
    if (config.format == OutputFormat::kCsv)
        write_csv(out, config, rows);
    else
        write_json(out, rows);
}

namespace detail {

inline std::string trim(std::string_view text) {
    std::size_t begin = 0;
    std::size_t end = text.size();
    while (begin < end && std::isspace(static_cast<unsigned char>(text[begin]))) ++begin;
    while (end > begin && std::isspace(static_cast<unsigned char>(text[end - 1]))) --end;
    return std::string(text.substr(begin, end - begin));
}

inline double parse_double(const std::string& key, const std::string& text) {
    try {
        std::size_t used = 0;
        const double value = std::stod(text, &used);
        if (used != text.size()) throw std::invalid_argument(text);
        return value;
    } catch (const std::exception&) {
        throw ConfigError("config: bad numeric value for '" + key + "': " + text);
    }
}

inline std::uint64_t parse_unsigned(const std::string& key, const std::string& text,
                                    std::uint64_t max_value) {
    if (!text.empty() && text[0] == '-')
        throw ConfigError("config: '" + key + "' must be non-negative: " + text);
    std::uint64_t value = 0;
    try {
        std::size_t used = 0;
        value = std::stoull(text, &used);
        if (used != text.size()) throw std::invalid_argument(text);
    } catch (const std::exception&) {
        throw ConfigError("config: bad integer value for '" + key + "': " + text);
    }
    if (value > max_value)
        throw ConfigError("config: '" + key + "' out of range: " + text);
    return value;
}

inline void apply_config_entry(SweepConfig& config, const std::string& key,
                               const std::string& value) {
    constexpr std::uint64_t kMax32 = 0xFFFFFFFFull;
    if (key == "density") {
        config.densities.push_back(parse_double(key, value));
    } else if (key == "densities") {
        std::stringstream parts(value);
        std::string item;
        while (std::getline(parts, item, ',')) {
            const std::string entry = trim(item);
            if (entry.empty()) throw ConfigError("config: empty entry in 'densities'");
            config.densities.push_back(parse_double(key, entry));
        }
    } else if (key == "n") {
        config.n_particles = static_cast<int>(parse_unsigned(key, value, 100000000));
    } else if (key == "epsilon") {
        config.epsilon = parse_double(key, value);
    } else if (key == "ell") {
        config.ell_override = parse_double(key, value);
    } else if (key == "chains") {
        config.n_chains = static_cast<std::uint32_t>(parse_unsigned(key, value, kMax32));
    } else if (key == "sweeps") {
        config.sweeps = static_cast<std::uint32_t>(parse_unsigned(key, value, kMax32));
    } else if (key == "burn_in") {
        config.burn_in = static_cast<std::uint32_t>(parse_unsigned(key, value, kMax32));
    } else if (key == "block_size") {
        config.block_size = static_cast<std::uint32_t>(parse_unsigned(key, value, kMax32));
    } else if (key == "seed") {
        config.seed = parse_unsigned(key, value, 0xFFFFFFFFFFFFFFFFull);
    } else if (key == "out") {
        config.output_path = value;
    } else if (key == "format") {
        if (value == "csv")
            config.format = OutputFormat::kCsv;
        else if (value == "json")
            config.format = OutputFormat::kJson;
        else
            throw ConfigError("config: format must be 'csv' or 'json', got '" + value + "'");
    } else {
        throw ConfigError("config: unknown key '" + key + "'");
    }
}

}  // namespace detail

/// Flat `key = value` text, one entry per line; '#' starts a comment.  The
/// keys mirror the command-line flags; `density` lines append to the list and
/// `densities` takes a comma-separated list.
inline SweepConfig parse_config(std::istream& in) {
    SweepConfig config;
    config.densities.clear();
    std::string line;
    int line_number = 0;
    while (std::getline(in, line)) {
        ++line_number;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const std::string text = detail::trim(line);
        if (text.empty()) continue;
        const std::size_t eq = text.find('=');
        std::string key;
        std::string value;
        if (eq != std::string::npos) {
            key = detail::trim(text.substr(0, eq));
            value = detail::trim(text.substr(eq + 1));
        }
        if (key.empty() || value.empty())
            throw ConfigError("config line " + std::to_string(line_number) +
                              ": expected 'key = value'");
        detail::apply_config_entry(config, key, value);
    }
    return config;
}

}  // namespace hsvmc
