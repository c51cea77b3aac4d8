#pragma once

// Metropolis sampling of the pair-product ground-state trial density on the
// torus, with blocked error bars and a particle-insertion ratio estimator.
//
// Every random number is drawn by counter (seed, chain, purpose, sweep, slot),
// so a run is a pure function of its parameters: re-running with the same
// seed reproduces every trajectory bit for bit, and chains never share
// stream state no matter how they are scheduled.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "hsvmc/blocking.hpp"
#include "hsvmc/configuration.hpp"
#include "hsvmc/errors.hpp"
#include "hsvmc/geometry.hpp"
#include "hsvmc/jastrow.hpp"
#include "hsvmc/rng.hpp"
#include "hsvmc/scattering.hpp"

namespace hsvmc {

struct ChainParams {
    std::size_t n_particles = 0;
    double box_side = 0.0;
    std::uint32_t n_chains = 4;
    std::uint32_t sweeps = 2000;    // measured sweeps per chain
    std::uint32_t burn_in = 500;    // discarded sweeps per chain
    std::size_t block_size = 50;    // sweeps per block
    std::uint64_t seed = 1;
    double step_size = 0.0;         // 0 = choose from geometry, then auto-tune
    bool tune_step = true;          // adjust step during burn-in only
};

struct EnergyEstimate {
    double mean = 0.0;              // energy per particle; equals two_body - three_body
    double stderror = 0.0;
    double two_body = 0.0;          // per-particle block averages of the two estimator parts
    double three_body = 0.0;
    double acceptance = 0.0;        // acceptance rate over measured sweeps
    double step_size = 0.0;         // step actually used after tuning
    std::size_t n_blocks = 0;
    bool acceptance_warning = false;  // rate outside [0.2, 0.8]
    bool blocking_converged = false;
};

struct RatioEstimate {
    double ratio = 0.0;
    double stderror = 0.0;
    double acceptance = 0.0;
    std::size_t n_blocks = 0;
    bool acceptance_warning = false;
    bool blocking_converged = false;
};

/// Metropolis acceptance probability for a proposed log-weight change.
inline double acceptance_probability(double delta_log_weight) {
    if (delta_log_weight >= 0.0) return 1.0;
    return std::exp(delta_log_weight);
}

namespace detail {

inline void check_chain_params(const ChainParams& p) {
    if (p.n_particles == 0) throw DomainError("sampler: need at least one particle");
    if (!(p.box_side > 0.0)) throw GeometryError("sampler: box side must be positive");
    if (p.n_chains == 0) throw DomainError("sampler: need at least one chain");
    if (p.n_chains > 0xFFFF) throw DomainError("sampler: chain count exceeds stream capacity");
    if (p.sweeps == 0) throw DomainError("sampler: need at least one measured sweep");
    if (p.block_size == 0) throw DomainError("sampler: block size must be positive");
    if (p.sweeps % p.block_size != 0)
        throw DomainError("sampler: sweeps must be a multiple of the block size");
    const std::size_t blocks_total = std::size_t(p.sweeps / p.block_size) * p.n_chains;
    if (blocks_total < 2) throw DomainError("sampler: need at least two blocks for an error bar");
    if (p.step_size < 0.0) throw DomainError("sampler: step size must be non-negative");
}

inline double default_step(const ChainParams& p, const ScatteringSolution& sol) {
    // Half the smaller of the pair range and the mean spacing: close enough
    // for the burn-in tuner to finish the job.
    const double per_side = std::ceil(std::cbrt(double(p.n_particles)));
    const double spacing = p.box_side / std::max(1.0, per_side);
    const double range = sol.is_free() ? spacing : sol.range();
    return 0.5 * std::min(range, spacing);
}

}  // namespace detail

/// One Metropolis sweep: each particle in turn gets a uniform cube
/// displacement of half-width `step`, accepted with probability
/// min(1, W(new)/W(old)).  Returns the number of accepted moves.
/// `sweep_index` must be globally unique within the chain (burn-in included)
/// so that no counter is ever reused.
inline std::size_t metropolis_sweep(Configuration& config, const ScatteringSolution& sol,
                                    std::uint64_t seed, std::uint32_t chain,
                                    std::uint32_t sweep_index, double step) {
    std::size_t accepted = 0;
    const std::size_t n = config.size();
    for (std::size_t i = 0; i < n; ++i) {
        const auto slot = std::uint32_t(i);
        const auto d01 = uniform_pair(seed, chain, RandPurpose::kMove, sweep_index, slot, 0);
        const auto d23 = uniform_pair(seed, chain, RandPurpose::kMove, sweep_index, slot, 1);
        const Vec3 old_pos = config.position(i);
        const Vec3 new_pos{old_pos.x + step * (2.0 * d01.first - 1.0),
                           old_pos.y + step * (2.0 * d01.second - 1.0),
                           old_pos.z + step * (2.0 * d23.first - 1.0)};
        const double delta = delta_log_weight(config, sol, i, new_pos);
        if (d23.second < acceptance_probability(delta)) {
            config.set_position(i, new_pos);
            ++accepted;
        }
    }
    return accepted;
}

namespace detail {

struct ChainTrace {
    std::vector<double> total_blocks;
    std::vector<double> two_blocks;
    std::vector<double> three_blocks;
    std::size_t accepted = 0;
    std::size_t proposed = 0;
    double step = 0.0;
};

// Burn in, optionally tuning the step toward ~50% acceptance, then measure
// the per-particle local energy once per sweep.
inline ChainTrace run_single_chain(const ChainParams& p, const ScatteringSolution& sol,
                                   std::uint32_t chain) {
    const SimulationBox box(p.box_side);
    const double cutoff = sol.is_free() ? 0.25 * p.box_side : sol.range();
    Configuration config =
        init_configuration(box, p.n_particles, sol.hard_core(), cutoff, p.seed, chain);

    double step = p.step_size > 0.0 ? p.step_size : default_step(p, sol);
    const double step_min = 1e-9 * p.box_side;
    const double step_max = 0.45 * p.box_side;
    step = std::clamp(step, step_min, step_max);

    // Burn-in: adjust the step in windows so the measured phase runs near the
    // 0.45..0.55 acceptance band, then freeze it.
    const std::uint32_t window = std::max<std::uint32_t>(1, std::min<std::uint32_t>(50, p.burn_in));
    std::size_t window_accepted = 0;
    std::uint32_t window_sweeps = 0;
    for (std::uint32_t s = 0; s < p.burn_in; ++s) {
        window_accepted += metropolis_sweep(config, sol, p.seed, chain, s, step);
        if (p.tune_step && ++window_sweeps == window) {
            const double rate =
                double(window_accepted) / double(std::size_t(window) * p.n_particles);
            if (rate > 0.55) step = std::min(step * 1.15, step_max);
            else if (rate < 0.45) step = std::max(step / 1.15, step_min);
            window_accepted = 0;
            window_sweeps = 0;
        }
    }

    ChainTrace trace;
    trace.step = step;
    BlockAccumulator total_acc(p.block_size), two_acc(p.block_size), three_acc(p.block_size);
    const double inv_n = 1.0 / double(p.n_particles);
    for (std::uint32_t s = 0; s < p.sweeps; ++s) {
        trace.accepted += metropolis_sweep(config, sol, p.seed, chain, p.burn_in + s, step);
        const LocalEnergy e = local_energy(config, sol);
        total_acc.add(e.total * inv_n);
        two_acc.add(e.two_body * inv_n);
        three_acc.add(e.three_body * inv_n);
    }
    trace.proposed = std::size_t(p.sweeps) * p.n_particles;
    trace.total_blocks = total_acc.block_means();
    trace.two_blocks = two_acc.block_means();
    trace.three_blocks = three_acc.block_means();
    return trace;
}

}  // namespace detail

/// Runs `n_chains` independent chains and merges their block means in chain
/// order.  The reported mean is `two_body - three_body` by construction, so
/// the decomposition always recombines exactly.
inline EnergyEstimate run_chain(const ChainParams& p, const ScatteringSolution& sol) {
    detail::check_chain_params(p);
    std::vector<double> total_blocks, two_blocks, three_blocks;
    std::size_t accepted = 0, proposed = 0;
    double step_sum = 0.0;
    for (std::uint32_t c = 0; c < p.n_chains; ++c) {
        detail::ChainTrace t = detail::run_single_chain(p, sol, c);
        total_blocks.insert(total_blocks.end(), t.total_blocks.begin(), t.total_blocks.end());
        two_blocks.insert(two_blocks.end(), t.two_blocks.begin(), t.two_blocks.end());
        three_blocks.insert(three_blocks.end(), t.three_blocks.begin(), t.three_blocks.end());
        accepted += t.accepted;
        proposed += t.proposed;
        step_sum += t.step;
    }
    const BlockingResult total = blocking_analysis(total_blocks);
    const BlockingResult two = blocking_analysis(two_blocks);
    const BlockingResult three = blocking_analysis(three_blocks);

    EnergyEstimate est;
    est.two_body = two.mean;
    est.three_body = three.mean;
    est.mean = est.two_body - est.three_body;
    est.stderror = total.stderror;
    est.acceptance = double(accepted) / double(proposed);
    est.step_size = step_sum / double(p.n_chains);
    est.n_blocks = total.n_blocks;
    est.acceptance_warning = est.acceptance < 0.2 || est.acceptance > 0.8;
    est.blocking_converged = total.converged;
    return est;
}

/// Ratio of configurational partition functions Z_N / (Z_{N-1} |Λ|) by test
/// insertion: a chain samples N-1 interacting particles, and each sweep
/// averages the product of pair weights f² between a uniformly drawn ghost
/// position and all N-1 particles.  For the free profile every insertion
/// weight is exactly 1.
inline RatioEstimate widom_ratio(const ChainParams& p, const ScatteringSolution& sol,
                                 std::size_t n_insertions) {
    if (p.n_particles < 2)
        throw DomainError("widom: need at least two particles in the target system");
    if (n_insertions == 0) throw DomainError("widom: need at least one insertion per sweep");
    ChainParams q = p;
    q.n_particles = p.n_particles - 1;
    detail::check_chain_params(q);

    const SimulationBox box(q.box_side);
    const double cutoff = sol.is_free() ? 0.25 * q.box_side : sol.range();
    std::vector<double> blocks;
    std::size_t accepted = 0, proposed = 0;
    for (std::uint32_t c = 0; c < q.n_chains; ++c) {
        Configuration config =
            init_configuration(box, q.n_particles, sol.hard_core(), cutoff, q.seed, c);
        double step = q.step_size > 0.0 ? q.step_size : detail::default_step(q, sol);
        const double step_min = 1e-9 * q.box_side;
        const double step_max = 0.45 * q.box_side;
        step = std::clamp(step, step_min, step_max);

        const std::uint32_t window =
            std::max<std::uint32_t>(1, std::min<std::uint32_t>(50, q.burn_in));
        std::size_t window_accepted = 0;
        std::uint32_t window_sweeps = 0;
        for (std::uint32_t s = 0; s < q.burn_in; ++s) {
            window_accepted += metropolis_sweep(config, sol, q.seed, c, s, step);
            if (q.tune_step && ++window_sweeps == window) {
                const double rate =
                    double(window_accepted) / double(std::size_t(window) * q.n_particles);
                if (rate > 0.55) step = std::min(step * 1.15, step_max);
                else if (rate < 0.45) step = std::max(step / 1.15, step_min);
                window_accepted = 0;
                window_sweeps = 0;
            }
        }

        BlockAccumulator acc(q.block_size);
        const double half = 0.5 * q.box_side;
        for (std::uint32_t s = 0; s < q.sweeps; ++s) {
            accepted += metropolis_sweep(config, sol, q.seed, c, q.burn_in + s, step);
            double sweep_sum = 0.0;
            for (std::size_t ins = 0; ins < n_insertions; ++ins) {
                const std::uint32_t global_sweep = q.burn_in + s;
                const auto slot = std::uint32_t(ins);
                const auto g01 =
                    uniform_pair(q.seed, c, RandPurpose::kWidom, global_sweep, slot, 0);
                const auto g23 =
                    uniform_pair(q.seed, c, RandPurpose::kWidom, global_sweep, slot, 1);
                const Vec3 ghost{(2.0 * g01.first - 1.0) * half,
                                 (2.0 * g01.second - 1.0) * half,
                                 (2.0 * g23.first - 1.0) * half};
                double weight = 1.0;
                config.for_each_candidate_near(ghost, [&](std::size_t j) {
                    const double r = box.distance(ghost, config.position(j));
                    const double fj = sol.f(r);
                    weight *= fj * fj;
                });
                sweep_sum += weight;
            }
            acc.add(sweep_sum / double(n_insertions));
        }
        proposed += std::size_t(q.sweeps) * q.n_particles;
        blocks.insert(blocks.end(), acc.block_means().begin(), acc.block_means().end());
    }

    const BlockingResult b = blocking_analysis(blocks);
    RatioEstimate est;
    est.ratio = b.mean;
    est.stderror = b.stderror;
    est.acceptance = double(accepted) / double(proposed);
    est.n_blocks = b.n_blocks;
    est.acceptance_warning = est.acceptance < 0.2 || est.acceptance > 0.8;
    est.blocking_converged = b.converged;
    return est;
}

}  // namespace hsvmc
