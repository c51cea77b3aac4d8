#pragma once

// Pair-product trial state and its local energy.
//
// The weight of a configuration X is |Psi(X)|^2 with
// Psi = prod_{i<j} f(|x_i - x_j|), f the scattering profile.  The local
// energy sum_j (-Delta_j Psi)/Psi splits into
//
//   two_body   = lambda * #{ordered pairs with r < ell}
//   three_body = sum_j [ |sum_i eta_ji|^2 - sum_i |eta_ji|^2 ]
//   total      = two_body - three_body
//
// with eta_ji = (f'(r_ji)/f(r_ji)) * unit(x_j - x_i).  The cross term uses
// the vector identity above, costing O(N * neighbours) instead of O(N^3).
//
// Per-particle and per-pair contributions are accumulated in sorted order, so
// both quantities are exactly invariant under particle relabelling.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "hsvmc/configuration.hpp"
#include "hsvmc/errors.hpp"
#include "hsvmc/scattering.hpp"

namespace hsvmc {

/// Below this the profile is treated as an overlap; f'/f would overflow.
inline constexpr double kMinProfile = 1e-30;

struct LocalEnergy {
    double two_body = 0.0;
    double three_body = 0.0;
    double total = 0.0;
    std::size_t pairs_in_range = 0;  // unordered pairs with r < ell
};

namespace detail {

/// Sum after sorting by value: the result depends only on the multiset of
/// terms, not on the order they were produced in.
inline double stable_sum(std::vector<double>& terms) {
    std::sort(terms.begin(), terms.end());
    double s = 0.0;
    for (double t : terms) s += t;
    return s;
}

/// The candidate search must reach at least to the interaction range, or
/// in-range pairs could be skipped when the cell stencil is active.
inline void check_reach(const Configuration& config, const ScatteringSolution& sol,
                        const char* where) {
    if (sol.is_free()) return;  // no pair factors: any geometry is fine
    if (2.0 * sol.range() > config.box().side())
        throw GeometryError(std::string(where) + ": need 2 ell <= box side");
    if (config.cutoff() < sol.range())
        throw GeometryError(std::string(where) + ": candidate cutoff below interaction range");
}

}  // namespace detail

/// log |Psi|^2 = sum_{pairs, r < ell} 2 ln f(r); -inf when any pair overlaps.
inline double log_weight(const Configuration& config, const ScatteringSolution& sol) {
    detail::check_reach(config, sol, "log_weight");
    const double ell = sol.range();
    std::vector<double> terms;
    bool overlap = false;
    for (std::size_t i = 0; i < config.size() && !overlap; ++i) {
        config.for_each_candidate(i, [&](std::size_t j) {
            if (j <= i || overlap) return;
            const double r = config.box().distance(config.position(i), config.position(j));
            if (r >= ell) return;
            const double f = sol.f(r);
            if (f < kMinProfile) {
                overlap = true;
                return;
            }
            terms.push_back(2.0 * std::log(f));
        });
    }
    if (overlap) return -std::numeric_limits<double>::infinity();
    return detail::stable_sum(terms);
}

/// Change of log_weight when particle i moves to new_pos; -inf on overlap.
inline double delta_log_weight(const Configuration& config, const ScatteringSolution& sol,
                               std::size_t i, Vec3 new_pos) {
    detail::check_reach(config, sol, "delta_log_weight");
    const double ell = sol.range();
    double delta = 0.0;
    bool overlap = false;
    config.for_each_candidate_near(new_pos, [&](std::size_t j) {
        if (j == i || overlap) return;
        const double r = config.box().distance(new_pos, config.position(j));
        if (r >= ell) return;
        const double f = sol.f(r);
        if (f < kMinProfile) {
            overlap = true;
            return;
        }
        delta += 2.0 * std::log(f);
    });
    if (overlap) return -std::numeric_limits<double>::infinity();
    config.for_each_candidate(i, [&](std::size_t j) {
        const double r = config.box().distance(config.position(i), config.position(j));
        if (r >= ell) return;
        delta -= 2.0 * std::log(sol.f(r));
    });
    return delta;
}

/// Local energy of the configuration.  Throws OverlapError if any pair sits
/// inside the hard core (the weight there is zero, the estimator undefined).
inline LocalEnergy local_energy(const Configuration& config, const ScatteringSolution& sol) {
    detail::check_reach(config, sol, "local_energy");
    const double ell = sol.range();
    LocalEnergy out;
    std::size_t ordered_in_range = 0;

    std::vector<double> cross_terms;
    std::vector<Vec3> etas;
    std::vector<double> eta_sq;
    cross_terms.reserve(config.size());
    for (std::size_t j = 0; j < config.size(); ++j) {
        etas.clear();
        eta_sq.clear();
        config.for_each_candidate(j, [&](std::size_t i) {
            const Vec3 d = config.box().min_image(config.position(j), config.position(i));
            const double r2 = d.norm2();
            if (r2 >= ell * ell) return;
            const double r = std::sqrt(r2);
            const double f = sol.f(r);
            if (f < kMinProfile) throw OverlapError("local_energy: overlapping pair");
            ++ordered_in_range;
            const double w = sol.fprime(r) / (f * r);
            const Vec3 eta = w * d;
            etas.push_back(eta);
            eta_sq.push_back(eta.norm2());
        });
        if (etas.empty()) continue;
        // Canonical order: the per-particle sums see a label-free sequence.
        std::sort(etas.begin(), etas.end(), [](const Vec3& a, const Vec3& b) {
            if (a.x != b.x) return a.x < b.x;
            if (a.y != b.y) return a.y < b.y;
            return a.z < b.z;
        });
        Vec3 eta_sum;
        for (const Vec3& e : etas) eta_sum = eta_sum + e;
        cross_terms.push_back(eta_sum.norm2() - detail::stable_sum(eta_sq));
    }
    out.pairs_in_range = ordered_in_range / 2;
    out.two_body = sol.lambda() * double(ordered_in_range);
    out.three_body = detail::stable_sum(cross_terms);
    out.total = out.two_body - out.three_body;
    return out;
}

/// Cross term by the naive triple loop; reference route for the vector
/// identity used in local_energy.
inline double three_body_naive(const Configuration& config, const ScatteringSolution& sol) {
    const double ell = sol.range();
    const std::size_t n = config.size();
    double cross = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t i = 0; i < n; ++i) {
            if (i == j) continue;
            for (std::size_t m = 0; m < n; ++m) {
                if (m == j || m == i) continue;
                const Vec3 di = config.box().min_image(config.position(j), config.position(i));
                const Vec3 dm = config.box().min_image(config.position(j), config.position(m));
                const double ri = di.norm(), rm = dm.norm();
                if (ri >= ell || rm >= ell) continue;
                const double wi = sol.fprime(ri) / (sol.f(ri) * ri);
                const double wm = sol.fprime(rm) / (sol.f(rm) * rm);
                cross += wi * wm * di.dot(dm);
            }
        }
    }
    return cross;
}

}  // namespace hsvmc
