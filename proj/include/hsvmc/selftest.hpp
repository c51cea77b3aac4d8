#pragma once
// Built-in verification suite.  Every check is deterministic, prints one
// [PASS]/[FAIL] line with a short measurement summary, and returns its result
// so callers can aggregate.  The fast set backs the command-line --selftest
// flag; the two long-running checks (insertion-ratio bound and the
// energy-scaling sweep) are exposed separately for the acceptance runner.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "hsvmc/cluster.hpp"
#include "hsvmc/configuration.hpp"
#include "hsvmc/errors.hpp"
#include "hsvmc/geometry.hpp"
#include "hsvmc/jastrow.hpp"
#include "hsvmc/oracle.hpp"
#include "hsvmc/rng.hpp"
#include "hsvmc/sampler.hpp"
#include "hsvmc/scattering.hpp"
#include "hsvmc/sweep.hpp"

namespace hsvmc {

struct CheckResult {
    std::string name;
    bool passed = false;
    double seconds = 0.0;
    std::string detail;
};

namespace detail {

// Frozen calibration constants.  The profile bounds were measured over
// a/ell <= 0.1 grids and rounded up; the insertion constant bounds the decay
// of the partition ratio per unit of rho*a*ell^2.
inline constexpr double kProfileOmegaBound = 1.05;  // (1 - f(r)) r / a
inline constexpr double kProfileGradBound = 1.25;   // |f'(r)| r^2 / a
inline constexpr double kInsertionDecay = 2.6;      // K in 1 - K rho a ell^2

inline double least_squares_slope(const std::vector<double>& xs, const std::vector<double>& ys) {
    const auto n = static_cast<double>(xs.size());
    double mean_x = 0.0, mean_y = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mean_x += xs[i];
        mean_y += ys[i];
    }
    mean_x /= n;
    mean_y /= n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - mean_x) * (xs[i] - mean_x);
        sxy += (xs[i] - mean_x) * (ys[i] - mean_y);
    }
    return sxy / sxx;
}

/// Random non-overlapping configuration for the identity checks.  A margin
/// above the hard core avoids the zero-weight region and an optional gap
/// around r = ell keeps finite differences away from the derivative kink.
inline Configuration random_dilute_config(const SimulationBox& box, std::size_t n, double a,
                                          double ell, std::uint32_t tag, double margin,
                                          double kink_gap) {
    std::vector<Vec3> positions;
    std::uint32_t draw = 0;
    while (positions.size() < n) {
        const auto ab = uniform_pair(9001, 0, RandPurpose::kTest, tag, draw, 0);
        const auto cd = uniform_pair(9001, 0, RandPurpose::kTest, tag, draw, 1);
        ++draw;
        if (draw > 200000)
            throw NonConvergence("selftest: dilute configuration rejection stalled");
        const Vec3 cand = {(ab.first - 0.5) * box.side(), (ab.second - 0.5) * box.side(),
                           (cd.first - 0.5) * box.side()};
        bool ok = true;
        for (const auto& p : positions) {
            const double r = box.distance(cand, p);
            if (r <= margin * a || std::abs(r - ell) < kink_gap * ell) {
                ok = false;
                break;
            }
        }
        if (ok) positions.push_back(cand);
    }
    return Configuration(box, std::move(positions), ell);
}

/// Second-order finite differences of log Psi = log_weight / 2:
/// sum_j -Delta_j Psi / Psi = -sum_{j,axis} [phi'' + (phi')^2].
inline double fd_local_energy(Configuration config, const ScatteringSolution& sol, double h) {
    const double phi0 = 0.5 * log_weight(config, sol);
    double total = 0.0;
    for (std::size_t j = 0; j < config.size(); ++j) {
        const Vec3 orig = config.position(j);
        for (int axis = 0; axis < 3; ++axis) {
            Vec3 plus = orig, minus = orig;
            (axis == 0 ? plus.x : axis == 1 ? plus.y : plus.z) += h;
            (axis == 0 ? minus.x : axis == 1 ? minus.y : minus.z) -= h;
            config.set_position(j, plus);
            const double phip = 0.5 * log_weight(config, sol);
            config.set_position(j, minus);
            const double phim = 0.5 * log_weight(config, sol);
            config.set_position(j, orig);
            const double d2 = (phip - 2.0 * phi0 + phim) / (h * h);
            const double d1 = (phip - phim) / (2.0 * h);
            total -= d2 + d1 * d1;
        }
    }
    return total;
}

template <typename Body>
CheckResult timed_check(const std::string& name, std::ostream& out, Body&& body) {
    CheckResult result;
    result.name = name;
    const auto start = std::chrono::steady_clock::now();
    try {
        std::ostringstream info;
        result.passed = body(info);
        result.detail = info.str();
    } catch (const std::exception& err) {
        result.passed = false;
        result.detail = std::string("exception: ") + err.what();
    }
    result.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    out << (result.passed ? "[PASS] " : "[FAIL] ") << result.name;
    if (!result.detail.empty()) out << ": " << result.detail;
    out << "  (" << std::fixed << std::setprecision(2) << result.seconds << " s)\n"
        << std::defaultfloat;
    return result;
}

}  // namespace detail

/// Eigenvalue asymptotics: lambda ell^3 / (3a) -> 1 with a first-order
/// deviation in a/ell, so the bound is 3 a/ell and the log-log slope is one.
inline CheckResult check_scattering_eigenvalue(std::ostream& out) {
    return detail::timed_check("scattering eigenvalue asymptotics", out, [](std::ostream& info) {
        bool ok = true;
        double worst = 0.0;
        std::vector<double> xs, ys;
        for (double ratio : {0.01, 0.02, 0.05}) {
            const auto sol = ScatteringSolution::solve(1.0, 1.0 / ratio);
            const double ell = sol.range();
            const double deviation = std::abs(sol.lambda() * ell * ell * ell / 3.0 - 1.0);
            ok = ok && deviation <= 3.0 * ratio;
            worst = std::max(worst, deviation / (3.0 * ratio));
            xs.push_back(std::log(ratio));
            ys.push_back(std::log(deviation));
        }
        const double slope = detail::least_squares_slope(xs, ys);
        ok = ok && slope >= 0.8 && slope <= 1.2;
        info << "worst deviation " << worst << " of the 3 a/ell allowance, slope " << slope;
        return ok;
    });
}

/// The closed-form profile must agree with an independent Runge-Kutta
/// shooting integration of the radial equation at the solved eigenvalue.
inline CheckResult check_profile_vs_shooting(std::ostream& out) {
    return detail::timed_check("pair profile vs shooting integration", out,
                               [](std::ostream& info) {
                                   const auto sol = ScatteringSolution::solve(1.0, 10.0);
                                   const auto shot = ode_shooting_f(1.0, 10.0, sol.lambda(), 1000);
                                   double worst = 0.0;
                                   for (std::size_t i = 1; i < shot.r.size(); ++i) {
                                       const double rel =
                                           std::abs(sol.f(shot.r[i]) - shot.f[i]) / shot.f[i];
                                       worst = std::max(worst, rel);
                                   }
                                   info << "max relative deviation " << worst << " on "
                                        << shot.r.size() - 1 << " grid points";
                                   return worst <= 1e-6;
                               });
}

/// Pointwise profile bounds: 0 <= f <= 1, and the hole (1 - f) r / a and the
/// slope |f'| r^2 / a stay below the frozen constants for a/ell <= 0.1.
inline CheckResult check_profile_bounds(std::ostream& out) {
    return detail::timed_check("pair profile pointwise bounds", out, [](std::ostream& info) {
        bool ok = true;
        double worst_omega = 0.0, worst_grad = 0.0;
        for (double ratio : {0.02, 0.05, 0.1}) {
            const auto sol = ScatteringSolution::solve(1.0, 1.0 / ratio);
            const double a = sol.hard_core(), ell = sol.range();
            for (int i = 0; i < 2000; ++i) {
                const double r = a + (i + 0.5) / 2000.0 * (ell - a);
                const double f = sol.f(r);
                ok = ok && f >= 0.0 && f <= 1.0;
                worst_omega = std::max(worst_omega, (1.0 - f) * r / a);
                worst_grad = std::max(worst_grad, std::abs(sol.fprime(r)) * r * r / a);
            }
            ok = ok && sol.f(1.5 * ell) == 1.0 && sol.fprime(1.5 * ell) == 0.0;
        }
        ok = ok && worst_omega <= detail::kProfileOmegaBound &&
             worst_grad <= detail::kProfileGradBound;
        info << "max (1-f) r/a = " << worst_omega << " (bound " << detail::kProfileOmegaBound
             << "), max |f'| r^2/a = " << worst_grad << " (bound " << detail::kProfileGradBound
             << ")";
        return ok;
    });
}

/// The local energy must equal finite differences of the sampled weight, and
/// the O(N^2) pair-sum form of the cross term must equal the naive O(N^3)
/// triple loop.
inline CheckResult check_local_energy_identity(std::ostream& out) {
    return detail::timed_check("local energy identity", out, [](std::ostream& info) {
        const auto sol = solve_neumann(1.0, 5.0);
        const SimulationBox box(12.0);
        const double h = 1e-5 * sol.range();
        bool ok = true;
        double worst_fd = 0.0;
        int checked = 0;
        for (std::uint32_t tag = 0; checked < 1000; ++tag) {
            if (tag > 20000) return false;
            const std::size_t n = 3 + tag % 8;
            Configuration config =
                detail::random_dilute_config(box, n, 1.0, 5.0, 1000 + tag, 1.4, 1e-3);
            const auto e = local_energy(config, sol);
            if (e.pairs_in_range == 0) continue;
            ++checked;
            const double fd = detail::fd_local_energy(config, sol, h);
            const double rel = std::abs(e.total - fd) / std::max(std::abs(fd), sol.lambda());
            worst_fd = std::max(worst_fd, rel);
            ok = ok && rel < 1e-3;
        }
        double worst_naive = 0.0;
        const SimulationBox wide(14.0);
        for (std::size_t n : {std::size_t(5), std::size_t(12), std::size_t(30)}) {
            for (std::uint32_t tag = 0;; ++tag) {
                if (tag > 50) return false;
                Configuration config = detail::random_dilute_config(
                    wide, n, 1.0, 5.0, 60000 + 100 * std::uint32_t(n) + tag, 1.4, 1e-3);
                const auto e = local_energy(config, sol);
                if (e.three_body == 0.0) continue;
                const double naive = three_body_naive(config, sol);
                const double rel = std::abs(e.three_body - naive) /
                                   std::max({std::abs(naive), std::abs(e.two_body), 1e-12});
                worst_naive = std::max(worst_naive, rel);
                ok = ok && rel <= 1e-10;
                break;
            }
        }
        info << "finite differences: worst rel " << worst_fd << " over " << checked
             << " configurations; pair-sum vs triple loop: worst rel " << worst_naive;
        return ok;
    });
}

/// Sampled two- and three-particle energies against deterministic oracles:
/// exact quadrature at N = 2 and shifted quasi-random integration at N = 3.
inline CheckResult check_few_body_energies(std::ostream& out) {
    return detail::timed_check("few-body energies vs integration oracles", out,
                               [](std::ostream& info) {
                                   const auto sol = ScatteringSolution::solve(1.0, 5.0);
                                   const auto quad = quad_two_body(sol, 12.0);

                                   ChainParams p2;
                                   p2.n_particles = 2;
                                   p2.box_side = 12.0;
                                   p2.n_chains = 4;
                                   p2.sweeps = 40000;
                                   p2.burn_in = 500;
                                   p2.block_size = 50;
                                   p2.seed = 2025;
                                   const EnergyEstimate est2 = run_chain(p2, sol);
                                   const double dev2 = (est2.mean - quad.value) / est2.stderror;
                                   bool ok = std::abs(est2.mean - quad.value) <=
                                             3.0 * est2.stderror;
                                   ok = ok && est2.stderror <= 0.01 * quad.value;

                                   ChainParams p3 = p2;
                                   p3.n_particles = 3;
                                   p3.sweeps = 20000;
                                   p3.seed = 71;
                                   const EnergyEstimate est3 = run_chain(p3, sol);
                                   const ThreeBodyReference ref =
                                       brute_force_n3(1.0, 5.0, 12.0, 200000, 8, 5);
                                   const double sigma3 = std::sqrt(est3.stderror * est3.stderror +
                                                                   ref.est_error * ref.est_error);
                                   const double dev3 =
                                       (est3.mean - ref.energy_per_particle) / sigma3;
                                   ok = ok && std::abs(est3.mean - ref.energy_per_particle) <=
                                                  3.0 * sigma3;

                                   info << "N=2 within " << std::abs(dev2)
                                        << " sigma (stderr/value = " << est2.stderror / quad.value
                                        << "); N=3 within " << std::abs(dev3)
                                        << " combined sigma";
                                   return ok;
                               });
}

/// Expansion coefficients: closed forms at orders three and four against full
/// enumeration, and invariance in the truncation order M for k <= M + 2.
inline CheckResult check_cluster_coefficients(std::ostream& out) {
    return detail::timed_check("cluster coefficient identities", out, [](std::ostream& info) {
        bool ok = true;
        for (std::int64_t n = 4; n <= 40; ++n) {
            const BigInt a3 = alpha_coefficient(3, 4, n).value;
            const BigInt a4 = alpha_coefficient(4, 4, n).value;
            ok = ok && a3 == BigInt(-2) * (n - 2);
            ok = ok && a4 == BigInt(4) * (n - 2) * (n - 3);
            ok = ok && a3 == alpha_by_compositions(3, 4, n);
            ok = ok && a4 == alpha_by_compositions(4, 4, n);
        }
        int pairs = 0;
        for (int m = 1; m + 2 <= 10; ++m)
            for (int k = 3; k <= m + 2; ++k)
                for (std::int64_t n : {std::int64_t(12), std::int64_t(40)}) {
                    ok = ok &&
                         alpha_coefficient(k, m, n).value == alpha_coefficient(k, m + 1, n).value;
                    ++pairs;
                }
        info << "closed forms for 4 <= N <= 40; " << pairs << " truncation-invariance pairs";
        return ok;
    });
}

/// Alternating partial sums of the expanded pair product must sandwich the
/// full product on random dilute configurations.
inline CheckResult check_truncation_sandwich(std::ostream& out) {
    return detail::timed_check("truncation sandwich", out, [](std::ostream& info) {
        const auto sol = ScatteringSolution::solve(1.0, 6.0);
        const SimulationBox box(16.0);
        long violations = 0;
        long active = 0;
        for (std::uint32_t index = 0; index < 10000; ++index) {
            Configuration config =
                detail::random_dilute_config(box, 12, 1.0, 6.0, 100000 + index, 1.05, 0.0);
            for (std::size_t row : {std::size_t(0), std::size_t(5)}) {
                const auto check = truncation_check(config, sol, row, 6);
                if (check.partial_sums.empty()) continue;
                bool touched = false;
                for (std::size_t t = 0; t < check.partial_sums.size(); ++t) {
                    const double s = check.partial_sums[t];
                    const double slack = 1e-12 * std::max(1.0, std::abs(s));
                    if (t % 2 == 0) {
                        if (!(s + slack >= check.full_product)) ++violations;
                    } else {
                        if (!(s <= check.full_product + slack)) ++violations;
                    }
                    touched = true;
                }
                if (touched) ++active;
            }
        }
        info << violations << " violations over " << active << " sandwiches";
        return violations == 0 && active > 10000;
    });
}

/// Reruns with the same seed must be bit-identical; a different seed must not.
inline CheckResult check_determinism(std::ostream& out) {
    return detail::timed_check("seeded determinism", out, [](std::ostream& info) {
        const auto sol = ScatteringSolution::solve(1.0, 2.5);
        ChainParams p;
        p.n_particles = 12;
        p.box_side = 10.0;
        p.n_chains = 2;
        p.sweeps = 200;
        p.burn_in = 100;
        p.block_size = 50;
        p.seed = 77;
        const EnergyEstimate first = run_chain(p, sol);
        const EnergyEstimate second = run_chain(p, sol);
        bool ok = first.mean == second.mean && first.stderror == second.stderror &&
                  first.two_body == second.two_body && first.three_body == second.three_body &&
                  first.acceptance == second.acceptance && first.step_size == second.step_size;

        const RatioEstimate wa = widom_ratio(p, sol, 12);
        const RatioEstimate wb = widom_ratio(p, sol, 12);
        ok = ok && wa.ratio == wb.ratio && wa.stderror == wb.stderror;

        const ThreeBodyReference qa = brute_force_n3(1.0, 2.5, 10.0, 100000, 2, 3);
        const ThreeBodyReference qb = brute_force_n3(1.0, 2.5, 10.0, 100000, 2, 3);
        ok = ok && qa.energy_per_particle == qb.energy_per_particle &&
             qa.est_error == qb.est_error;

        ChainParams other = p;
        other.seed = 78;
        const EnergyEstimate third = run_chain(other, sol);
        ok = ok && third.mean != first.mean;

        info << "chain, insertion, and quasi-random estimates repeat bitwise; seed change "
                "moves the chain";
        return ok;
    });
}

/// Fast verification set: every check above in order.  Prints one line per
/// check and returns the collected results.
inline std::vector<CheckResult> run_selftest(std::ostream& out) {
    std::vector<CheckResult> results;
    results.push_back(check_scattering_eigenvalue(out));
    results.push_back(check_profile_vs_shooting(out));
    results.push_back(check_profile_bounds(out));
    results.push_back(check_local_energy_identity(out));
    results.push_back(check_few_body_energies(out));
    results.push_back(check_cluster_coefficients(out));
    results.push_back(check_truncation_sandwich(out));
    results.push_back(check_determinism(out));
    return results;
}

inline bool all_passed(const std::vector<CheckResult>& results) {
    return std::all_of(results.begin(), results.end(),
                       [](const CheckResult& r) { return r.passed; });
}

/// Partition-ratio lower bound at rho a ell^2 = 0.158: the measured insertion
/// ratio must stay within [1 - K rho a ell^2 - 3 sigma, 1 + 3 sigma].
inline CheckResult check_insertion_ratio_bound(std::ostream& out) {
    return detail::timed_check("insertion ratio bound", out, [](std::ostream& info) {
        const ErrorBudget budget = error_budget(1e-4, 1.0, 0.1);
        const double box_side = std::cbrt(64.0 / 1e-4);
        const double x = 1e-4 * budget.ell * budget.ell;  // rho a ell^2
        if (!(x <= 0.16)) return false;
        const auto sol = ScatteringSolution::solve(1.0, budget.ell);
        ChainParams p;
        p.n_particles = 64;
        p.box_side = box_side;
        p.n_chains = 4;
        p.sweeps = 2000;
        p.burn_in = 500;
        p.block_size = 50;
        p.seed = 2026;
        const RatioEstimate est = widom_ratio(p, sol, 64);
        const double low = 1.0 - detail::kInsertionDecay * x - 3.0 * est.stderror;
        const double high = 1.0 + 3.0 * est.stderror;
        info << "ratio " << est.ratio << " +- " << est.stderror << " within [" << low << ", "
             << high << "] at rho a ell^2 = " << x;
        return est.ratio >= low && est.ratio <= high;
    });
}

/// Three-decade density sweep at N = 100: the measured energy must exceed the
/// leading term 4 pi rho a beyond two standard errors at every density, the
/// excess must grow with density, and its fitted exponent must reach 0.35.
inline CheckResult check_energy_scaling(std::ostream& out) {
    return detail::timed_check("energy scaling across densities", out, [](std::ostream& info) {
        SweepConfig config;
        config.densities = {1e-5, 1e-4, 1e-3};
        config.n_particles = 100;
        config.epsilon = 0.1;
        config.n_chains = 4;
        config.sweeps = 8000;
        config.burn_in = 1000;
        config.block_size = 100;
        config.seed = 20260822;
        const std::vector<SweepRow> rows = run_sweep(config);
        bool ok = true;
        std::vector<double> excesses;
        info << "excess over 4 pi rho a:";
        for (const SweepRow& row : rows) {
            ok = ok && row.status == "ok";
            const double excess = row.ratio_to_leading - 1.0;
            const double sigma = row.stderror / (4.0 * M_PI * row.rho_a3);
            ok = ok && excess > 2.0 * sigma;
            excesses.push_back(excess);
            info << " " << excess << " (" << excess / sigma << " sigma)";
        }
        for (std::size_t i = 0; i + 1 < excesses.size(); ++i)
            ok = ok && excesses[i] < excesses[i + 1];
        const ExponentFit fit = fit_exponent(rows);
        ok = ok && fit.exponent >= 0.35;
        info << "; fitted exponent " << fit.exponent;
        return ok;
    });
}

}  // namespace hsvmc
