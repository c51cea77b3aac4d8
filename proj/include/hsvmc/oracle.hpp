#pragma once

// Independent cross-check routes: an RK4 shooting integrator for the radial
// scattering profile, Richardson-checked Simpson quadrature for the two-body
// energy, and a shifted-Halton quasi-Monte Carlo estimate of the full
// three-particle energy.  These deliberately avoid the closed forms and the
// Gauss-Legendre machinery used by the production code paths.

#include <cmath>
#include <cstdint>
#include <functional>
#include <vector>

#include "hsvmc/cluster.hpp"
#include "hsvmc/configuration.hpp"
#include "hsvmc/errors.hpp"
#include "hsvmc/geometry.hpp"
#include "hsvmc/jastrow.hpp"
#include "hsvmc/rng.hpp"
#include "hsvmc/scattering.hpp"

namespace hsvmc {

struct ShootingResult {
    std::vector<double> r;
    std::vector<double> f;        // normalised so f(ell) = 1
    double fprime_at_ell = 0.0;   // Neumann residual of the trial lambda
};

/// Integrate g'' = -lambda g for g = r f from r = a with g(a) = 0, then
/// normalise to f(ell) = 1.  fprime_at_ell vanishes iff lambda is the Neumann
/// eigenvalue; its sign brackets the eigenvalue for shooting.
inline ShootingResult ode_shooting_f(double a, double ell, double lambda, int n_steps) {
    if (!(a > 0.0) || !(ell > a)) throw DomainError("ode_shooting_f: need 0 < a < ell");
    if (n_steps < 2) throw DomainError("ode_shooting_f: need at least 2 steps");
    const double h = (ell - a) / n_steps;
    ShootingResult out;
    out.r.reserve(n_steps + 1);
    out.f.reserve(n_steps + 1);

    double g = 0.0, gp = 1.0;  // scale fixed later by normalisation
    out.r.push_back(a);
    out.f.push_back(0.0);
    std::vector<double> graw{g};
    for (int i = 0; i < n_steps; ++i) {
        // RK4 on (g, g')' = (g', -lambda g)
        const double k1g = gp, k1p = -lambda * g;
        const double k2g = gp + 0.5 * h * k1p, k2p = -lambda * (g + 0.5 * h * k1g);
        const double k3g = gp + 0.5 * h * k2p, k3p = -lambda * (g + 0.5 * h * k2g);
        const double k4g = gp + h * k3p, k4p = -lambda * (g + h * k3g);
        g += h / 6.0 * (k1g + 2 * k2g + 2 * k3g + k4g);
        gp += h / 6.0 * (k1p + 2 * k2p + 2 * k3p + k4p);
        out.r.push_back(a + (i + 1) * h);
        graw.push_back(g);
    }
    if (!(g > 0.0)) throw NonConvergence("ode_shooting_f: g(ell) not positive");
    const double scale = ell / g;
    for (std::size_t i = 1; i < graw.size(); ++i) out.f.push_back(scale * graw[i] / out.r[i]);
    out.fprime_at_ell = scale * (gp - g / ell) / ell;
    return out;
}

/// Composite Simpson with one Richardson halving step.
template <class F>
double simpson_refined(F&& fn, double a, double b, int n) {
    auto simpson = [&](int m) {
        const double h = (b - a) / m;
        double s = fn(a) + fn(b);
        for (int i = 1; i < m; ++i) s += (i % 2 ? 4.0 : 2.0) * fn(a + i * h);
        return s * h / 3.0;
    };
    const double coarse = simpson(n);
    const double fine = simpson(2 * n);
    return fine + (fine - coarse) / 15.0;
}

struct TwoBodyQuadrature {
    double numerator = 0.0;    // lambda * integral of f^2 over the range ball
    double denominator = 0.0;  // |box| - integral of u
    double value = 0.0;        // energy per particle at N = 2
};

/// Exact-quadrature two-particle energy per particle on a torus of side L:
/// the relative coordinate sees weight f^2, so
/// E2 = lambda * int_{r<=ell} f^2 / int_box f^2.
inline TwoBodyQuadrature quad_two_body(const ScatteringSolution& sol, double box_side) {
    if (!(box_side >= 2.0 * sol.range()))
        throw GeometryError("quad_two_body: need 2 ell <= L");
    TwoBodyQuadrature q;
    const double vol = box_side * box_side * box_side;
    if (sol.is_free()) {
        q.denominator = vol;
        return q;
    }
    const double a = sol.hard_core(), ell = sol.range();
    const auto f2r2 = [&](double r) {
        const double f = sol.f(r);
        return 4.0 * M_PI * f * f * r * r;
    };
    const auto ur2 = [&](double r) { return 4.0 * M_PI * sol.u(r) * r * r; };
    const int n = 4096;
    q.numerator = sol.lambda() * simpson_refined(f2r2, a, ell, n);
    const double u_int = 4.0 * M_PI * a * a * a / 3.0 + simpson_refined(ur2, a, ell, n);
    q.denominator = vol - u_int;
    q.value = q.numerator / q.denominator;
    return q;
}

/// Radical-inverse (van der Corput) digit reversal in the given base.
inline double radical_inverse(std::uint64_t index, std::uint32_t base) {
    double inv = 1.0 / base, scale = inv, value = 0.0;
    while (index > 0) {
        value += double(index % base) * scale;
        index /= base;
        scale *= inv;
    }
    return value;
}

struct QmcEstimate {
    double value = 0.0;
    double stderror = 0.0;
    int n_shifts = 0;
};

/// Mean of `integrand` over the unit cube [0,1)^dim by a Halton sequence with
/// `n_shifts` independent Cranley-Patterson rotations; the spread of the
/// per-shift means gives the error bar.
inline QmcEstimate qmc_mean(const std::function<double(const std::vector<double>&)>& integrand,
                            int dim, std::uint64_t n_points, int n_shifts, std::uint64_t seed) {
    static const std::uint32_t bases[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29};
    if (dim < 1 || dim > 10) throw DomainError("qmc_mean: dim must be in [1, 10]");
    if (n_shifts < 2) throw DomainError("qmc_mean: need at least 2 shifts");
    std::vector<double> shift(dim), point(dim);
    std::vector<double> means;
    means.reserve(n_shifts);
    for (int s = 0; s < n_shifts; ++s) {
        for (int d = 0; d < dim; ++d) {
            const auto pair = uniform_pair(seed, 0, RandPurpose::kQmcShift, std::uint32_t(s),
                                           std::uint32_t(d), 0);
            shift[d] = pair.first;
        }
        double sum = 0.0;
        for (std::uint64_t i = 0; i < n_points; ++i) {
            for (int d = 0; d < dim; ++d) {
                double v = radical_inverse(i + 1, bases[d]) + shift[d];
                point[d] = v - std::floor(v);
            }
            sum += integrand(point);
        }
        means.push_back(sum / double(n_points));
    }
    QmcEstimate e;
    e.n_shifts = n_shifts;
    for (double m : means) e.value += m;
    e.value /= n_shifts;
    double var = 0.0;
    for (double m : means) var += (m - e.value) * (m - e.value);
    e.stderror = std::sqrt(var / (n_shifts - 1.0) / n_shifts);
    return e;
}

namespace detail {

inline BigInt binomial_slow(std::int64_t n, std::int64_t m) {
    if (m < 0 || m > n) return BigInt(0);
    BigInt r(1);
    for (std::int64_t i = 0; i < m; ++i) {
        r *= BigInt(n - i);
        r /= BigInt(i + 1);
    }
    return r;
}

}  // namespace detail

/// Independent route to alpha_coefficient: enumerate the weak compositions
/// of k-2 into k-1 parts outright (the final constraint pins the total),
/// then apply the interior cutoffs and the per-depth upper limits term by
/// term.  Shares no code with the nested-sum recursion.
inline BigInt alpha_by_compositions(int k, int M, std::int64_t n) {
    if (k < 3) throw DomainError("alpha_by_compositions: order must be at least 3");
    std::vector<int> parts(std::size_t(k - 1), 0);
    BigInt total(0);
    std::function<void(int, int)> rec = [&](int j, int remaining) {
        if (j == k - 1) {
            if (remaining != 0) return;
            std::int64_t partial = 0;
            for (int t = 0; t < k - 1; ++t) {
                const std::int64_t before = partial;
                partial += parts[std::size_t(t)];
                if (parts[std::size_t(t)] > std::int64_t(M) - before) return;
                const int depth = t + 1;
                if (depth >= 2 && depth <= k - 2 && partial < depth - 1) return;
            }
            BigInt prod(1);
            std::int64_t used = 0;
            int parity = 0;
            for (int t = 0; t < k - 1; ++t) {
                prod *= detail::binomial_slow(n - 2 - used, parts[std::size_t(t)]);
                used += parts[std::size_t(t)];
                parity += parts[std::size_t(t)];
            }
            if (parity % 2 != 0) total -= prod;
            else total += prod;
            return;
        }
        for (int v = 0; v <= remaining; ++v) {
            parts[std::size_t(j)] = v;
            rec(j + 1, remaining - v);
        }
    };
    rec(0, k - 2);
    return total;
}

struct ThreeBodyReference {
    double energy_per_particle = 0.0;
    double est_error = 0.0;       // scatter of the shift replicates
    std::size_t n_points = 0;     // total integrand evaluations
};

/// Deterministic three-particle reference energy: the ratio
/// int e(X) |Psi_3|^2 dX  /  int |Psi_3|^2 dX over the torus, reduced to six
/// dimensions by pinning particle 1 at the origin.  Each of `n_shifts`
/// replicates evaluates both integrals on the same shifted low-discrepancy
/// point set and the replicate ratios provide the error estimate.  Points
/// where the weight vanishes (a pair inside the core) contribute zero to
/// both integrals.
inline ThreeBodyReference brute_force_n3(double hard_core, double ell, double box_side,
                                         std::size_t points_per_shift, int n_shifts = 8,
                                         std::uint64_t seed = 0) {
    if (!(2.0 * ell <= box_side))
        throw GeometryError("brute_force_n3: need 2 ell <= box side");
    if (points_per_shift < 100000)
        throw DomainError("brute_force_n3: need at least 1e5 points per shift");
    if (n_shifts < 2) throw DomainError("brute_force_n3: need at least 2 shift replicates");

    ThreeBodyReference out;
    out.n_points = points_per_shift * std::size_t(n_shifts);
    if (hard_core == 0.0) return out;  // free profile: zero energy exactly

    const auto sol = ScatteringSolution::solve(hard_core, ell);
    const SimulationBox box(box_side);
    // A cutoff above box/3 keeps the candidate search in its all-pairs mode,
    // so moving the two free particles never rebuilds a cell table.
    const double cutoff = std::min(std::max(ell, 0.34 * box_side), 0.5 * box_side);
    static const int kBases[6] = {2, 3, 5, 7, 11, 13};

    std::vector<double> ratios;
    ratios.reserve(std::size_t(n_shifts));
    for (int s = 0; s < n_shifts; ++s) {
        double shift[6];
        for (int d = 0; d < 6; ++d)
            shift[d] = uniform_pair(seed, 0, RandPurpose::kQmcShift, std::uint32_t(s),
                                    std::uint32_t(d), 1)
                           .first;
        Configuration config(box, {Vec3{0.0, 0.0, 0.0}, Vec3{0.0, 0.0, 0.0}, Vec3{0.0, 0.0, 0.0}},
                             cutoff);
        double num = 0.0, den = 0.0;
        for (std::size_t i = 0; i < points_per_shift; ++i) {
            double u[6];
            for (int d = 0; d < 6; ++d) {
                const double v = radical_inverse(i + 1, kBases[d]) + shift[d];
                u[d] = v - std::floor(v);
            }
            const Vec3 x2{(u[0] - 0.5) * box_side, (u[1] - 0.5) * box_side,
                          (u[2] - 0.5) * box_side};
            const Vec3 x3{(u[3] - 0.5) * box_side, (u[4] - 0.5) * box_side,
                          (u[5] - 0.5) * box_side};
            const double f12 = sol.f(box.distance(Vec3{0.0, 0.0, 0.0}, x2));
            const double f13 = sol.f(box.distance(Vec3{0.0, 0.0, 0.0}, x3));
            const double f23 = sol.f(box.distance(x2, x3));
            if (f12 < kMinProfile || f13 < kMinProfile || f23 < kMinProfile) continue;
            const double w = (f12 * f12) * (f13 * f13) * (f23 * f23);
            config.set_position(1, x2);
            config.set_position(2, x3);
            num += local_energy(config, sol).total * w;
            den += w;
        }
        if (den <= 0.0) throw NonConvergence("brute_force_n3: empty weight in a replicate");
        ratios.push_back(num / den / 3.0);
    }

    for (double r : ratios) out.energy_per_particle += r;
    out.energy_per_particle /= double(n_shifts);
    double var = 0.0;
    for (double r : ratios) var += (r - out.energy_per_particle) * (r - out.energy_per_particle);
    out.est_error = std::sqrt(var / double(n_shifts - 1) / double(n_shifts));
    return out;
}

}  // namespace hsvmc
