#pragma once

// Zero-energy hard-sphere scattering profile on a ball with Neumann boundary.
//
// The profile solves -f'' - (2/r) f' = lambda f on (a, ell) with f = 0 on
// [0, a], f(ell) = 1, f'(ell) = 0, and continues as 1 beyond ell.  Writing
// g = r f turns the interior equation into g'' = -lambda g, so
//
//     f(r) = A sin(k (r - a)) / r,   lambda = k^2,   A = ell / sin(k (ell - a)),
//
// where x = k (ell - a) is the smallest positive root of tan(x) = k ell in
// (0, pi/2).  The hard-sphere radius a = 0 degenerates to the free profile
// f == 1 with lambda = 0.

#include <cmath>
#include <limits>

#include "hsvmc/errors.hpp"
#include "hsvmc/quadrature.hpp"

namespace hsvmc {

/// L1/Linf norms of u = 1 - f^2 and of its radial derivative.
struct UNorms {
    double u_l1 = 0.0;       // integral of u over R^3, hard core included
    double grad_u_l1 = 0.0;  // integral of |u'| over R^3
    double u_linf = 0.0;
};

class ScatteringSolution {
  public:
    /// Solve for the interior wavenumber.  tol bounds the relative residual of
    /// tan(x) = k ell and must lie in (0, 1e-6].  a = 0 yields the free profile.
    static ScatteringSolution solve(double a, double ell, double tol = 1e-12) {
        if (!(ell > 0.0) || !(a >= 0.0) || a >= ell)
            throw DomainError("scattering: need 0 <= a < ell");
        if (!(tol > 0.0) || tol > 1e-6)
            throw DomainError("scattering: tol must lie in (0, 1e-6]");
        ScatteringSolution s;
        s.a_ = a;
        s.ell_ = ell;
        if (a == 0.0) return s;  // free profile: k = lambda = 0, f == 1

        const double d = ell - a;
        const double c = ell / d;
        const auto g = [c](double x) { return std::tan(x) - c * x; };

        // Root bracket inside (0, pi/2): g < 0 left of the root, g > 0 right.
        double lo = std::sqrt(3.0 * a / ell) * 1e-3;
        double hi = M_PI / 2 - 1e-12;
        lo = std::min(lo, 0.5 * hi);
        if (!(g(lo) < 0.0) || !(g(hi) > 0.0))
            throw NoBracket("scattering: no sign change for tan(x) = k ell");
        for (int it = 0; it < 200 && hi - lo > 1e-16; ++it) {
            const double mid = 0.5 * (lo + hi);
            (g(mid) < 0.0 ? lo : hi) = mid;
        }
        double x = 0.5 * (lo + hi);
        for (int it = 0; it < 4; ++it) {  // Newton polish
            const double t = std::tan(x);
            x -= (t - c * x) / (1.0 + t * t - c);
        }
        s.k_ = x / d;
        s.lambda_ = s.k_ * s.k_;
        s.amplitude_ = ell / std::sin(x);
        s.residual_ = std::abs(std::tan(x) - c * x) / (c * x);
        if (!(s.residual_ <= tol))
            throw NonConvergence("scattering: residual above tolerance");
        return s;
    }

    /// Free profile (no hard core): f == 1 everywhere, lambda = 0.
    static ScatteringSolution free_gas(double ell) {
        if (!(ell > 0.0)) throw DomainError("scattering: ell must be positive");
        ScatteringSolution s;
        s.ell_ = ell;
        return s;
    }

    double hard_core() const { return a_; }
    double range() const { return ell_; }
    double lambda() const { return lambda_; }
    double wavenumber() const { return k_; }
    double amplitude() const { return amplitude_; }
    double residual() const { return residual_; }
    bool is_free() const { return a_ == 0.0; }

    double f(double r) const {
        if (is_free()) return 1.0;
        if (r <= a_) return 0.0;
        if (r >= ell_) return 1.0;
        return amplitude_ * std::sin(k_ * (r - a_)) / r;
    }

    double fprime(double r) const {
        if (is_free() || r <= a_ || r >= ell_) return 0.0;
        const double s = k_ * (r - a_);
        return amplitude_ * (k_ * r * std::cos(s) - std::sin(s)) / (r * r);
    }

    double u(double r) const {
        const double fr = f(r);
        return 1.0 - fr * fr;
    }

    /// Norms of u = 1 - f^2 by composite Gauss-Legendre with panel doubling.
    UNorms u_norms() const {
        if (is_free()) return {};
        UNorms n;
        n.u_linf = 1.0;
        const double core = 4.0 * M_PI * a_ * a_ * a_ / 3.0;
        n.u_l1 = core + integrate_adaptive(
                            [this](double r) { return u(r) * 4.0 * M_PI * r * r; }, a_, ell_);
        // u' = -2 f f' <= 0 on (a, ell), so |u'| integrates without sign care.
        n.grad_u_l1 = integrate_adaptive(
            [this](double r) { return 2.0 * f(r) * fprime(r) * 4.0 * M_PI * r * r; }, a_, ell_);
        return n;
    }

  private:
    ScatteringSolution() = default;

    double a_ = 0.0;
    double ell_ = 0.0;
    double k_ = 0.0;
    double lambda_ = 0.0;
    double amplitude_ = 0.0;
    double residual_ = 0.0;
};

inline ScatteringSolution solve_neumann(double a, double ell, double tol = 1e-12) {
    return ScatteringSolution::solve(a, ell, tol);
}

/// Small-core reference value 3 a / ell^3 for lambda.
inline double lambda_reference(double a, double ell) { return 3.0 * a / (ell * ell * ell); }

}  // namespace hsvmc
