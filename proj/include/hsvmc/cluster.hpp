#pragma once

// Exact combinatorics for the cluster expansion of the pair-product state:
// signed coefficients of the partition-function expansion in powers of the
// excluded-weight integral, alternating truncation bounds for a single row
// of pair factors, and the dimensionless scales that budget the error of a
// dilute-gas run.

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "hsvmc/configuration.hpp"
#include "hsvmc/errors.hpp"
#include "hsvmc/jastrow.hpp"
#include "hsvmc/scattering.hpp"

namespace hsvmc {

using BigInt = boost::multiprecision::cpp_int;

struct ClusterCoefficient {
    int k = 0;        // expansion order
    int M = 0;        // truncation order of the generating sums
    std::int64_t n_particles = 0;
    BigInt value;
};

namespace detail {

inline BigInt binomial(std::int64_t n, std::int64_t m) {
    if (m < 0 || m > n) return BigInt(0);
    BigInt result(1);
    for (std::int64_t i = 0; i < m; ++i) {
        result *= BigInt(n - i);
        result /= BigInt(i + 1);
    }
    return result;
}

// Depth j contributes a factor (-1)^{m_j} C(N-2-s, m_j) where s is the sum
// of the earlier m's; partial sums must stay >= j-1 at interior depths and
// finish at exactly k-2.  Terms whose partial sum already exceeds k-2 can
// never recover, so they are pruned.
inline void alpha_recurse(int j, int k, int M, std::int64_t n, std::int64_t prev_sum, bool negative,
                          const BigInt& partial, BigInt& total) {
    if (j == k - 1) {
        const std::int64_t m_last = (k - 2) - prev_sum;
        if (m_last < 0 || m_last > std::int64_t(M) - prev_sum) return;
        const bool neg = negative != (m_last % 2 != 0);
        const BigInt term = partial * binomial(n - 2 - prev_sum, m_last);
        if (neg) total -= term;
        else total += term;
        return;
    }
    const std::int64_t m_hi = std::int64_t(M) - prev_sum;
    for (std::int64_t m = 0; m <= m_hi; ++m) {
        const std::int64_t s = prev_sum + m;
        if (s > std::int64_t(k) - 2) break;               // final constraint unreachable
        if (j >= 2 && j <= k - 2 && s < std::int64_t(j) - 1) continue;  // interior cutoff
        alpha_recurse(j + 1, k, M, n, s, negative != (m % 2 != 0),
                      partial * binomial(n - 2 - prev_sum, m), total);
    }
}

}  // namespace detail

/// Signed integer coefficient of order k in the truncated expansion of the
/// row products, evaluated for a concrete particle number.  Computed in
/// exact arbitrary-precision arithmetic from the nested alternating sums
/// over (m_1, ..., m_{k-1}) with interior cutoffs
/// m_1 + ... + m_j >= j - 1 and total m_1 + ... + m_{k-1} = k - 2.
inline ClusterCoefficient alpha_coefficient(int k, int M, std::int64_t n_particles) {
    if (k < 3) throw DomainError("alpha_coefficient: order must be at least 3");
    if (k > M + 2) throw DomainError("alpha_coefficient: order exceeds truncation reach");
    if (n_particles < k) throw DomainError("alpha_coefficient: need at least k particles");
    ClusterCoefficient c;
    c.k = k;
    c.M = M;
    c.n_particles = n_particles;
    detail::alpha_recurse(1, k, M, n_particles, 0, false, BigInt(1), c.value);
    return c;
}

struct TruncationCheck {
    std::vector<double> partial_sums;  // S_0 .. S_k, alternating in m
    double full_product = 0.0;         // product of (1 - u_j) over the row
};

/// For one row i of a configuration, evaluates the product of pair weights
/// prod_{j>i}(1 - u_ij) together with the alternating partial sums
/// S_t = sum_{m=0}^{t} (-1)^m e_m(u) of its elementary symmetric expansion.
/// Since every u lies in [0, 1], the even sums bound the product from above
/// and the odd sums from below.  The e_m come from the stable product
/// recurrence, which only adds non-negative terms.
inline TruncationCheck truncation_check(const Configuration& config,
                                        const ScatteringSolution& sol, std::size_t i, int k) {
    const std::size_t n = config.size();
    if (i >= n) throw DomainError("truncation_check: row index out of range");
    if (k < 0) throw DomainError("truncation_check: order must be non-negative");
    if (std::size_t(k) > n - 1 - i)
        throw DomainError("truncation_check: order exceeds the row length");

    std::vector<double> u_values;
    u_values.reserve(n - 1 - i);
    for (std::size_t j = i + 1; j < n; ++j) {
        const double r = config.box().distance(config.position(i), config.position(j));
        if (!sol.is_free() && sol.f(r) < kMinProfile)
            throw OverlapError("truncation_check: overlapping pair in row");
        u_values.push_back(sol.u(r));
    }

    TruncationCheck out;
    out.full_product = 1.0;
    for (double u : u_values) out.full_product *= 1.0 - u;

    std::vector<double> e(std::size_t(k) + 1, 0.0);
    e[0] = 1.0;
    std::size_t active = 0;
    for (double u : u_values) {
        ++active;
        const std::size_t top = std::min(active, std::size_t(k));
        for (std::size_t m = top; m >= 1; --m) e[m] += u * e[m - 1];
    }

    out.partial_sums.resize(std::size_t(k) + 1);
    double s = 0.0;
    for (int m = 0; m <= k; ++m) {
        s += (m % 2 == 0 ? e[std::size_t(m)] : -e[std::size_t(m)]);
        out.partial_sums[std::size_t(m)] = s;
    }
    return out;
}

struct ErrorBudget {
    double rho = 0.0;           // number density
    double hard_core = 0.0;     // scattering length of the pair potential
    double epsilon = 0.0;       // range exponent
    int M = 0;                  // truncation order
    double ell = 0.0;           // pair range (rho * a)^{-1/2} (rho a^3)^epsilon
    struct Terms {
        double truncation = 0.0;    // (rho a ell^2)^{M-1}
        double loop = 0.0;          // rho a^2 ell
        double profile = 0.0;       // a / ell
        double dominant = 0.0;      // (rho a^3)^{1/2 - epsilon}
        double localization = 0.0;  // (rho a^3)^{1/2 + epsilon}
    } terms;
};

/// Chooses the interaction range ell = (rho a)^{-1/2} (rho a^3)^epsilon and
/// the smallest even truncation order with M - 1 strictly above 1/(4 eps),
/// and reports the dimensionless scales that control the accuracy of a run
/// at this diluteness.
inline ErrorBudget error_budget(double rho, double hard_core, double epsilon,
                                std::optional<int> m_override = std::nullopt) {
    if (!(rho > 0.0) || !(hard_core > 0.0))
        throw DomainError("error_budget: density and core must be positive");
    const double d = rho * hard_core * hard_core * hard_core;
    if (!(d > 0.0) || d > 1e-2)
        throw DomainError("error_budget: gas parameter must lie in (0, 1e-2]");
    if (!(epsilon > 0.0) || !(epsilon < 0.25))
        throw DomainError("error_budget: exponent must lie in (0, 1/4)");

    ErrorBudget b;
    b.rho = rho;
    b.hard_core = hard_core;
    b.epsilon = epsilon;
    b.ell = std::pow(rho * hard_core, -0.5) * std::pow(d, epsilon);

    if (m_override) {
        if (*m_override < 2) throw DomainError("error_budget: truncation order must be >= 2");
        b.M = *m_override;
    } else {
        const double threshold = 1.0 / (4.0 * epsilon);
        int m = 2;
        while (!(double(m - 1) > threshold)) m += 2;
        b.M = m;
    }

    const double rho_a_ell2 = rho * hard_core * b.ell * b.ell;
    const double identity = std::pow(d, 2.0 * epsilon);
    if (std::abs(rho_a_ell2 / identity - 1.0) > 1e-12)
        throw NonConvergence("error_budget: range identity drifted");

    b.terms.truncation = std::pow(rho_a_ell2, b.M - 1);
    b.terms.loop = rho * hard_core * hard_core * b.ell;
    b.terms.profile = hard_core / b.ell;
    b.terms.dominant = std::pow(d, 0.5 - epsilon);
    b.terms.localization = std::pow(d, 0.5 + epsilon);
    return b;
}

}  // namespace hsvmc
