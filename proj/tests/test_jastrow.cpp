#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "hsvmc/configuration.hpp"
#include "hsvmc/jastrow.hpp"
#include "hsvmc/rng.hpp"
#include "hsvmc/scattering.hpp"

using hsvmc::Configuration;
using hsvmc::delta_log_weight;
using hsvmc::local_energy;
using hsvmc::log_weight;
using hsvmc::RandPurpose;
using hsvmc::ScatteringSolution;
using hsvmc::SimulationBox;
using hsvmc::solve_neumann;
using hsvmc::three_body_naive;
using hsvmc::uniform_pair;
using hsvmc::Vec3;

namespace {

// Non-overlapping random configuration with margin above the hard core, away
// from the derivative kinks at r = a and r = ell where finite differences of
// the log-weight are ill behaved.
Configuration safe_random_config(const SimulationBox& box, std::size_t n, double a, double ell,
                                 std::uint32_t tag, double margin = 1.4, double kink_gap = 1e-3) {
    std::vector<Vec3> pos;
    std::uint32_t draw = 0;
    while (pos.size() < n) {
        const auto ab = uniform_pair(4242, 0, RandPurpose::kTest, tag, draw, 0);
        const auto cd = uniform_pair(4242, 0, RandPurpose::kTest, tag, draw, 1);
        ++draw;
        REQUIRE(draw < 100000);
        const Vec3 cand = {(ab.first - 0.5) * box.side(), (ab.second - 0.5) * box.side(),
                           (cd.first - 0.5) * box.side()};
        bool ok = true;
        for (const auto& p : pos) {
            const double r = box.distance(cand, p);
            if (r <= margin * a || std::abs(r - ell) < kink_gap * ell) {
                ok = false;
                break;
            }
        }
        if (ok) pos.push_back(cand);
    }
    return Configuration(box, std::move(pos), ell);
}

// Finite-difference local energy from log Psi = log_weight / 2:
// -Delta_j Psi / Psi = -sum_axis [phi'' + (phi')^2].
double fd_local_energy(Configuration config, const ScatteringSolution& sol, double h) {
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

}  // namespace

TEST_CASE("two isolated particles: 2 lambda inside the range, zero outside") {
    const auto sol = solve_neumann(1.0, 10.0);
    const SimulationBox box(40.0);
    {
        Configuration c(box, {{0, 0, 0}, {3, 0, 0}}, sol.range());
        const auto e = local_energy(c, sol);
        CHECK(e.two_body == 2.0 * sol.lambda());
        CHECK(e.three_body == 0.0);
        CHECK(e.total == 2.0 * sol.lambda());
        CHECK(e.pairs_in_range == 1);
        CHECK(log_weight(c, sol) == Catch::Approx(2.0 * std::log(sol.f(3.0))).epsilon(1e-14));
    }
    {
        Configuration c(box, {{0, 0, 0}, {15, 0, 0}}, sol.range());
        const auto e = local_energy(c, sol);
        CHECK(e.total == 0.0);
        CHECK(e.pairs_in_range == 0);
        CHECK(log_weight(c, sol) == 0.0);
    }
}

TEST_CASE("finite differences of the weight confirm the local energy") {
    const auto sol = solve_neumann(1.0, 5.0);
    const SimulationBox box(12.0);
    const double h = 1e-5 * sol.range();
    int checked = 0;
    for (std::uint32_t tag = 0; tag < 150; ++tag) {
        const std::size_t n = 3 + tag % 8;
        Configuration config = safe_random_config(box, n, 1.0, 5.0, 1000 + tag);
        const auto e = local_energy(config, sol);
        if (e.pairs_in_range == 0) continue;
        ++checked;
        const double fd = fd_local_energy(config, sol, h);
        const double scale = std::max(std::abs(fd), sol.lambda());
        CHECK(std::abs(e.total - fd) / scale < 1e-3);
    }
    // The box is small enough that interacting pairs are the norm.
    CHECK(checked > 100);
}

TEST_CASE("vector identity matches the naive triple loop up to N = 30") {
    const auto sol = solve_neumann(1.0, 5.0);
    const SimulationBox box(14.0);
    for (std::size_t n : {5, 12, 30}) {
        // First deterministic draw whose cross term is nonzero.
        for (std::uint32_t tag = 0;; ++tag) {
            REQUIRE(tag < 50);
            Configuration config =
                safe_random_config(box, n, 1.0, 5.0, 2000 + 100 * std::uint32_t(n) + tag);
            const auto e = local_energy(config, sol);
            if (e.three_body == 0.0) continue;
            const double naive = three_body_naive(config, sol);
            CHECK(std::abs(e.three_body - naive) <=
                  1e-10 * std::max({std::abs(naive), std::abs(e.two_body), 1e-12}));
            break;
        }
    }
}

TEST_CASE("relabelling particles changes nothing, bit for bit") {
    const auto sol = solve_neumann(1.0, 5.0);
    const SimulationBox box(16.0);
    Configuration config = safe_random_config(box, 14, 1.0, 5.0, 3000);
    const double w = log_weight(config, sol);
    const auto e = local_energy(config, sol);

    std::vector<std::size_t> perm(config.size());
    std::iota(perm.begin(), perm.end(), 0);
    // A fixed non-trivial permutation: reverse then swap two blocks.
    std::reverse(perm.begin(), perm.end());
    std::swap(perm[0], perm[5]);
    std::vector<Vec3> shuffled;
    for (std::size_t i : perm) shuffled.push_back(config.position(i));
    Configuration relabeled(box, shuffled, sol.range());

    CHECK(log_weight(relabeled, sol) == w);
    const auto e2 = local_energy(relabeled, sol);
    CHECK(e2.two_body == e.two_body);
    CHECK(e2.three_body == e.three_body);
    CHECK(e2.total == e.total);
}

TEST_CASE("translating every particle leaves the energy invariant") {
    const auto sol = solve_neumann(1.0, 5.0);
    const SimulationBox box(16.0);
    Configuration config = safe_random_config(box, 12, 1.0, 5.0, 4000);
    const auto e = local_energy(config, sol);
    const double w = log_weight(config, sol);
    for (const Vec3 shift : {Vec3{1.7, -2.3, 0.4}, Vec3{-7.9, 3.1, 5.5}}) {
        std::vector<Vec3> moved;
        for (std::size_t i = 0; i < config.size(); ++i)
            moved.push_back(config.position(i) + shift);
        Configuration shifted(box, moved, sol.range());
        const auto e2 = local_energy(shifted, sol);
        CHECK(std::abs(e2.total - e.total) <= 1e-10 * std::max(std::abs(e.total), 1e-12));
        CHECK(std::abs(log_weight(shifted, sol) - w) <= 1e-10 * std::max(std::abs(w), 1e-12));
    }
}

TEST_CASE("delta log-weight equals the full recomputation") {
    const auto sol = solve_neumann(1.0, 5.0);
    const SimulationBox box(14.0);
    Configuration config = safe_random_config(box, 10, 1.0, 5.0, 5000);
    for (std::uint32_t t = 0; t < 60; ++t) {
        const auto ab = uniform_pair(616, 0, RandPurpose::kTest, t, 0, 0);
        const auto cd = uniform_pair(616, 0, RandPurpose::kTest, t, 0, 1);
        const std::size_t i = std::size_t(ab.first * 10) % 10;
        const Vec3 target = {(ab.second - 0.5) * 14.0, (cd.first - 0.5) * 14.0,
                             (cd.second - 0.5) * 14.0};
        const double before = log_weight(config, sol);
        const double delta = delta_log_weight(config, sol, i, target);
        Configuration moved = config;
        moved.set_position(i, target);
        const double after = log_weight(moved, sol);
        if (std::isinf(delta)) {
            CHECK(std::isinf(after));
        } else {
            CHECK(delta == Catch::Approx(after - before).margin(1e-9));
            config = moved;  // keep walking through accepted states
        }
    }
}

TEST_CASE("hard-core overlap zeroes the weight and poisons the estimator") {
    const auto sol = solve_neumann(1.0, 5.0);
    const SimulationBox box(14.0);
    Configuration config(box, {{0, 0, 0}, {0.5, 0, 0}, {6, 6, -5}}, sol.range());
    CHECK(log_weight(config, sol) == -std::numeric_limits<double>::infinity());
    CHECK_THROWS_AS(local_energy(config, sol), hsvmc::OverlapError);
}

TEST_CASE("free profile has zero energy and flat weight") {
    const auto sol = ScatteringSolution::free_gas(5.0);
    const SimulationBox box(14.0);
    Configuration config = safe_random_config(box, 9, 0.0, 5.0, 6000, 0.0);
    CHECK(log_weight(config, sol) == 0.0);
    const auto e = local_energy(config, sol);
    CHECK(e.two_body == 0.0);
    CHECK(e.three_body == 0.0);
    CHECK(e.total == 0.0);
}

TEST_CASE("range guard requires the range ball to fit the box") {
    const auto sol = solve_neumann(1.0, 5.0);
    const SimulationBox box(9.0);
    Configuration config(box, {{0, 0, 0}, {3, 0, 0}}, 4.0);
    CHECK_THROWS_AS(log_weight(config, sol), hsvmc::GeometryError);
    CHECK_THROWS_AS(local_energy(config, sol), hsvmc::GeometryError);
}
