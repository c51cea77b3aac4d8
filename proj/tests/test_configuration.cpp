#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <set>
#include <vector>

#include "hsvmc/configuration.hpp"
#include "hsvmc/geometry.hpp"
#include "hsvmc/rng.hpp"

using hsvmc::Configuration;
using hsvmc::init_configuration;
using hsvmc::RandPurpose;
using hsvmc::SimulationBox;
using hsvmc::uniform_pair;
using hsvmc::Vec3;

namespace {

std::vector<Vec3> random_positions(const SimulationBox& box, std::size_t n, std::uint32_t tag) {
    std::vector<Vec3> pos;
    pos.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto ab = uniform_pair(555, 0, RandPurpose::kTest, tag, std::uint32_t(i), 0);
        const auto cd = uniform_pair(555, 0, RandPurpose::kTest, tag, std::uint32_t(i), 1);
        pos.push_back({(ab.first - 0.5) * box.side(), (ab.second - 0.5) * box.side(),
                       (cd.first - 0.5) * box.side()});
    }
    return pos;
}

std::set<std::size_t> brute_neighbours(const Configuration& c, std::size_t i) {
    std::set<std::size_t> out;
    for (std::size_t j = 0; j < c.size(); ++j)
        if (j != i && c.box().distance(c.position(i), c.position(j)) <= c.cutoff()) out.insert(j);
    return out;
}

std::set<std::size_t> candidate_set(const Configuration& c, std::size_t i) {
    std::set<std::size_t> out;
    c.for_each_candidate(i, [&](std::size_t j) {
        REQUIRE(out.insert(j).second);  // no candidate may be visited twice
        REQUIRE(j != i);
    });
    return out;
}

}  // namespace

TEST_CASE("cell grid engages only when at least three cells fit") {
    const SimulationBox box(30.0);
    CHECK(Configuration(box, random_positions(box, 20, 1), 5.0).uses_cells());
    CHECK(Configuration(box, random_positions(box, 20, 2), 10.0).cells_per_side() == 3);
    CHECK_FALSE(Configuration(box, random_positions(box, 20, 3), 11.0).uses_cells());
    CHECK_FALSE(Configuration(box, random_positions(box, 20, 4), 15.0).uses_cells());
}

TEST_CASE("candidate sets cover all neighbours within the cutoff") {
    for (auto [L, cutoff, n, tag] : std::vector<std::tuple<double, double, std::size_t, int>>{
             {30.0, 5.0, 60, 10}, {30.0, 9.9, 40, 11}, {12.0, 6.0, 25, 12}, {50.0, 4.0, 80, 13}}) {
        const SimulationBox box(L);
        Configuration config(box, random_positions(box, n, std::uint32_t(tag)), cutoff);
        for (std::size_t i = 0; i < config.size(); ++i) {
            const auto brute = brute_neighbours(config, i);
            const auto cand = candidate_set(config, i);
            CHECK(std::includes(cand.begin(), cand.end(), brute.begin(), brute.end()));
        }
    }
}

TEST_CASE("candidate sets stay correct through particle moves") {
    const SimulationBox box(28.0);
    Configuration config(box, random_positions(box, 50, 20), 4.0);
    REQUIRE(config.uses_cells());
    for (std::uint32_t step = 0; step < 400; ++step) {
        const auto mv = uniform_pair(77, 0, RandPurpose::kTest, step, 0, 0);
        const auto mw = uniform_pair(77, 0, RandPurpose::kTest, step, 0, 1);
        const std::size_t i = std::size_t(mv.first * 50) % 50;
        const Vec3 target = {(mv.second - 0.5) * 60.0, (mw.first - 0.5) * 60.0,
                             (mw.second - 0.5) * 60.0};
        config.set_position(i, target);
        // Moved coordinate is wrapped into the primary cell.
        CHECK(config.position(i).x >= -14.0);
        CHECK(config.position(i).x < 14.0);
        if (step % 20 == 0) {
            for (std::size_t p = 0; p < config.size(); ++p) {
                const auto brute = brute_neighbours(config, p);
                const auto cand = candidate_set(config, p);
                CHECK(std::includes(cand.begin(), cand.end(), brute.begin(), brute.end()));
            }
        }
    }
}

TEST_CASE("insertion-point candidates cover the cutoff ball") {
    const SimulationBox box(24.0);
    Configuration config(box, random_positions(box, 40, 30), 4.0);
    REQUIRE(config.uses_cells());
    for (std::uint32_t t = 0; t < 200; ++t) {
        const auto ab = uniform_pair(99, 0, RandPurpose::kTest, t, 1, 0);
        const auto cd = uniform_pair(99, 0, RandPurpose::kTest, t, 1, 1);
        const Vec3 y = {(ab.first - 0.5) * 24.0, (ab.second - 0.5) * 24.0,
                        (cd.first - 0.5) * 24.0};
        std::set<std::size_t> cand;
        config.for_each_candidate_near(y, [&](std::size_t j) { cand.insert(j); });
        for (std::size_t j = 0; j < config.size(); ++j)
            if (config.box().distance(y, config.position(j)) <= config.cutoff())
                CHECK(cand.count(j) == 1);
    }
}

TEST_CASE("geometry guards") {
    const SimulationBox box(10.0);
    CHECK_THROWS_AS(Configuration(box, random_positions(box, 4, 40), 5.1),
                    hsvmc::GeometryError);
    CHECK_THROWS_AS(Configuration(box, random_positions(box, 4, 41), 0.0),
                    hsvmc::GeometryError);
}

TEST_CASE("lattice start is dilute, wrapped, and reproducible") {
    const SimulationBox box(20.0);
    const auto c1 = init_configuration(box, 27, 1.0, 5.0, 31337, 0);
    const auto c2 = init_configuration(box, 27, 1.0, 5.0, 31337, 0);
    const auto c3 = init_configuration(box, 27, 1.0, 5.0, 31337, 1);
    REQUIRE(c1.size() == 27);
    bool chains_differ = false;
    for (std::size_t i = 0; i < c1.size(); ++i) {
        CHECK(c1.position(i).x == c2.position(i).x);
        CHECK(c1.position(i).y == c2.position(i).y);
        CHECK(c1.position(i).z == c2.position(i).z);
        chains_differ |= c1.position(i).x != c3.position(i).x;
        CHECK(c1.position(i).x >= -10.0);
        CHECK(c1.position(i).x < 10.0);
    }
    CHECK(chains_differ);
    for (std::size_t i = 0; i + 1 < c1.size(); ++i)
        for (std::size_t j = i + 1; j < c1.size(); ++j)
            CHECK(c1.box().distance(c1.position(i), c1.position(j)) > 1.0);
}

TEST_CASE("packing guard rejects overfilled boxes") {
    const SimulationBox box(5.0);
    CHECK_THROWS_AS(init_configuration(box, 30, 1.0, 2.0, 1, 0), hsvmc::PackingError);
}
