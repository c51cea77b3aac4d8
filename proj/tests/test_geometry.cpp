#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "hsvmc/geometry.hpp"
#include "hsvmc/rng.hpp"

using hsvmc::SimulationBox;
using hsvmc::Vec3;

namespace {

// Oracle: shortest displacement over all 27 periodic images, no wrapping tricks.
Vec3 min_image_brute(const SimulationBox& box, Vec3 a, Vec3 b) {
    const double L = box.side();
    Vec3 best = a - b;
    double best2 = best.norm2();
    for (int ix = -1; ix <= 1; ++ix)
        for (int iy = -1; iy <= 1; ++iy)
            for (int iz = -1; iz <= 1; ++iz) {
                const Vec3 d = {a.x - b.x + ix * L, a.y - b.y + iy * L, a.z - b.z + iz * L};
                if (d.norm2() < best2) {
                    best2 = d.norm2();
                    best = d;
                }
            }
    return best;
}

double test_uniform(std::uint32_t idx, std::uint32_t block) {
    return hsvmc::uniform_pair(0xBEEF, 0, hsvmc::RandPurpose::kTest, idx, block, 0).first;
}

}  // namespace

TEST_CASE("box rejects degenerate side lengths") {
    CHECK_THROWS_AS(SimulationBox(0.0), hsvmc::GeometryError);
    CHECK_THROWS_AS(SimulationBox(-3.0), hsvmc::GeometryError);
}

TEST_CASE("wrap lands in the primary cell and is idempotent") {
    const SimulationBox box(7.0);
    for (std::uint32_t i = 0; i < 2000; ++i) {
        const double v = (test_uniform(i, 0) - 0.5) * 40.0;
        const double w = box.wrap_coord(v);
        REQUIRE(w >= -3.5);
        REQUIRE(w < 3.5);
        CHECK(box.wrap_coord(w) == w);
        // Wrapping shifts by an integer number of box lengths.
        CHECK(std::abs(std::remainder(v - w, 7.0)) < 1e-9);
    }
    CHECK(box.wrap_coord(3.5) == -3.5);
    CHECK(box.wrap_coord(-3.5) == -3.5);
}

TEST_CASE("minimum image components lie in (-L/2, L/2] with ties to +L/2") {
    const SimulationBox box(5.0);
    CHECK(box.min_image_coord(2.5) == 2.5);
    CHECK(box.min_image_coord(-2.5) == 2.5);
    CHECK(box.min_image_coord(7.5) == 2.5);
    CHECK(box.min_image_coord(5.0) == 0.0);
    CHECK(box.min_image_coord(-1.0) == -1.0);
    for (std::uint32_t i = 0; i < 2000; ++i) {
        const double d = (test_uniform(i, 1) - 0.5) * 31.0;
        const double m = box.min_image_coord(d);
        REQUIRE(m > -2.5);
        REQUIRE(m <= 2.5);
        CHECK(std::abs(std::remainder(d - m, 5.0)) < 1e-9);
    }
}

TEST_CASE("minimum image agrees with the 27-image oracle") {
    const SimulationBox box(6.3);
    for (std::uint32_t i = 0; i < 4000; ++i) {
        Vec3 a = {(test_uniform(i, 2) - 0.5) * 6.3, (test_uniform(i, 3) - 0.5) * 6.3,
                  (test_uniform(i, 4) - 0.5) * 6.3};
        Vec3 b = {(test_uniform(i, 5) - 0.5) * 6.3, (test_uniform(i, 6) - 0.5) * 6.3,
                  (test_uniform(i, 7) - 0.5) * 6.3};
        const Vec3 got = box.min_image(a, b);
        const Vec3 want = min_image_brute(box, a, b);
        CHECK(got.norm2() == Catch::Approx(want.norm2()).margin(1e-12));
        CHECK(box.distance2(a, b) == Catch::Approx(want.norm2()).margin(1e-12));
    }
}

TEST_CASE("displacement to self is zero and symmetry holds") {
    const SimulationBox box(4.0);
    const Vec3 p = {1.25, -0.5, 1.9};
    const Vec3 d = box.min_image(p, p);
    CHECK(d.x == 0.0);
    CHECK(d.y == 0.0);
    CHECK(d.z == 0.0);
    for (std::uint32_t i = 0; i < 500; ++i) {
        Vec3 a = {(test_uniform(i, 8) - 0.5) * 4.0, (test_uniform(i, 9) - 0.5) * 4.0,
                  (test_uniform(i, 10) - 0.5) * 4.0};
        Vec3 b = {(test_uniform(i, 11) - 0.5) * 4.0, (test_uniform(i, 12) - 0.5) * 4.0,
                  (test_uniform(i, 13) - 0.5) * 4.0};
        CHECK(box.distance2(a, b) == box.distance2(b, a));
    }
}

TEST_CASE("triangle inequality for the torus metric") {
    const SimulationBox box(3.0);
    for (std::uint32_t i = 0; i < 2000; ++i) {
        Vec3 a = {(test_uniform(i, 14) - 0.5) * 3.0, (test_uniform(i, 15) - 0.5) * 3.0,
                  (test_uniform(i, 16) - 0.5) * 3.0};
        Vec3 b = {(test_uniform(i, 17) - 0.5) * 3.0, (test_uniform(i, 18) - 0.5) * 3.0,
                  (test_uniform(i, 19) - 0.5) * 3.0};
        Vec3 c = {(test_uniform(i, 20) - 0.5) * 3.0, (test_uniform(i, 21) - 0.5) * 3.0,
                  (test_uniform(i, 22) - 0.5) * 3.0};
        CHECK(box.distance(a, c) <= box.distance(a, b) + box.distance(b, c) + 1e-12);
    }
}

TEST_CASE("distance caps at half the main diagonal") {
    const SimulationBox box(2.0);
    for (std::uint32_t i = 0; i < 1000; ++i) {
        Vec3 a = {(test_uniform(i, 23) - 0.5) * 2.0, (test_uniform(i, 24) - 0.5) * 2.0,
                  (test_uniform(i, 25) - 0.5) * 2.0};
        Vec3 b = {(test_uniform(i, 26) - 0.5) * 2.0, (test_uniform(i, 27) - 0.5) * 2.0,
                  (test_uniform(i, 28) - 0.5) * 2.0};
        CHECK(box.distance(a, b) <= std::sqrt(3.0) * 1.0 + 1e-12);
    }
}
