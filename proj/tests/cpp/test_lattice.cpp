#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "sfdlab/grid_ops.hpp"
#include "sfdlab/lattice.hpp"

using namespace sfdlab;

TEST_CASE("direction vectors") {
    DirectionVector z = DirectionVector::zero(2);
    CHECK(z.is_zero());
    CHECK(z.dim() == 2);
    CHECK(z.euclidean_norm() == 0.0);

    DirectionVector e1 = DirectionVector::axis(3, 0);
    CHECK(e1[0] == 1);
    CHECK(e1[1] == 0);
    CHECK(e1[2] == 0);
    CHECK(!e1.is_zero());
    CHECK(e1.euclidean_norm() == 1.0);

    DirectionVector lam(std::vector<int>{1, -2});
    CHECK(lam.str() == "(1,-2)");
    CHECK(lam.euclidean_norm() == doctest::Approx(std::sqrt(5.0)).epsilon(1e-15));
    DirectionVector neg = -lam;
    CHECK(neg[0] == -1);
    CHECK(neg[1] == 2);
    CHECK(lam == DirectionVector(std::vector<int>{1, -2}));
    CHECK(!(lam == neg));
}

TEST_CASE("lattice geometry and periodic neighbors in 1d") {
    Lattice lat(1, 5, 0.25);
    CHECK(lat.size() == 5);
    CHECK(lat.period() == doctest::Approx(1.25).epsilon(1e-15));

    std::vector<double> x = lat.coordinates(3);
    REQUIRE(x.size() == 1);
    CHECK(x[0] == doctest::Approx(0.75).epsilon(1e-15));

    DirectionVector e = DirectionVector::axis(1, 0);
    CHECK(lat.neighbor(3, e, 1) == 4);
    CHECK(lat.neighbor(4, e, 1) == 0);  // wraps around
    CHECK(lat.neighbor(0, e, -1) == 4); // wraps the other way
    CHECK(lat.neighbor(1, e, 7) == 3);  // 1 + 7 mod 5
    CHECK(lat.neighbor(1, e, -7) == 4); // 1 - 7 mod 5
}

TEST_CASE("lattice neighbors in 2d follow row-major layout with axis 0 slowest") {
    Lattice lat(2, 4, 0.5);
    CHECK(lat.size() == 16);
    // Node (i, j) sits at flat = 4 i + j.
    std::size_t flat = 4 * 2 + 3; // (2, 3)
    std::vector<double> x = lat.coordinates(flat);
    CHECK(x[0] == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(x[1] == doctest::Approx(1.5).epsilon(1e-15));

    DirectionVector diag(std::vector<int>{1, -1});
    // (2,3) + (1,-1) = (3,2)
    CHECK(lat.neighbor(flat, diag, 1) == 4 * 3 + 2);
    // (2,3) + 2*(1,-1) = (4,1) -> wraps to (0,1)
    CHECK(lat.neighbor(flat, diag, 2) == 4 * 0 + 1);
    // zero direction is a fixed point
    CHECK(lat.neighbor(flat, DirectionVector::zero(2), 3) == flat);
}

TEST_CASE("dyadic refinement relation between lattices") {
    Lattice coarse(1, 8, 0.5);
    Lattice fine(1, 16, 0.25);
    Lattice finer(1, 32, 0.125);
    CHECK(coarse.refines_to(fine, 1));
    CHECK(coarse.refines_to(finer, 2));
    CHECK(!coarse.refines_to(fine, 2));
    CHECK(!fine.refines_to(coarse, 1));
    Lattice other_period(1, 16, 0.5);
    CHECK(!coarse.refines_to(other_period, 1));
    Lattice lat2d(2, 16, 0.25);
    CHECK(!coarse.refines_to(lat2d, 1));
}

TEST_CASE("grid function sampling and arithmetic") {
    Lattice lat(1, 8, 0.25);
    GridFunction f = GridFunction::sample(
        lat, [](std::span<const double> x) { return std::sin(x[0]); });
    for (std::size_t i = 0; i < lat.size(); ++i)
        CHECK(f[i] == doctest::Approx(std::sin(0.25 * static_cast<double>(i))).epsilon(1e-15));

    GridFunction g(lat, 2.0);
    GridFunction s = f + g;
    CHECK(s[3] == doctest::Approx(f[3] + 2.0).epsilon(1e-15));
    GridFunction d = s - g;
    CHECK(d[3] == doctest::Approx(f[3]).epsilon(1e-15));
    GridFunction scaled = 3.0 * f;
    CHECK(scaled[5] == doctest::Approx(3.0 * f[5]).epsilon(1e-15));

    GridFunction acc(lat, 1.0);
    acc.axpy(-2.0, g); // 1 - 2*2 = -3
    CHECK(acc[0] == doctest::Approx(-3.0).epsilon(1e-15));

    CHECK(f.all_finite());
    GridFunction bad(lat, 0.0);
    bad[2] = std::nan("");
    CHECK(!bad.all_finite());

    Lattice other(1, 8, 0.5);
    GridFunction h(other, 0.0);
    CHECK_THROWS_AS(require_same_lattice(f, h, "add"), ValidationError);
}

TEST_CASE("grid function csv and binary round trips are exact") {
    Lattice lat(2, 5, 1.0 / 3.0);
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> u(-10.0, 10.0);
    GridFunction f(lat, 0.0);
    for (std::size_t i = 0; i < f.size(); ++i) f[i] = u(rng);
    f[0] = 0.1 + 0.2; // classic non-representable sum
    f[1] = 1.0 / 3.0;

    std::stringstream csv;
    f.write_csv(csv);
    GridFunction back = GridFunction::read_csv(csv);
    REQUIRE(back.lattice() == lat);
    for (std::size_t i = 0; i < f.size(); ++i) CHECK(back[i] == f[i]);

    std::stringstream bin(std::ios::in | std::ios::out | std::ios::binary);
    f.write_binary(bin);
    GridFunction back2 = GridFunction::read_binary(bin);
    REQUIRE(back2.lattice() == lat);
    for (std::size_t i = 0; i < f.size(); ++i) CHECK(back2[i] == f[i]);
}

TEST_CASE("commensurate ladders share one period and respect the targets") {
    double period = 2.0 * std::acos(-1.0);
    std::vector<double> targets = {0.4, 0.2, 0.1, 0.05};
    std::vector<Lattice> ladder = commensurate_ladder(1, period, targets);
    REQUIRE(ladder.size() == targets.size());
    for (std::size_t i = 0; i < ladder.size(); ++i) {
        CHECK(ladder[i].period() == doctest::Approx(period).epsilon(1e-12));
        int expected = static_cast<int>(std::lround(period / targets[i]));
        CHECK(ladder[i].points_per_axis() == expected);
        CHECK(ladder[i].spacing() ==
              doctest::Approx(period / expected).epsilon(1e-15));
    }
    // Absurdly coarse targets clamp to the minimal usable grid.
    std::vector<double> coarse = {100.0};
    std::vector<Lattice> clamped = commensurate_ladder(1, period, coarse);
    CHECK(clamped[0].points_per_axis() >= 3);
}
