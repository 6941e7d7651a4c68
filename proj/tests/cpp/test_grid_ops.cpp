#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "sfdlab/grid_ops.hpp"

using namespace sfdlab;

namespace {

GridFunction random_values(const Lattice& lat, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    GridFunction f(lat, 0.0);
    for (std::size_t i = 0; i < f.size(); ++i) f[i] = u(rng);
    return f;
}

double max_abs_diff(const GridFunction& a, const GridFunction& b) {
    GridFunction d = a;
    d -= b;
    return sup_norm(d);
}

} // namespace

TEST_CASE("difference operators match their hand-computed values on a tiny grid") {
    Lattice lat(1, 4, 0.5);
    GridFunction f(lat, std::vector<double>{1.0, 2.0, 3.0, 4.0});
    DirectionVector e = DirectionVector::axis(1, 0);

    GridFunction sh = shift(f, e, 1);
    CHECK(sh[0] == 2.0);
    CHECK(sh[3] == 1.0); // periodic wrap

    GridFunction fd = forward_diff(f, e);
    CHECK(fd[0] == doctest::Approx(2.0).epsilon(1e-15));   // (2-1)/0.5
    CHECK(fd[3] == doctest::Approx(-6.0).epsilon(1e-15));  // (1-4)/0.5

    GridFunction bd = backward_diff(f, e);
    CHECK(bd[0] == doctest::Approx(-6.0).epsilon(1e-15));  // (1-4)/0.5
    CHECK(bd[1] == doctest::Approx(2.0).epsilon(1e-15));

    GridFunction sd = symmetric_diff(f, e);
    CHECK(sd[0] == doctest::Approx(-2.0).epsilon(1e-15));  // (2-4)/1

    GridFunction dd = second_diff(f, e);
    CHECK(dd[0] == doctest::Approx(16.0).epsilon(1e-15));  // (2-2+4)/0.25

    GridFunction mn = mean_op(f, e);
    CHECK(mn[0] == doctest::Approx(3.0).epsilon(1e-15));   // (2+4)/2

    GridFunction od = odd_part(f, e);
    CHECK(od[0] == doctest::Approx(-1.0).epsilon(1e-15));  // (2-4)/2

    GridFunction po = p_op(f, e);
    CHECK(po[0] == doctest::Approx(4.0).epsilon(1e-15));   // (2-2+4)/1
}

TEST_CASE("the zero direction degenerates every operator correctly") {
    Lattice lat(1, 6, 0.3);
    GridFunction f = random_values(lat, 7);
    DirectionVector z = DirectionVector::zero(1);

    CHECK(max_abs_diff(symmetric_diff(f, z), f) == 0.0);
    CHECK(max_abs_diff(mean_op(f, z), f) == 0.0);
    CHECK(sup_norm(odd_part(f, z)) == 0.0);
    CHECK(sup_norm(p_op(f, z)) == 0.0);
    CHECK(sup_norm(second_diff(f, z)) == 0.0);
    CHECK(sup_norm(forward_diff(f, z)) == 0.0);
    CHECK(sup_norm(backward_diff(f, z)) == 0.0);
}

TEST_CASE("algebraic relations between the operators hold on random data") {
    for (int dim = 1; dim <= 2; ++dim) {
        Lattice lat(dim, 9, 0.21);
        double h = lat.spacing();
        GridFunction f = random_values(lat, 100 + static_cast<std::uint64_t>(dim));
        std::vector<DirectionVector> dirs;
        dirs.push_back(DirectionVector::axis(dim, 0));
        if (dim == 2) dirs.push_back(DirectionVector(std::vector<int>{1, -1}));

        for (const DirectionVector& lam : dirs) {
            // backward along lam equals minus forward along -lam
            GridFunction a = backward_diff(f, lam);
            GridFunction b = -1.0 * forward_diff(f, -lam);
            CHECK(max_abs_diff(a, b) < 1e-13);

            // the symmetric difference is the average of the one-sided ones
            GridFunction sym = symmetric_diff(f, lam);
            GridFunction avg = 0.5 * (forward_diff(f, lam) + backward_diff(f, lam));
            CHECK(max_abs_diff(sym, avg) < 1e-13);

            // the second difference factors as forward of backward
            GridFunction dd = second_diff(f, lam);
            CHECK(max_abs_diff(dd, forward_diff(backward_diff(f, lam), lam)) < 1e-12);
            CHECK(max_abs_diff(dd, backward_diff(forward_diff(f, lam), lam)) < 1e-12);

            // ... and as the difference of the one-sided operators over h
            GridFunction alt = forward_diff(f, lam) - backward_diff(f, lam);
            alt *= 1.0 / h;
            CHECK(max_abs_diff(dd, alt) < 1e-12);

            // the odd part is h times the symmetric difference
            CHECK(max_abs_diff(odd_part(f, lam), h * symmetric_diff(f, lam)) < 1e-13);

            // shifts along lam and -lam invert each other
            CHECK(max_abs_diff(shift(shift(f, lam, 1), lam, -1), f) == 0.0);
        }
    }
}

TEST_CASE("direction-sequence compositions reduce to repeated applications") {
    Lattice lat(2, 8, 0.4);
    GridFunction f = random_values(lat, 5);
    DirectionVector l1 = DirectionVector::axis(2, 0);
    DirectionVector l2(std::vector<int>{1, 1});

    std::vector<DirectionVector> seq = {l1, l2};
    GridFunction composed = multi_diff(f, seq);
    GridFunction manual = symmetric_diff(symmetric_diff(f, l1), l2);
    CHECK(max_abs_diff(composed, manual) < 1e-13);

    GridFunction composed_mean = multi_mean(f, seq);
    GridFunction manual_mean = mean_op(mean_op(f, l1), l2);
    CHECK(max_abs_diff(composed_mean, manual_mean) < 1e-13);

    std::vector<DirectionVector> empty;
    CHECK(max_abs_diff(multi_diff(f, empty), f) == 0.0);
    CHECK(max_abs_diff(multi_mean(f, empty), f) == 0.0);
}

TEST_CASE("norms, inner product and the positive part") {
    Lattice lat(1, 4, 0.5);
    GridFunction f(lat, std::vector<double>{3.0, -4.0, 1.0, 0.0});
    CHECK(sup_norm(f) == 4.0);
    // sqrt((9+16+1+0) * 0.5)
    CHECK(l2h_norm(f) == doctest::Approx(std::sqrt(13.0)).epsilon(1e-15));

    GridFunction g(lat, std::vector<double>{1.0, 1.0, 2.0, -1.0});
    // (3 - 4 + 2 + 0) * 0.5
    CHECK(inner(f, g) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(inner(f, g) == doctest::Approx(inner(g, f)).epsilon(1e-15));

    GridFunction fp = positive_part(f);
    CHECK(fp[0] == 3.0);
    CHECK(fp[1] == 0.0);
    CHECK(fp[3] == 0.0);

    // 2d volume element: h^d
    Lattice lat2(2, 3, 0.5);
    GridFunction one(lat2, 1.0);
    CHECK(l2h_norm(one) == doctest::Approx(std::sqrt(9.0 * 0.25)).epsilon(1e-15));
}

TEST_CASE("discrete sobolev norms stack difference layers") {
    Lattice lat(1, 12, 0.35);
    GridFunction f = random_values(lat, 11);
    std::vector<DirectionVector> dirs = {DirectionVector::axis(1, 0)};

    CHECK(discrete_sobolev_norm(f, 0, dirs) ==
          doctest::Approx(l2h_norm(f)).epsilon(1e-14));

    double n0 = l2h_norm(f);
    double n1 = l2h_norm(symmetric_diff(f, dirs[0]));
    CHECK(discrete_sobolev_norm(f, 1, dirs) ==
          doctest::Approx(std::sqrt(n0 * n0 + n1 * n1)).epsilon(1e-13));

    double n2 = l2h_norm(symmetric_diff(symmetric_diff(f, dirs[0]), dirs[0]));
    CHECK(discrete_sobolev_norm(f, 2, dirs) ==
          doctest::Approx(std::sqrt(n0 * n0 + n1 * n1 + n2 * n2)).epsilon(1e-13));
}

TEST_CASE("restriction to a coarser dyadic lattice keeps the shared nodes") {
    Lattice coarse(1, 8, 0.25);
    Lattice fine(1, 32, 0.0625);
    auto fn = [](std::span<const double> x) { return std::cos(3.0 * x[0]) + x[0]; };
    GridFunction on_fine = GridFunction::sample(fine, fn);
    GridFunction restricted = restrict_to(on_fine, coarse);
    GridFunction on_coarse = GridFunction::sample(coarse, fn);
    REQUIRE(restricted.lattice() == coarse);
    CHECK(max_abs_diff(restricted, on_coarse) < 1e-14);

    Lattice incompatible(1, 12, 0.125);
    CHECK_THROWS_AS(restrict_to(on_fine, incompatible), ValidationError);
}
