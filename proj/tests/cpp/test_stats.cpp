#include <doctest.h>

#include <cmath>
#include <utility>
#include <vector>

#include "sfdlab/stats.hpp"

using namespace sfdlab;

TEST_CASE("power laws are recovered exactly from log-log data") {
    std::vector<std::pair<double, double>> quad;
    for (double h : {0.4, 0.2, 0.1, 0.05}) quad.emplace_back(h, 3.0 * h * h);
    OrderFit f2 = fit_order(quad);
    REQUIRE(f2.fitted);
    CHECK(f2.slope == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(f2.r_squared == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(f2.used == 4);
    CHECK(f2.dropped == 0);
    CHECK(!f2.exact);

    std::vector<std::pair<double, double>> quart;
    for (double h : {0.4, 0.2, 0.1}) quart.emplace_back(h, 0.7 * h * h * h * h);
    OrderFit f4 = fit_order(quart);
    CHECK(f4.slope == doctest::Approx(4.0).epsilon(1e-12));
}

TEST_CASE("unusable pairs are dropped and reported") {
    std::vector<std::pair<double, double>> data = {
        {0.4, 0.16}, {0.2, 0.04}, {0.1, 0.01}, {0.05, 0.0}};
    OrderFit f = fit_order(data);
    REQUIRE(f.fitted);
    CHECK(f.used == 3);
    CHECK(f.dropped == 1);
    CHECK(f.slope == doctest::Approx(2.0).epsilon(1e-10));
    CHECK(!f.note.empty());

    // sub-floor errors count as drops too
    std::vector<std::pair<double, double>> floored = {
        {0.4, 0.16}, {0.2, 0.04}, {0.1, 0.01}, {0.05, 1e-15}};
    OrderFit g = fit_order(floored);
    CHECK(g.dropped == 1);
    CHECK(g.used == 3);
}

TEST_CASE("fewer than three surviving pairs yields no fit, not an error") {
    std::vector<std::pair<double, double>> two = {{0.2, 0.04}, {0.1, 0.01}};
    OrderFit f = fit_order(two);
    CHECK(!f.fitted);
    CHECK(!f.exact);
    CHECK(f.note.find("fewer than three") != std::string::npos);

    std::vector<std::pair<double, double>> empty;
    CHECK(!fit_order(empty).fitted);
}

TEST_CASE("all-sub-floor samples report the exact verdict") {
    std::vector<std::pair<double, double>> tiny = {
        {0.4, 1e-16}, {0.2, 3e-16}, {0.1, 2e-16}};
    OrderFit f = fit_order(tiny);
    CHECK(f.exact);
    CHECK(!f.fitted);
}

TEST_CASE("equal spacings cannot support a slope") {
    std::vector<std::pair<double, double>> flat = {
        {0.1, 0.01}, {0.1, 0.02}, {0.1, 0.03}};
    OrderFit f = fit_order(flat);
    CHECK(!f.fitted);
    CHECK(f.note.find("spacing") != std::string::npos);
}

TEST_CASE("constant errors fit a zero slope") {
    std::vector<std::pair<double, double>> stuck = {
        {0.4, 0.5}, {0.2, 0.5}, {0.1, 0.5}, {0.05, 0.5}};
    OrderFit f = fit_order(stuck);
    REQUIRE(f.fitted);
    CHECK(f.slope == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("moment estimates average the p-th powers") {
    std::vector<double> e = {1.0, 2.0, 3.0};
    MomentEstimate m1 = moment_estimate(e, 1.0, 42);
    CHECK(m1.value == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(m1.sample_count == 3);
    CHECK(!m1.degenerate);

    MomentEstimate m2 = moment_estimate(e, 2.0, 42);
    CHECK(m2.value == doctest::Approx(14.0 / 3.0).epsilon(1e-15));

    // signs are folded away
    std::vector<double> neg = {-1.0, 2.0, -3.0};
    CHECK(moment_estimate(neg, 1.0).value == doctest::Approx(2.0).epsilon(1e-15));
}

TEST_CASE("single samples are flagged as degenerate") {
    std::vector<double> one = {0.7};
    MomentEstimate m = moment_estimate(one, 2.0);
    CHECK(m.degenerate);
    CHECK(m.half_width == 0.0);
    CHECK(m.value == doctest::Approx(0.49).epsilon(1e-15));
}

TEST_CASE("bootstrap half widths are deterministic and sensible") {
    std::vector<double> e;
    for (int i = 0; i < 50; ++i) e.push_back(0.5 + 0.01 * i);
    MomentEstimate a = moment_estimate(e, 2.0, 7);
    MomentEstimate b = moment_estimate(e, 2.0, 7);
    CHECK(a.value == b.value);
    CHECK(a.half_width == b.half_width); // same seed, bitwise identical
    CHECK(a.half_width > 0.0);
    CHECK(a.half_width < a.value); // spread far smaller than the mean here

    // identical samples have zero spread
    std::vector<double> same(20, 0.3);
    CHECK(moment_estimate(same, 2.0).half_width == 0.0);
}
