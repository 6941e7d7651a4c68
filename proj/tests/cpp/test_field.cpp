#include <doctest.h>

#include <cmath>
#include <vector>

#include "sfdlab/field.hpp"

using namespace sfdlab;

namespace {

double eval(const CoefficientField& f, double t, std::vector<double> x) {
    return f(t, x);
}

} // namespace

TEST_CASE("literals and constant folding") {
    CHECK(parse_field("2", 1).constant_value() == 2.0);
    CHECK(parse_field("-3.5", 1).constant_value() == -3.5);
    CHECK(parse_field("1e-3", 1).constant_value() == 1e-3);
    CHECK(parse_field("pi", 1).constant_value() ==
          doctest::Approx(std::acos(-1.0)).epsilon(1e-15));
    CHECK(parse_field("2*pi", 1).constant_value() ==
          doctest::Approx(2.0 * std::acos(-1.0)).epsilon(1e-15));

    // expressions without t or x fold to constants, including through calls
    CoefficientField c = parse_field("sin(1) + cos(2)^2", 1);
    CHECK(c.is_constant());
    CHECK(c.constant_value() ==
          doctest::Approx(std::sin(1.0) + std::pow(std::cos(2.0), 2)).epsilon(1e-15));

    CHECK(parse_field("0", 1).is_zero());
    CHECK(!parse_field("1", 1).is_zero());
    CHECK(!parse_field("x", 1).is_constant());
    CHECK(!parse_field("t", 1).is_constant());
}

TEST_CASE("arithmetic, precedence and powers") {
    CHECK(parse_field("2 + 3*4", 1).constant_value() == 14.0);
    CHECK(parse_field("(2 + 3)*4", 1).constant_value() == 20.0);
    CHECK(parse_field("1 - 0.25", 1).constant_value() == 0.75);
    CHECK(parse_field("3/4", 1).constant_value() == 0.75);
    CHECK(parse_field("2^3", 1).constant_value() == 8.0);
    CHECK(parse_field("2^3^2", 1).constant_value() == 512.0); // right-assoc
    CHECK(parse_field("-2 + 1", 1).constant_value() == -1.0);
}

TEST_CASE("spatial and temporal variables") {
    CoefficientField f = parse_field("0.5*sin(x)", 1);
    CHECK(eval(f, 0.0, {std::acos(-1.0) / 2.0}) == doctest::Approx(0.5).epsilon(1e-15));

    CoefficientField g = parse_field("1 + 0.25*cos(2*x)", 1);
    CHECK(eval(g, 0.0, {0.0}) == doctest::Approx(1.25).epsilon(1e-15));

    CoefficientField tx = parse_field("t*x", 1);
    CHECK(eval(tx, 2.0, {3.0}) == doctest::Approx(6.0).epsilon(1e-15));

    // x aliases x1; higher axes address the other components
    CoefficientField two_d = parse_field("x1 + 10*x2", 2);
    CHECK(eval(two_d, 0.0, {1.5, 2.0}) == doctest::Approx(21.5).epsilon(1e-15));

    CoefficientField sq = parse_field("x^2 + exp(0)", 1);
    CHECK(eval(sq, 0.0, {3.0}) == doctest::Approx(10.0).epsilon(1e-15));

    CHECK(parse_field("sin(x)^2 + cos(x)^2", 1)(0.0, std::vector<double>{0.7}) ==
          doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("malformed expressions are rejected") {
    CHECK_THROWS_AS(parse_field("", 1), ValidationError);
    CHECK_THROWS_AS(parse_field("2 +", 1), ValidationError);
    CHECK_THROWS_AS(parse_field("sin(", 1), ValidationError);
    CHECK_THROWS_AS(parse_field("foo(x)", 1), ValidationError);
    CHECK_THROWS_AS(parse_field("2 2", 1), ValidationError);
    // axes beyond the problem dimension are rejected
    CHECK_THROWS_AS(parse_field("x2", 1), ValidationError);
    CHECK_THROWS_AS(parse_field("x3", 2), ValidationError);
    CHECK_NOTHROW(parse_field("x3", 3));
}

TEST_CASE("constant accessor guards non-constant fields") {
    CoefficientField f = parse_field("sin(x)", 1);
    CHECK_THROWS_AS(f.constant_value(), ValidationError);
    CoefficientField c = CoefficientField::constant(4.25);
    CHECK(c.constant_value() == 4.25);
    CHECK(CoefficientField().is_zero()); // default field is the zero constant
}
