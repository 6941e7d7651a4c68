#pragma once

#include <functional>
#include <span>
#include <string>

#include "sfdlab/errors.hpp"

namespace sfdlab {

/// Scalar coefficient as a deterministic function of (t, x). Constant
/// fields short-circuit evaluation so stencil loops can hoist them.
class CoefficientField {
public:
    CoefficientField() : constant_(0.0), is_constant_(true), label_("0") {}

    static CoefficientField constant(double c);
    static CoefficientField function(
        std::function<double(double, std::span<const double>)> f, std::string label);

    bool is_constant() const noexcept { return is_constant_; }
    double constant_value() const {
        if (!is_constant_) throw ValidationError("field '" + label_ + "' is not constant");
        return constant_;
    }
    bool is_zero() const noexcept { return is_constant_ && constant_ == 0.0; }

    double operator()(double t, std::span<const double> x) const {
        return is_constant_ ? constant_ : f_(t, x);
    }

    const std::string& label() const noexcept { return label_; }

private:
    std::function<double(double, std::span<const double>)> f_;
    double constant_;
    bool is_constant_;
    std::string label_;
};

/// Parses the built-in field expression language used in config files:
/// sums and products of numbers, pi, t, x (alias x1), x2, x3, sin(...),
/// cos(...), exp(...), with unary minus and integer powers via '^'.
/// Expressions without t or x fold to constant fields.
/// Examples: "2", "0.5*sin(x)", "1 + 0.25*cos(2*x)", "2*pi", "t*x".
CoefficientField parse_field(const std::string& text, int dim);

} // namespace sfdlab
