#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sfdlab/field.hpp"
#include "sfdlab/scheme.hpp"

namespace sfdlab {

enum class SchemeKind { central, upwind };
enum class DtPolicy { fixed, h2, h4 };
enum class SolverKind { euler_maruyama, exact_fourier };
enum class ReferenceKind { closed_form, fine_grid };

/// One explicitly given Fourier mode of the initial value, for runs that
/// use the closed-form reference.
struct ModeSpec {
    int k = 0;
    double re = 0.0;
    double im = 0.0;
};

/// Everything a ladder study needs, parsed from the sectioned text format
/// ([problem], [scheme], [grid], [time], [monte_carlo], [extrapolation],
/// [output]). Fields default to the values the parser applies when the
/// corresponding key is absent.
struct ExperimentConfig {
    // [problem]
    int dim = 1;
    int drivers = 0;
    TargetPDE pde{1, 0};
    std::string psi_expr;
    CoefficientField psi;
    CoefficientField f;              // drift forcing, zero by default
    std::vector<CoefficientField> g; // one diffusion forcing per driver
    std::vector<ModeSpec> psi_modes; // optional spectral form of psi
    double horizon = 1.0;

    // [scheme]
    SchemeKind scheme = SchemeKind::central;
    std::vector<double> theta; // upwind weights, one per axis

    // [grid]
    int points = 0;      // nodes per axis at the coarsest level
    int levels = 1;      // ladder length; level i halves the spacing i times
    double period = 0.0; // torus period, resolved from h or period

    // [time]
    DtPolicy dt_policy = DtPolicy::fixed;
    double dt = 0.0;       // base step for the fixed policy
    double dt_scale = 1.0; // multiplier on h^2 or h^4 for the power policies
    double dt_max = 1e-3;
    SolverKind solver = SolverKind::euler_maruyama;
    ReferenceKind reference = ReferenceKind::fine_grid;

    // [monte_carlo]
    std::vector<std::uint64_t> seeds = {0};
    std::vector<double> moment_p = {2.0};

    // [extrapolation]
    bool extrapolate = false;
    int extrap_order = 1;
    int power_step = 2;

    // [output]
    std::string out_dir = ".";
    std::string format = "csv";
    std::vector<std::string> norms = {"sup", "l2h"};
    int record_points = 5;
    bool clip_positive = false;

    double spacing(int level) const;   // h0 / 2^level
    int points_at(int level) const;    // N0 * 2^level
    double desired_dt(int level) const; // the dt policy evaluated at that spacing
};

/// Parses the sectioned key = value text. Unknown sections or keys are
/// rejected with their line number; missing required keys are collected
/// and reported in one message. Values may use field expressions where a
/// coefficient is expected and "2pi"-style shorthand where a length is.
ExperimentConfig parse_config(const std::string& text);

/// Reads the file and delegates to parse_config, prefixing errors with
/// the path.
ExperimentConfig load_config_file(const std::string& path);

} // namespace sfdlab
