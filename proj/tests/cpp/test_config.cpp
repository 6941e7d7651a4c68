#include <doctest.h>

#include <cmath>
#include <string>

#include "sfdlab/config.hpp"

using namespace sfdlab;

namespace {

std::string message_of(const std::string& text) {
    try {
        parse_config(text);
    } catch (const ValidationError& e) {
        return e.what();
    }
    return "";
}

} // namespace

TEST_CASE("the benchmark preset expands to a full experiment") {
    ExperimentConfig cfg = parse_config("[problem]\npreset = example-2-4\n");
    CHECK(cfg.dim == 1);
    CHECK(cfg.drivers == 1);
    CHECK(cfg.pde.a(1, 1).constant_value() == 2.0);
    CHECK(cfg.pde.b(1, 0).constant_value() == 2.0);
    CHECK(cfg.horizon == 1.0);
    CHECK(cfg.scheme == SchemeKind::central);
    CHECK(cfg.points == 16);
    CHECK(cfg.levels == 3);
    CHECK(cfg.spacing(0) == doctest::Approx(0.1).epsilon(1e-15));
    CHECK(cfg.dt == 0.001);
    CHECK(cfg.solver == SolverKind::exact_fourier);
    REQUIRE(cfg.psi_modes.size() == 2);
    CHECK(cfg.psi_modes[0].k == 1);
    CHECK(cfg.psi_modes[0].re == 0.5);
    CHECK(cfg.psi_modes[1].k == -1);
    // the exact integrator defaults the reference to the closed form
    CHECK(cfg.reference == ReferenceKind::closed_form);
    CHECK(cfg.psi(0.0, std::vector<double>{0.0}) == doctest::Approx(1.0).epsilon(1e-15));

    // explicit keys override the preset
    ExperimentConfig over = parse_config(
        "[problem]\npreset = example-2-4\n[grid]\nlevels = 5\n");
    CHECK(over.levels == 5);
    CHECK(over.points == 16);
}

TEST_CASE("a fully spelled-out config parses") {
    std::string text =
        "# benchmark with every section written out\n"
        "[problem]\n"
        "dim = 1\n"
        "drivers = 1\n"
        "a11 = 2\n"
        "b1_1 = 2\n"
        "psi = cos(x)\n"
        "psi_modes = 1:0.5, -1:0.5\n"
        "horizon = 1\n"
        "[scheme]\n"
        "type = central\n"
        "[grid]\n"
        "period = 2pi\n"
        "points = 16\n"
        "levels = 4\n"
        "[time]\n"
        "policy = fixed\n"
        "dt = 0.001\n"
        "integrator = exact\n"
        "reference = closed-form\n"
        "[monte_carlo]\n"
        "seed_list = 5, 6, 7\n"
        "moment_p = 1, 2\n"
        "[extrapolation]\n"
        "enabled = yes\n"
        "order = 1\n"
        "power_step = 2\n"
        "[output]\n"
        "format = json\n"
        "norms = sup, l2h\n"
        "record_points = 9\n"
        "clip_positive = off\n";
    ExperimentConfig cfg = parse_config(text);
    CHECK(cfg.period == doctest::Approx(2.0 * std::acos(-1.0)).epsilon(1e-15));
    CHECK(cfg.spacing(0) == doctest::Approx(cfg.period / 16.0).epsilon(1e-15));
    CHECK(cfg.points_at(2) == 64);
    CHECK(cfg.levels == 4);
    REQUIRE(cfg.seeds.size() == 3);
    CHECK(cfg.seeds[1] == 6);
    REQUIRE(cfg.moment_p.size() == 2);
    CHECK(cfg.extrapolate);
    CHECK(cfg.extrap_order == 1);
    CHECK(cfg.format == "json");
    CHECK(cfg.record_points == 9);
    CHECK(!cfg.clip_positive);
    CHECK(cfg.desired_dt(3) == 0.001); // fixed policy ignores the level
}

TEST_CASE("time step policies scale with the spacing") {
    std::string text =
        "[problem]\npreset = example-2-4\n"
        "[time]\npolicy = h2\ndt_scale = 0.5\ndt_max = 0.01\n";
    ExperimentConfig cfg = parse_config(text);
    double h0 = cfg.spacing(0); // 0.1
    CHECK(cfg.desired_dt(0) == doctest::Approx(std::min(0.5 * h0 * h0, 0.01)).epsilon(1e-15));
    double h2 = cfg.spacing(2);
    CHECK(cfg.desired_dt(2) == doctest::Approx(0.5 * h2 * h2).epsilon(1e-15));

    // dt belongs to the fixed policy only
    std::string bad =
        "[problem]\npreset = example-2-4\n"
        "[time]\npolicy = h2\ndt = 0.001\n";
    CHECK(message_of(bad).find("dt") != std::string::npos);
}

TEST_CASE("unknown and duplicate keys are rejected with their location") {
    std::string unknown =
        "[problem]\npreset = example-2-4\nwibble = 3\n";
    std::string msg = message_of(unknown);
    CHECK(msg.find("unknown key 'wibble'") != std::string::npos);
    CHECK(msg.find("line 3") != std::string::npos);

    std::string dup = "[grid]\npoints = 8\npoints = 16\n";
    std::string dmsg = message_of(dup);
    CHECK(dmsg.find("duplicate key 'points'") != std::string::npos);

    std::string bad_section = "[gird]\npoints = 8\n";
    CHECK(message_of(bad_section).find("unknown section") != std::string::npos);

    std::string stray = "points = 8\n";
    CHECK(message_of(stray).find("outside any [section]") != std::string::npos);
}

TEST_CASE("missing required keys are listed exhaustively") {
    std::string text = "[problem]\ndim = 1\ndrivers = 0\n";
    std::string msg = message_of(text);
    CHECK(msg.find("missing required key") != std::string::npos);
    CHECK(msg.find("problem.psi") != std::string::npos);
    CHECK(msg.find("problem.horizon") != std::string::npos);
    CHECK(msg.find("scheme.type") != std::string::npos);
    CHECK(msg.find("grid.points") != std::string::npos);
    CHECK(msg.find("grid.levels") != std::string::npos);
    CHECK(msg.find("grid.h") != std::string::npos);
}

TEST_CASE("value validation names the offending field") {
    std::string neg_h =
        "[problem]\npreset = example-2-4\n"
        "[grid]\nh = -0.1\n";
    // the preset supplies grid.h too, so the explicit key must win the clash
    std::string msg = message_of(neg_h);
    CHECK(msg.find("grid.h") != std::string::npos);
    CHECK(msg.find("must be > 0") != std::string::npos);

    std::string both =
        "[problem]\npreset = example-2-4\n[grid]\nperiod = 1\n";
    // the preset's h plus an explicit period: only one may be given...
    ExperimentConfig cfg = parse_config(both);
    // ...but a preset value yields to the explicit key instead of clashing
    CHECK(cfg.period == 1.0);

    std::string real_both =
        "[problem]\npreset = example-2-4\n[grid]\nh = 0.1\nperiod = 1\n";
    CHECK(message_of(real_both).find("either grid.h or grid.period") != std::string::npos);

    std::string bad_points = "[problem]\npreset = example-2-4\n[grid]\npoints = 2\n";
    CHECK(message_of(bad_points).find("points") != std::string::npos);

    std::string bad_norm =
        "[problem]\npreset = example-2-4\n[output]\nnorms = sup, l3h\n";
    CHECK(message_of(bad_norm).find("l3h") != std::string::npos);
}

TEST_CASE("coefficient keys live in the upper triangle") {
    std::string lower =
        "[problem]\ndim = 1\ndrivers = 0\na11 = 1\na10 = 0.5\npsi = sin(x)\nhorizon = 1\n"
        "[scheme]\ntype = central\n[grid]\nh = 0.5\npoints = 8\nlevels = 1\n"
        "[time]\npolicy = fixed\ndt = 0.01\n";
    std::string msg = message_of(lower);
    CHECK(msg.find("give a01 instead") != std::string::npos);

    std::string upper =
        "[problem]\ndim = 1\ndrivers = 0\na11 = 1\na01 = 0.5\npsi = sin(x)\nhorizon = 1\n"
        "[scheme]\ntype = upwind\ntheta = 0.3\n[grid]\nh = 0.5\npoints = 8\nlevels = 1\n"
        "[time]\npolicy = fixed\ndt = 0.01\n";
    ExperimentConfig cfg = parse_config(upper);
    CHECK(cfg.pde.a(0, 1).constant_value() == 0.5);
    CHECK(cfg.pde.a(1, 0).constant_value() == 0.5); // symmetric mirror
    CHECK(cfg.scheme == SchemeKind::upwind);
    REQUIRE(cfg.theta.size() == 1);
    CHECK(cfg.theta[0] == 0.3);
}

TEST_CASE("cross-field requirements are enforced") {
    // upwind needs a weight for every axis
    std::string upwind_bare =
        "[problem]\npreset = example-2-4\n[scheme]\ntype = upwind\n";
    CHECK(message_of(upwind_bare).find("theta") != std::string::npos);

    // the closed-form reference needs the spectral form of psi
    std::string no_modes =
        "[problem]\ndim = 1\ndrivers = 1\na11 = 2\nb1_1 = 2\npsi = cos(x)\nhorizon = 1\n"
        "[scheme]\ntype = central\n[grid]\nh = 0.1\npoints = 16\nlevels = 2\n"
        "[time]\npolicy = fixed\ndt = 0.001\nintegrator = exact\n";
    CHECK(message_of(no_modes).find("psi_modes") != std::string::npos);

    // seed count and explicit list cannot both be given
    std::string seeds =
        "[problem]\npreset = example-2-4\n[monte_carlo]\nseeds = 4\nseed_list = 1, 2\n";
    CHECK(message_of(seeds).find("monte_carlo") != std::string::npos);

    // the count form expands from the base seed
    std::string counted =
        "[problem]\npreset = example-2-4\n[monte_carlo]\nseeds = 3\nbase_seed = 40\n";
    ExperimentConfig cfg = parse_config(counted);
    REQUIRE(cfg.seeds.size() == 3);
    CHECK(cfg.seeds[0] == 40);
    CHECK(cfg.seeds[2] == 42);
}

TEST_CASE("scalar shorthand accepts pi multiples") {
    std::string text =
        "[problem]\npreset = example-2-4\n[grid]\nperiod = pi\n";
    CHECK(parse_config(text).period == doctest::Approx(std::acos(-1.0)).epsilon(1e-15));
    std::string neg =
        "[problem]\npreset = example-2-4\nhorizon = 0.5\n";
    CHECK(parse_config(neg).horizon == 0.5);
}

TEST_CASE("comments and blank lines are ignored") {
    std::string text =
        "# leading comment\n"
        "\n"
        "[problem]  ; trailing note\n"
        "preset = example-2-4  # inline comment\n"
        "\n";
    CHECK(parse_config(text).dim == 1);
}
