#include <doctest.h>

#include <cmath>
#include <complex>
#include <sstream>
#include <vector>

#include "sfdlab/integrator.hpp"

using namespace sfdlab;

namespace {

// du = 2 u'' dt + 2 u' dw, the constant-coefficient benchmark problem.
TargetPDE benchmark_pde() {
    TargetPDE pde(1, 1);
    pde.set_a(1, 1, CoefficientField::constant(2.0));
    pde.set_b(1, 0, CoefficientField::constant(2.0));
    return pde;
}

std::vector<ModeState> cosine_modes() {
    return {{1, {0.5, 0.0}}, {-1, {0.5, 0.0}}};
}

} // namespace

TEST_CASE("scheme symbols on oscillatory data") {
    StencilSpec spec = from_pde_central(benchmark_pde());
    double h = 0.1;
    SymbolReport rep = fourier_symbol(spec, 1, h);
    std::complex<double> s1(0.0, std::sin(h) / h);
    CHECK(std::abs(rep.drift - 2.0 * s1 * s1) < 1e-14);
    REQUIRE(rep.diffusion.size() == 1);
    CHECK(std::abs(rep.diffusion[0] - 2.0 * s1) < 1e-14);

    // the zero direction contributes the identity
    StencilSpec zeroth(1, 0, {DirectionVector::axis(1, 0)});
    zeroth.set_a(DirectionVector::zero(1), DirectionVector::zero(1),
                 CoefficientField::constant(3.0));
    CHECK(std::abs(fourier_symbol(zeroth, 5, h).drift - 3.0) < 1e-14);

    // one-sided weights enter through the one-sided quotients
    StencilSpec onesided(1, 0, {DirectionVector::axis(1, 0)});
    onesided.set_p(DirectionVector::axis(1, 0), CoefficientField::constant(0.5));
    std::complex<double> fplus = (std::exp(std::complex<double>(0.0, 2.0 * h)) - 1.0) / h;
    CHECK(std::abs(fourier_symbol(onesided, 2, h).drift - 0.5 * fplus) < 1e-14);
}

TEST_CASE("continuum symbols mirror the target coefficients") {
    SymbolReport rep = continuum_symbol(benchmark_pde(), 3);
    CHECK(std::abs(rep.drift - std::complex<double>(-18.0, 0.0)) < 1e-13);
    REQUIRE(rep.diffusion.size() == 1);
    CHECK(std::abs(rep.diffusion[0] - std::complex<double>(0.0, 6.0)) < 1e-13);

    TargetPDE mixed(1, 1);
    mixed.set_a(1, 1, CoefficientField::constant(1.0));
    mixed.set_a(0, 1, CoefficientField::constant(0.3));
    mixed.set_a(0, 0, CoefficientField::constant(-0.5));
    mixed.set_b(1, 0, CoefficientField::constant(0.7));
    mixed.set_b(0, 0, CoefficientField::constant(0.2));
    SymbolReport m = continuum_symbol(mixed, 2);
    // -k^2 + (a01 + a10)(ik) + a00 at k = 2
    CHECK(std::abs(m.drift - std::complex<double>(-4.5, 1.2)) < 1e-13);
    CHECK(std::abs(m.diffusion[0] - std::complex<double>(0.2, 1.4)) < 1e-13);
}

TEST_CASE("mode-law values on the pinned path reproduce the published numbers") {
    StencilSpec spec = from_pde_central(benchmark_pde());
    std::vector<double> terminal = {1.0};
    WienerPath path = WienerPath::conditioned_linear(1, 1000, 1.0, terminal);
    std::vector<double> record = {1.0};
    std::vector<ModeState> modes = cosine_modes();

    Lattice coarse(1, 16, 0.1);
    double imag = 0.0;
    Trajectory u_h = fourier_exact_solve(spec, modes, coarse, path, record, &imag);
    CHECK(u_h.state_at(1.0)[0] == doctest::Approx(-0.4131150562).epsilon(1e-8));
    CHECK(imag < 1e-12); // conjugate-symmetric modes give a real field

    Lattice fine(1, 32, 0.05);
    StencilSpec spec_fine = from_pde_central(benchmark_pde());
    Trajectory u_h2 = fourier_exact_solve(spec_fine, modes, fine, path, record);
    CHECK(u_h2.state_at(1.0)[0] == doctest::Approx(-0.415389039).epsilon(1e-8));

    Trajectory u = continuum_exact_solve(benchmark_pde(), modes, coarse, path, record);
    CHECK(u.state_at(1.0)[0] == doctest::Approx(-0.4161468365).epsilon(1e-8));

    // trajectory carries its path identity
    CHECK(u_h.path_seed == path.seed());
    CHECK(u_h.path_level == path.level());
}

TEST_CASE("a lone unpaired mode leaves a visible imaginary residue") {
    StencilSpec spec = from_pde_central(benchmark_pde());
    WienerPath path = WienerPath::conditioned_linear(1, 10, 1.0, std::vector<double>{1.0});
    std::vector<ModeState> lone = {{1, {1.0, 0.0}}};
    Lattice lat(1, 8, 0.25);
    double imag = 0.0;
    std::vector<double> record = {1.0};
    fourier_exact_solve(spec, lone, lat, path, record, &imag);
    CHECK(imag > 0.1);
}

TEST_CASE("explicit stepping converges to the mode law on a fine time grid") {
    double period = 2.0 * std::acos(-1.0);
    Lattice lat(1, 8, period / 8.0);
    StencilSpec spec = from_pde_central(benchmark_pde());
    double T = 0.25;
    WienerPath path = WienerPath::sample(1, 16384, T, 77);
    std::vector<double> record = {0.0, T};

    ProblemData prob{GridFunction::sample(
                         lat, [](std::span<const double> x) { return std::cos(x[0]); }),
                     {}, {}, T};

    std::string advisory;
    Trajectory em = em_solve(spec, prob, path, record, &advisory);
    CHECK(advisory.empty()); // dt is far below the explicit heuristic

    Trajectory exact = fourier_exact_solve(spec, cosine_modes(), lat, path, record);
    double err = 0.0;
    const GridFunction& a = em.state_at(T);
    const GridFunction& b = exact.state_at(T);
    for (std::size_t i = 0; i < a.size(); ++i) err = std::max(err, std::abs(a[i] - b[i]));
    CHECK(err < 0.02);

    // the initial record is the initial value itself
    const GridFunction& first = em.state_at(0.0);
    for (std::size_t i = 0; i < first.size(); ++i) CHECK(first[i] == prob.psi[i]);
}

TEST_CASE("zero operators leave the state constant; free terms accumulate exactly") {
    Lattice lat(1, 8, 0.25);
    StencilSpec zero_spec(1, 1, {DirectionVector::axis(1, 0)});
    WienerPath path = WienerPath::sample(1, 64, 1.0, 11);
    std::vector<double> record = {0.0, 1.0};

    ProblemData still{GridFunction::sample(
                          lat, [](std::span<const double> x) { return 1.0 + x[0]; }),
                      {}, {}, 1.0};
    Trajectory frozen = em_solve(zero_spec, still, path, record);
    const GridFunction& end = frozen.state_at(1.0);
    for (std::size_t i = 0; i < end.size(); ++i) CHECK(end[i] == still.psi[i]);

    // drift forcing: du = c dt integrates to psi + c T
    ProblemData forced = still;
    forced.free_drift = [&lat](double) { return GridFunction(lat, 0.75); };
    Trajectory drifted = em_solve(zero_spec, forced, path, record);
    const GridFunction& dend = drifted.state_at(1.0);
    for (std::size_t i = 0; i < dend.size(); ++i)
        CHECK(dend[i] == doctest::Approx(still.psi[i] + 0.75).epsilon(1e-12));

    // diffusion forcing: du = g dw telescopes to psi + g w_T
    ProblemData noisy = still;
    noisy.free_diffusion = [&lat](double, int) { return GridFunction(lat, 1.0); };
    Trajectory pushed = em_solve(zero_spec, noisy, path, record);
    double wT = path.value(0, path.step_count());
    const GridFunction& nend = pushed.state_at(1.0);
    for (std::size_t i = 0; i < nend.size(); ++i)
        CHECK(nend[i] == doctest::Approx(still.psi[i] + wT).epsilon(1e-12));
}

TEST_CASE("oversized time steps earn an advisory and blowups abort with the step") {
    Lattice lat(1, 32, 2.0 * std::acos(-1.0) / 32.0);
    StencilSpec spec = from_pde_central(benchmark_pde());
    ProblemData prob{GridFunction::sample(
                         lat, [](std::span<const double> x) { return std::cos(x[0]); }),
                     {}, {}, 1.0};

    // four huge steps: advisory fires, state may still be finite
    WienerPath coarse = WienerPath::conditioned_linear(1, 4, 1.0, std::vector<double>{0.0});
    std::vector<double> record = {1.0};
    std::string advisory;
    try {
        em_solve(spec, prob, coarse, record, &advisory);
    } catch (const SolverAbort&) {
        // acceptable: the unstable run may already overflow here
    }
    CHECK(!advisory.empty());

    // four hundred huge steps: the explicit iteration must overflow
    WienerPath longer =
        WienerPath::conditioned_linear(1, 400, 100.0, std::vector<double>{0.0});
    std::vector<double> late = {100.0};
    prob.horizon = 100.0;
    bool aborted = false;
    try {
        em_solve(spec, prob, longer, late);
    } catch (const SolverAbort& e) {
        aborted = true;
        CHECK(e.step() > 0);
        CHECK(e.step() <= 400);
    }
    CHECK(aborted);
}

TEST_CASE("record bookkeeping is strict") {
    Lattice lat(1, 8, 0.25);
    StencilSpec spec(1, 0, {DirectionVector::axis(1, 0)});
    WienerPath path = WienerPath::sample(0, 10, 1.0, 1);
    ProblemData prob{GridFunction(lat, 1.0), {}, {}, 1.0};

    std::vector<double> record = {0.0, 0.5, 1.0};
    Trajectory traj = em_solve(spec, prob, path, record);
    REQUIRE(traj.states.size() == 3);
    CHECK(traj.record_times == record);
    CHECK_NOTHROW(traj.state_at(0.5));
    CHECK_THROWS_AS(traj.state_at(0.3), ValidationError);

    // record times that are not path nodes are rejected up front
    std::vector<double> off = {0.0, 0.33};
    CHECK_THROWS_AS(em_solve(spec, prob, path, off), ValidationError);
}

TEST_CASE("trajectory exports round-trip and the csv header names the axes") {
    Lattice lat(1, 6, 0.5);
    StencilSpec spec(1, 0, {DirectionVector::axis(1, 0)});
    WienerPath path = WienerPath::sample(0, 8, 1.0, 2);
    ProblemData prob{GridFunction::sample(
                         lat, [](std::span<const double> x) { return std::sin(1.0 + x[0]); }),
                     {}, {}, 1.0};
    std::vector<double> record = {0.0, 0.5, 1.0};
    Trajectory traj = em_solve(spec, prob, path, record);

    std::stringstream csv;
    write_trajectory_csv(traj, csv);
    std::string header;
    std::getline(csv, header);
    CHECK(header == "time,x1,value");

    std::stringstream bin(std::ios::in | std::ios::out | std::ios::binary);
    write_trajectory_binary(traj, bin);
    Trajectory back = read_trajectory_binary(bin);
    REQUIRE(back.states.size() == traj.states.size());
    CHECK(back.lattice == traj.lattice);
    CHECK(back.record_times == traj.record_times);
    for (std::size_t s = 0; s < traj.states.size(); ++s)
        for (std::size_t i = 0; i < traj.states[s].size(); ++i)
            CHECK(back.states[s][i] == traj.states[s][i]);
}
