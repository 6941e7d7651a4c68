#pragma once

#include <complex>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "sfdlab/scheme.hpp"
#include "sfdlab/wiener.hpp"

namespace sfdlab {

/// Solution snapshots of one pathwise run, tagged with the identity of
/// the driving realization so downstream combiners can verify that two
/// trajectories share a path.
struct Trajectory {
    Lattice lattice;
    std::vector<double> record_times;
    std::vector<GridFunction> states; // one per record time
    std::uint64_t path_seed = 0;
    int path_level = 0;

    const GridFunction& state_at(double t) const;
};

/// One Fourier mode of the initial value: coefficient of e^{ikx}.
struct ModeState {
    int k = 0;
    std::complex<double> amplitude;
};

/// Explicit Euler-Maruyama (Ito, left-endpoint) integration of
///   du = (L^h u + f_t) dt + sum_r (M^{h,r} u + g_t^r) dw^r
/// over the path's own time grid, starting from problem.psi. States are
/// recorded at the requested times, which must be nodes of the path grid.
/// A non-finite state aborts with the offending step index. When dt
/// exceeds the explicit-scheme heuristic h^2 / (2 max|a| max|lam|^2 n0^2)
/// a human-readable advisory is written to *advisory (empty otherwise);
/// the run still proceeds, since degenerate schemes are often merely
/// neutrally stable.
Trajectory em_solve(const StencilSpec& spec, const ProblemData& problem,
                    const WienerPath& path, std::span<const double> record_times,
                    std::string* advisory = nullptr);

/// Symbols of the scheme operators on the oscillation e^{ikx} for a
/// one-dimensional constant-coefficient scheme with spacing h:
///   drift     = sum a(lam,mu) s_lam s_mu + sum (p f+ - q f-)
///   diffusion = sum b(lam,r) s_lam      (one entry per driver)
/// with s_lam = i sin(k h lam)/h, s_0 = 1, f± = (e^{±ikh lam} - 1)/(±h).
struct SymbolReport {
    std::complex<double> drift;
    std::vector<std::complex<double>> diffusion;
};
SymbolReport fourier_symbol(const StencilSpec& spec, int k, double h);

/// Symbols of the continuum operators on e^{ikx} for a one-dimensional
/// constant-coefficient problem:
///   drift       = a11 (ik)^2 + (a01 + a10)(ik) + a00
///   diffusion_r = b1r (ik) + b0r
SymbolReport continuum_symbol(const TargetPDE& pde, int k);

/// Exact pathwise solution for constant-coefficient one-dimensional
/// schemes: each mode follows dA = l A dt + sum_r m_r A dw^r, solved in
/// closed form A(t) = A(0) exp((l - sum m_r^2 / 2) t + sum m_r w^r_t),
/// and the trajectory is the real part of sum_k A_k(t) e^{ikx} on the
/// lattice. Zero time-discretization error, so it serves as the oracle
/// for em_solve. If max_imag is given it receives the largest imaginary
/// residue dropped by taking the real part.
Trajectory fourier_exact_solve(const StencilSpec& spec, std::span<const ModeState> modes,
                               const Lattice& lat, const WienerPath& path,
                               std::span<const double> record_times,
                               double* max_imag = nullptr);

/// Exact pathwise solution of the continuum problem itself (no spatial or
/// temporal discretization error), sampled at the lattice nodes. Serves as
/// the closed-form reference in convergence studies when the coefficients
/// are constant and the initial value has finitely many modes.
Trajectory continuum_exact_solve(const TargetPDE& pde, std::span<const ModeState> modes,
                                 const Lattice& lat, const WienerPath& path,
                                 std::span<const double> record_times,
                                 double* max_imag = nullptr);

/// Flat CSV export: header "time,x1[,x2[,x3]],value", one row per node
/// per record time, 17 significant digits.
void write_trajectory_csv(const Trajectory& traj, std::ostream& os);

/// Compact binary dump: int32 d, int32 N, double h, int32 record count,
/// record times, then the states row-major in record order.
void write_trajectory_binary(const Trajectory& traj, std::ostream& os);
Trajectory read_trajectory_binary(std::istream& is);

} // namespace sfdlab
