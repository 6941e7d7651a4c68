#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "sfdlab/integrator.hpp"
#include "sfdlab/rational.hpp"
#include "sfdlab/spectral.hpp"
#include "sfdlab/stats.hpp"

namespace sfdlab {

/// Parity constant of the difference-operator Taylor expansion:
/// 1 for even n, 0 for odd n.
int b_const(int n);

/// Weight of the mixed-derivative term at order n, split j:
/// n! / ((j+1)! (n-j+1)!) when n and j are both even, else 0. Exact.
Rational a_const(int n, int j);

/// The differential operators of the h-power expansion of L^h and M^{h,r},
/// assembled on one lattice with spectral (Fourier) directional
/// derivatives. Order 0 is the scheme's continuum limit
///   L(0) f = sum_{lam,mu} a(lam,mu) d_lam d_mu f + sum_g (p-q) d_g f,
/// and for n >= 1
///   L(n) f = sum_{lam,mu != 0} a(lam,mu) sum_j A_{nj} d_lam^{j+1} d_mu^{n-j+1} f
///          + (n+1)^{-1} sum_g (a(0,g)+a(g,0)) B_n d_g^{n+1} f
///          + (n+1)^{-1} sum_g (p(g) + (-1)^{n+1} q(g)) d_g^{n+1} f,
///   M(n)r f = (n+1)^{-1} B_n sum_{g != 0} b(g,r) d_g^{n+1} f   (n >= 1),
/// with d_lam the directional derivative along lam and d_0 the identity.
/// Every apply checks the input for spectral headroom: if the top third
/// of the Fourier range carries more than 1e-8 of the energy, a warning
/// is recorded (derivative powers amplify exactly those modes).
class ExpansionOperators {
public:
    ExpansionOperators(const StencilSpec& spec, int max_order, const Lattice& lat);

    const StencilSpec& scheme() const noexcept { return *spec_; }
    int max_order() const noexcept { return max_order_; }
    const Lattice& lattice() const noexcept { return fft_.lattice(); }

    GridFunction apply_Ln(int n, double t, const GridFunction& f);
    std::vector<GridFunction> apply_Mn(int n, double t, const GridFunction& f);

    int aliasing_warnings() const noexcept { return aliasing_warnings_; }
    const std::string& last_warning() const noexcept { return last_warning_; }

private:
    void check_order(int n) const;
    void check_input(const GridFunction& f);

    const StencilSpec* spec_;
    int max_order_;
    SpectralTransform fft_;
    int aliasing_warnings_ = 0;
    std::string last_warning_;
};

/// The expansion coefficients v^(0)..v^(k) of one pathwise run, on a
/// shared lattice, path and record grid. v^(0) is the continuum solution
/// supplied by the caller; every higher order starts from zero.
struct ExpansionHierarchy {
    std::vector<Trajectory> orders;
    int aliasing_warnings = 0;
};

/// Euler-Maruyama integration of the triangular hierarchy
///   dv(n) = (L(0) v(n) + sum_{l=1}^{n} C(n,l) L(l) v(n-l)) dt
///         + sum_r (M(0)r v(n) + sum_l C(n,l) M(l)r v(n-l)) dw^r,
/// v(n)(0) = 0 for n >= 1, marching all orders in lockstep over the
/// path's time grid up to the last record time. v0_at supplies the
/// continuum solution v(0) at any step time (exact oracle or fine-grid
/// reference). dt must equal the path's step size.
ExpansionHierarchy solve_hierarchy(ExpansionOperators& ops, int k,
                                   const std::function<GridFunction(double)>& v0_at,
                                   const WienerPath& path, double dt,
                                   std::span<const double> record_times);

/// Same, with v(0) supplied as a trajectory whose record grid covers
/// every path node up to its last record time.
ExpansionHierarchy solve_hierarchy(ExpansionOperators& ops, int k, const Trajectory& v0,
                                   const WienerPath& path, double dt);

struct RemainderOrders {
    OrderFit l_fit;                    // order of || (L^h - sum (h^i/i!) L(i)) phi ||
    OrderFit m_fit;                    // order of the squared M analogue
    std::vector<double> h;             // ladder, coarse to fine
    std::vector<double> l_residual;    // grid L2 residuals of the drift expansion
    std::vector<double> m_residual_sq; // sum over drivers of squared residual norms
};

/// Measures how fast the truncated expansion of the difference operators
/// converges: on each lattice of the ladder, compares L^h phi against
/// sum_{i<=n} (h^i/i!) L(i) phi (and M^{h,r} against its expansion, with
/// the driver-summed squared norm) and fits the decay against h. The
/// expected orders are n+1 for the drift and 2(n+1) for the squared
/// diffusion residual; symmetric schemes gain one extra power when n is
/// even because the odd term vanishes.
RemainderOrders remainder_order_check(const StencilSpec& spec, int n,
                                      const std::function<double(std::span<const double>)>& phi,
                                      std::span<const Lattice> levels);

} // namespace sfdlab
