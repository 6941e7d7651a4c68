#include "sfdlab/expansion.hpp"

#include <cmath>
#include <sstream>

#include "sfdlab/grid_ops.hpp"

namespace sfdlab {

int b_const(int n) {
    if (n < 0) throw ValidationError("expansion order must be >= 0");
    return n % 2 == 0 ? 1 : 0;
}

Rational a_const(int n, int j) {
    if (n < 0) throw ValidationError("expansion order must be >= 0");
    if (j < 0 || j > n)
        throw ValidationError("split index j=" + std::to_string(j) + " outside 0.." +
                              std::to_string(n));
    if (n % 2 != 0 || j % 2 != 0) return Rational(0);
    auto factorial = [](int v) {
        Rational::Int f = 1;
        for (int i = 2; i <= v; ++i) f *= i;
        return f;
    };
    return Rational(factorial(n), factorial(j + 1) * factorial(n - j + 1));
}

ExpansionOperators::ExpansionOperators(const StencilSpec& spec, int max_order,
                                       const Lattice& lat)
    : spec_(&spec), max_order_(max_order), fft_(lat) {
    if (max_order < 0) throw ValidationError("max order must be >= 0");
    if (lat.dim() != spec.dim())
        throw ValidationError("lattice dimension does not match the scheme");
}

void ExpansionOperators::check_order(int n) const {
    if (n < 0 || n > max_order_)
        throw ValidationError("expansion order " + std::to_string(n) +
                              " outside this instance's range 0.." +
                              std::to_string(max_order_));
}

void ExpansionOperators::check_input(const GridFunction& f) {
    if (!(f.lattice() == fft_.lattice()))
        throw ValidationError("input lives on a different lattice than the operators");
    double frac = fft_.high_mode_energy_fraction(f);
    if (frac > 1e-8) {
        ++aliasing_warnings_;
        std::ostringstream msg;
        msg << "warning: input carries " << frac
            << " of its energy in the top Fourier third; derivative powers "
            << "amplify these modes and the result may be aliased";
        last_warning_ = msg.str();
    }
}

GridFunction ExpansionOperators::apply_Ln(int n, double t, const GridFunction& f) {
    check_order(n);
    check_input(f);
    const Lattice& lat = fft_.lattice();
    const StencilSpec& s = *spec_;
    int n1 = s.direction_count();
    GridFunction out(lat);

    if (n == 0) {
        // The continuum limit: all direction pairs including the zero
        // vector (identity), plus the one-sided net drift p - q.
        auto spectrum = fft_.forward(f);
        for (int k = 0; k < n1; ++k) {
            for (int l = 0; l < n1; ++l) {
                const CoefficientField& c = s.a(k, l);
                if (c.is_zero()) continue;
                if (k == 0 && l == 0) {
                    axpy_field(out, c, t, f);
                    continue;
                }
                auto modes = spectrum;
                if (k > 0) fft_.apply_directional_multiplier(modes, s.direction(k), 1);
                if (l > 0) fft_.apply_directional_multiplier(modes, s.direction(l), 1);
                axpy_field(out, c, t, fft_.inverse_real(modes));
            }
        }
        for (int g = 1; g < n1; ++g) {
            if (s.p(g).is_zero() && s.q(g).is_zero()) continue;
            auto modes = spectrum;
            fft_.apply_directional_multiplier(modes, s.direction(g), 1);
            GridFunction deriv = fft_.inverse_real(modes);
            axpy_field(out, s.p(g), t, deriv, 1.0);
            axpy_field(out, s.q(g), t, deriv, -1.0);
        }
        return out;
    }

    bool even = (n % 2 == 0);
    // Odd orders keep only the (p + q) term; skip all transforms when it
    // is absent (symmetric schemes).
    bool any_pq = false;
    for (int g = 1; g < n1 && !any_pq; ++g)
        any_pq = !s.p(g).is_zero() || !s.q(g).is_zero();
    bool any_first = even || any_pq;
    bool any_second = even;
    if (!any_first && !any_second) return out;

    auto spectrum = fft_.forward(f);
    if (even) {
        for (int k = 1; k < n1; ++k) {
            for (int l = 1; l < n1; ++l) {
                const CoefficientField& c = s.a(k, l);
                if (c.is_zero()) continue;
                // sum_j A_{nj} d_k^{j+1} d_l^{n-j+1}, accumulated in
                // spectral space so one inverse transform serves the pair.
                std::vector<std::complex<double>> acc(spectrum.size(),
                                                      std::complex<double>(0.0));
                for (int j = 0; j <= n; j += 2) {
                    double w = a_const(n, j).to_double();
                    if (w == 0.0) continue;
                    auto modes = spectrum;
                    fft_.apply_directional_multiplier(modes, s.direction(k), j + 1);
                    fft_.apply_directional_multiplier(modes, s.direction(l), n - j + 1);
                    for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += w * modes[i];
                }
                axpy_field(out, c, t, fft_.inverse_real(acc));
            }
        }
    }
    double inv_np1 = 1.0 / static_cast<double>(n + 1);
    double q_sign = even ? -1.0 : 1.0; // (-1)^{n+1}
    for (int g = 1; g < n1; ++g) {
        bool first_order_here =
            (even && (!s.a(0, g).is_zero() || !s.a(g, 0).is_zero())) ||
            !s.p(g).is_zero() || !s.q(g).is_zero();
        if (!first_order_here) continue;
        auto modes = spectrum;
        fft_.apply_directional_multiplier(modes, s.direction(g), n + 1);
        GridFunction deriv = fft_.inverse_real(modes);
        if (even) {
            axpy_field(out, s.a(0, g), t, deriv, inv_np1);
            axpy_field(out, s.a(g, 0), t, deriv, inv_np1);
        }
        axpy_field(out, s.p(g), t, deriv, inv_np1);
        axpy_field(out, s.q(g), t, deriv, q_sign * inv_np1);
    }
    return out;
}

std::vector<GridFunction> ExpansionOperators::apply_Mn(int n, double t, const GridFunction& f) {
    check_order(n);
    check_input(f);
    const Lattice& lat = fft_.lattice();
    const StencilSpec& s = *spec_;
    int n1 = s.direction_count();
    int m = s.driver_count();
    std::vector<GridFunction> out(static_cast<std::size_t>(m), GridFunction(lat));
    if (m == 0) return out;

    if (n == 0) {
        auto spectrum = fft_.forward(f);
        for (int k = 0; k < n1; ++k) {
            bool needed = false;
            for (int r = 0; r < m && !needed; ++r) needed = !s.b(k, r).is_zero();
            if (!needed) continue;
            GridFunction deriv(lat);
            if (k == 0) {
                deriv = f;
            } else {
                auto modes = spectrum;
                fft_.apply_directional_multiplier(modes, s.direction(k), 1);
                deriv = fft_.inverse_real(modes);
            }
            for (int r = 0; r < m; ++r)
                axpy_field(out[static_cast<std::size_t>(r)], s.b(k, r), t, deriv);
        }
        return out;
    }

    if (b_const(n) == 0) return out; // odd orders vanish
    double inv_np1 = 1.0 / static_cast<double>(n + 1);
    auto spectrum = fft_.forward(f);
    for (int g = 1; g < n1; ++g) {
        bool needed = false;
        for (int r = 0; r < m && !needed; ++r) needed = !s.b(g, r).is_zero();
        if (!needed) continue;
        auto modes = spectrum;
        fft_.apply_directional_multiplier(modes, s.direction(g), n + 1);
        GridFunction deriv = fft_.inverse_real(modes);
        for (int r = 0; r < m; ++r)
            axpy_field(out[static_cast<std::size_t>(r)], s.b(g, r), t, deriv, inv_np1);
    }
    return out;
}

namespace {

long long binomial(int n, int l) {
    long long c = 1;
    for (int i = 1; i <= l; ++i) c = c * (n - l + i) / i;
    return c;
}

} // namespace

ExpansionHierarchy solve_hierarchy(ExpansionOperators& ops, int k,
                                   const std::function<GridFunction(double)>& v0_at,
                                   const WienerPath& path, double dt,
                                   std::span<const double> record_times) {
    if (k < 0) throw ValidationError("hierarchy depth must be >= 0");
    if (k > ops.max_order())
        throw ValidationError("hierarchy depth exceeds the operators' max order");
    if (record_times.empty()) throw ValidationError("no record times requested");
    if (!v0_at) throw ValidationError("the hierarchy needs a source for order zero");
    const Lattice& lat = ops.lattice();
    int m = ops.scheme().driver_count();

    double T = 0.0;
    for (double t : record_times) T = std::max(T, t);
    double t_tol = 1e-12 * std::max(1.0, T);
    if (path.horizon() < T - t_tol)
        throw ValidationError("path grid ends before the last record time");
    auto times = path.times();
    std::vector<int> record_nodes(record_times.size());
    for (std::size_t i = 0; i < record_times.size(); ++i)
        record_nodes[i] = path.index_of_time(record_times[i]);

    int last_step = 0;
    while (last_step + 1 < static_cast<int>(times.size()) &&
           times[static_cast<std::size_t>(last_step) + 1] <= T + t_tol) {
        double step = times[static_cast<std::size_t>(last_step) + 1] -
                      times[static_cast<std::size_t>(last_step)];
        if (std::fabs(step - dt) > 1e-9 * dt)
            throw ValidationError("dt does not match the path's step size");
        ++last_step;
    }

    ExpansionHierarchy hier;
    for (int n = 0; n <= k; ++n)
        hier.orders.push_back(
            Trajectory{lat, std::vector<double>(record_times.begin(), record_times.end()),
                       std::vector<GridFunction>(record_times.size(), GridFunction(lat)),
                       path.seed(), path.level()});

    std::vector<GridFunction> v(static_cast<std::size_t>(k) + 1, GridFunction(lat));
    auto fetch_v0 = [&](double t) {
        GridFunction g = v0_at(t);
        if (!(g.lattice() == lat))
            throw ValidationError("order-zero source lives on a different lattice");
        return g;
    };
    v[0] = fetch_v0(0.0);
    auto record_if_requested = [&](int node) {
        for (std::size_t i = 0; i < record_nodes.size(); ++i)
            if (record_nodes[i] == node)
                for (int n = 0; n <= k; ++n)
                    hier.orders[static_cast<std::size_t>(n)].states[i] =
                        v[static_cast<std::size_t>(n)];
    };
    record_if_requested(0);

    for (int step = 0; step < last_step; ++step) {
        double t = times[static_cast<std::size_t>(step)];
        double dtk = times[static_cast<std::size_t>(step) + 1] - t;
        std::vector<GridFunction> next(static_cast<std::size_t>(k) + 1, GridFunction(lat));
        for (int n = 1; n <= k; ++n) {
            GridFunction drift = ops.apply_Ln(0, t, v[static_cast<std::size_t>(n)]);
            for (int l = 1; l <= n; ++l)
                drift.axpy(static_cast<double>(binomial(n, l)),
                           ops.apply_Ln(l, t, v[static_cast<std::size_t>(n - l)]));
            GridFunction nx = v[static_cast<std::size_t>(n)];
            nx.axpy(dtk, drift);
            if (m > 0) {
                std::vector<GridFunction> diff =
                    ops.apply_Mn(0, t, v[static_cast<std::size_t>(n)]);
                for (int l = 1; l <= n; ++l) {
                    auto dl = ops.apply_Mn(l, t, v[static_cast<std::size_t>(n - l)]);
                    for (int r = 0; r < m; ++r)
                        diff[static_cast<std::size_t>(r)].axpy(
                            static_cast<double>(binomial(n, l)),
                            dl[static_cast<std::size_t>(r)]);
                }
                for (int r = 0; r < m; ++r)
                    nx.axpy(path.increment(r, step), diff[static_cast<std::size_t>(r)]);
            }
            if (!nx.all_finite())
                throw SolverAbort("non-finite expansion state at order " + std::to_string(n),
                                  step + 1);
            next[static_cast<std::size_t>(n)] = std::move(nx);
        }
        v[0] = fetch_v0(times[static_cast<std::size_t>(step) + 1]);
        for (int n = 1; n <= k; ++n)
            v[static_cast<std::size_t>(n)] = std::move(next[static_cast<std::size_t>(n)]);
        record_if_requested(step + 1);
    }
    hier.aliasing_warnings = ops.aliasing_warnings();
    return hier;
}

ExpansionHierarchy solve_hierarchy(ExpansionOperators& ops, int k, const Trajectory& v0,
                                   const WienerPath& path, double dt) {
    if (!(v0.lattice == ops.lattice()))
        throw ValidationError("order-zero trajectory lives on a different lattice");
    auto v0_at = [&v0](double t) { return v0.state_at(t); };
    return solve_hierarchy(ops, k, v0_at, path, dt, v0.record_times);
}

RemainderOrders remainder_order_check(const StencilSpec& spec, int n,
                                      const std::function<double(std::span<const double>)>& phi,
                                      std::span<const Lattice> levels) {
    if (levels.size() < 3)
        throw ValidationError("order fitting needs at least 3 lattice levels");
    int m = spec.driver_count();
    RemainderOrders rep;
    for (const Lattice& lat : levels) {
        double h = lat.spacing();
        GridFunction f = GridFunction::sample(
            lat, [&phi](std::span<const double> x) { return phi(x); });
        ExpansionOperators ops(spec, n, lat);
        GridFunction expanded(lat);
        double factorial = 1.0;
        for (int i = 0; i <= n; ++i) {
            if (i > 0) factorial *= i;
            expanded.axpy(std::pow(h, i) / factorial, ops.apply_Ln(i, 0.0, f));
        }
        GridFunction l_res = apply_L(spec, 0.0, f);
        l_res -= expanded;
        rep.l_residual.push_back(l2h_norm(l_res));
        double msq = 0.0;
        if (m > 0) {
            std::vector<GridFunction> mh = apply_M(spec, 0.0, f);
            std::vector<GridFunction> mex(static_cast<std::size_t>(m), GridFunction(lat));
            factorial = 1.0;
            for (int i = 0; i <= n; ++i) {
                if (i > 0) factorial *= i;
                auto mi = ops.apply_Mn(i, 0.0, f);
                for (int r = 0; r < m; ++r)
                    mex[static_cast<std::size_t>(r)].axpy(std::pow(h, i) / factorial,
                                                          mi[static_cast<std::size_t>(r)]);
            }
            for (int r = 0; r < m; ++r) {
                mh[static_cast<std::size_t>(r)] -= mex[static_cast<std::size_t>(r)];
                double nr = l2h_norm(mh[static_cast<std::size_t>(r)]);
                msq += nr * nr;
            }
        }
        rep.m_residual_sq.push_back(msq);
        rep.h.push_back(h);
    }
    std::vector<std::pair<double, double>> l_pairs, m_pairs;
    for (std::size_t i = 0; i < rep.h.size(); ++i) {
        l_pairs.emplace_back(rep.h[i], rep.l_residual[i]);
        m_pairs.emplace_back(rep.h[i], rep.m_residual_sq[i]);
    }
    rep.l_fit = fit_order(l_pairs);
    rep.m_fit = fit_order(m_pairs);
    return rep;
}

} // namespace sfdlab
