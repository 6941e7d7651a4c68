#include "sfdlab/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <istream>
#include <ostream>
#include <sstream>

#include "sfdlab/grid_ops.hpp"

namespace sfdlab {

namespace {

/// Largest absolute value a coefficient field takes on the lattice nodes
/// at time t (one evaluation for constant fields).
double field_max_abs(const CoefficientField& c, double t, const Lattice& lat) {
    if (c.is_constant()) return std::fabs(c.constant_value());
    std::vector<double> x(static_cast<std::size_t>(lat.dim()));
    double m = 0.0;
    for (std::size_t i = 0; i < lat.size(); ++i) {
        lat.coordinates(i, x);
        m = std::max(m, std::fabs(c(t, x)));
    }
    return m;
}

void require_on_lattice(const GridFunction& g, const Lattice& lat, const char* what) {
    if (!(g.lattice() == lat))
        throw ValidationError(std::string(what) + " lives on a different lattice than psi");
}

} // namespace

const GridFunction& Trajectory::state_at(double t) const {
    double scale = 1.0;
    for (double rt : record_times) scale = std::max(scale, std::fabs(rt));
    for (std::size_t i = 0; i < record_times.size(); ++i)
        if (std::fabs(record_times[i] - t) <= 1e-12 * scale) return states[i];
    std::ostringstream msg;
    msg << "time " << t << " was not recorded in this trajectory";
    throw ValidationError(msg.str());
}

Trajectory em_solve(const StencilSpec& spec, const ProblemData& problem,
                    const WienerPath& path, std::span<const double> record_times,
                    std::string* advisory) {
    if (advisory) advisory->clear();
    const Lattice& lat = problem.psi.lattice();
    if (lat.dim() != spec.dim())
        throw ValidationError("initial value dimension does not match the scheme");
    double T = problem.horizon;
    if (!(T > 0.0)) throw ValidationError("horizon must be > 0");
    double t_tol = 1e-12 * std::max(1.0, T);
    if (path.horizon() < T - t_tol)
        throw ValidationError("path grid ends before the problem horizon");
    auto times = path.times();

    // Map requested record times onto path nodes (off-grid is rejected).
    std::vector<int> record_nodes(record_times.size());
    for (std::size_t i = 0; i < record_times.size(); ++i) {
        if (record_times[i] < -t_tol || record_times[i] > T + t_tol)
            throw ValidationError("record time outside [0, horizon]");
        record_nodes[i] = path.index_of_time(record_times[i]);
    }

    // Explicit-scheme step-size heuristic. Only advisory: degenerate
    // stochastic schemes can be neutrally stable, so the run proceeds.
    int n0 = spec.direction_count() - 1;
    double a_max = 0.0, lam_max = 0.0;
    for (int k = 0; k < spec.direction_count(); ++k) {
        for (int l = 0; l < spec.direction_count(); ++l)
            a_max = std::max(a_max, field_max_abs(spec.a(k, l), 0.0, lat));
        if (k > 0) lam_max = std::max(lam_max, spec.direction(k).euclidean_norm());
    }
    double dt_max = 0.0;
    int last_step = 0;
    while (last_step + 1 < static_cast<int>(times.size()) &&
           times[static_cast<std::size_t>(last_step) + 1] <= T + t_tol) {
        dt_max = std::max(dt_max, times[static_cast<std::size_t>(last_step) + 1] -
                                      times[static_cast<std::size_t>(last_step)]);
        ++last_step;
    }
    if (advisory && a_max > 0.0 && n0 > 0) {
        double h = lat.spacing();
        double bound = h * h / (2.0 * a_max * lam_max * lam_max *
                                static_cast<double>(n0) * static_cast<double>(n0));
        if (dt_max > bound) {
            std::ostringstream msg;
            msg << "advisory: dt = " << dt_max << " exceeds the explicit stability "
                << "heuristic h^2/(2 max|a| max|lam|^2 n0^2) = " << bound
                << "; the run proceeds but may be unstable";
            *advisory = msg.str();
        }
    }

    int m = spec.driver_count();
    Trajectory traj{lat, std::vector<double>(record_times.begin(), record_times.end()),
                    std::vector<GridFunction>(record_times.size(), GridFunction(lat)),
                    path.seed(), path.level()};
    GridFunction u = problem.psi;
    auto record_if_requested = [&](int node) {
        for (std::size_t i = 0; i < record_nodes.size(); ++i)
            if (record_nodes[i] == node) traj.states[i] = u;
    };
    record_if_requested(0);

    for (int k = 0; k < last_step; ++k) {
        double t = times[static_cast<std::size_t>(k)];
        double dt = times[static_cast<std::size_t>(k) + 1] - t;
        GridFunction drift = apply_L(spec, t, u);
        if (problem.free_drift) {
            GridFunction f = problem.free_drift(t);
            require_on_lattice(f, lat, "free drift");
            drift += f;
        }
        GridFunction next = u;
        next.axpy(dt, drift);
        if (m > 0) {
            std::vector<GridFunction> diff = apply_M(spec, t, u);
            for (int r = 0; r < m; ++r) {
                double dw = path.increment(r, k);
                next.axpy(dw, diff[static_cast<std::size_t>(r)]);
                if (problem.free_diffusion) {
                    GridFunction g = problem.free_diffusion(t, r);
                    require_on_lattice(g, lat, "free diffusion");
                    next.axpy(dw, g);
                }
            }
        }
        u = std::move(next);
        if (!u.all_finite())
            throw SolverAbort("non-finite state detected during time stepping", k + 1);
        record_if_requested(k + 1);
    }
    return traj;
}

namespace {

std::complex<double> central_symbol(int k, double h, int lam) {
    if (lam == 0) return {1.0, 0.0};
    return {0.0, std::sin(static_cast<double>(k) * h * static_cast<double>(lam)) / h};
}

const CoefficientField& require_constant(const CoefficientField& c, const char* what) {
    if (!c.is_constant())
        throw ValidationError(std::string("the Fourier oracle needs constant coefficients; ") +
                              what + " '" + c.label() + "' is not");
    return c;
}

} // namespace

SymbolReport fourier_symbol(const StencilSpec& spec, int k, double h) {
    if (spec.dim() != 1)
        throw ValidationError("the Fourier oracle is one-dimensional");
    if (!(h > 0.0)) throw ValidationError("spacing must be > 0");
    int n1 = spec.direction_count();
    SymbolReport rep;
    rep.drift = 0.0;
    rep.diffusion.assign(static_cast<std::size_t>(spec.driver_count()),
                         std::complex<double>(0.0));
    for (int i = 0; i < n1; ++i) {
        std::complex<double> si = central_symbol(k, h, spec.direction(i)[0]);
        for (int j = 0; j < n1; ++j) {
            const CoefficientField& c = spec.a(i, j);
            if (c.is_zero()) continue;
            std::complex<double> sj = central_symbol(k, h, spec.direction(j)[0]);
            rep.drift += require_constant(c, "a").constant_value() * si * sj;
        }
        for (int r = 0; r < spec.driver_count(); ++r) {
            const CoefficientField& c = spec.b(i, r);
            if (c.is_zero()) continue;
            rep.diffusion[static_cast<std::size_t>(r)] +=
                require_constant(c, "b").constant_value() * si;
        }
    }
    for (int i = 1; i < n1; ++i) {
        int lam = spec.direction(i)[0];
        double arg = static_cast<double>(k) * h * static_cast<double>(lam);
        std::complex<double> forward = (std::polar(1.0, arg) - 1.0) / h;
        std::complex<double> backward = (std::polar(1.0, -arg) - 1.0) / (-h);
        if (!spec.p(i).is_zero())
            rep.drift += require_constant(spec.p(i), "p").constant_value() * forward;
        if (!spec.q(i).is_zero())
            rep.drift -= require_constant(spec.q(i), "q").constant_value() * backward;
    }
    return rep;
}

SymbolReport continuum_symbol(const TargetPDE& pde, int k) {
    if (pde.dim() != 1)
        throw ValidationError("the Fourier oracle is one-dimensional");
    std::complex<double> ik(0.0, static_cast<double>(k));
    SymbolReport rep;
    rep.drift = 0.0;
    rep.diffusion.assign(static_cast<std::size_t>(pde.driver_count()),
                         std::complex<double>(0.0));
    std::complex<double> s[2] = {{1.0, 0.0}, ik};
    for (int al = 0; al <= 1; ++al)
        for (int be = 0; be <= 1; ++be) {
            const CoefficientField& c = pde.a(al, be);
            if (c.is_zero()) continue;
            rep.drift += require_constant(c, "a").constant_value() *
                         s[static_cast<std::size_t>(al)] * s[static_cast<std::size_t>(be)];
        }
    for (int al = 0; al <= 1; ++al)
        for (int r = 0; r < pde.driver_count(); ++r) {
            const CoefficientField& c = pde.b(al, r);
            if (c.is_zero()) continue;
            rep.diffusion[static_cast<std::size_t>(r)] +=
                require_constant(c, "b").constant_value() * s[static_cast<std::size_t>(al)];
        }
    return rep;
}

namespace {

Trajectory exact_solve_core(int driver_count,
                            const std::function<SymbolReport(int)>& symbol_of,
                            std::span<const ModeState> modes, const Lattice& lat,
                            const WienerPath& path, std::span<const double> record_times,
                            double* max_imag) {
    struct ModeLaw {
        int k;
        std::complex<double> a0;
        std::complex<double> growth; // l - (1/2) sum_r m_r^2
        std::vector<std::complex<double>> m;
    };
    std::vector<ModeLaw> laws;
    laws.reserve(modes.size());
    for (const ModeState& mode : modes) {
        SymbolReport sym = symbol_of(mode.k);
        ModeLaw law{mode.k, mode.amplitude, sym.drift, std::move(sym.diffusion)};
        for (const auto& mr : law.m) law.growth -= 0.5 * mr * mr;
        laws.push_back(std::move(law));
    }

    Trajectory traj{lat, std::vector<double>(record_times.begin(), record_times.end()),
                    std::vector<GridFunction>(record_times.size(), GridFunction(lat)),
                    path.seed(), path.level()};
    double imag_worst = 0.0;
    std::vector<double> x(1);
    for (std::size_t ti = 0; ti < record_times.size(); ++ti) {
        double t = record_times[ti];
        std::vector<std::complex<double>> amp(laws.size());
        for (std::size_t li = 0; li < laws.size(); ++li) {
            std::complex<double> exponent = laws[li].growth * t;
            for (int r = 0; r < driver_count; ++r)
                exponent += laws[li].m[static_cast<std::size_t>(r)] * path.value_at(r, t);
            amp[li] = laws[li].a0 * std::exp(exponent);
            if (!std::isfinite(std::abs(amp[li])))
                throw SolverAbort("non-finite mode amplitude", static_cast<int>(ti));
        }
        GridFunction& state = traj.states[ti];
        for (std::size_t j = 0; j < lat.size(); ++j) {
            lat.coordinates(j, x);
            std::complex<double> v = 0.0;
            for (std::size_t li = 0; li < laws.size(); ++li)
                v += amp[li] * std::polar(1.0, static_cast<double>(laws[li].k) * x[0]);
            state[j] = v.real();
            imag_worst = std::max(imag_worst, std::fabs(v.imag()));
        }
    }
    if (max_imag) *max_imag = imag_worst;
    return traj;
}

} // namespace

Trajectory fourier_exact_solve(const StencilSpec& spec, std::span<const ModeState> modes,
                               const Lattice& lat, const WienerPath& path,
                               std::span<const double> record_times, double* max_imag) {
    if (lat.dim() != 1 || spec.dim() != 1)
        throw ValidationError("the Fourier oracle is one-dimensional");
    double h = lat.spacing();
    return exact_solve_core(
        spec.driver_count(), [&](int k) { return fourier_symbol(spec, k, h); }, modes, lat,
        path, record_times, max_imag);
}

Trajectory continuum_exact_solve(const TargetPDE& pde, std::span<const ModeState> modes,
                                 const Lattice& lat, const WienerPath& path,
                                 std::span<const double> record_times, double* max_imag) {
    if (lat.dim() != 1 || pde.dim() != 1)
        throw ValidationError("the Fourier oracle is one-dimensional");
    return exact_solve_core(
        pde.driver_count(), [&](int k) { return continuum_symbol(pde, k); }, modes, lat,
        path, record_times, max_imag);
}

void write_trajectory_csv(const Trajectory& traj, std::ostream& os) {
    int d = traj.lattice.dim();
    os << "time";
    for (int i = 1; i <= d; ++i) os << ",x" << i;
    os << ",value\n";
    char buf[64];
    std::vector<double> x(static_cast<std::size_t>(d));
    for (std::size_t ti = 0; ti < traj.record_times.size(); ++ti) {
        for (std::size_t j = 0; j < traj.lattice.size(); ++j) {
            traj.lattice.coordinates(j, x);
            std::snprintf(buf, sizeof buf, "%.17g", traj.record_times[ti]);
            os << buf;
            for (int i = 0; i < d; ++i) {
                std::snprintf(buf, sizeof buf, "%.17g", x[static_cast<std::size_t>(i)]);
                os << ',' << buf;
            }
            std::snprintf(buf, sizeof buf, "%.17g", traj.states[ti][j]);
            os << ',' << buf << "\n";
        }
    }
}

void write_trajectory_binary(const Trajectory& traj, std::ostream& os) {
    auto put_i32 = [&os](int v) {
        std::int32_t x = v;
        os.write(reinterpret_cast<const char*>(&x), sizeof x);
    };
    put_i32(traj.lattice.dim());
    put_i32(traj.lattice.points_per_axis());
    double h = traj.lattice.spacing();
    os.write(reinterpret_cast<const char*>(&h), sizeof h);
    put_i32(static_cast<int>(traj.record_times.size()));
    os.write(reinterpret_cast<const char*>(traj.record_times.data()),
             static_cast<std::streamsize>(traj.record_times.size() * sizeof(double)));
    for (const GridFunction& s : traj.states)
        os.write(reinterpret_cast<const char*>(s.values().data()),
                 static_cast<std::streamsize>(s.size() * sizeof(double)));
}

Trajectory read_trajectory_binary(std::istream& is) {
    auto get_i32 = [&is]() {
        std::int32_t x = 0;
        is.read(reinterpret_cast<char*>(&x), sizeof x);
        return static_cast<int>(x);
    };
    int d = get_i32();
    int n = get_i32();
    double h = 0.0;
    is.read(reinterpret_cast<char*>(&h), sizeof h);
    int n_rec = get_i32();
    if (!is || n_rec < 0) throw ValidationError("malformed trajectory dump header");
    Lattice lat(d, n, h);
    std::vector<double> times(static_cast<std::size_t>(n_rec));
    is.read(reinterpret_cast<char*>(times.data()),
            static_cast<std::streamsize>(times.size() * sizeof(double)));
    Trajectory traj{lat, std::move(times),
                    std::vector<GridFunction>(static_cast<std::size_t>(n_rec),
                                              GridFunction(lat)),
                    0, 0};
    for (GridFunction& s : traj.states)
        is.read(reinterpret_cast<char*>(s.values().data()),
                static_cast<std::streamsize>(s.size() * sizeof(double)));
    if (!is) throw ValidationError("truncated trajectory dump");
    return traj;
}

} // namespace sfdlab
