#include "sfdlab/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <optional>
#include <sstream>
#include <thread>

#include "sfdlab/errors.hpp"
#include "sfdlab/expansion.hpp"
#include "sfdlab/grid_ops.hpp"
#include "sfdlab/richardson.hpp"

namespace sfdlab {

StencilSpec scheme_from_config(const ExperimentConfig& cfg) {
    return cfg.scheme == SchemeKind::upwind ? from_pde_upwind(cfg.pde, cfg.theta)
                                            : from_pde_central(cfg.pde);
}

namespace {

std::vector<ModeState> modes_from_config(const ExperimentConfig& cfg) {
    std::vector<ModeState> modes;
    modes.reserve(cfg.psi_modes.size());
    for (const ModeSpec& m : cfg.psi_modes)
        modes.push_back({m.k, std::complex<double>(m.re, m.im)});
    return modes;
}

/// Time-grid plan shared by the whole ladder: one base step grid for the
/// coarsest level, dyadic path-refinement counts per level (so finer
/// levels keep the same realization), and a record mesh snapped onto the
/// base nodes with both endpoints included.
struct TimePlan {
    int base_steps = 1;
    double base_dt = 0.0;
    std::vector<int> refines;
    std::vector<double> record;
};

TimePlan plan_time(const ExperimentConfig& cfg, int total_levels) {
    TimePlan plan;
    double T = cfg.horizon;
    double want = cfg.desired_dt(0);
    plan.base_steps = std::max(1, static_cast<int>(std::ceil(T / want * (1.0 - 1e-12))));
    plan.base_dt = T / plan.base_steps;
    plan.refines.assign(static_cast<std::size_t>(total_levels), 0);
    int prev = 0;
    for (int i = 0; i < total_levels; ++i) {
        int j = prev; // nondecreasing, so every level's grid nests in the next
        while (plan.base_dt / std::ldexp(1.0, j) > cfg.desired_dt(i) * (1.0 + 1e-9)) {
            ++j;
            if (j > 48)
                throw ValidationError("the dt policy asks for more than 2^48 path refinements");
        }
        plan.refines[static_cast<std::size_t>(i)] = j;
        prev = j;
    }
    int R = std::min(cfg.record_points, plan.base_steps + 1);
    std::vector<int> idx;
    for (int j = 0; j < R; ++j) {
        int k = static_cast<int>(
            std::llround(static_cast<double>(j) * plan.base_steps / (R - 1.0)));
        if (idx.empty() || k > idx.back()) idx.push_back(k);
    }
    plan.record.reserve(idx.size());
    for (int k : idx)
        plan.record.push_back(static_cast<double>(k) * T /
                              static_cast<double>(plan.base_steps));
    plan.record.front() = 0.0;
    if (idx.back() == plan.base_steps) plan.record.back() = T;
    return plan;
}

WienerPath path_for(const ExperimentConfig& cfg, const TimePlan& plan, std::uint64_t seed,
                    int refines) {
    WienerPath p = WienerPath::sample(cfg.drivers, plan.base_steps, cfg.horizon, seed);
    for (int j = 0; j < refines; ++j) p = p.refine();
    return p;
}

Trajectory solve_level(const ExperimentConfig& cfg, const StencilSpec& spec,
                       const Lattice& lat, const WienerPath& path,
                       std::span<const double> record, std::string* advisory) {
    if (cfg.solver == SolverKind::exact_fourier) {
        if (advisory) advisory->clear();
        std::vector<ModeState> modes = modes_from_config(cfg);
        return fourier_exact_solve(spec, modes, lat, path, record);
    }
    ProblemData prob{GridFunction::sample(
                         lat, [&](std::span<const double> x) { return cfg.psi(0.0, x); }),
                     nullptr, nullptr, cfg.horizon};
    if (!cfg.f.is_zero())
        prob.free_drift = [&cfg, lat](double t) {
            return GridFunction::sample(
                lat, [&](std::span<const double> x) { return cfg.f(t, x); });
        };
    bool any_g = false;
    for (const CoefficientField& gr : cfg.g) any_g = any_g || !gr.is_zero();
    if (any_g)
        prob.free_diffusion = [&cfg, lat](double t, int r) {
            return GridFunction::sample(lat, [&](std::span<const double> x) {
                return cfg.g[static_cast<std::size_t>(r)](t, x);
            });
        };
    return em_solve(spec, prob, path, record, advisory);
}

struct NormPair {
    double sup = 0.0;
    double l2h = 0.0;
};

NormPair error_norms(const Trajectory& sol, const std::vector<GridFunction>& ref) {
    NormPair out;
    for (std::size_t ti = 0; ti < sol.states.size(); ++ti) {
        GridFunction diff = sol.states[ti];
        diff.axpy(-1.0, ref[ti]);
        out.sup = std::max(out.sup, sup_norm(diff));
        out.l2h = std::max(out.l2h, l2h_norm(diff));
    }
    return out;
}

struct ClipOutcome {
    bool relevant = false; // the reference is nonnegative, so the claim applies
    bool ok = true;        // |ref - v^+| <= |ref - v| held at every node
};

ClipOutcome clip_check(const Trajectory& sol, const std::vector<GridFunction>& ref) {
    ClipOutcome out;
    for (const GridFunction& g : ref)
        for (std::size_t i = 0; i < g.size(); ++i)
            if (g[i] < 0.0) return out;
    if (ref.empty()) return out;
    out.relevant = true;
    for (std::size_t ti = 0; ti < sol.states.size(); ++ti) {
        const GridFunction& v = sol.states[ti];
        const GridFunction& r = ref[ti];
        for (std::size_t i = 0; i < v.size(); ++i) {
            double plain = std::fabs(r[i] - v[i]);
            double clipped = std::fabs(r[i] - std::max(v[i], 0.0));
            if (clipped > plain + 1e-15) {
                out.ok = false;
                return out;
            }
        }
    }
    return out;
}

/// Runs body(0..count-1) on a fixed number of workers pulling from an
/// atomic counter. Results must go into preassigned slots; the first
/// exception in index order is rethrown after all workers finish, so
/// failures are as deterministic as successes.
template <typename F>
void parallel_run(int threads, int count, F&& body) {
    if (count <= 0) return;
    std::vector<std::exception_ptr> errs(static_cast<std::size_t>(count));
    std::atomic<int> next{0};
    auto work = [&]() {
        for (;;) {
            int i = next.fetch_add(1);
            if (i >= count) return;
            try {
                body(i);
            } catch (...) {
                errs[static_cast<std::size_t>(i)] = std::current_exception();
            }
        }
    };
    int workers = std::min(threads, count);
    if (workers <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(workers));
        for (int w = 0; w < workers; ++w) pool.emplace_back(work);
        for (std::thread& th : pool) th.join();
    }
    for (const std::exception_ptr& e : errs)
        if (e) std::rethrow_exception(e);
}

std::string fmt_g(double v) {
    std::ostringstream os;
    os << v;
    return os.str();
}

/// Discrete Sobolev diagnostic of the problem data on the coarsest grid:
/// |psi|_2^2 plus the record-mesh trapezoid of |f_t|_2^2 + sum_r |g_t|_3^2.
double data_norm_diag(const ExperimentConfig& cfg, const Lattice& lat,
                      std::span<const double> record) {
    std::vector<DirectionVector> axes;
    for (int a = 0; a < lat.dim(); ++a) axes.push_back(DirectionVector::axis(lat.dim(), a));
    GridFunction psi0 =
        GridFunction::sample(lat, [&](std::span<const double> x) { return cfg.psi(0.0, x); });
    double n = discrete_sobolev_norm(psi0, 2, axes);
    double total = n * n;
    bool any_f = !cfg.f.is_zero();
    bool any_g = false;
    for (const CoefficientField& gr : cfg.g) any_g = any_g || !gr.is_zero();
    if (!any_f && !any_g) return total;
    std::vector<double> vals(record.size(), 0.0);
    for (std::size_t ti = 0; ti < record.size(); ++ti) {
        double t = record[ti];
        double v = 0.0;
        if (any_f) {
            GridFunction f = GridFunction::sample(
                lat, [&](std::span<const double> x) { return cfg.f(t, x); });
            double fn = discrete_sobolev_norm(f, 2, axes);
            v += fn * fn;
        }
        for (const CoefficientField& gr : cfg.g) {
            if (gr.is_zero()) continue;
            GridFunction g = GridFunction::sample(
                lat, [&](std::span<const double> x) { return gr(t, x); });
            double gn = discrete_sobolev_norm(g, 3, axes);
            v += gn * gn;
        }
        vals[ti] = v;
    }
    for (std::size_t ti = 0; ti + 1 < record.size(); ++ti)
        total += 0.5 * (vals[ti] + vals[ti + 1]) * (record[ti + 1] - record[ti]);
    return total;
}

} // namespace

ConvergenceReport run_convergence(const ExperimentConfig& cfg, const RunOptions& opt) {
    auto t_start = std::chrono::steady_clock::now();
    if (opt.threads < 1) throw ValidationError("thread count must be >= 1");
    StencilSpec spec = scheme_from_config(cfg);
    int L = cfg.levels;
    int S = static_cast<int>(cfg.seeds.size());
    if (cfg.extrapolate && L < cfg.extrap_order + 1)
        throw ValidationError("extrapolation of order " + std::to_string(cfg.extrap_order) +
                              " needs at least " + std::to_string(cfg.extrap_order + 1) +
                              " ladder levels");
    bool fine_ref = cfg.reference == ReferenceKind::fine_grid;
    int total_levels = L + (fine_ref ? 2 : 0);
    std::vector<Lattice> lats;
    lats.reserve(static_cast<std::size_t>(total_levels));
    for (int i = 0; i < total_levels; ++i)
        lats.emplace_back(cfg.dim, cfg.points_at(i), cfg.spacing(i));
    TimePlan plan = plan_time(cfg, total_levels);

    // Reference states per (level, seed), on that level's own grid.
    std::vector<std::vector<std::vector<GridFunction>>> ref(
        static_cast<std::size_t>(L),
        std::vector<std::vector<GridFunction>>(static_cast<std::size_t>(S)));
    std::string ref_desc;
    if (fine_ref) {
        const Lattice& rl = lats.back();
        ref_desc = "self-convergence: same scheme at h = " + fmt_g(rl.spacing()) +
                   " (two dyadic levels below the finest) on the refined shared path";
        parallel_run(opt.threads, S, [&](int s) {
            WienerPath path = path_for(cfg, plan, cfg.seeds[static_cast<std::size_t>(s)],
                                       plan.refines.back());
            std::string adv;
            Trajectory rt = solve_level(cfg, spec, rl, path, plan.record, &adv);
            for (int i = 0; i < L; ++i) {
                std::vector<GridFunction> states;
                states.reserve(rt.states.size());
                for (const GridFunction& g : rt.states)
                    states.push_back(restrict_to(g, lats[static_cast<std::size_t>(i)]));
                ref[static_cast<std::size_t>(i)][static_cast<std::size_t>(s)] =
                    std::move(states);
            }
        });
    } else {
        ref_desc = "closed form: continuum mode law on " +
                   std::to_string(cfg.psi_modes.size()) + " modes";
    }

    struct Cell {
        NormPair err;
        std::optional<Trajectory> sol;
        bool clip_relevant = false;
        bool clip_ok = true;
        std::string advisory;
    };
    std::vector<Cell> cells(static_cast<std::size_t>(L) * static_cast<std::size_t>(S));
    parallel_run(opt.threads, L * S, [&](int c) {
        int i = c / S;
        int s = c % S;
        const Lattice& lat = lats[static_cast<std::size_t>(i)];
        try {
            WienerPath path = path_for(cfg, plan, cfg.seeds[static_cast<std::size_t>(s)],
                                       plan.refines[static_cast<std::size_t>(i)]);
            std::string adv;
            Trajectory sol = solve_level(cfg, spec, lat, path, plan.record, &adv);
            auto& ref_states = ref[static_cast<std::size_t>(i)][static_cast<std::size_t>(s)];
            if (!fine_ref)
                ref_states = continuum_exact_solve(cfg.pde, modes_from_config(cfg), lat, path,
                                                   plan.record)
                                 .states;
            Cell& cell = cells[static_cast<std::size_t>(c)];
            cell.err = error_norms(sol, ref_states);
            if (cfg.clip_positive) {
                ClipOutcome co = clip_check(sol, ref_states);
                cell.clip_relevant = co.relevant;
                cell.clip_ok = co.ok;
            }
            cell.advisory = std::move(adv);
            if (cfg.extrapolate) cell.sol = std::move(sol);
        } catch (const SolverAbort& e) {
            std::ostringstream msg;
            msg << "h = " << lat.spacing() << ", seed "
                << cfg.seeds[static_cast<std::size_t>(s)] << ": " << e.what();
            throw SolverAbort(SolverAbort::Raw{}, msg.str(), e.step());
        }
    });

    ConvergenceReport rep;
    for (int i = 0; i < L; ++i) {
        rep.h_levels.push_back(lats[static_cast<std::size_t>(i)].spacing());
        rep.points_per_level.push_back(lats[static_cast<std::size_t>(i)].points_per_axis());
    }
    auto cell_at = [&](int i, int s) -> const Cell& {
        return cells[static_cast<std::size_t>(i) * static_cast<std::size_t>(S) +
                     static_cast<std::size_t>(s)];
    };
    for (int i = 0; i < L; ++i)
        for (int s = 0; s < S; ++s)
            rep.cells.push_back({rep.h_levels[static_cast<std::size_t>(i)],
                                 rep.points_per_level[static_cast<std::size_t>(i)],
                                 cfg.seeds[static_cast<std::size_t>(s)], cell_at(i, s).err.sup,
                                 cell_at(i, s).err.l2h});

    if (cfg.extrapolate) {
        RichardsonWeights w = richardson_weights(cfg.extrap_order, cfg.power_step);
        rep.weights = w.str();
        int k = cfg.extrap_order;
        for (int i = 0; i + k < L; ++i)
            for (int s = 0; s < S; ++s) {
                std::vector<Trajectory> window;
                window.reserve(static_cast<std::size_t>(k) + 1);
                for (int j = i; j <= i + k; ++j) window.push_back(*cell_at(j, s).sol);
                Trajectory combo = extrapolate(window, w);
                NormPair err = error_norms(
                    combo, ref[static_cast<std::size_t>(i)][static_cast<std::size_t>(s)]);
                rep.extrapolated_cells.push_back(
                    {rep.h_levels[static_cast<std::size_t>(i)],
                     rep.points_per_level[static_cast<std::size_t>(i)],
                     cfg.seeds[static_cast<std::size_t>(s)], err.sup, err.l2h});
            }
    }

    // Monte Carlo moments per requested norm, exponent, and level. The
    // bootstrap seed is a fixed hash of the row's position so reports are
    // reproducible run to run.
    for (std::size_t nt = 0; nt < cfg.norms.size(); ++nt) {
        bool is_sup = cfg.norms[nt] == "sup";
        for (std::size_t pi = 0; pi < cfg.moment_p.size(); ++pi)
            for (int i = 0; i < L; ++i) {
                std::vector<double> es(static_cast<std::size_t>(S));
                for (int s = 0; s < S; ++s)
                    es[static_cast<std::size_t>(s)] =
                        is_sup ? cell_at(i, s).err.sup : cell_at(i, s).err.l2h;
                std::uint64_t bseed = (static_cast<std::uint64_t>(nt) << 32) +
                                      (static_cast<std::uint64_t>(pi) << 16) +
                                      static_cast<std::uint64_t>(i);
                rep.moments.push_back({rep.h_levels[static_cast<std::size_t>(i)],
                                       cfg.moment_p[pi], cfg.norms[nt],
                                       moment_estimate(es, cfg.moment_p[pi], bseed)});
            }
    }

    // Order fits on the per-level mean errors, plus the per-seed probe.
    auto mean_err = [&](int i, bool sup) {
        double m = 0.0;
        for (int s = 0; s < S; ++s)
            m += sup ? cell_at(i, s).err.sup : cell_at(i, s).err.l2h;
        return m / static_cast<double>(S);
    };
    std::vector<std::pair<double, double>> sup_pairs, l2h_pairs;
    for (int i = 0; i < L; ++i) {
        sup_pairs.emplace_back(rep.h_levels[static_cast<std::size_t>(i)], mean_err(i, true));
        l2h_pairs.emplace_back(rep.h_levels[static_cast<std::size_t>(i)], mean_err(i, false));
    }
    rep.sup_order = fit_order(sup_pairs);
    rep.l2h_order = fit_order(l2h_pairs);
    if (!rep.extrapolated_cells.empty()) {
        std::vector<std::pair<double, double>> es, el;
        for (std::size_t i = 0; i < rep.h_levels.size(); ++i) {
            double ms = 0.0, ml = 0.0;
            int n = 0;
            for (const CellResult& c : rep.extrapolated_cells)
                if (c.h == rep.h_levels[i]) {
                    ms += c.sup_error;
                    ml += c.l2h_error;
                    ++n;
                }
            if (n > 0) {
                es.emplace_back(rep.h_levels[i], ms / n);
                el.emplace_back(rep.h_levels[i], ml / n);
            }
        }
        rep.extrap_sup_order = fit_order(es);
        rep.extrap_l2h_order = fit_order(el);
    }
    for (int s = 0; s < S; ++s) {
        std::vector<std::pair<double, double>> pairs;
        for (int i = 0; i < L; ++i)
            pairs.emplace_back(rep.h_levels[static_cast<std::size_t>(i)],
                               cell_at(i, s).err.sup);
        rep.per_seed_sup_orders.push_back(fit_order(pairs));
    }

    for (int i = 0; i < L && rep.advisory.empty(); ++i)
        for (int s = 0; s < S && rep.advisory.empty(); ++s)
            rep.advisory = cell_at(i, s).advisory;
    if (cfg.clip_positive) {
        bool any_relevant = false;
        bool all_ok = true;
        for (const Cell& c : cells) {
            any_relevant = any_relevant || c.clip_relevant;
            if (c.clip_relevant) all_ok = all_ok && c.clip_ok;
        }
        rep.clip_checked = any_relevant;
        rep.clip_ok = all_ok;
        if (any_relevant && !all_ok)
            throw ValidationError("positive-part clipping increased the error against a "
                                  "nonnegative reference; this should be impossible");
    }
    rep.reference = ref_desc;
    rep.data_norm = data_norm_diag(cfg, lats[0], plan.record);
    rep.threads = opt.threads;
    rep.runtime_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    return rep;
}

Trajectory run_single(const ExperimentConfig& cfg) {
    StencilSpec spec = scheme_from_config(cfg);
    Lattice lat(cfg.dim, cfg.points_at(0), cfg.spacing(0));
    TimePlan plan = plan_time(cfg, 1);
    WienerPath path = path_for(cfg, plan, cfg.seeds.front(), plan.refines[0]);
    std::string adv;
    return solve_level(cfg, spec, lat, path, plan.record, &adv);
}

std::vector<WorkedExampleRow> reproduce_example_2_4() {
    TargetPDE pde(1, 1);
    pde.set_a(1, 1, CoefficientField::constant(2.0));
    pde.set_b(1, 0, CoefficientField::constant(2.0));
    StencilSpec spec = from_pde_central(pde);

    double terminal[] = {1.0};
    WienerPath path = WienerPath::conditioned_linear(1, 1, 1.0, terminal);
    double record[] = {1.0};
    std::vector<ModeState> modes = {{1, {0.5, 0.0}}, {-1, {0.5, 0.0}}};

    Lattice coarse(1, 16, 0.1);
    Lattice fine(1, 32, 0.05);
    Trajectory u = continuum_exact_solve(pde, modes, coarse, path, record);
    std::vector<Trajectory> ladder;
    ladder.push_back(fourier_exact_solve(spec, modes, coarse, path, record));
    ladder.push_back(fourier_exact_solve(spec, modes, fine, path, record));
    RichardsonWeights w = richardson_weights(1, 2);
    Trajectory combo = extrapolate(ladder, w);

    auto row = [](std::string label, double computed, double printed) {
        return WorkedExampleRow{std::move(label), computed, printed,
                                std::fabs(computed - printed)};
    };
    return {
        row("continuum u(0) at t = 1", u.states[0][0], -0.4161468365),
        row("scheme value, h = 0.1", ladder[0].states[0][0], -0.4131150562),
        row("scheme value, h = 0.05", ladder[1].states[0][0], -0.415389039),
        row("extrapolated (" + w.str() + ")", combo.states[0][0], -0.4161470333),
    };
}

CheckReport run_check(const ExperimentConfig& cfg, double tol) {
    StencilSpec spec = scheme_from_config(cfg);
    Lattice lat(cfg.dim, cfg.points_at(0), cfg.spacing(0));
    std::vector<std::vector<double>> samples(lat.size(),
                                             std::vector<double>(static_cast<std::size_t>(
                                                 lat.dim())));
    for (std::size_t i = 0; i < lat.size(); ++i) lat.coordinates(i, samples[i]);
    CheckReport rep;
    rep.residual = consistency_residual(spec, cfg.pde, 0.0, samples);
    rep.parabolicity = parabolicity_report(spec, 0.0, samples, tol);
    rep.pass = rep.residual <= tol && rep.parabolicity.pass;
    return rep;
}

ExpansionVerifyReport run_expansion_verify(const ExperimentConfig& cfg, int max_n) {
    if (max_n < 0) throw ValidationError("expansion order must be >= 0");
    if (cfg.levels < 3)
        throw ValidationError("expansion verification needs at least three ladder levels");
    StencilSpec spec = scheme_from_config(cfg);
    std::vector<Lattice> lats;
    for (int i = 0; i < cfg.levels; ++i)
        lats.emplace_back(cfg.dim, cfg.points_at(i), cfg.spacing(i));
    // Smooth periodic probe with a couple of harmonics per axis.
    double base = 2.0 * 3.14159265358979323846 / cfg.period;
    auto phi = [base](std::span<const double> x) {
        double v = 0.0;
        for (std::size_t a = 0; a < x.size(); ++a)
            v += std::sin(base * x[a] + 0.4 + 0.3 * static_cast<double>(a)) +
                 0.5 * std::cos(2.0 * base * x[a]);
        return v;
    };
    ExpansionVerifyReport rep;
    for (int n = 0; n <= max_n; ++n) {
        RemainderOrders ord = remainder_order_check(spec, n, phi, lats);
        rep.orders.push_back(n);
        rep.l_fits.push_back(ord.l_fit);
        rep.m_fits.push_back(ord.m_fit);
    }
    return rep;
}

} // namespace sfdlab
