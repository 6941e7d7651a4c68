#include "sfdlab/grid_ops.hpp"

#include <cmath>
#include <cstdlib>

namespace sfdlab {

namespace {

void require_dim(const GridFunction& f, const DirectionVector& lam) {
    if (lam.dim() != f.lattice().dim())
        throw ValidationError("direction dimension " + std::to_string(lam.dim()) +
                              " does not match lattice dimension " +
                              std::to_string(f.lattice().dim()));
}

} // namespace

GridFunction shift(const GridFunction& f, const DirectionVector& lam, int steps) {
    require_dim(f, lam);
    const Lattice& lat = f.lattice();
    GridFunction out(lat);
    for (std::size_t i = 0; i < f.size(); ++i) out[i] = f[lat.neighbor(i, lam, steps)];
    return out;
}

GridFunction forward_diff(const GridFunction& f, const DirectionVector& lam) {
    require_dim(f, lam);
    const Lattice& lat = f.lattice();
    const double inv_h = 1.0 / lat.spacing();
    GridFunction out(lat);
    for (std::size_t i = 0; i < f.size(); ++i)
        out[i] = (f[lat.neighbor(i, lam, +1)] - f[i]) * inv_h;
    return out;
}

GridFunction backward_diff(const GridFunction& f, const DirectionVector& lam) {
    require_dim(f, lam);
    const Lattice& lat = f.lattice();
    const double inv_h = 1.0 / lat.spacing();
    GridFunction out(lat);
    for (std::size_t i = 0; i < f.size(); ++i)
        out[i] = (f[i] - f[lat.neighbor(i, lam, -1)]) * inv_h;
    return out;
}

GridFunction symmetric_diff(const GridFunction& f, const DirectionVector& lam) {
    require_dim(f, lam);
    if (lam.is_zero()) return f;
    const Lattice& lat = f.lattice();
    const double w = 0.5 / lat.spacing();
    GridFunction out(lat);
    for (std::size_t i = 0; i < f.size(); ++i)
        out[i] = (f[lat.neighbor(i, lam, +1)] - f[lat.neighbor(i, lam, -1)]) * w;
    return out;
}

GridFunction second_diff(const GridFunction& f, const DirectionVector& lam) {
    require_dim(f, lam);
    const Lattice& lat = f.lattice();
    const double w = 1.0 / (lat.spacing() * lat.spacing());
    GridFunction out(lat);
    for (std::size_t i = 0; i < f.size(); ++i)
        out[i] = (f[lat.neighbor(i, lam, +1)] - 2.0 * f[i] + f[lat.neighbor(i, lam, -1)]) * w;
    return out;
}

GridFunction mean_op(const GridFunction& f, const DirectionVector& lam) {
    require_dim(f, lam);
    if (lam.is_zero()) return f;
    const Lattice& lat = f.lattice();
    GridFunction out(lat);
    for (std::size_t i = 0; i < f.size(); ++i)
        out[i] = 0.5 * (f[lat.neighbor(i, lam, +1)] + f[lat.neighbor(i, lam, -1)]);
    return out;
}

GridFunction odd_part(const GridFunction& f, const DirectionVector& lam) {
    require_dim(f, lam);
    const Lattice& lat = f.lattice();
    GridFunction out(lat);
    if (lam.is_zero()) return out;
    for (std::size_t i = 0; i < f.size(); ++i)
        out[i] = 0.5 * (f[lat.neighbor(i, lam, +1)] - f[lat.neighbor(i, lam, -1)]);
    return out;
}

GridFunction p_op(const GridFunction& f, const DirectionVector& lam) {
    require_dim(f, lam);
    const Lattice& lat = f.lattice();
    GridFunction out(lat);
    if (lam.is_zero()) return out;
    const double w = 0.5 / lat.spacing();
    for (std::size_t i = 0; i < f.size(); ++i)
        out[i] = (f[lat.neighbor(i, lam, +1)] - 2.0 * f[i] + f[lat.neighbor(i, lam, -1)]) * w;
    return out;
}

GridFunction multi_diff(const GridFunction& f, std::span<const DirectionVector> dirs) {
    GridFunction out = f;
    for (const auto& lam : dirs) out = symmetric_diff(out, lam);
    return out;
}

GridFunction multi_mean(const GridFunction& f, std::span<const DirectionVector> dirs) {
    GridFunction out = f;
    for (const auto& lam : dirs) out = mean_op(out, lam);
    return out;
}

GridFunction positive_part(const GridFunction& f) {
    GridFunction out = f;
    for (double& x : out.values()) x = std::max(x, 0.0);
    return out;
}

double sup_norm(const GridFunction& f) {
    double m = 0;
    for (double x : f.values()) m = std::max(m, std::abs(x));
    return m;
}

double l2h_norm(const GridFunction& f) {
    return std::sqrt(inner(f, f));
}

double inner(const GridFunction& f, const GridFunction& g) {
    require_same_lattice(f, g, "inner");
    double s = 0;
    const auto fv = f.values();
    const auto gv = g.values();
    for (std::size_t i = 0; i < fv.size(); ++i) s += fv[i] * gv[i];
    double weight = 1.0;
    for (int k = 0; k < f.lattice().dim(); ++k) weight *= f.lattice().spacing();
    return s * weight;
}

namespace {

// Sum of l2h_norm^2 over all direction sequences of exact length j.
double sobolev_level(const GridFunction& f, int j, std::span<const DirectionVector> dirs) {
    if (j == 0) {
        const double n = l2h_norm(f);
        return n * n;
    }
    double s = 0;
    for (const auto& lam : dirs) s += sobolev_level(symmetric_diff(f, lam), j - 1, dirs);
    return s;
}

} // namespace

double discrete_sobolev_norm(const GridFunction& f, int m,
                             std::span<const DirectionVector> dirs) {
    if (m < 0) throw ValidationError("sobolev order must be nonnegative");
    double s = 0;
    for (int j = 0; j <= m; ++j) s += sobolev_level(f, j, dirs);
    return std::sqrt(s);
}

GridFunction restrict_to(const GridFunction& fine, const Lattice& coarse) {
    const Lattice& fl = fine.lattice();
    if (fl == coarse) return fine;
    const int ratio = fl.points_per_axis() / coarse.points_per_axis();
    int levels = 0;
    for (int r = ratio; r > 1; r /= 2) ++levels;
    if (!coarse.refines_to(fl, levels))
        throw ValidationError("restriction requires a dyadically nested coarse lattice");
    GridFunction out(coarse);
    const auto nc = static_cast<std::size_t>(coarse.points_per_axis());
    const auto nf = static_cast<std::size_t>(fl.points_per_axis());
    for (std::size_t i = 0; i < out.size(); ++i) {
        // Map the coarse multi-index to the fine one axis by axis.
        std::size_t rem = i, fidx = 0, stride = 1;
        for (int ax = coarse.dim() - 1; ax >= 0; --ax) {
            const std::size_t ic = rem % nc;
            rem /= nc;
            fidx += ic * static_cast<std::size_t>(ratio) * stride;
            stride *= nf;
        }
        out[i] = fine[fidx];
    }
    return out;
}

} // namespace sfdlab
