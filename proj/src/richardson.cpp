#include "sfdlab/richardson.hpp"

#include <cmath>

#include "sfdlab/grid_ops.hpp"

namespace sfdlab {

std::vector<double> RichardsonWeights::as_doubles() const {
    std::vector<double> out;
    out.reserve(weights.size());
    for (const Rational& w : weights) out.push_back(w.to_double());
    return out;
}

std::string RichardsonWeights::str() const {
    std::string s;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        if (i) s += ", ";
        s += weights[i].str();
    }
    return s;
}

RichardsonWeights richardson_weights(int order, int power_step) {
    if (order < 0) throw ValidationError("extrapolation order must be >= 0");
    if (power_step != 1 && power_step != 2)
        throw ValidationError("power step must be 1 or 2");
    int n = order + 1;
    // Dense rational Gaussian elimination on [V | e1]. The system is tiny
    // (k <= 6 in practice) and Vandermonde with distinct nodes, hence
    // nonsingular; exactness matters more than speed here.
    std::vector<std::vector<Rational>> aug(
        static_cast<std::size_t>(n), std::vector<Rational>(static_cast<std::size_t>(n) + 1));
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j)
            aug[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
                Rational::pow(2, -static_cast<long>(power_step) * i * j);
        aug[static_cast<std::size_t>(i)][static_cast<std::size_t>(n)] =
            Rational(i == 0 ? 1 : 0);
    }
    for (int col = 0; col < n; ++col) {
        int pivot = -1;
        for (int row = col; row < n; ++row)
            if (!(aug[static_cast<std::size_t>(row)][static_cast<std::size_t>(col)] ==
                  Rational(0))) {
                pivot = row;
                break;
            }
        if (pivot < 0) throw ValidationError("singular weight system");
        std::swap(aug[static_cast<std::size_t>(col)], aug[static_cast<std::size_t>(pivot)]);
        Rational inv = Rational(1) / aug[static_cast<std::size_t>(col)][static_cast<std::size_t>(col)];
        for (int j = col; j <= n; ++j)
            aug[static_cast<std::size_t>(col)][static_cast<std::size_t>(j)] =
                aug[static_cast<std::size_t>(col)][static_cast<std::size_t>(j)] * inv;
        for (int row = 0; row < n; ++row) {
            if (row == col) continue;
            Rational factor = aug[static_cast<std::size_t>(row)][static_cast<std::size_t>(col)];
            if (factor == Rational(0)) continue;
            for (int j = col; j <= n; ++j)
                aug[static_cast<std::size_t>(row)][static_cast<std::size_t>(j)] =
                    aug[static_cast<std::size_t>(row)][static_cast<std::size_t>(j)] -
                    factor * aug[static_cast<std::size_t>(col)][static_cast<std::size_t>(j)];
        }
    }
    RichardsonWeights w;
    w.order = order;
    w.power_step = power_step;
    w.weights.resize(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j)
        w.weights[static_cast<std::size_t>(j)] =
            aug[static_cast<std::size_t>(j)][static_cast<std::size_t>(n)];
    return w;
}

Trajectory extrapolate(std::span<const Trajectory> solutions, const RichardsonWeights& w) {
    if (solutions.size() != w.weights.size())
        throw ValidationError("need exactly " + std::to_string(w.weights.size()) +
                              " solutions for order " + std::to_string(w.order) +
                              " extrapolation, got " + std::to_string(solutions.size()));
    const Trajectory& coarse = solutions[0];
    double t_scale = 1.0;
    for (double t : coarse.record_times) t_scale = std::max(t_scale, std::fabs(t));
    for (std::size_t i = 1; i < solutions.size(); ++i) {
        const Trajectory& s = solutions[i];
        if (s.path_seed != coarse.path_seed)
            throw ValidationError(
                "trajectory " + std::to_string(i) + " was driven by seed " +
                std::to_string(s.path_seed) + ", expected " + std::to_string(coarse.path_seed) +
                "; extrapolation is pathwise and needs one shared realization");
        if (s.record_times.size() != coarse.record_times.size())
            throw ValidationError("trajectories disagree on record times");
        for (std::size_t ti = 0; ti < coarse.record_times.size(); ++ti)
            if (std::fabs(s.record_times[ti] - coarse.record_times[ti]) > 1e-12 * t_scale)
                throw ValidationError("trajectories disagree on record times");
        if (!solutions[i - 1].lattice.refines_to(s.lattice, 1))
            throw ValidationError("grid " + std::to_string(i) +
                                  " is not the dyadic refinement of grid " +
                                  std::to_string(i - 1));
    }
    std::vector<double> c = w.as_doubles();
    Trajectory out{coarse.lattice, coarse.record_times,
                   std::vector<GridFunction>(coarse.record_times.size(),
                                             GridFunction(coarse.lattice)),
                   coarse.path_seed, coarse.path_level};
    for (std::size_t ti = 0; ti < coarse.record_times.size(); ++ti) {
        GridFunction acc(coarse.lattice);
        for (std::size_t i = 0; i < solutions.size(); ++i) {
            if (i == 0) {
                acc.axpy(c[0], coarse.states[ti]);
            } else {
                acc.axpy(c[i], restrict_to(solutions[i].states[ti], coarse.lattice));
            }
        }
        out.states[ti] = std::move(acc);
    }
    return out;
}

} // namespace sfdlab
