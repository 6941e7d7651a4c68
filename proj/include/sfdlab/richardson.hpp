#pragma once

#include <span>
#include <string>
#include <vector>

#include "sfdlab/integrator.hpp"
#include "sfdlab/rational.hpp"

namespace sfdlab {

/// Extrapolation weights c_0..c_k for combining solutions on the grid
/// ladder h, h/2, ..., h/2^k. They solve the (k+1)x(k+1) Vandermonde
/// system sum_j r^{-(i-1)(j-1)} c_{j-1} = [i == 1] with r = 2^power_step,
/// exactly in rational arithmetic, which is equivalent to
///   sum c_j = 1  and  sum c_j r^{-i j} = 0 for i = 1..k,
/// so the leading error powers h^{s}, h^{2s}, ..., h^{ks} cancel.
struct RichardsonWeights {
    int order = 0;      // k: number of halvings
    int power_step = 2; // s: error expansion runs in powers of h^s
    std::vector<Rational> weights;

    std::vector<double> as_doubles() const;
    std::string str() const; // exact fractions, e.g. "-1/3, 4/3"
};

/// Exact rational solve of the weight system. power_step must be 1 or 2.
RichardsonWeights richardson_weights(int order, int power_step);

/// Pathwise combination sum_i c_i u^{h/2^i}, restricted to the coarsest
/// lattice (the finer nodes coincide with coarse nodes, so restriction is
/// exact). All inputs must share the driving realization (same seed) and
/// the same record times, and each grid must dyadically refine the
/// previous one; violations are rejected. Summation order is fixed
/// (coarse to fine) for bitwise reproducibility.
Trajectory extrapolate(std::span<const Trajectory> solutions, const RichardsonWeights& w);

} // namespace sfdlab
