#pragma once

#include <span>

#include "sfdlab/lattice.hpp"

namespace sfdlab {

/// Periodic difference calculus on a single lattice. All operators act
/// along an integer direction lambda with the lattice's own spacing h,
/// so every result lives on the input lattice. Conventions:
///   shift          T_{h,lam}  f(x) -> f(x + h*lam)
///   forward_diff   (f(x + h*lam) - f(x)) / h
///   backward_diff  (f(x) - f(x - h*lam)) / h        (the -h variant of forward_diff)
///   symmetric_diff (f(x + h*lam) - f(x - h*lam)) / (2h), identity for lam = 0
///   second_diff    (f(x + h*lam) - 2 f(x) + f(x - h*lam)) / h^2
///   mean_op        (f(x + h*lam) + f(x - h*lam)) / 2,   identity for lam = 0
///   odd_part       (f(x + h*lam) - f(x - h*lam)) / 2,   zero for lam = 0
///   p_op           (f(x + h*lam) - 2 f(x) + f(x - h*lam)) / (2h), zero for lam = 0

GridFunction shift(const GridFunction& f, const DirectionVector& lam, int steps = 1);
GridFunction forward_diff(const GridFunction& f, const DirectionVector& lam);
GridFunction backward_diff(const GridFunction& f, const DirectionVector& lam);
GridFunction symmetric_diff(const GridFunction& f, const DirectionVector& lam);
GridFunction second_diff(const GridFunction& f, const DirectionVector& lam);
GridFunction mean_op(const GridFunction& f, const DirectionVector& lam);
GridFunction odd_part(const GridFunction& f, const DirectionVector& lam);
GridFunction p_op(const GridFunction& f, const DirectionVector& lam);

/// Left-to-right composition of symmetric differences along a direction
/// sequence. The empty sequence is the identity.
GridFunction multi_diff(const GridFunction& f, std::span<const DirectionVector> dirs);

/// Composition of mean operators along a direction sequence.
GridFunction multi_mean(const GridFunction& f, std::span<const DirectionVector> dirs);

/// Pointwise max(f, 0). Offered as an optional post-processing filter for
/// solutions known to be nonnegative; never applied implicitly.
GridFunction positive_part(const GridFunction& f);

double sup_norm(const GridFunction& f);
/// Grid L2 norm: sqrt(sum |f(x)|^2 h^d).
double l2h_norm(const GridFunction& f);
/// Grid L2 inner product: sum f(x) g(x) h^d.
double inner(const GridFunction& f, const GridFunction& g);

/// Discrete Sobolev norm of order m over a direction set:
/// sqrt of the sum over all sequences alpha in dirs^j, j <= m, of
/// l2h_norm(multi_diff(f, alpha))^2. m = 0 reduces to l2h_norm.
double discrete_sobolev_norm(const GridFunction& f, int m,
                             std::span<const DirectionVector> dirs);

/// Restriction to a coarser lattice whose nodes form a dyadic subset of
/// this one (fine.points == coarse.points * 2^levels, same period).
GridFunction restrict_to(const GridFunction& fine, const Lattice& coarse);

} // namespace sfdlab
