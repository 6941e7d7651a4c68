#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

namespace sfdlab {

/// Least-squares fit of log(error) against log(h).
struct OrderFit {
    double slope = 0.0;     // fitted convergence order
    double r_squared = 0.0; // coefficient of determination of the log-log fit
    bool exact = false;     // every error fell below the exactness floor
    bool fitted = false;    // slope/r_squared are meaningful
    int used = 0;           // pairs that entered the fit
    int dropped = 0;        // pairs discarded (nonpositive or sub-floor error)
    std::string note;       // human-readable reason when not fitted, or drop note
};

/// Exactness floor: errors below this are treated as zero residuals and the
/// fit degenerates to the "exact" verdict instead of a slope.
inline constexpr double kExactFitFloor = 1e-14;

/// Fits error ~ C * h^slope from (h, error) pairs. Pairs with error <= 0 or
/// below the exactness floor are dropped and counted. Fewer than three
/// surviving pairs yields no fit (fitted = false) rather than an error,
/// except that an all-sub-floor sample returns the "exact" verdict.
OrderFit fit_order(std::span<const std::pair<double, double>> h_and_error);

/// Sample p-th moment with a bootstrap confidence interval.
struct MomentEstimate {
    double value = 0.0;      // mean of |e|^p over the sample
    double half_width = 0.0; // 95% percentile-bootstrap half width
    int sample_count = 0;
    bool degenerate = false; // single-sample estimate; half width carries no information
};

/// Estimates E|e|^p by the sample mean and attaches a 95% percentile
/// bootstrap half-width (1000 resamples, deterministic counter-based
/// resampling keyed by `seed`).
MomentEstimate moment_estimate(std::span<const double> errors, double p,
                               unsigned long long seed = 0);

} // namespace sfdlab
