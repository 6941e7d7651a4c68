#pragma once

#include <string>
#include <vector>

#include "sfdlab/config.hpp"
#include "sfdlab/integrator.hpp"
#include "sfdlab/report.hpp"

namespace sfdlab {

struct RunOptions {
    int threads = 1;
};

/// Builds the stencil the config asks for (central or upwind recipe on
/// the coordinate axes). Bespoke stencils are assembled through the
/// StencilSpec API directly.
StencilSpec scheme_from_config(const ExperimentConfig& cfg);

/// Ladder study. For each seed the whole ladder runs on one shared
/// realization (finer levels see dyadic refinements of the same path);
/// each level's solution is measured against the reference restricted to
/// its grid, in the sup norm over the record mesh and nodes and in the
/// sup-in-t grid L2 norm. Optionally every window of order+1 consecutive
/// levels is extrapolated. Cell results, Monte Carlo moments, and order
/// fits land in the report. The (level, seed) cells run on a work queue
/// with opt.threads workers; results are assembled in a fixed order, so
/// the report is bitwise independent of the thread count.
ConvergenceReport run_convergence(const ExperimentConfig& cfg, const RunOptions& opt = {});

/// One pathwise run at the coarsest level with the first seed, for
/// trajectory export.
Trajectory run_single(const ExperimentConfig& cfg);

/// One row of the worked-example table.
struct WorkedExampleRow {
    std::string label;
    double computed = 0.0;
    double printed = 0.0;
    double abs_diff = 0.0;
};

/// Reproduces the published one-dimensional benchmark at x = 0 on the
/// pinned path w_1 = 1: the continuum value, the h = 0.1 and h = 0.05
/// scheme values from the exact integrator, and their Richardson
/// combination, each next to its printed reference number.
std::vector<WorkedExampleRow> reproduce_example_2_4();

/// Scheme health check at t = 0 over the coarsest lattice's nodes: the
/// worst consistency residual of the assembled stencil against the target
/// problem, and the degenerate-parabolicity verdict.
struct CheckReport {
    double residual = 0.0;
    ParabolicityReport parabolicity;
    bool pass = false;
};
CheckReport run_check(const ExperimentConfig& cfg, double tol = 1e-10);

/// Residual orders of the truncated operator expansions for n = 0..max_n
/// on the config's ladder, probed with a smooth trigonometric field.
struct ExpansionVerifyReport {
    std::vector<int> orders;
    std::vector<OrderFit> l_fits;
    std::vector<OrderFit> m_fits;
};
ExpansionVerifyReport run_expansion_verify(const ExperimentConfig& cfg, int max_n = 2);

} // namespace sfdlab
