#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "sfdlab/stats.hpp"

namespace sfdlab {

/// One (spacing, seed) cell of a convergence study: the two error norms
/// of the solution against the reference on that cell's grid.
struct CellResult {
    double h = 0.0;
    int points = 0;
    std::uint64_t seed = 0;
    double sup_error = 0.0; // sup over record times and lattice nodes
    double l2h_error = 0.0; // sup over record times of the l_{h,2} distance
};

/// Monte Carlo moment of one error norm at one spacing.
struct MomentRow {
    double h = 0.0;
    double p = 1.0;
    std::string norm; // "sup" or "l2h"
    MomentEstimate estimate;
};

/// Full result tree of a ladder study. Order fits are carried only when
/// the ladder has at least three levels (they come back unfitted below
/// that, per fit_order).
struct ConvergenceReport {
    std::vector<double> h_levels;
    std::vector<int> points_per_level;
    std::vector<CellResult> cells;              // plain scheme errors
    std::vector<CellResult> extrapolated_cells; // empty when extrapolation is off
    std::vector<MomentRow> moments;
    OrderFit sup_order;         // fit of per-level mean sup errors
    OrderFit l2h_order;         // fit of per-level mean l_{h,2} errors
    OrderFit extrap_sup_order;  // same fits for the extrapolated combination
    OrderFit extrap_l2h_order;
    std::vector<OrderFit> per_seed_sup_orders; // pathwise rate probe, one per seed
    std::string weights;   // extrapolation weights as exact fractions, empty when off
    std::string reference; // a description of the reference solution used
    std::string advisory;  // accumulated time-step advisories, if any arose
    double data_norm = 0.0;     // discrete Sobolev diagnostic of the problem data
    bool clip_checked = false;  // the positive-part comparison ran
    bool clip_ok = false;       // clipped error <= plain error held everywhere
    double runtime_seconds = 0.0;
    int threads = 1;
};

/// CSV export: header "h,points,seed,norm,value", one row per
/// (h, seed, norm) with 17 significant digits. Extrapolated cells carry
/// the norm names "sup_extrap" and "l2h_extrap".
void write_report_csv(const ConvergenceReport& rep, std::ostream& os);

/// One value row of the CSV form, for round-trip checks.
struct ReportRow {
    double h = 0.0;
    int points = 0;
    std::uint64_t seed = 0;
    std::string norm;
    double value = 0.0;
};
std::vector<ReportRow> read_report_rows_csv(std::istream& is);

/// Structured export: the full report tree as one JSON document.
void write_report_json(const ConvergenceReport& rep, std::ostream& os);

/// Human-oriented summary block: levels, fitted orders, weights, moments.
void write_report_summary(const ConvergenceReport& rep, std::ostream& os);

} // namespace sfdlab
