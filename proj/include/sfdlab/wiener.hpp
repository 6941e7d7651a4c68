#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "sfdlab/errors.hpp"

namespace sfdlab {

/// One realization of m independent Wiener drivers on a shared time grid
/// 0 = t_0 < ... < t_K = T. Paths are immutable; refine() returns a new
/// path with bridge midpoints inserted, leaving every existing node
/// bitwise unchanged, so one realization serves all (h, dt) levels of a
/// convergence study. All randomness is counter-based and keyed by
/// (seed, driver, interval index, level): the same seed and level always
/// reproduce the same path, node for node.
class WienerPath {
public:
    /// Fresh realization on the uniform grid with K steps over [0, T].
    /// Increment k of driver r is keyed by (seed, r, k, level 0).
    static WienerPath sample(int driver_count, int step_count, double horizon,
                             std::uint64_t seed);

    /// Deterministic pinned path w^r(t) = terminal_r * t / T. Used to
    /// evaluate closed-form solutions at a prescribed driver value.
    static WienerPath conditioned_linear(int driver_count, int step_count, double horizon,
                                         std::span<const double> terminal);

    /// Bridge refinement: inserts the midpoint of every interval, drawn
    /// from Normal(mean of endpoints, dt/4) keyed by (seed, r, interval,
    /// new level). Original nodes are preserved bitwise.
    WienerPath refine() const;

    int driver_count() const noexcept { return m_; }
    /// Number of steps K (nodes minus one).
    int step_count() const noexcept { return static_cast<int>(times_.size()) - 1; }
    double horizon() const noexcept { return times_.back(); }
    std::uint64_t seed() const noexcept { return seed_; }
    int level() const noexcept { return level_; }

    std::span<const double> times() const noexcept { return times_; }

    /// Node value w^r(t_k) by node index.
    double value(int r, int k) const;
    /// Node value by time; off-grid times are rejected, never interpolated.
    double value_at(int r, double t) const;
    /// w^r(t_{k+1}) - w^r(t_k).
    double increment(int r, int k) const;

    /// Node index of time t, or a rejection if t is not on the grid.
    int index_of_time(double t) const;

    /// CSV dump: header "time,w1,...,wm", one node per row, 17 significant
    /// digits (round-trips doubles exactly).
    void write_csv(std::ostream& os) const;
    /// Reads the CSV dump back. The loaded path carries seed 0 / level 0;
    /// it serves golden comparisons, not further refinement.
    static WienerPath read_csv(std::istream& is);

private:
    WienerPath() = default;

    int m_ = 0;
    std::uint64_t seed_ = 0;
    int level_ = 0;
    std::vector<double> times_;
    std::vector<std::vector<double>> w_; // one value vector per driver
};

} // namespace sfdlab
