#include "sfdlab/wiener.hpp"

#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "sfdlab/philox.hpp"

namespace sfdlab {

namespace {

std::vector<double> uniform_times(int step_count, double horizon) {
    std::vector<double> t(static_cast<std::size_t>(step_count) + 1);
    for (int k = 0; k <= step_count; ++k)
        t[static_cast<std::size_t>(k)] = (static_cast<double>(k) * horizon) /
                                         static_cast<double>(step_count);
    t.front() = 0.0;
    t.back() = horizon;
    return t;
}

void check_grid_args(int driver_count, int step_count, double horizon) {
    // zero drivers is a valid degenerate case: a deterministic problem
    // still carries a time grid for the explicit integrator
    if (driver_count < 0) throw ValidationError("driver count must be >= 0");
    if (step_count < 1) throw ValidationError("step count must be >= 1");
    if (!(horizon > 0.0)) throw ValidationError("horizon must be > 0");
}

} // namespace

WienerPath WienerPath::sample(int driver_count, int step_count, double horizon,
                              std::uint64_t seed) {
    check_grid_args(driver_count, step_count, horizon);
    WienerPath p;
    p.m_ = driver_count;
    p.seed_ = seed;
    p.level_ = 0;
    p.times_ = uniform_times(step_count, horizon);
    p.w_.assign(static_cast<std::size_t>(driver_count),
                std::vector<double>(p.times_.size(), 0.0));
    for (int r = 0; r < driver_count; ++r) {
        auto& w = p.w_[static_cast<std::size_t>(r)];
        for (int k = 0; k < step_count; ++k) {
            double dt = p.times_[static_cast<std::size_t>(k) + 1] -
                        p.times_[static_cast<std::size_t>(k)];
            double z = philox::normal(seed, static_cast<std::uint32_t>(r),
                                      static_cast<std::uint64_t>(k), 0);
            w[static_cast<std::size_t>(k) + 1] =
                w[static_cast<std::size_t>(k)] + std::sqrt(dt) * z;
        }
    }
    return p;
}

WienerPath WienerPath::conditioned_linear(int driver_count, int step_count, double horizon,
                                          std::span<const double> terminal) {
    check_grid_args(driver_count, step_count, horizon);
    if (static_cast<int>(terminal.size()) != driver_count)
        throw ValidationError("terminal values must list one entry per driver");
    WienerPath p;
    p.m_ = driver_count;
    p.seed_ = 0;
    p.level_ = 0;
    p.times_ = uniform_times(step_count, horizon);
    p.w_.assign(static_cast<std::size_t>(driver_count),
                std::vector<double>(p.times_.size(), 0.0));
    for (int r = 0; r < driver_count; ++r)
        for (std::size_t k = 0; k < p.times_.size(); ++k)
            p.w_[static_cast<std::size_t>(r)][k] =
                terminal[static_cast<std::size_t>(r)] * (p.times_[k] / horizon);
    return p;
}

WienerPath WienerPath::refine() const {
    WienerPath p;
    p.m_ = m_;
    p.seed_ = seed_;
    p.level_ = level_ + 1;
    std::size_t old_nodes = times_.size();
    std::size_t intervals = old_nodes - 1;
    p.times_.resize(old_nodes + intervals);
    for (std::size_t j = 0; j < intervals; ++j) {
        p.times_[2 * j] = times_[j];
        p.times_[2 * j + 1] = 0.5 * (times_[j] + times_[j + 1]);
    }
    p.times_.back() = times_.back();
    p.w_.assign(static_cast<std::size_t>(m_), std::vector<double>(p.times_.size(), 0.0));
    for (int r = 0; r < m_; ++r) {
        const auto& old_w = w_[static_cast<std::size_t>(r)];
        auto& w = p.w_[static_cast<std::size_t>(r)];
        for (std::size_t j = 0; j < intervals; ++j) {
            double dt = times_[j + 1] - times_[j];
            double z = philox::normal(seed_, static_cast<std::uint32_t>(r),
                                      static_cast<std::uint64_t>(j),
                                      static_cast<std::uint32_t>(p.level_));
            w[2 * j] = old_w[j];
            w[2 * j + 1] = 0.5 * (old_w[j] + old_w[j + 1]) + 0.5 * std::sqrt(dt) * z;
        }
        w.back() = old_w.back();
    }
    return p;
}

double WienerPath::value(int r, int k) const {
    if (r < 0 || r >= m_) throw ValidationError("driver index out of range");
    if (k < 0 || k >= static_cast<int>(times_.size()))
        throw ValidationError("node index out of range");
    return w_[static_cast<std::size_t>(r)][static_cast<std::size_t>(k)];
}

int WienerPath::index_of_time(double t) const {
    double scale = std::max(1.0, std::fabs(times_.back()));
    double tol = 1e-12 * scale;
    // The grid is sorted, so bisect, then verify the hit within tolerance.
    std::size_t lo = 0, hi = times_.size();
    while (lo + 1 < hi) {
        std::size_t mid = (lo + hi) / 2;
        if (times_[mid] <= t)
            lo = mid;
        else
            hi = mid;
    }
    for (std::size_t k : {lo, std::min(lo + 1, times_.size() - 1)})
        if (std::fabs(times_[k] - t) <= tol) return static_cast<int>(k);
    std::ostringstream msg;
    msg << "time " << t << " is not a node of the path grid (no interpolation; "
        << "refine the path instead)";
    throw ValidationError(msg.str());
}

double WienerPath::value_at(int r, double t) const {
    return value(r, index_of_time(t));
}

double WienerPath::increment(int r, int k) const {
    if (k < 0 || k + 1 >= static_cast<int>(times_.size()))
        throw ValidationError("interval index out of range");
    return value(r, k + 1) - value(r, k);
}

void WienerPath::write_csv(std::ostream& os) const {
    os << "time";
    for (int r = 1; r <= m_; ++r) os << ",w" << r;
    os << "\n";
    char buf[64];
    for (std::size_t k = 0; k < times_.size(); ++k) {
        std::snprintf(buf, sizeof buf, "%.17g", times_[k]);
        os << buf;
        for (int r = 0; r < m_; ++r) {
            std::snprintf(buf, sizeof buf, "%.17g", w_[static_cast<std::size_t>(r)][k]);
            os << ',' << buf;
        }
        os << "\n";
    }
}

WienerPath WienerPath::read_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line)) throw ValidationError("empty path CSV");
    int m = 0;
    for (char c : line)
        if (c == ',') ++m;
    if (m < 1 || line.rfind("time", 0) != 0)
        throw ValidationError("path CSV must start with a 'time,w1,...' header");
    WienerPath p;
    p.m_ = m;
    p.seed_ = 0;
    p.level_ = 0;
    p.w_.assign(static_cast<std::size_t>(m), {});
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::istringstream row(line);
        std::string cell;
        if (!std::getline(row, cell, ',')) throw ValidationError("malformed path CSV row");
        p.times_.push_back(std::stod(cell));
        for (int r = 0; r < m; ++r) {
            if (!std::getline(row, cell, ','))
                throw ValidationError("path CSV row has too few columns");
            p.w_[static_cast<std::size_t>(r)].push_back(std::stod(cell));
        }
    }
    if (p.times_.size() < 2) throw ValidationError("path CSV needs at least two nodes");
    return p;
}

} // namespace sfdlab
