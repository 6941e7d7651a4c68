#include "sfdlab/stats.hpp"

#include <algorithm>
#include <cmath>

#include "sfdlab/errors.hpp"
#include "sfdlab/philox.hpp"

namespace sfdlab {

OrderFit fit_order(std::span<const std::pair<double, double>> h_and_error) {
    std::vector<std::pair<double, double>> usable;
    bool all_below_floor = true;
    int dropped = 0;
    for (const auto& [h, e] : h_and_error) {
        if (!(h > 0.0)) throw ValidationError("grid spacings must be > 0");
        if (e > kExactFitFloor) {
            all_below_floor = false;
            usable.emplace_back(std::log(h), std::log(e));
        } else {
            ++dropped;
        }
    }
    OrderFit fit;
    fit.dropped = dropped;
    if (all_below_floor && !h_and_error.empty()) {
        fit.exact = true;
        fit.note = "all residuals below the exactness floor";
        return fit;
    }
    if (dropped > 0) fit.note = std::to_string(dropped) + " pair(s) dropped (no positive error)";
    if (usable.size() < 3) {
        fit.note = "no fit: fewer than three usable (h, error) pairs" +
                   (dropped > 0 ? "; " + std::to_string(dropped) + " dropped" : std::string());
        return fit;
    }
    fit.used = static_cast<int>(usable.size());
    double n = static_cast<double>(usable.size());
    double mx = 0.0, my = 0.0;
    for (const auto& [x, y] : usable) {
        mx += x;
        my += y;
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (const auto& [x, y] : usable) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
        syy += (y - my) * (y - my);
    }
    if (sxx == 0.0) {
        fit.note = "no fit: all spacings equal";
        fit.used = 0;
        return fit;
    }
    fit.fitted = true;
    fit.slope = sxy / sxx;
    fit.r_squared = (syy == 0.0) ? 1.0 : (sxy * sxy) / (sxx * syy);
    return fit;
}

MomentEstimate moment_estimate(std::span<const double> errors, double p,
                               unsigned long long seed) {
    if (errors.empty()) throw ValidationError("moment estimate needs at least one sample");
    if (!(p > 0.0)) throw ValidationError("moment exponent must be > 0");
    std::size_t n = errors.size();
    std::vector<double> powered(n);
    double mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        powered[i] = std::pow(std::fabs(errors[i]), p);
        mean += powered[i];
    }
    mean /= static_cast<double>(n);

    // Percentile bootstrap, resampled by the counter-based generator so
    // the interval is reproducible for a given seed.
    constexpr int kResamples = 1000;
    constexpr std::uint32_t kBootstrapTag = 0x626F6F74; // address namespace for resampling
    std::vector<double> means(kResamples);
    for (int b = 0; b < kResamples; ++b) {
        double s = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            double u = philox::uniform(seed, static_cast<std::uint32_t>(b),
                                       static_cast<std::uint64_t>(j), kBootstrapTag);
            auto idx = static_cast<std::size_t>(u * static_cast<double>(n));
            if (idx >= n) idx = n - 1;
            s += powered[idx];
        }
        means[static_cast<std::size_t>(b)] = s / static_cast<double>(n);
    }
    std::sort(means.begin(), means.end());
    auto percentile = [&means](double q) {
        double pos = q * static_cast<double>(means.size() - 1);
        auto idx = static_cast<std::size_t>(pos + 0.5);
        return means[std::min(idx, means.size() - 1)];
    };
    MomentEstimate est;
    est.value = mean;
    est.half_width = 0.5 * (percentile(0.975) - percentile(0.025));
    est.sample_count = static_cast<int>(n);
    if (n == 1) {
        est.half_width = 0.0;
        est.degenerate = true;
    }
    return est;
}

} // namespace sfdlab
