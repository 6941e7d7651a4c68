#include "sfdlab/spectral.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>

namespace sfdlab {

namespace {

// FFTW plan creation mutates global planner state.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

} // namespace

struct SpectralTransform::Impl {
    fftw_complex* in = nullptr;
    fftw_complex* out = nullptr;
    fftw_plan fwd = nullptr;
    fftw_plan inv = nullptr;
    std::size_t n_total = 0;

    ~Impl() {
        std::lock_guard<std::mutex> lock(planner_mutex());
        if (fwd) fftw_destroy_plan(fwd);
        if (inv) fftw_destroy_plan(inv);
        if (in) fftw_free(in);
        if (out) fftw_free(out);
    }
};

SpectralTransform::SpectralTransform(const Lattice& lat)
    : lat_(lat), impl_(std::make_unique<Impl>()) {
    impl_->n_total = lat.size();
    impl_->in = fftw_alloc_complex(impl_->n_total);
    impl_->out = fftw_alloc_complex(impl_->n_total);
    std::vector<int> dims(static_cast<std::size_t>(lat.dim()), lat.points_per_axis());
    std::lock_guard<std::mutex> lock(planner_mutex());
    impl_->fwd = fftw_plan_dft(lat.dim(), dims.data(), impl_->in, impl_->out, FFTW_FORWARD,
                               FFTW_ESTIMATE);
    impl_->inv = fftw_plan_dft(lat.dim(), dims.data(), impl_->in, impl_->out, FFTW_BACKWARD,
                               FFTW_ESTIMATE);
}

SpectralTransform::~SpectralTransform() = default;

double SpectralTransform::wavenumber(int m) const {
    const int n = lat_.points_per_axis();
    const int s = (m <= n / 2) ? m : m - n;
    return 2.0 * M_PI * static_cast<double>(s) / lat_.period();
}

std::vector<std::complex<double>> SpectralTransform::forward(const GridFunction& f) const {
    if (!(f.lattice() == lat_)) throw ValidationError("spectral transform lattice mismatch");
    const std::size_t n = impl_->n_total;
    for (std::size_t i = 0; i < n; ++i) {
        impl_->in[i][0] = f[i];
        impl_->in[i][1] = 0.0;
    }
    fftw_execute(impl_->fwd);
    std::vector<std::complex<double>> modes(n);
    const double scale = 1.0 / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i)
        modes[i] = std::complex<double>(impl_->out[i][0] * scale, impl_->out[i][1] * scale);
    return modes;
}

GridFunction SpectralTransform::inverse_real(const std::vector<std::complex<double>>& modes) const {
    if (modes.size() != impl_->n_total) throw ValidationError("mode count mismatch");
    for (std::size_t i = 0; i < modes.size(); ++i) {
        impl_->in[i][0] = modes[i].real();
        impl_->in[i][1] = modes[i].imag();
    }
    fftw_execute(impl_->inv);
    GridFunction g(lat_);
    for (std::size_t i = 0; i < modes.size(); ++i) g[i] = impl_->out[i][0];
    return g;
}

void SpectralTransform::apply_directional_multiplier(std::vector<std::complex<double>>& modes,
                                                     const DirectionVector& lam,
                                                     int power) const {
    if (lam.dim() != lat_.dim()) throw ValidationError("direction dimension mismatch");
    if (power < 0) throw ValidationError("derivative power must be nonnegative");
    if (power == 0) return;
    const int n = lat_.points_per_axis();
    const bool even_n = (n % 2 == 0);
    const bool odd_power = (power % 2 != 0);
    const std::size_t total = modes.size();
    const auto un = static_cast<std::size_t>(n);
    for (std::size_t idx = 0; idx < total; ++idx) {
        double kdot = 0.0;
        bool nyquist = false;
        std::size_t rem = idx;
        for (int ax = lat_.dim() - 1; ax >= 0; --ax) {
            const int m = static_cast<int>(rem % un);
            rem /= un;
            if (even_n && m == n / 2 && lam[ax] != 0) nyquist = true;
            kdot += wavenumber(m) * lam[ax];
        }
        if (nyquist && odd_power) {
            modes[idx] = 0.0;
            continue;
        }
        // (i kdot)^power
        std::complex<double> mult = std::pow(std::complex<double>(0.0, kdot), power);
        modes[idx] *= mult;
    }
}

GridFunction SpectralTransform::directional_derivative(const GridFunction& f,
                                                       const DirectionVector& lam,
                                                       int power) const {
    auto modes = forward(f);
    apply_directional_multiplier(modes, lam, power);
    return inverse_real(modes);
}

double SpectralTransform::high_mode_energy_fraction(const GridFunction& f) const {
    auto modes = forward(f);
    const int n = lat_.points_per_axis();
    const auto un = static_cast<std::size_t>(n);
    double total = 0.0, high = 0.0;
    for (std::size_t idx = 0; idx < modes.size(); ++idx) {
        const double e = std::norm(modes[idx]);
        total += e;
        std::size_t rem = idx;
        for (int ax = lat_.dim() - 1; ax >= 0; --ax) {
            const int m = static_cast<int>(rem % un);
            rem /= un;
            const int s = (m <= n / 2) ? m : m - n;
            if (std::abs(s) > n / 3) {
                high += e;
                break;
            }
        }
    }
    return total > 0.0 ? high / total : 0.0;
}

double SpectralTransform::derivative_tensor_norm(const GridFunction& f, int k) const {
    if (k < 0) throw ValidationError("derivative order must be nonnegative");
    auto modes = forward(f);
    const auto un = static_cast<std::size_t>(lat_.points_per_axis());
    double vol = 1.0;
    for (int ax = 0; ax < lat_.dim(); ++ax) vol *= lat_.period();
    double sum = 0.0;
    for (std::size_t idx = 0; idx < modes.size(); ++idx) {
        double k2 = 0.0;
        std::size_t rem = idx;
        for (int ax = lat_.dim() - 1; ax >= 0; --ax) {
            const double w = wavenumber(static_cast<int>(rem % un));
            rem /= un;
            k2 += w * w;
        }
        sum += std::norm(modes[idx]) * std::pow(k2, k);
    }
    return std::sqrt(vol * sum);
}

} // namespace sfdlab
