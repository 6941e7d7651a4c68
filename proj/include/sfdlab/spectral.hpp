#pragma once

#include <complex>
#include <memory>
#include <vector>

#include "sfdlab/lattice.hpp"

namespace sfdlab {

/// Periodic Fourier differentiation on a lattice. Wraps FFTW plans for the
/// lattice's full d-dimensional complex transform. Not thread-safe: each
/// worker thread builds its own instance (plans and scratch are per-object;
/// plan creation itself is serialized internally).
///
/// Mode frequencies follow the usual signed layout: index m on an axis of
/// N points carries wavenumber 2*pi*s(m)/L with s(m) = m for m <= N/2 and
/// m - N otherwise. Odd derivative powers zero the unpaired Nyquist mode of
/// even N; even powers keep it.
class SpectralTransform {
public:
    explicit SpectralTransform(const Lattice& lat);
    ~SpectralTransform();
    SpectralTransform(const SpectralTransform&) = delete;
    SpectralTransform& operator=(const SpectralTransform&) = delete;

    const Lattice& lattice() const noexcept { return lat_; }

    std::vector<std::complex<double>> forward(const GridFunction& f) const;
    GridFunction inverse_real(const std::vector<std::complex<double>>& modes) const;

    /// Directional derivative power: (lam . grad)^power f, computed as the
    /// Fourier multiplier (i k . lam)^power.
    GridFunction directional_derivative(const GridFunction& f, const DirectionVector& lam,
                                        int power) const;

    /// Same multiplier applied to an already transformed spectrum, in place.
    void apply_directional_multiplier(std::vector<std::complex<double>>& modes,
                                      const DirectionVector& lam, int power) const;

    /// Fraction of spectral energy carried by modes whose frequency index
    /// exceeds N/3 in absolute value on any axis. Zero field reports 0.
    double high_mode_energy_fraction(const GridFunction& f) const;

    /// Norm of the full k-th derivative tensor: sqrt of the integral of
    /// sum over all ordered k-tuples (i1..ik) of |D_{i1}..D_{ik} f|^2,
    /// evaluated spectrally as the (|k|^2)^k multiplier on the energy.
    double derivative_tensor_norm(const GridFunction& f, int k) const;

    /// Signed frequency times 2*pi/L for axis index m.
    double wavenumber(int m) const;

private:
    struct Impl;
    Lattice lat_;
    std::unique_ptr<Impl> impl_;
};

} // namespace sfdlab
