#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "roomtune/signal.hpp"

namespace roomtune {

/// Exponential sine sweep parameters: f1 -> f2 Hz over `duration` seconds at
/// `fs` Hz, followed by `tail` seconds of silence.
struct SweepSpec {
    double f1 = 20.0;
    double f2 = 22500.0;
    double duration = 45.0;
    double fs = 48000.0;
    double tail = 17.0;

    /// Throws ValidationError unless 0 < f1 < f2 <= fs/2, duration > 0, tail >= 0.
    void validate() const;
    std::size_t sweep_samples() const;
    std::size_t tail_samples() const;
    std::size_t total_samples() const { return sweep_samples() + tail_samples(); }
    /// Sweep rate constant L = duration / ln(f2 / f1).
    double rate() const;
};

/// s(t) = sin(K (exp(t/L) - 1)), K = 2 pi f1 L, followed by the zero tail.
std::vector<double> gen_ess(const SweepSpec& spec);

/// f1 exp(t / L), the frequency the sweep passes through at time t.
double instantaneous_frequency(const SweepSpec& spec, double t);

/// Out-of-band regularization floor relative to the sweep's peak magnitude.
inline constexpr double kDeconvolutionFloorDb = -120.0;

/// Recovers the impulse response of a recorded sweep by spectral division.
/// Outside [f1, f2] the sweep magnitude is floored at `floor_db` below its
/// maximum. Output length equals the tail length; a loop-back recording
/// (recording == sweep) yields a unit impulse at sample 0.
ImpulseResponse deconvolve(std::span<const double> recording, const SweepSpec& spec,
                           double floor_db = kDeconvolutionFloorDb);

/// Full linear convolution via FFT (length a + b - 1).
std::vector<double> fft_convolve(std::span<const double> a, std::span<const double> b);

}  // namespace roomtune
