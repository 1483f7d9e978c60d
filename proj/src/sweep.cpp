#include "roomtune/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>

#include "roomtune/error.hpp"
#include "roomtune/fft.hpp"

namespace roomtune {

void SweepSpec::validate() const {
    if (!(fs > 0.0) || !std::isfinite(fs)) throw ValidationError("sweep sample rate must be positive");
    if (!(f1 > 0.0) || !(f2 > f1)) throw ValidationError("sweep needs 0 < f1 < f2");
    if (f2 > fs / 2.0) throw ValidationError("sweep end frequency exceeds the Nyquist frequency");
    if (!(duration > 0.0) || !std::isfinite(duration)) throw ValidationError("sweep duration must be positive");
    if (!(tail >= 0.0) || !std::isfinite(tail)) throw ValidationError("sweep tail must be non-negative");
}

std::size_t SweepSpec::sweep_samples() const { return static_cast<std::size_t>(std::llround(duration * fs)); }
std::size_t SweepSpec::tail_samples() const { return static_cast<std::size_t>(std::llround(tail * fs)); }
double SweepSpec::rate() const { return duration / std::log(f2 / f1); }

std::vector<double> gen_ess(const SweepSpec& spec) {
    spec.validate();
    const double l = spec.rate();
    const double k = 2.0 * std::numbers::pi * spec.f1 * l;
    std::vector<double> s(spec.total_samples(), 0.0);
    const std::size_t n = spec.sweep_samples();
    for (std::size_t i = 0; i < n; ++i) {
        const double t = static_cast<double>(i) / spec.fs;
        s[i] = std::sin(k * std::expm1(t / l));
    }
    return s;
}

double instantaneous_frequency(const SweepSpec& spec, double t) { return spec.f1 * std::exp(t / spec.rate()); }

ImpulseResponse deconvolve(std::span<const double> recording, const SweepSpec& spec, double floor_db) {
    spec.validate();
    const std::size_t sweep_len = spec.sweep_samples();
    const std::size_t ir_len = spec.tail_samples();
    if (ir_len == 0) throw ValidationError("deconvolution needs a non-zero tail length");
    if (recording.size() < sweep_len) throw ValidationError("recording is shorter than the sweep");

    const auto sweep = gen_ess(spec);
    const std::size_t n = next_pow2(std::max(recording.size(), sweep_len + ir_len));
    const auto rec_bins = rfft(recording, n);
    const auto sweep_bins = rfft(std::span<const double>(sweep.data(), sweep_len), n);

    double peak = 0.0;
    for (const auto& b : sweep_bins) peak = std::max(peak, std::abs(b));
    const double floor_mag = peak * std::pow(10.0, floor_db / 20.0);
    const double df = spec.fs / static_cast<double>(n);

    std::vector<std::complex<double>> h(sweep_bins.size());
    for (std::size_t k = 0; k < h.size(); ++k) {
        const double f = static_cast<double>(k) * df;
        double power = std::norm(sweep_bins[k]);
        if (f < spec.f1 || f > spec.f2) power = std::max(power, floor_mag * floor_mag);
        h[k] = power > 0.0 ? rec_bins[k] * std::conj(sweep_bins[k]) / power : std::complex<double>{};
    }
    auto full = irfft(h, n);
    full.resize(ir_len);
    return ImpulseResponse{spec.fs, std::move(full)};
}

std::vector<double> fft_convolve(std::span<const double> a, std::span<const double> b) {
    if (a.empty() || b.empty()) return {};
    const std::size_t len = a.size() + b.size() - 1;
    const std::size_t n = next_pow2(len);
    auto fa = rfft(a, n);
    const auto fb = rfft(b, n);
    for (std::size_t k = 0; k < fa.size(); ++k) fa[k] *= fb[k];
    auto out = irfft(fa, n);
    out.resize(len);
    return out;
}

}  // namespace roomtune
