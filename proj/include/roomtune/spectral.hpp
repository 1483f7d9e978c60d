#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "roomtune/signal.hpp"

namespace roomtune {

/// Magnitude assigned to exactly-zero bins.
inline constexpr double kDbFloor = -200.0;

struct Band {
    double lo = 20.0;   // Hz
    double hi = 150.0;  // Hz
};

double to_db(double linear_magnitude);

/// Magnitude spectrum on uniformly spaced bins, 20 log10 |X| (reference 1).
struct Spectrum {
    double f0 = 0.0;  // frequency of bin 0, Hz
    double df = 0.0;  // bin width, Hz
    std::size_t fft_length = 0;
    std::vector<double> magnitudes_db;

    double frequency(std::size_t bin) const { return f0 + static_cast<double>(bin) * df; }
    std::size_t size() const { return magnitudes_db.size(); }
};

/// Unwindowed DFT over the whole response, cropped to `band`.
Spectrum spectrum(const ImpulseResponse& ir, Band band);

/// All bins from DC to Nyquist.
Spectrum full_spectrum(const ImpulseResponse& ir);

/// Signal energy recovered from a full (DC-to-Nyquist) spectrum by Parseval.
double spectrum_energy(const Spectrum& full);

/// Savitzky-Golay least-squares smoothing of a sequence. Near the ends the
/// window shrinks symmetrically (and the order with it when needed).
std::vector<double> savitzky_golay(std::span<const double> values, int window, int order);

/// Savitzky-Golay smoothing of the dB magnitudes.
Spectrum smooth(const Spectrum& s, int window = 11, int order = 3);

/// Weighted mean of responses sharing a sample rate. Shorter responses are
/// zero-padded to the longest one.
ImpulseResponse mean_ir(std::span<const ImpulseResponse> irs, std::span<const double> weights);
ImpulseResponse mean_ir(std::span<const ImpulseResponse> irs);

struct Spectrogram {
    std::vector<double> times;        // frame centers, s
    std::vector<double> frequencies;  // Hz
    std::vector<std::vector<double>> magnitudes_db;  // [frame][bin]
};

/// Hann-windowed short-time transform magnitudes in dB.
Spectrogram spectrogram(const ImpulseResponse& ir, double window_s, double hop_s, Band band);

struct Peak {
    double frequency = 0.0;     // Hz, parabolic-interpolated
    double magnitude_db = 0.0;  // interpolated peak value
    double prominence_db = 0.0;
    double fwhm_hz = 0.0;
};

/// Local maxima inside `band` whose topographic prominence reaches
/// `min_prominence_db`, ascending by frequency. FWHM is the width at 3 dB
/// below the peak bin (not below the prominence base).
std::vector<Peak> detect_peaks(const Spectrum& s, double min_prominence_db, Band band);

struct PeakOptions {
    Band band{};
    double min_prominence_db = 10.0;
    // Lossless simulated modes are narrower than one bin; smoothing them
    // before picking can flatten a mode that falls exactly on a bin.
    bool smooth = false;
    int sg_window = 11;
    int sg_order = 3;
};

/// spectrum -> optional smoothing -> detect_peaks.
std::vector<Peak> find_peaks(const ImpulseResponse& ir, const PeakOptions& opts);
std::vector<Peak> find_peaks(const Spectrum& s, const PeakOptions& opts);

/// Detected peak nearest `frequency` within `radius`, if any.
const Peak* nearest_peak(std::span<const Peak> peaks, double frequency, double radius);

struct PeakStats {
    double reference_hz = 0.0;
    std::size_t matches = 0;
    double mean_frequency = 0.0;
    double frequency_std = 0.0;  // sample standard deviation, Hz
    double magnitude_std = 0.0;  // dB
};

/// Spread of matched peaks across repeated spectra. Each reference peak is
/// matched to the nearest peak within `radius_hz` detected in every spectrum.
std::vector<PeakStats> peak_variation(std::span<const Spectrum> spectra, std::span<const Peak> reference,
                                      double radius_hz = 3.0, double min_prominence_db = 10.0);

}  // namespace roomtune
