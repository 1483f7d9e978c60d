#include "roomtune/spectral.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>

#include "roomtune/error.hpp"
#include "roomtune/fft.hpp"

namespace roomtune {

double to_db(double linear_magnitude) {
    if (!(linear_magnitude > 0.0)) return kDbFloor;
    return std::max(20.0 * std::log10(linear_magnitude), kDbFloor);
}

namespace {

void check_band(Band band, double nyquist) {
    if (!(band.lo >= 0.0) || !(band.hi > band.lo) || band.hi > nyquist * (1.0 + 1e-12)) {
        throw ValidationError("band [" + std::to_string(band.lo) + ", " + std::to_string(band.hi) +
                              "] Hz must satisfy 0 <= lo < hi <= " + std::to_string(nyquist));
    }
}

std::pair<std::size_t, std::size_t> band_bins(Band band, double df, std::size_t bin_count) {
    auto first = static_cast<std::size_t>(std::ceil(band.lo / df - 1e-9));
    auto last = static_cast<std::size_t>(std::floor(band.hi / df + 1e-9));
    last = std::min(last, bin_count - 1);
    return {first, last};
}

}  // namespace

Spectrum spectrum(const ImpulseResponse& ir, Band band) {
    if (ir.samples.empty()) throw ValidationError("cannot take the spectrum of an empty response");
    if (!(ir.sample_rate > 0.0)) throw ValidationError("sample rate must be positive");
    check_band(band, ir.sample_rate / 2.0);
    const std::size_t n = ir.samples.size();
    const auto bins = rfft(ir.samples, n);
    Spectrum s;
    s.fft_length = n;
    s.df = ir.sample_rate / static_cast<double>(n);
    const auto [first, last] = band_bins(band, s.df, bins.size());
    s.f0 = static_cast<double>(first) * s.df;
    for (std::size_t k = first; k <= last && k < bins.size(); ++k) s.magnitudes_db.push_back(to_db(std::abs(bins[k])));
    return s;
}

Spectrum full_spectrum(const ImpulseResponse& ir) {
    if (!(ir.sample_rate > 0.0)) throw ValidationError("sample rate must be positive");
    return spectrum(ir, {0.0, ir.sample_rate / 2.0});
}

double spectrum_energy(const Spectrum& full) {
    const std::size_t n = full.fft_length;
    if (full.f0 != 0.0 || full.size() != n / 2 + 1) throw ValidationError("spectrum_energy needs a full-band spectrum");
    double sum = 0.0;
    for (std::size_t k = 0; k < full.size(); ++k) {
        const double mag = std::pow(10.0, full.magnitudes_db[k] / 20.0);
        const bool unpaired = k == 0 || (n % 2 == 0 && k == n / 2);
        sum += (unpaired ? 1.0 : 2.0) * mag * mag;
    }
    return sum / static_cast<double>(n);
}

// ---------------------------------------------------------------------------
// Savitzky-Golay

namespace {

// Weights producing the least-squares polynomial value at the window center.
std::vector<double> sg_weights(int half, int order) {
    const int len = 2 * half + 1;
    Eigen::MatrixXd a(len, order + 1);
    for (int r = 0; r < len; ++r) {
        double x = 1.0;
        for (int p = 0; p <= order; ++p) {
            a(r, p) = x;
            x *= static_cast<double>(r - half);
        }
    }
    const Eigen::MatrixXd pinv = a.completeOrthogonalDecomposition().pseudoInverse();
    std::vector<double> w(len);
    for (int r = 0; r < len; ++r) w[r] = pinv(0, r);
    return w;
}

}  // namespace

std::vector<double> savitzky_golay(std::span<const double> values, int window, int order) {
    if (window < 1 || window % 2 == 0) throw ValidationError("Savitzky-Golay window must be a positive odd bin count");
    if (order < 0 || order >= window) throw ValidationError("Savitzky-Golay order must be in [0, window)");
    const int half = window / 2;
    const auto n = static_cast<long>(values.size());
    std::map<int, std::vector<double>> cache;
    std::vector<double> out(values.size());
    for (long i = 0; i < n; ++i) {
        const int h = static_cast<int>(std::min<long>({half, i, n - 1 - i}));
        auto it = cache.find(h);
        if (it == cache.end()) it = cache.emplace(h, sg_weights(h, std::min(order, 2 * h))).first;
        const auto& w = it->second;
        double acc = 0.0;
        for (int r = -h; r <= h; ++r) acc += w[r + h] * values[i + r];
        out[i] = acc;
    }
    return out;
}

Spectrum smooth(const Spectrum& s, int window, int order) {
    Spectrum out = s;
    out.magnitudes_db = savitzky_golay(s.magnitudes_db, window, order);
    return out;
}

// ---------------------------------------------------------------------------

ImpulseResponse mean_ir(std::span<const ImpulseResponse> irs, std::span<const double> weights) {
    if (irs.empty()) throw ValidationError("mean_ir needs at least one response");
    if (weights.size() != irs.size()) throw ValidationError("mean_ir: one weight per response required");
    double total = 0.0;
    for (double w : weights) {
        if (!std::isfinite(w) || w < 0.0) throw ValidationError("mean_ir weights must be non-negative");
        total += w;
    }
    if (total <= 0.0) throw ValidationError("mean_ir weights must not all be zero");
    ImpulseResponse out;
    out.sample_rate = irs.front().sample_rate;
    std::size_t len = 0;
    for (const auto& ir : irs) {
        if (ir.sample_rate != out.sample_rate) throw ValidationError("mean_ir: responses have different sample rates");
        len = std::max(len, ir.samples.size());
    }
    out.samples.assign(len, 0.0);
    for (std::size_t r = 0; r < irs.size(); ++r) {
        const double w = weights[r] / total;
        for (std::size_t i = 0; i < irs[r].samples.size(); ++i) out.samples[i] += w * irs[r].samples[i];
    }
    return out;
}

ImpulseResponse mean_ir(std::span<const ImpulseResponse> irs) {
    const std::vector<double> equal(irs.size(), 1.0);
    return mean_ir(irs, equal);
}

// ---------------------------------------------------------------------------

Spectrogram spectrogram(const ImpulseResponse& ir, double window_s, double hop_s, Band band) {
    if (!(ir.sample_rate > 0.0)) throw ValidationError("sample rate must be positive");
    if (!(window_s > 0.0) || !(hop_s > 0.0)) throw ValidationError("window and hop must be positive");
    const auto win = static_cast<std::size_t>(std::llround(window_s * ir.sample_rate));
    const auto hop = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(hop_s * ir.sample_rate)));
    if (win < 2 || win > ir.samples.size()) throw ValidationError("spectrogram window is longer than the signal");
    check_band(band, ir.sample_rate / 2.0);

    std::vector<double> hann(win);
    for (std::size_t i = 0; i < win; ++i)
        hann[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(win));

    const double df = ir.sample_rate / static_cast<double>(win);
    const auto [first, last] = band_bins(band, df, win / 2 + 1);
    Spectrogram out;
    for (std::size_t k = first; k <= last; ++k) out.frequencies.push_back(static_cast<double>(k) * df);

    std::vector<double> frame(win);
    for (std::size_t start = 0; start + win <= ir.samples.size(); start += hop) {
        for (std::size_t i = 0; i < win; ++i) frame[i] = hann[i] * ir.samples[start + i];
        const auto bins = rfft(frame, win);
        std::vector<double> row;
        row.reserve(out.frequencies.size());
        for (std::size_t k = first; k <= last; ++k) row.push_back(to_db(std::abs(bins[k])));
        out.magnitudes_db.push_back(std::move(row));
        out.times.push_back((static_cast<double>(start) + 0.5 * static_cast<double>(win)) / ir.sample_rate);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Peak picking

std::vector<Peak> detect_peaks(const Spectrum& s, double min_prominence_db, Band band) {
    std::vector<Peak> peaks;
    if (s.size() < 3 || !(s.df > 0.0)) return peaks;
    const auto& y = s.magnitudes_db;
    const auto to_bin = [&](double f) { return (f - s.f0) / s.df; };
    const long n = static_cast<long>(y.size());
    const long lo = std::max<long>(0, static_cast<long>(std::ceil(to_bin(band.lo) - 1e-9)));
    const long hi = std::min<long>(n - 1, static_cast<long>(std::floor(to_bin(band.hi) + 1e-9)));
    if (hi - lo < 2) return peaks;

    for (long i = lo + 1; i < hi; ++i) {
        if (!(y[i] > y[i - 1])) continue;
        // Plateaus count once, at their middle.
        long j = i;
        while (j + 1 <= hi && y[j + 1] == y[i]) ++j;
        if (j == hi || !(y[j + 1] < y[i])) {
            i = j;
            continue;
        }
        const long top = (i + j) / 2;
        const double height = y[top];

        double left_min = height;
        for (long k = i - 1; k >= lo && y[k] <= height; --k) left_min = std::min(left_min, y[k]);
        double right_min = height;
        for (long k = j + 1; k <= hi && y[k] <= height; ++k) right_min = std::min(right_min, y[k]);
        const double base = std::max(left_min, right_min);
        const double prominence = height - base;
        const long first = i;
        const bool single_bin = i == j;
        i = j;
        if (prominence < min_prominence_db || prominence <= 0.0) continue;

        Peak p;
        double offset = 0.0;
        p.magnitude_db = height;
        if (single_bin) {
            const double a = y[top - 1], b = y[top], c = y[top + 1];
            const double denom = a - 2.0 * b + c;
            if (denom < 0.0) {
                offset = 0.5 * (a - c) / denom;
                p.magnitude_db = b - 0.25 * (a - c) * offset;
            }
        }
        // A flat top is centred between its first and last bins.
        if (!single_bin) offset = 0.5 * static_cast<double>(j - first) - static_cast<double>(top - first);
        p.frequency = s.frequency(static_cast<std::size_t>(top)) + offset * s.df;
        p.prominence_db = prominence;

        const double level = std::max(height - 3.0, base);
        double left = static_cast<double>(lo);
        for (long k = top; k > lo; --k) {
            if (y[k - 1] <= level) {
                left = static_cast<double>(k - 1) + (level - y[k - 1]) / (y[k] - y[k - 1]);
                break;
            }
        }
        double right = static_cast<double>(hi);
        for (long k = top; k < hi; ++k) {
            if (y[k + 1] <= level) {
                right = static_cast<double>(k) + (y[k] - level) / (y[k] - y[k + 1]);
                break;
            }
        }
        p.fwhm_hz = (right - left) * s.df;
        if (p.frequency < band.lo || p.frequency > band.hi) continue;
        peaks.push_back(p);
    }
    return peaks;
}

std::vector<Peak> find_peaks(const Spectrum& s, const PeakOptions& opts) {
    if (opts.smooth) return detect_peaks(smooth(s, opts.sg_window, opts.sg_order), opts.min_prominence_db, opts.band);
    return detect_peaks(s, opts.min_prominence_db, opts.band);
}

std::vector<Peak> find_peaks(const ImpulseResponse& ir, const PeakOptions& opts) {
    return find_peaks(spectrum(ir, opts.band), opts);
}

const Peak* nearest_peak(std::span<const Peak> peaks, double frequency, double radius) {
    const Peak* best = nullptr;
    for (const auto& p : peaks) {
        const double d = std::abs(p.frequency - frequency);
        if (d <= radius && (!best || d < std::abs(best->frequency - frequency))) best = &p;
    }
    return best;
}

std::vector<PeakStats> peak_variation(std::span<const Spectrum> spectra, std::span<const Peak> reference,
                                      double radius_hz, double min_prominence_db) {
    if (spectra.size() < 2) throw ValidationError("peak_variation needs at least two spectra");
    std::vector<std::vector<Peak>> detected;
    detected.reserve(spectra.size());
    for (const auto& s : spectra) {
        const Band all{s.f0, s.frequency(s.size() == 0 ? 0 : s.size() - 1)};
        detected.push_back(detect_peaks(s, min_prominence_db, all));
    }
    std::vector<PeakStats> out;
    for (const auto& ref : reference) {
        PeakStats st;
        st.reference_hz = ref.frequency;
        std::vector<double> freqs, mags;
        for (const auto& peaks : detected) {
            if (const Peak* m = nearest_peak(peaks, ref.frequency, radius_hz)) {
                freqs.push_back(m->frequency);
                mags.push_back(m->magnitude_db);
            }
        }
        st.matches = freqs.size();
        const auto stats = [](const std::vector<double>& v, double& mean) {
            mean = 0.0;
            for (double x : v) mean += x;
            mean /= static_cast<double>(v.size());
            if (v.size() < 2) return 0.0;
            double ss = 0.0;
            for (double x : v) ss += (x - mean) * (x - mean);
            return std::sqrt(ss / static_cast<double>(v.size() - 1));
        };
        if (!freqs.empty()) {
            double mag_mean = 0.0;
            st.frequency_std = stats(freqs, st.mean_frequency);
            st.magnitude_std = stats(mags, mag_mean);
        }
        out.push_back(st);
    }
    return out;
}

}  // namespace roomtune
