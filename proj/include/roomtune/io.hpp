#pragma once

#include <filesystem>
#include <fstream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "roomtune/signal.hpp"
#include "roomtune/spectral.hpp"

namespace roomtune {

/// Splits one CSV record; double-quoted fields may contain commas.
std::vector<std::string> split_csv_line(std::string_view line);

/// Mono 32-bit IEEE float WAV. The header rate is the rounded sample rate.
void write_wav(const std::filesystem::path& path, std::span<const double> samples, double sample_rate);

/// Reads a mono WAV (float32, or 16/24/32-bit PCM scaled to [-1, 1)).
/// Multi-channel files are rejected.
ImpulseResponse read_wav(const std::filesystem::path& path);

/// CSV with header "time_s,pressure".
void write_signal_csv(const std::filesystem::path& path, const ImpulseResponse& ir);
/// Reads "time_s,<value>" rows; the rate is taken from the time column.
ImpulseResponse read_signal_csv(const std::filesystem::path& path);

/// Reads .wav or .csv by extension. A "<path>.json" sidecar with a
/// "sample_rate_hz" entry overrides the rate stored in the file.
ImpulseResponse read_signal(const std::filesystem::path& path);

/// Writes the response as WAV or CSV (by extension) plus a JSON sidecar
/// holding the exact sample rate and time step.
void write_signal(const std::filesystem::path& path, const ImpulseResponse& ir);

void write_spectrum_csv(std::ostream& out, const Spectrum& s, const Spectrum* smoothed = nullptr);
void write_spectrogram_csv(std::ostream& out, const Spectrogram& sg);
void write_peaks_csv(std::ostream& out, std::span<const Peak> peaks);

/// gnuplot inline data block: "$name << EOD" ... "EOD".
void write_gnuplot_block(std::ostream& out, std::string_view name, const Spectrum& s);

/// Opens `path` for writing or throws IoError.
std::ofstream open_output(const std::filesystem::path& path);

}  // namespace roomtune
