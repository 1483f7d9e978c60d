#include "roomtune/io.hpp"

#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <iomanip>
#include <limits>
#include <sstream>

#include "roomtune/error.hpp"

namespace roomtune {

namespace fs = std::filesystem;

std::vector<std::string> split_csv_line(std::string_view line) {
    std::vector<std::string> fields(1);
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char ch = line[i];
        if (quoted) {
            if (ch == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                fields.back() += '"';
                ++i;
            } else if (ch == '"') {
                quoted = false;
            } else {
                fields.back() += ch;
            }
        } else if (ch == '"') {
            quoted = true;
        } else if (ch == ',') {
            fields.emplace_back();
        } else if (ch != '\r') {
            fields.back() += ch;
        }
    }
    for (auto& f : fields) {
        const auto b = f.find_first_not_of(" \t");
        const auto e = f.find_last_not_of(" \t");
        f = b == std::string::npos ? std::string() : f.substr(b, e - b + 1);
    }
    return fields;
}

std::ofstream open_output(const fs::path& path) {
    if (path.has_parent_path()) {
        std::error_code ec;
        fs::create_directories(path.parent_path(), ec);
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    out << std::setprecision(17);
    return out;
}

// ---------------------------------------------------------------------------
// WAV

namespace {

void put_u16(std::string& b, std::uint16_t v) {
    b += static_cast<char>(v & 0xff);
    b += static_cast<char>((v >> 8) & 0xff);
}

void put_u32(std::string& b, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) b += static_cast<char>((v >> (8 * i)) & 0xff);
}

std::uint32_t get_u32(const unsigned char* p) {
    return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
           (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

std::uint16_t get_u16(const unsigned char* p) {
    return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatFloat = 3;
constexpr std::uint16_t kFormatExtensible = 0xfffe;

}  // namespace

void write_wav(const fs::path& path, std::span<const double> samples, double sample_rate) {
    if (!(sample_rate >= 1.0)) throw ValidationError("WAV sample rate must be at least 1 Hz");
    const auto rate = static_cast<std::uint32_t>(std::llround(sample_rate));
    const auto data_bytes = static_cast<std::uint32_t>(samples.size() * 4);
    std::string b;
    b.reserve(58 + data_bytes);
    b += "RIFF";
    put_u32(b, 4 + (8 + 18) + (8 + 4) + (8 + data_bytes));
    b += "WAVE";
    b += "fmt ";
    put_u32(b, 18);
    put_u16(b, kFormatFloat);
    put_u16(b, 1);
    put_u32(b, rate);
    put_u32(b, rate * 4);
    put_u16(b, 4);
    put_u16(b, 32);
    put_u16(b, 0);
    b += "fact";
    put_u32(b, 4);
    put_u32(b, static_cast<std::uint32_t>(samples.size()));
    b += "data";
    put_u32(b, data_bytes);
    for (double s : samples) {
        const float f = static_cast<float>(s);
        std::uint32_t bits;
        std::memcpy(&bits, &f, sizeof bits);
        put_u32(b, bits);
    }
    auto out = open_output(path);
    out.write(b.data(), static_cast<std::streamsize>(b.size()));
    if (!out) throw IoError("failed writing '" + path.string() + "'");
}

ImpulseResponse read_wav(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path.string() + "'");
    const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    const auto* p = reinterpret_cast<const unsigned char*>(bytes.data());
    const std::size_t size = bytes.size();
    const std::string where = path.string() + ": ";
    if (size < 12 || std::memcmp(p, "RIFF", 4) != 0 || std::memcmp(p + 8, "WAVE", 4) != 0)
        throw ParseError(where + "not a RIFF/WAVE file");

    std::uint16_t format = 0, channels = 0, bits = 0;
    std::uint32_t rate = 0;
    const unsigned char* data = nullptr;
    std::size_t data_size = 0;
    for (std::size_t pos = 12; pos + 8 <= size;) {
        const std::uint32_t chunk = get_u32(p + pos + 4);
        const std::size_t body = pos + 8;
        const std::size_t avail = std::min<std::size_t>(chunk, size - body);
        if (std::memcmp(p + pos, "fmt ", 4) == 0) {
            if (avail < 16) throw ParseError(where + "truncated fmt chunk");
            format = get_u16(p + body);
            channels = get_u16(p + body + 2);
            rate = get_u32(p + body + 4);
            bits = get_u16(p + body + 14);
            if (format == kFormatExtensible) {
                if (avail < 26) throw ParseError(where + "truncated extensible fmt chunk");
                format = get_u16(p + body + 24);
            }
        } else if (std::memcmp(p + pos, "data", 4) == 0) {
            data = p + body;
            data_size = avail;
        }
        pos = body + chunk + (chunk & 1u);
    }
    if (!format || !data) throw ParseError(where + "missing fmt or data chunk");
    if (channels != 1) throw ParseError(where + "only mono WAV files are supported");
    if (rate == 0) throw ParseError(where + "zero sample rate");

    ImpulseResponse ir;
    ir.sample_rate = rate;
    const std::size_t width = bits / 8;
    if (width == 0) throw ParseError(where + "invalid sample width");
    const std::size_t count = data_size / width;
    ir.samples.resize(count);
    for (std::size_t i = 0; i < count; ++i) {
        const unsigned char* s = data + i * width;
        double v = 0.0;
        if (format == kFormatFloat && bits == 32) {
            float f;
            std::memcpy(&f, s, 4);
            v = f;
        } else if (format == kFormatFloat && bits == 64) {
            std::memcpy(&v, s, 8);
        } else if (format == kFormatPcm && (bits == 16 || bits == 24 || bits == 32)) {
            std::int64_t raw = 0;
            for (std::size_t b = 0; b < width; ++b) raw |= static_cast<std::int64_t>(s[b]) << (8 * b);
            const std::int64_t sign_bit = std::int64_t{1} << (bits - 1);
            if (raw & sign_bit) raw -= sign_bit << 1;
            v = static_cast<double>(raw) / static_cast<double>(sign_bit);
        } else {
            throw ParseError(where + "unsupported WAV encoding (format " + std::to_string(format) + ", " +
                             std::to_string(bits) + " bit)");
        }
        ir.samples[i] = v;
    }
    return ir;
}

// ---------------------------------------------------------------------------
// CSV signals

void write_signal_csv(const fs::path& path, const ImpulseResponse& ir) {
    auto out = open_output(path);
    out << "time_s,pressure\n";
    for (std::size_t i = 0; i < ir.samples.size(); ++i)
        out << static_cast<double>(i) / ir.sample_rate << ',' << ir.samples[i] << '\n';
    if (!out) throw IoError("failed writing '" + path.string() + "'");
}

ImpulseResponse read_signal_csv(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path.string() + "'");
    std::vector<double> times;
    ImpulseResponse ir;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        const auto fields = split_csv_line(line);
        if (fields.size() < 2) throw ParseError(path.string() + ": expected time,value", line_no);
        try {
            times.push_back(std::stod(fields[0]));
            ir.samples.push_back(std::stod(fields[1]));
        } catch (const std::exception&) {
            if (times.empty() && ir.samples.empty()) continue;  // header
            throw ParseError(path.string() + ": invalid number", line_no);
        }
    }
    if (ir.samples.size() < 2) throw ParseError(path.string() + ": need at least two samples");
    const double span = times.back() - times.front();
    if (!(span > 0.0)) throw ParseError(path.string() + ": time column must increase");
    ir.sample_rate = static_cast<double>(times.size() - 1) / span;
    return ir;
}

namespace {

fs::path sidecar_path(const fs::path& path) { return fs::path(path.string() + ".json"); }

bool has_extension(const fs::path& path, std::string_view ext) {
    std::string e = path.extension().string();
    std::transform(e.begin(), e.end(), e.begin(), [](unsigned char c) { return std::tolower(c); });
    return e == ext;
}

}  // namespace

ImpulseResponse read_signal(const fs::path& path) {
    ImpulseResponse ir = has_extension(path, ".wav") ? read_wav(path) : read_signal_csv(path);
    const fs::path meta = sidecar_path(path);
    if (fs::exists(meta)) {
        std::ifstream in(meta);
        try {
            const auto j = nlohmann::json::parse(in);
            if (j.contains("sample_rate_hz")) ir.sample_rate = j.at("sample_rate_hz").get<double>();
        } catch (const nlohmann::json::exception& e) {
            throw ParseError(meta.string() + ": " + e.what());
        }
    }
    return ir;
}

void write_signal(const fs::path& path, const ImpulseResponse& ir) {
    const bool wav = has_extension(path, ".wav");
    if (wav)
        write_wav(path, ir.samples, ir.sample_rate);
    else
        write_signal_csv(path, ir);
    nlohmann::json meta{{"sample_rate_hz", ir.sample_rate},
                        {"time_step_s", 1.0 / ir.sample_rate},
                        {"samples", ir.samples.size()},
                        {"format", wav ? "wav-float32-mono" : "csv"}};
    if (wav) meta["wav_header_rate_hz"] = std::llround(ir.sample_rate);
    auto out = open_output(sidecar_path(path));
    out << meta.dump(2) << '\n';
}

// ---------------------------------------------------------------------------
// Reports

void write_spectrum_csv(std::ostream& out, const Spectrum& s, const Spectrum* smoothed) {
    out << std::setprecision(10);
    out << "frequency_hz,magnitude_db" << (smoothed ? ",smoothed_db" : "") << '\n';
    for (std::size_t i = 0; i < s.size(); ++i) {
        out << s.frequency(i) << ',' << s.magnitudes_db[i];
        if (smoothed) out << ',' << smoothed->magnitudes_db[i];
        out << '\n';
    }
}

void write_spectrogram_csv(std::ostream& out, const Spectrogram& sg) {
    out << std::setprecision(10);
    out << "frequency_hz,time_s,magnitude_db\n";
    for (std::size_t t = 0; t < sg.times.size(); ++t)
        for (std::size_t f = 0; f < sg.frequencies.size(); ++f)
            out << sg.frequencies[f] << ',' << sg.times[t] << ',' << sg.magnitudes_db[t][f] << '\n';
}

void write_peaks_csv(std::ostream& out, std::span<const Peak> peaks) {
    out << std::setprecision(10);
    out << "frequency_hz,magnitude_db,prominence_db,fwhm_hz\n";
    for (const auto& p : peaks)
        out << p.frequency << ',' << p.magnitude_db << ',' << p.prominence_db << ',' << p.fwhm_hz << '\n';
}

void write_gnuplot_block(std::ostream& out, std::string_view name, const Spectrum& s) {
    out << std::setprecision(10);
    out << '$' << name << " << EOD\n";
    for (std::size_t i = 0; i < s.size(); ++i) out << s.frequency(i) << ' ' << s.magnitudes_db[i] << '\n';
    out << "EOD\n";
}

}  // namespace roomtune
