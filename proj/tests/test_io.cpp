#include <catch_amalgamated.hpp>

#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "roomtune/dataset.hpp"
#include "roomtune/error.hpp"
#include "roomtune/io.hpp"
#include "roomtune/modal.hpp"

using namespace roomtune;
namespace fs = std::filesystem;
using Catch::Matchers::WithinAbs;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / "roomtune_test_io";
    fs::create_directories(dir);
    return dir / name;
}

void put(std::string& b, std::uint32_t v, int bytes) {
    for (int i = 0; i < bytes; ++i) b += static_cast<char>((v >> (8 * i)) & 0xff);
}

// Hand-built PCM WAV header around raw sample bytes.
void write_pcm(const fs::path& path, int channels, int bits, std::uint32_t rate, const std::string& data) {
    std::string b = "RIFF";
    put(b, 36 + static_cast<std::uint32_t>(data.size()), 4);
    b += "WAVEfmt ";
    put(b, 16, 4);
    put(b, 1, 2);
    put(b, channels, 2);
    put(b, rate, 4);
    put(b, rate * channels * bits / 8, 4);
    put(b, channels * bits / 8, 2);
    put(b, bits, 2);
    b += "data";
    put(b, static_cast<std::uint32_t>(data.size()), 4);
    b += data;
    std::ofstream(path, std::ios::binary) << b;
}

}  // namespace

TEST_CASE("bundled chambers") {
    const auto chambers = bundled_chambers();
    REQUIRE(chambers.size() == 6);
    const std::vector<std::string> labels{"18", "20", "24", "25", "26", "27"};
    for (std::size_t i = 0; i < labels.size(); ++i) CHECK(chambers[i].label == labels[i]);
    const auto& ch27 = find_chamber(chambers, "27");
    CHECK(*ch27.dims[0] == 3.60);
    CHECK(*ch27.dims[1] == 2.60);
    CHECK(*ch27.dims[2] == 2.35);
    const auto& ch18 = find_chamber(chambers, "18");
    CHECK(ch18.to_box().dims() == Vec3{6.70, 4.24, 2.20});
    const auto& ch25 = find_chamber(chambers, "25");
    CHECK_FALSE(ch25.dims[2].has_value());
    CHECK_THROWS_AS(ch25.to_box(), ValidationError);
    CHECK_THROWS_AS(find_chamber(chambers, "99"), ValidationError);
}

TEST_CASE("chamber CSV parsing") {
    const auto parsed = parse_chamber_csv("label,lx_cm,ly_cm,lz_cm\n# comment\nA,100,200,\nB,50,60,70\n");
    REQUIRE(parsed.size() == 2);
    CHECK(*parsed[0].dims[0] == 1.0);
    CHECK_FALSE(parsed[0].dims[2]);
    CHECK(*parsed[1].dims[2] == 0.70);
    CHECK(parse_chamber_csv("label,lx_cm,ly_cm,lz_cm\n").empty());
    CHECK_THROWS_AS(parse_chamber_csv("A,1,2,3\nA,4,5,6\n"), ParseError);
    CHECK_THROWS_AS(parse_chamber_csv("A,1,x,3\n"), ParseError);
    CHECK_THROWS_AS(parse_chamber_csv("A,1,2\n"), ParseError);
    CHECK_THROWS_AS(parse_chamber_csv("A,1,-2,3\n"), std::exception);
}

TEST_CASE("peak lists") {
    const auto measured = measured_peaks();
    REQUIRE(measured.size() == 9);
    CHECK(measured.front() == 37.2);
    CHECK(measured.back() == 92.5);
    const auto tabulated = tabulated_peaks();
    REQUIRE(tabulated.size() == 8);
    CHECK(std::equal(tabulated.begin(), tabulated.end(), measured.begin() + 1));
}

TEST_CASE("expected table fixture") {
    const auto rows = expected_table1();
    CHECK(rows.size() == 27);
    std::size_t bounds = 0;
    for (const auto& r : rows) {
        CHECK(r.bounds.size() == static_cast<std::size_t>(r.mode.order()));
        bounds += r.bounds.size();
    }
    CHECK(bounds == 38);
    // Spot values printed in the table.
    auto find = [&](double peak, const std::string& ch) {
        return *std::find_if(rows.begin(), rows.end(), [&](const ExpectedRow& r) {
            return r.peak_hz == peak && r.chamber == ch;
        });
    };
    CHECK(find(46.1, "18").bounds[0] == std::pair<double, double>{670.0, 146.8});
    CHECK(find(72.7, "26").bounds[0] == std::pair<double, double>{235.0, 9.7});
    CHECK(find(92.5, "25").bounds[0] == std::pair<double, double>{185.0, 6.0});
    CHECK(find(81.8, "24").modal_hz == 81.3);
}

TEST_CASE("expected table CSV grouping and errors") {
    const auto rows = parse_expected_table_csv(
        "peak_hz,chamber,mode,modal_freq_hz,wall_cm,bound_cm\n"
        "46.1,18,\"(1,1,0)\",47.9,670,146.8\n"
        "46.1,18,\"(1,1,0)\",47.9,424,37.2\n"
        "46.1,27,\"(1,0,0)\",47.6,360,22.7\n");
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].bounds.size() == 2);
    CHECK(rows[0].mode == ModeIndex{1, 1, 0});
    CHECK_THROWS_AS(parse_expected_table_csv("46.1,18,\"(1,1,0)\",abc,670,146.8\n"), ParseError);
}

TEST_CASE("strict association against the fixture") {
    const auto chambers = bundled_chambers();
    const auto peaks = tabulated_peaks();
    const auto rows = associate(peaks, chambers, kDefaultSpeedOfSound);
    const auto diffs = diff_table(rows, expected_table1());
    REQUIRE(diffs.size() == 2);
    std::size_t matched = 0;
    for (const auto& d : diffs) {
        if (d.kind == TableDiff::Kind::Extra && d.peak_hz == 50.4 && d.chamber == "27") ++matched;
        if (d.kind == TableDiff::Kind::ModeMismatch && d.peak_hz == 81.8 && d.chamber == "18") ++matched;
    }
    CHECK(matched == 2);
}

TEST_CASE("diff_table detects each kind") {
    auto expected = expected_table1();
    const auto chambers = bundled_chambers();
    auto computed = associate(tabulated_peaks(), chambers, kDefaultSpeedOfSound);
    // Make the computed table agree, then perturb it.
    computed.erase(std::remove_if(computed.begin(), computed.end(),
                                  [](const AssociationRow& r) { return r.peak_hz == 50.4 && r.chamber == "27"; }),
                   computed.end());
    for (auto& r : computed) {
        if (r.peak_hz == 81.8 && r.chamber == "18") {
            r.mode = {0, 2, 0};
            r.modal_hz = mode_frequency(find_chamber(chambers, "18"), r.mode, kDefaultSpeedOfSound);
            r.bounds = {{Axis::Y, 424.0, jnd_bound(find_chamber(chambers, "18"), r.mode, Axis::Y, 343.0)}};
        }
    }
    CHECK(diff_table(computed, expected).empty());

    auto shifted = computed;
    shifted[0].modal_hz += 0.3;
    shifted[1].bounds[0].bound_cm += 0.5;
    shifted.pop_back();
    const auto diffs = diff_table(shifted, expected);
    std::vector<TableDiff::Kind> kinds;
    for (const auto& d : diffs) kinds.push_back(d.kind);
    CHECK(std::count(kinds.begin(), kinds.end(), TableDiff::Kind::FrequencyMismatch) == 1);
    CHECK(std::count(kinds.begin(), kinds.end(), TableDiff::Kind::BoundMismatch) == 1);
    CHECK(std::count(kinds.begin(), kinds.end(), TableDiff::Kind::Missing) == 1);
    CHECK(to_string(TableDiff::Kind::Missing) == "missing");
}

TEST_CASE("CSV field splitting") {
    CHECK(split_csv_line("a,b,,c") == std::vector<std::string>{"a", "b", "", "c"});
    CHECK(split_csv_line("1,\"(1,0,0)\", x ") == std::vector<std::string>{"1", "(1,0,0)", "x"});
    CHECK(split_csv_line("\"say \"\"hi\"\"\"\r") == std::vector<std::string>{"say \"hi\""});
}

TEST_CASE("float WAV round trip") {
    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<double> x(1001);
    for (auto& v : x) v = u(rng);
    const auto path = scratch("float.wav");
    write_wav(path, x, 5941.2);
    CHECK(fs::file_size(path) == 58 + 4 * x.size());
    const auto ir = read_wav(path);
    CHECK(ir.sample_rate == 5941.0);
    REQUIRE(ir.samples.size() == x.size());
    for (std::size_t i = 0; i < x.size(); ++i) CHECK(ir.samples[i] == static_cast<double>(static_cast<float>(x[i])));
}

TEST_CASE("PCM WAV reading") {
    std::string data;
    for (std::int16_t v : {std::int16_t{0}, std::int16_t{16384}, std::int16_t{-32768}, std::int16_t{32767}})
        put(data, static_cast<std::uint16_t>(v), 2);
    const auto path16 = scratch("pcm16.wav");
    write_pcm(path16, 1, 16, 8000, data);
    const auto ir = read_wav(path16);
    CHECK(ir.sample_rate == 8000.0);
    REQUIRE(ir.samples.size() == 4);
    CHECK(ir.samples[1] == 0.5);
    CHECK(ir.samples[2] == -1.0);
    CHECK_THAT(ir.samples[3], WithinAbs(32767.0 / 32768.0, 1e-15));

    std::string data24;
    put(data24, 0x400000, 3);  // +0.5
    put(data24, 0xC00000, 3);  // -0.5
    const auto path24 = scratch("pcm24.wav");
    write_pcm(path24, 1, 24, 44100, data24);
    const auto ir24 = read_wav(path24);
    CHECK(ir24.samples == std::vector<double>{0.5, -0.5});

    const auto stereo = scratch("stereo.wav");
    write_pcm(stereo, 2, 16, 8000, data);
    CHECK_THROWS_AS(read_wav(stereo), ParseError);

    const auto junk = scratch("junk.wav");
    std::ofstream(junk, std::ios::binary) << "definitely not audio";
    CHECK_THROWS_AS(read_wav(junk), ParseError);
    CHECK_THROWS_AS(read_wav(scratch("missing.wav")), IoError);
}

TEST_CASE("signal files keep the exact rate in a sidecar") {
    const ImpulseResponse ir{5940.9999, {0.0, 0.25, -0.5, 1.0}};
    const auto wav = scratch("ir.wav");
    write_signal(wav, ir);
    REQUIRE(fs::exists(fs::path(wav.string() + ".json")));
    const auto back = read_signal(wav);
    CHECK(back.sample_rate == ir.sample_rate);
    CHECK(back.samples == ir.samples);

    const auto csv = scratch("ir.csv");
    write_signal(csv, ir);
    const auto back_csv = read_signal(csv);
    CHECK(back_csv.sample_rate == ir.sample_rate);
    CHECK(back_csv.samples == ir.samples);

    fs::remove(fs::path(csv.string() + ".json"));
    CHECK_THAT(read_signal(csv).sample_rate, WithinAbs(ir.sample_rate, 1e-6));
}

TEST_CASE("signal CSV errors") {
    const auto bad = scratch("bad.csv");
    std::ofstream(bad) << "time_s,pressure\n0,1\n0.1,oops\n";
    try {
        read_signal_csv(bad);
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.line() == 3);
    }
    const auto one = scratch("one.csv");
    std::ofstream(one) << "time_s,pressure\n0,1\n";
    CHECK_THROWS_AS(read_signal_csv(one), ParseError);
}

TEST_CASE("report writers") {
    Spectrum s;
    s.f0 = 20.0;
    s.df = 0.5;
    s.magnitudes_db = {-3.0, 1.5, 0.25};
    std::ostringstream out;
    write_spectrum_csv(out, s, &s);
    CHECK(out.str() == "frequency_hz,magnitude_db,smoothed_db\n20,-3,-3\n20.5,1.5,1.5\n21,0.25,0.25\n");

    std::ostringstream gp;
    write_gnuplot_block(gp, "raw", s);
    CHECK(gp.str() == "$raw << EOD\n20 -3\n20.5 1.5\n21 0.25\nEOD\n");

    std::ostringstream pk;
    const std::vector<Peak> peaks{{47.5, -2.0, 30.0, 0.75}};
    write_peaks_csv(pk, peaks);
    CHECK(pk.str() == "frequency_hz,magnitude_db,prominence_db,fwhm_hz\n47.5,-2,30,0.75\n");

    Spectrogram sg{{0.25, 0.5}, {20.0, 21.0}, {{-1.0, -2.0}, {-3.0, -4.0}}};
    std::ostringstream so;
    write_spectrogram_csv(so, sg);
    CHECK(so.str() == "frequency_hz,time_s,magnitude_db\n20,0.25,-1\n21,0.25,-2\n20,0.5,-3\n21,0.5,-4\n");
}
