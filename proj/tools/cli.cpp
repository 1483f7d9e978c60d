#include "cli.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>

#include "json.hpp"
#include "roomtune/dataset.hpp"
#include "roomtune/error.hpp"
#include "roomtune/experiment.hpp"
#include "roomtune/fdtd.hpp"
#include "roomtune/geometry.hpp"
#include "roomtune/io.hpp"
#include "roomtune/modal.hpp"
#include "roomtune/spectral.hpp"
#include "roomtune/sweep.hpp"

namespace roomtune::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Globals {
    double c = kDefaultSpeedOfSound;
    double jnd_hz = 3.0;
    std::vector<double> band{20.0, 150.0};
    std::string out_dir = ".";
    bool serial = false;
    double dx = 0.05;
    double courant = kMaxCourant3d;
    double duration = 4.0;
    double prominence = 10.0;
    bool smooth_peaks = false;
    std::string chambers_file;

    Band analysis_band() const { return {band[0], band[1]}; }

    PeakOptions peak_options() const {
        PeakOptions opts;
        opts.band = analysis_band();
        opts.min_prominence_db = prominence;
        opts.smooth = smooth_peaks;
        return opts;
    }

    SimConfig sim_config() const {
        SimConfig cfg;
        cfg.c = c;
        cfg.dx = dx;
        cfg.courant = courant;
        cfg.duration = duration;
        cfg.mode = serial ? ExecutionMode::Serial : ExecutionMode::Parallel;
        return cfg;
    }

    json to_json() const {
        return {{"speed_of_sound_m_s", c},  {"jnd_hz", jnd_hz},         {"band_hz", band},
                {"out_dir", out_dir},       {"serial", serial},         {"dx_m", dx},
                {"courant", courant},       {"duration_s", duration},   {"prominence_db", prominence},
                {"smooth_peaks", smooth_peaks}, {"chambers_file", chambers_file}};
    }
};

// Room selection shared by simulate and perturb.
struct RoomSource {
    std::string chamber = "27";
    std::vector<double> room;  // lx, ly, lz in m
    std::string mesh;
};

struct Outputs {
    std::vector<std::string> files;
    fs::path add(const Globals& g, const std::string& name) {
        fs::path p = fs::path(g.out_dir) / name;
        files.push_back(p.string());
        return p;
    }
};

std::string read_text(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<Chamber> load_chambers(const Globals& g) {
    if (g.chambers_file.empty()) return bundled_chambers();
    try {
        return parse_chamber_csv(read_text(g.chambers_file));
    } catch (const ParseError& e) {
        throw ParseError(g.chambers_file + ": " + e.what());
    }
}

BoxRoom resolve_box(const Globals& g, const RoomSource& src) {
    if (!src.room.empty()) return make_box_room("custom", src.room[0], src.room[1], src.room[2]);
    const auto chambers = load_chambers(g);
    return find_chamber(chambers, src.chamber).to_box();
}

Vec3 to_vec3(const std::vector<double>& v) { return {v[0], v[1], v[2]}; }

void write_metadata(const Globals& g, const std::string& command, const std::vector<std::string>& args,
                    json params, const Outputs& outputs) {
    json meta{{"tool", "roomtune"},
              {"command", command},
              {"arguments", args},
              {"globals", g.to_json()},
              {"parameters", std::move(params)},
              {"outputs", outputs.files}};
    auto out = open_output(fs::path(g.out_dir) / (command + ".meta.json"));
    out << meta.dump(2) << '\n';
}

void write_spectrum_plot(const fs::path& path, const std::vector<std::pair<std::string, const Spectrum*>>& curves) {
    auto out = open_output(path);
    for (const auto& [name, s] : curves) write_gnuplot_block(out, name, *s);
    out << "set xlabel 'Frequency (Hz)'\nset ylabel 'Magnitude (dB)'\nplot ";
    for (std::size_t i = 0; i < curves.size(); ++i) {
        out << (i ? ", " : "") << '$' << curves[i].first << " with lines title '" << curves[i].first << "'";
    }
    out << '\n';
}

std::optional<Mode> nearest_mode(const std::vector<Mode>& modes, double f) {
    std::optional<Mode> best;
    for (const auto& m : modes) {
        if (!best || std::abs(m.frequency - f) < std::abs(best->frequency - f)) best = m;
    }
    return best;
}

// ---------------------------------------------------------------------------

void cmd_modes(const Globals& g, const std::vector<std::string>& labels, std::optional<double> f_max_opt,
               std::ostream& out, Outputs& outputs, json& params) {
    const double f_max = f_max_opt.value_or(g.band[1]);
    if (!(f_max > 0.0)) throw ValidationError("--f-max must be positive");
    const auto all = load_chambers(g);
    std::vector<Chamber> chambers;
    if (labels.empty()) {
        chambers = all;
    } else {
        for (const auto& l : labels) chambers.push_back(find_chamber(all, l));
    }
    params = {{"chambers", labels}, {"f_max_hz", f_max}};

    auto csv = open_output(outputs.add(g, "modes.csv"));
    csv << "chamber,mode,order,frequency_hz\n";
    fmt::print(out, "{:>8}  {:<10} {:>5}  {:>10}\n", "chamber", "mode", "order", "freq (Hz)");
    for (const auto& ch : chambers) {
        for (const auto& m : enumerate_modes(ch, g.c, f_max)) {
            csv << m.chamber << ",\"" << m.index.str() << "\"," << m.index.order() << ','
                << fmt::format("{:.6f}", m.frequency) << '\n';
            fmt::print(out, "{:>8}  {:<10} {:>5}  {:>10.2f}\n", m.chamber, m.index.str(), m.index.order(),
                       m.frequency);
        }
    }
}

std::string format_bounds(const AssociationRow& row) {
    std::string s;
    for (const auto& b : row.bounds) {
        if (!s.empty()) s += "  ";
        s += fmt::format("{}: {:.0f} +/- {:.1f}", axis_name(b.axis), b.wall_cm, b.bound_cm);
    }
    return s;
}

int cmd_table1(const Globals& g, std::optional<std::vector<double>> peaks_opt, const std::string& expected_file,
               bool fail_on_diff, std::ostream& out, std::ostream& err, Outputs& outputs, json& params) {
    std::vector<double> peaks = peaks_opt.value_or(tabulated_peaks());
    std::sort(peaks.begin(), peaks.end());
    const auto chambers = load_chambers(g);
    const auto rows = associate(peaks, chambers, g.c, JndPolicy{g.jnd_hz});

    std::vector<ExpectedRow> expected;
    if (expected_file.empty()) {
        expected = expected_table1();
    } else {
        try {
            expected = parse_expected_table_csv(read_text(expected_file));
        } catch (const ParseError& e) {
            throw ParseError(expected_file + ": " + e.what());
        }
    }
    // Only rows for the requested peaks take part in the comparison.
    std::erase_if(expected, [&](const ExpectedRow& e) {
        return std::none_of(peaks.begin(), peaks.end(), [&](double p) { return std::abs(p - e.peak_hz) < 1e-9; });
    });
    const auto diffs = diff_table(rows, expected);
    params = {{"peaks_hz", peaks}, {"expected_file", expected_file}, {"fail_on_diff", fail_on_diff}};

    auto csv = open_output(outputs.add(g, "table1.csv"));
    csv << "peak_hz,chamber,mode,modal_freq_hz,wall_cm,bound_cm\n";
    for (const auto& r : rows) {
        for (const auto& b : r.bounds) {
            csv << fmt::format("{},{},\"{}\",{:.4f},{:.1f},{:.4f}\n", r.peak_hz, r.chamber, r.mode.str(), r.modal_hz,
                               b.wall_cm, b.bound_cm);
        }
    }

    std::ostringstream table;
    fmt::print(table, "{:>9}  {:>7}  {:<9}  {:>10}  {}\n", "peak (Hz)", "chamber", "mode", "modal (Hz)",
               "wall bounds (cm)");
    double last_peak = -1.0;
    for (const auto& r : rows) {
        const std::string peak = r.peak_hz == last_peak ? "" : fmt::format("{:.1f}", r.peak_hz);
        last_peak = r.peak_hz;
        fmt::print(table, "{:>9}  {:>7}  {:<9}  {:>10.1f}  {}\n", peak, r.chamber, r.mode.str(), r.modal_hz,
                   format_bounds(r));
    }
    out << table.str();
    auto txt = open_output(outputs.add(g, "table1.txt"));
    txt << table.str();

    auto diff_csv = open_output(outputs.add(g, "table1_diff.csv"));
    diff_csv << "kind,peak_hz,chamber,detail\n";
    for (const auto& d : diffs) diff_csv << to_string(d.kind) << ',' << d.peak_hz << ',' << d.chamber << ",\"" << d.detail << "\"\n";

    fmt::print(out, "\n{} rows, {} differences from the expected table\n", rows.size(), diffs.size());
    for (const auto& d : diffs) fmt::print(out, "  {} {:.1f} Hz chamber {}: {}\n", to_string(d.kind), d.peak_hz, d.chamber, d.detail);
    if (fail_on_diff && !diffs.empty()) {
        err << "error: computed table differs from the expected table\n";
        return kValidation;
    }
    return kOk;
}

OccupancyGrid build_grid(const Globals& g, const RoomSource& src, std::optional<BoxRoom>& box) {
    if (!src.mesh.empty()) return voxelize(read_mesh_file(src.mesh), g.dx);
    box = resolve_box(g, src);
    return box_to_grid(*box, g.dx);
}

void warn_resolution(const Globals& g, std::ostream& err) {
    const double df = 1.0 / g.duration;
    if (df > 1.0) {
        fmt::print(err, "warning: duration {} s gives a frequency resolution of {:.3g} Hz, too coarse to separate "
                        "peaks a few Hz apart\n", g.duration, df);
    }
}

void cmd_simulate(const Globals& g, const RoomSource& src, const std::vector<double>& source,
                  const std::vector<double>& receiver, const std::string& ir_format, std::ostream& out,
                  std::ostream& err, Outputs& outputs, json& params) {
    warn_resolution(g, err);
    std::optional<BoxRoom> box;
    const OccupancyGrid grid = build_grid(g, src, box);
    const SimConfig cfg = place(g.sim_config(), grid, Placement{to_vec3(source), to_vec3(receiver)});
    params = {{"chamber", src.mesh.empty() && src.room.empty() ? src.chamber : ""},
              {"room_m", src.room},
              {"mesh", src.mesh},
              {"source_fraction", source},
              {"receiver_fraction", receiver},
              {"source_cell", cfg.source},
              {"receiver_cell", cfg.receivers.front()},
              {"grid_cells", {grid.nx(), grid.ny(), grid.nz()}},
              {"sample_rate_hz", cfg.sample_rate()},
              {"steps", cfg.steps()}};

    const ImpulseResponse ir = simulate(grid, cfg).front();
    write_signal(outputs.add(g, "ir." + ir_format), ir);
    outputs.files.push_back(outputs.files.back() + ".json");

    const Spectrum s = spectrum(ir, g.analysis_band());
    const Spectrum sm = smooth(s);
    auto spec_csv = open_output(outputs.add(g, "spectrum.csv"));
    write_spectrum_csv(spec_csv, s, &sm);
    write_spectrum_plot(outputs.add(g, "spectrum.gp"), {{"raw", &s}, {"smoothed", &sm}});

    const auto peaks = find_peaks(s, g.peak_options());
    auto peaks_csv = open_output(outputs.add(g, "peaks.csv"));
    write_peaks_csv(peaks_csv, peaks);

    std::vector<Mode> modes;
    if (box) modes = enumerate_modes(Chamber(*box), g.c, g.band[1] + 10.0);
    fmt::print(out, "{} steps at {:.2f} Hz, {} peaks in {}-{} Hz\n", cfg.steps(), cfg.sample_rate(), peaks.size(),
               g.band[0], g.band[1]);
    fmt::print(out, "{:>10}  {:>9}  {:>10}", "peak (Hz)", "prom (dB)", "fwhm (Hz)");
    if (box) fmt::print(out, "  {:<9}  {:>10}  {:>8}", "mode", "modal (Hz)", "err (%)");
    out << '\n';
    for (const auto& p : peaks) {
        fmt::print(out, "{:>10.3f}  {:>9.1f}  {:>10.3f}", p.frequency, p.prominence_db, p.fwhm_hz);
        if (auto m = nearest_mode(modes, p.frequency)) {
            fmt::print(out, "  {:<9}  {:>10.3f}  {:>8.3f}", m->index.str(), m->frequency,
                       100.0 * (p.frequency - m->frequency) / m->frequency);
        }
        out << '\n';
    }
}

void cmd_perturb(const Globals& g, const RoomSource& src, const std::string& axis_text, double new_length,
                 double radius, std::ostream& out, std::ostream& err, Outputs& outputs, json& params) {
    warn_resolution(g, err);
    const Axis axis = parse_axis(axis_text);
    const BoxRoom room = resolve_box(g, src);
    params = {{"chamber", src.room.empty() ? src.chamber : ""},
              {"room_m", room.dims()},
              {"axis", std::string(1, axis_name(axis))},
              {"new_length_m", new_length},
              {"match_radius_hz", radius}};

    const auto result = run_perturbation_experiment(room, axis, new_length, g.sim_config(), g.analysis_band());
    const auto shifts = summarize_shifts(result, axis, g.c, g.peak_options(), radius);

    write_signal(outputs.add(g, "ir_before.wav"), result.ir_before);
    write_signal(outputs.add(g, "ir_after.wav"), result.ir_after);
    {
        auto f = open_output(outputs.add(g, "spectrum_before.csv"));
        write_spectrum_csv(f, result.before);
    }
    {
        auto f = open_output(outputs.add(g, "spectrum_after.csv"));
        write_spectrum_csv(f, result.after);
    }
    write_spectrum_plot(outputs.add(g, "perturb.gp"), {{"unperturbed", &result.before}, {"perturbed", &result.after}});

    auto fmt_opt = [](const std::optional<double>& v) { return v ? fmt::format("{:.3f}", *v) : std::string("-"); };
    auto csv = open_output(outputs.add(g, "shifts.csv"));
    csv << "mode,before_hz,after_linear_hz,after_exact_hz,measured_before_hz,measured_after_hz,measured_shift_hz\n";
    fmt::print(out, "wall {} {:.3f} m -> {:.3f} m\n", axis_name(axis), room.length(axis), new_length);
    fmt::print(out, "{:<9}  {:>10}  {:>10}  {:>10}  {:>10}  {:>10}  {:>9}\n", "mode", "before", "linear", "exact",
               "sim before", "sim after", "sim shift");
    for (const auto& s : shifts) {
        std::optional<double> shift;
        if (s.measured_before_hz && s.measured_after_hz) shift = *s.measured_after_hz - *s.measured_before_hz;
        csv << '"' << s.mode.str() << "\"," << fmt::format("{:.6f},{:.6f},{:.6f}", s.before_hz, s.after_linear_hz, s.after_exact_hz)
            << ',' << (s.measured_before_hz ? fmt::format("{:.6f}", *s.measured_before_hz) : "")
            << ',' << (s.measured_after_hz ? fmt::format("{:.6f}", *s.measured_after_hz) : "")
            << ',' << (shift ? fmt::format("{:.6f}", *shift) : "") << '\n';
        fmt::print(out, "{:<9}  {:>10.3f}  {:>10.3f}  {:>10.3f}  {:>10}  {:>10}  {:>9}\n", s.mode.str(), s.before_hz,
                   s.after_linear_hz, s.after_exact_hz, fmt_opt(s.measured_before_hz), fmt_opt(s.measured_after_hz),
                   fmt_opt(shift));
    }
}

json sweep_json(const SweepSpec& s) {
    return {{"f1_hz", s.f1}, {"f2_hz", s.f2}, {"duration_s", s.duration}, {"fs_hz", s.fs}, {"tail_s", s.tail}};
}

void cmd_deconvolve(const Globals& g, const std::string& input, const std::string& output, SweepSpec spec,
                    double floor_db, std::ostream& out, Outputs& outputs, json& params) {
    const ImpulseResponse rec = read_signal(input);
    spec.fs = rec.sample_rate;
    spec.validate();
    const ImpulseResponse ir = deconvolve(rec.samples, spec, floor_db);
    const fs::path path = output.empty() ? outputs.add(g, "ir.wav") : fs::path(output);
    if (!output.empty()) outputs.files.push_back(path.string());
    write_signal(path, ir);
    params = {{"input", input}, {"sweep", sweep_json(spec)}, {"floor_db", floor_db}};
    fmt::print(out, "deconvolved {} samples at {} Hz into {} ({} samples)\n", rec.samples.size(), rec.sample_rate,
               path.string(), ir.samples.size());
}

void cmd_sweep(const Globals& g, const std::string& output, const SweepSpec& spec, std::ostream& out,
               Outputs& outputs, json& params) {
    spec.validate();
    const ImpulseResponse s{spec.fs, gen_ess(spec)};
    const fs::path path = output.empty() ? outputs.add(g, "sweep.wav") : fs::path(output);
    if (!output.empty()) outputs.files.push_back(path.string());
    write_signal(path, s);
    params = {{"sweep", sweep_json(spec)}};
    fmt::print(out, "wrote {} sweep samples and {} tail samples to {}\n", spec.sweep_samples(), spec.tail_samples(),
               path.string());
}

void cmd_ratios(const Globals& g, std::optional<std::vector<double>> peaks_opt, double tolerance, std::ostream& out,
                Outputs& outputs, json& params) {
    const std::vector<double> peaks = peaks_opt.value_or(measured_peaks());
    const auto rows = ratio_analysis(peaks);
    params = {{"peaks_hz", peaks}, {"tolerance_cents", tolerance}};
    auto csv = open_output(outputs.add(g, "ratios.csv"));
    csv << "f_lo,f_hi,ratio,just_ratio,cents,within_tolerance\n";
    fmt::print(out, "{:>8}  {:>8}  {:>8}  {:>5}  {:>7}\n", "f_lo", "f_hi", "ratio", "just", "cents");
    std::size_t outside = 0;
    for (const auto& r : rows) {
        const bool ok = std::abs(r.cents) <= tolerance;
        outside += !ok;
        const std::string just = fmt::format("{}:{}", r.just.numerator, r.just.denominator);
        csv << fmt::format("{},{},{:.6f},{},{:.4f},{}\n", r.lower_hz, r.upper_hz, r.ratio, just, r.cents, ok);
        fmt::print(out, "{:>8.1f}  {:>8.1f}  {:>8.4f}  {:>5}  {:>+7.1f}{}\n", r.lower_hz, r.upper_hz, r.ratio, just,
                   r.cents, ok ? "" : "  *");
    }
    fmt::print(out, "{} of {} ratios within {} cents of 10:9 or 9:8\n", rows.size() - outside, rows.size(), tolerance);
}

void cmd_spectrum(const Globals& g, const std::string& input, bool with_spectrogram, double window_s, double hop_s,
                  std::ostream& out, Outputs& outputs, json& params) {
    const ImpulseResponse ir = read_signal(input);
    const Spectrum s = spectrum(ir, g.analysis_band());
    const Spectrum sm = smooth(s);
    auto csv = open_output(outputs.add(g, "spectrum.csv"));
    write_spectrum_csv(csv, s, &sm);
    write_spectrum_plot(outputs.add(g, "spectrum.gp"), {{"raw", &s}, {"smoothed", &sm}});
    params = {{"input", input}, {"spectrogram", with_spectrogram}, {"window_s", window_s}, {"hop_s", hop_s}};
    if (with_spectrogram) {
        const Spectrogram sg = spectrogram(ir, window_s, hop_s, g.analysis_band());
        auto f = open_output(outputs.add(g, "spectrogram.csv"));
        write_spectrogram_csv(f, sg);
        fmt::print(out, "spectrogram: {} frames x {} bins\n", sg.times.size(), sg.frequencies.size());
    }
    fmt::print(out, "spectrum: {} bins, df = {:.4g} Hz\n", s.size(), s.df);
}

void cmd_peaks(const Globals& g, const std::string& input, std::ostream& out, Outputs& outputs, json& params) {
    const ImpulseResponse ir = read_signal(input);
    const auto peaks = find_peaks(ir, g.peak_options());
    auto csv = open_output(outputs.add(g, "peaks.csv"));
    write_peaks_csv(csv, peaks);
    params = {{"input", input}};
    fmt::print(out, "{:>10}  {:>9}  {:>9}  {:>10}\n", "peak (Hz)", "mag (dB)", "prom (dB)", "fwhm (Hz)");
    for (const auto& p : peaks)
        fmt::print(out, "{:>10.3f}  {:>9.1f}  {:>9.1f}  {:>10.3f}\n", p.frequency, p.magnitude_db, p.prominence_db,
                   p.fwhm_hz);
}

void add_room_options(CLI::App* sub, RoomSource& src) {
    auto* chamber = sub->add_option("--chamber", src.chamber, "Chamber label from the dataset")->capture_default_str();
    auto* room = sub->add_option("--room", src.room, "Box dimensions lx,ly,lz in m")
                     ->expected(3)
                     ->delimiter(',')
                     ->check(CLI::PositiveNumber);
    room->excludes(chamber);
    if (sub->get_name() == "simulate") {
        auto* mesh = sub->add_option("--mesh", src.mesh, "Closed triangle mesh (OBJ or ASCII STL)");
        mesh->excludes(chamber)->excludes(room);
    }
}

void add_sweep_options(CLI::App* sub, SweepSpec& spec, bool with_fs) {
    sub->add_option("--f1", spec.f1, "Sweep start frequency in Hz")->capture_default_str()->check(CLI::PositiveNumber);
    sub->add_option("--f2", spec.f2, "Sweep end frequency in Hz")->capture_default_str()->check(CLI::PositiveNumber);
    sub->add_option("--sweep-duration", spec.duration, "Sweep length in s")->capture_default_str()->check(CLI::PositiveNumber);
    sub->add_option("--tail", spec.tail, "Silent tail in s")->capture_default_str()->check(CLI::NonNegativeNumber);
    if (with_fs) sub->add_option("--fs", spec.fs, "Sample rate in Hz")->capture_default_str()->check(CLI::PositiveNumber);
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Room mode analysis and wave-based room simulation", "roomtune"};
    app.require_subcommand(1);
    app.fallthrough();
    app.set_config("--config", "", "Flat key = value file; keys are option names");

    Globals g;
    app.add_option("--speed-of-sound", g.c, "m/s")->capture_default_str()->check(CLI::PositiveNumber);
    app.add_option("--jnd-hz", g.jnd_hz, "Frequency tolerance for mode association")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    app.add_option("--band", g.band, "Analysis band lo,hi in Hz")->expected(2)->delimiter(',')->capture_default_str();
    app.add_option("--out-dir", g.out_dir, "Directory for reports")->capture_default_str();
    app.add_flag("--serial", g.serial, "Run the single-threaded FDTD kernel");
    app.add_option("--dx", g.dx, "FDTD grid spacing in m")->capture_default_str()->check(CLI::PositiveNumber);
    app.add_option("--courant", g.courant, "FDTD Courant number")->capture_default_str()->check(CLI::PositiveNumber);
    app.add_option("--duration", g.duration, "Simulated time in s")->capture_default_str()->check(CLI::PositiveNumber);
    app.add_option("--prominence", g.prominence, "Minimum peak prominence in dB")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    app.add_flag("--smooth-peaks", g.smooth_peaks, "Pick peaks on the smoothed spectrum");
    app.add_option("--chambers", g.chambers_file, "Chamber dataset CSV (label,lx_cm,ly_cm,lz_cm)");

    auto* modes = app.add_subcommand("modes", "List box-model modes per chamber");
    std::vector<std::string> mode_labels;
    std::optional<double> f_max;
    modes->add_option("--chamber", mode_labels, "Chamber labels (default: all)");
    modes->add_option("--f-max", f_max, "Upper frequency in Hz (default: band upper edge)");

    auto* table1 = app.add_subcommand("table1", "Associate peaks with modes and compare with the expected table");
    std::optional<std::vector<double>> table_peaks;
    std::string expected_file;
    bool fail_on_diff = false;
    table1->add_option("--peaks", table_peaks, "Peak frequencies in Hz")->delimiter(',');
    table1->add_option("--expected", expected_file, "Expected table CSV (default: bundled)");
    table1->add_flag("--fail-on-diff", fail_on_diff, "Exit with status 1 when the tables differ");

    auto* simulate_cmd = app.add_subcommand("simulate", "Run the FDTD solver and analyse the response");
    RoomSource sim_src;
    Placement placement;
    std::vector<double> source{placement.source.begin(), placement.source.end()};
    std::vector<double> receiver{placement.receiver.begin(), placement.receiver.end()};
    std::string ir_format = "wav";
    add_room_options(simulate_cmd, sim_src);
    simulate_cmd->add_option("--source", source, "Source position as fractions of the room")
        ->expected(3)
        ->delimiter(',')
        ->capture_default_str();
    simulate_cmd->add_option("--receiver", receiver, "Receiver position as fractions of the room")
        ->expected(3)
        ->delimiter(',')
        ->capture_default_str();
    simulate_cmd->add_option("--ir-format", ir_format, "wav or csv")->check(CLI::IsMember({"wav", "csv"}));

    auto* perturb = app.add_subcommand("perturb", "Simulate a room before and after moving one wall");
    RoomSource perturb_src;
    std::string axis = "x";
    double new_length = 0.0;
    double radius = 1.5;
    add_room_options(perturb, perturb_src);
    perturb->add_option("--axis", axis, "Wall axis x, y or z")->capture_default_str();
    perturb->add_option("--length", new_length, "New wall length in m")->required()->check(CLI::PositiveNumber);
    perturb->add_option("--radius", radius, "Peak matching radius in Hz")->capture_default_str()->check(CLI::PositiveNumber);

    auto* deconv = app.add_subcommand("deconvolve", "Recover an impulse response from a recorded sweep");
    std::string deconv_in, deconv_out;
    SweepSpec deconv_spec;
    double floor_db = kDeconvolutionFloorDb;
    deconv->add_option("input", deconv_in, "Recording (.wav or .csv)")->required();
    deconv->add_option("-o,--output", deconv_out, "Output file (default: <out-dir>/ir.wav)");
    deconv->add_option("--floor-db", floor_db, "Out-of-band regularization floor in dB")->capture_default_str();
    add_sweep_options(deconv, deconv_spec, false);

    auto* sweep = app.add_subcommand("sweep", "Write an exponential sine sweep");
    std::string sweep_out;
    SweepSpec sweep_spec;
    sweep->add_option("-o,--output", sweep_out, "Output file (default: <out-dir>/sweep.wav)");
    add_sweep_options(sweep, sweep_spec, true);

    auto* ratios = app.add_subcommand("ratios", "Classify consecutive peak ratios against 10:9 and 9:8");
    std::optional<std::vector<double>> ratio_peaks;
    double tolerance = 30.0;
    ratios->add_option("--peaks", ratio_peaks, "Peak frequencies in Hz")->delimiter(',');
    ratios->add_option("--tolerance-cents", tolerance, "Conformance tolerance")->capture_default_str();

    auto* spectrum_cmd = app.add_subcommand("spectrum", "Magnitude spectrum of a response");
    std::string spectrum_in;
    bool with_spectrogram = false;
    double window_s = 1.0, hop_s = 0.25;
    spectrum_cmd->add_option("input", spectrum_in, "Response (.wav or .csv)")->required();
    spectrum_cmd->add_flag("--spectrogram", with_spectrogram, "Also write a spectrogram");
    spectrum_cmd->add_option("--window", window_s, "Spectrogram window in s")->capture_default_str();
    spectrum_cmd->add_option("--hop", hop_s, "Spectrogram hop in s")->capture_default_str();

    auto* peaks_cmd = app.add_subcommand("peaks", "Detect spectral peaks of a response");
    std::string peaks_in;
    peaks_cmd->add_option("input", peaks_in, "Response (.wav or .csv)")->required();

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kOk;
    } catch (const CLI::FileError& e) {
        err << "error: " << e.what() << '\n';
        return kIo;
    } catch (const CLI::ConfigError& e) {
        err << "error: " << e.what() << '\n';
        return kIo;
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return kOk;
        err << "error: " << e.what() << '\n';
        return kValidation;
    }

    try {
        if (!(g.band[0] > 0.0 && g.band[1] > g.band[0])) throw ValidationError("--band needs 0 < lo < hi");
        Outputs outputs;
        json params;
        int code = kOk;
        const std::string name = app.get_subcommands().front()->get_name();
        if (modes->parsed()) {
            cmd_modes(g, mode_labels, f_max, out, outputs, params);
        } else if (table1->parsed()) {
            code = cmd_table1(g, table_peaks, expected_file, fail_on_diff, out, err, outputs, params);
        } else if (simulate_cmd->parsed()) {
            cmd_simulate(g, sim_src, source, receiver, ir_format, out, err, outputs, params);
        } else if (perturb->parsed()) {
            cmd_perturb(g, perturb_src, axis, new_length, radius, out, err, outputs, params);
        } else if (deconv->parsed()) {
            cmd_deconvolve(g, deconv_in, deconv_out, deconv_spec, floor_db, out, outputs, params);
        } else if (sweep->parsed()) {
            cmd_sweep(g, sweep_out, sweep_spec, out, outputs, params);
        } else if (ratios->parsed()) {
            cmd_ratios(g, ratio_peaks, tolerance, out, outputs, params);
        } else if (spectrum_cmd->parsed()) {
            cmd_spectrum(g, spectrum_in, with_spectrogram, window_s, hop_s, out, outputs, params);
        } else if (peaks_cmd->parsed()) {
            cmd_peaks(g, peaks_in, out, outputs, params);
        }
        write_metadata(g, name, args, std::move(params), outputs);
        return code;
    } catch (const ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kIo;
    } catch (const IoError& e) {
        err << "error: " << e.what() << '\n';
        return kIo;
    } catch (const fs::filesystem_error& e) {
        err << "error: " << e.what() << '\n';
        return kIo;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << '\n';
        return kValidation;
    }
}

}  // namespace roomtune::cli
