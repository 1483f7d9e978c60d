#include "roomtune/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "bundled_data.hpp"
#include "roomtune/error.hpp"
#include "roomtune/io.hpp"

namespace roomtune {

namespace {

template <typename F>
void for_each_record(std::string_view text, std::string_view header_first_field, F&& fn) {
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t end = text.find('\n', pos);
        if (end == std::string_view::npos) end = text.size();
        std::string_view line = text.substr(pos, end - pos);
        pos = end + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (line.empty() || line.front() == '#') continue;
        auto fields = split_csv_line(line);
        if (!fields.empty() && fields[0] == header_first_field) continue;
        fn(fields, line_no);
    }
}

double parse_number(const std::string& field, std::size_t line) {
    try {
        std::size_t used = 0;
        const double v = std::stod(field, &used);
        if (used != field.size() || !std::isfinite(v)) throw std::invalid_argument(field);
        return v;
    } catch (const std::exception&) {
        throw ParseError("invalid number '" + field + "'", line);
    }
}

}  // namespace

std::vector<Chamber> parse_chamber_csv(std::string_view text) {
    std::vector<Chamber> out;
    std::set<std::string> seen;
    for_each_record(text, "label", [&](const std::vector<std::string>& f, std::size_t line) {
        if (f.size() != 4) throw ParseError("chamber record needs label,lx_cm,ly_cm,lz_cm", line);
        std::optional<double> dims[3];
        for (int a = 0; a < 3; ++a) {
            if (!f[a + 1].empty()) dims[a] = parse_number(f[a + 1], line) / 100.0;
        }
        if (!seen.insert(f[0]).second) throw ParseError("duplicate chamber label '" + f[0] + "'", line);
        try {
            out.emplace_back(f[0], dims[0], dims[1], dims[2]);
        } catch (const ValidationError& e) {
            throw ParseError(e.what(), line);
        }
    });
    return out;
}

std::vector<Chamber> bundled_chambers() { return parse_chamber_csv(data::kChambersCsv); }

const Chamber& find_chamber(std::span<const Chamber> chambers, std::string_view label) {
    auto it = std::find_if(chambers.begin(), chambers.end(), [&](const Chamber& c) { return c.label == label; });
    if (it == chambers.end()) throw ValidationError("unknown chamber '" + std::string(label) + "'");
    return *it;
}

std::vector<double> measured_peaks() { return {37.2, 41.0, 46.1, 50.4, 57.1, 64.3, 72.7, 81.8, 92.5}; }

std::vector<double> tabulated_peaks() { return {41.0, 46.1, 50.4, 57.1, 64.3, 72.7, 81.8, 92.5}; }

std::vector<ExpectedRow> parse_expected_table_csv(std::string_view text) {
    std::vector<ExpectedRow> rows;
    for_each_record(text, "peak_hz", [&](const std::vector<std::string>& f, std::size_t line) {
        if (f.size() != 6) throw ParseError("expected peak_hz,chamber,mode,modal_freq_hz,wall_cm,bound_cm", line);
        const double peak = parse_number(f[0], line);
        ModeIndex mode;
        try {
            mode = parse_mode_index(f[2]);
        } catch (const std::exception& e) {
            throw ParseError(e.what(), line);
        }
        const double modal = parse_number(f[3], line);
        const std::pair<double, double> bound{parse_number(f[4], line), parse_number(f[5], line)};
        if (!rows.empty() && rows.back().peak_hz == peak && rows.back().chamber == f[1]) {
            if (!(rows.back().mode == mode)) throw ParseError("inconsistent mode within one table row", line);
            rows.back().bounds.push_back(bound);
        } else {
            rows.push_back({peak, f[1], mode, modal, {bound}});
        }
    });
    return rows;
}

std::vector<ExpectedRow> expected_table1() { return parse_expected_table_csv(data::kTable1Csv); }

std::string to_string(TableDiff::Kind kind) {
    switch (kind) {
        case TableDiff::Kind::Missing: return "missing";
        case TableDiff::Kind::Extra: return "extra";
        case TableDiff::Kind::ModeMismatch: return "mode";
        case TableDiff::Kind::FrequencyMismatch: return "frequency";
        case TableDiff::Kind::BoundMismatch: return "bound";
    }
    return "unknown";
}

std::vector<TableDiff> diff_table(std::span<const AssociationRow> computed, std::span<const ExpectedRow> expected,
                                  double freq_tol_hz, double bound_tol_cm) {
    std::vector<TableDiff> diffs;
    const auto same_peak = [](double a, double b) { return std::abs(a - b) < 1e-9; };
    for (const auto& exp : expected) {
        auto it = std::find_if(computed.begin(), computed.end(), [&](const AssociationRow& r) {
            return same_peak(r.peak_hz, exp.peak_hz) && r.chamber == exp.chamber;
        });
        if (it == computed.end()) {
            diffs.push_back({TableDiff::Kind::Missing, exp.peak_hz, exp.chamber, "expected " + exp.mode.str()});
            continue;
        }
        if (!(it->mode == exp.mode)) {
            std::ostringstream os;
            os << "expected " << exp.mode.str() << ' ' << exp.modal_hz << " Hz, got " << it->mode.str() << ' '
               << it->modal_hz << " Hz";
            diffs.push_back({TableDiff::Kind::ModeMismatch, exp.peak_hz, exp.chamber, os.str()});
            continue;
        }
        if (std::abs(it->modal_hz - exp.modal_hz) > freq_tol_hz) {
            std::ostringstream os;
            os << "modal frequency " << it->modal_hz << " vs " << exp.modal_hz;
            diffs.push_back({TableDiff::Kind::FrequencyMismatch, exp.peak_hz, exp.chamber, os.str()});
        }
        if (it->bounds.size() != exp.bounds.size()) {
            diffs.push_back({TableDiff::Kind::BoundMismatch, exp.peak_hz, exp.chamber, "bound count differs"});
            continue;
        }
        for (std::size_t b = 0; b < exp.bounds.size(); ++b) {
            const auto& got = it->bounds[b];
            const auto& [wall, bound] = exp.bounds[b];
            if (std::abs(got.wall_cm - wall) > 1e-6 || std::abs(got.bound_cm - bound) > bound_tol_cm) {
                std::ostringstream os;
                os << got.wall_cm << " +/- " << got.bound_cm << " vs " << wall << " +/- " << bound;
                diffs.push_back({TableDiff::Kind::BoundMismatch, exp.peak_hz, exp.chamber, os.str()});
            }
        }
    }
    for (const auto& row : computed) {
        const bool known = std::any_of(expected.begin(), expected.end(), [&](const ExpectedRow& e) {
            return same_peak(e.peak_hz, row.peak_hz) && e.chamber == row.chamber;
        });
        if (!known) {
            std::ostringstream os;
            os << "unexpected " << row.mode.str() << ' ' << row.modal_hz << " Hz";
            diffs.push_back({TableDiff::Kind::Extra, row.peak_hz, row.chamber, os.str()});
        }
    }
    return diffs;
}

}  // namespace roomtune
