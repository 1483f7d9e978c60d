#pragma once

#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "roomtune/geometry.hpp"
#include "roomtune/modal.hpp"

namespace roomtune {

/// Middle-level chambers 18, 20, 24, 25, 26, 27 with their box dimensions.
/// Chamber 25 has no known height.
std::vector<Chamber> bundled_chambers();

/// Parses "label,lx_cm,ly_cm,lz_cm" rows (header and '#' comments allowed);
/// an empty field marks an unknown dimension. Labels must be unique.
std::vector<Chamber> parse_chamber_csv(std::string_view text);

const Chamber& find_chamber(std::span<const Chamber> chambers, std::string_view label);

/// The nine prominent measured peaks, 37.2 ... 92.5 Hz.
std::vector<double> measured_peaks();
/// The eight peaks tabulated with box-model associations, 41.0 ... 92.5 Hz.
std::vector<double> tabulated_peaks();

/// One printed association: peak, chamber, mode and the rounded values.
struct ExpectedRow {
    double peak_hz = 0.0;
    std::string chamber;
    ModeIndex mode;
    double modal_hz = 0.0;
    std::vector<std::pair<double, double>> bounds;  // (wall cm, bound cm)
};

std::vector<ExpectedRow> expected_table1();
std::vector<ExpectedRow> parse_expected_table_csv(std::string_view text);

struct TableDiff {
    enum class Kind { Missing, Extra, ModeMismatch, FrequencyMismatch, BoundMismatch };
    Kind kind;
    double peak_hz;
    std::string chamber;
    std::string detail;
};

std::string to_string(TableDiff::Kind kind);

/// Compares computed associations with the expected rows, keyed by
/// (peak, chamber). Frequencies within `freq_tol_hz` and bounds within
/// `bound_tol_cm` count as equal.
std::vector<TableDiff> diff_table(std::span<const AssociationRow> computed, std::span<const ExpectedRow> expected,
                                  double freq_tol_hz = 0.1, double bound_tol_cm = 0.2);

}  // namespace roomtune
