#include "roomtune/modal.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "roomtune/error.hpp"

namespace roomtune {

namespace {

void check_speed(double c) {
    if (!std::isfinite(c) || c <= 0.0) throw ValidationError("speed of sound must be positive");
}

constexpr Axis kAxes[] = {Axis::X, Axis::Y, Axis::Z};

}  // namespace

std::string ModeIndex::str() const {
    return "(" + std::to_string(nx) + "," + std::to_string(ny) + "," + std::to_string(nz) + ")";
}

ModeIndex make_mode_index(int nx, int ny, int nz) {
    if (nx < 0 || ny < 0 || nz < 0) throw ValidationError("mode indices must be non-negative");
    if (nx == 0 && ny == 0 && nz == 0) throw ValidationError("mode (0,0,0) is not a room mode");
    return {nx, ny, nz};
}

ModeIndex parse_mode_index(std::string_view text) {
    std::string cleaned;
    for (char ch : text) {
        if (ch == '(' || ch == ')' || ch == ' ') continue;
        cleaned += ch == ',' ? ' ' : ch;
    }
    std::istringstream in(cleaned);
    int n[3];
    if (!(in >> n[0] >> n[1] >> n[2]) || !(in >> std::ws).eof())
        throw ParseError("invalid mode index '" + std::string(text) + "'");
    return make_mode_index(n[0], n[1], n[2]);
}

double mode_frequency(const Chamber& room, ModeIndex idx, double c) {
    check_speed(c);
    double sum = 0.0;
    for (Axis a : kAxes) {
        const int n = idx[a];
        if (n == 0) continue;
        const auto& len = room.dims[static_cast<int>(a)];
        if (!len) {
            throw ValidationError("chamber " + room.label + " has no known L_" + axis_name(a) + " for mode " +
                                  idx.str());
        }
        sum += (n / *len) * (n / *len);
    }
    return 0.5 * c * std::sqrt(sum);
}

std::vector<Mode> enumerate_modes(const Chamber& room, double c, double f_max) {
    check_speed(c);
    if (!std::isfinite(f_max) || f_max <= 0.0) throw ValidationError("f_max must be positive");
    int limit[3];
    for (int a = 0; a < 3; ++a) {
        limit[a] = room.dims[a] ? static_cast<int>(std::ceil(2.0 * f_max * *room.dims[a] / c)) : 0;
    }
    std::vector<Mode> modes;
    for (int nx = 0; nx <= limit[0]; ++nx)
        for (int ny = 0; ny <= limit[1]; ++ny)
            for (int nz = 0; nz <= limit[2]; ++nz) {
                if (nx == 0 && ny == 0 && nz == 0) continue;
                const ModeIndex idx{nx, ny, nz};
                const double f = mode_frequency(room, idx, c);
                if (f <= f_max) modes.push_back({room.label, idx, f});
            }
    std::sort(modes.begin(), modes.end(), [](const Mode& a, const Mode& b) {
        return a.frequency < b.frequency || (a.frequency == b.frequency && a.index < b.index);
    });
    return modes;
}

double sensitivity(const Chamber& room, ModeIndex idx, Axis axis, double c) {
    const int n = idx[axis];
    if (n == 0) return 0.0;
    const double f = mode_frequency(room, idx, c);
    const double len = *room.dims[static_cast<int>(axis)];
    return -(c * c * n * n) / (4.0 * f * len * len * len);
}

double jnd_bound(const Chamber& room, ModeIndex idx, Axis axis, double c, JndPolicy policy) {
    if (!(policy.delta_f > 0.0)) throw ValidationError("JND delta_f must be positive");
    if (idx[axis] == 0) {
        throw ValidationError(std::string("mode ") + idx.str() + " does not depend on L_" + axis_name(axis) +
                              "; its bound is unbounded");
    }
    return 100.0 * policy.delta_f / std::abs(sensitivity(room, idx, axis, c));
}

std::vector<AssociationRow> associate(std::span<const double> peaks, std::span<const Chamber> chambers, double c,
                                      JndPolicy policy) {
    if (!(policy.delta_f > 0.0)) throw ValidationError("JND delta_f must be positive");
    std::vector<double> sorted(peaks.begin(), peaks.end());
    std::sort(sorted.begin(), sorted.end());
    std::vector<AssociationRow> rows;
    if (sorted.empty()) return rows;

    std::vector<std::vector<Mode>> modes;
    modes.reserve(chambers.size());
    for (const auto& ch : chambers) modes.push_back(enumerate_modes(ch, c, sorted.back() + policy.delta_f));

    for (double peak : sorted) {
        for (std::size_t ci = 0; ci < chambers.size(); ++ci) {
            const Mode* best = nullptr;
            for (const auto& m : modes[ci]) {
                const double d = std::abs(m.frequency - peak);
                if (d <= policy.delta_f && (!best || d < std::abs(best->frequency - peak))) best = &m;
            }
            if (!best) continue;
            AssociationRow row{peak, chambers[ci].label, best->index, best->frequency, {}};
            for (Axis a : kAxes) {
                if (best->index[a] == 0) continue;
                const double wall = *chambers[ci].dims[static_cast<int>(a)];
                row.bounds.push_back({a, 100.0 * wall, jnd_bound(chambers[ci], best->index, a, c, policy)});
            }
            rows.push_back(std::move(row));
        }
    }
    return rows;
}

double cents(double ratio) { return 1200.0 * std::log2(ratio); }

std::vector<RatioRow> ratio_analysis(std::span<const double> peaks) {
    if (peaks.size() < 2) throw ValidationError("ratio analysis needs at least two peaks");
    for (double p : peaks)
        if (!(p > 0.0) || !std::isfinite(p)) throw ValidationError("peak frequencies must be positive");
    std::vector<RatioRow> rows;
    constexpr JustRatio kMinorTone{10, 9};
    constexpr JustRatio kMajorTone{9, 8};
    for (std::size_t i = 0; i + 1 < peaks.size(); ++i) {
        if (!(peaks[i + 1] > peaks[i])) throw ValidationError("peaks must be strictly ascending");
        RatioRow row;
        row.lower_hz = peaks[i];
        row.upper_hz = peaks[i + 1];
        row.ratio = peaks[i + 1] / peaks[i];
        const double to_minor = cents(row.ratio / kMinorTone.value());
        const double to_major = cents(row.ratio / kMajorTone.value());
        if (std::abs(to_minor) < std::abs(to_major)) {
            row.just = kMinorTone;
            row.cents = to_minor;
        } else {
            row.just = kMajorTone;
            row.cents = to_major;
        }
        rows.push_back(row);
    }
    return rows;
}

}  // namespace roomtune
