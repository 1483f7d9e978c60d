#pragma once

#include <compare>
#include <span>
#include <string>
#include <vector>

#include "roomtune/geometry.hpp"

namespace roomtune {

inline constexpr double kDefaultSpeedOfSound = 343.0;  // m/s

/// Half-wavelength counts (n_x, n_y, n_z); never all zero.
struct ModeIndex {
    int nx = 0, ny = 0, nz = 0;

    int operator[](Axis a) const { return a == Axis::X ? nx : a == Axis::Y ? ny : nz; }
    std::string str() const;
    /// Number of non-zero indices: 1 axial, 2 tangential, 3 oblique.
    int order() const { return (nx != 0) + (ny != 0) + (nz != 0); }

    friend auto operator<=>(const ModeIndex&, const ModeIndex&) = default;
};

/// Throws ValidationError for negative or all-zero indices.
ModeIndex make_mode_index(int nx, int ny, int nz);
/// Parses "(1,0,0)" or "1,0,0".
ModeIndex parse_mode_index(std::string_view text);

struct Mode {
    std::string chamber;
    ModeIndex index;
    double frequency = 0.0;  // Hz
};

struct JndPolicy {
    double delta_f = 3.0;  // Hz
};

struct WallBound {
    Axis axis = Axis::X;
    double wall_cm = 0.0;
    double bound_cm = 0.0;
};

struct AssociationRow {
    double peak_hz = 0.0;
    std::string chamber;
    ModeIndex mode;
    double modal_hz = 0.0;
    std::vector<WallBound> bounds;  // one per non-zero index, x then y then z
};

struct JustRatio {
    int numerator = 9;
    int denominator = 8;
    double value() const { return static_cast<double>(numerator) / denominator; }
};

struct RatioRow {
    double lower_hz = 0.0;
    double upper_hz = 0.0;
    double ratio = 0.0;
    JustRatio just;
    double cents = 0.0;  // 1200 log2(ratio / just)
};

/// f = (c/2) sqrt(sum (n_i / L_i)^2). Axes with unknown length must have n_i = 0.
double mode_frequency(const Chamber& room, ModeIndex idx, double c);

/// All modes with 0 < f <= f_max in ascending frequency (ties by index).
std::vector<Mode> enumerate_modes(const Chamber& room, double c, double f_max);

/// df/dL_i = -c^2 n_i^2 / (4 f L_i^3) in Hz per meter; 0 when n_i = 0.
double sensitivity(const Chamber& room, ModeIndex idx, Axis axis, double c);

/// Wall displacement (cm) that moves the mode by policy.delta_f under the
/// linearized sensitivity. Requires n_i > 0 on `axis`.
double jnd_bound(const Chamber& room, ModeIndex idx, Axis axis, double c, JndPolicy policy = {});

/// For each peak (ascending) and each chamber (given order), the closest mode
/// within policy.delta_f together with its wall bounds.
std::vector<AssociationRow> associate(std::span<const double> peaks, std::span<const Chamber> chambers, double c,
                                      JndPolicy policy = {});

double cents(double ratio);

/// Consecutive-peak ratios classified to the nearer of 10:9 and 9:8.
std::vector<RatioRow> ratio_analysis(std::span<const double> peaks);

}  // namespace roomtune
