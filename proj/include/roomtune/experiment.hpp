#pragma once

#include <optional>
#include <vector>

#include "roomtune/fdtd.hpp"
#include "roomtune/geometry.hpp"
#include "roomtune/modal.hpp"
#include "roomtune/spectral.hpp"

namespace roomtune {

/// Source and receiver positions as fractions of the air region's bounding
/// box. Near-corner positions sit away from the pressure nodes of every mode
/// with indices <= 4.
struct Placement {
    Vec3 source{0.1, 0.1, 0.1};
    Vec3 receiver{0.9, 0.9, 0.9};
};

/// Cell at `fraction` of the air bounding box; falls back to the nearest air
/// cell when that cell is solid. Throws ValidationError for an all-solid grid.
CellIndex cell_at_fraction(const OccupancyGrid& grid, const Vec3& fraction);

/// Fills source and receivers of `base` from `placement` on `grid`.
SimConfig place(const SimConfig& base, const OccupancyGrid& grid, const Placement& placement);

struct PerturbationResult {
    BoxRoom original;
    BoxRoom perturbed;
    ImpulseResponse ir_before;
    ImpulseResponse ir_after;
    Spectrum before;
    Spectrum after;
};

/// Simulates `room` and its copy with one wall moved, with source and receiver
/// at the same relative positions. `cfg` supplies c, dx, courant, duration
/// and execution mode; its cells are replaced.
PerturbationResult run_perturbation_experiment(const BoxRoom& room, Axis axis, double new_length, const SimConfig& cfg,
                                               Band band = {}, const Placement& placement = {});

/// Predicted and simulated movement of one mode that depends on the moved wall.
struct ModeShift {
    ModeIndex mode;
    double before_hz = 0.0;        // box model, original room
    double after_exact_hz = 0.0;   // box model, perturbed room
    double after_linear_hz = 0.0;  // before + sensitivity * dL
    std::optional<double> measured_before_hz;
    std::optional<double> measured_after_hz;
};

/// Modes with a non-zero index on `axis` inside the peak band, each matched
/// to the nearest detected peak within `radius_hz` before and after.
std::vector<ModeShift> summarize_shifts(const PerturbationResult& result, Axis axis, double c,
                                        const PeakOptions& peaks = {}, double radius_hz = 1.5);

}  // namespace roomtune
