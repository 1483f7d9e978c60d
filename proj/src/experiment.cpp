#include "roomtune/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "roomtune/error.hpp"

namespace roomtune {

CellIndex cell_at_fraction(const OccupancyGrid& grid, const Vec3& fraction) {
    const auto bounds = grid.air_bounds();
    if (!bounds) throw ValidationError("grid has no air cells");
    const auto& [lo, hi] = *bounds;
    CellIndex target{};
    for (int a = 0; a < 3; ++a) {
        if (!(fraction[a] >= 0.0 && fraction[a] <= 1.0)) throw ValidationError("placement fractions must be in [0, 1]");
        const std::size_t extent = hi[a] - lo[a];
        const auto offset = static_cast<std::size_t>(std::floor(fraction[a] * static_cast<double>(extent)));
        target[a] = lo[a] + std::min(offset, extent - 1);
    }
    if (grid.is_air(target)) return target;

    CellIndex best = target;
    double best_d2 = std::numeric_limits<double>::max();
    for (std::size_t k = lo[2]; k < hi[2]; ++k)
        for (std::size_t j = lo[1]; j < hi[1]; ++j)
            for (std::size_t i = lo[0]; i < hi[0]; ++i) {
                if (!grid.is_air({i, j, k})) continue;
                const double di = static_cast<double>(i) - static_cast<double>(target[0]);
                const double dj = static_cast<double>(j) - static_cast<double>(target[1]);
                const double dk = static_cast<double>(k) - static_cast<double>(target[2]);
                const double d2 = di * di + dj * dj + dk * dk;
                if (d2 < best_d2) {
                    best_d2 = d2;
                    best = {i, j, k};
                }
            }
    return best;
}

SimConfig place(const SimConfig& base, const OccupancyGrid& grid, const Placement& placement) {
    SimConfig cfg = base;
    cfg.source = cell_at_fraction(grid, placement.source);
    cfg.receivers = {cell_at_fraction(grid, placement.receiver)};
    return cfg;
}

PerturbationResult run_perturbation_experiment(const BoxRoom& room, Axis axis, double new_length, const SimConfig& cfg,
                                               Band band, const Placement& placement) {
    const BoxRoom perturbed = perturb_box(room, axis, new_length);
    const OccupancyGrid grid_before = box_to_grid(room, cfg.dx);
    const OccupancyGrid grid_after = box_to_grid(perturbed, cfg.dx);

    auto ir_before = simulate(grid_before, place(cfg, grid_before, placement)).front();
    auto ir_after = simulate(grid_after, place(cfg, grid_after, placement)).front();
    Spectrum before = spectrum(ir_before, band);
    Spectrum after = spectrum(ir_after, band);
    return {room, perturbed, std::move(ir_before), std::move(ir_after), std::move(before), std::move(after)};
}

std::vector<ModeShift> summarize_shifts(const PerturbationResult& result, Axis axis, double c, const PeakOptions& opts,
                                        double radius_hz) {
    const Chamber before_room(result.original);
    const Chamber after_room(result.perturbed);
    const double delta_l = result.perturbed.length(axis) - result.original.length(axis);

    const auto peaks_before = find_peaks(result.before, opts);
    const auto peaks_after = find_peaks(result.after, opts);

    std::vector<ModeShift> shifts;
    for (const auto& mode : enumerate_modes(before_room, c, opts.band.hi)) {
        if (mode.index[axis] == 0 || mode.frequency < opts.band.lo) continue;
        ModeShift s;
        s.mode = mode.index;
        s.before_hz = mode.frequency;
        s.after_exact_hz = mode_frequency(after_room, mode.index, c);
        s.after_linear_hz = mode.frequency + sensitivity(before_room, mode.index, axis, c) * delta_l;
        if (const Peak* p = nearest_peak(peaks_before, s.before_hz, radius_hz)) s.measured_before_hz = p->frequency;
        if (const Peak* p = nearest_peak(peaks_after, s.after_exact_hz, radius_hz)) s.measured_after_hz = p->frequency;
        shifts.push_back(s);
    }
    return shifts;
}

}  // namespace roomtune
