#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "roomtune/geometry.hpp"
#include "roomtune/signal.hpp"

namespace roomtune {

/// Stability limit of the 3D seven-point leapfrog scheme, 1/sqrt(3).
inline constexpr double kMaxCourant3d = 0.57735026918962576451;

/// dt = courant * dx / c. Throws ValidationError outside (0, 1/sqrt(3)].
double derive_timestep(double c, double dx, double courant);

enum class ExecutionMode {
    Serial,    // single-threaded reference kernel
    Parallel,  // OpenMP kernel, cells partitioned over threads per step
};

struct SimConfig {
    double c = 343.0;                // m/s
    double dx = 0.05;                // m, must match the grid spacing
    double courant = kMaxCourant3d;  // c dt / dx
    double duration = 4.0;           // s
    CellIndex source{};
    std::vector<CellIndex> receivers;
    ExecutionMode mode = ExecutionMode::Parallel;

    double timestep() const { return derive_timestep(c, dx, courant); }
    double sample_rate() const { return 1.0 / timestep(); }
    /// Number of recorded samples, round(duration * sample_rate).
    std::size_t steps() const;
};

/// Throws ValidationError for unstable or non-physical parameters, cells that
/// are solid or out of range, and receivers not connected to the source.
void validate(const SimConfig& cfg, const OccupancyGrid& grid);

namespace kernels {

/// Flattened stencil operands on a grid padded with one solid layer, so every
/// interior cell has six in-range neighbors. Solid cells have mask 0 and
/// their pressure stays 0; air cells carry self = 2 - courant^2 * (air neighbors).
struct Stencil {
    std::size_t nx = 0, ny = 0, nz = 0;
    double courant_sq = 0.0;
    std::vector<double> mask;
    std::vector<double> self;
};

Stencil build_stencil(const OccupancyGrid& grid, double courant);

/// One leapfrog step: prev <- next(cur, prev). Serial reference.
void step_serial(const Stencil& s, std::span<const double> cur, std::span<double> prev);

/// Same update with z-slabs distributed across OpenMP threads. Bit-identical
/// to step_serial since each cell is computed by the same expression.
void step_parallel(const Stencil& s, std::span<const double> cur, std::span<double> prev);

}  // namespace kernels

/// Time-stepping state for the acoustic wave equation on a voxel grid with
/// rigid walls, started from a unit Kronecker delta at rest.
class FdtdSolver {
public:
    FdtdSolver(const OccupancyGrid& grid, double courant, const CellIndex& source);

    void step(ExecutionMode mode = ExecutionMode::Serial);

    /// Pressure at a cell of the original (unpadded) grid.
    double pressure(const CellIndex& cell) const;
    /// Sum of pressure over all air cells; conserved under rigid walls.
    double air_sum() const;
    double max_abs() const;
    std::size_t steps_taken() const { return steps_; }

private:
    std::size_t padded_index(const CellIndex& cell) const;

    kernels::Stencil stencil_;
    std::vector<double> cur_;
    std::vector<double> prev_;
    std::size_t steps_ = 0;
};

/// Runs the simulation and returns one response per receiver. Sample n holds
/// the pressure after n steps, starting with the initial state at n = 0.
std::vector<ImpulseResponse> simulate(const OccupancyGrid& grid, const SimConfig& cfg);

}  // namespace roomtune
