#include "roomtune/fdtd.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "roomtune/error.hpp"

namespace roomtune {

namespace {

std::string cell_str(const CellIndex& c) {
    std::ostringstream os;
    os << '(' << c[0] << ',' << c[1] << ',' << c[2] << ')';
    return os.str();
}

}  // namespace

double derive_timestep(double c, double dx, double courant) {
    if (!std::isfinite(c) || c <= 0.0) throw ValidationError("speed of sound must be positive");
    if (!std::isfinite(dx) || dx <= 0.0) throw ValidationError("grid spacing dx must be positive");
    if (!std::isfinite(courant) || courant <= 0.0 || courant > kMaxCourant3d * (1.0 + 1e-12)) {
        std::ostringstream os;
        os << "Courant number " << courant << " outside the stable range (0, 1/sqrt(3) = " << kMaxCourant3d << "]";
        throw ValidationError(os.str());
    }
    return courant * dx / c;
}

std::size_t SimConfig::steps() const { return static_cast<std::size_t>(std::llround(duration * sample_rate())); }

void validate(const SimConfig& cfg, const OccupancyGrid& grid) {
    derive_timestep(cfg.c, cfg.dx, cfg.courant);
    if (!std::isfinite(cfg.duration) || cfg.duration <= 0.0) throw ValidationError("duration must be positive");
    if (std::abs(cfg.dx - grid.dx()) > 1e-12 * grid.dx())
        throw ValidationError("configured dx does not match the grid spacing");
    if (cfg.steps() == 0) throw ValidationError("duration is shorter than one time step");
    if (!grid.is_air(cfg.source)) throw ValidationError("source cell " + cell_str(cfg.source) + " is not an air cell");
    if (cfg.receivers.empty()) throw ValidationError("at least one receiver is required");
    const auto reachable = connected_air(grid, cfg.source);
    for (const auto& r : cfg.receivers) {
        if (!grid.is_air(r)) throw ValidationError("receiver cell " + cell_str(r) + " is not an air cell");
        if (!reachable[grid.linear(r)])
            throw ValidationError("receiver cell " + cell_str(r) + " is not connected to the source");
    }
}

namespace kernels {

Stencil build_stencil(const OccupancyGrid& grid, double courant) {
    Stencil s;
    s.nx = grid.nx() + 2;
    s.ny = grid.ny() + 2;
    s.nz = grid.nz() + 2;
    s.courant_sq = courant * courant;
    s.mask.assign(s.nx * s.ny * s.nz, 0.0);
    s.self.assign(s.nx * s.ny * s.nz, 0.0);
    for (std::size_t k = 0; k < grid.nz(); ++k)
        for (std::size_t j = 0; j < grid.ny(); ++j)
            for (std::size_t i = 0; i < grid.nx(); ++i) {
                const CellIndex c{i, j, k};
                if (!grid.is_air(c)) continue;
                int neighbors = 0;
                for (int a = 0; a < 3; ++a) {
                    CellIndex lo = c, hi = c;
                    hi[a] += 1;
                    if (grid.is_air(hi)) ++neighbors;
                    if (c[a] > 0) {
                        lo[a] -= 1;
                        if (grid.is_air(lo)) ++neighbors;
                    }
                }
                const std::size_t p = ((k + 1) * s.ny + (j + 1)) * s.nx + (i + 1);
                s.mask[p] = 1.0;
                s.self[p] = 2.0 - s.courant_sq * neighbors;
            }
    return s;
}

}  // namespace kernels

FdtdSolver::FdtdSolver(const OccupancyGrid& grid, double courant, const CellIndex& source)
    : stencil_(kernels::build_stencil(grid, courant)) {
    if (!grid.is_air(source)) throw ValidationError("source cell " + cell_str(source) + " is not an air cell");
    cur_.assign(stencil_.mask.size(), 0.0);
    cur_[padded_index(source)] = 1.0;
    prev_ = cur_;  // zero initial velocity
}

std::size_t FdtdSolver::padded_index(const CellIndex& c) const {
    return ((c[2] + 1) * stencil_.ny + (c[1] + 1)) * stencil_.nx + (c[0] + 1);
}

void FdtdSolver::step(ExecutionMode mode) {
    if (mode == ExecutionMode::Parallel)
        kernels::step_parallel(stencil_, cur_, prev_);
    else
        kernels::step_serial(stencil_, cur_, prev_);
    std::swap(cur_, prev_);
    ++steps_;
}

double FdtdSolver::pressure(const CellIndex& cell) const { return cur_[padded_index(cell)]; }

double FdtdSolver::air_sum() const {
    double sum = 0.0;
    for (std::size_t i = 0; i < cur_.size(); ++i) sum += stencil_.mask[i] * cur_[i];
    return sum;
}

double FdtdSolver::max_abs() const {
    double m = 0.0;
    for (double v : cur_) m = std::max(m, std::abs(v));
    return m;
}

std::vector<ImpulseResponse> simulate(const OccupancyGrid& grid, const SimConfig& cfg) {
    validate(cfg, grid);
    const std::size_t n = cfg.steps();
    std::vector<ImpulseResponse> out(cfg.receivers.size());
    for (auto& ir : out) {
        ir.sample_rate = cfg.sample_rate();
        ir.samples.resize(n);
    }
    FdtdSolver solver(grid, cfg.courant, cfg.source);
    for (std::size_t t = 0; t < n; ++t) {
        if (t > 0) solver.step(cfg.mode);
        for (std::size_t r = 0; r < out.size(); ++r) out[r].samples[t] = solver.pressure(cfg.receivers[r]);
    }
    return out;
}

}  // namespace roomtune
