// Leapfrog stencil kernels. Compiled with -ffp-contract=off so the serial and
// OpenMP variants produce bit-identical fields.

#include "roomtune/fdtd.hpp"

namespace roomtune::kernels {

namespace {

inline void update_row(const Stencil& s, const double* cur, double* prev, std::size_t row) {
    const std::size_t sy = s.nx;
    const std::size_t sz = s.nx * s.ny;
    const double l2 = s.courant_sq;
    const double* mask = s.mask.data() + row;
    const double* self = s.self.data() + row;
    const double* c = cur + row;
    double* p = prev + row;
    const std::size_t n = s.nx - 2;
#pragma omp simd
    for (std::size_t i = 1; i <= n; ++i) {
        const double neighbors = c[i - 1] + c[i + 1] + c[i - sy] + c[i + sy] + c[i - sz] + c[i + sz];
        p[i] = mask[i] * (self[i] * c[i] - p[i] + l2 * neighbors);
    }
}

}  // namespace

void step_serial(const Stencil& s, std::span<const double> cur, std::span<double> prev) {
    for (std::size_t k = 1; k + 1 < s.nz; ++k)
        for (std::size_t j = 1; j + 1 < s.ny; ++j) update_row(s, cur.data(), prev.data(), (k * s.ny + j) * s.nx);
}

void step_parallel(const Stencil& s, std::span<const double> cur, std::span<double> prev) {
    const long nz = static_cast<long>(s.nz);
#pragma omp parallel for schedule(static)
    for (long k = 1; k < nz - 1; ++k)
        for (std::size_t j = 1; j + 1 < s.ny; ++j)
            update_row(s, cur.data(), prev.data(), (static_cast<std::size_t>(k) * s.ny + j) * s.nx);
}

}  // namespace roomtune::kernels
