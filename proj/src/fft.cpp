#include "roomtune/fft.hpp"

#include <fftw3.h>

#include <algorithm>
#include <memory>
#include <stdexcept>

namespace roomtune {

namespace {

struct PlanDeleter {
    void operator()(fftw_plan_s* p) const { fftw_destroy_plan(p); }
};
using Plan = std::unique_ptr<fftw_plan_s, PlanDeleter>;

template <typename T>
struct FftwFree {
    void operator()(T* p) const { fftw_free(p); }
};
template <typename T>
using FftwBuffer = std::unique_ptr<T[], FftwFree<T>>;

template <typename T>
FftwBuffer<T> allocate(std::size_t count) {
    auto* raw = static_cast<T*>(fftw_malloc(sizeof(T) * std::max<std::size_t>(count, 1)));
    if (!raw) throw std::bad_alloc();
    return FftwBuffer<T>(raw);
}

}  // namespace

std::vector<std::complex<double>> rfft(std::span<const double> x, std::size_t n) {
    if (n == 0) return {};
    auto in = allocate<double>(n);
    auto out = allocate<fftw_complex>(n / 2 + 1);
    Plan plan(fftw_plan_dft_r2c_1d(static_cast<int>(n), in.get(), out.get(), FFTW_ESTIMATE));
    const std::size_t used = std::min(n, x.size());
    std::copy_n(x.begin(), used, in.get());
    std::fill(in.get() + used, in.get() + n, 0.0);
    fftw_execute(plan.get());
    std::vector<std::complex<double>> bins(n / 2 + 1);
    for (std::size_t k = 0; k < bins.size(); ++k) bins[k] = {out[k][0], out[k][1]};
    return bins;
}

std::vector<double> irfft(std::span<const std::complex<double>> bins, std::size_t n) {
    if (n == 0) return {};
    if (bins.size() != n / 2 + 1) throw std::invalid_argument("irfft: bin count does not match signal length");
    auto in = allocate<fftw_complex>(n / 2 + 1);
    auto out = allocate<double>(n);
    Plan plan(fftw_plan_dft_c2r_1d(static_cast<int>(n), in.get(), out.get(), FFTW_ESTIMATE));
    for (std::size_t k = 0; k < bins.size(); ++k) {
        in[k][0] = bins[k].real();
        in[k][1] = bins[k].imag();
    }
    fftw_execute(plan.get());
    std::vector<double> x(out.get(), out.get() + n);
    const double scale = 1.0 / static_cast<double>(n);
    for (double& v : x) v *= scale;
    return x;
}

std::size_t next_pow2(std::size_t n) {
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

}  // namespace roomtune
