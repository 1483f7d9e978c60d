#pragma once

// Independent reference implementations used as test oracles.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <map>
#include <numbers>
#include <span>
#include <vector>

#include "roomtune/geometry.hpp"

namespace roomtune::test {

/// O(n^2) DFT of a real sequence, bins 0..n/2.
inline std::vector<std::complex<double>> naive_dft(std::span<const double> x) {
    const std::size_t n = x.size();
    std::vector<std::complex<double>> out(n / 2 + 1);
    for (std::size_t k = 0; k < out.size(); ++k) {
        std::complex<double> acc = 0.0;
        for (std::size_t t = 0; t < n; ++t) {
            const double phase = -2.0 * std::numbers::pi * static_cast<double>((k * t) % n) / static_cast<double>(n);
            acc += x[t] * std::complex<double>(std::cos(phase), std::sin(phase));
        }
        out[k] = acc;
    }
    return out;
}

inline std::vector<double> direct_convolve(std::span<const double> a, std::span<const double> b) {
    std::vector<double> out(a.size() + b.size() - 1, 0.0);
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] == 0.0) continue;
        for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
    }
    return out;
}

/// sum_k exp(-t / tau) sin(2 pi f_k t)
inline std::vector<double> decaying_modes(std::span<const double> freqs, double tau, double fs, std::size_t n) {
    std::vector<double> x(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const double t = static_cast<double>(i) / fs;
        for (double f : freqs) x[i] += std::exp(-t / tau) * std::sin(2.0 * std::numbers::pi * f * t);
    }
    return x;
}

/// Icosahedron refined `levels` times and projected onto a sphere.
inline TriangleMesh icosphere(double radius, int levels, Vec3 center = {0.0, 0.0, 0.0}) {
    const double t = (1.0 + std::sqrt(5.0)) / 2.0;
    std::vector<Vec3> v = {{-1, t, 0}, {1, t, 0}, {-1, -t, 0}, {1, -t, 0}, {0, -1, t}, {0, 1, t},
                           {0, -1, -t}, {0, 1, -t}, {t, 0, -1}, {t, 0, 1}, {-t, 0, -1}, {-t, 0, 1}};
    std::vector<std::array<std::size_t, 3>> f = {
        {0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11}, {1, 5, 9}, {5, 11, 4},
        {11, 10, 2}, {10, 7, 6}, {7, 1, 8},  {3, 9, 4},  {3, 4, 2},   {3, 2, 6}, {3, 6, 8},
        {3, 8, 9},  {4, 9, 5},  {2, 4, 11}, {6, 2, 10}, {8, 6, 7},   {9, 8, 1}};
    auto normalize = [](Vec3 p) {
        const double n = std::sqrt(p[0] * p[0] + p[1] * p[1] + p[2] * p[2]);
        return Vec3{p[0] / n, p[1] / n, p[2] / n};
    };
    for (auto& p : v) p = normalize(p);
    for (int level = 0; level < levels; ++level) {
        std::map<std::pair<std::size_t, std::size_t>, std::size_t> mid;
        auto midpoint = [&](std::size_t a, std::size_t b) {
            const auto key = std::minmax(a, b);
            auto it = mid.find(key);
            if (it != mid.end()) return it->second;
            v.push_back(normalize({v[a][0] + v[b][0], v[a][1] + v[b][1], v[a][2] + v[b][2]}));
            mid.emplace(key, v.size() - 1);
            return v.size() - 1;
        };
        std::vector<std::array<std::size_t, 3>> next;
        for (const auto& tri : f) {
            const std::size_t ab = midpoint(tri[0], tri[1]);
            const std::size_t bc = midpoint(tri[1], tri[2]);
            const std::size_t ca = midpoint(tri[2], tri[0]);
            next.push_back({tri[0], ab, ca});
            next.push_back({tri[1], bc, ab});
            next.push_back({tri[2], ca, bc});
            next.push_back({ab, bc, ca});
        }
        f = std::move(next);
    }
    TriangleMesh mesh;
    for (const auto& p : v)
        mesh.vertices.push_back({center[0] + radius * p[0], center[1] + radius * p[1], center[2] + radius * p[2]});
    mesh.faces = std::move(f);
    return mesh;
}

}  // namespace roomtune::test
