#include <algorithm>
#include <cmath>
#include <limits>

#include "roomtune/error.hpp"
#include "roomtune/geometry.hpp"

namespace roomtune {

namespace {

struct Point2 {
    double y, z;
};

bool lex_less(const Point2& a, const Point2& b) { return a.y < b.y || (a.y == b.y && a.z < b.z); }

// Sign of the 2D orientation of p relative to the directed edge a->b in the
// (y, z) plane, with exact ties resolved by an infinitesimal perturbation of p
// by (eps, eps^2). The edge is evaluated in canonical vertex order so that two
// triangles sharing an edge see bit-identical values.
int edge_side(Point2 a, Point2 b, const Point2& p) {
    bool flipped = false;
    if (lex_less(b, a)) {
        std::swap(a, b);
        flipped = true;
    }
    const double w = (b.y - a.y) * (p.z - a.z) - (b.z - a.z) * (p.y - a.y);
    int side;
    if (w > 0.0) {
        side = 1;
    } else if (w < 0.0) {
        side = -1;
    } else if (b.z != a.z) {
        side = (b.z - a.z) > 0.0 ? -1 : 1;
    } else {
        side = (b.y - a.y) > 0.0 ? 1 : -1;
    }
    return flipped ? -side : side;
}

}  // namespace

OccupancyGrid voxelize(const TriangleMesh& mesh, double dx) {
    if (!std::isfinite(dx) || dx <= 0.0) throw ValidationError("voxel size dx must be positive");
    if (!is_watertight(mesh)) throw ValidationError("mesh is not watertight (every edge must be shared by two faces)");

    Vec3 lo{std::numeric_limits<double>::max(), std::numeric_limits<double>::max(), std::numeric_limits<double>::max()};
    Vec3 hi{std::numeric_limits<double>::lowest(), std::numeric_limits<double>::lowest(),
            std::numeric_limits<double>::lowest()};
    for (const auto& v : mesh.vertices) {
        for (int a = 0; a < 3; ++a) {
            lo[a] = std::min(lo[a], v[a]);
            hi[a] = std::max(hi[a], v[a]);
        }
    }
    std::array<std::size_t, 3> cells{};
    for (int a = 0; a < 3; ++a) {
        const double extent = hi[a] - lo[a];
        if (dx > extent) throw ValidationError("dx is larger than the mesh's smallest extent");
        cells[a] = static_cast<std::size_t>(std::ceil(extent / dx - 1e-9));
    }

    OccupancyGrid grid(cells[0] + 2, cells[1] + 2, cells[2] + 2, dx, {lo[0] - dx, lo[1] - dx, lo[2] - dx});

    struct Tri {
        Point2 p[3];
        Vec3 a, b, c;
        double ymin, ymax, zmin, zmax;
    };
    std::vector<Tri> tris;
    tris.reserve(mesh.faces.size());
    for (const auto& f : mesh.faces) {
        Tri t{};
        t.a = mesh.vertices[f[0]];
        t.b = mesh.vertices[f[1]];
        t.c = mesh.vertices[f[2]];
        const Vec3* v[3] = {&t.a, &t.b, &t.c};
        for (int i = 0; i < 3; ++i) t.p[i] = {(*v[i])[1], (*v[i])[2]};
        t.ymin = std::min({t.p[0].y, t.p[1].y, t.p[2].y});
        t.ymax = std::max({t.p[0].y, t.p[1].y, t.p[2].y});
        t.zmin = std::min({t.p[0].z, t.p[1].z, t.p[2].z});
        t.zmax = std::max({t.p[0].z, t.p[1].z, t.p[2].z});
        tris.push_back(t);
    }

    std::vector<double> crossings;
    for (std::size_t k = 1; k + 1 < grid.nz(); ++k) {
        for (std::size_t j = 1; j + 1 < grid.ny(); ++j) {
            const Vec3 center = grid.cell_center({0, j, k});
            const Point2 q{center[1], center[2]};
            crossings.clear();
            for (const auto& t : tris) {
                if (q.y < t.ymin || q.y > t.ymax || q.z < t.zmin || q.z > t.zmax) continue;
                const int s0 = edge_side(t.p[0], t.p[1], q);
                const int s1 = edge_side(t.p[1], t.p[2], q);
                const int s2 = edge_side(t.p[2], t.p[0], q);
                if (s0 != s1 || s1 != s2) continue;
                // x of the supporting plane at (q.y, q.z)
                const Vec3 e1{t.b[0] - t.a[0], t.b[1] - t.a[1], t.b[2] - t.a[2]};
                const Vec3 e2{t.c[0] - t.a[0], t.c[1] - t.a[1], t.c[2] - t.a[2]};
                const Vec3 n{e1[1] * e2[2] - e1[2] * e2[1], e1[2] * e2[0] - e1[0] * e2[2], e1[0] * e2[1] - e1[1] * e2[0]};
                if (n[0] == 0.0) continue;  // face parallel to the ray
                const double x = t.a[0] - (n[1] * (q.y - t.a[1]) + n[2] * (q.z - t.a[2])) / n[0];
                crossings.push_back(x);
            }
            if (crossings.empty()) continue;
            std::sort(crossings.begin(), crossings.end());
            // Parity of crossings strictly to the right of each cell center.
            std::size_t right = crossings.size();
            std::size_t next = 0;
            for (std::size_t i = 1; i + 1 < grid.nx(); ++i) {
                const double x = grid.cell_center({i, j, k})[0];
                while (next < crossings.size() && crossings[next] <= x) {
                    ++next;
                    --right;
                }
                if (right % 2 == 1) grid.set_air({i, j, k}, true);
            }
        }
    }
    return grid;
}

}  // namespace roomtune
