#include "roomtune/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <sstream>

#include "roomtune/error.hpp"

namespace roomtune {

namespace {

void check_length(double value, const char* what) {
    if (!std::isfinite(value) || value <= 0.0) {
        std::ostringstream os;
        os << what << " must be positive and finite (got " << value << ")";
        throw ValidationError(os.str());
    }
}

}  // namespace

Axis parse_axis(std::string_view name) {
    if (name == "x" || name == "X") return Axis::X;
    if (name == "y" || name == "Y") return Axis::Y;
    if (name == "z" || name == "Z") return Axis::Z;
    throw ValidationError("unknown axis '" + std::string(name) + "' (expected x, y or z)");
}

char axis_name(Axis axis) { return "xyz"[static_cast<int>(axis)]; }

BoxRoom make_box_room(std::string label, double lx, double ly, double lz) {
    check_length(lx, "L_x");
    check_length(ly, "L_y");
    check_length(lz, "L_z");
    return BoxRoom(std::move(label), {lx, ly, lz});
}

BoxRoom perturb_box(const BoxRoom& room, Axis axis, double new_length) {
    Vec3 dims = room.dims();
    dims[static_cast<int>(axis)] = new_length;
    return make_box_room(room.label(), dims[0], dims[1], dims[2]);
}

Chamber::Chamber(std::string label_, std::optional<double> lx, std::optional<double> ly, std::optional<double> lz)
    : label(std::move(label_)), dims{lx, ly, lz} {
    for (int a = 0; a < 3; ++a) {
        if (dims[a]) check_length(*dims[a], "chamber dimension");
    }
}

Chamber::Chamber(const BoxRoom& room) : label(room.label()), dims{room.dims()[0], room.dims()[1], room.dims()[2]} {}

bool Chamber::complete() const {
    return std::all_of(dims.begin(), dims.end(), [](const auto& d) { return d.has_value(); });
}

BoxRoom Chamber::to_box() const {
    if (!complete()) throw ValidationError("chamber " + label + " has an unknown dimension");
    return make_box_room(label, *dims[0], *dims[1], *dims[2]);
}

// ---------------------------------------------------------------------------

OccupancyGrid::OccupancyGrid(std::size_t nx, std::size_t ny, std::size_t nz, double dx, Vec3 origin)
    : n_{nx, ny, nz}, dx_(dx), origin_(origin) {
    if (nx == 0 || ny == 0 || nz == 0) throw ValidationError("grid must have at least one cell per axis");
    check_length(dx, "grid spacing dx");
    air_.assign(nx * ny * nz, 0);
}

std::size_t OccupancyGrid::air_count() const {
    return static_cast<std::size_t>(std::count(air_.begin(), air_.end(), std::uint8_t{1}));
}

std::optional<std::pair<CellIndex, CellIndex>> OccupancyGrid::air_bounds() const {
    CellIndex lo{n_[0], n_[1], n_[2]};
    CellIndex hi{0, 0, 0};
    bool any = false;
    for (std::size_t k = 0; k < n_[2]; ++k)
        for (std::size_t j = 0; j < n_[1]; ++j)
            for (std::size_t i = 0; i < n_[0]; ++i) {
                if (!air_[linear({i, j, k})]) continue;
                any = true;
                const CellIndex c{i, j, k};
                for (int a = 0; a < 3; ++a) {
                    lo[a] = std::min(lo[a], c[a]);
                    hi[a] = std::max(hi[a], c[a] + 1);
                }
            }
    if (!any) return std::nullopt;
    return std::make_pair(lo, hi);
}

Vec3 OccupancyGrid::cell_center(const CellIndex& c) const {
    return {origin_[0] + (static_cast<double>(c[0]) + 0.5) * dx_, origin_[1] + (static_cast<double>(c[1]) + 0.5) * dx_,
            origin_[2] + (static_cast<double>(c[2]) + 0.5) * dx_};
}

OccupancyGrid box_to_grid(const BoxRoom& room, double dx) {
    check_length(dx, "grid spacing dx");
    std::array<std::size_t, 3> cells{};
    for (int a = 0; a < 3; ++a) {
        const double ratio = room.dims()[a] / dx;
        const double whole = std::round(ratio);
        if (whole < 1.0 || std::abs(ratio - whole) > 1e-9 * ratio) {
            std::ostringstream os;
            os << "L_" << axis_name(static_cast<Axis>(a)) << " = " << room.dims()[a]
               << " m is not an integer multiple of dx = " << dx << " m";
            throw ValidationError(os.str());
        }
        cells[a] = static_cast<std::size_t>(whole);
    }
    OccupancyGrid grid(cells[0] + 2, cells[1] + 2, cells[2] + 2, dx, {-dx, -dx, -dx});
    for (std::size_t k = 1; k <= cells[2]; ++k)
        for (std::size_t j = 1; j <= cells[1]; ++j)
            for (std::size_t i = 1; i <= cells[0]; ++i) grid.set_air({i, j, k}, true);
    return grid;
}

std::vector<std::uint8_t> connected_air(const OccupancyGrid& grid, const CellIndex& seed) {
    std::vector<std::uint8_t> seen(grid.size(), 0);
    if (!grid.is_air(seed)) return seen;
    std::deque<CellIndex> queue{seed};
    seen[grid.linear(seed)] = 1;
    while (!queue.empty()) {
        const CellIndex c = queue.front();
        queue.pop_front();
        for (int a = 0; a < 3; ++a) {
            for (int dir : {-1, 1}) {
                CellIndex n = c;
                if (dir < 0 && n[a] == 0) continue;
                n[a] = dir < 0 ? n[a] - 1 : n[a] + 1;
                if (!grid.is_air(n)) continue;
                auto& flag = seen[grid.linear(n)];
                if (flag) continue;
                flag = 1;
                queue.push_back(n);
            }
        }
    }
    return seen;
}

}  // namespace roomtune
