#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace roomtune {

enum class Axis : int { X = 0, Y = 1, Z = 2 };

Axis parse_axis(std::string_view name);
char axis_name(Axis axis);

using Vec3 = std::array<double, 3>;
using CellIndex = std::array<std::size_t, 3>;

/// Idealized rectangular chamber. Dimensions are in meters and strictly
/// positive; construct through make_box_room().
class BoxRoom {
public:
    const std::string& label() const { return label_; }
    double length(Axis axis) const { return dims_[static_cast<int>(axis)]; }
    const Vec3& dims() const { return dims_; }

    friend BoxRoom make_box_room(std::string label, double lx, double ly, double lz);
    friend bool operator==(const BoxRoom&, const BoxRoom&) = default;

private:
    BoxRoom(std::string label, Vec3 dims) : label_(std::move(label)), dims_(dims) {}

    std::string label_;
    Vec3 dims_;
};

BoxRoom make_box_room(std::string label, double lx, double ly, double lz);

/// Copy of `room` with the wall length along `axis` replaced.
BoxRoom perturb_box(const BoxRoom& room, Axis axis, double new_length);

/// A chamber whose box dimensions may be partially unknown. Unknown axes
/// restrict modal analysis to modes with a zero index on that axis.
struct Chamber {
    std::string label;
    std::array<std::optional<double>, 3> dims;

    Chamber() = default;
    Chamber(std::string label, std::optional<double> lx, std::optional<double> ly, std::optional<double> lz);
    Chamber(const BoxRoom& room);  // NOLINT(google-explicit-constructor)

    bool complete() const;
    /// Throws ValidationError if any dimension is unknown.
    BoxRoom to_box() const;
};

struct TriangleMesh {
    std::vector<Vec3> vertices;
    std::vector<std::array<std::size_t, 3>> faces;
};

/// Parses ASCII STL or the v/f subset of OBJ (triangles only, 1-indexed or
/// negative relative indices). The format is sniffed from the first keyword.
TriangleMesh parse_mesh(std::string_view text);
TriangleMesh read_mesh_file(const std::string& path);

/// Canonical OBJ text; parse_mesh(to_obj_text(m)) reproduces m exactly.
std::string to_obj_text(const TriangleMesh& mesh);

/// True when every undirected edge is shared by exactly two faces.
bool is_watertight(const TriangleMesh& mesh);

/// Closed-surface volume by the divergence theorem (m^3).
double mesh_volume(const TriangleMesh& mesh);

/// 12-triangle axis-aligned box with outward winding, spanning [lo, lo + size].
TriangleMesh make_box_mesh(const Vec3& lo, const Vec3& size);

/// Regular air/solid voxel grid. Cell (i, j, k) has its center at
/// origin + (i + 0.5, j + 0.5, k + 0.5) * dx.
class OccupancyGrid {
public:
    OccupancyGrid(std::size_t nx, std::size_t ny, std::size_t nz, double dx, Vec3 origin = {0.0, 0.0, 0.0});

    std::size_t nx() const { return n_[0]; }
    std::size_t ny() const { return n_[1]; }
    std::size_t nz() const { return n_[2]; }
    std::size_t size() const { return air_.size(); }
    double dx() const { return dx_; }
    const Vec3& origin() const { return origin_; }

    std::size_t linear(const CellIndex& c) const { return (c[2] * n_[1] + c[1]) * n_[0] + c[0]; }
    bool in_bounds(const CellIndex& c) const { return c[0] < n_[0] && c[1] < n_[1] && c[2] < n_[2]; }
    bool is_air(const CellIndex& c) const { return in_bounds(c) && air_[linear(c)] != 0; }
    void set_air(const CellIndex& c, bool air) { air_[linear(c)] = air ? 1 : 0; }

    const std::vector<std::uint8_t>& cells() const { return air_; }
    std::size_t air_count() const;
    double air_volume() const { return static_cast<double>(air_count()) * dx_ * dx_ * dx_; }

    /// Inclusive-exclusive bounding box of air cells; nullopt for an all-solid grid.
    std::optional<std::pair<CellIndex, CellIndex>> air_bounds() const;

    Vec3 cell_center(const CellIndex& c) const;

private:
    std::array<std::size_t, 3> n_;
    double dx_;
    Vec3 origin_;
    std::vector<std::uint8_t> air_;
};

/// Classifies cell centers by ray-crossing parity along +x. The grid covers
/// the mesh bounding box plus one solid layer on every side.
OccupancyGrid voxelize(const TriangleMesh& mesh, double dx);

/// Solid-padded grid whose air region is exactly L/dx cells per axis.
/// Each dimension must be an integer multiple of dx (1e-9 relative).
OccupancyGrid box_to_grid(const BoxRoom& room, double dx);

/// Air cells 6-connected to `seed` (flags per linear index).
std::vector<std::uint8_t> connected_air(const OccupancyGrid& grid, const CellIndex& seed);

}  // namespace roomtune
