#include <catch_amalgamated.hpp>

#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "roomtune/error.hpp"
#include "roomtune/geometry.hpp"
#include "support.hpp"

using namespace roomtune;
using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

CellIndex air_extent(const OccupancyGrid& g) {
    const auto b = g.air_bounds();
    REQUIRE(b);
    return {b->second[0] - b->first[0], b->second[1] - b->first[1], b->second[2] - b->first[2]};
}

const char* kCubeObj = R"(# unit cube
v 0 0 0
v 1 0 0
v 0 1 0
v 1 1 0
v 0 0 1
v 1 0 1
v 0 1 1
v 1 1 1
f 1 3 2
f 2 3 4
f 5 6 7
f 6 8 7
f 1 2 5
f 2 6 5
f 3 7 4
f 4 7 8
f 1 5 3
f 3 5 7
f 2 4 6
f 4 8 6
)";

}  // namespace

TEST_CASE("make_box_room stores the given dimensions") {
    const BoxRoom ch27 = make_box_room("27", 3.60, 2.60, 2.35);
    CHECK(ch27.label() == "27");
    CHECK(ch27.length(Axis::X) == 3.60);
    CHECK(ch27.length(Axis::Y) == 2.60);
    CHECK(ch27.length(Axis::Z) == 2.35);

    const BoxRoom ch18 = make_box_room("18", 6.70, 4.24, 2.20);
    CHECK(ch18.dims() == Vec3{6.70, 4.24, 2.20});

    const BoxRoom u = make_box_room("u", 1, 1, 1);
    CHECK(u.dims() == Vec3{1, 1, 1});
}

TEST_CASE("make_box_room rejects invalid dimensions") {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    const double inf = std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(make_box_room("a", 0.0, 1, 1), ValidationError);
    CHECK_THROWS_AS(make_box_room("a", 1, -2, 1), ValidationError);
    CHECK_THROWS_AS(make_box_room("a", 1, 1, nan), ValidationError);
    CHECK_THROWS_AS(make_box_room("a", inf, 1, 1), ValidationError);
}

TEST_CASE("perturb_box replaces one wall") {
    const BoxRoom ch27 = make_box_room("27", 3.60, 2.60, 2.35);
    CHECK(perturb_box(ch27, Axis::X, 3.85).dims() == Vec3{3.85, 2.60, 2.35});
    CHECK(perturb_box(ch27, Axis::Z, 2.45).dims() == Vec3{3.60, 2.60, 2.45});
    CHECK(perturb_box(ch27, Axis::Y, 2.60) == ch27);
    CHECK(ch27.dims() == Vec3{3.60, 2.60, 2.35});

    const BoxRoom moved = perturb_box(ch27, Axis::X, 3.85);
    CHECK(perturb_box(moved, Axis::X, 3.60) == ch27);

    CHECK_THROWS_AS(perturb_box(ch27, Axis::Y, 0.0), ValidationError);
    CHECK_THROWS_AS(perturb_box(ch27, Axis::Y, -1.0), ValidationError);
}

TEST_CASE("axis names parse") {
    CHECK(parse_axis("x") == Axis::X);
    CHECK(parse_axis("Y") == Axis::Y);
    CHECK(parse_axis("z") == Axis::Z);
    CHECK(axis_name(Axis::Y) == 'y');
    CHECK_THROWS_AS(parse_axis("w"), ValidationError);
}

TEST_CASE("single-facet STL") {
    const auto mesh = parse_mesh(R"(solid tri
  facet normal 0 0 1
    outer loop
      vertex 0 0 0
      vertex 1 0 0
      vertex 0 1 0
    endloop
  endfacet
endsolid tri
)");
    CHECK(mesh.vertices.size() == 3);
    REQUIRE(mesh.faces.size() == 1);
    CHECK(mesh.vertices[mesh.faces[0][1]] == Vec3{1, 0, 0});
}

TEST_CASE("STL shares repeated vertices") {
    std::string stl = "solid box\n";
    const auto box = make_box_mesh({0, 0, 0}, {1, 2, 3});
    for (const auto& f : box.faces) {
        stl += "facet normal 0 0 0\nouter loop\n";
        for (auto v : f) {
            const auto& p = box.vertices[v];
            stl += "vertex " + std::to_string(p[0]) + " " + std::to_string(p[1]) + " " + std::to_string(p[2]) + "\n";
        }
        stl += "endloop\nendfacet\n";
    }
    stl += "endsolid box\n";
    const auto mesh = parse_mesh(stl);
    CHECK(mesh.vertices.size() == 8);
    CHECK(mesh.faces.size() == 12);
    CHECK(is_watertight(mesh));
    CHECK_THAT(mesh_volume(mesh), WithinRel(6.0, 1e-12));
}

TEST_CASE("malformed STL reports the line") {
    try {
        parse_mesh("solid x\nfacet normal 0 0 1\nouter loop\nvertex 0 0\n");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.line() == 4);
    }
    CHECK_THROWS_AS(parse_mesh("solid x\n"), ParseError);
}

TEST_CASE("cube OBJ is watertight") {
    const auto mesh = parse_mesh(kCubeObj);
    CHECK(mesh.vertices.size() == 8);
    CHECK(mesh.faces.size() == 12);
    CHECK(is_watertight(mesh));
    CHECK_THAT(mesh_volume(mesh), WithinRel(1.0, 1e-12));
}

TEST_CASE("OBJ index errors carry the line number") {
    std::string text = kCubeObj;
    text += "f 1 2 9\n";
    try {
        parse_mesh(text);
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.line() == 22);
        CHECK_THAT(std::string(e.what()), ContainsSubstring("out of range"));
    }
    CHECK_THROWS_AS(parse_mesh("v 0 0 0\nv 1 0 0\nv 0 1 0\nv 1 1 0\nf 1 2 3 4\n"), ParseError);
    CHECK_THROWS_AS(parse_mesh("v 0 0 0\nv 1 0 0\nv 0 1 0\nf 0 1 2\n"), ParseError);
    CHECK_THROWS_AS(parse_mesh("v 0 0 zero\n"), ParseError);
    CHECK_THROWS_AS(parse_mesh("v 0 0 0\nl 1 2\n"), ParseError);
    CHECK_THROWS_AS(parse_mesh(""), ParseError);
}

TEST_CASE("OBJ negative and slashed indices") {
    const auto mesh = parse_mesh("v 0 0 0\nv 1 0 0\nv 0 1 0\nvn 0 0 1\nf -3//1 -2//1 -1//1\nf 1/1 2/1 3/1\n");
    REQUIRE(mesh.faces.size() == 2);
    CHECK(mesh.faces[0] == mesh.faces[1]);
    CHECK(mesh.faces[0] == std::array<std::size_t, 3>{0, 1, 2});
}

TEST_CASE("OBJ text round-trips exactly") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-10.0, 10.0);
    auto mesh = test::icosphere(0.37, 1);
    for (auto& v : mesh.vertices)
        for (auto& c : v) c += u(rng) * 1e-3;
    const auto again = parse_mesh(to_obj_text(mesh));
    CHECK(again.vertices == mesh.vertices);
    CHECK(again.faces == mesh.faces);
    CHECK(to_obj_text(again) == to_obj_text(mesh));
}

TEST_CASE("watertightness") {
    auto mesh = make_box_mesh({0, 0, 0}, {1, 1, 1});
    CHECK(is_watertight(mesh));
    mesh.faces.pop_back();
    CHECK_FALSE(is_watertight(mesh));
    CHECK_THROWS_AS(voxelize(mesh, 0.1), ValidationError);
    CHECK_FALSE(is_watertight(TriangleMesh{}));
}

TEST_CASE("voxelized unit cube tiles exactly") {
    const auto grid = voxelize(make_box_mesh({0, 0, 0}, {1, 1, 1}), 0.1);
    CHECK(grid.air_count() == 1000);
    CHECK(air_extent(grid) == CellIndex{10, 10, 10});
    CHECK(grid.nx() == 12);
    CHECK_THAT(grid.air_volume(), WithinRel(1.0, 1e-12));
}

TEST_CASE("voxelize rejects dx beyond the smallest extent") {
    const auto mesh = make_box_mesh({0, 0, 0}, {1, 1, 0.05});
    CHECK_THROWS_AS(voxelize(mesh, 0.1), ValidationError);
    CHECK_THROWS_AS(voxelize(mesh, 0.0), ValidationError);
}

TEST_CASE("voxelized sphere volume") {
    const double analytic = 4.0 / 3.0 * std::numbers::pi * 0.125;
    const auto sphere = test::icosphere(0.5, 5);
    REQUIRE(is_watertight(sphere));
    const auto grid = voxelize(sphere, 0.02);
    CHECK_THAT(grid.air_volume(), WithinRel(analytic, 0.02));
    CHECK(connected_air(grid, grid.air_bounds()->first).size() == grid.size());
}

TEST_CASE("voxel volume converges to the mesh volume") {
    // Off-grid center so cell centers do not line up with the pole vertices.
    const auto sphere = test::icosphere(0.5, 4, {0.013, -0.021, 0.007});
    const double exact = mesh_volume(sphere);
    const double coarse = std::abs(voxelize(sphere, 0.1).air_volume() - exact);
    const double fine = std::abs(voxelize(sphere, 0.025).air_volume() - exact);
    CHECK(fine < coarse);
}

TEST_CASE("voxelization is robust to faces through cell centers") {
    // Box faces at multiples of dx/2 put mesh edges and vertices exactly on
    // cell-center rays.
    const auto mesh = make_box_mesh({0.05, 0.05, 0.05}, {0.3, 0.4, 0.5});
    const auto grid = voxelize(mesh, 0.1);
    const auto ext = air_extent(grid);
    CHECK(grid.air_count() == ext[0] * ext[1] * ext[2]);
    CHECK(grid.air_count() == 3 * 4 * 5);
}

TEST_CASE("box_to_grid air regions") {
    const BoxRoom ch27 = make_box_room("27", 3.60, 2.60, 2.35);
    const auto grid = box_to_grid(ch27, 0.05);
    CHECK(air_extent(grid) == CellIndex{72, 52, 47});
    CHECK(grid.air_count() == 72u * 52u * 47u);
    CHECK(grid.nx() == 74);

    const auto cube = box_to_grid(make_box_room("u", 1, 1, 1), 0.5);
    CHECK(cube.air_count() == 8);
    CHECK(air_extent(cube) == CellIndex{2, 2, 2});
}

TEST_CASE("box_to_grid refuses non-integral dimensions") {
    const BoxRoom ch27 = make_box_room("27", 3.60, 2.60, 2.35);
    CHECK_THROWS_WITH(box_to_grid(ch27, 0.07), ContainsSubstring("x"));
    const BoxRoom odd = make_box_room("o", 1.0, 1.0, 1.03);
    CHECK_THROWS_WITH(box_to_grid(odd, 0.1), ContainsSubstring("z"));
}

TEST_CASE("box_to_grid matches the voxelized box mesh") {
    for (const auto& dims : {Vec3{3.60, 2.60, 2.35}, Vec3{1.0, 0.5, 0.7}}) {
        const BoxRoom room = make_box_room("b", dims[0], dims[1], dims[2]);
        const auto a = box_to_grid(room, 0.05);
        const auto b = voxelize(make_box_mesh({0, 0, 0}, dims), 0.05);
        REQUIRE(a.nx() == b.nx());
        REQUIRE(a.ny() == b.ny());
        REQUIRE(a.nz() == b.nz());
        CHECK(a.cells() == b.cells());
        CHECK_THAT(a.origin()[0], WithinAbs(b.origin()[0], 1e-12));
    }
}

TEST_CASE("connected_air follows face neighbors only") {
    OccupancyGrid grid(4, 4, 4, 1.0);
    grid.set_air({1, 1, 1}, true);
    grid.set_air({2, 1, 1}, true);
    grid.set_air({2, 2, 2}, true);  // diagonal neighbor only
    const auto reach = connected_air(grid, {1, 1, 1});
    CHECK(reach[grid.linear({2, 1, 1})] == 1);
    CHECK(reach[grid.linear({2, 2, 2})] == 0);
}

TEST_CASE("cell centers") {
    const auto grid = box_to_grid(make_box_room("u", 1, 1, 1), 0.5);
    const auto c = grid.cell_center({1, 1, 1});
    CHECK_THAT(c[0], WithinAbs(0.25, 1e-15));
    CHECK_FALSE(grid.is_air({0, 0, 0}));
    CHECK(grid.is_air({1, 1, 1}));
    CHECK_FALSE(grid.is_air({9, 9, 9}));
}
