#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "roomtune/error.hpp"
#include "roomtune/geometry.hpp"

namespace roomtune {

namespace {

struct Line {
    std::size_t number;
    std::vector<std::string_view> tokens;
};

std::vector<Line> tokenize(std::string_view text) {
    std::vector<Line> lines;
    std::size_t number = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t end = text.find('\n', pos);
        if (end == std::string_view::npos) end = text.size();
        std::string_view raw = text.substr(pos, end - pos);
        ++number;
        if (auto hash = raw.find('#'); hash != std::string_view::npos) raw = raw.substr(0, hash);
        Line line{number, {}};
        std::size_t i = 0;
        while (i < raw.size()) {
            while (i < raw.size() && std::isspace(static_cast<unsigned char>(raw[i]))) ++i;
            std::size_t j = i;
            while (j < raw.size() && !std::isspace(static_cast<unsigned char>(raw[j]))) ++j;
            if (j > i) line.tokens.push_back(raw.substr(i, j - i));
            i = j;
        }
        if (!line.tokens.empty()) lines.push_back(std::move(line));
        pos = end + 1;
    }
    return lines;
}

double to_double(std::string_view token, std::size_t line) {
    double value = 0.0;
    const char* first = token.data();
    if (!token.empty() && token.front() == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, token.data() + token.size(), value);
    if (ec != std::errc() || ptr != token.data() + token.size() || !std::isfinite(value))
        throw ParseError("invalid number '" + std::string(token) + "'", line);
    return value;
}

long to_long(std::string_view token, std::size_t line) {
    long value = 0;
    auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
    if (ec != std::errc() || ptr != token.data() + token.size())
        throw ParseError("invalid index '" + std::string(token) + "'", line);
    return value;
}

TriangleMesh parse_obj(const std::vector<Line>& lines) {
    TriangleMesh mesh;
    struct PendingFace {
        std::array<long, 3> idx;
        std::size_t vertex_count;
        std::size_t line;
    };
    std::vector<PendingFace> pending;
    for (const auto& line : lines) {
        const auto& t = line.tokens;
        if (t[0] == "v") {
            if (t.size() != 4) throw ParseError("vertex record needs exactly 3 coordinates", line.number);
            mesh.vertices.push_back({to_double(t[1], line.number), to_double(t[2], line.number),
                                     to_double(t[3], line.number)});
        } else if (t[0] == "f") {
            if (t.size() != 4) throw ParseError("only triangular faces are supported", line.number);
            PendingFace face{{}, mesh.vertices.size(), line.number};
            for (int c = 0; c < 3; ++c) {
                std::string_view tok = t[c + 1];
                tok = tok.substr(0, tok.find('/'));
                face.idx[c] = to_long(tok, line.number);
            }
            pending.push_back(face);
        } else if (t[0] == "vn" || t[0] == "vt" || t[0] == "o" || t[0] == "g" || t[0] == "s" || t[0] == "usemtl" ||
                   t[0] == "mtllib") {
            continue;
        } else {
            throw ParseError("unsupported OBJ record '" + std::string(t[0]) + "'", line.number);
        }
    }
    // Relative (negative) indices refer to vertices defined before the face.
    for (const auto& face : pending) {
        std::array<std::size_t, 3> tri{};
        for (int c = 0; c < 3; ++c) {
            long idx = face.idx[c];
            long resolved = idx > 0 ? idx - 1 : static_cast<long>(face.vertex_count) + idx;
            if (idx == 0 || resolved < 0 || resolved >= static_cast<long>(mesh.vertices.size())) {
                throw ParseError("face index " + std::to_string(idx) + " out of range (" +
                                     std::to_string(mesh.vertices.size()) + " vertices)",
                                 face.line);
            }
            tri[c] = static_cast<std::size_t>(resolved);
        }
        mesh.faces.push_back(tri);
    }
    return mesh;
}

TriangleMesh parse_stl(const std::vector<Line>& lines) {
    TriangleMesh mesh;
    std::map<Vec3, std::size_t> index_of;
    std::size_t i = 0;
    auto expect = [&](std::initializer_list<std::string_view> words, std::size_t extra) -> const Line& {
        if (i >= lines.size()) throw ParseError("unexpected end of STL input", lines.empty() ? 0 : lines.back().number);
        const Line& line = lines[i++];
        std::size_t w = 0;
        for (auto word : words) {
            if (w >= line.tokens.size() || line.tokens[w] != word)
                throw ParseError("expected '" + std::string(word) + "'", line.number);
            ++w;
        }
        if (line.tokens.size() != w + extra) throw ParseError("malformed STL record", line.number);
        return line;
    };

    if (lines.empty() || lines[0].tokens[0] != "solid") throw ParseError("STL must start with 'solid'", 1);
    ++i;
    while (true) {
        if (i >= lines.size()) throw ParseError("missing 'endsolid'", lines.back().number);
        if (lines[i].tokens[0] == "endsolid") break;
        const Line& facet = expect({"facet", "normal"}, 3);
        for (int c = 0; c < 3; ++c) to_double(facet.tokens[2 + c], facet.number);
        expect({"outer", "loop"}, 0);
        std::array<std::size_t, 3> tri{};
        for (int c = 0; c < 3; ++c) {
            const Line& v = expect({"vertex"}, 3);
            Vec3 p{to_double(v.tokens[1], v.number), to_double(v.tokens[2], v.number), to_double(v.tokens[3], v.number)};
            auto [it, inserted] = index_of.try_emplace(p, mesh.vertices.size());
            if (inserted) mesh.vertices.push_back(p);
            tri[c] = it->second;
        }
        expect({"endloop"}, 0);
        expect({"endfacet"}, 0);
        mesh.faces.push_back(tri);
    }
    if (i + 1 < lines.size()) throw ParseError("content after 'endsolid'", lines[i + 1].number);
    return mesh;
}

}  // namespace

TriangleMesh parse_mesh(std::string_view text) {
    const auto lines = tokenize(text);
    if (lines.empty()) throw ParseError("empty mesh input");
    if (lines[0].tokens[0] == "solid") return parse_stl(lines);
    return parse_obj(lines);
}

TriangleMesh read_mesh_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open mesh file '" + path + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    try {
        return parse_mesh(buffer.str());
    } catch (const ParseError& e) {
        throw ParseError(path + ": " + e.what());
    }
}

std::string to_obj_text(const TriangleMesh& mesh) {
    std::string out;
    char buf[32];
    for (const auto& v : mesh.vertices) {
        out += 'v';
        for (double c : v) {
            auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), c);
            out += ' ';
            out.append(buf, ptr);
        }
        out += '\n';
    }
    for (const auto& f : mesh.faces) {
        out += "f " + std::to_string(f[0] + 1) + ' ' + std::to_string(f[1] + 1) + ' ' + std::to_string(f[2] + 1) + '\n';
    }
    return out;
}

bool is_watertight(const TriangleMesh& mesh) {
    if (mesh.faces.empty()) return false;
    std::map<std::pair<std::size_t, std::size_t>, int> edges;
    for (const auto& f : mesh.faces) {
        for (int e = 0; e < 3; ++e) {
            std::size_t a = f[e], b = f[(e + 1) % 3];
            if (a == b) return false;
            if (a > b) std::swap(a, b);
            ++edges[{a, b}];
        }
    }
    for (const auto& [edge, count] : edges) {
        if (count != 2) return false;
    }
    return true;
}

double mesh_volume(const TriangleMesh& mesh) {
    double six_v = 0.0;
    for (const auto& f : mesh.faces) {
        const Vec3& a = mesh.vertices[f[0]];
        const Vec3& b = mesh.vertices[f[1]];
        const Vec3& c = mesh.vertices[f[2]];
        six_v += a[0] * (b[1] * c[2] - b[2] * c[1]) - a[1] * (b[0] * c[2] - b[2] * c[0]) +
                 a[2] * (b[0] * c[1] - b[1] * c[0]);
    }
    return six_v / 6.0;
}

TriangleMesh make_box_mesh(const Vec3& lo, const Vec3& size) {
    TriangleMesh mesh;
    for (int k = 0; k < 2; ++k)
        for (int j = 0; j < 2; ++j)
            for (int i = 0; i < 2; ++i)
                mesh.vertices.push_back({lo[0] + i * size[0], lo[1] + j * size[1], lo[2] + k * size[2]});
    // vertex id = i + 2j + 4k
    mesh.faces = {{0, 2, 1}, {1, 2, 3}, {4, 5, 6}, {5, 7, 6},   // z = lo, z = hi
                  {0, 1, 4}, {1, 5, 4}, {2, 6, 3}, {3, 6, 7},   // y = lo, y = hi
                  {0, 4, 2}, {2, 4, 6}, {1, 3, 5}, {3, 7, 5}};  // x = lo, x = hi
    return mesh;
}

}  // namespace roomtune
