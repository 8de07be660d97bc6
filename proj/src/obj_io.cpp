/*
 * avatarforge - personalized, animatable 3-D human reconstruction for
 * virtual try-on.
 *
 * File: src/obj_io.cpp
 *
 * Copyright 2026 The avatarforge authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#include "avatarforge/obj_io.hpp"

#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace avatarforge {

namespace {

using nlohmann::json;

std::vector<std::string> split_ws(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream iss(s);
    std::string tok;
    while (iss >> tok) out.push_back(tok);
    return out;
}

double parse_double(const std::string& s, int line) {
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size())
        throw ObjParseError(line, "bad number '" + s + "'");
    return v;
}

long parse_long(std::string_view s, int line) {
    long v = 0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size())
        throw ObjParseError(line, "bad index '" + std::string(s) + "'");
    return v;
}

struct Corner {
    int v = -1;
    int vt = -1;
};

Corner parse_corner(const std::string& tok, int line, std::size_t nv, std::size_t nvt) {
    Corner c;
    const auto first = tok.find('/');
    const std::string_view sv(tok);
    const std::string_view vpart = sv.substr(0, first);
    long vi = parse_long(vpart, line);
    if (vi < 0) vi += static_cast<long>(nv) + 1;  // relative indexing
    if (vi < 1 || vi > static_cast<long>(nv))
        throw ObjParseError(line, "vertex index " + std::string(vpart) + " out of range");
    c.v = static_cast<int>(vi - 1);
    if (first == std::string::npos) return c;
    const auto second = tok.find('/', first + 1);
    const std::string_view tpart =
        sv.substr(first + 1, (second == std::string::npos ? tok.size() : second) - first - 1);
    if (!tpart.empty()) {
        long ti = parse_long(tpart, line);
        if (ti < 0) ti += static_cast<long>(nvt) + 1;
        if (ti < 1 || ti > static_cast<long>(nvt))
            throw ObjParseError(line, "texture index out of range");
        c.vt = static_cast<int>(ti - 1);
    }
    // Normal indices are accepted and ignored; normals are recomputed on
    // demand from topology.
    return c;
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

}  // namespace

std::filesystem::path groups_sidecar_path(const std::filesystem::path& mesh_path) {
    std::filesystem::path p = mesh_path;
    p.replace_extension(".groups.json");
    return p;
}

Mesh load_mesh(const std::filesystem::path& path, ObjLoadStats* stats) {
    std::ifstream in(path);
    if (!in) throw MeshError("cannot open mesh file: " + path.string());

    Mesh mesh;
    std::vector<Vec2> vt_pool;
    std::vector<std::pair<int, int>> uv_assignments;  // (vertex, vt index)
    std::vector<std::string> active_groups;
    ObjLoadStats local{};

    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const auto toks = split_ws(line);
        if (toks.empty() || toks[0][0] == '#') continue;
        const std::string& key = toks[0];
        if (key == "v") {
            if (toks.size() < 4) throw ObjParseError(lineno, "vertex needs 3 coordinates");
            mesh.vertices.emplace_back(parse_double(toks[1], lineno),
                                       parse_double(toks[2], lineno),
                                       parse_double(toks[3], lineno));
        } else if (key == "vt") {
            if (toks.size() < 3) throw ObjParseError(lineno, "vt needs 2 coordinates");
            vt_pool.emplace_back(parse_double(toks[1], lineno), parse_double(toks[2], lineno));
        } else if (key == "vn") {
            // ignored, see parse_corner
        } else if (key == "g" || key == "o") {
            active_groups.assign(toks.begin() + 1, toks.end());
        } else if (key == "f") {
            if (toks.size() < 4) throw ObjParseError(lineno, "face needs at least 3 vertices");
            std::vector<Corner> corners;
            corners.reserve(toks.size() - 1);
            for (std::size_t i = 1; i < toks.size(); ++i)
                corners.push_back(
                    parse_corner(toks[i], lineno, mesh.vertices.size(), vt_pool.size()));
            if (corners.size() > 3) local.quads_triangulated += 1;
            for (std::size_t i = 1; i + 1 < corners.size(); ++i) {
                const Corner tri[3] = {corners[0], corners[i], corners[i + 1]};
                if (tri[0].v == tri[1].v || tri[1].v == tri[2].v || tri[0].v == tri[2].v) {
                    local.degenerate_dropped += 1;
                    continue;
                }
                mesh.faces.push_back({tri[0].v, tri[1].v, tri[2].v});
                for (const Corner& c : tri) {
                    if (c.vt >= 0) uv_assignments.emplace_back(c.v, c.vt);
                    for (const std::string& gname : active_groups) {
                        if (gname != "default") mesh.groups[gname].push_back(c.v);
                    }
                }
            }
        }
        // other statements (mtllib, usemtl, s, ...) are ignored
    }

    if (!uv_assignments.empty()) {
        mesh.uvs.assign(mesh.vertices.size(), Vec2::Zero());
        for (const auto& [v, t] : uv_assignments) mesh.uvs[v] = vt_pool[t];
    }
    for (auto& [name, idx] : mesh.groups) {
        std::sort(idx.begin(), idx.end());
        idx.erase(std::unique(idx.begin(), idx.end()), idx.end());
    }

    // The sidecar is vertex-scoped and authoritative over face-scoped tags.
    const auto sidecar = groups_sidecar_path(path);
    if (std::filesystem::exists(sidecar)) {
        std::ifstream gin(sidecar);
        json j;
        try {
            gin >> j;
        } catch (const json::exception& e) {
            throw MeshError("bad groups sidecar " + sidecar.string() + ": " + e.what());
        }
        mesh.groups.clear();
        for (const auto& [name, arr] : j.items()) {
            std::vector<int> idx;
            for (const auto& v : arr) {
                const int i = v.get<int>();
                if (i < 0 || i >= mesh.vertex_count())
                    throw MeshError("sidecar group '" + name + "' index out of range");
                idx.push_back(i);
            }
            std::sort(idx.begin(), idx.end());
            idx.erase(std::unique(idx.begin(), idx.end()), idx.end());
            mesh.groups[name] = std::move(idx);
        }
    }

    validate(mesh);
    if (stats) *stats = local;
    return mesh;
}

void save_mesh(const Mesh& mesh, const std::filesystem::path& path) {
    validate(mesh);
    std::ofstream out(path);
    if (!out) throw MeshError("cannot write mesh file: " + path.string());

    for (const auto& v : mesh.vertices)
        out << "v " << format_double(v.x()) << ' ' << format_double(v.y()) << ' '
            << format_double(v.z()) << '\n';
    if (mesh.has_uvs()) {
        for (const auto& t : mesh.uvs)
            out << "vt " << format_double(t.x()) << ' ' << format_double(t.y()) << '\n';
    }

    // Face-scoped group tags are a lossy projection of the vertex groups
    // (kept for external tools); the sidecar written below is authoritative.
    std::vector<std::set<int>> group_sets;
    std::vector<std::string> group_names;
    for (const auto& [name, idx] : mesh.groups) {
        group_names.push_back(name);
        group_sets.emplace_back(idx.begin(), idx.end());
    }
    auto face_tag = [&](const Face& f) {
        std::string tag;
        for (std::size_t g = 0; g < group_sets.size(); ++g) {
            const auto& s = group_sets[g];
            if (s.count(f[0]) && s.count(f[1]) && s.count(f[2]))
                tag += (tag.empty() ? "" : " ") + group_names[g];
        }
        return tag.empty() ? std::string("default") : tag;
    };

    std::string current_tag;
    for (const Face& f : mesh.faces) {
        if (!mesh.groups.empty()) {
            const std::string tag = face_tag(f);
            if (tag != current_tag) {
                out << "g " << tag << '\n';
                current_tag = tag;
            }
        }
        if (mesh.has_uvs())
            out << "f " << f[0] + 1 << '/' << f[0] + 1 << ' ' << f[1] + 1 << '/' << f[1] + 1
                << ' ' << f[2] + 1 << '/' << f[2] + 1 << '\n';
        else
            out << "f " << f[0] + 1 << ' ' << f[1] + 1 << ' ' << f[2] + 1 << '\n';
    }
    if (!out) throw MeshError("I/O failure writing " + path.string());
    out.close();

    if (!mesh.groups.empty()) {
        nlohmann::json j = nlohmann::json::object();
        for (const auto& [name, idx] : mesh.groups) j[name] = idx;
        std::ofstream gout(groups_sidecar_path(path));
        if (!gout) throw MeshError("cannot write groups sidecar for " + path.string());
        gout << j.dump(2) << '\n';
    }
}

}  // namespace avatarforge
