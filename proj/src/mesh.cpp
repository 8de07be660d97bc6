/*
 * avatarforge - personalized, animatable 3-D human reconstruction for
 * virtual try-on.
 *
 * File: src/mesh.cpp
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
#include "avatarforge/mesh.hpp"

#include <Eigen/Geometry>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <unordered_map>
#include <unordered_set>

namespace avatarforge {

namespace {

// Packs a directed edge into one key. Vertex counts here stay far below 2^32.
inline std::uint64_t edge_key(int a, int b) {
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 32) |
           static_cast<std::uint32_t>(b);
}

}  // namespace

Vec3 Mesh::centroid() const {
    Vec3 c = Vec3::Zero();
    if (vertices.empty()) return c;
    for (const auto& v : vertices) c += v;
    return c / static_cast<double>(vertices.size());
}

NonManifoldEdgeError::NonManifoldEdgeError(int a, int b)
    : MeshError("non-manifold edge (" + std::to_string(a) + ", " + std::to_string(b) + ")"),
      v0(a), v1(b) {}

void validate(const Mesh& mesh) {
    const int n = mesh.vertex_count();
    for (std::size_t f = 0; f < mesh.faces.size(); ++f) {
        const Face& face = mesh.faces[f];
        for (int i : face) {
            if (i < 0 || i >= n)
                throw MeshError("face " + std::to_string(f) + " references vertex " +
                                std::to_string(i) + " out of range");
        }
        if (face[0] == face[1] || face[1] == face[2] || face[0] == face[2])
            throw MeshError("face " + std::to_string(f) + " is degenerate");
    }
    if (!mesh.uvs.empty() && mesh.uvs.size() != mesh.vertices.size())
        throw MeshError("uv count does not match vertex count");
    if (!mesh.normals.empty()) {
        if (mesh.normals.size() != mesh.vertices.size())
            throw MeshError("normal count does not match vertex count");
        for (const auto& nrm : mesh.normals) {
            if (std::abs(nrm.norm() - 1.0) > 1e-6)
                throw MeshError("normal is not unit length");
        }
    }
    for (const auto& [name, indices] : mesh.groups) {
        for (int i : indices) {
            if (i < 0 || i >= n)
                throw MeshError("group '" + name + "' references vertex " +
                                std::to_string(i) + " out of range");
        }
    }
}

std::vector<std::vector<int>> boundary_loops(const Mesh& mesh) {
    // Count undirected edge usage and remember directed edges.
    std::unordered_map<std::uint64_t, int> undirected;
    std::unordered_set<std::uint64_t> directed;
    undirected.reserve(mesh.faces.size() * 3);
    directed.reserve(mesh.faces.size() * 3);
    for (const Face& f : mesh.faces) {
        for (int e = 0; e < 3; ++e) {
            const int a = f[e], b = f[(e + 1) % 3];
            directed.insert(edge_key(a, b));
            auto& cnt = undirected[edge_key(std::min(a, b), std::max(a, b))];
            if (++cnt > 2) throw NonManifoldEdgeError(std::min(a, b), std::max(a, b));
        }
    }

    // A boundary directed edge is one whose reverse is absent. Walking these
    // edges in face-winding order keeps the surface on a fixed side.
    std::map<int, std::vector<int>> outgoing;  // ordered for determinism
    for (const Face& f : mesh.faces) {
        for (int e = 0; e < 3; ++e) {
            const int a = f[e], b = f[(e + 1) % 3];
            if (!directed.count(edge_key(b, a))) outgoing[a].push_back(b);
        }
    }
    for (auto& [v, targets] : outgoing) std::sort(targets.begin(), targets.end());

    std::vector<std::vector<int>> loops;
    std::unordered_set<std::uint64_t> used;
    for (auto& [start, targets0] : outgoing) {
        for (int first : targets0) {
            if (used.count(edge_key(start, first))) continue;
            std::vector<int> loop;
            int cur = start, nxt = first;
            while (true) {
                used.insert(edge_key(cur, nxt));
                loop.push_back(cur);
                cur = nxt;
                auto it = outgoing.find(cur);
                if (it == outgoing.end())
                    throw MeshError("boundary walk ended at vertex " + std::to_string(cur));
                nxt = -1;
                for (int cand : it->second) {
                    if (!used.count(edge_key(cur, cand))) { nxt = cand; break; }
                }
                if (cur == start && nxt == -1) break;
                if (nxt == -1) {
                    if (cur == start) break;
                    throw MeshError("open boundary chain at vertex " + std::to_string(cur));
                }
                if (cur == start && loop.size() > 1) break;
            }
            loops.push_back(std::move(loop));
        }
    }
    return loops;
}

bool is_watertight(const Mesh& mesh) {
    try {
        return boundary_loops(mesh).empty() && !mesh.faces.empty();
    } catch (const NonManifoldEdgeError&) {
        return false;
    }
}

DeleteGroupResult delete_vertex_group(const Mesh& mesh, const std::string& group) {
    auto it = mesh.groups.find(group);
    if (it == mesh.groups.end()) throw MeshError("unknown vertex group '" + group + "'");

    const int n = mesh.vertex_count();
    std::vector<char> deleted(n, 0);
    for (int i : it->second) {
        if (i < 0 || i >= n) throw MeshError("group index out of range");
        deleted[i] = 1;
    }

    DeleteGroupResult out;
    out.remap.assign(n, -1);
    out.mesh.vertices.reserve(n);
    for (int i = 0; i < n; ++i) {
        if (deleted[i]) continue;
        out.remap[i] = static_cast<int>(out.mesh.vertices.size());
        out.mesh.vertices.push_back(mesh.vertices[i]);
        if (mesh.has_uvs()) out.mesh.uvs.push_back(mesh.uvs[i]);
        if (mesh.has_normals()) out.mesh.normals.push_back(mesh.normals[i]);
    }
    for (const Face& f : mesh.faces) {
        if (deleted[f[0]] || deleted[f[1]] || deleted[f[2]]) continue;
        out.mesh.faces.push_back({out.remap[f[0]], out.remap[f[1]], out.remap[f[2]]});
    }
    for (const auto& [name, indices] : mesh.groups) {
        if (name == group) continue;
        std::vector<int> kept;
        for (int i : indices)
            if (out.remap[i] >= 0) kept.push_back(out.remap[i]);
        out.mesh.groups[name] = std::move(kept);
    }
    return out;
}

std::vector<Vec3> vertex_normals(const Mesh& mesh) {
    std::vector<Vec3> normals(mesh.vertices.size(), Vec3::Zero());
    for (const Face& f : mesh.faces) {
        const Vec3& a = mesh.vertices[f[0]];
        const Vec3& b = mesh.vertices[f[1]];
        const Vec3& c = mesh.vertices[f[2]];
        // Cross product magnitude is twice the face area, so summing raw
        // cross products gives the area weighting for free.
        const Vec3 fn = (b - a).cross(c - a);
        normals[f[0]] += fn;
        normals[f[1]] += fn;
        normals[f[2]] += fn;
    }
    for (auto& nrm : normals) {
        const double len = nrm.norm();
        if (len > 0.0) nrm /= len;
    }
    return normals;
}

}  // namespace avatarforge
