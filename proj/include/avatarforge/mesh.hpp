/*
 * avatarforge - personalized, animatable 3-D human reconstruction for
 * virtual try-on.
 *
 * File: include/avatarforge/mesh.hpp
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
#pragma once

#include <Eigen/Core>

#include <array>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace avatarforge {

using Vec3 = Eigen::Vector3d;
using Vec2 = Eigen::Vector2d;
using Face = std::array<int, 3>;

/**
 * Indexed triangle mesh with optional per-vertex UVs and normals, plus
 * named vertex groups (the unit every cut/seam/symmetry selection works in).
 *
 * Units are model units (meters for the body assets). Faces are
 * counter-clockwise when viewed from outside.
 */
struct Mesh {
    std::vector<Vec3> vertices;
    std::vector<Face> faces;
    std::vector<Vec2> uvs;      // empty, or one per vertex
    std::vector<Vec3> normals;  // empty, or one per vertex (unit length)
    std::map<std::string, std::vector<int>> groups;  // sorted, unique indices

    bool has_uvs() const { return !uvs.empty(); }
    bool has_normals() const { return !normals.empty(); }
    int vertex_count() const { return static_cast<int>(vertices.size()); }
    int face_count() const { return static_cast<int>(faces.size()); }

    Vec3 centroid() const;
};

struct MeshError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// An edge shared by more than two faces (or inconsistently oriented).
struct NonManifoldEdgeError : MeshError {
    NonManifoldEdgeError(int a, int b);
    int v0, v1;
};

/// Throws MeshError if any Mesh invariant is violated.
void validate(const Mesh& mesh);

/**
 * Boundary loops as ordered vertex cycles. Each consecutive pair of a cycle
 * is an edge bordering exactly one face, traversed in that face's winding
 * direction, so the surface stays on a fixed side of the loop.
 *
 * Throws NonManifoldEdgeError if an edge borders more than two faces.
 * Empty result iff the mesh is closed.
 */
std::vector<std::vector<int>> boundary_loops(const Mesh& mesh);

/// True iff the mesh is edge-manifold and has no boundary edges.
bool is_watertight(const Mesh& mesh);

struct DeleteGroupResult {
    Mesh mesh;
    std::vector<int> remap;  // remap[old index] = new index, or -1 if deleted
};

/**
 * Removes every vertex of the named group and every face touching one.
 * Surviving vertices keep their relative order; all other groups (and UVs,
 * normals) are remapped. Throws MeshError on an unknown group name.
 */
DeleteGroupResult delete_vertex_group(const Mesh& mesh, const std::string& group);

/**
 * Area-weighted per-vertex normals (cross-product sum of incident faces,
 * normalized). Isolated vertices get the zero vector.
 */
std::vector<Vec3> vertex_normals(const Mesh& mesh);

}  // namespace avatarforge
