/*
 * avatarforge - personalized, animatable 3-D human reconstruction for
 * virtual try-on.
 *
 * File: include/avatarforge/obj_io.hpp
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

#include "avatarforge/mesh.hpp"

#include <filesystem>

namespace avatarforge {

struct ObjParseError : MeshError {
    ObjParseError(int line_number, const std::string& what_arg)
        : MeshError("line " + std::to_string(line_number) + ": " + what_arg),
          line(line_number) {}
    int line;
};

struct ObjLoadStats {
    int degenerate_dropped = 0;
    int quads_triangulated = 0;
};

/**
 * Loads an ASCII Wavefront OBJ (v/vt/vn/f/g statements; f entries in `v`,
 * `v/vt`, `v/vt/vn` or `v//vn` form). Quads and larger polygons are
 * fan-triangulated. Degenerate faces are dropped, not rejected; the count
 * lands in `stats`.
 *
 * OBJ groups are face-scoped, so `g` statements are folded into vertex
 * groups (the vertices of each tagged face). If `<stem>.groups.json` sits
 * next to the file it is authoritative and replaces those groups.
 */
Mesh load_mesh(const std::filesystem::path& path, ObjLoadStats* stats = nullptr);

/**
 * Writes the mesh as ASCII OBJ plus, when the mesh has groups, the
 * `<stem>.groups.json` sidecar. Round-trips topology exactly and geometry
 * to within 1e-6.
 */
void save_mesh(const Mesh& mesh, const std::filesystem::path& path);

/// Sidecar path for a mesh path: replaces the extension with ".groups.json".
std::filesystem::path groups_sidecar_path(const std::filesystem::path& mesh_path);

}  // namespace avatarforge
