/*
 * avatarforge - personalized, animatable 3-D human reconstruction for
 * virtual try-on.
 *
 * File: include/avatarforge/stitcher.hpp
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

#include "avatarforge/body_model.hpp"
#include "avatarforge/mesh.hpp"

#include <filesystem>

namespace avatarforge {

struct StitchError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class Provenance { body, head, bridge };

/**
 * Body and head merged into one animatable mesh. The bridge introduces no
 * new vertices; its triangles connect the two rim rings, so `bridge`
 * provenance marks rim vertices referenced by bridge triangles on the head
 * side (the body rim keeps body provenance and its body weights).
 */
struct CombinedModel {
    Mesh mesh;
    std::vector<WeightRow> weights;       // over the body's joints
    std::vector<int> seam_band;           // rim rings plus one ring each side
    std::vector<double> seam_ramp;        // per seam_band entry: 0 body side, 1 head side
    std::vector<Provenance> provenance;   // per vertex
    int joint_count = 0;
    std::vector<int> parents;
    std::vector<Vec3> rest_joints;
    std::vector<std::string> joint_names;
};

/**
 * Triangulated annulus between two boundary loops given as ordered position
 * cycles. Exactly |a| + |b| triangles; indices 0..|a|-1 refer to loop_a and
 * |a|..|a|+|b|-1 to loop_b. Loops are matched by angular sweep in the plane
 * orthogonal to the centroid axis (shared reference direction) and zipped by
 * smaller accumulated angle. Triangle winding is chosen so the band glues
 * onto surfaces whose boundary cycles are loop_a and loop_b as given.
 *
 * Throws StitchError when the projected loops properly cross (the bridge
 * would self-intersect).
 */
std::vector<Face> bridge_loops(const std::vector<Vec3>& loop_a,
                               const std::vector<Vec3>& loop_b);

/**
 * Skinning rows for stitched-on vertices: ramp t=0 copies the nearest body
 * vertex's weights, t=1 is weight 1 on the head joint, in between a linear
 * blend of the two. Rows always sum to 1.
 */
std::vector<WeightRow> transfer_skin_weights(const std::vector<Vec3>& vertices,
                                             const std::vector<double>& ramp,
                                             const std::vector<Vec3>& body_vertices,
                                             const std::vector<WeightRow>& body_weights,
                                             int head_joint);

/**
 * Full combination: cut the head at `head_cut`, rotate (about the cut head's
 * centroid) and translate it, cut the body above `neck_seam`, bridge the two
 * rims, merge, and transfer skinning weights.
 */
CombinedModel stitch(const Mesh& body, const Mesh& head, const Vec3& rotation_deg,
                     const Vec3& translation, const BodyModel& model);

/// Cut + place helper shared by stitch and the translation-solving pipeline.
Mesh cut_and_place_head(const Mesh& head, const Vec3& rotation_deg, const Vec3& translation);

void save_combined(const CombinedModel& combined, const std::filesystem::path& obj_path,
                   const std::filesystem::path& weights_path);
CombinedModel load_combined(const std::filesystem::path& obj_path,
                            const std::filesystem::path& weights_path);

}  // namespace avatarforge
