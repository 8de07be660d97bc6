/*
 * avatarforge - personalized, animatable 3-D human reconstruction for
 * virtual try-on.
 *
 * File: include/avatarforge/synthetic.hpp
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
#include "avatarforge/garment.hpp"
#include "avatarforge/mesh.hpp"

namespace avatarforge::synthetic {

/**
 * Deterministic synthetic head fixture: a closed, mirror-symmetric surface
 * whose sagittal outline carries four designed feature clusters. The
 * `sagittal_line` group holds the nose/nape ledges (dense, flat, near the
 * z-weight center; they drive the y rotation) and the crown/chin arm tips
 * (sparse, deep in the weight tails; they drive the z rotation); the
 * `z_profile` group is the exact-y=0 equator ring driving the x rotation.
 * The cluster placement conditions the alignment error functions so each
 * axis dominates its own error term. `head_cut` selects the lower stub for
 * stitching. Centered on its centroid.
 */
Mesh head(double scale = 1.0);

/**
 * Desk-scale parametric body: capsule torso with neck and head stub,
 * two shape directions ("height", "girth"), four joints
 * (pelvis/spine/neck/head), smooth banded skinning weights, seam groups
 * `neck_seam` / `neck_top_ring`, and the six fit landmarks.
 */
BodyModel body_model();

/// Open tube around the torso; anchors shoulder_l/r + hem, category top.
Garment shirt();

/// Looser, longer variant for the switching test.
Garment jacket();

/// Lat-long sphere, closed and outward-oriented.
Mesh sphere(const Vec3& center, double radius, int rings = 16, int segments = 24);

}  // namespace avatarforge::synthetic
