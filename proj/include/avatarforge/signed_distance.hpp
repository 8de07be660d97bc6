/*
 * avatarforge - personalized, animatable 3-D human reconstruction for
 * virtual try-on.
 *
 * File: include/avatarforge/signed_distance.hpp
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

namespace avatarforge {

/// Closest point on triangle abc to p (Ericson, Real-Time Collision Detection).
Vec3 closest_point_on_triangle(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c);

struct SurfaceHit {
    double signed_distance;  // negative inside
    Vec3 point;              // nearest point on the surface
    Vec3 normal;             // outward normal of the nearest triangle
    int triangle;            // face index of the nearest triangle
};

/**
 * Nearest surface point over all mesh triangles; the sign comes from the
 * nearest triangle's face normal. Distance ties keep the smaller face index.
 */
SurfaceHit signed_distance(const Vec3& p, const Mesh& mesh);

}  // namespace avatarforge
