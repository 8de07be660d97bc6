/*
 * avatarforge - personalized, animatable 3-D human reconstruction for
 * virtual try-on.
 *
 * File: include/avatarforge/texture.hpp
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

#include "avatarforge/image.hpp"
#include "avatarforge/mesh.hpp"

namespace avatarforge {

/**
 * Dominant skin color: k-means (k=4, k-means++ seeded with 42) over the
 * masked pixels' color histogram; returns the rounded centroid of the most
 * populous cluster. Clustering the histogram (unique colors weighted by
 * count) makes the result independent of pixel order and bitwise
 * reproducible.
 *
 * Throws ImageError when the mask selects no pixels.
 */
Rgb dominant_skin_color(const Image& head_tex);

/// size x size image filled with one color.
Image synthesize_body_texture(Rgb color, int size);

/// One texel of the seam blend: UV plus ramp t (0 = head side, 1 = body side).
struct UvBlendSample {
    Vec2 uv;
    double t;
};

/**
 * Blends the body texture into the head texture over the given UV band:
 * head texel <- lerp(head texel, body texel at the same UV, t). The body
 * texture is returned unchanged. UVs outside [0,1]^2 raise ImageError.
 */
std::pair<Image, Image> blend_seam(const Image& body_tex, const Image& head_tex,
                                   const std::vector<UvBlendSample>& uv_band);

}  // namespace avatarforge
