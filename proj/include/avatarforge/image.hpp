/*
 * avatarforge - personalized, animatable 3-D human reconstruction for
 * virtual try-on.
 *
 * File: include/avatarforge/image.hpp
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

#include <array>
#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <vector>

namespace avatarforge {

using Rgb = std::array<std::uint8_t, 3>;

struct ImageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Row-major 8-bit RGB image with an optional binary mask (1 = selected).
struct Image {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> pixels;  // 3 bytes per pixel, row-major, top row first
    std::vector<std::uint8_t> mask;    // empty, or one byte per pixel

    Image() = default;
    Image(int w, int h, Rgb fill = {0, 0, 0});

    std::size_t pixel_count() const { return static_cast<std::size_t>(width) * height; }
    Rgb at(int x, int y) const;
    void set(int x, int y, Rgb c);
    bool masked(int x, int y) const;  // true when no mask or mask = 1
};

Image load_png(const std::filesystem::path& path);
void save_png(const Image& image, const std::filesystem::path& path);

}  // namespace avatarforge
