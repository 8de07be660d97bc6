/*
 * avatarforge - personalized, animatable 3-D human reconstruction for
 * virtual try-on.
 *
 * File: src/texture.cpp
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
#include "avatarforge/texture.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>

namespace avatarforge {

namespace {

constexpr int kClusters = 4;
constexpr unsigned kSeed = 42;
constexpr int kMaxKmeansIters = 64;

struct WeightedColor {
    Eigen::Vector3d rgb;
    double count;
};

double dist2(const Eigen::Vector3d& a, const Eigen::Vector3d& b) {
    return (a - b).squaredNorm();
}

}  // namespace

Rgb dominant_skin_color(const Image& head_tex) {
    // Histogram of masked pixels, keyed by packed color so iteration order is
    // color order, not pixel order.
    std::map<std::uint32_t, double> histogram;
    for (int y = 0; y < head_tex.height; ++y) {
        for (int x = 0; x < head_tex.width; ++x) {
            if (!head_tex.masked(x, y)) continue;
            const Rgb c = head_tex.at(x, y);
            const std::uint32_t key = (static_cast<std::uint32_t>(c[0]) << 16) |
                                      (static_cast<std::uint32_t>(c[1]) << 8) | c[2];
            histogram[key] += 1.0;
        }
    }
    if (histogram.empty()) throw ImageError("skin mask selects no pixels");

    std::vector<WeightedColor> colors;
    colors.reserve(histogram.size());
    double total = 0;
    for (const auto& [key, count] : histogram) {
        colors.push_back({Eigen::Vector3d((key >> 16) & 0xff, (key >> 8) & 0xff, key & 0xff),
                          count});
        total += count;
    }

    // k-means++ over the weighted histogram, fixed seed.
    std::mt19937 rng(kSeed);
    const int k = std::min<int>(kClusters, static_cast<int>(colors.size()));
    std::vector<Eigen::Vector3d> centers;
    {
        std::vector<double> cdf(colors.size());
        double acc = 0;
        for (std::size_t i = 0; i < colors.size(); ++i) {
            acc += colors[i].count;
            cdf[i] = acc;
        }
        std::uniform_real_distribution<double> uni(0.0, acc);
        const double r = uni(rng);
        const auto it = std::lower_bound(cdf.begin(), cdf.end(), r);
        centers.push_back(colors[it - cdf.begin()].rgb);
    }
    std::vector<double> d2(colors.size());
    while (static_cast<int>(centers.size()) < k) {
        double acc = 0;
        for (std::size_t i = 0; i < colors.size(); ++i) {
            double best = dist2(colors[i].rgb, centers[0]);
            for (std::size_t c = 1; c < centers.size(); ++c)
                best = std::min(best, dist2(colors[i].rgb, centers[c]));
            acc += best * colors[i].count;
            d2[i] = acc;
        }
        if (acc <= 0.0) break;  // fewer distinct colors than clusters
        std::uniform_real_distribution<double> uni(0.0, acc);
        const double r = uni(rng);
        const auto it = std::lower_bound(d2.begin(), d2.end(), r);
        centers.push_back(colors[it - d2.begin()].rgb);
    }

    std::vector<int> assign(colors.size(), 0);
    for (int iter = 0; iter < kMaxKmeansIters; ++iter) {
        bool changed = false;
        for (std::size_t i = 0; i < colors.size(); ++i) {
            int best = 0;
            double bd = dist2(colors[i].rgb, centers[0]);
            for (std::size_t c = 1; c < centers.size(); ++c) {
                const double d = dist2(colors[i].rgb, centers[c]);
                if (d < bd) {
                    bd = d;
                    best = static_cast<int>(c);
                }
            }
            if (assign[i] != best) {
                assign[i] = best;
                changed = true;
            }
        }
        std::vector<Eigen::Vector3d> sums(centers.size(), Eigen::Vector3d::Zero());
        std::vector<double> counts(centers.size(), 0.0);
        for (std::size_t i = 0; i < colors.size(); ++i) {
            sums[assign[i]] += colors[i].count * colors[i].rgb;
            counts[assign[i]] += colors[i].count;
        }
        for (std::size_t c = 0; c < centers.size(); ++c)
            if (counts[c] > 0) centers[c] = sums[c] / counts[c];
        if (!changed && iter > 0) break;
    }

    std::vector<double> counts(centers.size(), 0.0);
    std::vector<Eigen::Vector3d> sums(centers.size(), Eigen::Vector3d::Zero());
    for (std::size_t i = 0; i < colors.size(); ++i) {
        counts[assign[i]] += colors[i].count;
        sums[assign[i]] += colors[i].count * colors[i].rgb;
    }
    int best = 0;
    for (std::size_t c = 1; c < centers.size(); ++c)
        if (counts[c] > counts[best]) best = static_cast<int>(c);
    const Eigen::Vector3d mean = sums[best] / counts[best];
    auto channel = [](double v) {
        return static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
    };
    return {channel(mean.x()), channel(mean.y()), channel(mean.z())};
}

Image synthesize_body_texture(Rgb color, int size) {
    if (size <= 0) throw ImageError("texture size must be positive");
    return Image(size, size, color);
}

namespace {

// UV convention: u right, v up (OBJ), so v flips into row index.
std::pair<int, int> uv_to_pixel(const Vec2& uv, int w, int h) {
    if (uv.x() < 0.0 || uv.x() > 1.0 || uv.y() < 0.0 || uv.y() > 1.0)
        throw ImageError("UV outside [0,1]^2");
    const int x = std::min(static_cast<int>(uv.x() * w), w - 1);
    const int y = std::min(static_cast<int>((1.0 - uv.y()) * h), h - 1);
    return {x, y};
}

}  // namespace

std::pair<Image, Image> blend_seam(const Image& body_tex, const Image& head_tex,
                                   const std::vector<UvBlendSample>& uv_band) {
    Image head_out = head_tex;
    for (const auto& sample : uv_band) {
        const auto [hx, hy] = uv_to_pixel(sample.uv, head_tex.width, head_tex.height);
        const auto [bx, by] = uv_to_pixel(sample.uv, body_tex.width, body_tex.height);
        const Rgb h = head_tex.at(hx, hy);
        const Rgb b = body_tex.at(bx, by);
        const double t = std::clamp(sample.t, 0.0, 1.0);
        Rgb mixed;
        for (int c = 0; c < 3; ++c)
            mixed[c] = static_cast<std::uint8_t>(
                std::clamp(std::lround(h[c] + (b[c] - h[c]) * t), 0L, 255L));
        head_out.set(hx, hy, mixed);
    }
    return {head_out, body_tex};
}

}  // namespace avatarforge
