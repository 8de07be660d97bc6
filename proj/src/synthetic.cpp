/*
 * avatarforge - personalized, animatable 3-D human reconstruction for
 * virtual try-on.
 *
 * File: src/synthetic.cpp
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
#include "avatarforge/synthetic.hpp"

#include <Eigen/Geometry>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace avatarforge::synthetic {

namespace {

constexpr double kPi = std::numbers::pi;

struct Row {
    double y;
    double center_z;
    double rad_z;      // cross-section half-depth
    double halfwidth;  // cross-section half-width in x
};

// Closed surface over a stack of elliptical cross-sections plus two pole
// vertices. Column 0 faces +z (front), column L/2 faces -z (back).
Mesh loft_rows(const std::vector<Row>& rows, int columns, const Vec3& bottom_pole,
               const Vec3& top_pole) {
    Mesh mesh;
    const int L = columns;
    const int R = static_cast<int>(rows.size());
    mesh.vertices.reserve(static_cast<std::size_t>(R) * L + 2);
    for (const Row& row : rows) {
        for (int j = 0; j < L; ++j) {
            const double phi = 2.0 * kPi * j / L;
            mesh.vertices.emplace_back(row.halfwidth * std::sin(phi), row.y,
                                       row.center_z + row.rad_z * std::cos(phi));
        }
    }
    const int bottom = static_cast<int>(mesh.vertices.size());
    mesh.vertices.push_back(bottom_pole);
    const int top = bottom + 1;
    mesh.vertices.push_back(top_pole);

    auto vid = [L](int r, int j) { return r * L + (j % L); };
    for (int r = 0; r + 1 < R; ++r) {
        for (int j = 0; j < L; ++j) {
            mesh.faces.push_back({vid(r, j), vid(r, j + 1), vid(r + 1, j + 1)});
            mesh.faces.push_back({vid(r, j), vid(r + 1, j + 1), vid(r + 1, j)});
        }
    }
    for (int j = 0; j < L; ++j) {
        mesh.faces.push_back({bottom, vid(0, j + 1), vid(0, j)});
        mesh.faces.push_back({top, vid(R - 1, j), vid(R - 1, j + 1)});
    }

    // Outward orientation via signed volume.
    double vol6 = 0;
    for (const Face& f : mesh.faces)
        vol6 += mesh.vertices[f[0]].dot(mesh.vertices[f[1]].cross(mesh.vertices[f[2]]));
    if (vol6 < 0)
        for (Face& f : mesh.faces) std::swap(f[1], f[2]);

    // Cylindrical UVs; poles pinch to v extremes.
    double ymin = bottom_pole.y(), ymax = top_pole.y();
    mesh.uvs.resize(mesh.vertices.size());
    for (std::size_t v = 0; v < mesh.vertices.size(); ++v) {
        double u = 0.0;
        if (v < static_cast<std::size_t>(bottom)) u = double(v % L) / L;
        mesh.uvs[v] = Vec2(u, (mesh.vertices[v].y() - ymin) / (ymax - ymin));
    }
    return mesh;
}

double smoothstep(double s) { return s * s * (3.0 - 2.0 * s); }

}  // namespace

Mesh head(double scale) {
    // Cluster geometry tuned against the alignment iteration; see the group
    // description in the header.
    constexpr int kLedgeRows = 120;   // both half-bands together
    constexpr int kArmRows = 16;
    constexpr int kTransitionRows = 14;
    constexpr int L = 64;

    std::vector<Row> upper;  // y > 0, bottom-up
    for (int k = kLedgeRows / 2; k < kLedgeRows; ++k) {
        const double t = 2.0 * k / (kLedgeRows - 1) - 1.0;  // (0, 1]
        upper.push_back({0.02 * t, 0.05 * t, 0.45, 0.30});
    }
    for (int k = 0; k < kTransitionRows; ++k) {
        const double s = smoothstep((k + 1.0) / (kTransitionRows + 1.0));
        upper.push_back({0.02 + s * (2.30 - 0.02), 0.05 + s * (-1.63 - 0.05),
                         0.45 + s * (0.08 - 0.45), 0.30 + s * (0.08 - 0.30)});
    }
    for (int k = 0; k < kArmRows; ++k) {
        const double t = 2.0 * k / (kArmRows - 1) - 1.0;
        upper.push_back({2.5 + 0.15 * t, -1.68 - 0.05 * t, 0.08, 0.08});
    }
    upper.push_back({2.70, -1.73, 0.055, 0.055});
    upper.push_back({2.76, -1.73, 0.035, 0.035});
    upper.push_back({2.80, -1.73, 0.015, 0.015});

    std::vector<Row> rows;
    for (auto it = upper.rbegin(); it != upper.rend(); ++it)
        rows.push_back({-it->y, -it->center_z, it->rad_z, it->halfwidth});
    rows.push_back({0.0, 0.0, 0.45, 0.30});  // equator ring
    rows.insert(rows.end(), upper.begin(), upper.end());

    Mesh mesh = loft_rows(rows, L, Vec3(0, -2.83, 1.73), Vec3(0, 2.83, -1.73));

    const int R = static_cast<int>(rows.size());
    const int equator = (R - 1) / 2;
    auto vid = [L](int r, int j) { return r * L + (j % L); };

    std::vector<int> sagittal, z_profile, head_cut;
    // Ledge rows sit within |y| <= 0.02 of the equator; both meridians.
    for (int r = 0; r < R; ++r) {
        if (std::abs(rows[r].y) <= 0.02 + 1e-12) {
            sagittal.push_back(vid(r, 0));
            sagittal.push_back(vid(r, L / 2));
        }
    }
    // Crown arm: front meridian; chin arm: back meridian (its point image).
    for (int r = 0; r < R; ++r) {
        if (rows[r].y >= 2.35 - 1e-9 && rows[r].y <= 2.65 + 1e-9)
            sagittal.push_back(vid(r, 0));
        if (rows[r].y <= -2.35 + 1e-9 && rows[r].y >= -2.65 - 1e-9)
            sagittal.push_back(vid(r, L / 2));
    }
    for (int j = 0; j < L; ++j) z_profile.push_back(vid(equator, j));
    for (int v = 0; v < mesh.vertex_count(); ++v)
        if (mesh.vertices[v].y() < -2.32) head_cut.push_back(v);

    std::sort(sagittal.begin(), sagittal.end());
    std::sort(z_profile.begin(), z_profile.end());
    mesh.groups["sagittal_line"] = std::move(sagittal);
    mesh.groups["z_profile"] = std::move(z_profile);
    mesh.groups["head_cut"] = std::move(head_cut);

    if (scale != 1.0)
        for (auto& v : mesh.vertices) v *= scale;
    return mesh;
}

BodyModel body_model() {
    constexpr int L = 48;
    const std::vector<Row> rows = {
        {-0.90, 0, 0.20, 0.20}, {-0.85, 0, 0.28, 0.28}, {-0.80, 0, 0.32, 0.32},
        {-0.60, 0, 0.31, 0.31}, {-0.40, 0, 0.30, 0.30}, {-0.15, 0, 0.28, 0.28},
        {0.10, 0, 0.33, 0.33},  {0.30, 0, 0.34, 0.34},  {0.45, 0, 0.30, 0.30},
        {0.52, 0, 0.22, 0.22},  {0.58, 0, 0.10, 0.10},  {0.62, 0, 0.09, 0.09},
        {0.66, 0, 0.09, 0.09},  {0.70, 0, 0.095, 0.095}, {0.76, 0, 0.11, 0.11},
        {0.84, 0, 0.10, 0.10},  {0.90, 0, 0.06, 0.06},
    };
    BodyModel model;
    model.template_mesh = loft_rows(rows, L, Vec3(0, -0.95, 0), Vec3(0, 0.94, 0));

    auto row_index = [&](double y) {
        for (std::size_t r = 0; r < rows.size(); ++r)
            if (std::abs(rows[r].y - y) < 1e-9) return static_cast<int>(r);
        throw BodyModelError("synthetic body: no row at requested height");
    };
    auto vid = [L](int r, int j) { return r * L + ((j % L) + L) % L; };

    const int hip = row_index(-0.80), spine_row = row_index(-0.15);
    const int chest = row_index(0.10), shoulder = row_index(0.45);
    const int pelvis_row = row_index(-0.85), neck_row = row_index(0.62);
    const int seam_row = row_index(0.66), stub_row = row_index(0.84);

    std::vector<int> neck_seam, neck_top;
    for (int j = 0; j < L; ++j) neck_seam.push_back(vid(seam_row, j));
    for (int v = 0; v < model.template_mesh.vertex_count(); ++v)
        if (model.template_mesh.vertices[v].y() > 0.66 + 1e-9) neck_top.push_back(v);
    model.template_mesh.groups["neck_seam"] = neck_seam;
    model.template_mesh.groups["neck_top_ring"] = neck_top;

    // Shape basis: "height" stretches along y, "girth" scales radially.
    const int nv = model.template_mesh.vertex_count();
    std::vector<Vec3> height(nv), girth(nv);
    for (int v = 0; v < nv; ++v) {
        const Vec3& p = model.template_mesh.vertices[v];
        height[v] = Vec3(0.0, 0.25 * (p.y() + 0.95) / 1.89, 0.0);
        girth[v] = Vec3(0.4 * p.x(), 0.0, 0.4 * p.z());
    }
    model.shape_basis = {height, girth};

    model.joint_count = 4;
    model.parents = {-1, 0, 1, 2};
    model.joint_names = {"pelvis", "spine", "neck", "head"};
    const int joint_rows[4] = {pelvis_row, spine_row, neck_row, stub_row};
    for (int j = 0; j < 4; ++j)
        for (int c = 0; c < L; ++c)
            model.regressor.push_back({j, vid(joint_rows[j], c), 1.0 / L});

    model.weights.resize(nv);
    for (int v = 0; v < nv; ++v) {
        const double y = model.template_mesh.vertices[v].y();
        WeightRow row;
        if (y <= -0.85) row = {{0, 1.0}};
        else if (y < -0.15) {
            const double t = (y + 0.85) / 0.70;
            row = {{0, 1.0 - t}, {1, t}};
        } else if (y < 0.62) {
            const double t = (y + 0.15) / 0.77;
            row = {{1, 1.0 - t}, {2, t}};
        } else if (y < 0.84) {
            const double t = (y - 0.62) / 0.22;
            row = {{2, 1.0 - t}, {3, t}};
        } else {
            row = {{3, 1.0}};
        }
        model.weights[v] = std::move(row);
    }

    model.landmarks["shoulder_l"] = vid(shoulder, L / 4);
    model.landmarks["shoulder_r"] = vid(shoulder, 3 * L / 4);
    model.landmarks["chest_front"] = vid(chest, 0);
    model.landmarks["chest_back"] = vid(chest, L / 2);
    model.landmarks["hip_l"] = vid(hip, L / 4);
    model.landmarks["hip_r"] = vid(hip, 3 * L / 4);

    validate(model);
    return model;
}

namespace {

Garment tube_garment(double y_top, double y_bottom, double radius, int rows_n, int L) {
    Mesh mesh;
    for (int r = 0; r < rows_n; ++r) {
        const double y = y_top + (y_bottom - y_top) * r / (rows_n - 1);
        for (int j = 0; j < L; ++j) {
            const double phi = 2.0 * kPi * j / L;
            mesh.vertices.emplace_back(radius * std::sin(phi), y, radius * std::cos(phi));
        }
    }
    auto vid = [L](int r, int j) { return r * L + (j % L); };
    for (int r = 0; r + 1 < rows_n; ++r) {
        for (int j = 0; j < L; ++j) {
            mesh.faces.push_back({vid(r, j + 1), vid(r, j), vid(r + 1, j)});
            mesh.faces.push_back({vid(r, j + 1), vid(r + 1, j), vid(r + 1, j + 1)});
        }
    }
    mesh.uvs.resize(mesh.vertices.size());
    for (std::size_t v = 0; v < mesh.vertices.size(); ++v)
        mesh.uvs[v] = Vec2(double(v % L) / L,
                           (mesh.vertices[v].y() - y_bottom) / (y_top - y_bottom));

    Garment g;
    g.mesh = std::move(mesh);
    g.category = GarmentCategory::top;
    g.anchors["shoulder_l"] = vid(0, L / 4);
    g.anchors["shoulder_r"] = vid(0, 3 * L / 4);
    g.anchors["hem"] = vid(rows_n - 1, 0);
    // Natural extents over a 10% ease so the fitted garment keeps clearance.
    const double width = 2.0 * radius;
    const double height = y_top - y_bottom;
    g.rest_scale = Vec3(width / 1.10, height / 1.0, width / 1.10);
    g.check_anchors();
    return g;
}

}  // namespace

Garment shirt() { return tube_garment(0.48, -0.38, 0.42, 10, 32); }

Garment jacket() { return tube_garment(0.50, -0.55, 0.46, 12, 32); }

Mesh sphere(const Vec3& center, double radius, int rings, int segments) {
    std::vector<Row> rows;
    for (int i = 1; i < rings; ++i) {
        const double theta = kPi * i / rings;  // from +y pole
        rows.push_back({center.y() + radius * std::cos(theta), center.z(),
                        radius * std::sin(theta), radius * std::sin(theta)});
    }
    std::reverse(rows.begin(), rows.end());  // loft wants bottom-up
    Mesh m = loft_rows(rows, segments, center + Vec3(0, -radius, 0),
                       center + Vec3(0, radius, 0));
    for (auto& v : m.vertices) v.x() += center.x();
    return m;
}

}  // namespace avatarforge::synthetic
