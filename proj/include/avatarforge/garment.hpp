/*
 * avatarforge - personalized, animatable 3-D human reconstruction for
 * virtual try-on.
 *
 * File: include/avatarforge/garment.hpp
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

#include <Eigen/Dense>

#include <filesystem>
#include <optional>

namespace avatarforge {

struct GarmentError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class GarmentCategory { top, bottom, dress };

GarmentCategory garment_category_from_string(const std::string& s);
std::string to_string(GarmentCategory c);

struct Garment {
    Mesh mesh;
    GarmentCategory category = GarmentCategory::top;
    std::map<std::string, int> anchors;  // named landmark vertex indices
    Vec3 rest_scale = Vec3::Ones();      // natural (width, height, depth)

    /// Throws GarmentError when the category's required anchors are missing.
    void check_anchors() const;
    Vec3 anchor_centroid() const;
};

/**
 * Affine map beta -> (scale, position). Row order: s_x, s_y, s_z, t_x, t_y,
 * t_z; columns are the K beta coefficients plus a constant term.
 */
struct FitMap {
    Eigen::MatrixXd coefficients;  // 6 x (K+1)
    double residual = 0.0;         // training RMS error

    int beta_dim() const { return static_cast<int>(coefficients.cols()) - 1; }
};

/**
 * Fits the beta -> (scale, position) map by least squares against oracle
 * targets measured on apply_shape(beta): shoulder width / torso height /
 * chest depth (component-wise over the garment's rest_scale) for the scale,
 * chest midpoint for the position. Requires the model to carry landmarks
 * shoulder_l/r, chest_front/back, hip_l/r.
 *
 * Throws GarmentError when the sample set is rank deficient.
 */
FitMap train_fit_map(const BodyModel& model, const Garment& garment,
                     const std::vector<Eigen::VectorXd>& samples);

std::pair<Vec3, Vec3> predict_fit_params(const FitMap& fit, const ShapeParams& beta);

/// Measured (scale, position) targets for one shaped body; the training oracle.
std::pair<Vec3, Vec3> fit_targets(const BodyModel& model, const Garment& garment,
                                  const Eigen::VectorXd& beta);

/**
 * Scales the garment about its anchor centroid (component-wise) and
 * translates so the anchor centroid lands at `position`.
 */
Mesh place_garment(const Garment& garment, const Vec3& scale, const Vec3& position);

struct PenetrationResult {
    Mesh mesh;
    int passes = 0;
    int moved_vertices = 0;
    bool clearance_met = true;  // all vertices at signed distance >= epsilon/2
};

/**
 * Pushes garment vertices with signed distance < epsilon out along the
 * nearest body triangle's normal to distance epsilon, repeating up to
 * max_passes. Vertices already at clearance never move.
 */
PenetrationResult resolve_penetration(const Mesh& garment, const Mesh& body, double epsilon,
                                      int max_passes = 10);

/// Garment manifest JSON loader (schema: mesh/category/anchors/rest_scale/fit_map).
Garment load_garment(const std::filesystem::path& manifest_path);

FitMap load_fit_map(const std::filesystem::path& path);
void save_fit_map(const FitMap& fit, const std::filesystem::path& path);

}  // namespace avatarforge
