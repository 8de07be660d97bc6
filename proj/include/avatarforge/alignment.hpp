/*
 * avatarforge - personalized, animatable 3-D human reconstruction for
 * virtual try-on.
 *
 * File: include/avatarforge/alignment.hpp
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

#include <span>

namespace avatarforge {

/**
 * Weighting of the alignment error terms. `gaussian` negates the exponent
 * so the weight is exp(-((z-alpha)/sigma)^2), bounded in (0,1]; `literal`
 * keeps the positive exponent, which grows without bound and can make the
 * complementary term negative. Gaussian is the default; literal exists to
 * reproduce the unbounded variant exactly.
 */
enum class WeightForm { gaussian, literal };

struct AlignmentError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// All symmetry-set vertices share one z coordinate; the weight is undefined.
struct DegenerateSpreadError : AlignmentError {
    DegenerateSpreadError() : AlignmentError("symmetry set has zero z spread") {}
};

/// Vertex selections driving the alignment: the sagittal symmetry line for
/// the y/z rotations and the front-to-back profile line for the x rotation.
struct SymmetrySets {
    std::vector<int> sagittal;
    std::vector<int> z_profile;
};

struct AlignmentConfig {
    int max_iters = 500;
    double tol = 1e-4;                       // model units
    Vec3 c_init{1e-3, 1e-3, 1e-3};           // step factor per axis (x, y, z)
    WeightForm weight_form = WeightForm::gaussian;
};

/**
 * Result (and carried state) of align_rotation. Angles are degrees; applying
 * Rx(x) * Rz(z) * Ry(y) about the head centroid to the input head realizes
 * the alignment.
 */
struct AlignmentState {
    Vec3 angles_deg = Vec3::Zero();          // (R_x, R_y, R_z)
    Vec3 errors{0, 0, 0};                    // final (E_x, E_y, E_z)
    Vec3 step_factors = Vec3::Zero();        // final (C_x, C_y, C_z)
    double alpha = 0.0;                      // last z mean of the sagittal set
    double sigma = 0.0;                      // last z spread of the sagittal set
    double d = 0.0;                          // fixed reference y level for E_x
    double profile_z_mean = 0.0;             // last z mean of the profile set
    int iterations = 0;
    bool converged = false;
};

struct AlignmentNonConvergence : AlignmentError {
    explicit AlignmentNonConvergence(AlignmentState s);
    AlignmentState state;
};

/// Sum of |x_i - mean(x)| weighted by w(z_i) centered at alpha.
double error_y(std::span<const Vec3> points, double alpha, double sigma, WeightForm form);

/// Sum of |x_i - mean(x)| weighted by 1 - w(z_i).
double error_z(std::span<const Vec3> points, double alpha, double sigma, WeightForm form);

/// Sum of |y_i - d| weighted by w(z_i) centered at z_mean.
double error_x(std::span<const Vec3> points, double d, double z_mean, double sigma,
               WeightForm form);

/// prev_angle + 360 * c * e, degrees. Exactly linear in e.
double step_angle(double prev_angle_deg, double c, double e);

/**
 * Step-factor adaptation: reverse direction and halve on error increase,
 * keep course otherwise; magnitude clamped to [1e-6, 1e-1].
 */
double update_step_factor(double c_prev, double e_prev, double e_curr);

/**
 * Iterative rotation recovery. The y and z angles update in parallel from
 * E_y/E_z over the sagittal set (recomputing alpha and sigma from current
 * positions each iteration), then the x angle updates from E_x over the
 * profile set; d is frozen at the profile set's initial mean y. Rotations
 * are about the mesh centroid.
 *
 * The per-iteration step factors follow update_step_factor, with the
 * magnitude additionally recovering by 1.5x on every non-increase (same
 * clamp). Without the recovery the factor can only decay, and cross-axis
 * coupling starves it before the last mile; see the unit tests for the
 * measured behavior.
 *
 * Throws AlignmentNonConvergence (carrying the full state) if any error is
 * still >= tol when the iteration budget runs out.
 */
AlignmentState align_rotation(const Mesh& head, const SymmetrySets& sets,
                              const AlignmentConfig& config);

/**
 * Translation taking the cut head onto the neck: centroid(body neck loop) -
 * centroid(head cut loop), plus `vertical_gap` along +y.
 */
Vec3 align_translation(const Mesh& head, const Mesh& body,
                       const std::vector<int>& head_cut_loop,
                       const std::vector<int>& body_neck_loop,
                       double vertical_gap = 0.0);

/// Rotation matrix Rx(x) * Rz(z) * Ry(y) from degrees, the composition
/// align_rotation reports its angles in.
Eigen::Matrix3d alignment_rotation_matrix(const Vec3& angles_deg);

}  // namespace avatarforge
