/*
 * avatarforge - personalized, animatable 3-D human reconstruction for
 * virtual try-on.
 *
 * File: src/alignment.cpp
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
#include "avatarforge/alignment.hpp"

#include <Eigen/Geometry>

#include <cmath>
#include <limits>
#include <numbers>

namespace avatarforge {

namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;
constexpr double kStepFactorMin = 1e-6;
constexpr double kStepFactorMax = 1e-1;
constexpr double kStepFactorRecovery = 1.5;

double weight(double z, double center, double sigma, WeightForm form) {
    const double u = (z - center) / sigma;
    return form == WeightForm::gaussian ? std::exp(-u * u) : std::exp(u * u);
}

double clamp_magnitude(double c) {
    const double m = std::clamp(std::abs(c), kStepFactorMin, kStepFactorMax);
    return c < 0.0 ? -m : m;
}

// update_step_factor plus magnitude recovery on non-increase. The plain rule
// can only shrink |c|; coupled y/z iterations trigger enough spurious
// halvings to freeze an axis mid-run, so improvement earns the speed back.
double scheduled_step_factor(double c, double e_prev, double e_curr) {
    double next = update_step_factor(c, e_prev, e_curr);
    if (e_curr <= e_prev) next *= kStepFactorRecovery;
    return clamp_magnitude(next);
}

struct SetStats {
    double mean_x = 0, mean_y = 0, mean_z = 0, sigma_z = 0;
};

SetStats set_stats(std::span<const Vec3> points) {
    SetStats s;
    for (const auto& p : points) {
        s.mean_x += p.x();
        s.mean_y += p.y();
        s.mean_z += p.z();
    }
    const double n = static_cast<double>(points.size());
    s.mean_x /= n;
    s.mean_y /= n;
    s.mean_z /= n;
    double var = 0;
    for (const auto& p : points) var += (p.z() - s.mean_z) * (p.z() - s.mean_z);
    s.sigma_z = std::sqrt(var / n);
    return s;
}

void gather(const std::vector<Vec3>& vertices, const std::vector<int>& idx,
            const Eigen::Matrix3d& rot, const Vec3& center, std::vector<Vec3>& out) {
    out.resize(idx.size());
    for (std::size_t i = 0; i < idx.size(); ++i)
        out[i] = rot * (vertices[idx[i]] - center) + center;
}

void check_sets(const Mesh& head, const SymmetrySets& sets) {
    const int n = head.vertex_count();
    if (sets.sagittal.size() < 2 || sets.z_profile.size() < 2)
        throw AlignmentError("symmetry sets need at least two vertices each");
    for (int i : sets.sagittal)
        if (i < 0 || i >= n) throw AlignmentError("sagittal index out of range");
    for (int i : sets.z_profile)
        if (i < 0 || i >= n) throw AlignmentError("z_profile index out of range");
}

}  // namespace

AlignmentNonConvergence::AlignmentNonConvergence(AlignmentState s)
    : AlignmentError("alignment did not converge after " + std::to_string(s.iterations) +
                     " iterations (E_x=" + std::to_string(s.errors[0]) +
                     ", E_y=" + std::to_string(s.errors[1]) +
                     ", E_z=" + std::to_string(s.errors[2]) + ")"),
      state(std::move(s)) {}

double error_y(std::span<const Vec3> points, double alpha, double sigma, WeightForm form) {
    if (points.size() < 2) throw AlignmentError("error_y needs at least two points");
    if (sigma == 0.0) throw DegenerateSpreadError();
    double mean_x = 0;
    for (const auto& p : points) mean_x += p.x();
    mean_x /= static_cast<double>(points.size());
    double e = 0;
    for (const auto& p : points)
        e += std::abs(p.x() - mean_x) * weight(p.z(), alpha, sigma, form);
    return e;
}

double error_z(std::span<const Vec3> points, double alpha, double sigma, WeightForm form) {
    if (points.size() < 2) throw AlignmentError("error_z needs at least two points");
    if (sigma == 0.0) throw DegenerateSpreadError();
    double mean_x = 0;
    for (const auto& p : points) mean_x += p.x();
    mean_x /= static_cast<double>(points.size());
    double e = 0;
    for (const auto& p : points)
        e += std::abs(p.x() - mean_x) * (1.0 - weight(p.z(), alpha, sigma, form));
    return e;
}

double error_x(std::span<const Vec3> points, double d, double z_mean, double sigma,
               WeightForm form) {
    if (points.size() < 2) throw AlignmentError("error_x needs at least two points");
    if (sigma == 0.0) throw DegenerateSpreadError();
    double e = 0;
    for (const auto& p : points)
        e += std::abs(p.y() - d) * weight(p.z(), z_mean, sigma, form);
    return e;
}

double step_angle(double prev_angle_deg, double c, double e) {
    return prev_angle_deg + 360.0 * c * e;
}

double update_step_factor(double c_prev, double e_prev, double e_curr) {
    double c = e_curr > e_prev ? -c_prev / 2.0 : c_prev;
    return clamp_magnitude(c);
}

Eigen::Matrix3d alignment_rotation_matrix(const Vec3& angles_deg) {
    using Eigen::AngleAxisd;
    return (AngleAxisd(angles_deg[0] * kDegToRad, Vec3::UnitX()) *
            AngleAxisd(angles_deg[2] * kDegToRad, Vec3::UnitZ()) *
            AngleAxisd(angles_deg[1] * kDegToRad, Vec3::UnitY()))
        .toRotationMatrix();
}

AlignmentState align_rotation(const Mesh& head, const SymmetrySets& sets,
                              const AlignmentConfig& config) {
    if (config.max_iters < 1 || config.tol <= 0.0)
        throw AlignmentError("invalid alignment config");
    check_sets(head, sets);

    const Vec3 center = head.centroid();
    AlignmentState st;
    st.errors = Vec3::Constant(std::numeric_limits<double>::infinity());
    st.step_factors = config.c_init;

    // d freezes at the profile set's mean y before any rotation.
    {
        std::vector<Vec3> prof;
        gather(head.vertices, sets.z_profile, Eigen::Matrix3d::Identity(), center, prof);
        st.d = set_stats(prof).mean_y;
    }

    double& ax = st.angles_deg[0];
    double& ay = st.angles_deg[1];
    double& az = st.angles_deg[2];
    double& cx = st.step_factors[0];
    double& cy = st.step_factors[1];
    double& cz = st.step_factors[2];
    cx = clamp_magnitude(cx);
    cy = clamp_magnitude(cy);
    cz = clamp_magnitude(cz);

    std::vector<Vec3> pts;
    bool have_prev = false;
    double ey_prev = 0, ez_prev = 0;

    // Phase one: y and z in parallel over the sagittal set.
    while (st.iterations < config.max_iters) {
        ++st.iterations;
        gather(head.vertices, sets.sagittal, alignment_rotation_matrix(st.angles_deg), center,
               pts);
        const SetStats stats = set_stats(pts);
        st.alpha = stats.mean_z;
        st.sigma = stats.sigma_z;
        if (st.sigma == 0.0) throw DegenerateSpreadError();
        const double ey = error_y(pts, st.alpha, st.sigma, config.weight_form);
        const double ez = error_z(pts, st.alpha, st.sigma, config.weight_form);
        st.errors[1] = ey;
        st.errors[2] = ez;
        if (ey < config.tol && ez < config.tol) break;
        if (have_prev) {
            cy = scheduled_step_factor(cy, ey_prev, ey);
            cz = scheduled_step_factor(cz, ez_prev, ez);
        }
        ay = step_angle(ay, cy, ey);
        az = step_angle(az, cz, ez);
        ey_prev = ey;
        ez_prev = ez;
        have_prev = true;
    }

    // Phase two: x over the profile set, d held fixed.
    bool have_prev_x = false;
    double ex_prev = 0;
    while (st.iterations < config.max_iters) {
        ++st.iterations;
        gather(head.vertices, sets.z_profile, alignment_rotation_matrix(st.angles_deg), center,
               pts);
        const SetStats stats = set_stats(pts);
        st.profile_z_mean = stats.mean_z;
        if (stats.sigma_z == 0.0) throw DegenerateSpreadError();
        const double ex =
            error_x(pts, st.d, st.profile_z_mean, stats.sigma_z, config.weight_form);
        st.errors[0] = ex;
        if (ex < config.tol) break;
        if (have_prev_x) cx = scheduled_step_factor(cx, ex_prev, ex);
        ax = step_angle(ax, cx, ex);
        ex_prev = ex;
        have_prev_x = true;
    }

    if (std::isinf(st.errors[0])) {
        // Budget ran out inside phase one; evaluate E_x once for the report.
        gather(head.vertices, sets.z_profile, alignment_rotation_matrix(st.angles_deg), center,
               pts);
        const SetStats stats = set_stats(pts);
        st.profile_z_mean = stats.mean_z;
        if (stats.sigma_z != 0.0)
            st.errors[0] = error_x(pts, st.d, st.profile_z_mean, stats.sigma_z, config.weight_form);
    }

    st.converged = st.errors[0] < config.tol && st.errors[1] < config.tol &&
                   st.errors[2] < config.tol;
    if (!st.converged) throw AlignmentNonConvergence(st);
    return st;
}

Vec3 align_translation(const Mesh& head, const Mesh& body,
                       const std::vector<int>& head_cut_loop,
                       const std::vector<int>& body_neck_loop, double vertical_gap) {
    if (head_cut_loop.empty() || body_neck_loop.empty())
        throw AlignmentError("alignment loops must be nonempty");
    Vec3 head_c = Vec3::Zero(), neck_c = Vec3::Zero();
    for (int i : head_cut_loop) {
        if (i < 0 || i >= head.vertex_count()) throw AlignmentError("head loop index invalid");
        head_c += head.vertices[i];
    }
    for (int i : body_neck_loop) {
        if (i < 0 || i >= body.vertex_count()) throw AlignmentError("body loop index invalid");
        neck_c += body.vertices[i];
    }
    head_c /= static_cast<double>(head_cut_loop.size());
    neck_c /= static_cast<double>(body_neck_loop.size());
    Vec3 t = neck_c - head_c;
    t.y() += vertical_gap;
    return t;
}

}  // namespace avatarforge
