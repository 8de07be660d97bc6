/*
 * avatarforge - personalized, animatable 3-D human reconstruction for
 * virtual try-on.
 *
 * File: include/avatarforge/body_model.hpp
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

#include <Eigen/Dense>

#include <filesystem>

namespace avatarforge {

struct BodyModelError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// One (joint, weight) pair of a vertex's sparse skinning row.
struct JointWeight {
    int joint;
    double weight;
};
using WeightRow = std::vector<JointWeight>;

/**
 * Parametric body: template mesh in rest pose, linear shape blendshape
 * basis, sparse vertex-to-joint regressor, kinematic tree and skinning
 * weights. Immutable after load; all operations on it are pure.
 *
 * Pose-corrective blendshapes are deliberately not part of the model;
 * fidelity to a full statistical body requires user-supplied model files
 * in the same JSON schema.
 */
struct BodyModel {
    Mesh template_mesh;
    // shape_basis[k][v] is the displacement of vertex v for coefficient k.
    std::vector<std::vector<Vec3>> shape_basis;
    struct RegressorEntry {
        int joint;
        int vertex;
        double weight;
    };
    std::vector<RegressorEntry> regressor;
    int joint_count = 0;
    std::vector<int> parents;               // parent per joint, root = -1
    std::vector<WeightRow> weights;         // per vertex, rows sum to 1
    std::vector<std::string> joint_names;   // optional, size joint_count
    std::map<std::string, int> landmarks;   // named vertex indices

    int shape_dim() const { return static_cast<int>(shape_basis.size()); }

    /// Index of the joint named "head". Throws if there is none.
    int head_joint() const;
};

struct ShapeParams {
    Eigen::VectorXd beta;
};

struct Pose {
    std::vector<Vec3> theta;  // per-joint axis-angle, radians
    Vec3 gamma = Vec3::Zero();
};

/// Throws BodyModelError if model dimensions/invariants are inconsistent.
void validate(const BodyModel& model);

BodyModel load_body_model(const std::filesystem::path& path);

/// template + sum_k beta_k * shape_basis_k; topology and groups unchanged.
Mesh apply_shape(const BodyModel& model, const ShapeParams& shape);

/// Joint positions of a shaped mesh: joint_regressor x vertices.
std::vector<Vec3> regress_joints(const BodyModel& model, const Mesh& shaped);

/**
 * Linear blend skinning. World transforms compose root-to-leaf from
 * axis-angle rotations about the shaped joint positions; each vertex is the
 * weight-blended image under its joints' transforms, plus gamma. The
 * identity pose returns the shaped mesh translated by gamma.
 */
Mesh apply_pose(const BodyModel& model, const Mesh& shaped, const Pose& pose);

/**
 * Skinning transforms (one affine matrix per joint) for a pose, exposed so
 * combined and garment meshes can be posed with arbitrary weight rows.
 */
std::vector<Eigen::Matrix4d> pose_transforms(const BodyModel& model,
                                             const std::vector<Vec3>& joints,
                                             const Pose& pose);

/// Same, for callers that carry only the kinematic tree (e.g. saved avatars).
std::vector<Eigen::Matrix4d> pose_transforms(const std::vector<int>& parents,
                                             const std::vector<Vec3>& joints,
                                             const Pose& pose);

/// Applies precomputed transforms to arbitrary vertices/weight rows.
std::vector<Vec3> skin_vertices(const std::vector<Vec3>& vertices,
                                const std::vector<WeightRow>& weights,
                                const std::vector<Eigen::Matrix4d>& transforms,
                                const Vec3& gamma);

}  // namespace avatarforge
