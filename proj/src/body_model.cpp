/*
 * avatarforge - personalized, animatable 3-D human reconstruction for
 * virtual try-on.
 *
 * File: src/body_model.cpp
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
#include "avatarforge/body_model.hpp"

#include "avatarforge/obj_io.hpp"

#include <json.hpp>

#include <Eigen/Geometry>

#include <cmath>
#include <fstream>

namespace avatarforge {

namespace {

using nlohmann::json;

Eigen::Matrix3d axis_angle_to_matrix(const Vec3& aa) {
    const double angle = aa.norm();
    if (angle < 1e-12) return Eigen::Matrix3d::Identity();
    return Eigen::AngleAxisd(angle, aa / angle).toRotationMatrix();
}

}  // namespace

int BodyModel::head_joint() const {
    for (std::size_t j = 0; j < joint_names.size(); ++j)
        if (joint_names[j] == "head") return static_cast<int>(j);
    throw BodyModelError("body model has no joint named 'head'");
}

void validate(const BodyModel& model) {
    const int v = model.template_mesh.vertex_count();
    const int j = model.joint_count;
    if (j <= 0) throw BodyModelError("joint count must be positive");
    if (static_cast<int>(model.parents.size()) != j)
        throw BodyModelError("parents size does not match joint count");

    // Single rooted tree: exactly one -1 parent, no cycles.
    int roots = 0;
    for (int p : model.parents) {
        if (p == -1) ++roots;
        else if (p < 0 || p >= j) throw BodyModelError("parent index out of range");
    }
    if (roots != 1) throw BodyModelError("kinematic tree must have exactly one root");
    for (int start = 0; start < j; ++start) {
        int cur = start, hops = 0;
        while (cur != -1) {
            cur = model.parents[cur];
            if (++hops > j) throw BodyModelError("kinematic tree contains a cycle");
        }
    }

    for (const auto& basis : model.shape_basis)
        if (static_cast<int>(basis.size()) != v)
            throw BodyModelError("shape basis entry size does not match vertex count");

    for (const auto& e : model.regressor) {
        if (e.joint < 0 || e.joint >= j) throw BodyModelError("regressor joint out of range");
        if (e.vertex < 0 || e.vertex >= v) throw BodyModelError("regressor vertex out of range");
    }

    if (static_cast<int>(model.weights.size()) != v)
        throw BodyModelError("weight rows do not match vertex count");
    for (const auto& row : model.weights) {
        double sum = 0.0;
        for (const auto& [joint, w] : row) {
            if (joint < 0 || joint >= j) throw BodyModelError("weight joint out of range");
            if (w < 0.0) throw BodyModelError("negative skinning weight");
            sum += w;
        }
        if (std::abs(sum - 1.0) > 1e-6)
            throw BodyModelError("skinning weights must sum to 1");
    }

    if (!model.joint_names.empty() && static_cast<int>(model.joint_names.size()) != j)
        throw BodyModelError("joint names size does not match joint count");
    for (const auto& [name, idx] : model.landmarks)
        if (idx < 0 || idx >= v)
            throw BodyModelError("landmark '" + name + "' out of range");
}

BodyModel load_body_model(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw BodyModelError("cannot open body model: " + path.string());
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw BodyModelError("bad body model JSON: " + std::string(e.what()));
    }

    BodyModel model;
    const auto base = path.parent_path();
    try {
        model.template_mesh = load_mesh(base / j.at("template").get<std::string>());
        if (j.contains("groups_file")) {
            std::ifstream gin(base / j["groups_file"].get<std::string>());
            if (!gin) throw BodyModelError("cannot open groups file");
            json gj;
            gin >> gj;
            for (const auto& [name, arr] : gj.items())
                model.template_mesh.groups[name] = arr.get<std::vector<int>>();
        }
        for (const auto& basis : j.at("shape_basis")) {
            std::vector<Vec3> column;
            column.reserve(basis.size());
            for (const auto& d : basis)
                column.emplace_back(d.at(0).get<double>(), d.at(1).get<double>(),
                                    d.at(2).get<double>());
            model.shape_basis.push_back(std::move(column));
        }
        const auto& reg = j.at("joint_regressor");
        model.joint_count = reg.at("rows").get<int>();
        for (const auto& e : reg.at("entries"))
            model.regressor.push_back(
                {e.at(0).get<int>(), e.at(1).get<int>(), e.at(2).get<double>()});
        model.parents = j.at("parents").get<std::vector<int>>();
        for (const auto& row : j.at("weights")) {
            WeightRow r;
            for (const auto& e : row)
                r.push_back({e.at(0).get<int>(), e.at(1).get<double>()});
            model.weights.push_back(std::move(r));
        }
        if (j.contains("joint_names"))
            model.joint_names = j["joint_names"].get<std::vector<std::string>>();
        if (j.contains("landmarks"))
            for (const auto& [name, idx] : j["landmarks"].items())
                model.landmarks[name] = idx.get<int>();
    } catch (const json::exception& e) {
        throw BodyModelError("bad body model JSON: " + std::string(e.what()));
    }
    validate(model);
    return model;
}

Mesh apply_shape(const BodyModel& model, const ShapeParams& shape) {
    if (shape.beta.size() != model.shape_dim())
        throw BodyModelError("beta has " + std::to_string(shape.beta.size()) +
                             " coefficients, model expects " +
                             std::to_string(model.shape_dim()));
    Mesh shaped = model.template_mesh;
    for (int k = 0; k < model.shape_dim(); ++k) {
        const double b = shape.beta[k];
        if (b == 0.0) continue;
        const auto& column = model.shape_basis[k];
        for (std::size_t v = 0; v < shaped.vertices.size(); ++v)
            shaped.vertices[v] += b * column[v];
    }
    return shaped;
}

std::vector<Vec3> regress_joints(const BodyModel& model, const Mesh& shaped) {
    if (shaped.vertex_count() != model.template_mesh.vertex_count())
        throw BodyModelError("shaped mesh vertex count does not match model");
    std::vector<Vec3> joints(model.joint_count, Vec3::Zero());
    for (const auto& e : model.regressor)
        joints[e.joint] += e.weight * shaped.vertices[e.vertex];
    return joints;
}

std::vector<Eigen::Matrix4d> pose_transforms(const std::vector<int>& parents,
                                             const std::vector<Vec3>& joints,
                                             const Pose& pose) {
    const int joint_count = static_cast<int>(parents.size());
    if (static_cast<int>(pose.theta.size()) != joint_count)
        throw BodyModelError("pose has " + std::to_string(pose.theta.size()) +
                             " joints, model expects " + std::to_string(joint_count));
    if (static_cast<int>(joints.size()) != joint_count)
        throw BodyModelError("joint position count does not match the kinematic tree");

    // World transform per joint, composed root to leaf; the skinning matrix
    // then maps rest space to posed space (G_world * translate(-rest joint)).
    std::vector<Eigen::Matrix4d> world(joint_count);
    for (int joint = 0; joint < joint_count; ++joint) {
        const int parent = parents[joint];
        const Vec3 offset = parent < 0 ? joints[joint] : Vec3(joints[joint] - joints[parent]);
        Eigen::Matrix4d local = Eigen::Matrix4d::Identity();
        local.topLeftCorner<3, 3>() = axis_angle_to_matrix(pose.theta[joint]);
        local.topRightCorner<3, 1>() = offset;
        world[joint] = parent < 0 ? local : Eigen::Matrix4d(world[parent] * local);
    }
    std::vector<Eigen::Matrix4d> skin(joint_count);
    for (int joint = 0; joint < joint_count; ++joint) {
        Eigen::Matrix4d unpose = Eigen::Matrix4d::Identity();
        unpose.topRightCorner<3, 1>() = -joints[joint];
        skin[joint] = world[joint] * unpose;
    }
    return skin;
}

std::vector<Eigen::Matrix4d> pose_transforms(const BodyModel& model,
                                             const std::vector<Vec3>& joints,
                                             const Pose& pose) {
    return pose_transforms(model.parents, joints, pose);
}

std::vector<Vec3> skin_vertices(const std::vector<Vec3>& vertices,
                                const std::vector<WeightRow>& weights,
                                const std::vector<Eigen::Matrix4d>& transforms,
                                const Vec3& gamma) {
    if (vertices.size() != weights.size())
        throw BodyModelError("weight rows do not match vertex count");
    std::vector<Vec3> out(vertices.size());
    for (std::size_t v = 0; v < vertices.size(); ++v) {
        Eigen::Vector4d hom(vertices[v].x(), vertices[v].y(), vertices[v].z(), 1.0);
        Eigen::Vector4d acc = Eigen::Vector4d::Zero();
        for (const auto& [joint, w] : weights[v]) acc += w * (transforms[joint] * hom);
        out[v] = acc.head<3>() + gamma;
    }
    return out;
}

Mesh apply_pose(const BodyModel& model, const Mesh& shaped, const Pose& pose) {
    const auto joints = regress_joints(model, shaped);
    const auto transforms = pose_transforms(model, joints, pose);
    Mesh posed = shaped;
    posed.vertices = skin_vertices(shaped.vertices, model.weights, transforms, pose.gamma);
    return posed;
}

}  // namespace avatarforge
