/*
 * avatarforge - personalized, animatable 3-D human reconstruction for
 * virtual try-on.
 *
 * File: src/garment.cpp
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
#include "avatarforge/garment.hpp"

#include "avatarforge/obj_io.hpp"
#include "avatarforge/signed_distance.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>

namespace avatarforge {

GarmentCategory garment_category_from_string(const std::string& s) {
    if (s == "top") return GarmentCategory::top;
    if (s == "bottom") return GarmentCategory::bottom;
    if (s == "dress") return GarmentCategory::dress;
    throw GarmentError("unknown garment category '" + s + "'");
}

std::string to_string(GarmentCategory c) {
    switch (c) {
        case GarmentCategory::top: return "top";
        case GarmentCategory::bottom: return "bottom";
        case GarmentCategory::dress: return "dress";
    }
    return "top";
}

void Garment::check_anchors() const {
    static const std::map<GarmentCategory, std::vector<std::string>> required = {
        {GarmentCategory::top, {"shoulder_l", "shoulder_r", "hem"}},
        {GarmentCategory::bottom, {"waist_l", "waist_r", "hem"}},
        {GarmentCategory::dress, {"shoulder_l", "shoulder_r", "hem"}},
    };
    for (const auto& name : required.at(category)) {
        auto it = anchors.find(name);
        if (it == anchors.end())
            throw GarmentError("garment category '" + to_string(category) +
                               "' requires anchor '" + name + "'");
        if (it->second < 0 || it->second >= mesh.vertex_count())
            throw GarmentError("anchor '" + name + "' out of range");
    }
    for (const auto& [name, idx] : anchors)
        if (idx < 0 || idx >= mesh.vertex_count())
            throw GarmentError("anchor '" + name + "' out of range");
}

Vec3 Garment::anchor_centroid() const {
    if (anchors.empty()) throw GarmentError("garment has no anchors");
    Vec3 c = Vec3::Zero();
    for (const auto& [name, idx] : anchors) c += mesh.vertices[idx];
    return c / static_cast<double>(anchors.size());
}

std::pair<Vec3, Vec3> fit_targets(const BodyModel& model, const Garment& garment,
                                  const Eigen::VectorXd& beta) {
    for (const char* name :
         {"shoulder_l", "shoulder_r", "chest_front", "chest_back", "hip_l", "hip_r"})
        if (!model.landmarks.count(name))
            throw GarmentError(std::string("body model lacks landmark '") + name + "'");

    const Mesh shaped = apply_shape(model, {beta});
    auto lm = [&](const char* name) { return shaped.vertices[model.landmarks.at(name)]; };
    const Vec3 sl = lm("shoulder_l"), sr = lm("shoulder_r");
    const Vec3 cf = lm("chest_front"), cb = lm("chest_back");
    const Vec3 hl = lm("hip_l"), hr = lm("hip_r");

    const double shoulder_width = std::abs(sl.x() - sr.x());
    const double torso_height = std::abs(0.5 * (sl.y() + sr.y()) - 0.5 * (hl.y() + hr.y()));
    const double chest_depth = std::abs(cf.z() - cb.z());
    const Vec3 scale(shoulder_width / garment.rest_scale.x(),
                     torso_height / garment.rest_scale.y(),
                     chest_depth / garment.rest_scale.z());
    const Vec3 position = 0.5 * (cf + cb);
    return {scale, position};
}

FitMap train_fit_map(const BodyModel& model, const Garment& garment,
                     const std::vector<Eigen::VectorXd>& samples) {
    const int k = model.shape_dim();
    if (static_cast<int>(samples.size()) < k + 1)
        throw GarmentError("need at least K+1 training samples");

    const int n = static_cast<int>(samples.size());
    Eigen::MatrixXd design(n, k + 1);
    Eigen::MatrixXd targets(n, 6);
    for (int i = 0; i < n; ++i) {
        if (samples[i].size() != k) throw GarmentError("sample beta dimension mismatch");
        design.row(i).head(k) = samples[i].transpose();
        design(i, k) = 1.0;
        const auto [s, t] = fit_targets(model, garment, samples[i]);
        targets.row(i) << s.x(), s.y(), s.z(), t.x(), t.y(), t.z();
    }

    // Minimum-norm least squares. A deficient sample set is still fine when
    // it explains the targets exactly (e.g. repeated betas pin the constant
    // term); it is an error only when the misfit shows the samples cannot
    // carry the map.
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(design);
    Eigen::MatrixXd coeffs(6, k + 1);
    for (int c = 0; c < 6; ++c)
        coeffs.row(c) = cod.solve(targets.col(c)).transpose();

    FitMap fit;
    fit.coefficients = coeffs;
    const Eigen::MatrixXd pred = design * coeffs.transpose();
    fit.residual = std::sqrt((pred - targets).squaredNorm() /
                             static_cast<double>(targets.size()));
    if (cod.rank() < k + 1 && fit.residual > 1e-9 * (1.0 + targets.norm()))
        throw GarmentError("rank-deficient sample set");
    return fit;
}

std::pair<Vec3, Vec3> predict_fit_params(const FitMap& fit, const ShapeParams& beta) {
    if (beta.beta.size() != fit.beta_dim())
        throw GarmentError("beta dimension does not match fit map");
    Eigen::VectorXd x(fit.beta_dim() + 1);
    x.head(fit.beta_dim()) = beta.beta;
    x(fit.beta_dim()) = 1.0;
    const Eigen::VectorXd y = fit.coefficients * x;
    return {Vec3(y[0], y[1], y[2]), Vec3(y[3], y[4], y[5])};
}

Mesh place_garment(const Garment& garment, const Vec3& scale, const Vec3& position) {
    if (scale.x() <= 0.0 || scale.y() <= 0.0 || scale.z() <= 0.0)
        throw GarmentError("garment scale must be positive");
    garment.check_anchors();
    const Vec3 center = garment.anchor_centroid();
    Mesh placed = garment.mesh;
    for (auto& v : placed.vertices)
        v = position + (v - center).cwiseProduct(scale);
    return placed;
}

PenetrationResult resolve_penetration(const Mesh& garment, const Mesh& body, double epsilon,
                                      int max_passes) {
    if (epsilon <= 0.0) throw GarmentError("epsilon must be positive");
    if (max_passes < 1) throw GarmentError("max_passes must be at least 1");

    PenetrationResult result;
    result.mesh = garment;
    for (int pass = 0; pass < max_passes; ++pass) {
        int moved = 0;
        for (auto& v : result.mesh.vertices) {
            const SurfaceHit hit = signed_distance(v, body);
            if (hit.signed_distance >= epsilon) continue;
            v = hit.point + hit.normal * epsilon;
            ++moved;
        }
        result.passes = pass + 1;
        result.moved_vertices += moved;
        if (moved == 0) break;
    }
    result.clearance_met = true;
    for (const auto& v : result.mesh.vertices) {
        if (signed_distance(v, body).signed_distance < epsilon / 2.0) {
            result.clearance_met = false;
            break;
        }
    }
    return result;
}

Garment load_garment(const std::filesystem::path& manifest_path) {
    std::ifstream in(manifest_path);
    if (!in) throw GarmentError("cannot open garment manifest: " + manifest_path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw GarmentError("bad garment manifest: " + std::string(e.what()));
    }
    Garment g;
    try {
        g.mesh = load_mesh(manifest_path.parent_path() / j.at("mesh").get<std::string>());
        g.category = garment_category_from_string(j.at("category").get<std::string>());
        for (const auto& [name, idx] : j.at("anchors").items())
            g.anchors[name] = idx.get<int>();
        if (j.contains("rest_scale")) {
            const auto& rs = j["rest_scale"];
            g.rest_scale = Vec3(rs.at(0).get<double>(), rs.at(1).get<double>(),
                                rs.at(2).get<double>());
        }
    } catch (const nlohmann::json::exception& e) {
        throw GarmentError("bad garment manifest: " + std::string(e.what()));
    }
    g.check_anchors();
    return g;
}

FitMap load_fit_map(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw GarmentError("cannot open fit map: " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw GarmentError("bad fit map JSON: " + std::string(e.what()));
    }
    FitMap fit;
    const auto rows = j.at("coefficients");
    if (rows.size() != 6) throw GarmentError("fit map needs 6 coefficient rows");
    const int cols = static_cast<int>(rows.at(0).size());
    fit.coefficients.resize(6, cols);
    for (int r = 0; r < 6; ++r)
        for (int c = 0; c < cols; ++c) fit.coefficients(r, c) = rows.at(r).at(c).get<double>();
    fit.residual = j.value("residual", 0.0);
    return fit;
}

void save_fit_map(const FitMap& fit, const std::filesystem::path& path) {
    nlohmann::json j;
    auto rows = nlohmann::json::array();
    for (int r = 0; r < 6; ++r) {
        auto row = nlohmann::json::array();
        for (int c = 0; c < fit.coefficients.cols(); ++c) row.push_back(fit.coefficients(r, c));
        rows.push_back(std::move(row));
    }
    j["coefficients"] = std::move(rows);
    j["residual"] = fit.residual;
    std::ofstream out(path);
    if (!out) throw GarmentError("cannot write fit map: " + path.string());
    out << j.dump(2) << '\n';
}

}  // namespace avatarforge
