/*
 * avatarforge - personalized, animatable 3-D human reconstruction for
 * virtual try-on.
 *
 * File: src/pipeline.cpp
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
#include "avatarforge/pipeline.hpp"

#include "avatarforge/body_model.hpp"
#include "avatarforge/garment.hpp"
#include "avatarforge/image.hpp"
#include "avatarforge/obj_io.hpp"
#include "avatarforge/stitcher.hpp"
#include "avatarforge/texture.hpp"

#include <json.hpp>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <random>

namespace avatarforge {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

json read_json(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    json j;
    in >> j;
    return j;
}

void write_json(const json& j, const fs::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << j.dump(2) << '\n';
}

Eigen::VectorXd load_beta(const fs::path& path) {
    const json j = read_json(path);
    const auto& arr = j.at("beta");
    Eigen::VectorXd beta(arr.size());
    for (std::size_t i = 0; i < arr.size(); ++i) beta[i] = arr.at(i).get<double>();
    return beta;
}

fs::path head_manifest_path(const fs::path& head_mesh) {
    fs::path p = head_mesh;
    p.replace_extension(".manifest.json");
    return p;
}

// Skin mask from the manifest's UV rectangles (u0, v0, u1, v1).
Image apply_skin_mask(Image tex, const json& manifest) {
    if (!manifest.contains("skin_region")) return tex;
    tex.mask.assign(tex.pixel_count(), 0);
    for (const auto& rect : manifest["skin_region"]) {
        const double u0 = rect.at(0).get<double>(), v0 = rect.at(1).get<double>();
        const double u1 = rect.at(2).get<double>(), v1 = rect.at(3).get<double>();
        for (int y = 0; y < tex.height; ++y) {
            const double v = 1.0 - (y + 0.5) / tex.height;
            if (v < v0 || v > v1) continue;
            for (int x = 0; x < tex.width; ++x) {
                const double u = (x + 0.5) / tex.width;
                if (u >= u0 && u <= u1) tex.mask[std::size_t(y) * tex.width + x] = 1;
            }
        }
    }
    return tex;
}

std::string weight_form_name(WeightForm f) {
    return f == WeightForm::gaussian ? "gaussian" : "literal";
}

json alignment_report(const AlignmentState& st, bool converged) {
    json a;
    a["iterations"] = st.iterations;
    a["converged"] = converged;
    a["angles_deg"] = {st.angles_deg[0], st.angles_deg[1], st.angles_deg[2]};
    a["errors"] = {{"x", st.errors[0]}, {"y", st.errors[1]}, {"z", st.errors[2]}};
    a["step_factors"] = {st.step_factors[0], st.step_factors[1], st.step_factors[2]};
    return a;
}

void write_resolved_config(const PipelineConfig& config, const fs::path& path) {
    json j;
    j["body_model_path"] = fs::absolute(config.body_model_path).string();
    j["beta_path"] = fs::absolute(config.beta_path).string();
    j["head_mesh_path"] = fs::absolute(config.head_mesh_path).string();
    j["head_texture_path"] = fs::absolute(config.head_texture_path).string();
    j["garment_library_dir"] = fs::absolute(config.garment_library_dir).string();
    j["output_dir"] = fs::absolute(config.output_dir).string();
    j["alignment"] = {{"max_iters", config.alignment.max_iters},
                      {"tol", config.alignment.tol},
                      {"c_init", {config.alignment.c_init[0], config.alignment.c_init[1],
                                  config.alignment.c_init[2]}},
                      {"weight_form", weight_form_name(config.alignment.weight_form)}};
    j["epsilon"] = config.epsilon;
    write_json(j, path);
}

std::vector<WeightRow> nearest_vertex_weights(const std::vector<Vec3>& vertices,
                                              const CombinedModel& avatar) {
    const std::vector<double> ramp(vertices.size(), 0.0);
    const int head_joint = [&] {
        for (std::size_t i = 0; i < avatar.joint_names.size(); ++i)
            if (avatar.joint_names[i] == "head") return static_cast<int>(i);
        return 0;  // any valid joint works; ramp 0 never blends it in
    }();
    return transfer_skin_weights(vertices, ramp, avatar.mesh.vertices, avatar.weights,
                                 head_joint);
}

void save_weight_rows(const std::vector<WeightRow>& rows, const CombinedModel& avatar,
                      const fs::path& path) {
    json j;
    j["joints"] = avatar.joint_count;
    auto out_rows = json::array();
    for (const auto& row : rows) {
        auto r = json::array();
        for (const auto& [joint, w] : row) r.push_back({joint, w});
        out_rows.push_back(std::move(r));
    }
    j["weights"] = std::move(out_rows);
    j["parents"] = avatar.parents;
    auto joints = json::array();
    for (const auto& p : avatar.rest_joints) joints.push_back({p.x(), p.y(), p.z()});
    j["rest_joints"] = std::move(joints);
    j["joint_names"] = avatar.joint_names;
    write_json(j, path);
}

}  // namespace

PipelineConfig load_pipeline_config(const fs::path& path) {
    const json j = read_json(path);
    const fs::path base = fs::absolute(path).parent_path();
    auto resolve = [&](const std::string& key) {
        const fs::path p = j.at(key).get<std::string>();
        return p.is_absolute() ? p : base / p;
    };
    PipelineConfig c;
    c.body_model_path = resolve("body_model_path");
    c.beta_path = resolve("beta_path");
    c.head_mesh_path = resolve("head_mesh_path");
    c.head_texture_path = resolve("head_texture_path");
    c.garment_library_dir = resolve("garment_library_dir");
    c.output_dir = resolve("output_dir");
    if (j.contains("alignment")) {
        const auto& a = j["alignment"];
        c.alignment.max_iters = a.value("max_iters", c.alignment.max_iters);
        c.alignment.tol = a.value("tol", c.alignment.tol);
        if (a.contains("c_init")) {
            if (a["c_init"].is_array())
                c.alignment.c_init = Vec3(a["c_init"].at(0).get<double>(),
                                          a["c_init"].at(1).get<double>(),
                                          a["c_init"].at(2).get<double>());
            else
                c.alignment.c_init = Vec3::Constant(a["c_init"].get<double>());
        }
        if (a.contains("weight_form"))
            c.alignment.weight_form = a["weight_form"].get<std::string>() == "literal"
                                          ? WeightForm::literal
                                          : WeightForm::gaussian;
    }
    c.epsilon = j.value("epsilon", c.epsilon);
    return c;
}

int cmd_reconstruct(const PipelineConfig& config) {
    json report;
    try {
        fs::create_directories(config.output_dir);

        const BodyModel model = load_body_model(config.body_model_path);
        const Eigen::VectorXd beta = load_beta(config.beta_path);
        ObjLoadStats head_stats;
        const Mesh head = load_mesh(config.head_mesh_path, &head_stats);
        Image head_tex = load_png(config.head_texture_path);

        json manifest = json::object();
        const fs::path mpath = head_manifest_path(config.head_mesh_path);
        if (fs::exists(mpath)) manifest = read_json(mpath);
        if (manifest.contains("vertex_count") &&
            manifest["vertex_count"].get<int>() != head.vertex_count()) {
            std::cerr << "head mesh vertex count " << head.vertex_count()
                      << " does not match manifest\n";
            return kExitInvalidInput;
        }

        const Mesh shaped = apply_shape(model, {beta});

        SymmetrySets sets;
        if (!head.groups.count("sagittal_line") || !head.groups.count("z_profile")) {
            std::cerr << "head mesh lacks sagittal_line/z_profile groups\n";
            return kExitInvalidInput;
        }
        sets.sagittal = head.groups.at("sagittal_line");
        sets.z_profile = head.groups.at("z_profile");

        AlignmentState align;
        try {
            align = align_rotation(head, sets, config.alignment);
        } catch (const AlignmentNonConvergence& e) {
            report["alignment"] = alignment_report(e.state, false);
            write_json(report, config.output_dir / "report.json");
            std::cerr << e.what() << '\n';
            return kExitAlignmentFailed;
        }
        report["alignment"] = alignment_report(align, true);

        // Translation from the rotated cut head onto the body's neck rim.
        const Mesh head_preview = cut_and_place_head(head, align.angles_deg, Vec3::Zero());
        const auto head_loops = boundary_loops(head_preview);
        const Mesh body_cut = delete_vertex_group(shaped, "neck_top_ring").mesh;
        const auto body_loops_cut = boundary_loops(body_cut);
        if (head_loops.size() != 1 || body_loops_cut.size() != 1) {
            std::cerr << "cut did not produce a single boundary loop\n";
            return kExitStitchFailed;
        }
        const Vec3 translation = align_translation(head_preview, body_cut, head_loops[0],
                                                   body_loops_cut[0]);

        const CombinedModel combined =
            stitch(shaped, head, align.angles_deg, translation, model);

        report["loop_census"] = {
            {"body_before_cut", static_cast<int>(boundary_loops(shaped).size())},
            {"body_after_cut", static_cast<int>(body_loops_cut.size())},
            {"head_before_cut", static_cast<int>(boundary_loops(head).size())},
            {"head_after_cut", static_cast<int>(head_loops.size())},
            {"combined", static_cast<int>(boundary_loops(combined.mesh).size())},
        };
        report["head_obj_stats"] = {{"degenerate_dropped", head_stats.degenerate_dropped},
                                    {"quads_triangulated", head_stats.quads_triangulated}};

        // Texture generation and seam blending.
        head_tex = apply_skin_mask(std::move(head_tex), manifest);
        const Rgb skin = dominant_skin_color(head_tex);
        const Image body_tex = synthesize_body_texture(skin, 512);
        std::vector<UvBlendSample> band;
        if (combined.mesh.has_uvs()) {
            for (std::size_t i = 0; i < combined.seam_band.size(); ++i) {
                const int v = combined.seam_band[i];
                if (combined.provenance[v] == Provenance::body) continue;
                Vec2 uv = combined.mesh.uvs[v];
                uv.x() = std::clamp(uv.x(), 0.0, 1.0);
                uv.y() = std::clamp(uv.y(), 0.0, 1.0);
                // Ramp runs 0 at the head side of the blend to 1 at the body
                // side; the seam ramp is 0 at the body rim.
                band.push_back({uv, 1.0 - combined.seam_ramp[i]});
            }
        }
        const auto [blended_head, body_out] = blend_seam(body_tex, head_tex, band);
        report["dominant_skin_color"] = {skin[0], skin[1], skin[2]};

        save_combined(combined, config.output_dir / "avatar.obj",
                      config.output_dir / "avatar.weights.json");
        save_png(blended_head, config.output_dir / "avatar_head.png");
        save_png(body_out, config.output_dir / "avatar_body.png");
        write_json(report, config.output_dir / "report.json");
        write_resolved_config(config, config.output_dir / "pipeline_config.json");
        return kExitOk;
    } catch (const StitchError& e) {
        std::cerr << "stitch failed: " << e.what() << '\n';
        return kExitStitchFailed;
    } catch (const std::exception& e) {
        std::cerr << "reconstruct failed: " << e.what() << '\n';
        return kExitInvalidInput;
    }
}

int cmd_fit(const PipelineConfig& config, const fs::path& avatar_dir,
            const std::string& garment_id) {
    try {
        const fs::path manifest = config.garment_library_dir / (garment_id + ".json");
        if (!fs::exists(manifest)) {
            std::cerr << "unknown garment id '" << garment_id << "'\n";
            return kExitInvalidInput;
        }
        const Garment garment = load_garment(manifest);
        const CombinedModel avatar = load_combined(avatar_dir / "avatar.obj",
                                                   avatar_dir / "avatar.weights.json");
        const BodyModel model = load_body_model(config.body_model_path);
        const Eigen::VectorXd beta = load_beta(config.beta_path);

        // Fit map: from the manifest when referenced, trained otherwise.
        FitMap fit;
        const json mj = read_json(manifest);
        bool trained = false;
        if (mj.contains("fit_map") && !mj["fit_map"].is_null()) {
            fit = load_fit_map(manifest.parent_path() / mj["fit_map"].get<std::string>());
        } else {
            std::mt19937 rng(2024);
            std::uniform_real_distribution<double> uni(-1.0, 1.0);
            std::vector<Eigen::VectorXd> samples;
            for (int i = 0; i < 50; ++i) {
                Eigen::VectorXd b(model.shape_dim());
                for (int k = 0; k < model.shape_dim(); ++k) b[k] = uni(rng);
                samples.push_back(b);
            }
            fit = train_fit_map(model, garment, samples);
            trained = true;
        }

        const auto [scale, position] = predict_fit_params(fit, {beta});
        const Mesh placed = place_garment(garment, scale, position);
        const PenetrationResult resolved =
            resolve_penetration(placed, avatar.mesh, config.epsilon);
        if (!resolved.clearance_met)
            std::cerr << "warning: clearance not met after penetration resolution\n";

        const auto weights = nearest_vertex_weights(resolved.mesh.vertices, avatar);
        save_mesh(resolved.mesh, avatar_dir / ("avatar_" + garment_id + ".obj"));
        save_weight_rows(weights, avatar,
                         avatar_dir / ("avatar_" + garment_id + ".weights.json"));

        json report;
        report["garment"] = garment_id;
        report["scale"] = {scale.x(), scale.y(), scale.z()};
        report["position"] = {position.x(), position.y(), position.z()};
        report["fit_map_residual"] = fit.residual;
        report["fit_map_trained"] = trained;
        report["passes"] = resolved.passes;
        report["moved_vertices"] = resolved.moved_vertices;
        report["clearance_met"] = resolved.clearance_met;
        write_json(report, avatar_dir / ("fit_" + garment_id + ".report.json"));
        return kExitOk;
    } catch (const std::exception& e) {
        std::cerr << "fit failed: " << e.what() << '\n';
        return kExitInvalidInput;
    }
}

int cmd_pose(const fs::path& avatar_dir, const fs::path& pose_file, const fs::path& out_dir,
             int frames) {
    try {
        if (frames < 1) {
            std::cerr << "frames must be >= 1\n";
            return kExitInvalidInput;
        }
        const CombinedModel avatar = load_combined(avatar_dir / "avatar.obj",
                                                   avatar_dir / "avatar.weights.json");
        const json pj = read_json(pose_file);
        const auto& theta_json = pj.at("theta");
        if (static_cast<int>(theta_json.size()) != avatar.joint_count) {
            std::cerr << "pose has " << theta_json.size() << " joints, avatar has "
                      << avatar.joint_count << '\n';
            return kExitInvalidInput;
        }
        Pose target;
        for (const auto& t : theta_json)
            target.theta.emplace_back(t.at(0).get<double>(), t.at(1).get<double>(),
                                      t.at(2).get<double>());
        if (pj.contains("gamma"))
            target.gamma = Vec3(pj["gamma"].at(0).get<double>(),
                                pj["gamma"].at(1).get<double>(),
                                pj["gamma"].at(2).get<double>());

        // Fitted garments next to the avatar, posed with their own weights.
        struct FittedGarment {
            std::string id;
            Mesh mesh;
            std::vector<WeightRow> weights;
        };
        std::vector<FittedGarment> garments;
        std::vector<fs::path> entries;
        for (const auto& entry : fs::directory_iterator(avatar_dir))
            entries.push_back(entry.path());
        std::sort(entries.begin(), entries.end());
        for (const auto& p : entries) {
            const std::string name = p.filename().string();
            if (name.rfind("avatar_", 0) == 0 && p.extension() == ".obj") {
                const std::string id = name.substr(7, name.size() - 7 - 4);
                const fs::path w = avatar_dir / ("avatar_" + id + ".weights.json");
                if (!fs::exists(w)) continue;
                CombinedModel g = load_combined(p, w);
                garments.push_back({id, std::move(g.mesh), std::move(g.weights)});
            }
        }

        fs::create_directories(out_dir);
        for (int f = 0; f < frames; ++f) {
            const double s = frames == 1 ? 1.0 : static_cast<double>(f) / (frames - 1);
            Pose pose;
            for (const auto& t : target.theta) pose.theta.push_back(s * t);
            pose.gamma = s * target.gamma;
            const auto transforms = pose_transforms(avatar.parents, avatar.rest_joints, pose);

            char name[32];
            std::snprintf(name, sizeof(name), "frame_%04d.obj", f);
            Mesh posed = avatar.mesh;
            posed.vertices =
                skin_vertices(avatar.mesh.vertices, avatar.weights, transforms, pose.gamma);
            save_mesh(posed, out_dir / name);

            for (const auto& g : garments) {
                Mesh pg = g.mesh;
                pg.vertices = skin_vertices(g.mesh.vertices, g.weights, transforms, pose.gamma);
                std::snprintf(name, sizeof(name), "frame_%04d_%s.obj", f, g.id.c_str());
                save_mesh(pg, out_dir / name);
            }
        }
        return kExitOk;
    } catch (const std::exception& e) {
        std::cerr << "pose failed: " << e.what() << '\n';
        return kExitInvalidInput;
    }
}

}  // namespace avatarforge
