/*
 * avatarforge - personalized, animatable 3-D human reconstruction for
 * virtual try-on.
 *
 * File: tools/gen_assets.cpp
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

// Materializes the bundled sample assets (synthetic head, body model,
// garments, textures, poses) into an asset directory. Everything here is
// deterministic so the files can be committed and byte-compared.

#include "avatarforge/alignment.hpp"
#include "avatarforge/body_model.hpp"
#include "avatarforge/image.hpp"
#include "avatarforge/obj_io.hpp"
#include "avatarforge/synthetic.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>

using namespace avatarforge;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

void write_json_file(const json& j, const fs::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << j.dump(2) << '\n';
}

void write_body_model(const BodyModel& model, const fs::path& dir) {
    save_mesh(model.template_mesh, dir / "body_template.obj");
    json j;
    j["template"] = "body_template.obj";
    auto basis = json::array();
    for (const auto& column : model.shape_basis) {
        auto col = json::array();
        for (const auto& d : column) col.push_back({d.x(), d.y(), d.z()});
        basis.push_back(std::move(col));
    }
    j["shape_basis"] = std::move(basis);
    auto entries = json::array();
    for (const auto& e : model.regressor) entries.push_back({e.joint, e.vertex, e.weight});
    j["joint_regressor"] = {{"rows", model.joint_count}, {"entries", std::move(entries)}};
    j["parents"] = model.parents;
    auto weights = json::array();
    for (const auto& row : model.weights) {
        auto r = json::array();
        for (const auto& [joint, w] : row) r.push_back({joint, w});
        weights.push_back(std::move(r));
    }
    j["weights"] = std::move(weights);
    j["groups_file"] = "body_template.groups.json";
    j["joint_names"] = model.joint_names;
    json lm;
    for (const auto& [name, idx] : model.landmarks) lm[name] = idx;
    j["landmarks"] = lm;
    write_json_file(j, dir / "body_model.json");
}

Image head_texture() {
    // Skin block with hair/lips/eye distractor bands; the manifest's
    // skin_region rectangles select only the skin block.
    Image img(256, 256, {198, 158, 138});
    for (int y = 0; y < 64; ++y)  // hair band (top quarter, v in [0.75, 1])
        for (int x = 0; x < 256; ++x) img.set(x, y, {52, 38, 28});
    for (int y = 200; y < 232; ++y)  // lips band
        for (int x = 64; x < 192; ++x) img.set(x, y, {150, 70, 70});
    for (int y = 120; y < 140; ++y)  // eye band
        for (int x = 32; x < 96; ++x) img.set(x, y, {240, 240, 240});
    return img;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"generate bundled sample assets"};
    std::string out = "assets";
    app.add_option("--out", out, "output directory");
    CLI11_PARSE(app, argc, argv);

    try {
        const fs::path dir = out;
        fs::create_directories(dir);
        fs::create_directories(dir / "garments");
        fs::create_directories(dir / "poses");

        // Sample head, body scale, pre-aligned.
        const Mesh head = synthetic::head(0.35);
        save_mesh(head, dir / "head_sample.obj");
        json manifest;
        manifest["mesh"] = "head_sample.obj";
        manifest["texture"] = "head_sample.png";
        manifest["vertex_count"] = head.vertex_count();
        manifest["skin_region"] = {{0.0, 0.0, 1.0, 0.7}};
        write_json_file(manifest, dir / "head_sample.manifest.json");
        save_png(head_texture(), dir / "head_sample.png");

        // The same head pre-rotated, for exercising the alignment loop.
        Mesh rotated = head;
        const Vec3 pre_rot_deg(5.0, 12.0, -8.0);
        const Eigen::Matrix3d rot = alignment_rotation_matrix(pre_rot_deg).transpose();
        const Vec3 center = rotated.centroid();
        for (auto& v : rotated.vertices) v = rot * (v - center) + center;
        save_mesh(rotated, dir / "head_rotated.obj");
        json rman = manifest;
        rman["mesh"] = "head_rotated.obj";
        write_json_file(rman, dir / "head_rotated.manifest.json");

        write_body_model(synthetic::body_model(), dir);

        write_json_file(json{{"beta", {0.3, -0.2}}}, dir / "beta_sample.json");

        auto write_garment = [&](const Garment& g, const std::string& id) {
            save_mesh(g.mesh, dir / "garments" / (id + ".obj"));
            json gj;
            gj["mesh"] = id + ".obj";
            gj["category"] = to_string(g.category);
            json anchors;
            for (const auto& [name, idx] : g.anchors) anchors[name] = idx;
            gj["anchors"] = anchors;
            gj["rest_scale"] = {g.rest_scale.x(), g.rest_scale.y(), g.rest_scale.z()};
            gj["fit_map"] = nullptr;
            write_json_file(gj, dir / "garments" / (id + ".json"));
        };
        write_garment(synthetic::shirt(), "tshirt_a");
        write_garment(synthetic::jacket(), "jacket_a");

        write_json_file(json{{"theta", {{0, 0, 0}, {0, 0, 0.35}, {0, 0.3, 0}, {0, 0, 0}}},
                             {"gamma", {0, 0, 0}}},
                        dir / "poses" / "bend.json");
        write_json_file(json{{"theta", {{0, 0, 0}, {0, 0, 0}, {0, 0, 0}, {0, 0, 0}}},
                             {"gamma", {0, 0, 0}}},
                        dir / "poses" / "rest.json");
        // 30-degree head turn about y; single-joint pose for rigid-motion checks.
        write_json_file(json{{"theta", {{0, 0, 0}, {0, 0, 0}, {0, 0, 0}, {0, 0.5235987755982988, 0}}},
                             {"gamma", {0, 0, 0}}},
                        dir / "poses" / "head_turn.json");

        json config;
        config["body_model_path"] = "body_model.json";
        config["beta_path"] = "beta_sample.json";
        config["head_mesh_path"] = "head_sample.obj";
        config["head_texture_path"] = "head_sample.png";
        config["garment_library_dir"] = "garments";
        config["output_dir"] = "out";
        config["alignment"] = {{"max_iters", 500},
                               {"tol", 1e-4},
                               {"c_init", {1e-3, 1e-3, 1e-3}},
                               {"weight_form", "gaussian"}};
        config["epsilon"] = 0.005;
        write_json_file(config, dir / "pipeline_config.json");

        json rconfig = config;
        rconfig["head_mesh_path"] = "head_rotated.obj";
        rconfig["output_dir"] = "out_rotated";
        // The error sums scale with the asset, so the step factor is
        // calibrated for the 0.35-scale sample head.
        rconfig["alignment"]["c_init"] = {3e-3, 3e-3, 3e-3};
        write_json_file(rconfig, dir / "pipeline_config_rotated.json");

        std::cout << "assets written to " << dir.string() << '\n';
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "asset generation failed: " << e.what() << '\n';
        return 1;
    }
}
