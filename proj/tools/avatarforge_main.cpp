/*
 * avatarforge - personalized, animatable 3-D human reconstruction for
 * virtual try-on.
 *
 * File: tools/avatarforge_main.cpp
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

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
    CLI::App app{"avatarforge - personalized animatable avatar reconstruction and try-on"};
    app.require_subcommand(1);

    std::string config_path, avatar_dir, garment_id, pose_path, out_dir;
    std::string weight_form;
    double align_tol = -1.0;
    int align_max_iters = -1;
    int frames = 1;

    auto* rec = app.add_subcommand("reconstruct", "build the personalized avatar");
    rec->add_option("--config", config_path, "pipeline config JSON")->required();
    rec->add_option("--weight-form", weight_form, "gaussian|literal");
    rec->add_option("--align-tol", align_tol, "alignment error tolerance");
    rec->add_option("--align-max-iters", align_max_iters, "alignment iteration budget");

    auto* fit = app.add_subcommand("fit", "fit a garment onto a reconstructed avatar");
    fit->add_option("--avatar", avatar_dir, "avatar output directory")->required();
    fit->add_option("--garment", garment_id, "garment id in the library")->required();
    fit->add_option("--config", config_path, "pipeline config JSON (defaults to the copy "
                                             "inside the avatar directory)");

    auto* pose = app.add_subcommand("pose", "export posed OBJ frames");
    pose->add_option("--avatar", avatar_dir, "avatar output directory")->required();
    pose->add_option("--poses", pose_path, "pose JSON file")->required();
    pose->add_option("--out", out_dir, "frame output directory")->required();
    pose->add_option("--frames", frames, "frame count interpolating rest -> pose");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : avatarforge::kExitInvalidInput;
    }

    try {
        if (rec->parsed()) {
            auto config = avatarforge::load_pipeline_config(config_path);
            if (!weight_form.empty())
                config.alignment.weight_form = weight_form == "literal"
                                                   ? avatarforge::WeightForm::literal
                                                   : avatarforge::WeightForm::gaussian;
            if (align_tol > 0) config.alignment.tol = align_tol;
            if (align_max_iters > 0) config.alignment.max_iters = align_max_iters;
            return avatarforge::cmd_reconstruct(config);
        }
        if (fit->parsed()) {
            const std::filesystem::path dir = avatar_dir;
            const std::filesystem::path cfg =
                config_path.empty() ? dir / "pipeline_config.json"
                                    : std::filesystem::path(config_path);
            return avatarforge::cmd_fit(avatarforge::load_pipeline_config(cfg), dir,
                                        garment_id);
        }
        if (pose->parsed()) return avatarforge::cmd_pose(avatar_dir, pose_path, out_dir, frames);
    } catch (const std::exception& e) {
        std::cerr << e.what() << '\n';
        return avatarforge::kExitInvalidInput;
    }
    return avatarforge::kExitInvalidInput;
}
