/*
 * avatarforge - personalized, animatable 3-D human reconstruction for
 * virtual try-on.
 *
 * File: include/avatarforge/pipeline.hpp
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

#include "avatarforge/alignment.hpp"

#include <filesystem>
#include <string>

namespace avatarforge {

// Exit codes shared by the commands and the CLI.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInvalidInput = 2;
inline constexpr int kExitAlignmentFailed = 3;
inline constexpr int kExitStitchFailed = 4;

struct PipelineConfig {
    std::filesystem::path body_model_path;
    std::filesystem::path beta_path;
    std::filesystem::path head_mesh_path;
    std::filesystem::path head_texture_path;
    std::filesystem::path garment_library_dir;
    std::filesystem::path output_dir;
    AlignmentConfig alignment;
    double epsilon = 0.005;
};

/**
 * Reads a pipeline config JSON; relative paths resolve against the config
 * file's directory. The head manifest (skin regions, expected vertex count)
 * is looked up next to the head mesh as `<stem>.manifest.json`.
 */
PipelineConfig load_pipeline_config(const std::filesystem::path& path);

/**
 * Full reconstruction: shape the body, align and stitch the head, generate
 * and blend textures. Writes avatar.obj, avatar.weights.json,
 * avatar_head.png, avatar_body.png, report.json and a resolved copy of the
 * config into the output directory. Returns an exit code; diagnostics go to
 * stderr.
 */
int cmd_reconstruct(const PipelineConfig& config);

/**
 * Fits one garment onto a reconstructed avatar: predicts scale/position
 * from beta (training the fit map when the garment manifest has none),
 * places the garment, resolves penetration and writes
 * avatar_<id>.obj/.weights.json plus fit_<id>.report.json. Never touches
 * reconstruction outputs.
 */
int cmd_fit(const PipelineConfig& config, const std::filesystem::path& avatar_dir,
            const std::string& garment_id);

/**
 * Writes an OBJ frame sequence interpolating from rest to the pose file's
 * pose (frame 0 is rest when frames > 1). Fitted garments found in the
 * avatar directory are posed alongside with their own skinning weights.
 */
int cmd_pose(const std::filesystem::path& avatar_dir, const std::filesystem::path& pose_file,
             const std::filesystem::path& out_dir, int frames);

}  // namespace avatarforge
