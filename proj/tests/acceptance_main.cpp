/*
 * avatarforge - personalized, animatable 3-D human reconstruction for
 * virtual try-on.
 *
 * File: tests/acceptance_main.cpp
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

// End-to-end acceptance suite. Each criterion prints one PASS/FAIL line;
// the process exits nonzero when any criterion fails.
//
// usage: acceptance <path-to-avatarforge-cli> <path-to-assets-dir>

#include "avatarforge/alignment.hpp"
#include "avatarforge/body_model.hpp"
#include "avatarforge/garment.hpp"
#include "avatarforge/obj_io.hpp"
#include "avatarforge/signed_distance.hpp"
#include "avatarforge/stitcher.hpp"
#include "avatarforge/synthetic.hpp"
#include "avatarforge/texture.hpp"

#include <Eigen/Geometry>

#include <chrono>
#include <cstdlib>
#include <map>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include <sys/wait.h>

using namespace avatarforge;
namespace fs = std::filesystem;

namespace {

int g_failures = 0;

void report(int criterion, const std::string& name, bool pass, const std::string& detail) {
    std::cout << (pass ? "PASS" : "FAIL") << "  criterion " << criterion << " (" << name
              << "): " << detail << '\n';
    if (!pass) ++g_failures;
}

std::string g_cli;
fs::path g_assets;

int run_cli(const std::string& args) {
    const std::string cmd = "\"" + g_cli + "\" " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string file_bytes(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// ---------------------------------------------------------------- 1
void criterion_rotation_recovery() {
    const Mesh head = synthetic::head(1.0);
    const SymmetrySets sets{head.groups.at("sagittal_line"), head.groups.at("z_profile")};
    const AlignmentConfig cfg;
    const Vec3 center = head.centroid();

    std::mt19937_64 rng(20260809);
    std::uniform_real_distribution<double> uyz(-20, 20), ux(-10, 10);
    int ok = 0;
    const auto t0 = std::chrono::steady_clock::now();
    for (int trial = 0; trial < 100; ++trial) {
        const double ay = uyz(rng), az = uyz(rng), ax = ux(rng);
        const Eigen::Matrix3d R =
            alignment_rotation_matrix(Vec3(ax, ay, az)).transpose();
        Mesh m = head;
        for (auto& v : m.vertices) v = R * (v - center) + center;

        AlignmentState st;
        try {
            st = align_rotation(m, sets, cfg);
        } catch (const AlignmentNonConvergence& e) {
            st = e.state;
        }
        const bool recovered = std::abs(st.angles_deg[0] - ax) <= 2.0 &&
                               std::abs(st.angles_deg[1] - ay) <= 2.0 &&
                               std::abs(st.angles_deg[2] - az) <= 2.0 &&
                               st.iterations <= 500;
        if (recovered) ++ok;
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::ostringstream detail;
    detail << ok << "/100 trials within 2 deg/axis in <=500 iterations, " << secs << " s";
    report(1, "rotation recovery", ok >= 95 && secs < 10.0, detail.str());
}

// ---------------------------------------------------------------- 2
void criterion_error_oracle() {
    std::mt19937_64 rng(777);
    std::uniform_real_distribution<double> uni(-3, 3);
    int bad = 0;
    double worst = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        const int n = 2 + static_cast<int>(rng() % 60);
        std::vector<Vec3> pts;
        for (int i = 0; i < n; ++i) pts.emplace_back(uni(rng), uni(rng), uni(rng));
        long double mean_x = 0, mean_z = 0;
        for (const auto& p : pts) {
            mean_x += p.x();
            mean_z += p.z();
        }
        mean_x /= n;
        mean_z /= n;
        long double var_z = 0;
        for (const auto& p : pts) var_z += (p.z() - mean_z) * (p.z() - mean_z);
        const double sigma = std::max(std::sqrt((double)(var_z / n)), 1e-6);
        const double alpha = (double)mean_z;
        const double d_level = uni(rng);

        long double by = 0, bz = 0, bx = 0;
        for (const auto& p : pts) {
            const long double u = (p.z() - alpha) / sigma;
            const long double w = std::exp(-(double)(u * u));
            by += std::fabs((long double)p.x() - mean_x) * w;
            bz += std::fabs((long double)p.x() - mean_x) * (1.0L - w);
            bx += std::fabs((long double)p.y() - (long double)d_level) * w;
        }
        const double ey = error_y(pts, alpha, sigma, WeightForm::gaussian);
        const double ez = error_z(pts, alpha, sigma, WeightForm::gaussian);
        const double ex = error_x(pts, d_level, alpha, sigma, WeightForm::gaussian);
        for (const auto& [impl, brute] :
             {std::pair<double, long double>{ey, by}, {ez, bz}, {ex, bx}}) {
            const double rel =
                std::abs(impl - (double)brute) / std::max(1e-30, std::abs((double)brute));
            worst = std::max(worst, rel);
            if (rel > 1e-9) ++bad;
        }
    }
    std::ostringstream detail;
    detail << "1000 random sets, worst relative deviation " << worst;
    report(2, "error-function oracle", bad == 0, detail.str());
}

// ---------------------------------------------------------------- 3
void criterion_stitch_watertight() {
    std::mt19937_64 rng(4242);
    std::uniform_real_distribution<double> ub(-1, 1), uscale(0.25, 0.45), uyaw(-25, 25);
    int ok = 0;
    std::string first_failure;
    for (int trial = 0; trial < 20; ++trial) {
        const BodyModel model = synthetic::body_model();
        Eigen::VectorXd beta(2);
        beta << ub(rng), ub(rng);
        const Mesh shaped = apply_shape(model, {beta});

        Mesh head = synthetic::head(uscale(rng));
        const Vec3 pre(0.0, uyaw(rng), 0.0);
        const Eigen::Matrix3d R = alignment_rotation_matrix(pre).transpose();
        const Vec3 hc = head.centroid();
        for (auto& v : head.vertices) v = R * (v - hc) + hc;

        try {
            const Mesh cut_head = cut_and_place_head(head, pre, Vec3::Zero());
            const auto head_loops = boundary_loops(cut_head);
            const Mesh cut_body = delete_vertex_group(shaped, "neck_top_ring").mesh;
            const auto body_loops = boundary_loops(cut_body);
            const Vec3 t =
                align_translation(cut_head, cut_body, head_loops.at(0), body_loops.at(0));
            const CombinedModel combined = stitch(shaped, head, pre, t, model);

            const int n = static_cast<int>(body_loops[0].size());
            const int m = static_cast<int>(head_loops[0].size());
            const int loops_before =
                static_cast<int>(body_loops.size() + head_loops.size());
            const int loops_after =
                static_cast<int>(boundary_loops(combined.mesh).size());
            const bool face_count_exact =
                combined.mesh.face_count() ==
                cut_body.face_count() + cut_head.face_count() + n + m;
            if (loops_after == loops_before - 2 && face_count_exact &&
                is_watertight(combined.mesh))
                ++ok;
            else if (first_failure.empty())
                first_failure = "trial " + std::to_string(trial) + " census mismatch";
        } catch (const std::exception& e) {
            if (first_failure.empty())
                first_failure = "trial " + std::to_string(trial) + ": " + e.what();
        }
    }
    std::ostringstream detail;
    detail << ok << "/20 randomized pairs watertight with exact n+m bridge";
    if (!first_failure.empty()) detail << " (" << first_failure << ")";
    report(3, "stitch watertightness", ok == 20, detail.str());
}

// ---------------------------------------------------------------- 4
void criterion_blendshape_linearity() {
    const BodyModel model = synthetic::body_model();
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> uni(-2, 2);
    double worst_add = 0, worst_fd = 0;
    for (int trial = 0; trial < 50; ++trial) {
        Eigen::VectorXd b1(2), b2(2);
        b1 << uni(rng), uni(rng);
        b2 << uni(rng), uni(rng);
        const Mesh s1 = apply_shape(model, {b1});
        const Mesh s2 = apply_shape(model, {b2});
        const Mesh s12 = apply_shape(model, {Eigen::VectorXd(b1 + b2)});
        for (int v = 0; v < s1.vertex_count(); ++v) {
            const Vec3 lhs =
                s1.vertices[v] + s2.vertices[v] - model.template_mesh.vertices[v];
            worst_add = std::max(worst_add, (lhs - s12.vertices[v]).norm());
        }
    }
    const double eps = 1e-3;
    for (int k = 0; k < model.shape_dim(); ++k) {
        Eigen::VectorXd beta = Eigen::VectorXd::Zero(2);
        beta[k] = eps;
        const Mesh s = apply_shape(model, {beta});
        for (int v = 0; v < s.vertex_count(); ++v) {
            const Vec3 fd = (s.vertices[v] - model.template_mesh.vertices[v]) / eps;
            worst_fd = std::max(worst_fd, (fd - model.shape_basis[k][v]).norm());
        }
    }
    std::ostringstream detail;
    detail << "additivity " << worst_add << ", finite-difference " << worst_fd;
    report(4, "blendshape linearity", worst_add <= 1e-6 && worst_fd <= 1e-6, detail.str());
}

// ---------------------------------------------------------------- 5
void criterion_lbs() {
    const BodyModel model = synthetic::body_model();
    const Mesh& rest = model.template_mesh;
    Pose zero;
    zero.theta.assign(model.joint_count, Vec3::Zero());
    const Mesh posed_zero = apply_pose(model, rest, zero);
    double worst_id = 0;
    for (int v = 0; v < rest.vertex_count(); ++v)
        worst_id = std::max(worst_id, (posed_zero.vertices[v] - rest.vertices[v]).norm());

    std::mt19937_64 rng(1234);
    std::uniform_real_distribution<double> uni(-0.8, 0.8);
    double worst_rigid = 0;
    for (int trial = 0; trial < 10; ++trial) {
        Pose pose;
        for (int j = 0; j < model.joint_count; ++j)
            pose.theta.emplace_back(uni(rng), uni(rng), uni(rng));
        const Mesh posed = apply_pose(model, rest, pose);
        std::vector<int> solo;
        for (int v = 0; v < rest.vertex_count(); ++v)
            if (model.weights[v].size() == 1) solo.push_back(v);
        for (std::size_t s = 0; s + 11 < solo.size(); s += 11) {
            const int i = solo[s], j = solo[s + 11];
            if (model.weights[i][0].joint != model.weights[j][0].joint) continue;
            const double before = (rest.vertices[i] - rest.vertices[j]).norm();
            const double after = (posed.vertices[i] - posed.vertices[j]).norm();
            worst_rigid = std::max(worst_rigid, std::abs(after - before));
        }
    }
    std::ostringstream detail;
    detail << "identity " << worst_id << ", rigidity " << worst_rigid;
    report(5, "LBS identity and rigidity", worst_id <= 1e-9 && worst_rigid <= 1e-6,
           detail.str());
}

// ---------------------------------------------------------------- 6
void criterion_dominant_color() {
    std::mt19937_64 rng(31337);
    int ok = 0;
    for (int trial = 0; trial < 100; ++trial) {
        // A majority color and three distractors, all well separated.
        std::vector<Eigen::Vector3i> colors;
        while (colors.size() < 4) {
            Eigen::Vector3i c(static_cast<int>(rng() % 200) + 28,
                              static_cast<int>(rng() % 200) + 28,
                              static_cast<int>(rng() % 200) + 28);
            bool far = true;
            for (const auto& o : colors)
                if ((c - o).cwiseAbs().maxCoeff() < 70) far = false;
            if (far) colors.push_back(c);
        }
        Image img(40, 40);
        std::uniform_int_distribution<int> jitter(-2, 2);
        for (int i = 0; i < 1600; ++i) {
            const int cluster = i < 960 ? 0 : 1 + i % 3;  // 60% majority
            Rgb px;
            for (int c = 0; c < 3; ++c)
                px[c] = static_cast<std::uint8_t>(
                    std::clamp(colors[cluster][c] + jitter(rng), 0, 255));
            img.set(i % 40, i / 40, px);
        }
        const Rgb got = dominant_skin_color(img);
        bool close = true;
        for (int c = 0; c < 3; ++c)
            if (std::abs(static_cast<int>(got[c]) - colors[0][c]) > 2) close = false;
        if (close) ++ok;
    }
    report(6, "dominant color", ok == 100,
           std::to_string(ok) + "/100 within +-2 per channel");
}

// ---------------------------------------------------------------- 7
void criterion_penetration() {
    const BodyModel model = synthetic::body_model();
    const Mesh& torso = model.template_mesh;
    const Garment shirt = synthetic::shirt();
    Mesh placed = shirt.mesh;
    std::mt19937_64 rng(55);
    std::uniform_int_distribution<int> pick(0, placed.vertex_count() - 1);
    for (int i = 0; i < placed.vertex_count() / 20; ++i)
        placed.vertices[pick(rng)] *= 0.15;  // plant 5% well inside

    const double eps = 0.005;
    const auto result = resolve_penetration(placed, torso, eps, 10);

    // Brute-force oracle: minimum distance over every triangle, written
    // against the plane/edge parametrization rather than the library path.
    double min_d = 1e18;
    for (const auto& p : result.mesh.vertices) {
        for (const Face& f : torso.faces) {
            const Vec3 &a = torso.vertices[f[0]], &b = torso.vertices[f[1]],
                       &c = torso.vertices[f[2]];
            const Vec3 n = (b - a).cross(c - a).normalized();
            const Vec3 proj = p - n.dot(p - a) * n;
            const double inside1 = (b - a).cross(proj - a).dot(n);
            const double inside2 = (c - b).cross(proj - b).dot(n);
            const double inside3 = (a - c).cross(proj - c).dot(n);
            if (inside1 >= 0 && inside2 >= 0 && inside3 >= 0)
                min_d = std::min(min_d, (p - proj).norm());
            const Vec3 edges[3][2] = {{a, b}, {b, c}, {c, a}};
            for (const auto& e : edges) {
                const Vec3 d = e[1] - e[0];
                const double t = std::clamp(d.dot(p - e[0]) / d.squaredNorm(), 0.0, 1.0);
                min_d = std::min(min_d, (p - (e[0] + t * d)).norm());
            }
        }
    }
    std::ostringstream detail;
    detail << "min oracle distance " << min_d << " (eps/2 = " << eps / 2 << "), "
           << result.passes << " passes";
    report(7, "penetration resolution",
           result.clearance_met && min_d >= eps / 2 - 1e-12 && result.passes <= 10,
           detail.str());
}

// ---------------------------------------------------------------- 8
void criterion_fit_map() {
    const BodyModel model = synthetic::body_model();
    const Garment shirt = synthetic::shirt();
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> uni(-1, 1);
    std::vector<Eigen::VectorXd> samples;
    for (int i = 0; i < 50; ++i) {
        Eigen::VectorXd b(2);
        b << uni(rng), uni(rng);
        samples.push_back(b);
    }
    const FitMap fit = train_fit_map(model, shirt, samples);
    double worst = 0;
    for (int i = 0; i < 20; ++i) {
        Eigen::VectorXd b(2);
        b << uni(rng), uni(rng);
        const auto [s, t] = predict_fit_params(fit, {b});
        const auto [se, te] = fit_targets(model, shirt, b);
        worst = std::max({worst, (s - se).norm(), (t - te).norm()});
    }
    std::ostringstream detail;
    detail << "residual " << fit.residual << ", held-out error " << worst;
    report(8, "fit-map exactness", fit.residual <= 1e-6 && worst <= 1e-6, detail.str());
}

// ---------------------------------------------------------------- 9
void criterion_determinism() {
    const std::vector<std::string> reconstruction_artifacts = {
        "avatar.obj",     "avatar.groups.json", "avatar.weights.json",
        "avatar_head.png", "avatar_body.png",   "report.json"};

    auto run_all = [&](const fs::path& assets) -> bool {
        if (run_cli("reconstruct --config " + (assets / "pipeline_config.json").string()) !=
            0)
            return false;
        const fs::path out = assets / "out";
        if (run_cli("fit --avatar " + out.string() + " --garment tshirt_a") != 0)
            return false;
        return run_cli("pose --avatar " + out.string() + " --poses " +
                       (assets / "poses" / "bend.json").string() + " --out " +
                       (out / "frames").string() + " --frames 3") == 0;
    };
    auto copy_assets = [&](const std::string& tag) {
        const fs::path dst = fs::temp_directory_path() / ("avatarforge_accept_" + tag);
        fs::remove_all(dst);
        fs::copy(g_assets, dst, fs::copy_options::recursive);
        return dst;
    };

    const fs::path a = copy_assets("run_a");
    const fs::path b = copy_assets("run_b");

    // Immutability: reconstruction artifacts hash-stable across fit + pose.
    if (run_cli("reconstruct --config " + (a / "pipeline_config.json").string()) != 0) {
        report(9, "determinism and immutability", false, "reconstruct failed");
        return;
    }
    std::map<std::string, std::string> before;
    for (const auto& name : reconstruction_artifacts)
        before[name] = file_bytes(a / "out" / name);
    if (run_cli("fit --avatar " + (a / "out").string() + " --garment tshirt_a") != 0 ||
        run_cli("pose --avatar " + (a / "out").string() + " --poses " +
                (a / "poses" / "bend.json").string() + " --out " +
                (a / "out" / "frames").string() + " --frames 3") != 0) {
        report(9, "determinism and immutability", false, "fit/pose failed");
        return;
    }
    bool immutable = true;
    for (const auto& name : reconstruction_artifacts)
        if (file_bytes(a / "out" / name) != before[name]) immutable = false;

    // Determinism: a second full run produces byte-identical outputs.
    if (!run_all(b)) {
        report(9, "determinism and immutability", false, "second run failed");
        return;
    }
    std::vector<std::string> compare = reconstruction_artifacts;
    compare.insert(compare.end(),
                   {"avatar_tshirt_a.obj", "avatar_tshirt_a.weights.json",
                    "fit_tshirt_a.report.json", "frames/frame_0000.obj",
                    "frames/frame_0001.obj", "frames/frame_0002.obj",
                    "frames/frame_0002_tshirt_a.obj"});
    bool identical = true;
    std::string first_diff;
    for (const auto& name : compare) {
        if (file_bytes(a / "out" / name) != file_bytes(b / "out" / name)) {
            identical = false;
            if (first_diff.empty()) first_diff = name;
        }
    }
    std::ostringstream detail;
    detail << (immutable ? "reconstruction artifacts stable" : "artifacts mutated") << "; "
           << (identical ? "both runs byte-identical" : "runs differ at " + first_diff);
    report(9, "determinism and immutability", immutable && identical, detail.str());
}

}  // namespace

int main(int argc, char** argv) {
    if (argc < 3) {
        std::cerr << "usage: acceptance <avatarforge-cli> <assets-dir>\n";
        return 2;
    }
    g_cli = argv[1];
    g_assets = argv[2];

    criterion_rotation_recovery();
    criterion_error_oracle();
    criterion_stitch_watertight();
    criterion_blendshape_linearity();
    criterion_lbs();
    criterion_dominant_color();
    criterion_penetration();
    criterion_fit_map();
    criterion_determinism();

    std::cout << (g_failures == 0 ? "ALL CRITERIA PASSED"
                                  : std::to_string(g_failures) + " CRITERIA FAILED")
              << '\n';
    return g_failures == 0 ? 0 : 1;
}
