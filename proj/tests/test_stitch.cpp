/*
 * avatarforge - personalized, animatable 3-D human reconstruction for
 * virtual try-on.
 *
 * File: tests/test_stitch.cpp
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
#include "avatarforge/stitcher.hpp"

#include "avatarforge/alignment.hpp"
#include "avatarforge/synthetic.hpp"

#include <doctest.h>

#include <cmath>
#include <map>
#include <set>

using namespace avatarforge;

namespace {

std::vector<Vec3> ring(int n, double radius, double y, double phase = 0.0) {
    std::vector<Vec3> pts;
    for (int i = 0; i < n; ++i) {
        const double t = 2 * M_PI * i / n + phase;
        pts.emplace_back(radius * std::sin(t), y, radius * std::cos(t));
    }
    return pts;
}

// Band checks: assemble the bridge as a mesh over both loops' vertices.
Mesh band_mesh(const std::vector<Vec3>& a, const std::vector<Vec3>& b,
               const std::vector<Face>& tris) {
    Mesh m;
    m.vertices = a;
    m.vertices.insert(m.vertices.end(), b.begin(), b.end());
    m.faces = tris;
    return m;
}

CombinedModel stitch_synthetic(double head_scale = 0.35) {
    const BodyModel model = synthetic::body_model();
    const Mesh head = synthetic::head(head_scale);

    const Mesh cut_head = cut_and_place_head(head, Vec3::Zero(), Vec3::Zero());
    const auto head_loops = boundary_loops(cut_head);
    const Mesh cut_body = delete_vertex_group(model.template_mesh, "neck_top_ring").mesh;
    const auto body_loops = boundary_loops(cut_body);
    const Vec3 t =
        align_translation(cut_head, cut_body, head_loops.at(0), body_loops.at(0));
    return stitch(model.template_mesh, head, Vec3::Zero(), t, model);
}

}  // namespace

TEST_CASE("bridge_loops emits exactly n+m triangles over all loop vertices") {
    struct CaseDef {
        int n, m;
    };
    for (const CaseDef c : {CaseDef{4, 4}, CaseDef{3, 3}, CaseDef{4, 6}}) {
        const auto a = ring(c.n, 1.0, 0.0);
        const auto b = ring(c.m, 0.5, 0.5);
        const auto tris = bridge_loops(a, b);
        CHECK(static_cast<int>(tris.size()) == c.n + c.m);

        std::set<int> used;
        for (const Face& f : tris)
            for (int v : f) used.insert(v);
        CHECK(static_cast<int>(used.size()) == c.n + c.m);

        // Annulus: boundary edges are exactly the two rims.
        const Mesh band = band_mesh(a, b, tris);
        const auto loops = boundary_loops(band);
        CHECK(loops.size() == 2);
        std::size_t rim_edges = 0;
        for (const auto& loop : loops) rim_edges += loop.size();
        CHECK(static_cast<int>(rim_edges) == c.n + c.m);
    }
}

TEST_CASE("bridge matches loops regardless of index phase") {
    const auto a = ring(4, 1.0, 0.0);
    const auto b = ring(4, 0.55, 0.7, M_PI / 4);
    const auto tris = bridge_loops(a, b);
    CHECK(tris.size() == 8);
    for (const Face& f : tris) {
        CHECK(f[0] != f[1]);
        CHECK(f[1] != f[2]);
        CHECK(f[0] != f[2]);
    }
}

TEST_CASE("interpenetrating loops are rejected") {
    // Two long thin rectangles crossing at right angles in projection.
    std::vector<Vec3> a = {{-2, 0, -0.1}, {2, 0, -0.1}, {2, 0, 0.1}, {-2, 0, 0.1}};
    std::vector<Vec3> b = {{-0.1, 0.5, -2}, {0.1, 0.5, -2}, {0.1, 0.5, 2}, {-0.1, 0.5, 2}};
    CHECK_THROWS_AS(bridge_loops(a, b), StitchError);
}

TEST_CASE("bridge winding is consistent with both loop orientations") {
    // Loops from a real cut: stitch the band back onto the two open meshes
    // and require the whole still-open assembly to be orientation-consistent
    // (every interior edge paired with its reverse).
    const BodyModel model = synthetic::body_model();
    const Mesh cut_body = delete_vertex_group(model.template_mesh, "neck_top_ring").mesh;
    const Mesh head = synthetic::head(0.35);
    Mesh cut_head = cut_and_place_head(head, Vec3::Zero(), Vec3::Zero());
    const auto body_loop = boundary_loops(cut_body).at(0);
    const auto head_loop = boundary_loops(cut_head).at(0);

    std::vector<Vec3> a, b;
    for (int i : body_loop) a.push_back(cut_body.vertices[i]);
    for (int i : head_loop) b.push_back(cut_head.vertices[i] + Vec3(0, 1.0, 0));
    const auto tris = bridge_loops(a, b);

    std::map<std::pair<int, int>, int> directed;
    auto add = [&](int u, int v) { directed[{u, v}]++; };
    for (const Face& f : tris)
        for (int e = 0; e < 3; ++e) add(f[e], f[(e + 1) % 3]);
    // Rim edges of the band must be the reverses of the source loop cycles.
    const int n = static_cast<int>(a.size());
    for (std::size_t i = 0; i < body_loop.size(); ++i) {
        const int u = static_cast<int>(i), v = static_cast<int>((i + 1) % body_loop.size());
        CHECK(directed.count({v, u}) == 1);
    }
    for (std::size_t i = 0; i < head_loop.size(); ++i) {
        const int u = n + static_cast<int>(i);
        const int v = n + static_cast<int>((i + 1) % head_loop.size());
        CHECK(directed.count({v, u}) == 1);
    }
    // No duplicated directed edge inside the band.
    for (const auto& [e, count] : directed) CHECK(count == 1);
}

TEST_CASE("transfer_skin_weights ramps between body weights and the head joint") {
    std::vector<Vec3> body_vertices = {{0, 0, 0}, {0, 1, 0}};
    std::vector<WeightRow> body_weights = {{{2, 1.0}}, {{2, 0.25}, {0, 0.75}}};
    const int head_joint = 3;

    SUBCASE("t=1 is pure head") {
        const auto rows = transfer_skin_weights({{0, 5, 0}}, {1.0}, body_vertices,
                                                body_weights, head_joint);
        REQUIRE(rows.size() == 1);
        REQUIRE(rows[0].size() == 1);
        CHECK(rows[0][0].joint == head_joint);
        CHECK(rows[0][0].weight == 1.0);
    }
    SUBCASE("t=0 copies the nearest body row") {
        const auto rows = transfer_skin_weights({{0, 0.9, 0}}, {0.0}, body_vertices,
                                                body_weights, head_joint);
        REQUIRE(rows[0].size() == 2);
        double w2 = 0, w0 = 0;
        for (const auto& [j, w] : rows[0]) (j == 2 ? w2 : w0) = w;
        CHECK(w2 == doctest::Approx(0.25).epsilon(1e-9));
        CHECK(w0 == doctest::Approx(0.75).epsilon(1e-9));
    }
    SUBCASE("midpoint blends evenly") {
        const auto rows = transfer_skin_weights({{0, 0.1, 0}}, {0.5}, body_vertices,
                                                body_weights, head_joint);
        std::map<int, double> w;
        for (const auto& [j, ww] : rows[0]) w[j] = ww;
        CHECK(w.at(2) == doctest::Approx(0.5));        // body row was {neck: 1}
        CHECK(w.at(head_joint) == doctest::Approx(0.5));
    }
    SUBCASE("rows always sum to one") {
        std::vector<Vec3> pts;
        std::vector<double> ramp;
        for (int i = 0; i < 25; ++i) {
            pts.emplace_back(0, i * 0.1, 0);
            ramp.push_back(i / 24.0);
        }
        const auto rows = transfer_skin_weights(pts, ramp, body_vertices, body_weights,
                                                head_joint);
        for (const auto& row : rows) {
            double sum = 0;
            for (const auto& [j, w] : row) {
                CHECK(w >= 0.0);
                sum += w;
            }
            CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
        }
    }
    SUBCASE("missing head joint") {
        CHECK_THROWS_AS(
            transfer_skin_weights({{0, 0, 0}}, {0.5}, body_vertices, body_weights, -1),
            StitchError);
    }
}

TEST_CASE("stitch produces a seam-watertight combined model") {
    const BodyModel model = synthetic::body_model();
    const Mesh head = synthetic::head(0.35);

    const Mesh cut_head = cut_and_place_head(head, Vec3::Zero(), Vec3::Zero());
    const Mesh cut_body = delete_vertex_group(model.template_mesh, "neck_top_ring").mesh;
    const int loops_before = static_cast<int>(boundary_loops(cut_head).size() +
                                              boundary_loops(cut_body).size());

    const CombinedModel combined = stitch_synthetic();

    // Loop census: bridging removes both rims from the boundary.
    const int loops_after = static_cast<int>(boundary_loops(combined.mesh).size());
    CHECK(loops_after == loops_before - 2);
    CHECK(is_watertight(combined.mesh));

    // Bridge face count is exactly n+m.
    const int n = static_cast<int>(boundary_loops(cut_body)[0].size());
    const int m = static_cast<int>(boundary_loops(cut_head)[0].size());
    CHECK(combined.mesh.face_count() ==
          cut_body.face_count() + cut_head.face_count() + n + m);

    // No boundary edge separates body provenance from head provenance, and
    // weight rows stay normalized.
    for (const auto& row : combined.weights) {
        double sum = 0;
        for (const auto& [j, w] : row) {
            CHECK(w >= 0.0);
            sum += w;
        }
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-6));
    }
    CHECK(combined.seam_band.size() == combined.seam_ramp.size());
    CHECK(combined.provenance.size() == combined.mesh.vertices.size());
}

TEST_CASE("stitch is deterministic") {
    const CombinedModel a = stitch_synthetic();
    const CombinedModel b = stitch_synthetic();
    REQUIRE(a.mesh.vertices.size() == b.mesh.vertices.size());
    for (std::size_t i = 0; i < a.mesh.vertices.size(); ++i)
        CHECK(a.mesh.vertices[i] == b.mesh.vertices[i]);
    CHECK(a.mesh.faces == b.mesh.faces);
    CHECK(a.seam_band == b.seam_band);
}

TEST_CASE("combined model poses consistently") {
    const BodyModel model = synthetic::body_model();
    const CombinedModel combined = stitch_synthetic();

    Pose rest;
    rest.theta.assign(model.joint_count, Vec3::Zero());
    const auto rest_transforms = pose_transforms(combined.parents, combined.rest_joints, rest);
    const auto rest_pts =
        skin_vertices(combined.mesh.vertices, combined.weights, rest_transforms, Vec3::Zero());
    for (std::size_t v = 0; v < rest_pts.size(); ++v)
        CHECK((rest_pts[v] - combined.mesh.vertices[v]).norm() < 1e-9);

    // A 30-degree head-joint turn moves the head region rigidly.
    Pose turn;
    turn.theta.assign(model.joint_count, Vec3::Zero());
    turn.theta[3] = Vec3(0, 30.0 * M_PI / 180.0, 0);
    const auto transforms = pose_transforms(combined.parents, combined.rest_joints, turn);
    const auto posed =
        skin_vertices(combined.mesh.vertices, combined.weights, transforms, Vec3::Zero());

    std::vector<int> head_only;
    for (std::size_t v = 0; v < combined.weights.size(); ++v)
        if (combined.provenance[v] == Provenance::head && combined.weights[v].size() == 1 &&
            combined.weights[v][0].joint == 3)
            head_only.push_back(static_cast<int>(v));
    REQUIRE(head_only.size() > 100);
    for (std::size_t s = 0; s + 7 < head_only.size(); s += 7) {
        const int i = head_only[s], j = head_only[s + 7];
        const double before = (combined.mesh.vertices[i] - combined.mesh.vertices[j]).norm();
        const double after = (posed[i] - posed[j]).norm();
        CHECK(after == doctest::Approx(before).epsilon(1e-6));
    }
}

TEST_CASE("stitch validates its inputs") {
    const BodyModel model = synthetic::body_model();
    const Mesh head = synthetic::head(0.35);
    SUBCASE("missing neck_seam") {
        Mesh body = model.template_mesh;
        body.groups.erase("neck_seam");
        CHECK_THROWS_AS(stitch(body, head, Vec3::Zero(), Vec3::Zero(), model), StitchError);
    }
    SUBCASE("missing head_cut") {
        Mesh bare = head;
        bare.groups.erase("head_cut");
        CHECK_THROWS_AS(stitch(model.template_mesh, bare, Vec3::Zero(), Vec3::Zero(), model),
                        StitchError);
    }
    SUBCASE("non-finite alignment") {
        CHECK_THROWS_AS(stitch(model.template_mesh, head,
                               Vec3(std::nan(""), 0, 0), Vec3::Zero(), model),
                        StitchError);
    }
}

TEST_CASE("combined model round-trips through OBJ + weights JSON") {
    const CombinedModel combined = stitch_synthetic();
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "avatarforge_stitch_tests";
    fs::create_directories(dir);
    save_combined(combined, dir / "avatar.obj", dir / "avatar.weights.json");
    const CombinedModel r = load_combined(dir / "avatar.obj", dir / "avatar.weights.json");
    CHECK(r.mesh.faces == combined.mesh.faces);
    CHECK(r.joint_count == combined.joint_count);
    CHECK(r.parents == combined.parents);
    CHECK(r.provenance == combined.provenance);
    REQUIRE(r.weights.size() == combined.weights.size());
    for (std::size_t v = 0; v < r.weights.size(); ++v) {
        REQUIRE(r.weights[v].size() == combined.weights[v].size());
        for (std::size_t k = 0; k < r.weights[v].size(); ++k) {
            CHECK(r.weights[v][k].joint == combined.weights[v][k].joint);
            CHECK(r.weights[v][k].weight == combined.weights[v][k].weight);
        }
    }
}
