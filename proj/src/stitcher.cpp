/*
 * avatarforge - personalized, animatable 3-D human reconstruction for
 * virtual try-on.
 *
 * File: src/stitcher.cpp
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
#include "avatarforge/obj_io.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <set>

namespace avatarforge {

namespace {

Vec3 centroid_of(const std::vector<Vec3>& pts) {
    Vec3 c = Vec3::Zero();
    for (const auto& p : pts) c += p;
    return c / static_cast<double>(pts.size());
}

double orient2d(const Vec2& p, const Vec2& q, const Vec2& r) {
    return (q.x() - p.x()) * (r.y() - p.y()) - (q.y() - p.y()) * (r.x() - p.x());
}

bool segments_properly_cross(const Vec2& p, const Vec2& q, const Vec2& r, const Vec2& s) {
    const double d1 = orient2d(p, q, r);
    const double d2 = orient2d(p, q, s);
    const double d3 = orient2d(r, s, p);
    const double d4 = orient2d(r, s, q);
    return ((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) &&
           ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0));
}

// Angular winding sign of a projected loop (+1 counter-clockwise in (u,v)).
int winding_sign(const std::vector<Vec2>& proj) {
    double area2 = 0;
    for (std::size_t i = 0; i < proj.size(); ++i) {
        const Vec2& a = proj[i];
        const Vec2& b = proj[(i + 1) % proj.size()];
        area2 += a.x() * b.y() - b.x() * a.y();
    }
    return area2 >= 0 ? 1 : -1;
}

constexpr double kTwoPi = 2.0 * std::numbers::pi;

}  // namespace

std::vector<Face> bridge_loops(const std::vector<Vec3>& loop_a,
                               const std::vector<Vec3>& loop_b) {
    const int n = static_cast<int>(loop_a.size());
    const int m = static_cast<int>(loop_b.size());
    if (n < 3 || m < 3) throw StitchError("bridge loops need at least 3 vertices each");

    const Vec3 ca = centroid_of(loop_a);
    const Vec3 cb = centroid_of(loop_b);
    Vec3 axis = cb - ca;
    if (axis.norm() < 1e-12) {
        // Coincident centroids: fall back to loop_a's Newell normal.
        axis = Vec3::Zero();
        for (int i = 0; i < n; ++i) {
            const Vec3& p = loop_a[i];
            const Vec3& q = loop_a[(i + 1) % n];
            axis += Vec3((p.y() - q.y()) * (p.z() + q.z()), (p.z() - q.z()) * (p.x() + q.x()),
                         (p.x() - q.x()) * (p.y() + q.y()));
        }
        if (axis.norm() < 1e-12) throw StitchError("cannot determine bridge axis");
    }
    axis.normalize();

    // Shared in-plane reference frame for both loops.
    Vec3 ref = loop_a[0] - ca;
    ref -= ref.dot(axis) * axis;
    if (ref.norm() < 1e-12) ref = std::abs(axis.x()) < 0.9 ? Vec3::UnitX() : Vec3::UnitY();
    ref -= ref.dot(axis) * axis;
    ref.normalize();
    const Vec3 vdir = axis.cross(ref);

    auto project = [&](const std::vector<Vec3>& loop, const Vec3& c) {
        std::vector<Vec2> out(loop.size());
        for (std::size_t i = 0; i < loop.size(); ++i) {
            const Vec3 d = loop[i] - c;
            out[i] = Vec2(d.dot(ref), d.dot(vdir));
        }
        return out;
    };
    const auto pa = project(loop_a, ca);
    const auto pb = project(loop_b, cb);

    for (int i = 0; i < n; ++i)
        for (int j = 0; j < m; ++j)
            if (segments_properly_cross(pa[i], pa[(i + 1) % n], pb[j], pb[(j + 1) % m]))
                throw StitchError("loops interpenetrate in the bridge plane");

    // Walk both loops in the same angular direction; loop_b may need its
    // traversal order reversed relative to its storage order.
    const int sa = winding_sign(pa);
    const bool reverse_b = winding_sign(pb) == sa ? false : true;

    auto angles = [&](const std::vector<Vec2>& proj) {
        std::vector<double> out(proj.size());
        for (std::size_t i = 0; i < proj.size(); ++i)
            out[i] = std::atan2(proj[i].y(), proj[i].x());
        return out;
    };
    const auto ang_a = angles(pa);
    const auto ang_b = angles(pb);

    // Unwrapped angle sequence in sweep direction `sa`, starting at seq[0].
    auto unwrap = [&](const std::vector<double>& ang, const std::vector<int>& order,
                      double start) {
        std::vector<double> out(order.size() + 1);
        double prev = start;
        for (std::size_t k = 0; k < order.size(); ++k) {
            double a = ang[order[k]];
            double delta = sa * (a - prev);
            delta = std::fmod(delta, kTwoPi);
            if (delta < 0) delta += kTwoPi;
            if (k == 0) delta = 0;
            out[k] = (k == 0 ? 0.0 : out[k - 1]) + delta;
            prev = a;
        }
        out[order.size()] = out[0] + kTwoPi;
        return out;
    };

    std::vector<int> order_a(n);
    for (int i = 0; i < n; ++i) order_a[i] = i;
    std::vector<int> order_b(m);
    for (int j = 0; j < m; ++j) order_b[j] = reverse_b ? (m - j) % m : j;

    // Start loop_b at the vertex whose sweep gap after loop_a's start is
    // smallest, so the zipper pairs angular neighbours.
    double best_gap = std::numeric_limits<double>::infinity();
    int b_start = 0;
    for (int k = 0; k < m; ++k) {
        double gap = sa * (ang_b[order_b[k]] - ang_a[0]);
        gap = std::fmod(gap, kTwoPi);
        if (gap < 0) gap += kTwoPi;
        if (gap < best_gap) {
            best_gap = gap;
            b_start = k;
        }
    }
    std::rotate(order_b.begin(), order_b.begin() + b_start, order_b.end());

    const auto ua = unwrap(ang_a, order_a, ang_a[order_a[0]]);
    auto ub = unwrap(ang_b, order_b, ang_b[order_b[0]]);
    for (auto& x : ub) x += best_gap;

    std::vector<Face> tris;
    tris.reserve(n + m);
    int i = 0, j = 0;
    auto A = [&](int k) { return order_a[k % n]; };
    auto B = [&](int k) { return n + order_b[k % m]; };
    while (i < n || j < m) {
        bool take_a;
        if (i >= n) take_a = false;
        else if (j >= m) take_a = true;
        else take_a = ua[i + 1] <= ub[j + 1];
        if (take_a) {
            tris.push_back({A(i + 1), A(i), B(j)});
            ++i;
        } else {
            tris.push_back({B(j), B(j + 1), A(i)});
            ++j;
        }
    }
    return tris;
}

std::vector<WeightRow> transfer_skin_weights(const std::vector<Vec3>& vertices,
                                             const std::vector<double>& ramp,
                                             const std::vector<Vec3>& body_vertices,
                                             const std::vector<WeightRow>& body_weights,
                                             int head_joint) {
    if (head_joint < 0) throw StitchError("missing head joint");
    if (vertices.size() != ramp.size())
        throw StitchError("ramp size does not match vertex count");
    if (body_vertices.size() != body_weights.size())
        throw StitchError("body weights do not match body vertices");

    std::vector<WeightRow> rows(vertices.size());
    for (std::size_t v = 0; v < vertices.size(); ++v) {
        const double t = std::clamp(ramp[v], 0.0, 1.0);
        if (t >= 1.0) {
            rows[v] = {{head_joint, 1.0}};
            continue;
        }
        // Nearest body vertex; ties resolve to the smaller index.
        int best = -1;
        double best_d = std::numeric_limits<double>::infinity();
        for (std::size_t b = 0; b < body_vertices.size(); ++b) {
            const double d = (vertices[v] - body_vertices[b]).squaredNorm();
            if (d < best_d) {
                best_d = d;
                best = static_cast<int>(b);
            }
        }
        WeightRow row;
        double head_w = t;
        for (const auto& [joint, w] : body_weights[best]) {
            if (joint == head_joint) head_w += (1.0 - t) * w;
            else row.push_back({joint, (1.0 - t) * w});
        }
        if (head_w > 0.0) row.push_back({head_joint, head_w});
        rows[v] = std::move(row);
    }
    return rows;
}

Mesh cut_and_place_head(const Mesh& head, const Vec3& rotation_deg, const Vec3& translation) {
    if (!head.groups.count("head_cut")) throw StitchError("head has no 'head_cut' group");
    Mesh cut = delete_vertex_group(head, "head_cut").mesh;
    const Eigen::Matrix3d rot = alignment_rotation_matrix(rotation_deg);
    const Vec3 center = cut.centroid();
    for (auto& v : cut.vertices) v = rot * (v - center) + center + translation;
    return cut;
}

CombinedModel stitch(const Mesh& body, const Mesh& head, const Vec3& rotation_deg,
                     const Vec3& translation, const BodyModel& model) {
    if (!body.groups.count("neck_seam")) throw StitchError("body has no 'neck_seam' group");
    if (!body.groups.count("neck_top_ring"))
        throw StitchError("body has no 'neck_top_ring' group");
    for (const double v : {rotation_deg.x(), rotation_deg.y(), rotation_deg.z(),
                           translation.x(), translation.y(), translation.z()})
        if (!std::isfinite(v)) throw StitchError("non-finite alignment values");

    Mesh placed_head = cut_and_place_head(head, rotation_deg, translation);
    const auto head_loops = boundary_loops(placed_head);
    if (head_loops.size() != 1)
        throw StitchError("head cut yields " + std::to_string(head_loops.size()) +
                          " boundary loops, expected 1");

    Mesh cut_body = delete_vertex_group(body, "neck_top_ring").mesh;
    const auto body_loops = boundary_loops(cut_body);
    if (body_loops.size() != 1)
        throw StitchError("body cut yields " + std::to_string(body_loops.size()) +
                          " boundary loops, expected 1");

    const auto& body_loop = body_loops[0];
    const auto& head_loop = head_loops[0];
    std::vector<Vec3> body_loop_pos, head_loop_pos;
    for (int i : body_loop) body_loop_pos.push_back(cut_body.vertices[i]);
    for (int i : head_loop) head_loop_pos.push_back(placed_head.vertices[i]);
    const auto band = bridge_loops(body_loop_pos, head_loop_pos);

    // Merge: body vertices first, then head vertices.
    const int nb = cut_body.vertex_count();
    const int nbl = static_cast<int>(body_loop.size());
    CombinedModel out;
    out.mesh.vertices = cut_body.vertices;
    out.mesh.vertices.insert(out.mesh.vertices.end(), placed_head.vertices.begin(),
                             placed_head.vertices.end());
    const bool both_uvs = cut_body.has_uvs() && placed_head.has_uvs();
    if (both_uvs) {
        out.mesh.uvs = cut_body.uvs;
        out.mesh.uvs.insert(out.mesh.uvs.end(), placed_head.uvs.begin(),
                            placed_head.uvs.end());
    }
    out.mesh.faces = cut_body.faces;
    for (const Face& f : placed_head.faces)
        out.mesh.faces.push_back({f[0] + nb, f[1] + nb, f[2] + nb});
    for (const Face& f : band) {
        Face g;
        for (int k = 0; k < 3; ++k)
            g[k] = f[k] < nbl ? body_loop[f[k]] : head_loop[f[k] - nbl] + nb;
        out.mesh.faces.push_back(g);
    }
    for (const auto& [name, idx] : cut_body.groups) out.mesh.groups[name] = idx;
    for (const auto& [name, idx] : placed_head.groups) {
        std::vector<int> shifted;
        shifted.reserve(idx.size());
        for (int i : idx) shifted.push_back(i + nb);
        const std::string key = out.mesh.groups.count(name) ? "head_" + name : name;
        out.mesh.groups[key] = std::move(shifted);
    }

    // Seam band: both rims plus one topological ring on each side.
    std::set<int> head_rim(head_loop.begin(), head_loop.end());
    std::set<int> body_rim(body_loop.begin(), body_loop.end());
    std::set<int> head_ring, body_ring;
    for (const Face& f : placed_head.faces)
        for (int e = 0; e < 3; ++e)
            if (head_rim.count(f[e]))
                for (int k = 0; k < 3; ++k)
                    if (!head_rim.count(f[k])) head_ring.insert(f[k]);
    for (const Face& f : cut_body.faces)
        for (int e = 0; e < 3; ++e)
            if (body_rim.count(f[e]))
                for (int k = 0; k < 3; ++k)
                    if (!body_rim.count(f[k])) body_ring.insert(f[k]);
    for (int i : body_rim) out.seam_band.push_back(i);
    for (int i : body_ring) out.seam_band.push_back(i);
    for (int i : head_rim) out.seam_band.push_back(i + nb);
    for (int i : head_ring) out.seam_band.push_back(i + nb);
    std::sort(out.seam_band.begin(), out.seam_band.end());
    const int head_vertex_base = nb;

    out.provenance.assign(out.mesh.vertex_count(), Provenance::head);
    for (int i = 0; i < nb; ++i) out.provenance[i] = Provenance::body;
    for (int i : head_rim) out.provenance[i + nb] = Provenance::bridge;

    // Weights: body side keeps the model rows of surviving vertices; head
    // side ramps from nearest-body weights at the rim to the head joint.
    const int head_joint = model.head_joint();
    const auto cut = delete_vertex_group(body, "neck_top_ring");
    std::vector<WeightRow> body_rows(nb);
    for (int old = 0; old < body.vertex_count(); ++old)
        if (cut.remap[old] >= 0) body_rows[cut.remap[old]] = model.weights[old];

    const Vec3 body_rim_c = centroid_of(body_loop_pos);
    const Vec3 head_rim_c = centroid_of(head_loop_pos);
    Vec3 axis = head_rim_c - body_rim_c;
    if (axis.norm() < 1e-12) axis = Vec3::UnitY();
    axis.normalize();
    double band_top = 0.0;
    for (int i : head_ring)
        band_top = std::max(band_top, (placed_head.vertices[i] - body_rim_c).dot(axis));
    for (int i : head_rim)
        band_top = std::max(band_top, (placed_head.vertices[i] - body_rim_c).dot(axis));
    std::vector<double> ramp(placed_head.vertex_count(), 1.0);
    if (band_top > 1e-12) {
        for (int i : head_rim)
            ramp[i] = std::clamp((placed_head.vertices[i] - body_rim_c).dot(axis) / band_top,
                                 0.0, 1.0);
        for (int i : head_ring)
            ramp[i] = std::clamp((placed_head.vertices[i] - body_rim_c).dot(axis) / band_top,
                                 0.0, 1.0);
    } else {
        for (int i : head_rim) ramp[i] = 0.0;
    }
    const auto head_rows = transfer_skin_weights(placed_head.vertices, ramp,
                                                 cut_body.vertices, body_rows, head_joint);
    out.weights = std::move(body_rows);
    out.weights.insert(out.weights.end(), head_rows.begin(), head_rows.end());

    out.seam_ramp.reserve(out.seam_band.size());
    for (int v : out.seam_band)
        out.seam_ramp.push_back(v < head_vertex_base ? 0.0 : ramp[v - head_vertex_base]);

    out.joint_count = model.joint_count;
    out.parents = model.parents;
    out.joint_names = model.joint_names;
    out.rest_joints = regress_joints(model, body);

    validate(out.mesh);
    return out;
}

void save_combined(const CombinedModel& combined, const std::filesystem::path& obj_path,
                   const std::filesystem::path& weights_path) {
    save_mesh(combined.mesh, obj_path);
    nlohmann::json j;
    j["joints"] = combined.joint_count;
    auto rows = nlohmann::json::array();
    for (const auto& row : combined.weights) {
        auto r = nlohmann::json::array();
        for (const auto& [joint, w] : row) r.push_back({joint, w});
        rows.push_back(std::move(r));
    }
    j["weights"] = std::move(rows);
    auto prov = nlohmann::json::array();
    for (Provenance p : combined.provenance)
        prov.push_back(p == Provenance::body ? "body"
                       : p == Provenance::head ? "head"
                                               : "bridge");
    j["provenance"] = std::move(prov);
    j["parents"] = combined.parents;
    auto joints = nlohmann::json::array();
    for (const auto& p : combined.rest_joints) joints.push_back({p.x(), p.y(), p.z()});
    j["rest_joints"] = std::move(joints);
    j["joint_names"] = combined.joint_names;
    j["seam_band"] = combined.seam_band;
    std::ofstream out(weights_path);
    if (!out) throw StitchError("cannot write " + weights_path.string());
    out << j.dump(2) << '\n';
}

CombinedModel load_combined(const std::filesystem::path& obj_path,
                            const std::filesystem::path& weights_path) {
    CombinedModel c;
    c.mesh = load_mesh(obj_path);
    std::ifstream in(weights_path);
    if (!in) throw StitchError("cannot open " + weights_path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw StitchError("bad weights JSON: " + std::string(e.what()));
    }
    c.joint_count = j.at("joints").get<int>();
    for (const auto& row : j.at("weights")) {
        WeightRow r;
        for (const auto& e : row) r.push_back({e.at(0).get<int>(), e.at(1).get<double>()});
        c.weights.push_back(std::move(r));
    }
    if (j.contains("provenance")) {
        for (const auto& p : j["provenance"]) {
            const std::string s = p.get<std::string>();
            c.provenance.push_back(s == "body" ? Provenance::body
                                   : s == "head" ? Provenance::head
                                                 : Provenance::bridge);
        }
    } else {
        c.provenance.assign(c.mesh.vertices.size(), Provenance::body);
    }
    c.parents = j.at("parents").get<std::vector<int>>();
    for (const auto& p : j.at("rest_joints"))
        c.rest_joints.emplace_back(p.at(0).get<double>(), p.at(1).get<double>(),
                                   p.at(2).get<double>());
    if (j.contains("joint_names"))
        c.joint_names = j["joint_names"].get<std::vector<std::string>>();
    if (j.contains("seam_band")) c.seam_band = j["seam_band"].get<std::vector<int>>();
    if (c.weights.size() != c.mesh.vertices.size())
        throw StitchError("weights row count does not match mesh");
    return c;
}

}  // namespace avatarforge
