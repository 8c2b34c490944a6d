// SPDX-License-Identifier: Apache-2.0

#include "edgewave/scenes.hpp"

#include <cmath>
#include <stdexcept>

namespace edgewave::scenes {

namespace {

int add_vertex(TriangleMesh& m, const Vec3& p) {
    m.vertices.push_back(p);
    return static_cast<int>(m.vertices.size() - 1);
}

// Quad (p0,p1,p2,p3) as triangles (p0,p1,p2) and (p0,p2,p3); the first
// triangle owns the full p0-p1 edge, so callers pass a shared wedge edge as
// (p0, p1) and pick the vertex order that makes the normal outward.
void add_quad(TriangleMesh& m, int p0, int p1, int p2, int p3, int material = 0) {
    m.triangles.push_back({p0, p1, p2, material});
    m.triangles.push_back({p0, p2, p3, material});
}

Scene finish(TriangleMesh mesh, BoundaryCondition bc) {
    Material mat;
    mat.bc = bc;
    mat.reflection = 0.0;
    mat.specularity = 0.0;
    return make_scene(std::move(mesh), {mat});
}

int edge_near(const Scene& scene, const Vec3& p) {
    for (int i = 0; i < static_cast<int>(scene.edges.edges.size()); ++i) {
        const ConvexEdge& e = scene.edges.edges[static_cast<size_t>(i)];
        Vec3 a = scene.mesh.vertex(e.a);
        Vec3 b = scene.mesh.vertex(e.b);
        Vec3 ab = b - a;
        double t = clamp(dot(p - a, ab) / ab.norm2(), 0.0, 1.0);
        if (distance(a + t * ab, p) < 1e-6) return i;
    }
    throw std::runtime_error("edge_near: no edge at the requested position");
}

}  // namespace

WedgeSetup single_wedge(double half_length, double face_size,
                        BoundaryCondition bc) {
    TriangleMesh m;
    double l = half_length, s = face_size;
    int a = add_vertex(m, {0, 0, -l});
    int b = add_vertex(m, {0, 0, l});
    int c = add_vertex(m, {-s, 0, l});
    int d = add_vertex(m, {-s, 0, -l});
    int e = add_vertex(m, {0, -s, l});
    int f = add_vertex(m, {0, -s, -l});
    // top face (+y outward): edge-adjacent triangle first
    m.triangles.push_back({b, a, d, 0});
    m.triangles.push_back({b, d, c, 0});
    // side face (+x outward)
    m.triangles.push_back({a, b, e, 0});
    m.triangles.push_back({a, e, f, 0});

    WedgeSetup out;
    out.scene = finish(std::move(m), bc);
    out.source = {-std::sqrt(3.0) * 1.0, 1.0, 0.0};  // 2 m at pi/6 off the top plane
    out.listener = {1.0, -1.0, 0.0};                 // 1 m + 1 m, in the shadow
    out.edge_index = edge_near(out.scene, {0, 0, 0});
    return out;
}

DoubleWedgeSetup double_wedge(double half_length, BoundaryCondition bc) {
    TriangleMesh m;
    double l = half_length;
    double apex_h = 2.0;
    double half_angle = kPi / 6.0;
    double dx = apex_h * std::tan(half_angle);
    for (double x0 : {0.0, 2.0}) {
        int a1 = add_vertex(m, {x0, apex_h, -l});
        int a2 = add_vertex(m, {x0, apex_h, l});
        int bl1 = add_vertex(m, {x0 - dx, 0, -l});
        int bl2 = add_vertex(m, {x0 - dx, 0, l});
        int br1 = add_vertex(m, {x0 + dx, 0, -l});
        int br2 = add_vertex(m, {x0 + dx, 0, l});
        add_quad(m, a2, a1, bl1, bl2);  // left slope, outward (-x, +y)
        add_quad(m, a1, a2, br2, br1);  // right slope, outward (+x, +y)
    }
    DoubleWedgeSetup out;
    out.scene = finish(std::move(m), bc);
    out.source = {-2.0, 1.0, 0.0};
    out.listener = {4.0, 1.0, 0.0};
    out.edge1 = edge_near(out.scene, {0, apex_h, 0});
    out.edge2 = edge_near(out.scene, {2, apex_h, 0});
    return out;
}

BoxesSetup boxes(BoundaryCondition bc) {
    TriangleMesh m;
    // floor: three quads across x, 6 triangles
    double xs[4] = {-15, -5, 5, 15};
    int fv[4][2];
    for (int i = 0; i < 4; ++i) {
        fv[i][0] = add_vertex(m, {xs[i], 0, -15});
        fv[i][1] = add_vertex(m, {xs[i], 0, 15});
    }
    for (int i = 0; i < 3; ++i) {
        add_quad(m, fv[i][0], fv[i][1], fv[i + 1][1], fv[i + 1][0]);
    }
    // two open-bottom boxes, 12 x 12 footprint, 4 high
    auto add_box = [&](double x0, double x1, double z0, double z1, double h) {
        int b000 = add_vertex(m, {x0, 0, z0});
        int b100 = add_vertex(m, {x1, 0, z0});
        int b110 = add_vertex(m, {x1, 0, z1});
        int b010 = add_vertex(m, {x0, 0, z1});
        int t000 = add_vertex(m, {x0, h, z0});
        int t100 = add_vertex(m, {x1, h, z0});
        int t110 = add_vertex(m, {x1, h, z1});
        int t010 = add_vertex(m, {x0, h, z1});
        add_quad(m, t000, t100, b100, b000);  // -z side
        add_quad(m, t110, t010, b010, b110);  // +z side
        add_quad(m, t010, t000, b000, b010);  // -x side
        add_quad(m, t100, t110, b110, b100);  // +x side
        add_quad(m, t000, t010, t110, t100);  // top (+y)
    };
    add_box(-13.5, -1.5, -6, 6, 4);
    add_box(1.5, 13.5, -6, 6, 4);

    BoxesSetup out;
    out.scene = finish(std::move(m), bc);
    out.source = {-7.5, 2.0, 8.0};
    out.listener = {7.5, 2.0, -8.0};
    return out;
}

SlitSetup single_slit(double width, double half_length, double screen_half_extent,
                      BoundaryCondition bc) {
    TriangleMesh m;
    double l = half_length;
    double fold = 0.25 * kPi / 180.0;  // half-wedge angle of the folded screen
    double w2 = width / 2.0;
    double s = screen_half_extent;
    double dy = (s - w2) * std::tan(fold);
    // left screen: apex at x = -w2, body toward -x
    {
        int a1 = add_vertex(m, {-w2, 0, -l});
        int a2 = add_vertex(m, {-w2, 0, l});
        int u1 = add_vertex(m, {-s, dy, -l});
        int u2 = add_vertex(m, {-s, dy, l});
        int d1 = add_vertex(m, {-s, -dy, -l});
        int d2 = add_vertex(m, {-s, -dy, l});
        add_quad(m, a2, a1, u1, u2);  // upper face (+y outward)
        add_quad(m, a1, a2, d2, d1);  // lower face (-y outward)
    }
    // right screen: apex at x = +w2, body toward +x
    {
        int a1 = add_vertex(m, {w2, 0, -l});
        int a2 = add_vertex(m, {w2, 0, l});
        int u1 = add_vertex(m, {s, dy, -l});
        int u2 = add_vertex(m, {s, dy, l});
        int d1 = add_vertex(m, {s, -dy, -l});
        int d2 = add_vertex(m, {s, -dy, l});
        add_quad(m, a1, a2, u2, u1);  // upper face (+y outward)
        add_quad(m, a2, a1, d1, d2);  // lower face (-y outward)
    }
    SlitSetup out;
    out.scene = finish(std::move(m), bc);
    out.source = {0, -out.source_distance, 0};
    out.source_amp = out.source_distance;
    out.edge_left = edge_near(out.scene, {-w2, 0, 0});
    out.edge_right = edge_near(out.scene, {w2, 0, 0});
    return out;
}

TriangleMesh unit_cube_mesh() {
    TriangleMesh m;
    int v[8];
    v[0] = add_vertex(m, {0, 0, 0});
    v[1] = add_vertex(m, {1, 0, 0});
    v[2] = add_vertex(m, {1, 1, 0});
    v[3] = add_vertex(m, {0, 1, 0});
    v[4] = add_vertex(m, {0, 0, 1});
    v[5] = add_vertex(m, {1, 0, 1});
    v[6] = add_vertex(m, {1, 1, 1});
    v[7] = add_vertex(m, {0, 1, 1});
    int f[12][3] = {{0, 3, 2}, {0, 2, 1},   // z = 0, outward -z
                    {4, 5, 6}, {4, 6, 7},   // z = 1, outward +z
                    {0, 1, 5}, {0, 5, 4},   // y = 0, outward -y
                    {3, 7, 6}, {3, 6, 2},   // y = 1, outward +y
                    {0, 4, 7}, {0, 7, 3},   // x = 0, outward -x
                    {1, 2, 6}, {1, 6, 5}};  // x = 1, outward +x
    for (auto& t : f) m.triangles.push_back({v[t[0]], v[t[1]], v[t[2]], 0});
    return m;
}

TriangleMesh flat_quad_mesh() {
    TriangleMesh m;
    int a = add_vertex(m, {0, 0, 0});
    int b = add_vertex(m, {1, 0, 0});
    int c = add_vertex(m, {1, 0, 1});
    int d = add_vertex(m, {0, 0, 1});
    m.triangles.push_back({a, b, c, 0});
    m.triangles.push_back({a, c, d, 0});
    return m;
}

}  // namespace edgewave::scenes
